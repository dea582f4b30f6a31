"""Convex generating functions on C and their derived sets.

A generator f is a proper convex lsc function on C with access to values,
gradients, a real 2x2 Hessian form where twice differentiable, and a
subdifferential set.  Two pointwise regimes drive the calculus downstream:

* smooth regime: f is quadratic, or C^2 with positive definite Hessian;
* corner regime: the real linear span of the subdifferential is all of C
  (only possible at nondifferentiable points).

Complex inner-product inequalities throughout this module are read on the
real part Re(conj(a) * b); an order on C itself would be meaningless and
the real-part reading is the one under which all the identities close.

Generators are immutable after construction; user-supplied hooks must be
pure, under which contract everything here is safe for concurrent use.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

__all__ = [
    "ConvexSet2D",
    "Generator",
    "SetDescriptor",
    "UnsupportedGenerator",
    "builtin",
    "make_generator",
    "cip",
    "re_cip",
    "condition_check",
    "q_set",
    "d_set",
    "gamma_set",
    "COND14",
    "COND15",
    "NEITHER",
]

COND14 = "cond14"
COND15 = "cond15"
NEITHER = "neither"

# pointwise smoothness tags
TAG_QUADRATIC = "quadratic"
TAG_C2PD = "c2-positive-definite"
TAG_FULLSPAN = "nonsmooth-fullspan"
TAG_OTHER = "other"


class UnsupportedGenerator(ValueError):
    """Raised when a generator lies outside the supported calculus."""


def cip(a: complex, b: complex) -> complex:
    """Complex inner product conj(a) * b."""
    return np.conj(complex(a)) * complex(b)


def re_cip(a: complex, b: complex) -> float:
    """Real inner product Re(conj(a) * b) identifying C with R^2."""
    return float(np.real(cip(a, b)))


def _as_vec(z: complex) -> np.ndarray:
    return np.array([complex(z).real, complex(z).imag])


@dataclass(frozen=True)
class ConvexSet2D:
    """Closed convex subset of C in one of a few exact representations.

    kinds: point, segment, polygon (vertex loop), halfplane
    {z : Re(conj(normal) z) <= offset}, line {t * direction}, plane, disk
    (center + radius).  Membership and support queries are exact for the
    finite representations.
    """

    kind: str
    data: tuple = field(default_factory=tuple)

    # -- constructors -------------------------------------------------------

    @staticmethod
    def point(z: complex) -> "ConvexSet2D":
        return ConvexSet2D("point", (complex(z),))

    @staticmethod
    def segment(a: complex, b: complex) -> "ConvexSet2D":
        return ConvexSet2D("segment", (complex(a), complex(b)))

    @staticmethod
    def polygon(vertices) -> "ConvexSet2D":
        return ConvexSet2D("polygon", tuple(complex(v) for v in vertices))

    @staticmethod
    def halfplane(normal: complex, offset: float) -> "ConvexSet2D":
        if normal == 0:
            raise ValueError("halfplane needs a nonzero normal")
        return ConvexSet2D("halfplane", (complex(normal), float(offset)))

    @staticmethod
    def line(direction: complex) -> "ConvexSet2D":
        if direction == 0:
            raise ValueError("line needs a nonzero direction")
        return ConvexSet2D("line", (complex(direction),))

    @staticmethod
    def plane() -> "ConvexSet2D":
        return ConvexSet2D("plane")

    @staticmethod
    def disk(radius: float, center: complex = 0j) -> "ConvexSet2D":
        if radius < 0:
            raise ValueError("disk radius must be nonnegative")
        return ConvexSet2D("disk", (complex(center), float(radius)))

    # -- queries -------------------------------------------------------------

    @property
    def is_singleton(self) -> bool:
        return self.kind == "point" or (
            self.kind == "segment" and self.data[0] == self.data[1]
        )

    def the_point(self) -> complex:
        if not self.is_singleton:
            raise ValueError("set is not a singleton")
        return self.data[0]

    def distance(self, z: complex) -> float:
        z = complex(z)
        if self.kind == "point":
            return abs(z - self.data[0])
        if self.kind == "segment":
            return _segment_distance(z, self.data[0], self.data[1])
        if self.kind == "polygon":
            vs = self.data
            if _polygon_contains(z, vs):
                return 0.0
            return min(
                _segment_distance(z, vs[i], vs[(i + 1) % len(vs)]) for i in range(len(vs))
            )
        if self.kind == "halfplane":
            normal, offset = self.data
            return max(0.0, (re_cip(normal, z) - offset) / abs(normal))
        if self.kind == "line":
            d = self.data[0]
            return abs(re_cip(1j * d, z)) / abs(d)
        if self.kind == "plane":
            return 0.0
        if self.kind == "disk":
            center, radius = self.data
            return max(0.0, abs(z - center) - radius)
        raise ValueError(f"unknown set kind {self.kind!r}")

    def contains(self, z: complex, tol: float = 1e-10) -> bool:
        return self.distance(z) <= tol

    def support(self, direction: complex) -> float:
        """sup over the set of Re(conj(direction) * z)."""
        d = complex(direction)
        if self.kind == "point":
            return re_cip(d, self.data[0])
        if self.kind == "segment":
            return max(re_cip(d, self.data[0]), re_cip(d, self.data[1]))
        if self.kind == "polygon":
            return max(re_cip(d, v) for v in self.data)
        if self.kind == "disk":
            center, radius = self.data
            return re_cip(d, center) + radius * abs(d)
        if self.kind == "halfplane":
            normal, offset = self.data
            t = cip(normal, d)  # d = (t / |n|^2)* n decomposition
            if abs(t.imag) > 0 or t.real > 0:
                return math.inf
            return (t.real / abs(normal) ** 2) * offset if offset != 0 else 0.0
        if self.kind == "line":
            return 0.0 if re_cip(self.data[0], d) == 0 else math.inf
        if self.kind == "plane":
            return 0.0 if d == 0 else math.inf
        raise ValueError(f"unknown set kind {self.kind!r}")

    def scaled(self, t: float) -> "ConvexSet2D":
        """Image of the set under multiplication by the real scalar t >= 0."""
        if t < 0:
            raise ValueError("scaling factor must be nonnegative")
        if t == 0:
            return ConvexSet2D.point(0j)
        if self.kind == "point":
            return ConvexSet2D.point(t * self.data[0])
        if self.kind == "segment":
            return ConvexSet2D.segment(t * self.data[0], t * self.data[1])
        if self.kind == "polygon":
            return ConvexSet2D.polygon(tuple(t * v for v in self.data))
        if self.kind == "halfplane":
            normal, offset = self.data
            return ConvexSet2D.halfplane(normal, t * offset)
        if self.kind in ("line", "plane"):
            return self
        if self.kind == "disk":
            center, radius = self.data
            return ConvexSet2D.disk(t * radius, t * center)
        raise ValueError(f"unknown set kind {self.kind!r}")

    def rspan_is_plane(self) -> bool:
        """Whether the real linear span {t*z : t real, z in set} is all of C.

        The span is a union of lines through the origin in the directions of
        the set, so it covers the plane exactly when those directions fill a
        closed half circle: bounded sets must contain 0 other than as an
        extreme point, unbounded halfplanes always qualify.
        """
        if self.kind in ("point", "segment", "line"):
            return False
        if self.kind == "polygon":
            vs = self.data
            return _polygon_contains(0j, vs) and all(v != 0 for v in vs)
        if self.kind == "plane":
            return True
        if self.kind == "disk":
            center, radius = self.data
            return radius > 0 and abs(center) <= radius
        if self.kind == "halfplane":
            return True
        raise ValueError(f"unknown set kind {self.kind!r}")


def _segment_distance(z: complex, a: complex, b: complex) -> float:
    if a == b:
        return abs(z - a)
    t = re_cip(b - a, z - a) / abs(b - a) ** 2
    t = min(1.0, max(0.0, t))
    return abs(z - (a + t * (b - a)))


def _polygon_contains(z: complex, vertices) -> bool:
    """Point-in-convex-polygon via signed areas (vertices in a loop)."""
    n = len(vertices)
    if n == 1:
        return z == vertices[0]
    if n == 2:
        return _segment_distance(z, vertices[0], vertices[1]) <= 1e-14
    signs = []
    for i in range(n):
        a, b = vertices[i], vertices[(i + 1) % n]
        cross = np.imag(np.conj(b - a) * (z - a))
        signs.append(cross)
    return all(s >= -1e-14 for s in signs) or all(s <= 1e-14 for s in signs)


@dataclass(frozen=True)
class SetDescriptor:
    """Infinite set given by a membership predicate, a parametric sampler,
    and a horizon (recession direction) predicate."""

    contains: Callable
    sample: Callable
    horizon_contains: Callable


@dataclass(frozen=True)
class Generator:
    """Convex generating function with pointwise derivative/subgradient access.

    ``grad_fn``/``hess_fn`` return None where the object does not exist;
    ``tag_fn`` classifies each point into one of the smoothness regimes.
    """

    name: str
    value: Callable
    grad_fn: Callable
    hess_fn: Callable
    subdiff_fn: Callable
    tag_fn: Callable

    def grad(self, z: complex) -> Optional[complex]:
        return self.grad_fn(complex(z))

    def hess(self, z: complex) -> Optional[np.ndarray]:
        return self.hess_fn(complex(z))

    def subdiff(self, z: complex) -> ConvexSet2D:
        return self.subdiff_fn(complex(z))

    def tag(self, z: complex) -> str:
        return self.tag_fn(complex(z))

    def dirderiv(self, z: complex, d: complex) -> float:
        """One-sided directional derivative f'(z; d)."""
        g = self.grad(z)
        if g is not None:
            return re_cip(g, d)
        return self.subdiff(z).support(d)

    def second(self, z: complex, d: complex) -> float:
        """Quadratic form f''(z; d, d) of the real Hessian."""
        H = self.hess(z)
        if H is None:
            raise UnsupportedGenerator(f"{self.name} is not twice differentiable at {z}")
        v = _as_vec(d)
        return float(v @ H @ v)

    def eta(self, z: complex) -> float:
        """Curvature f''(z; i*grad, i*grad) orthogonal to the gradient."""
        g = self.grad(z)
        if g is None:
            raise UnsupportedGenerator(f"{self.name} is not differentiable at {z}")
        return self.second(z, 1j * g)

    def __repr__(self) -> str:
        return f"Generator({self.name!r})"


def midpoint_convexity_check(f, points=None, seed: int = 0, n_pairs: int = 200,
                             tol: float = 1e-9) -> bool:
    """Sampled sanity check of midpoint convexity: f((a+b)/2) <= (f(a)+f(b))/2.

    This is the only convexity verification offered for user generators: a
    grid test, not a proof.  Pairs with non-finite values are skipped.
    """
    value = f.value if hasattr(f, "value") else f
    if points is None:
        rng = np.random.default_rng(seed)
        points = [complex(a, b) for a, b in rng.uniform(-5, 5, size=(2 * n_pairs, 2))]
    pts = list(points)
    for a, b in zip(pts[0::2], pts[1::2]):
        fa, fb = value(a), value(b)
        if not (math.isfinite(fa) and math.isfinite(fb)):
            continue
        if value((a + b) / 2) > (fa + fb) / 2 + tol * (1 + abs(fa) + abs(fb)):
            return False
    return True


def make_generator(name, value, grad=None, hess=None, subdiff=None, tag=None) -> Generator:
    """Assemble a generator from user hooks, with sensible fallbacks.

    Missing subdifferentials fall back to the gradient singleton; a missing
    tag falls back to classifying from the available pieces.
    """
    grad = grad or (lambda z: None)

    def default_subdiff(z):
        g = grad(z)
        if g is None:
            raise UnsupportedGenerator(f"{name}: no subdifferential available at {z}")
        return ConvexSet2D.point(g)

    hess = hess or (lambda z: None)
    subdiff = subdiff or default_subdiff

    def default_tag(z):
        H = hess(z)
        if H is not None and grad(z) is not None:
            evals = np.linalg.eigvalsh(np.asarray(H, dtype=float))
            if evals.min() > 0:
                return TAG_C2PD
            return TAG_OTHER
        if grad(z) is None and subdiff(z).rspan_is_plane():
            return TAG_FULLSPAN
        return TAG_OTHER

    return Generator(name, value, grad, hess, subdiff, tag or default_tag)


# -- builtins ----------------------------------------------------------------


def _abscissa() -> Generator:
    zero_form = np.zeros((2, 2))
    return Generator(
        "abscissa",
        value=lambda z: z.real,
        grad_fn=lambda z: 1.0 + 0j,
        hess_fn=lambda z: zero_form,
        subdiff_fn=lambda z: ConvexSet2D.point(1.0 + 0j),
        tag_fn=lambda z: TAG_QUADRATIC,
    )


def _radius2() -> Generator:
    identity_form = np.eye(2)
    return Generator(
        "radius2",
        value=lambda z: 0.5 * abs(z) ** 2,
        grad_fn=lambda z: z,
        hess_fn=lambda z: identity_form,
        subdiff_fn=lambda z: ConvexSet2D.point(z),
        tag_fn=lambda z: TAG_QUADRATIC,
    )


def _radius() -> Generator:
    def grad(z):
        return z / abs(z) if z != 0 else None

    def hess(z):
        if z == 0:
            return None
        # real Hessian of |z|: (I - u u^T) / |z| with u the unit radial vector
        u = _as_vec(z / abs(z))
        return (np.eye(2) - np.outer(u, u)) / abs(z)

    def subdiff(z):
        if z == 0:
            return ConvexSet2D.disk(1.0)
        return ConvexSet2D.point(z / abs(z))

    def tag(z):
        # The origin is the bespoke corner of the modulus: the raw span test
        # on the unit disk is full-plane, but the downstream calculus treats
        # it separately, so it is deliberately left unclassified here.
        return TAG_OTHER

    return Generator("radius", value=abs, grad_fn=grad, hess_fn=hess,
                     subdiff_fn=subdiff, tag_fn=tag)


def _ell1() -> Generator:
    zero_form = np.zeros((2, 2))

    def sgn(x):
        return math.copysign(1.0, x) if x != 0 else 0.0

    def grad(z):
        if z.real == 0 or z.imag == 0:
            return None
        return complex(sgn(z.real), sgn(z.imag))

    def hess(z):
        return zero_form if (z.real != 0 and z.imag != 0) else None

    def subdiff(z):
        if z.real != 0 and z.imag != 0:
            return ConvexSet2D.point(complex(sgn(z.real), sgn(z.imag)))
        if z.real == 0 and z.imag == 0:
            return ConvexSet2D.polygon([1 + 1j, -1 + 1j, -1 - 1j, 1 - 1j])
        if z.real == 0:
            s = sgn(z.imag)
            return ConvexSet2D.segment(complex(-1, s), complex(1, s))
        s = sgn(z.real)
        return ConvexSet2D.segment(complex(s, -1), complex(s, 1))

    def tag(z):
        if z == 0:
            return TAG_FULLSPAN
        return TAG_OTHER

    return Generator(
        "ell1",
        value=lambda z: abs(z.real) + abs(z.imag),
        grad_fn=grad,
        hess_fn=hess,
        subdiff_fn=subdiff,
        tag_fn=tag,
    )


_BUILTINS = {
    "abscissa": _abscissa,
    "radius": _radius,
    "radius2": _radius2,
    "ell1": _ell1,
}


def builtin(name: str) -> Generator:
    """One of the stock generators: abscissa, radius, radius2, ell1."""
    try:
        return _BUILTINS[name]()
    except KeyError:
        raise ValueError(
            f"unknown generator {name!r}; choose from {sorted(_BUILTINS)}"
        ) from None


# -- condition classification and derived sets --------------------------------


def condition_check(f: Generator, lam: complex) -> str:
    """Classify f at lam into the smooth regime, the corner regime, or neither.

    The two regimes are mutually exclusive: the corner regime needs a
    full-span subdifferential, which cannot happen at points of
    differentiability.
    """
    tag = f.tag(lam)
    if tag in (TAG_QUADRATIC, TAG_C2PD):
        return COND14
    if tag == TAG_FULLSPAN:
        return COND15
    return NEITHER


def q_set(f: Generator, lam: complex) -> ConvexSet2D:
    """The cone -cone(S^2) + i * rspan(S^2) built from S = subdiff(f)(lam).

    For a singleton {g} this is the exact halfplane
    {theta : Re(conj(g^2) theta) <= 0}; fat subdifferentials whose squared
    generators cover all directions give the whole plane.  Other shapes are
    rejected: there is no finite recipe for them here.
    """
    S = f.subdiff(lam)
    if S.is_singleton:
        g = S.the_point()
        if g == 0:
            raise ValueError("q_set needs a subdifferential different from {0}")
        return ConvexSet2D.halfplane(g * g, 0.0)
    if S.kind == "polygon" and _polygon_contains(0j, S.data):
        return ConvexSet2D.plane()
    if S.kind == "disk":
        center, radius = S.data
        if abs(center) < radius:
            return ConvexSet2D.plane()
    raise UnsupportedGenerator(
        f"no exact squared-generator representation for subdifferential {S.kind!r}"
    )


def d_set(f: Generator, n_j: int, lam: complex) -> ConvexSet2D:
    """Halfplane {theta : Re(conj((grad f)^2) theta) <= eta / n_j} where eta
    is the curvature of f orthogonal to its gradient at lam."""
    if condition_check(f, lam) != COND14:
        raise UnsupportedGenerator(
            f"{f.name} is not in the smooth regime at {lam}"
        )
    g = f.grad(lam)
    if g is None or g == 0:
        raise ValueError("d_set needs a nonzero gradient")
    return ConvexSet2D.halfplane(g * g, f.eta(lam) / n_j)


def gamma_set(f: Generator, n_j: int, lam: complex, active: bool,
              tol: float = 1e-10, seed: int = 0) -> SetDescriptor:
    """Per-root building block of the subgradient coordinate set, in C^n_j.

    Inactive roots contribute only the zero block.  Active roots contribute
    (-subdiff(f)/n_j) x H x C^(n_j - 2) where H is the curvature halfplane in
    the smooth regime and the squared-generator cone in the corner regime.
    The horizon variant is {0} x Q x C^(n_j - 2).
    """
    if n_j < 1:
        raise ValueError("multiplicity must be positive")

    if not active:
        def contains(vec, tol=tol):
            vec = np.asarray(vec, dtype=complex).ravel()
            _expect_len(vec, n_j)
            return bool(np.all(np.abs(vec) <= tol))

        def sample(params=None, seed=seed):
            return np.zeros(n_j, dtype=complex)

        def horizon_contains(vec, tol=tol):
            return contains(vec, tol)

        return SetDescriptor(contains, sample, horizon_contains)

    cond = condition_check(f, lam)
    if cond == COND14:
        second_set = d_set(f, n_j, lam) if n_j >= 2 else None
    elif cond == COND15:
        second_set = q_set(f, lam) if n_j >= 2 else None
    else:
        raise UnsupportedGenerator(
            f"{f.name} at {lam} is in neither supported regime"
        )
    S = f.subdiff(lam)
    Q = q_set(f, lam)

    def contains(vec, tol=tol):
        vec = np.asarray(vec, dtype=complex).ravel()
        _expect_len(vec, n_j)
        first = S.scaled(1.0 / n_j)
        if first.distance(-vec[0]) > tol:
            return False
        if n_j >= 2 and second_set.distance(vec[1]) > tol:
            return False
        return True

    def sample(params=None, seed=seed):
        rng = np.random.default_rng(seed)
        g = _sample_set(S, rng)
        out = np.zeros(n_j, dtype=complex)
        out[0] = -g / n_j
        if n_j >= 2:
            out[1] = _sample_set(second_set, rng, interior=True)
        if n_j >= 3:
            out[2:] = rng.standard_normal(n_j - 2) + 1j * rng.standard_normal(n_j - 2)
        return out

    def horizon_contains(vec, tol=tol):
        vec = np.asarray(vec, dtype=complex).ravel()
        _expect_len(vec, n_j)
        if abs(vec[0]) > tol:
            return False
        if n_j >= 2 and Q.distance(vec[1]) > tol:
            return False
        return True

    return SetDescriptor(contains, sample, horizon_contains)


def _expect_len(vec, n):
    if vec.size != n:
        raise ValueError(f"expected a block of length {n}, got {vec.size}")


def _sample_set(S: ConvexSet2D, rng, interior: bool = False) -> complex:
    if S.kind == "point":
        return S.data[0]
    if S.kind == "segment":
        t = rng.uniform()
        return S.data[0] + t * (S.data[1] - S.data[0])
    if S.kind == "polygon":
        ws = rng.uniform(size=len(S.data))
        ws /= ws.sum()
        return complex(np.dot(ws, np.asarray(S.data)))
    if S.kind == "halfplane":
        normal, offset = S.data
        slack = abs(rng.standard_normal()) + (0.1 if interior else 0.0)
        tangent = 1j * normal / abs(normal)
        base = (offset - slack) * normal / abs(normal) ** 2
        return base + rng.standard_normal() * tangent
    if S.kind == "disk":
        center, radius = S.data
        r = radius * math.sqrt(rng.uniform())
        ang = rng.uniform(0, 2 * math.pi)
        return center + r * cmath.exp(1j * ang)
    if S.kind == "plane":
        return complex(rng.standard_normal(), rng.standard_normal())
    if S.kind == "line":
        return rng.standard_normal() * S.data[0]
    raise ValueError(f"cannot sample from set kind {S.kind!r}")
