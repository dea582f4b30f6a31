"""Subdifferential and subderivative calculus for root max functions.

The subgradient set of a root max function at a monic polynomial is
described in the Taylor coordinates of the local factorization: the leading
coordinate vanishes, inactive root blocks vanish, and each active block is
constrained through a convex-weight family (weights gamma_j >= 0 summing to
one across the active roots) scaling the first two coordinates of the
per-root building blocks; deeper coordinates are free.  Membership is
decided by a small feasibility search over the weight simplex, which
collapses to a direct solve when every active subdifferential is a
singleton.

All functions are pure; every set is handled through membership predicates
and samplers rather than explicit geometry.
"""

from __future__ import annotations

import cmath
import math
from typing import Optional, Sequence

import numpy as np
from scipy import optimize

from .cpoly import Poly, RootCluster, active_set
from .factorspace import F_deriv0_inv, T_apply, T_inverse
from .generators import (
    COND14,
    COND15,
    ConvexSet2D,
    Generator,
    SetDescriptor,
    UnsupportedGenerator,
    _sample_set,
    condition_check,
    q_set,
    re_cip,
)

__all__ = [
    "Dp_membership",
    "Dp_horizon_membership",
    "Dp_set",
    "Dp_sample",
    "rsd_f_membership",
    "rsd_f_horizon_membership",
    "subderivative_f",
    "subderivative_radius",
    "SIMPLEX_TOL",
]

SIMPLEX_TOL = 1e-8


class _ActiveBlock:
    """Per-active-root data needed by the membership tests."""

    def __init__(self, f: Generator, lam: complex, n_j: int):
        self.lam = lam
        self.n_j = n_j
        self.cond = condition_check(f, lam)
        if self.cond not in (COND14, COND15):
            raise UnsupportedGenerator(
                f"{f.name} at {lam} satisfies neither supported regime"
            )
        self.subdiff = f.subdiff(lam)
        if self.subdiff.is_singleton and self.subdiff.the_point() == 0:
            raise ValueError(f"subdifferential at {lam} is {{0}}; test not applicable")
        if self.cond == COND14:
            g = f.grad(lam)
            self.w = g * g
            self.offset_rate = f.eta(lam) / n_j  # halfplane offset per unit weight
            self.q = ConvexSet2D.halfplane(self.w, 0.0)
        else:
            self.w = None
            self.offset_rate = None
            self.q = q_set(f, lam)
        self.determined = self.subdiff.is_singleton

    def gamma_from_first(self, c1: complex) -> float:
        """Weight forced by the first coordinate when the subdifferential is
        a singleton {g}: c1 = -gamma * g / n_j."""
        g = self.subdiff.the_point()
        xi = -self.n_j * c1 / g
        return max(xi.real, 0.0)

    def residual(self, block: np.ndarray, gamma: float) -> float:
        r = self.subdiff.scaled(gamma / self.n_j).distance(-block[0])
        if self.n_j >= 2:
            if self.cond == COND14:
                r = max(r, max(0.0, re_cip(self.w, block[1]) - gamma * self.offset_rate))
            else:
                # the squared-generator set is a cone: scaling leaves it fixed
                r = max(r, self.q.distance(block[1]))
        return r

    def horizon_residual(self, block: np.ndarray) -> float:
        r = abs(block[0])
        if self.n_j >= 2:
            r = max(r, self.q.distance(block[1]))
        return r


def _split_blocks(cluster: RootCluster, c: np.ndarray) -> list:
    blocks = []
    pos = 1
    for n_j in cluster.mults:
        blocks.append(c[pos: pos + n_j])
        pos += n_j
    return blocks


def _prepare(cluster: RootCluster, f: Generator, c, active_tol: float):
    c = np.asarray(c, dtype=complex).ravel()
    if c.size != cluster.degree() + 1:
        raise ValueError(
            f"coordinate vector must have length {cluster.degree() + 1}, got {c.size}"
        )
    _, active = active_set(cluster, f, active_tol=active_tol)
    return c, sorted(active)


def Dp_membership(cluster: RootCluster, f: Generator, c, tol: float = 1e-8,
                  active_tol: float = 1e-8) -> bool:
    """Membership of a coordinate vector in the subgradient coordinate set.

    True iff the leading coordinate vanishes, inactive blocks vanish, and
    weights gamma_j >= 0 with sum 1 exist putting each active block inside
    its gamma-scaled building block.  With singleton subdifferentials the
    weights are forced by the first coordinates; otherwise a coarse simplex
    grid plus a Nelder-Mead refinement decides feasibility.
    """
    c, active = _prepare(cluster, f, c, active_tol)
    if not active:
        raise ValueError("no active root")
    if abs(c[0]) > tol:
        return False
    blocks = _split_blocks(cluster, c)
    scale = 1.0 + float(np.linalg.norm(c))

    for j, block in enumerate(blocks):
        if j not in active and np.linalg.norm(block) > tol * scale:
            return False

    data = [_ActiveBlock(f, cluster.roots[j], cluster.mults[j]) for j in active]
    act_blocks = [blocks[j] for j in active]

    def total_residual(gammas: Sequence[float]) -> float:
        r = abs(sum(gammas) - 1.0) * (tol / SIMPLEX_TOL)  # rescale to the shared tol
        for d, b, g in zip(data, act_blocks, gammas):
            r = max(r, d.residual(b, g))
        return r

    det_idx = [i for i, d in enumerate(data) if d.determined]
    free_idx = [i for i, d in enumerate(data) if not d.determined]
    gammas = np.zeros(len(data))
    for i in det_idx:
        gammas[i] = data[i].gamma_from_first(act_blocks[i][0])
    if not free_idx:
        return bool(total_residual(gammas) <= tol)
    mass = 1.0 - gammas[det_idx].sum() if det_idx else 1.0
    if mass < -SIMPLEX_TOL:
        return False
    mass = max(mass, 0.0)
    if len(free_idx) == 1:
        gammas[free_idx[0]] = mass
        return bool(total_residual(gammas) <= tol)

    # coarse grid on the free sub-simplex, then local refinement
    steps = 32 if len(free_idx) <= 2 else (16 if len(free_idx) == 3 else 8)
    best = (math.inf, None)
    for point in _simplex_grid(len(free_idx), steps):
        gammas[free_idx] = mass * np.asarray(point)
        r = total_residual(gammas)
        if r < best[0]:
            best = (r, gammas.copy())
    if best[0] <= tol:
        return True

    def objective(x):
        weights = np.exp(x - x.max())
        weights /= weights.sum()
        gam = best[1].copy()
        gam[free_idx] = mass * weights
        return total_residual(gam)

    x0 = np.log(np.maximum(best[1][free_idx] / max(mass, 1e-12), 1e-6))
    res = optimize.minimize(objective, x0, method="Nelder-Mead",
                            options={"xatol": 1e-12, "fatol": 1e-14, "maxiter": 2000})
    return bool(float(res.fun) <= tol)


def _simplex_grid(dim: int, steps: int):
    """Lattice points of the standard simplex with the given resolution."""
    if dim == 1:
        yield (1.0,)
        return

    def rec(remaining, parts):
        if len(parts) == dim - 1:
            yield parts + [remaining]
            return
        for k in range(remaining + 1):
            yield from rec(remaining - k, parts + [k])

    for combo in rec(steps, []):
        yield tuple(k / steps for k in combo)


def Dp_horizon_membership(cluster: RootCluster, f: Generator, c, tol: float = 1e-8,
                          active_tol: float = 1e-8) -> bool:
    """Membership in the horizon cone: zero leading coordinate and inactive
    blocks, zero first coordinate per active block, second coordinate in the
    squared-generator cone, deeper coordinates free."""
    c, active = _prepare(cluster, f, c, active_tol)
    if abs(c[0]) > tol:
        return False
    blocks = _split_blocks(cluster, c)
    scale = 1.0 + float(np.linalg.norm(c))
    for j, block in enumerate(blocks):
        if j not in active and np.linalg.norm(block) > tol * scale:
            return False
    for j in active:
        d = _ActiveBlock(f, cluster.roots[j], cluster.mults[j])
        if d.horizon_residual(blocks[j]) > tol:
            return False
    return True


def Dp_sample(cluster: RootCluster, f: Generator, gamma=None, seed: int = 0,
              active_tol: float = 1e-8) -> np.ndarray:
    """A point of the subgradient coordinate set (always a member)."""
    rng = np.random.default_rng(seed)
    _, active = active_set(cluster, f, active_tol=active_tol)
    active = sorted(active)
    if gamma is None:
        gamma = rng.dirichlet(np.ones(len(active)))
    gamma = np.asarray(gamma, dtype=float)
    if gamma.size != len(active) or gamma.min() < 0 or abs(gamma.sum() - 1) > SIMPLEX_TOL:
        raise ValueError("weights must be a point of the active simplex")
    c = np.zeros(cluster.degree() + 1, dtype=complex)
    pos = 1
    for j, n_j in enumerate(cluster.mults):
        if j in active:
            g = gamma[active.index(j)]
            d = _ActiveBlock(f, cluster.roots[j], n_j)
            S = d.subdiff.scaled(g / n_j)
            c[pos] = -_sample_set(S, rng)
            if n_j >= 2:
                if d.cond == COND14:
                    hp = ConvexSet2D.halfplane(d.w, g * d.offset_rate)
                else:
                    hp = d.q
                c[pos + 1] = _sample_set(hp, rng, interior=True)
            if n_j >= 3:
                c[pos + 2: pos + n_j] = rng.standard_normal(n_j - 2) + 1j * rng.standard_normal(n_j - 2)
        pos += n_j
    return c


def Dp_set(cluster: RootCluster, f: Generator, tol: float = 1e-8) -> SetDescriptor:
    """Bundle of the membership predicate, sampler, and horizon predicate."""
    return SetDescriptor(
        contains=lambda c, tol=tol: Dp_membership(cluster, f, c, tol),
        sample=lambda gamma=None, seed=0: Dp_sample(cluster, f, gamma, seed),
        horizon_contains=lambda c, tol=tol: Dp_horizon_membership(cluster, f, c, tol),
    )


def _coords_of(cluster: RootCluster, v: Poly) -> np.ndarray:
    w = F_deriv0_inv(cluster, v)
    return T_apply(cluster, w)


def rsd_f_membership(cluster: RootCluster, f: Generator, v: Poly,
                     tol: float = 1e-8) -> bool:
    """Regular subgradient test for the root max function: pull v back
    through the factorization derivative and test the coordinate set."""
    return Dp_membership(cluster, f, _coords_of(cluster, v), tol)


def rsd_f_horizon_membership(cluster: RootCluster, f: Generator, v: Poly,
                             tol: float = 1e-8) -> bool:
    """Horizon subgradient test for the root max function."""
    return Dp_horizon_membership(cluster, f, _coords_of(cluster, v), tol)


def _omega_blocks(cluster: RootCluster, v: Poly):
    """Decompose v = F'(0)(omega0, w_1, ..., w_m) and return omega0 together
    with per-root coordinate arrays (omega_j1, ..., omega_jn_j)."""
    coords = _coords_of(cluster, v)
    return coords[0], _split_blocks(cluster, coords)


def subderivative_f(cluster: RootCluster, f: Generator, v: Poly,
                    tol: float = 1e-8, active_tol: float = 1e-8) -> float:
    """Lower directional derivative of the root max function at the cluster
    polynomial in direction v.

    Finite exactly when, at every active root, sqrt(-omega_j2) is
    real-orthogonal to the whole subdifferential and the deeper coordinates
    vanish; the value is then the max over active roots of
    (f'(lam_j; -omega_j1) + curvature term) / n_j, the curvature term being
    f''(lam_j; sqrt(-omega_j2), sqrt(-omega_j2)) in the smooth regime and
    zero in the corner regime.  The division by the multiplicity applies to
    the whole bracket: a multiplicity-n root responds to a coefficient
    perturbation with the mean of its n split roots, and this normalization
    is the one under which the subgradient support inequality is tight.
    """
    _, active = active_set(cluster, f, active_tol=active_tol)
    if not active:
        raise ValueError("no active root")
    omega0, blocks = _omega_blocks(cluster, v)
    vals = []
    for j in sorted(active):
        lam, n_j = cluster.roots[j], cluster.mults[j]
        cond = condition_check(f, lam)
        if cond not in (COND14, COND15):
            raise UnsupportedGenerator(
                f"{f.name} at {lam} satisfies neither supported regime"
            )
        block = blocks[j]
        kappa = 0.0
        if n_j >= 2:
            z = cmath.sqrt(-block[1])
            for g in _generating_points(f.subdiff(lam)):
                if abs(re_cip(g, z)) > tol * (1.0 + abs(g) * abs(z)):
                    return math.inf
            if cond == COND14:
                kappa = f.second(lam, z)
        if any(abs(block[s]) > tol * (1.0 + float(np.linalg.norm(block)))
               for s in range(2, n_j)):
            return math.inf
        vals.append((f.dirderiv(lam, -block[0]) + kappa) / n_j)
    return max(vals)


def _generating_points(S: ConvexSet2D):
    if S.kind == "point":
        return [S.data[0]]
    if S.kind == "segment":
        return list(S.data)
    if S.kind == "polygon":
        return list(S.data)
    raise UnsupportedGenerator(
        f"orthogonality test has no finite generator list for {S.kind!r}"
    )


def subderivative_radius(cluster: RootCluster, v: Poly, tol: float = 1e-8,
                         active_tol: float = 1e-8) -> float:
    """Lower directional derivative of the root radius (max root modulus) at
    a monic polynomial with positive radius.

    Finite exactly when, at every active root, omega_j2 lies in the closed
    cone spanned by lam_j^2 and the deeper coordinates vanish; the value is
    then max over active roots of
    (|omega_j2| - Re(conj(lam_j) omega_j1)) / (|lam_j| n_j).
    The leading coordinate direction rescales the polynomial and never moves
    its roots, so it does not enter.
    """
    radius = max(abs(r) for r in cluster.roots) if cluster.roots else 0.0
    if radius <= 0:
        raise ValueError(
            "zero root radius: use the quadratic-modulus generator or the "
            "matrix path at the origin"
        )
    active = [j for j, r in enumerate(cluster.roots) if abs(r) >= radius - active_tol]
    _, blocks = _omega_blocks(cluster, v)
    vals = []
    for j in active:
        lam, n_j = cluster.roots[j], cluster.mults[j]
        block = blocks[j]
        om2_abs = 0.0
        if n_j >= 2:
            t = block[1] / (lam * lam)
            if abs(t.imag) > tol * (1.0 + abs(t)) or t.real < -tol:
                return math.inf
            om2_abs = abs(block[1])
        if any(abs(block[s]) > tol * (1.0 + float(np.linalg.norm(block)))
               for s in range(2, n_j)):
            return math.inf
        vals.append((om2_abs - re_cip(lam, block[0])) / (abs(lam) * n_j))
    return max(vals)
