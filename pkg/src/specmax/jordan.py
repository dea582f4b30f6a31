"""Jordan-structured matrices and the matrix-side derivative formulas.

The Jordan structure of a base matrix is *declared*, never inferred: given
distinct eigenvalues with block sizes, a similarity P, and an optional
untyped block B for the remaining spectrum, the base matrix is

    X = P^{-1} Diag(B, J_1, ..., J_m) P,

with J_j the Jordan segment of eigenvalue j.  Numerical Jordan form
recovery is ill-posed; a convenience constructor accepts a raw matrix only
on the diagonalizable path with well separated eigenvalues.

Specs and matrices are immutable after construction (derived factorizations
are cached up front), so concurrent reads are safe.

JSON formats: a matrix is a row-major list of rows of [re, im] pairs; a
spec is {"eigs": [{"lambda": [re, im], "blocks": [...]}, ...], "P": matrix,
"B": matrix} with "P" and "B" optional.
"""

from __future__ import annotations

import math
from typing import Sequence

import numpy as np

from .cpoly import Poly, RootCluster, elementary, lex_key

__all__ = [
    "JordanSpec",
    "DerogatoryEigenvalue",
    "DomainError",
    "nilpotent",
    "synth",
    "char_poly",
    "char_poly_deriv_action",
    "gj_deriv",
    "gj_deriv_adjoint",
    "det_expansion_residual",
    "lambda_grad",
    "active_factor",
    "R_apply",
    "R_matrix",
    "matrix_to_json",
    "matrix_from_json",
    "spec_to_json",
    "spec_from_json",
]


class DerogatoryEigenvalue(ValueError):
    """An operation needing a single Jordan block met a derogatory eigenvalue."""


class DomainError(ValueError):
    """An eigenvalue fell outside the domain of the generating function."""


def nilpotent(size: int) -> np.ndarray:
    """Ones on the superdiagonal, zeros elsewhere."""
    N = np.zeros((size, size), dtype=complex)
    for i in range(size - 1):
        N[i, i + 1] = 1.0
    return N


class JordanSpec:
    """Declared Jordan data: eigenvalues with block sizes, similarity, rest-block.

    ``eigs`` is a sequence of (eigenvalue, block_sizes); declaration order
    fixes the block layout (B first, then each eigenvalue's blocks in order).
    """

    MIN_SEPARATION = 1e-8
    MAX_CONDITION = 1e8

    def __init__(self, eigs, P=None, B=None):
        parsed = []
        for lam, blocks in eigs:
            blocks = tuple(int(b) for b in blocks)
            if not blocks or any(b < 1 for b in blocks):
                raise ValueError("block sizes must be positive integers")
            parsed.append((complex(lam), blocks))
        if not parsed and (B is None or np.asarray(B).size == 0):
            raise ValueError("a spec needs at least one eigenvalue or a rest block")
        self.eigs = tuple(parsed)

        B = np.zeros((0, 0), dtype=complex) if B is None else np.asarray(B, dtype=complex)
        if B.ndim != 2 or B.shape[0] != B.shape[1]:
            raise ValueError("rest block must be square")
        self.B = B
        self.n0 = B.shape[0]
        self.n = self.n0 + sum(sum(blocks) for _, blocks in self.eigs)

        P = np.eye(self.n, dtype=complex) if P is None else np.asarray(P, dtype=complex)
        if P.shape != (self.n, self.n):
            raise ValueError(f"similarity must be {self.n}x{self.n}, got {P.shape}")
        cond = np.linalg.cond(P)
        if not np.isfinite(cond) or cond > self.MAX_CONDITION:
            raise ValueError(f"similarity condition number {cond:.2e} exceeds bound")
        self.P = P
        Pinv = np.linalg.inv(P)
        Pinv = Pinv + Pinv @ (np.eye(self.n) - P @ Pinv)  # one refinement sweep
        self.Pinv = Pinv
        self.Pstar = P.conj().T
        self.Pinvstar = Pinv.conj().T

        lams = [lam for lam, _ in self.eigs]
        self._b_eigs = np.linalg.eigvals(B) if self.n0 else np.zeros(0, dtype=complex)
        others = list(self._b_eigs)
        for i, lam in enumerate(lams):
            for mu in lams[i + 1:] + others:
                if abs(lam - mu) <= self.MIN_SEPARATION:
                    raise ValueError(
                        f"declared eigenvalues must be distinct (and distinct from the "
                        f"rest block): {lam} vs {mu}"
                    )

        # layout: [0, n0) is B, then each eigenvalue's sub-blocks in order
        self._eig_slices = []
        self._subblock_slices = []
        pos = self.n0
        for _, blocks in self.eigs:
            subs = []
            start = pos
            for b in blocks:
                subs.append(slice(pos, pos + b))
                pos += b
            self._eig_slices.append(slice(start, pos))
            self._subblock_slices.append(tuple(subs))

    # -- structure queries ----------------------------------------------------

    @property
    def num_eigs(self) -> int:
        return len(self.eigs)

    def eig_value(self, j: int) -> complex:
        return self.eigs[j][0]

    def block_sizes(self, j: int) -> tuple:
        return self.eigs[j][1]

    def n_j(self, j: int) -> int:
        return sum(self.eigs[j][1])

    def q_j(self, j: int) -> int:
        return len(self.eigs[j][1])

    def m_j(self, j: int) -> int:
        return max(self.eigs[j][1])

    def nonderogatory(self, j: int) -> bool:
        return self.q_j(j) == 1

    def eig_slice(self, j: int) -> slice:
        return self._eig_slices[j]

    def subblock_slices(self, j: int) -> tuple:
        return self._subblock_slices[j]

    @property
    def declared_degree(self) -> int:
        return self.n - self.n0

    @property
    def b_eigenvalues(self) -> np.ndarray:
        return self._b_eigs

    # -- matrices ---------------------------------------------------------------

    def jordan_matrix(self) -> np.ndarray:
        J = np.zeros((self.n, self.n), dtype=complex)
        J[: self.n0, : self.n0] = self.B
        for j, (lam, blocks) in enumerate(self.eigs):
            for k, b in enumerate(blocks):
                sl = self._subblock_slices[j][k]
                J[sl, sl] = lam * np.eye(b) + nilpotent(b)
        return J

    def synth(self) -> np.ndarray:
        """The base matrix P^{-1} Diag(B, J_1, ..., J_m) P."""
        return self.Pinv @ self.jordan_matrix() @ self.P

    def nilpotent_bracket(self, j: int) -> np.ndarray:
        """Diag of the sub-block nilpotents of eigenvalue j (n_j x n_j)."""
        n_j = self.n_j(j)
        N = np.zeros((n_j, n_j), dtype=complex)
        pos = 0
        for b in self.block_sizes(j):
            N[pos: pos + b, pos: pos + b] = nilpotent(b)
            pos += b
        return N

    def embed_block(self, j: int, M: np.ndarray) -> np.ndarray:
        """Place an n_j x n_j matrix into eigenvalue j's slot of an n x n zero."""
        out = np.zeros((self.n, self.n), dtype=complex)
        sl = self._eig_slices[j]
        out[sl, sl] = M
        return out

    def jordan_power_embed(self, j: int, s: int) -> np.ndarray:
        """Embedded N_j^s (the identity for s = 0); needs a single block."""
        if s == 0:
            return self.embed_block(j, np.eye(self.n_j(j), dtype=complex))
        if not self.nonderogatory(j):
            raise DerogatoryEigenvalue(
                f"eigenvalue {self.eig_value(j)} has {self.q_j(j)} Jordan blocks"
            )
        return self.embed_block(j, np.linalg.matrix_power(nilpotent(self.n_j(j)), s))

    def to_W(self, Y: np.ndarray) -> np.ndarray:
        """Transformed subgradient coordinates W = P^{-*} Y P^{*}."""
        return self.Pinvstar @ np.asarray(Y, dtype=complex) @ self.Pstar

    def from_W(self, W: np.ndarray) -> np.ndarray:
        """Inverse of :meth:`to_W`: Y = P^{*} W P^{-*}."""
        return self.Pstar @ np.asarray(W, dtype=complex) @ self.Pinvstar

    # -- construction helpers ------------------------------------------------

    @staticmethod
    def from_matrix(X, min_separation: float = 1e-4) -> "JordanSpec":
        """Diagonalizable path: simple, well separated eigenvalues only."""
        X = np.asarray(X, dtype=complex)
        lams, V = np.linalg.eig(X)
        for i in range(len(lams)):
            for k in range(i + 1, len(lams)):
                if abs(lams[i] - lams[k]) <= min_separation:
                    raise ValueError(
                        "eigenvalues too close for structure-free construction; "
                        "declare the Jordan data explicitly"
                    )
        order = sorted(range(len(lams)), key=lambda i: lex_key(lams[i]))
        V = V[:, order]
        lams = lams[order]
        return JordanSpec([(lam, (1,)) for lam in lams], P=np.linalg.inv(V))

    def __repr__(self) -> str:
        parts = ", ".join(f"{lam}:{list(blocks)}" for lam, blocks in self.eigs)
        return f"JordanSpec(n={self.n}, n0={self.n0}, eigs=[{parts}])"


def synth(spec: JordanSpec) -> np.ndarray:
    return spec.synth()


def char_poly(X) -> Poly:
    """Characteristic polynomial det(lambda I - X) via the trace recursion.

    Exact in rational arithmetic terms for integer inputs at desk scale;
    coefficients are returned lowest power first.
    """
    X = np.asarray(X, dtype=complex)
    if X.ndim != 2 or X.shape[0] != X.shape[1]:
        raise ValueError("characteristic polynomial needs a square matrix")
    n = X.shape[0]
    M = np.zeros_like(X)
    cs = [1.0 + 0j]
    for k in range(1, n + 1):
        M = X @ M + cs[-1] * np.eye(n)
        cs.append(-np.trace(X @ M) / k)
    return Poly(tuple(cs[n - k] for k in range(n + 1)))


def char_poly_deriv_action(spec: JordanSpec, Z) -> Poly:
    """Action of the derivative of the characteristic polynomial map at the
    base matrix on a direction Z, expressed through the declared structure.

    Requires the spec to cover the whole spectrum (empty rest block).  Works
    for derogatory eigenvalues as well.
    """
    if spec.n0 != 0:
        raise ValueError("derivative action needs the full spectrum declared")
    Z = np.asarray(Z, dtype=complex)
    if Z.shape != (spec.n, spec.n):
        raise ValueError(f"direction must be {spec.n}x{spec.n}")
    V = spec.P @ Z @ spec.Pinv
    out = Poly.zero(max(spec.n - 1, 0))
    for j in range(spec.num_eigs):
        lam, n_j = spec.eig_value(j), spec.n_j(j)
        Vjj = V[spec.eig_slice(j), spec.eig_slice(j)]
        Nb = spec.nilpotent_bracket(j)
        inner = Poly.zero(max(n_j - 1, 0))
        power = np.eye(n_j, dtype=complex)
        for ell in range(1, spec.m_j(j) + 1):
            coeff = np.trace(power @ Vjj)
            inner = inner + coeff * elementary(n_j - ell, lam, degree_bound=n_j - 1)
            power = power @ Nb
        r_j = Poly.one()
        for k in range(spec.num_eigs):
            if k != j:
                r_j = r_j * elementary(spec.n_j(k), spec.eig_value(k))
        out = out + (-1.0) * (r_j * inner).padded(out.degree_bound)
    return out


def gj_deriv(spec: JordanSpec, j: int, Z) -> Poly:
    """Derivative of the eigenvalue-j monic factor map in direction Z,
    as a polynomial of degree <= n_j - 1."""
    Z = np.asarray(Z, dtype=complex)
    V = spec.P @ Z @ spec.Pinv
    lam, n_j = spec.eig_value(j), spec.n_j(j)
    Vjj = V[spec.eig_slice(j), spec.eig_slice(j)]
    Nb = spec.nilpotent_bracket(j)
    out = Poly.zero(n_j - 1)
    power = np.eye(n_j, dtype=complex)
    for ell in range(1, spec.m_j(j) + 1):
        out = out + (-np.trace(power @ Vjj)) * elementary(n_j - ell, lam, degree_bound=n_j - 1)
        power = power @ Nb
    return out


def gj_deriv_adjoint(spec: JordanSpec, j: int, h: Poly) -> np.ndarray:
    """Adjoint of :func:`gj_deriv` under the Taylor-coefficient inner product
    of degree < n_j at the eigenvalue; needs a nonderogatory eigenvalue."""
    from .cpoly import taylor_coeff

    lam, n_j = spec.eig_value(j), spec.n_j(j)
    if not spec.nonderogatory(j):
        raise DerogatoryEigenvalue("adjoint formula needs a single Jordan block")
    h = h.padded(max(h.degree_bound, n_j - 1))
    out = np.zeros((spec.n, spec.n), dtype=complex)
    for s in range(n_j):
        c = taylor_coeff(h, n_j - s - 1, lam)
        A = spec.jordan_power_embed(j, s).conj().T
        out -= c * (spec.Pstar @ A @ spec.Pinvstar)
    return out


def det_expansion_residual(n: int, lam, xi_grid) -> float:
    """Deviation of det(xi I - J - sum_s lam_s (J^*)^s) from its linearization
    xi^n - sum_s (n - s) lam_s xi^(n-s-1), maximized over the grid and scaled
    by ||lam||.  Vanishes linearly as lam -> 0.

    The determinant is evaluated by the exact first-column cofactor recursion
    for the banded Toeplitz-plus-superdiagonal form, not by a generic solver.
    """
    lam = np.asarray(lam, dtype=complex).ravel()
    if lam.size != n:
        raise ValueError(f"need {n} shift coefficients, got {lam.size}")
    norm = float(np.linalg.norm(lam))
    if norm == 0.0:
        return 0.0
    worst = 0.0
    for xi in xi_grid:
        xi = complex(xi)
        a = np.empty(n, dtype=complex)
        a[0] = xi - lam[0]
        if n > 1:
            a[1:] = -lam[1:]
        dets = [1.0 + 0j]  # det of the empty minor
        for s in range(1, n + 1):
            dets.append(sum(a[s - 1 - k] * dets[k] for k in range(s)))
        linear = xi ** n - sum((n - s) * lam[s] * xi ** (n - s - 1) for s in range(n))
        worst = max(worst, abs(dets[n] - linear))
    return worst / norm


def lambda_grad(spec: JordanSpec, j: int, s: int) -> np.ndarray:
    """Gradient of the s-th local eigenvalue coefficient map at the base
    matrix: (n_j - s)^{-1} P^* (N_j^s)^* P^{-*}; eigenvalue j must be a
    single Jordan block."""
    n_j = spec.n_j(j)
    if not spec.nonderogatory(j):
        raise DerogatoryEigenvalue(
            f"eigenvalue {spec.eig_value(j)} is derogatory; the coefficient "
            "gradients exist only for single Jordan blocks"
        )
    if not 0 <= s <= n_j - 1:
        raise ValueError(f"coefficient index {s} outside 0..{n_j - 1}")
    Jjs = spec.jordan_power_embed(j, s)
    return (spec.Pstar @ Jjs.conj().T @ spec.Pinvstar) / (n_j - s)


def active_factor(spec: JordanSpec, f, tol: float = 1e-8):
    """Split the declared structure at the maximizers of f over the spectrum.

    Returns ``(cluster, active_spec)``: the monic factor carrying the active
    eigenvalues (as a lex-ordered root cluster) and a re-laid-out spec whose
    declared eigenvalues are exactly the active ones, everything else
    absorbed into the rest block.
    """
    value_of = f.value if hasattr(f, "value") else f
    vals = [float(value_of(spec.eig_value(j))) for j in range(spec.num_eigs)]
    b_vals = [float(value_of(mu)) for mu in spec.b_eigenvalues]
    if any(math.isinf(v) for v in vals + b_vals):
        raise DomainError("an eigenvalue lies outside the domain of the generator")
    if not vals:
        raise ValueError("no declared eigenvalue is active: declare the maximizers")
    value = max(vals + b_vals)
    if any(v >= value - tol for v in b_vals):
        raise ValueError(
            "an eigenvalue of the rest block attains the max; its Jordan "
            "structure must be declared"
        )
    active = [j for j, v in enumerate(vals) if v >= value - tol]
    inactive = [j for j in range(spec.num_eigs) if j not in active]

    cluster = RootCluster.sorted(
        (spec.eig_value(j), spec.n_j(j)) for j in active
    )
    active_sorted = sorted(active, key=lambda j: lex_key(spec.eig_value(j)))

    perm = list(range(spec.n0))
    for j in inactive:
        sl = spec.eig_slice(j)
        perm.extend(range(sl.start, sl.stop))
    n0_new = len(perm)
    for j in active_sorted:
        sl = spec.eig_slice(j)
        perm.extend(range(sl.start, sl.stop))

    Pi = np.eye(spec.n)[perm, :]
    J_new = Pi @ spec.jordan_matrix() @ Pi.T
    active_spec = JordanSpec(
        [(spec.eig_value(j), spec.block_sizes(j)) for j in active_sorted],
        P=Pi @ spec.P,
        B=J_new[:n0_new, :n0_new],
    )
    return cluster, active_spec


def R_matrix(spec: JordanSpec) -> np.ndarray:
    """Stacked columns vec(P^* (N_j^s)^* P^{-*}) over the declared
    eigenvalues, the linear map behind the matrix part of R."""
    cols = []
    for j in range(spec.num_eigs):
        if not spec.nonderogatory(j):
            raise DerogatoryEigenvalue(
                f"eigenvalue {spec.eig_value(j)} is derogatory"
            )
        for s in range(spec.n_j(j)):
            A = spec.Pstar @ spec.jordan_power_embed(j, s).conj().T @ spec.Pinvstar
            cols.append(A.ravel())
    return np.stack(cols, axis=1)


def R_apply(spec: JordanSpec, v) -> tuple:
    """The injective linear map (v_0, v_js) -> (v_0, -sum v_js P^* (N_j^s)^* P^{-*})
    taking factor coordinates to scalar-plus-matrix pairs; all declared
    eigenvalues must be nonderogatory."""
    v = np.asarray(v, dtype=complex).ravel()
    ntilde = spec.declared_degree
    if v.size != ntilde + 1:
        raise ValueError(f"coordinate vector must have length {ntilde + 1}")
    M = R_matrix(spec)
    Y = -(M @ v[1:]).reshape(spec.n, spec.n)
    return complex(v[0]), Y


# -- JSON ---------------------------------------------------------------------


def matrix_to_json(M) -> list:
    M = np.asarray(M, dtype=complex)
    return [[[z.real, z.imag] for z in row] for row in M]


def matrix_from_json(data) -> np.ndarray:
    try:
        M = np.array(
            [[complex(re, im) for re, im in row] for row in data], dtype=complex
        )
    except (TypeError, ValueError) as exc:
        raise ValueError(f"malformed matrix JSON: {exc}") from exc
    if M.ndim != 2:
        raise ValueError("matrix JSON must be a list of rows")
    return M


def spec_to_json(spec: JordanSpec) -> dict:
    out = {
        "eigs": [
            {"lambda": [lam.real, lam.imag], "blocks": list(blocks)}
            for lam, blocks in spec.eigs
        ]
    }
    out["P"] = matrix_to_json(spec.P)
    if spec.n0:
        out["B"] = matrix_to_json(spec.B)
    return out


def spec_from_json(data: dict) -> JordanSpec:
    try:
        eigs = [
            (complex(e["lambda"][0], e["lambda"][1]), tuple(e["blocks"]))
            for e in data["eigs"]
        ]
    except (KeyError, TypeError, IndexError) as exc:
        raise ValueError(f"malformed spec JSON: {exc}") from exc
    P = matrix_from_json(data["P"]) if data.get("P") is not None else None
    B = matrix_from_json(data["B"]) if data.get("B") is not None else None
    return JordanSpec(eigs, P=P, B=B)
