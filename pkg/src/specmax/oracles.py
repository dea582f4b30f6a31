"""Formula-free verification: finite-difference quotients and sampled
subgradient-inequality checks.

Fixed-direction difference quotients only bound the lower directional
derivative from above (the defining liminf also varies the direction), so
the verdicts here certify one-sided consistency: a formula value must stay
below the quotient plus a slack absorbing the root-splitting rate, and
equality claims are asserted only on simple-root instances where the
quotient genuinely converges.  Multiple roots split at a Holder rate
t^(1/m), which the slack model c * t^(1/m) tracks with c calibrated from
the observed second differences of the quotients.

Everything is deterministic given the seed; sample directions draw from
per-index substreams so results do not depend on evaluation order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .cpoly import Poly, poly_root_max
from .jordan import JordanSpec, nilpotent
from .specsub import spectral_max

__all__ = [
    "FDReport",
    "fd_phi_quotient",
    "fd_poly_quotient",
    "subgradient_inequality_suite",
    "growth_exponent",
    "slack_coefficient",
]

GROWTH_CUTOFF = -0.25  # log-log slope below which quotients are treated as divergent
ABS_SLACK = 1e-8
EPS = float(np.finfo(float).eps)


def eval_noise_floor(order: int, scale: float = 1.0) -> float:
    """Resolution limit of the root-based evaluators: a multiplicity-`order`
    eigenvalue splits under rounding by about eps^(1/order), so values are
    only trustworthy to that times the problem scale (constant measured with
    a ~10x margin)."""
    return 32.0 * EPS ** (1.0 / max(order, 1)) * max(1.0, scale)


@dataclass(frozen=True)
class FDReport:
    """Difference quotients along one direction with derived diagnostics."""

    steps: tuple
    quotients: tuple
    extrapolated: float
    growth_exponent: Optional[float]
    slack_coeff: float
    holder_order: int
    noise: float = 0.0
    formula_value: Optional[float] = None
    verdict: Optional[bool] = None

    def slack(self, t: float) -> float:
        return self.slack_coeff * t ** (1.0 / self.holder_order) + self.noise / t + ABS_SLACK

    def diverging(self) -> bool:
        return self.growth_exponent is not None and self.growth_exponent <= GROWTH_CUTOFF


def growth_exponent(steps: Sequence[float], quotients: Sequence[float]) -> Optional[float]:
    """Slope of log|quotient| against log step; needs at least three usable points."""
    pts = [(t, abs(q)) for t, q in zip(steps, quotients) if abs(q) > 1e-12 and t > 0]
    if len(pts) < 3:
        return None
    xs = np.log([t for t, _ in pts])
    ys = np.log([q for _, q in pts])
    slope, _ = np.polyfit(xs, ys, 1)
    return float(slope)


def slack_coefficient(steps: Sequence[float], quotients: Sequence[float],
                      order: int = 1) -> float:
    """Calibrate c in the slack model c * t^(1/order) from the quotients.

    c is ten times the largest divided slope of the quotient sequence in the
    variable t^(1/order); for quotients of the form q0 + b * t^alpha on a
    decaying grid this covers |q(t) - q0| at every step regardless of how
    alpha compares to 1/order.  Non-finite quotients are skipped.
    """
    pts = sorted(
        ((t ** (1.0 / max(order, 1)), q) for t, q in zip(steps, quotients)
         if math.isfinite(q)),
        key=lambda p: p[0],
    )
    if len(pts) < 2:
        return 0.0
    slopes = [
        abs(pts[i + 1][1] - pts[i][1]) / (pts[i + 1][0] - pts[i][0])
        for i in range(len(pts) - 1)
        if pts[i + 1][0] > pts[i][0]
    ]
    return 10.0 * max(slopes) if slopes else 0.0


def _extrapolate(steps, quotients) -> float:
    """Linear-in-t extrapolation of the two smallest steps to t = 0."""
    order = np.argsort(steps)
    t1, t2 = steps[order[0]], steps[order[1]]
    q1, q2 = quotients[order[0]], quotients[order[1]]
    if not (math.isfinite(q1) and math.isfinite(q2)) or t1 == t2:
        return q1
    return q1 + (q1 - q2) * t1 / (t2 - t1)


def _build_report(steps, quotients, holder_order, formula, scale=1.0) -> FDReport:
    steps = tuple(float(t) for t in steps)
    quotients = tuple(float(q) for q in quotients)
    expo = growth_exponent(steps, quotients)
    coeff = slack_coefficient(steps, quotients, holder_order)
    noise = eval_noise_floor(holder_order, scale)
    verdict = None
    if formula is not None:
        if math.isinf(formula):
            verdict = expo is not None and expo <= GROWTH_CUTOFF
        else:
            verdict = all(
                formula <= q + coeff * t ** (1.0 / holder_order) + noise / t + ABS_SLACK
                for t, q in zip(steps, quotients)
            )
    return FDReport(
        steps=steps,
        quotients=quotients,
        extrapolated=_extrapolate(steps, quotients),
        growth_exponent=expo,
        slack_coeff=coeff,
        holder_order=holder_order,
        noise=noise,
        formula_value=formula,
        verdict=verdict,
    )


def fd_phi_quotient(X, f, Z, t_grid=(1e-2, 1e-3, 1e-4, 1e-5),
                    holder_order: int = 1, formula: Optional[float] = None) -> FDReport:
    """Quotients (phi(X + tZ) - phi(X)) / t along a fixed matrix direction.

    These are upper evidence for the lower directional derivative; quotients
    growing like t^(1/k - 1) flag eigenvalue splitting of order k.
    """
    if any(t <= 0 or t > 1e-1 for t in t_grid):
        raise ValueError("steps must lie in (0, 0.1]")
    X = np.asarray(X, dtype=complex)
    Z = np.asarray(Z, dtype=complex)
    base = spectral_max(X, f)
    quotients = [(spectral_max(X + t * Z, f) - base) / t for t in t_grid]
    return _build_report(t_grid, quotients, holder_order, formula,
                         scale=max(1.0, abs(base), float(np.linalg.norm(X))))


def fd_poly_quotient(p: Poly, f, v: Poly, t_grid=(1e-2, 1e-3, 1e-4, 1e-5),
                     holder_order: int = 1, formula: Optional[float] = None) -> FDReport:
    """Quotients of the root max function along a polynomial direction,
    recomputing roots at every step."""
    if any(t <= 0 or t > 1e-1 for t in t_grid):
        raise ValueError("steps must lie in (0, 0.1]")
    n = max(p.degree_bound, v.degree_bound)
    p, v = p.padded(n), v.padded(n)
    base = poly_root_max(p, f)
    quotients = [(poly_root_max(p + t * v, f) - base) / t for t in t_grid]
    return _build_report(t_grid, quotients, holder_order, formula,
                         scale=max(1.0, abs(base), p.coeff_norm()))


def _structured_probes(spec: JordanSpec) -> list:
    """Directions along which the spectral max stays finite-differentiable
    enough to expose subgradient-inequality violations (identity shifts and
    per-eigenvalue block identities)."""
    probes = []
    eye = np.eye(spec.n, dtype=complex)
    probes.append(eye)
    probes.append(-eye)
    for j in range(spec.num_eigs):
        E = spec.embed_block(j, np.eye(spec.n_j(j), dtype=complex))
        D = spec.Pinv @ E @ spec.P
        probes.append(D)
        probes.append(-D)
        if spec.n_j(j) >= 2:
            # push along the transposed nilpotent: splits the eigenvalue
            Nt = np.zeros((spec.n, spec.n), dtype=complex)
            sl = spec.eig_slice(j)
            Nt[sl, sl] = nilpotent(spec.n_j(j)).T
            probes.append(spec.Pinv @ Nt @ spec.P)
    return [p / np.linalg.norm(p) for p in probes if np.linalg.norm(p) > 0]


def subgradient_inequality_suite(spec: JordanSpec, f, Y, n_samples: int = 500,
                                 radii=(1e-2, 1e-3, 1e-4), seed: int = 0,
                                 include_probes: bool = True) -> dict:
    """Sampled test of Re<Y, Z> <= quotient(t) + slack(t) over seeded unit
    directions (plus structured probes), aggregating the worst violation."""
    X = spec.synth()
    Y = np.asarray(Y, dtype=complex)
    m_max = max(spec.m_j(j) for j in range(spec.num_eigs)) if spec.num_eigs else 1
    directions = []
    if include_probes:
        directions.extend(_structured_probes(spec))
    for i in range(n_samples):
        rng = np.random.default_rng([seed, i])
        Z = rng.standard_normal((spec.n, spec.n)) + 1j * rng.standard_normal((spec.n, spec.n))
        directions.append(Z / np.linalg.norm(Z))

    worst = 0.0
    worst_idx = -1
    violations = 0
    base = spectral_max(X, f)
    noise = eval_noise_floor(m_max, max(1.0, abs(base), float(np.linalg.norm(X))))
    for idx, Z in enumerate(directions):
        lhs = float(np.real(np.trace(Y.conj().T @ Z)))
        quotients = [(spectral_max(X + t * Z, f) - base) / t for t in radii]
        coeff = slack_coefficient(radii, quotients, m_max)
        gap = max(
            lhs - (q + coeff * t ** (1.0 / m_max) + noise / t + ABS_SLACK)
            for t, q in zip(radii, quotients)
        )
        if gap > 0:
            violations += 1
            if gap > worst:
                worst, worst_idx = gap, idx
    return {
        "n_directions": len(directions),
        "violations": violations,
        "max_violation": worst,
        "worst_direction": worst_idx,
        "seed": seed,
        "radii": list(radii),
    }
