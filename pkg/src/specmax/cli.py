"""Command-line front end.

Commands: eval, membership, subderivative (matrix and poly variants),
paper-examples, verify, stabilize.  Complex numbers travel as [re, im]
pairs everywhere; results print as JSON (sorted keys, so identical inputs
and seeds give byte-identical output).

Exit codes: 0 success or member, 1 non-member / failed checks, 2 usage or
parse error, 3 domain error.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import fixtures
from .cpoly import poly_from_json
from .generators import UnsupportedGenerator, builtin
from .jordan import DomainError, matrix_from_json, spec_from_json
from .oracles import subgradient_inequality_suite
from .polysub import subderivative_f, subderivative_radius
from .specsub import (
    W_extract,
    chain_rule_membership,
    derogatory_witness,
    radius_rsd_membership,
    radius_rsd_zero,
    regularity_verdict,
    rsd_membership,
    rsd_recession_membership,
    rsd_sample,
    spectral_active,
)
from .stabilize import stabilize

EXIT_OK = 0
EXIT_NONMEMBER = 1
EXIT_USAGE = 2
EXIT_DOMAIN = 3


@dataclass
class RunConfig:
    """Parsed invocation: command, generator, inputs, tolerances, seed, output."""

    command: str
    f_name: Optional[str] = None
    tol: float = 1e-8
    seed: int = 0
    as_json: bool = False
    out: Optional[str] = None


def _load_json(path: str):
    try:
        with open(path) as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise SystemExit2(f"cannot read {path}: {exc}")


class SystemExit2(Exception):
    """Usage/parse failure carrying exit code 2."""


def _emit(payload, cfg: RunConfig) -> None:
    text = json.dumps(payload, sort_keys=True, indent=2, default=_json_default)
    if cfg.out:
        with open(cfg.out, "w") as fh:
            fh.write(text + "\n")
    print(text)


def _json_default(obj):
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, (np.floating, np.integer, np.bool_)):
        return obj.item()
    raise TypeError(f"not JSON serializable: {type(obj)}")


def _generator(name: str):
    try:
        return builtin(name)
    except ValueError as exc:
        raise SystemExit2(str(exc))


def _pairs(z: complex):
    return [z.real, z.imag]


# -- commands -------------------------------------------------------------------


def cmd_eval(args, cfg: RunConfig) -> int:
    f = _generator(args.f)
    X = matrix_from_json(_load_json(args.matrix))
    if X.shape[0] != X.shape[1]:
        raise SystemExit2("matrix must be square")
    value, cluster, active = spectral_active(X, f, active_tol=cfg.tol)
    payload = {
        "value": value if math.isfinite(value) else "inf",
        "eigenvalues": [_pairs(r) for r in cluster.roots],
        "multiplicities": list(cluster.mults),
        "active": sorted(active),
        "active_eigenvalues": [_pairs(cluster.roots[j]) for j in sorted(active)],
    }
    _emit(payload, cfg)
    return EXIT_OK if math.isfinite(value) else EXIT_DOMAIN


def cmd_membership(args, cfg: RunConfig) -> int:
    f = _generator(args.f)
    spec = spec_from_json(_load_json(args.spec))
    Y = matrix_from_json(_load_json(args.candidate))
    if Y.shape != (spec.n, spec.n):
        raise SystemExit2(f"candidate must be {spec.n}x{spec.n}")

    if args.set == "limiting-structure":
        params = W_extract(spec, Y, level="limiting")
        payload = {
            "verdict": params.ok,
            "failed_conditions": [v.to_json() for v in params.violations],
            "flags": params.flags,
        }
        _emit(payload, cfg)
        return EXIT_OK if params.ok else EXIT_NONMEMBER

    if args.set == "chain":
        verdict = chain_rule_membership(spec, f, Y, tol=cfg.tol)
        _emit({"verdict": verdict, "route": "chain"}, cfg)
        return EXIT_OK if verdict else EXIT_NONMEMBER

    horizon = args.set == "recession"
    if f.name == "radius":
        rho = max([abs(spec.eig_value(j)) for j in range(spec.num_eigs)]
                  + [abs(mu) for mu in spec.b_eigenvalues])
        if rho > 0:
            report = radius_rsd_membership(spec, Y, horizon=horizon)
        else:
            report = radius_rsd_zero(spec, Y, horizon=horizon)
    elif horizon:
        report = rsd_recession_membership(spec, f, Y)
    else:
        report = rsd_membership(spec, f, Y)
    _emit(json.loads(report.to_json()), cfg)
    return EXIT_OK if report.verdict else EXIT_NONMEMBER


def cmd_subderivative(args, cfg: RunConfig) -> int:
    f = _generator(args.f)
    if args.kind == "poly":
        from .cpoly import roots as cluster_roots

        p = poly_from_json(_load_json(args.base))
        v = poly_from_json(_load_json(args.direction))
        cluster = cluster_roots(p, cluster_tol=args.cluster_tol)
        if f.name == "radius":
            value = subderivative_radius(cluster, v.padded(cluster.degree()), tol=cfg.tol)
        else:
            value = subderivative_f(cluster, f, v.padded(cluster.degree()), tol=cfg.tol)
    else:
        from .jordan import active_factor, char_poly_deriv_action
        from .cpoly import RootCluster

        spec = spec_from_json(_load_json(args.base))
        Z = matrix_from_json(_load_json(args.direction))
        if spec.n0:
            raise SystemExit2("matrix subderivative needs the full spectrum declared")
        action = char_poly_deriv_action(spec, Z)
        cluster = RootCluster.sorted(
            (spec.eig_value(j), spec.n_j(j)) for j in range(spec.num_eigs)
        )
        if f.name == "radius":
            value = subderivative_radius(cluster, action, tol=cfg.tol)
        else:
            value = subderivative_f(cluster, f, action, tol=cfg.tol)
    _emit({"value": value if math.isfinite(value) else "inf", "kind": args.kind}, cfg)
    return EXIT_OK


def cmd_paper_examples(args, cfg: RunConfig) -> int:
    checks = fixtures.worked_example_checks(nu_count=args.nu)
    all_ok = all(ok for _, ok, _ in checks)
    if cfg.as_json:
        payload = {
            "checks": [{"name": n, "passed": ok, "detail": d} for n, ok, d in checks],
            "all_passed": all_ok,
        }
        _emit(payload, cfg)
    else:
        width = max(len(n) for n, _, _ in checks)
        for name, ok, _ in checks:
            print(f"{name:<{width}}  {'PASS' if ok else 'FAIL'}")
        print(f"{'total':<{width}}  {sum(ok for _, ok, _ in checks)}/{len(checks)} passed")
    return EXIT_OK if all_ok else EXIT_NONMEMBER


def cmd_verify(args, cfg: RunConfig) -> int:
    f = _generator(args.f)
    spec = spec_from_json(_load_json(args.spec))
    report = {"spec": {"n": spec.n, "eigs": [[_pairs(l), list(b)] for l, b in spec.eigs]},
              "generator": f.name, "samples": args.samples, "seed": cfg.seed}

    verdict_ok = True
    regular = regularity_verdict(spec, f) == "regular"
    report["regularity"] = "regular" if regular else "not_regular"

    if regular:
        radius_mode = f.name == "radius"
        sampler_f = _generator("radius2") if radius_mode else f
        rho = max([abs(spec.eig_value(j)) for j in range(spec.num_eigs)]
                  + [abs(mu) for mu in spec.b_eigenvalues]) if radius_mode else None
        members_checked = 0
        cross_failures = 0
        suites = []
        rng = np.random.default_rng(cfg.seed)
        n_members = max(1, args.samples // 100)
        for i in range(n_members):
            Y = rsd_sample(spec, sampler_f, seed=int(rng.integers(2 ** 31)))
            if radius_mode:
                if rho == 0:
                    raise SystemExit2("verification at a nilpotent base point "
                                      "needs the quadratic-modulus generator")
                Y = Y / rho
                members_checked += 1
                if not radius_rsd_membership(spec, Y).verdict:
                    cross_failures += 1
            else:
                members_checked += 1
                if not rsd_membership(spec, f, Y).verdict:
                    cross_failures += 1
                if not chain_rule_membership(spec, f, Y):
                    cross_failures += 1
            suites.append(
                subgradient_inequality_suite(
                    spec, f, Y, n_samples=args.samples, seed=cfg.seed + i
                )
            )
        report["members_checked"] = members_checked
        report["cross_route_failures"] = cross_failures
        report["max_violation"] = max(s["max_violation"] for s in suites)
        report["violations"] = sum(s["violations"] for s in suites)
        verdict_ok = cross_failures == 0 and report["violations"] == 0
    if not regular:
        _, M, wreport = derogatory_witness(spec, f, count=args.nu)
        report["witness"] = {
            "sequence_members": all(wreport["per_nu"]),
            "limit_regular_at_base": wreport["limit_is_regular_subgradient_at_base"],
            "ok": wreport["ok"],
        }
        verdict_ok = verdict_ok and wreport["ok"]
    report["ok"] = verdict_ok
    _emit(report, cfg)
    return EXIT_OK if verdict_ok else EXIT_NONMEMBER


def cmd_stabilize(args, cfg: RunConfig) -> int:
    f = _generator(args.f)
    data = _load_json(args.family)
    try:
        A0 = matrix_from_json(data["A0"])
        directions = [matrix_from_json(D) for D in data["directions"]]
        theta0 = data.get("theta0")
    except (KeyError, TypeError) as exc:
        raise SystemExit2(f"malformed family JSON: {exc}")
    traj = stabilize(A0, directions, f, theta0=theta0, iters=args.iters,
                     step=args.step, step_rule=args.step_rule)
    lines = ["iter,phi," + ",".join(f"theta{i}" for i in range(len(directions)))]
    for row in traj.rows():
        lines.append(",".join(repr(x) for x in row))
    text = "\n".join(lines)
    if cfg.out:
        with open(cfg.out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    return EXIT_OK


# -- argument plumbing ------------------------------------------------------------


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="specmax",
        description="Spectral max functions: evaluation, subgradient membership, "
                    "subderivatives, and verification suites.",
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol", type=float, default=1e-8, help="membership tolerance")
    common.add_argument("--seed", type=int, default=0, help="random seed")
    common.add_argument("--json", action="store_true", help="machine-readable output")
    common.add_argument("--out", type=str, default=None, help="write output to a file")

    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eval", parents=[common], help="evaluate the spectral max")
    p.add_argument("matrix", help="matrix JSON path")
    p.add_argument("--f", required=True, help="generator name")

    p = sub.add_parser("membership", parents=[common], help="subgradient membership test")
    p.add_argument("spec", help="Jordan spec JSON path")
    p.add_argument("candidate", help="candidate matrix JSON path")
    p.add_argument("--f", required=True, help="generator name")
    p.add_argument("--set", default="rsd",
                   choices=["rsd", "recession", "limiting-structure", "chain"])

    p = sub.add_parser("subderivative", parents=[common],
                       help="lower directional derivative along a direction")
    p.add_argument("kind", choices=["poly", "matrix"])
    p.add_argument("base", help="polynomial or Jordan spec JSON path")
    p.add_argument("direction", help="polynomial or matrix JSON path")
    p.add_argument("--f", required=True, help="generator name")
    p.add_argument("--cluster-tol", type=float, default=1e-6)

    p = sub.add_parser("paper-examples", parents=[common],
                       help="run the bundled worked examples")
    p.add_argument("--nu", type=int, default=100, help="perturbation sequence length")

    p = sub.add_parser("verify", parents=[common], help="run the oracle suites")
    p.add_argument("spec", help="Jordan spec JSON path")
    p.add_argument("--f", required=True, help="generator name")
    p.add_argument("--samples", type=int, default=200)
    p.add_argument("--nu", type=int, default=50)

    p = sub.add_parser("stabilize", parents=[common],
                       help="subgradient descent demo over an affine family")
    p.add_argument("family", help="family JSON path: {A0, directions, theta0?}")
    p.add_argument("--f", default="abscissa", help="generator name")
    p.add_argument("--iters", type=int, default=200)
    p.add_argument("--step", type=float, default=0.5)
    p.add_argument("--step-rule", default="diminishing", choices=["diminishing", "const"])

    return parser


_DISPATCH = {
    "eval": cmd_eval,
    "membership": cmd_membership,
    "subderivative": cmd_subderivative,
    "paper-examples": cmd_paper_examples,
    "verify": cmd_verify,
    "stabilize": cmd_stabilize,
}


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    cfg = RunConfig(
        command=args.command,
        f_name=getattr(args, "f", None),
        tol=args.tol,
        seed=args.seed,
        as_json=args.json,
        out=args.out,
    )
    try:
        return _DISPATCH[args.command](args, cfg)
    except SystemExit2 as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ValueError, UnsupportedGenerator) as exc:
        if isinstance(exc, DomainError):
            print(f"domain error: {exc}", file=sys.stderr)
            return EXIT_DOMAIN
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    raise SystemExit(main())
