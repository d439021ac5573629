"""Command-line front end.

Every subcommand runs a set of checks, prints a summary table and writes a
JSON report (sorted keys, floats as 17-digit decimal strings).  Exit code 0
means every check passed, 2 means at least one check did not match, 1 is a
usage or internal error.
"""
from __future__ import annotations

import argparse
import cmath
import json
import math
import os
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import counterexample as cx
from .errors import PainleveError
from .leading_order import det_closed_form_check, random_leading_data, solve_exponents
from .model import residual_point
from .resonance import (coefficient_mismatch, expected_resonances, find_resonances,
                        resonance_closed_form, resonance_polynomial)
from .series_builder import ModelConfig, build_series, verify_residual_scaling

CAVEATS = {
    "det_sign": "det B = (-1)^N S^(N-1); the form -S^(N-1) is correct only for odd N",
    "rank_one_sign": "order-k operator uses +2 w_i w̄_j; with -2 the resonance at -1 would sit at 3",
    "conjugate_equation": "the equation for w̄ is taken as the exact w <-> w̄ image of the one for w",
    "branch_location": ("tanh poles sit at chi0 + 2(p-1)/(p+1)(m+1/2) i pi, "
                        "not at chi0 + (m+1/2) i pi"),
    "single_valued": ("R changes sign and f shifts by pi around the same points, "
                      "so w itself returns to its value around every loop"),
}


# -- report plumbing ------------------------------------------------------------

def _num(x):
    """JSON-friendly value: floats and complex numbers become decimal strings."""
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        return format(float(x), ".17g")
    if isinstance(x, (complex, np.complexfloating)):
        z = complex(x)
        return {"re": format(z.real, ".17g"), "im": format(z.imag, ".17g")}
    if isinstance(x, dict):
        return {str(k): _num(v) for k, v in x.items()}
    if isinstance(x, (list, tuple, np.ndarray)):
        return [_num(v) for v in x]
    return x


def _show(x) -> str:
    if isinstance(x, (float, np.floating)):
        return f"{float(x):.3e}"
    if isinstance(x, (complex, np.complexfloating)):
        z = complex(x)
        return f"{z.real:.6g}{z.imag:+.6g}j"
    if isinstance(x, dict):
        return "{" + ", ".join(f"{k}: {_show(v)}" for k, v in x.items()) + "}"
    return str(x)


@dataclass
class Check:
    name: str
    expected: object
    observed: object
    tolerance: object
    passed: bool

    def as_dict(self):
        return {"name": self.name, "expected": _num(self.expected),
                "observed": _num(self.observed), "tolerance": _num(self.tolerance),
                "status": "pass" if self.passed else "mismatch"}


@dataclass
class RunReport:
    command: str
    config: dict
    checks: list[Check] = field(default_factory=list)
    data: dict = field(default_factory=dict)
    caveats: list[str] = field(default_factory=list)
    wall_time: float = 0.0
    error: str | None = None

    def check(self, name, expected, observed, tolerance, passed):
        self.checks.append(Check(name, expected, observed, tolerance, bool(passed)))

    @property
    def status(self) -> str:
        if self.error is not None:
            return "error"
        return "pass" if all(c.passed for c in self.checks) else "mismatch"

    @property
    def exit_code(self) -> int:
        return {"pass": 0, "mismatch": 2, "error": 1}[self.status]

    def as_dict(self):
        out = {"command": self.command, "config": _num(self.config),
               "checks": [c.as_dict() for c in self.checks], "results": _num(self.data),
               "caveats": list(self.caveats), "status": self.status,
               "wall_time": _num(self.wall_time)}
        if self.error is not None:
            out["error"] = self.error
        return out

    def to_json(self) -> str:
        return json.dumps(self.as_dict(), sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def emit_summary(report: RunReport) -> str:
    lines = [f"== {report.command} =="]
    if report.error is not None:
        lines.append(f"ERROR: {report.error}")
    if not report.checks:
        lines.append("no checks executed")
    else:
        rows = [("check", "expected", "observed", "verdict")]
        rows += [(c.name, _show(c.expected), _show(c.observed), "pass" if c.passed else "MISMATCH")
                 for c in report.checks]
        widths = [max(len(r[i]) for r in rows) for i in range(4)]
        for r in rows:
            lines.append("  ".join(s.ljust(w) for s, w in zip(r, widths)).rstrip())
    for note in report.caveats:
        lines.append(f"note: {note}")
    if report.status == "mismatch":
        lines.append("MISMATCH: at least one check failed (exit code 2)")
    elif report.status == "pass":
        lines.append("all checks passed (exit code 0)")
    return "\n".join(lines) + "\n"


# -- subcommands ----------------------------------------------------------------

def _tol(args, default):
    return default if args.tol is None else args.tol


def cmd_exponents(args, rep: RunReport):
    rng = np.random.default_rng([args.seed, args.n])
    data = random_leading_data(args.n, rng)
    sol = solve_exponents(data)
    tol = _tol(args, 1e-11)
    ones = np.ones(args.n - 1)
    err = float(max(np.max(np.abs(sol.alpha - ones)), np.max(np.abs(sol.beta - ones))))
    rep.check("alpha = beta = 1", 1.0, 1.0 + err, tol, err < tol)
    rep.check("linear-solve residual", 0.0, sol.residual, tol, sol.residual < tol)
    rep.check("unique solution", True, sol.unique, None, sol.unique)
    dc = det_closed_form_check(data)
    rel = abs(abs(dc.det_generic) - abs(dc.det_formula)) / abs(dc.det_formula)
    rep.check("|det B| = |S|^(N-1)", abs(dc.det_formula), abs(dc.det_generic), 1e-10, rel < 1e-10)
    rep.check("det B = (-1)^N S^(N-1)", dc.det_formula, dc.det_generic, 1e-10, dc.match)
    rep.data.update(S=data.S, det=dc.det_generic, det_printed_form=dc.det_printed,
                    printed_sign_matches=dc.printed_sign_matches,
                    alpha=list(sol.alpha), beta=list(sol.beta))
    rep.caveats.append(CAVEATS["det_sign"])


def cmd_resonances(args, rep: RunReport):
    rng = np.random.default_rng([args.seed, args.n])
    data = random_leading_data(args.n, rng)
    phi_prime = complex(rng.uniform(0.5, 1.5) * np.exp(2j * np.pi * rng.uniform()))
    poly = resonance_polynomial(data, phi_prime)
    res = find_resonances(poly, args.n)
    tol = _tol(args, 1e-6)
    found = {str(k): m for k, m in res.roots}
    expected = {str(k): m for k, m in expected_resonances(args.n).items()}
    rep.check("integer roots with multiplicities", expected, found, None, found == expected)
    worst = max(res.cluster_residuals.values()) if res.cluster_residuals else math.inf
    rep.check("cluster residual", 0.0, worst, tol, worst < tol and not res.unclustered)
    rep.check("4N-4 total zeros", 4 * args.n - 4, res.total_multiplicity, None,
              res.total_multiplicity == 4 * args.n - 4)
    mism = coefficient_mismatch(poly.coeffs, resonance_closed_form(data, phi_prime))
    rep.check("closed-form determinant coefficients", 0.0, mism, 1e-8, mism < 1e-8)
    rep.data.update(roots=found, phi_prime=phi_prime, S=data.S,
                    holdout_node=poly.holdout_node, holdout_error=poly.holdout_error,
                    cluster_residuals={str(k): v for k, v in res.cluster_residuals.items()},
                    cluster_spread={str(k): v for k, v in res.cluster_spread.items()},
                    sample_nodes=poly.nodes, det_samples=poly.det_samples)
    rep.caveats.append(CAVEATS["rank_one_sign"])


def _series_checks(args, rep: RunReport, radii):
    cfg = ModelConfig(N=args.n, K=args.order, M=args.jet_order, seed=args.seed,
                      tolerance=_tol(args, 1e-9),
                      precision=args.precision or None)
    rep.config["jet_order"] = cfg.M
    sol, comp = build_series(cfg)
    tol = cfg.tolerance
    rep.check("lowest-order right-hand side vanishes", 0.0, comp.k0_rhs_max, tol,
              comp.k0_rhs_max < tol)
    if cfg.K >= 1:
        k1 = comp.order(1)
        rep.check("k=1 consistency residual", 0.0, k1.consistency_residual, tol,
                  k1.consistency_residual < tol)
        rep.check("first integrals", 4 * args.n - 5, comp.first_integrals, None,
                  comp.first_integrals == 4 * args.n - 5)
    fit = verify_residual_scaling(sol, radii)
    ok = fit.saturated or abs(fit.slope - fit.expected_slope) <= 0.1 * max(abs(fit.expected_slope), 1)
    rep.check("residual slope", fit.expected_slope, fit.slope, "10%", ok)
    rep.data.update(first_integrals=comp.first_integrals,
                    rank_profile={str(k): v for k, v in comp.rank_profile.items()},
                    consistency={str(o.k): o.consistency_residual for o in comp.orders},
                    slope=fit.slope, radii=list(fit.radii), residuals=list(fit.residuals),
                    saturated=fit.saturated)
    rep.caveats.extend([CAVEATS["conjugate_equation"], CAVEATS["rank_one_sign"]])


def cmd_build_series(args, rep: RunReport):
    _series_checks(args, rep, (1e-1, 5e-2, 2e-2, 1e-2))


def cmd_verify_series(args, rep: RunReport):
    radii = tuple(float(r) for r in args.radii.split(","))
    _series_checks(args, rep, radii)


def _params(args) -> cx.SolitonParams:
    return cx.SolitonParams(p=args.p, a=complex(args.a), b=complex(args.b),
                            chi0=complex(args.chi0), d=complex(args.d))


def _window(params, span=12.0):
    c = complex(params.chi0)
    return (c.real - span, c.real + span, c.imag - span, c.imag + span)


def cmd_counterexample(args, rep: RunReport):
    params = _params(args)
    rng = np.random.default_rng([args.seed, 17])
    tol = _tol(args, 1e-10)
    worst_res = worst_fd = 0.0
    used = 0
    while used < args.points:
        chi = params.chi0 + 2 * math.sqrt(rng.uniform()) * cmath.exp(2j * math.pi * rng.uniform())
        xi = complex(rng.normal(), rng.normal())
        xibar = params.b * (xi / params.a - chi)
        if cx.singular_distance(params, chi) < 1e-3:
            continue
        state = cx.eval_derivatives(params, xi, xibar)
        worst_res = max(worst_res, max(abs(r) for r in residual_point(state)))
        fd = cx.finite_difference_state(params, xi, xibar)
        for name in ("d_w", "dbar_w", "d_wbar", "dbar_wbar", "ddbar_w", "ddbar_wbar"):
            a, b = getattr(state, name)[0], getattr(fd, name)[0]
            worst_fd = max(worst_fd, abs(a - b) / (1 + abs(a)))
        used += 1
    rep.check("max residual at regular points", 0.0, worst_res, tol, worst_res < tol)
    rep.check("closed form vs finite differences", 0.0, worst_fd, 1e-7, worst_fd < 1e-7)
    w, wb = cx.eval_solution(params, params.chi0 * params.a, 0)
    rep.data.update(points=used, value_at_chi0=w, R_at_chi0=cmath.sqrt(-params.p),
                    branch_points=cx.locate_branch_points(params, _window(params)),
                    printed_branch_points=cx.printed_branch_points(params, _window(params)),
                    phase_branch_points=cx.phase_branch_points(params, _window(params)))
    rep.caveats.extend([CAVEATS["branch_location"], CAVEATS["single_valued"]])


def cmd_monodromy(args, rep: RunReport):
    params = _params(args)
    if args.center == "auto":
        center = cx.first_branch_point(params)
    else:
        center = complex(args.center.replace(" ", ""))
    rep.config["center"] = center
    tol = _tol(args, 1e-6)
    probe = cx.monodromy_probe(params, center, args.radius, args.steps)
    fine = cx.monodromy_probe(params, center, args.radius, 2 * args.steps)
    window = (center.real - args.radius, center.real + args.radius,
              center.imag - args.radius, center.imag + args.radius)
    around_branch = any(abs(z - center) < args.radius
                        for z in cx.locate_branch_points(params, window))
    if around_branch:
        rep.check("branching around branch point", "> 0.1", probe.discrepancy, 0.1,
                  probe.discrepancy > 0.1)
    else:
        rep.check("no branching around regular point", "< 1e-10", probe.discrepancy, 1e-10,
                  probe.discrepancy < 1e-10)
    drift = abs(fine.discrepancy - probe.discrepancy)
    rep.check("stable under step doubling", 0.0, drift, tol, drift < tol)
    rep.data.update(center=center, radius=args.radius, steps=args.steps,
                    start_value=probe.start_value, end_value=probe.end_value,
                    discrepancy=probe.discrepancy, discrepancy_doubled=fine.discrepancy,
                    phase_jump=probe.phase_jump, R_ratio=probe.R_ratio,
                    enclosed=list(probe.enclosed))
    rep.caveats.extend([CAVEATS["branch_location"], CAVEATS["single_valued"]])


COMMANDS = {
    "exponents": cmd_exponents,
    "resonances": cmd_resonances,
    "build-series": cmd_build_series,
    "verify-series": cmd_verify_series,
    "counterexample": cmd_counterexample,
    "monodromy": cmd_monodromy,
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(1)


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--n", type=int, default=3, help="N of CP^(N-1), at least 2")
    common.add_argument("--order", type=int, default=6, help="truncation order K")
    common.add_argument("--jet-order", type=int, default=None, help="jet order M (>= K+2)")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--tol", type=float, default=None, help="override the main tolerance")
    common.add_argument("--out", type=Path, default=None, help="report path")
    common.add_argument("--json", action=argparse.BooleanOptionalAction, default=True,
                        help="write the JSON report (default on)")
    common.add_argument("--precision", type=int, default=200,
                        help="bits for series building; 0 = complex double")
    common.add_argument("--radii", default="0.1,0.05,0.02,0.01")
    common.add_argument("--p", type=float, default=-3.0)
    common.add_argument("--a", default="1")
    common.add_argument("--b", default="2")
    common.add_argument("--chi0", default="0")
    common.add_argument("--d", default="0")
    common.add_argument("--points", type=int, default=100)
    common.add_argument("--center", default="auto")
    common.add_argument("--radius", type=float, default=0.3)
    common.add_argument("--steps", type=int, default=512)

    parser = _Parser(prog="cpn-painleve", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name in COMMANDS:
        sub.add_parser(name, parents=[common])
    return parser


def _config_echo(args) -> dict:
    keys = {
        "exponents": ("n", "seed", "tol"),
        "resonances": ("n", "seed", "tol"),
        "build-series": ("n", "order", "jet_order", "seed", "tol", "precision"),
        "verify-series": ("n", "order", "jet_order", "seed", "tol", "precision", "radii"),
        "counterexample": ("p", "a", "b", "chi0", "d", "seed", "tol", "points"),
        "monodromy": ("p", "a", "b", "chi0", "d", "center", "radius", "steps", "tol"),
    }[args.command]
    return {k: getattr(args, k) for k in keys}


def _default_out(command: str) -> Path:
    return Path(os.environ.get("REPORT_DIR", "reports")) / f"{command}.json"


def run(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if args.n < 2:
        print("error: --n must be at least 2", file=sys.stderr)
        return 1
    if args.jet_order is not None and args.jet_order < args.order + 2:
        print(f"error: --jet-order {args.jet_order} must be at least --order + 2", file=sys.stderr)
        return 1
    rep = RunReport(args.command, _config_echo(args))
    t0 = time.perf_counter()
    try:
        COMMANDS[args.command](args, rep)
    except (PainleveError, ValueError) as exc:
        rep.error = f"{type(exc).__name__}: {exc}"
    rep.wall_time = time.perf_counter() - t0
    sys.stdout.write(emit_summary(rep))
    if args.json:
        out = args.out or _default_out(args.command)
        out.parent.mkdir(parents=True, exist_ok=True)
        out.write_text(rep.to_json(), encoding="utf-8")
    return rep.exit_code


def main():
    raise SystemExit(run())


if __name__ == "__main__":
    main()
