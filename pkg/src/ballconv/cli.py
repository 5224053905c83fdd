"""Command-line front end: body specs in, CSV tables and a JSON mirror out.

Exit codes: 0 ok, 2 validation failure, 3 numeric failure or divergence,
4 starvation, 5 convergence gate or failed verification verdict.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from . import bodyspec
from .bodies import ArcBody2D, ConvexBody, validate_ball_convex, volume
from .entropy import (DEFAULT_P_GRID, entropy_integral, entropy_limit, info_sandwich, kl_divergence,
                      kl_identity_rhs, verify_monotonicity, verify_interpolation)
from .errors import (BallConvError, EvaluationError, GeometryError, ParameterError, PreconditionError,
                     StarvationError, WeightError)
from .floating import (WeightFn, converge_dual, converge_primal, default_deltas, floating_body,
                       floating_volume, fp_weight_fn)
from .measures import (OmegaParams, omega_p_R, valuation_construction, verify_bounds, verify_homogeneity,
                       verify_valuation)
from .quadrature import build_rule

EXIT_OK, EXIT_VALIDATION, EXIT_NUMERIC, EXIT_STARVATION, EXIT_GATE = 0, 2, 3, 4, 5
VERIFY_TOL = 1e-9
HOMOGENEITY_TOL = 1e-8
KL_IDENTITY_TOL = 1e-6


class CommandFailed(Exception):
    def __init__(self, code: int, message: str, report: Optional["Report"] = None):
        super().__init__(message)
        self.code = code
        self.report = report


@dataclass
class Table:
    """Columnar table; ``columns`` is a list of ``(name, unit)``."""

    columns: list
    rows: list = field(default_factory=list)

    def add(self, *row):
        self.rows.append(list(row))


@dataclass
class Report:
    command: str
    meta: dict
    tables: dict = field(default_factory=dict)
    verdicts: list = field(default_factory=list)
    exit_code: int = EXIT_OK
    message: str = ""

    def verdict(self, check: str, value: float, slack: float, passed: bool, unit: str = "1"):
        self.verdicts.append({"check": check, "value": _num(value), "slack": _num(slack),
                              "unit": unit, "passed": bool(passed)})

    def to_json(self) -> str:
        doc = {"command": self.command, "meta": self.meta, "exit_code": self.exit_code,
               "message": self.message, "verdicts": self.verdicts,
               "tables": {name: {"columns": [c for c, _ in t.columns], "units": [u for _, u in t.columns],
                                 "data": {c: [_num(r[i]) for r in t.rows] for i, (c, _) in enumerate(t.columns)}}
                          for name, t in self.tables.items()}}
        return json.dumps(doc, sort_keys=True, indent=1) + "\n"

    def csv_texts(self) -> dict:
        out = {}
        tables = dict(self.tables)
        if self.verdicts:
            vt = Table([("check", "-"), ("value", "see unit"), ("slack", "see unit"), ("unit", "-"),
                        ("passed", "bool")])
            for v in self.verdicts:
                vt.add(v["check"], v["value"], v["slack"], v["unit"], v["passed"])
            tables["verdicts"] = vt
        for name, t in tables.items():
            buf = io.StringIO()
            w = csv.writer(buf, lineterminator="\n")
            w.writerow([f"{c} [{u}]" for c, u in t.columns])
            for r in t.rows:
                w.writerow([_fmt(v) for v in r])
            out[name] = buf.getvalue()
        return out


def _num(v):
    if isinstance(v, (bool, np.bool_)):
        return bool(v)
    if isinstance(v, (int, float, np.floating, np.integer)):
        v = float(v)
        if np.isnan(v):
            return "nan"
        if np.isinf(v):
            return "inf" if v > 0 else "-inf"
        return v
    return v


def _fmt(v) -> str:
    v = _num(v)
    if isinstance(v, float):
        return format(v, ".17g")
    return str(v)


# ---------------------------------------------------------------- argument helpers


def parse_weight(text: str, body: ConvexBody) -> WeightFn:
    """``one``, ``constant:c`` or ``fp:p``."""
    if text == "one":
        return WeightFn.one()
    kind, _, arg = text.partition(":")
    try:
        val = float(arg)
    except ValueError:
        raise ParameterError(f"bad weight spec {text!r}; expected one, constant:c or fp:p") from None
    if kind == "constant":
        return WeightFn.const(val)
    if kind == "fp":
        return fp_weight_fn(body, val)
    raise ParameterError(f"bad weight spec {text!r}; expected one, constant:c or fp:p")


def _floats(text: str) -> tuple:
    try:
        return tuple(float(v) for v in text.split(","))
    except ValueError:
        raise ParameterError(f"expected a comma-separated list of numbers, got {text!r}") from None


def _rule(body: ConvexBody, resolution: Optional[int]):
    n = body.dim
    return build_rule(n, resolution or (1024 if n == 2 else 64))


def _meta(args, spec) -> dict:
    keys = ("p", "R", "resolution", "delta", "delta0", "levels", "f", "suite", "mode", "gate", "rst", "p_grid")
    params = {k: _num(getattr(args, k)) for k in keys if getattr(args, k, None) is not None}
    return {"command": args.command, "body_digest": bodyspec.digest(spec), "body": spec,
            "seed": args.seed, "params": params}


# ---------------------------------------------------------------- commands


def cmd_omega(args, spec, body) -> Report:
    rep = Report("omega", _meta(args, spec))
    params = OmegaParams(args.p, args.R)
    params.check(body.dim)
    rule = _rule(body, args.resolution)
    rep.meta["rule_resolution"] = rule.resolution
    res = omega_p_R(body, params, rule)
    t = Table([("quantity", "-"), ("value", "length^deg"), ("rule_size", "nodes")])
    rep.tables["omega"] = t
    if res.divergent:
        est = Table([("cutoff", "rad"), ("estimate", "length^deg")])
        for eps, val in res.estimates:
            est.add(eps, val)
        rep.tables["divergence"] = est
        t.add("Omega_p^R", res.value, res.rule_size)
        raise CommandFailed(EXIT_NUMERIC, "relative surface area diverges: truncated estimates keep growing", rep)
    t.add("Omega_p^R", res.value, res.rule_size)
    if res.saturated:
        rep.message = "exponent saturated"
    chains = verify_bounds(body, params, rule)
    ct = Table([("chain", "-"), ("term", "-"), ("value", "length^deg"), ("slack_to_next", "length^deg")])
    for c in chains.chains:
        for i, (lab, v) in enumerate(zip(c.labels, c.values)):
            ct.add(c.name, lab, v, c.slacks[i] if i < len(c.slacks) else float("nan"))
        rep.verdict(f"chain ordered: {c.name}", min(c.values), min(c.slacks), c.ordered, "length^deg")
    rep.tables["chains"] = ct
    return rep


def cmd_float(args, spec, body) -> Report:
    rep = Report("float", _meta(args, spec))
    f = parse_weight(args.f, body)
    grid = build_rule(body.dim, args.resolution or (1024 if body.dim == 2 else 16))
    rep.meta["rule_resolution"] = grid.resolution
    approx = floating_body(body, args.delta, args.R, f, grid)
    if body.dim == 2:
        cols = [("angle", "rad")]
        lead = [[a] for a in np.arctan2(grid.nodes[:, 1], grid.nodes[:, 0])]
    else:
        cols = [("ux", "1"), ("uy", "1"), ("uz", "1")]
        lead = [list(u) for u in grid.nodes]
    rt = Table(cols + [("r", "length"), ("r_body", "length")])
    rk = approx.body_radial
    for i, l in enumerate(lead):
        rt.add(*l, approx.radial[i], rk[i])
    rep.tables["radial"] = rt
    st = Table([("quantity", "-"), ("value", "length^n")])
    st.add("vol_K", floating_volume(floating_body(body, 0.0, args.R, f, grid)))
    st.add("vol_floating", floating_volume(approx))
    rep.tables["summary"] = st
    return rep


def cmd_converge(args, spec, body) -> Report:
    rep = Report("converge", _meta(args, spec))
    deltas = default_deltas(body, args.levels, args.delta0)
    grid = build_rule(body.dim, args.resolution or (1024 if body.dim == 2 else 16))
    rep.meta["rule_resolution"] = grid.resolution
    if args.mode == "primal":
        res = converge_primal(body, args.R, parse_weight(args.f, body), deltas, grid)
    else:
        if args.f != "one":
            raise ParameterError("dual mode uses the unweighted floating body; use --f one")
        res = converge_dual(body, args.R, deltas, grid)
    t = Table([("delta", "length^n"), ("difference", "length^n"), ("ratio", "length^n / delta^(2/(n+1))")])
    for d, df, r in zip(res.deltas, res.vol_diffs, res.ratios):
        t.add(d, df, r)
    rep.tables["per_delta"] = t
    s = Table([("quantity", "-"), ("value", "-")])
    for k in ("extrapolated", "constant", "integral", "target", "relative_error", "fitted_order"):
        s.add(k, getattr(res, k))
    for d in res.trimmed:
        s.add("trimmed_delta", d)
    for d in res.diagnostics:
        for k, v in sorted(d.items()):
            if k.startswith("alternative") or k in ("cut_residual", "lens_oracle_deviation"):
                s.add(k if "delta" not in d else f"{k}@{d['delta']:.6g}", v)
    rep.tables["summary"] = s
    ok = res.relative_error <= args.gate
    rep.verdict("relative error within gate", res.relative_error, args.gate - res.relative_error, ok)
    if not ok:
        raise CommandFailed(EXIT_GATE, f"relative error {res.relative_error:.4g} exceeds gate {args.gate:g}", rep)
    return rep


def _suite_inequalities(args, body, rule, rep):
    r, s, t = _floats(args.rst) if args.rst else (1.0, 0.0, 2.0)
    h = verify_interpolation(body, args.R, r, s, t, rule)
    tab = Table([("r", "1"), ("s", "1"), ("t", "1"), ("slack_three_exponent", "log"),
                 ("slack_two_exponent", "log")])
    tab.add(r, s, t, h.slack_i, h.slack_ii)
    rep.tables["inequalities"] = tab
    rep.verdict("three-exponent interpolation", h.slack_i, h.slack_i, h.slack_i >= -VERIFY_TOL, "log")
    rep.verdict("two-exponent interpolation", h.slack_ii, h.slack_ii, h.slack_ii >= -VERIFY_TOL, "log")


def _suite_monotonicity(args, body, rule, rep):
    grid = _floats(args.p_grid) if args.p_grid else DEFAULT_P_GRID
    m = verify_monotonicity(body, args.R, grid, rule)
    tab = Table([("p", "1"), ("log_decreasing", "log"), ("log_increasing", "log")])
    inc = dict(zip(m.p_grid_ii, m.log_ii))
    for p, v in zip(m.p_grid, m.log_i):
        tab.add(p, v, inc.get(p, float("nan")))
    rep.tables["monotonicity"] = tab
    rep.verdict("decreasing sequence", min(m.step_i), min(m.step_i), not m.violations_i, "log")
    rep.verdict("increasing sequence", min(m.step_ii), min(m.step_ii), not m.violations_ii, "log")


def _suite_valuation(args, spec, body, rep):
    if spec["kind"] != "arc_body" or "disks" not in spec or len(spec["disks"]["radii"]) < 3:
        raise ParameterError("valuation suite needs an arc_body spec with 'disks': D1, D2, then the base disks")
    cs, rs = spec["disks"]["centers"], spec["disks"]["radii"]
    disks = list(zip([tuple(c) for c in cs], rs))
    K, L, U, I = valuation_construction(disks[0], disks[1], disks[2:])
    tab = Table([("p", "1"), ("deviation", "1")])
    for p in _ps(args):
        dev = verify_valuation(K, L, U, I, OmegaParams(p, args.R))
        tab.add(p, dev)
        rep.verdict(f"inclusion-exclusion p={p:g}", dev, VERIFY_TOL - dev, dev <= VERIFY_TOL)
    rep.tables["valuation"] = tab


def _ps(args):
    return (args.p,) if args.p is not None else (0.0, 1.0, 2.0)


def _suite_homogeneity(args, body, rule, rep):
    tab = Table([("scale", "1"), ("p", "1"), ("deviation", "1")])
    for a in (0.5, 3.0):
        for p in _ps(args):
            dev = verify_homogeneity(body, a, OmegaParams(p, args.R), rule)
            tab.add(a, p, dev)
            rep.verdict(f"homogeneity a={a:g} p={p:g}", dev, HOMOGENEITY_TOL - dev, dev <= HOMOGENEITY_TOL)
    rep.tables["homogeneity"] = tab


def _suite_entropy(args, body, rule, rep):
    e = entropy_integral(body, args.R, rule)
    lim = entropy_limit(body, args.R, 300.0, rule)
    kl = kl_divergence(body, args.R, rule)
    rhs = kl_identity_rhs(body, args.R, rule)
    sw = info_sandwich(body, args.R, rule=rule)
    tab = Table([("quantity", "-"), ("value", "1")])
    tab.add("log_E", e.log_E)
    tab.add("E", e.E)
    for p, v in lim:
        tab.add(f"limit_estimate_p={p:g}", v)
    tab.add("kl_divergence", kl)
    tab.add("log_ratio_identity_rhs", rhs)
    rep.tables["entropy"] = tab
    st = Table([("p", "1"), ("log_ratio_power", "log")])
    for p, v in sw.rows:
        st.add(p, v)
    rep.tables["sandwich"] = st
    rep.verdict("divergence nonnegative", kl, kl, kl >= -1e-12)
    gap = abs(kl - rhs)
    rep.verdict("divergence identity", gap, KL_IDENTITY_TOL - gap, gap <= KL_IDENTITY_TOL)
    lo = min(v for _, v in sw.rows) - sw.log_E
    hi = sw.log_upper - max(v for _, v in sw.rows)
    rep.verdict("entropy sandwich", sw.log_E, min(lo, hi), sw.holds, "log")


def cmd_verify(args, spec, body) -> Report:
    rep = Report("verify", _meta(args, spec))
    rep.meta["params"]["R"] = _num(args.R)
    rule = _rule(body, args.resolution)
    rep.meta["rule_resolution"] = rule.resolution
    if args.suite == "valuation":
        _suite_valuation(args, spec, body, rep)
    elif args.suite == "inequalities":
        _suite_inequalities(args, body, rule, rep)
    elif args.suite == "monotonicity":
        _suite_monotonicity(args, body, rule, rep)
    elif args.suite == "homogeneity":
        _suite_homogeneity(args, body, rule, rep)
    else:
        _suite_entropy(args, body, rule, rep)
    failed = [v["check"] for v in rep.verdicts if not v["passed"]]
    if failed:
        raise CommandFailed(EXIT_GATE, "failed checks: " + "; ".join(failed), rep)
    return rep


COMMANDS = {"omega": cmd_omega, "float": cmd_float, "converge": cmd_converge, "verify": cmd_verify}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ballconv", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, need_p=False):
        p.add_argument("--body", required=True, help="path to a JSON body spec")
        p.add_argument("--R", type=float, default=2.0, help="ball-convexity radius (default 2)")
        p.add_argument("--resolution", type=int, default=None, help="sphere rule resolution")
        p.add_argument("--seed", type=int, default=0, help="seed recorded in the report")
        p.add_argument("--out", default=None, help="directory for CSV and JSON output (default stdout)")

    p = sub.add_parser("omega", help="relative Lp surface area and its bound chains")
    common(p)
    p.add_argument("--p", type=float, required=True, help="exponent; use --p=-inf for negative infinity")

    p = sub.add_parser("float", help="radial samples of the weighted ball floating body")
    common(p)
    p.add_argument("--delta", type=float, required=True, help="cut measure delta")
    p.add_argument("--f", default="one", help="weight: one, constant:c or fp:p")

    p = sub.add_parser("converge", help="floating-body volume asymptotics against the limit integral")
    common(p)
    p.add_argument("--mode", choices=("primal", "dual"), default="primal")
    p.add_argument("--f", default="one", help="weight: one, constant:c or fp:p")
    p.add_argument("--delta0", type=float, default=1e-2, help="largest delta as a fraction of vol(K)")
    p.add_argument("--levels", type=int, default=6, help="number of deltas, each 4x smaller")
    p.add_argument("--gate", type=float, default=0.02, help="maximum relative error (default 0.02)")

    p = sub.add_parser("verify", help="run a verification suite")
    common(p)
    p.add_argument("--suite", required=True,
                   choices=("inequalities", "monotonicity", "valuation", "homogeneity", "entropy"))
    p.add_argument("--p", type=float, default=None, help="single exponent for valuation/homogeneity")
    p.add_argument("--rst", default=None, help="exponents r,s,t for the inequality suite (default 1,0,2)")
    p.add_argument("--p-grid", dest="p_grid", default=None, help="comma-separated p grid for monotonicity")
    return parser


def _exit_code(exc: BaseException) -> int:
    if isinstance(exc, StarvationError):
        return EXIT_STARVATION
    if isinstance(exc, (ParameterError, PreconditionError, WeightError, GeometryError, ValueError)):
        return EXIT_VALIDATION
    if isinstance(exc, (EvaluationError, ArithmeticError, BallConvError)):
        return EXIT_NUMERIC
    return EXIT_NUMERIC


def _emit(rep: Report, out: Optional[str]) -> None:
    texts = rep.csv_texts()
    if out is None:
        for name, text in texts.items():
            sys.stdout.write(f"# {rep.command}:{name}\n{text}")
        return
    os.makedirs(out, exist_ok=True)
    for name, text in texts.items():
        with open(os.path.join(out, f"{rep.command}_{name}.csv"), "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    with open(os.path.join(out, f"{rep.command}.json"), "w", encoding="utf-8") as fh:
        fh.write(rep.to_json())


def run(argv: Optional[Sequence[str]] = None) -> Report:
    """Parse arguments, execute the command and write its report; returns the report."""
    args = build_parser().parse_args(argv)
    try:
        spec, body = bodyspec.load(args.body)
    except OSError as exc:
        return Report(args.command, {"command": args.command}, exit_code=EXIT_VALIDATION,
                      message=f"cannot read body spec: {exc}")
    except BallConvError as exc:
        return Report(args.command, {"command": args.command}, exit_code=_exit_code(exc), message=str(exc))
    rep = Report(args.command, _meta(args, spec))
    try:
        rep = COMMANDS[args.command](args, spec, body)
    except CommandFailed as exc:
        rep = exc.report or rep
        rep.exit_code, rep.message = exc.code, str(exc)
    except StarvationError as exc:
        rep.exit_code = EXIT_STARVATION
        dirs = ", ".join("(" + ", ".join(f"{float(x):.6g}" for x in np.atleast_1d(d)) + ")"
                         for d in exc.directions)
        rep.message = f"{exc} (directions: {dirs})" if dirs else str(exc)
    except (BallConvError, ValueError, ArithmeticError) as exc:
        rep.exit_code = _exit_code(exc)
        rep.message = str(exc)
    _emit(rep, args.out)
    return rep


def main(argv: Optional[Sequence[str]] = None) -> int:
    rep = run(argv)
    if rep.message:
        print(rep.message, file=sys.stderr)
    return rep.exit_code


if __name__ == "__main__":
    sys.exit(main())
