"""Batch command-line interface with deterministic JSON/CSV reports.

Commands: info | potential | critical | residue | z-trace | qsr | c1check |
verify.  Reports carry a schema version, every verdict with its residual and
tolerance, and serialize byte-identically for identical inputs and seed:
floats are printed with 17 significant digits, rationals as "p/q" strings,
complex numbers as [re, im] pairs.

Exit codes: 0 all verdicts pass, 1 a verdict failed (report still emitted),
2 usage or input error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from fractions import Fraction
from typing import Optional

import numpy as np

from .errors import LGToricError
from .critsolve import SolverConfig, lift_tadic, solve_critical
from .frobenius import floer_algebra, residue_pairings, sum_formula_check, trace_z
from .novikov import format_rational, format_series, rational
from .polytope import load_toric, primitive_collections, vertices_and_rank
from .potential import (
    build_potential,
    custom_potential_from_document,
    log_derivatives,
)
from .qh import c1_eigen_check, multiset_match, qsr_identity_check, qsr_relations
from .verify import Verdict, full_battery, model_suite

SCHEMA = 1


# ---------------------------------------------------------------------------
# deterministic serialization
# ---------------------------------------------------------------------------

def _fmt_float(x: float) -> str:
    if x != x or x in (float("inf"), float("-inf")):
        return f'"{x}"'
    s = f"{x:.17g}"
    return s if ("." in s or "e" in s or "E" in s) else s + ".0"


def _encode(obj, out: list[str]) -> None:
    if obj is None:
        out.append("null")
    elif isinstance(obj, bool):
        out.append("true" if obj else "false")
    elif isinstance(obj, int):
        out.append(str(obj))
    elif isinstance(obj, float):
        out.append(_fmt_float(obj))
    elif isinstance(obj, complex):
        out.append("[")
        out.append(_fmt_float(obj.real))
        out.append(", ")
        out.append(_fmt_float(obj.imag))
        out.append("]")
    elif isinstance(obj, Fraction):
        out.append(json.dumps(format_rational(obj)))
    elif isinstance(obj, str):
        out.append(json.dumps(obj))
    elif isinstance(obj, dict):
        out.append("{")
        for i, (k, v) in enumerate(obj.items()):
            if i:
                out.append(", ")
            out.append(json.dumps(str(k)))
            out.append(": ")
            _encode(v, out)
        out.append("}")
    elif isinstance(obj, (list, tuple)):
        out.append("[")
        for i, v in enumerate(obj):
            if i:
                out.append(", ")
            _encode(v, out)
        out.append("]")
    elif isinstance(obj, (np.floating,)):
        out.append(_fmt_float(float(obj)))
    elif isinstance(obj, (np.integer,)):
        out.append(str(int(obj)))
    elif isinstance(obj, (np.complexfloating,)):
        _encode(complex(obj), out)
    elif isinstance(obj, np.ndarray):
        _encode(obj.tolist(), out)
    else:
        raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps_report(report: dict) -> str:
    out: list[str] = []
    _encode(report, out)
    return "".join(out)


def report_to_csv(report: dict) -> str:
    """Flatten the verdict list (or a tabular section) to CSV."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    if report.get("verdicts"):
        w.writerow(["name", "pass", "residual", "tolerance"])
        for v in report["verdicts"]:
            w.writerow([
                v["name"],
                "pass" if v["pass"] else "fail",
                f"{v['residual']:.17g}",
                f"{v['tolerance']:.17g}",
            ])
    elif "rows" in report.get("sections", {}):
        rows = report["sections"]["rows"]
        if rows:
            w.writerow(list(rows[0].keys()))
            for r in rows:
                w.writerow([_csv_cell(x) for x in r.values()])
    return buf.getvalue()


def _csv_cell(x):
    if isinstance(x, float):
        return f"{x:.17g}"
    if isinstance(x, complex):
        return f"{x.real:.17g}{x.imag:+.17g}j"
    if isinstance(x, Fraction):
        return format_rational(x)
    if isinstance(x, (list, tuple)):
        return ";".join(str(_csv_cell(v)) for v in x)
    return x


# ---------------------------------------------------------------------------
# shared option plumbing
# ---------------------------------------------------------------------------

def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--model", help="built-in model name, e.g. cpn(2), f2(1/4)")
    p.add_argument("--input", help="JSON model or custom-potential document")
    p.add_argument("--t", default="0.05,0.1,0.2",
                   help="comma-separated T samples in (0,1)")
    p.add_argument("--u", help="basepoint, comma-separated rationals p/q")
    p.add_argument("--bulk", action="append", default=[],
                   metavar="J=RE,IM", help="bulk weight on facet J (1-based)")
    p.add_argument("--alpha", help="parameter for f2/s2xs2 given bare names")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--cutoff", help="series display/lift cutoff p/q")
    p.add_argument("--starts", type=int, help="Newton multistart count")
    p.add_argument("--format", choices=["json", "csv"], default="json")
    p.add_argument("--tol", type=float, default=1e-8,
                   help="comparison tolerance for verdict commands")


def _parse_t(arg: str) -> tuple[float, ...]:
    try:
        ts = tuple(float(x) for x in arg.split(","))
    except ValueError as err:
        raise LGToricError(f"bad --t list: {arg!r}") from err
    return ts


def _parse_bulk(args) -> list[tuple[int, complex]]:
    out = []
    for item in args.bulk:
        try:
            j, val = item.split("=")
            re_s, im_s = val.split(",")
            out.append((int(j) - 1, complex(float(re_s), float(im_s))))
        except ValueError as err:
            raise LGToricError(f"bad --bulk entry {item!r}") from err
    return out


def _resolve(args):
    """(toric data or None, potential) from --model/--input and overrides."""
    if bool(args.model) == bool(args.input):
        raise LGToricError("exactly one of --model or --input is required")
    if args.input:
        with open(args.input) as fh:
            doc = json.load(fh)
        if "terms" in doc:
            return None, custom_potential_from_document(doc)
        td = load_toric(doc)
    else:
        name = args.model
        if args.alpha and "(" not in name:
            name = f"{name}({args.alpha})"
        td = load_toric(name)
    u = tuple(rational(x) for x in args.u.split(",")) if args.u else None
    bulk = _parse_bulk(args) or None
    po = build_potential(td, u=u, bulk=bulk)
    return td, po


def _base_report(command: str, args, model_name: str) -> dict:
    return {
        "schema": SCHEMA,
        "command": command,
        "model": model_name,
        "parameters": {
            "t_samples": list(_parse_t(args.t)),
            "seed": args.seed,
            "cutoff": args.cutoff or "inf",
            "starts": args.starts,
            "tol": args.tol,
        },
        "sections": {},
        "verdicts": [],
    }


def _solver_cfg(args) -> SolverConfig:
    return SolverConfig(
        t_samples=_parse_t(args.t), seed=args.seed, starts=args.starts
    )


def _point_dict(p) -> dict:
    return {
        "valuation": [format_rational(v) for v in p.valuation],
        "interior": p.interior,
        "nondegenerate": p.nondegenerate,
        "samples": {
            repr(t): [complex(z) for z in y] for t, y in sorted(p.samples.items())
        },
        "hess_det": {repr(t): p.hess_det[t] for t in sorted(p.hess_det)},
        "crit_value": {repr(t): p.crit_value[t] for t in sorted(p.crit_value)},
        "lifted": None if p.lifted is None else [
            format_series(s) for s in p.lifted
        ],
    }


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def _cmd_info(args) -> tuple[dict, bool]:
    td, po = _resolve(args)
    rep = _base_report("info", args, td.name if td else "custom")
    if td is None:
        rep["sections"]["potential"] = str(po.poly)
        return rep, True
    verts, rank = vertices_and_rank(td)
    rep["sections"]["facets"] = [
        {"normal": list(v), "lambda": l}
        for v, l in zip(td.normals, td.offsets)
    ]
    rep["sections"]["vertices"] = [[x for x in v] for v in verts]
    rep["sections"]["rank"] = rank
    rep["sections"]["basepoint"] = list(td.basepoint)
    rep["sections"]["primitive_collections"] = [
        {
            "members": [i + 1 for i in pc.members],
            "cone_support": [j + 1 for j in pc.cone_support],
            "multipliers": list(pc.multipliers),
            "omega": pc.omega,
        }
        for pc in primitive_collections(td)
    ]
    return rep, True


def _cmd_potential(args) -> tuple[dict, bool]:
    td, po = _resolve(args)
    rep = _base_report("potential", args, td.name if td else "custom")
    cut = rational(args.cutoff) if args.cutoff else None
    rows = []
    for k, c in po.poly.terms:
        shown = c.truncate(cut) if cut is not None else c
        rows.append({"powers": list(k), "coeff": format_series(shown)})
    rep["sections"]["kind"] = po.kind
    if po.basepoint is not None:
        rep["sections"]["basepoint"] = list(po.basepoint)
    rep["sections"]["rows"] = rows
    rep["sections"]["log_derivatives"] = [
        str(d) for d in log_derivatives(po)
    ]
    return rep, True


def _cmd_critical(args) -> tuple[dict, bool]:
    td, po = _resolve(args)
    rep = _base_report("critical", args, td.name if td else "custom")
    points = solve_critical(po, _solver_cfg(args))
    if args.cutoff:
        order = rational(args.cutoff)
        for p in points:
            if p.nondegenerate:
                lift_tadic(po, p, order)
    rep["sections"]["count"] = len(points)
    rep["sections"]["interior_count"] = sum(p.interior for p in points)
    rep["sections"]["points"] = [_point_dict(p) for p in points]
    return rep, True


def _cmd_residue(args) -> tuple[dict, bool]:
    td, po = _resolve(args)
    rep = _base_report("residue", args, td.name if td else "custom")
    cfg = _solver_cfg(args)
    points = solve_critical(po, cfg)
    interior = [p for p in points if p.interior]
    rows = []
    worst = 0.0
    for t in cfg.t_samples:
        for i, p in enumerate(interior):
            simp, zb = residue_pairings(p, po, t)
            dev = abs(simp - zb) / abs(simp)
            worst = max(worst, dev)
            rows.append({
                "t": t, "point": i,
                "simplified": simp, "z_based": zb, "deviation": dev,
            })
    rep["sections"]["rows"] = rows
    rep["verdicts"].append(
        _vd("residue.two_routes_agree", worst, args.tol)
    )
    ok = all(v["pass"] for v in rep["verdicts"])
    return rep, ok


def _cmd_ztrace(args) -> tuple[dict, bool]:
    td, po = _resolve(args)
    rep = _base_report("z-trace", args, td.name if td else "custom")
    cfg = _solver_cfg(args)
    points = solve_critical(po, cfg)
    interior = [p for p in points if p.interior]
    rows = []
    worst = 0.0
    t = cfg.t_samples[len(cfg.t_samples) // 2]
    for i, p in enumerate(interior):
        z = trace_z(floer_algebra(p, po, t))
        det = p.hess_det[t]
        dev = abs(z - det) / abs(det)
        worst = max(worst, dev)
        rows.append({"t": t, "point": i, "trace_z": z, "hess_det": det,
                     "deviation": dev})
    rep["sections"]["rows"] = rows
    sf = sum_formula_check(points, po, t)
    rep["verdicts"].append(_vd("ztrace.equals_hessian_det", worst, args.tol))
    rep["verdicts"].append(_vd("ztrace.sum_formula", sf, 1e-9))
    ok = all(v["pass"] for v in rep["verdicts"])
    return rep, ok


def _cmd_qsr(args) -> tuple[dict, bool]:
    td, po = _resolve(args)
    if td is None:
        raise LGToricError("qsr needs a toric model")
    rep = _base_report("qsr", args, td.name)
    pres = qsr_relations(td)
    rep["sections"]["relations"] = pres.relation_strings()
    qpo = build_potential(td, kind="leading-order")
    res = qsr_identity_check(td, qpo, trials=100, seed=args.seed)
    rep["verdicts"].append(_vd("qsr.identity", res, 1e-12))
    ok = all(v["pass"] for v in rep["verdicts"])
    return rep, ok


def _cmd_c1check(args) -> tuple[dict, bool]:
    td, po = _resolve(args)
    if td is None:
        raise LGToricError("c1check needs a toric model")
    rep = _base_report("c1check", args, td.name)
    cfg = _solver_cfg(args)
    points = solve_critical(po, cfg)
    ok_all = True
    for t in (0.05, 0.1):
        eigs, crit, _ = c1_eigen_check(td, t, points=points)
        _, worst = multiset_match(eigs, crit)
        rep["sections"][f"eigenvalues_qh(t={t})"] = sorted(
            eigs, key=lambda z: (round(z.real, 10), round(z.imag, 10))
        )
        rep["sections"][f"critical_values(t={t})"] = sorted(
            crit, key=lambda z: (round(z.real, 10), round(z.imag, 10))
        )
        v = _vd(f"c1.multiset_match(t={t})", worst, args.tol)
        rep["verdicts"].append(v)
        ok_all = ok_all and v["pass"]
    return rep, ok_all


def _cmd_verify(args) -> tuple[dict, bool]:
    rep = _base_report("verify", args, args.model or "all")
    ts = _parse_t(args.t)
    if args.model:
        name = args.model
        if args.alpha and "(" not in name:
            name = f"{name}({args.alpha})"
        verdicts, sec = model_suite(
            name, seed=args.seed, t_samples=ts, starts=args.starts
        )
        sections = {name: sec}
    else:
        verdicts, sections = full_battery(seed=args.seed, t_samples=ts)
    for name, sec in sections.items():
        if isinstance(sec, dict) and "points" in sec:
            rep["sections"][name] = {
                "rank": sec["rank"],
                "interior_count": sec["interior_count"],
                "points": [_point_dict(p) for p in sec["points"]],
            }
    rep["verdicts"] = [v.as_dict() for v in verdicts]
    return rep, all(v.passed for v in verdicts)


def _vd(name: str, residual: float, tol: float) -> dict:
    return Verdict(name, residual <= tol, float(residual), float(tol)).as_dict()


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------

_COMMANDS = {
    "info": _cmd_info,
    "potential": _cmd_potential,
    "critical": _cmd_critical,
    "residue": _cmd_residue,
    "z-trace": _cmd_ztrace,
    "qsr": _cmd_qsr,
    "c1check": _cmd_c1check,
    "verify": _cmd_verify,
}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="lgtoric",
        description="Toric Landau-Ginzburg potentials over the Novikov "
                    "field: critical points and mirror-symmetry checks.",
    )
    sub = ap.add_subparsers(dest="command", required=True)
    for name in _COMMANDS:
        p = sub.add_parser(name)
        _add_common(p)
    return ap


def main(argv: Optional[list[str]] = None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as err:
        return 2 if err.code not in (0, None) else 0
    try:
        report, ok = _COMMANDS[args.command](args)
    except (LGToricError, OSError, json.JSONDecodeError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    if args.format == "csv":
        sys.stdout.write(report_to_csv(report))
    else:
        sys.stdout.write(dumps_report(report) + "\n")
    return 0 if ok else 1


if __name__ == "__main__":
    raise SystemExit(main())
