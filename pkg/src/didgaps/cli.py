"""Command-line front end: ``didgaps <subcommand> [flags]``.

Every subcommand renders markdown (default), JSON or CSV. Floats are printed
with 12 significant digits and JSON keys are sorted, so identical invocations
give byte-identical output. Domain errors exit with status 2.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from typing import Callable

import numpy as np

from didgaps import extremity as ext
from didgaps import levy_interval as li
from didgaps import semigroup as sgm
from didgaps import series as ser
from didgaps import simulator as sim
from didgaps.errors import ContainmentError, DomainError, LeftExtremityError

SUBCOMMANDS = ("semigroup", "table", "pmf", "root", "did", "intervals", "extremity", "simulate", "paper-examples")


def fmt(x) -> str:
    if isinstance(x, bool) or x is None:
        return json.dumps(x)
    if isinstance(x, (float, np.floating)):
        return f"{float(x):.12g}"
    return str(x)


def _round(obj):
    if isinstance(obj, bool) or obj is None:
        return obj
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if not math.isfinite(x):
            return None
        return float(f"{x:.12g}")
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, dict):
        return {str(k): _round(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round(v) for v in obj]
    return obj


def render_json(obj) -> str:
    return json.dumps(_round(obj), sort_keys=True, indent=2) + "\n"


def render_csv(header: list[str], rows: list[list]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([fmt(v) for v in r])
    return buf.getvalue()


def render_markdown(header: list[str], rows: list[list], title: str | None = None) -> str:
    lines = [f"## {title}", ""] if title else []
    lines.append("| " + " | ".join(header) + " |")
    lines.append("|" + "---|" * len(header))
    for r in rows:
        lines.append("| " + " | ".join(fmt(v) for v in r) + " |")
    return "\n".join(lines) + "\n"


def render(fmt_name: str, payload, header: list[str], rows: list[list], title: str | None = None) -> str:
    if fmt_name == "json":
        return render_json(payload)
    if fmt_name == "csv":
        return render_csv(header, rows)
    return render_markdown(header, rows, title)


# ---- flag parsing --------------------------------------------------------


def int_list(text: str) -> list[int]:
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def float_list(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def weights(text: str) -> dict[float, float]:
    """``y1:q1,y2:q2`` -> ``{y1: q1, y2: q2}``."""
    out = {}
    try:
        for item in text.split(","):
            y, q = item.split(":")
            out[float(y)] = float(q)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected y:q pairs, got {text!r}")
    return out


def _jump_law(args) -> dict[float, float]:
    if args.q is not None:
        return args.q
    if args.gens:
        return {float(g): 1.0 / len(set(args.gens)) for g in set(args.gens)}
    raise DomainError("give the jump law with --q y:q,... or --gens a,b,...")


def _cp_spec(args) -> ser.CompoundPoissonSpec:
    law = _jump_law(args)
    if any(y != int(y) for y in law):
        raise DomainError("integer jump sizes required")
    return ser.CompoundPoissonSpec(args.lam, {int(y): q for y, q in law.items()}, args.t)


def _pmf_from_args(args) -> np.ndarray:
    if args.pmf is not None:
        return np.asarray(args.pmf, dtype=float)
    return ser.compound_poisson_pmf(_cp_spec(args), args.K)


# ---- subcommands ---------------------------------------------------------


def cmd_semigroup(args) -> str:
    report = sgm.gap_report(sgm.semigroup(args.gens), args.slack)
    d = report.to_dict()
    rows = [[k, ",".join(map(str, v)) if isinstance(v, list) and k != "gap_runs" else v] for k, v in d.items()]
    rows = [[k, " ".join(f"({a},{b})" for a, b in v) if k == "gap_runs" else v] for k, v in rows]
    return render(args.format, d, ["field", "value"], rows, f"semigroup generated by {args.gens}")


def cmd_table(args) -> str:
    rows = [[n, ",".join(map(str, sgm.jump_count_values(args.gens, n)))] for n in range(args.rows)]
    payload = {"generators": sorted(set(args.gens)), "rows": [{"n": n, "values": sgm.jump_count_values(args.gens, n)} for n in range(args.rows)]}
    return render(args.format, payload, ["N(t)", "X(t)"], rows, f"values of X(t) by number of jumps, gens {args.gens}")


def cmd_pmf(args) -> str:
    spec = _cp_spec(args)
    pmf = ser.compound_poisson_pmf(spec, args.K)
    sg = sgm.semigroup(spec.jump_sizes)
    rows = ser.pmf_rows(pmf, sg)
    return render(args.format, rows, ["n", "p_n", "member_of_semigroup"], [list(r.values()) for r in rows], "compound Poisson PMF")


def cmd_root(args) -> str:
    pmf = _pmf_from_args(args)
    root = ser.nth_root(pmf, args.n)
    same = ser.support_indices(root) == ser.support_indices(pmf)
    rows = [[k, p, r] for k, (p, r) in enumerate(zip(pmf, root))]
    payload = {"n": args.n, "pmf": pmf.tolist(), "root": root.tolist(), "support_equal": same, "min_root": float(root.min())}
    out = render(args.format, payload, ["k", "p_k", f"root_{args.n}"], rows, f"{args.n}-th convolution root")
    if args.format == "markdown":
        out += f"\nsupport equal: {fmt(same)}\n"
    return out


def cmd_did(args) -> str:
    verdict = ser.did_test(_pmf_from_args(args), args.tol, order=args.K if args.pmf is not None else None)
    d = verdict.to_dict()
    rows = [[k, v if not isinstance(v, dict) else " ".join(f"{j}:{fmt(q)}" for j, q in v.items())] for k, v in d.items()]
    return render(args.format, d, ["field", "value"], rows, "discrete infinite divisibility")


def cmd_intervals(args) -> str:
    rep = li.interval_gaps(args.c, args.delta)
    payload = rep.to_dict()
    rows = [["(0)", rep.initial_gap[0], rep.initial_gap[1], rep.initial_gap[1] - rep.initial_gap[0]]]
    rows += [[k, lo, hi, length] for k, (lo, hi, length) in enumerate(rep.gaps, 1)]
    if args.D is not None:
        cells = li.discrete_gap_cells(args.c, args.delta, args.D)
        union = rep.union()
        payload["discretization"] = {
            "D": args.D,
            "generators": list(li.rational_discretize(args.c, args.delta, args.D)),
            "gap_cells": [list(c) for c in cells],
            "contained": li.cells_within(cells, union),
            "symmetric_difference": li.symmetric_difference_measure(cells, union),
        }
    out = render(args.format, payload, ["k", "lo", "hi", "length"], rows, f"gaps of the closure of [{fmt(args.c)}, {fmt(args.c + args.delta)}]")
    if args.format == "markdown":
        out += f"\ncount: {fmt(rep.count)}\ntail_start: {fmt(rep.tail_start)}\n"
        if args.D is not None:
            d = payload["discretization"]
            out += f"D={args.D}: contained {fmt(d['contained'])}, symmetric difference {fmt(d['symmetric_difference'])}\n"
    return out


def _laplace_spec(args) -> ext.LaplaceSpec:
    jumps = interval = None
    if args.c is not None:
        interval = (args.c, args.delta or 0.0)
    elif args.q is not None or args.gens:
        jumps = _jump_law(args)
    gamma = tuple(args.gamma) if args.gamma else None
    if gamma is not None and len(gamma) != 2:
        raise DomainError("--gamma takes shape,rate")
    rate = args.lam if (jumps or interval) else 0.0
    return ext.LaplaceSpec(drift=args.ell, rate=rate, jumps=jumps, interval=interval, gamma=gamma)


def cmd_extremity(args) -> str:
    spec = _laplace_spec(args)
    if args.n > 1:
        spec = ext.convolution_root(spec, args.n)
    est = ext.left_extremity_estimate(spec)
    if args.format == "csv":
        return est.to_csv()
    payload = {
        "estimate": est.estimate,
        "raw": est.raw,
        "monotone": est.monotone,
        "n": args.n,
        "diagnostics": [{"theta": t, "phi": p, "g": g, "running_estimate": r} for t, p, g, r in zip(est.thetas, est.phi, est.g, est.running)],
    }
    if spec.finite_measure and spec.drift == 0:
        payload["mass_at_zero"] = ext.mass_at_zero(spec)
    rows = [[t, p, g, r] for t, p, g, r in zip(est.thetas, est.phi, est.g, est.running)]
    out = render(args.format, payload, ["theta", "phi", "g", "running_estimate"], rows, "left extremity")
    if args.format == "markdown":
        out += f"\nestimate: {fmt(est.estimate)}\nmonotone: {fmt(est.monotone)}\n"
    return out


def cmd_simulate(args) -> str:
    times = tuple(args.times) if args.times else (args.t,)
    if args.c is not None:
        law = sim.IntervalJumpLaw(args.lam, args.c, args.delta or 0.0)
        predicted = li.semigroup_closure(li.IntervalSet.from_intervals([(args.c, args.c + (args.delta or 0.0))]))
        horizon = None
    else:
        law = _cp_spec(args)
        predicted = sgm.semigroup(law.jump_sizes)
        horizon = args.horizon if args.horizon is not None else predicted.span * (predicted.conductor + 5)
    config = sim.SimulationConfig(law, times, args.samples, args.seed)
    real = sim.sample(config)
    if args.spill:
        with open(args.spill, "w") as fh:
            fh.write(sim.realizations_csv(real))
    report = sim.empirical_support_check(real, predicted, horizon, strict=False)
    payload = report.to_dict()
    rows = [[t, len(v), report.coverage.get(t)] for t, v in real.items()]
    out = render(args.format, payload, ["t", "samples", "coverage"], rows, "simulated support check")
    if args.format == "markdown":
        out += f"\ncontainment: {fmt(report.containment)}\ngap_hits: {report.gap_hits}\n"
    if not report.containment:
        raise ContainmentError(report.violations)
    return out


# ---- worked examples ------------------------------------------------------


def _worked_checks() -> list[tuple[str, Callable[[], bool]]]:
    def gaps(gens):
        return list(sgm.semigroup(gens).gaps)

    tables = {
        (1, 3): [{0}, {1, 3}, {2, 4, 6}, {3, 5, 7, 9}, {4, 6, 8, 10, 12}, {5, 7, 9, 11, 13, 15}],
        (2, 3): [{0}, {2, 3}, {4, 5, 6}, {6, 7, 8, 9}, {8, 9, 10, 11, 12}],
        (3, 7): [{0}, {3, 7}, {6, 10, 14}, {9, 21, 13, 17}, {12, 28, 20, 16, 24}],
        (4, 9): [{0}, {4, 9}, {8, 13, 18}, {12, 17, 22, 27}, {16, 21, 26, 31, 36}],
    }

    def table(gens):
        return all(set(sgm.jump_count_values(gens, n)) == row for n, row in enumerate(tables[gens]))

    def four_nine_prefix():
        sg = sgm.semigroup([4, 9])
        return sg.members(23) == [0, 4, 8, 9, 12, 13, 16, 17, 18, 20, 21, 22] and sg.conductor == 24

    def lattice_geometric():
        p, k, K = 0.5, 3, 30
        shifted = np.zeros(K + 1)
        shifted[0::k] = p * (1 - p) ** np.arange(len(shifted[0::k]))
        v = ser.did_test(shifted)
        original = np.concatenate([[0.0], shifted[:-1]])
        try:
            ser.nth_root(original, 2)
            refused = False
        except LeftExtremityError:
            refused = True
        return v.is_did and all(j % k == 0 for j in v.jump_pmf) and refused

    def interval_case():
        r = li.interval_gaps(1.0, 0.3)
        lengths = [g[2] for g in r.gaps]
        return r.count == 3 and all(abs(a - b) <= 1e-12 for a, b in zip(lengths, [0.7, 0.4, 0.1])) and abs(r.tail_start - 4) <= 1e-12

    def root_extremity():
        root = ext.convolution_root(ext.LaplaceSpec(drift=3, rate=2, jumps={1: 1.0}), 3)
        return abs(root.drift - 1) <= 1e-15 and abs(root.rate - 2 / 3) <= 1e-15

    def mass0():
        return abs(ext.mass_at_zero(ext.LaplaceSpec(rate=2, jumps={1: 1.0}), 4) - math.exp(-0.5)) <= 1e-15

    return [
        ("gens {1,3} have no gaps", lambda: gaps([1, 3]) == []),
        ("gens {2,3} omit {1}", lambda: gaps([2, 3]) == [1]),
        ("gens {3,7} omit {1,2,4,5,8,11}", lambda: gaps([3, 7]) == [1, 2, 4, 5, 8, 11]),
        ("gens {4,9} support 0,4,8,9,12,13,16,17,18,20,21,22,24,...", four_nine_prefix),
        ("value table for gens {1,3}, n = 0..5", lambda: table((1, 3))),
        ("value table for gens {2,3}, n = 0..4", lambda: table((2, 3))),
        ("value table for gens {3,7}, n = 0..4", lambda: table((3, 7))),
        ("value table for gens {4,9}, n = 0..4", lambda: table((4, 9))),
        ("p/(1-(1-p)s^3) is DID with jumps on 3Z; unshifted law refused", lattice_geometric),
        ("span gap-free: gens {5,10} reduce to {1,2}, span 5", lambda: sgm.is_gap_free([5, 10]) and sgm.normalize([5, 10]) == (5, (1, 2))),
        ("interval jumps c=1, delta=0.3 gives 3 gaps of length 0.7, 0.4, 0.1, tail at 4", interval_case),
        ("root extremity: drift 3, rate 2, n=3 gives drift 1, rate 2/3", root_extremity),
        ("mass at zero: rate 2, n=4 gives exp(-1/2)", mass0),
    ]


def cmd_worked_examples(args) -> tuple[int, str]:
    results = []
    for name, check in _worked_checks():
        try:
            ok = bool(check())
        except Exception as exc:  # a crash is a failure, reported not raised
            ok = False
            name = f"{name} [{type(exc).__name__}: {exc}]"
        results.append((name, ok))
    if args.format == "json":
        text = render_json([{"check": n, "pass": ok} for n, ok in results])
    elif args.format == "csv":
        text = render_csv(["check", "pass"], [[n, ok] for n, ok in results])
    else:
        text = "".join(f"{'PASS' if ok else 'FAIL'}  {n}\n" for n, ok in results)
        text += f"\n{sum(ok for _, ok in results)}/{len(results)} passed\n"
    return (0 if all(ok for _, ok in results) else 1), text


# ---- parser --------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="didgaps", description=__doc__.splitlines()[0])
    parser.add_argument("--batch", metavar="FILE", help="JSON file with a list of requests to run in order")
    sub = parser.add_subparsers(dest="subcommand")

    def add(name, help_):
        p = sub.add_parser(name, help=help_)
        p.add_argument("--format", choices=("markdown", "json", "csv"), default="markdown")
        return p

    def jump_flags(p):
        p.add_argument("--gens", type=int_list, help="jump sizes, uniform weights")
        p.add_argument("--q", type=weights, help="jump law y1:q1,y2:q2,...")
        p.add_argument("--lambda", dest="lam", type=float, default=1.0)
        p.add_argument("--t", type=float, default=1.0)

    p = add("semigroup", "gaps, conductor and Frobenius number")
    p.add_argument("--gens", type=int_list, required=True)
    p.add_argument("--slack", type=int)

    p = add("table", "values of X(t) reachable with exactly n jumps")
    p.add_argument("--gens", type=int_list, required=True)
    p.add_argument("--rows", type=int, default=6, help="number of rows, n = 0..rows-1")

    p = add("pmf", "compound Poisson PMF by Panjer recursion")
    jump_flags(p)
    p.add_argument("--K", type=int, default=30)

    for name, help_ in (("root", "n-th convolution root of a PMF"), ("did", "discrete infinite divisibility test")):
        p = add(name, help_)
        jump_flags(p)
        p.add_argument("--pmf", type=float_list, help="explicit PMF prefix p0,p1,... instead of a compound Poisson law")
        p.add_argument("--K", type=int, default=30)
        if name == "root":
            p.add_argument("--n", type=int, default=2)
        else:
            p.add_argument("--tol", type=float, default=ser.DID_TOL)

    p = add("intervals", "gaps of the closure of a Levy support [c, c + delta]")
    p.add_argument("--c", type=float, required=True)
    p.add_argument("--delta", type=float, required=True)
    p.add_argument("--D", type=int, help="also compare with the 1/D lattice discretization")

    p = add("extremity", "left extremity from the Laplace transform")
    jump_flags(p)
    p.add_argument("--ell", type=float, default=0.0, help="drift (left extremity)")
    p.add_argument("--c", type=float, help="interval jump law [c, c + delta]")
    p.add_argument("--delta", type=float)
    p.add_argument("--gamma", type=float_list, help="gamma component shape,rate")
    p.add_argument("--n", type=int, default=1, help="take the n-th convolution root first")

    p = add("simulate", "Monte Carlo check of the predicted support")
    jump_flags(p)
    p.add_argument("--times", type=float_list, help="several times t1,t2,...")
    p.add_argument("--c", type=float, help="interval jump law [c, c + delta]")
    p.add_argument("--delta", type=float)
    p.add_argument("--samples", type=int, default=10_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--horizon", type=int)
    p.add_argument("--spill", metavar="CSV", help="write realizations (t, value) to this file")

    add("paper-examples", "check the worked examples and tables")
    return parser


HANDLERS = {
    "semigroup": cmd_semigroup,
    "table": cmd_table,
    "pmf": cmd_pmf,
    "root": cmd_root,
    "did": cmd_did,
    "intervals": cmd_intervals,
    "extremity": cmd_extremity,
    "simulate": cmd_simulate,
}


def request_to_argv(request: dict) -> list[str]:
    """``{"subcommand": ..., "parameters": {...}, "output_format": ...}`` -> argv."""
    if "argv" in request:
        return [str(a) for a in request["argv"]]
    argv = [request["subcommand"]]
    for key, value in request.get("parameters", {}).items():
        flag = "--" + ("lambda" if key in ("lambda", "lam") else key)
        if isinstance(value, (list, tuple)):
            value = ",".join(map(str, value))
        elif isinstance(value, dict):
            value = ",".join(f"{k}:{v}" for k, v in value.items())
        argv += [flag, str(value)]
    if "output_format" in request:
        argv += ["--format", request["output_format"]]
    return argv


def run(argv: list[str] | None = None) -> tuple[int, str, str]:
    """Parse and execute; returns ``(exit_code, stdout, stderr)``."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0), "", ""
    if args.batch:
        if args.subcommand:
            return 2, "", "--batch cannot be combined with a subcommand\n"
        try:
            with open(args.batch) as fh:
                requests = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            return 2, "", f"cannot read batch file: {exc}\n"
        code, out, err = 0, [], []
        for req in requests:
            c, o, e = run(request_to_argv(req))
            code = max(code, c)
            out.append(o)
            err.append(e)
        return code, "".join(out), "".join(err)
    if not args.subcommand:
        return 2, "", parser.format_usage()
    try:
        if args.subcommand == "paper-examples":
            code, text = cmd_worked_examples(args)
            return code, text, ""
        return 0, HANDLERS[args.subcommand](args), ""
    except ContainmentError as exc:
        return 1, "", f"error: {exc}\n"
    except DomainError as exc:
        return 2, "", f"error: {exc}\n"


def main(argv: list[str] | None = None) -> int:
    code, out, err = run(argv)
    sys.stdout.write(out)
    sys.stderr.write(err)
    return code


if __name__ == "__main__":
    sys.exit(main())
