"""
Command-line front end.

Each command writes ``<out>/manifest.json`` plus its data tables
(``result.csv``/``result.json`` and, for some commands, extra tables) and
exits with

    0  success
    1  usage, parse or precondition error
    2  optimizer did not reach its tolerance
    3  input file violates model or tick invariants
    4  scan found a violation candidate
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import __version__
from .bounds import NotDominantError, buyhold_gap_bounds, rebalance_horizon
from .conjecture import VIOLATION, GeneratorSpec, counterexample_search, maximality_scan
from .elg import DEFAULT_MAX_ITERS, DEFAULT_TOL, find_dominant, optimize_elg
from .ingest import (
    GapRow,
    TickDataError,
    TickFormatError,
    empirical_gap_curve,
    empirical_model,
    load_ticks,
    realized_returns,
    sliding_dominance,
    synthetic_ticks,
    write_ticks,
)
from .model import DEFAULT_BUDGET, BudgetExceeded, ModelError, ModelFormatError, dump_model, load_model
from .tables import manifest, write_json, write_table

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_NONCONVERGED = 2
EXIT_INVALID_INPUT = 3
EXIT_VIOLATION = 4


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def int_list(text: str) -> list[int]:
    """``"5"``, ``"1-10"`` or ``"1,2,5"`` (ranges allowed inside lists)."""
    out = []
    for part in text.split(","):
        part = part.strip()
        if "-" in part:
            lo, hi = part.split("-", 1)
            out.extend(range(int(lo), int(hi) + 1))
        elif part:
            out.append(int(part))
    if not out:
        raise argparse.ArgumentTypeError(f"empty integer list {text!r}")
    return out


def float_list(text: str) -> list[float]:
    try:
        return [float(p) for p in text.split(",") if p.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a float list: {text!r}") from None


def _prepare(out) -> Path:
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _params(args) -> dict:
    return {k: v for k, v in sorted(vars(args).items()) if k != "func"}


# -- commands ---------------------------------------------------------------

def cmd_optimize(args) -> int:
    model = load_model(args.model)
    out = _prepare(args.out)
    res = optimize_elg(model, args.n, args.tol, args.max_iters, args.budget)
    dom = find_dominant(model)
    weight_cols = [f"weight_{a}" for a in model.asset_names]
    row = {"n": res.horizon, "value": res.value, "gradient_gap": res.gradient_gap,
           "iterations": res.iterations, "converged": res.converged}
    row.update(zip(weight_cols, res.weights.tolist()))
    write_table(out, "result", ["n", "value", "gradient_gap", "iterations", "converged"] + weight_cols,
                [row], {"assets": list(model.asset_names), "dominant_index": dom.dominant_index,
                        "ratio_matrix": dom.ratio_matrix.tolist()})
    write_json(out / "manifest.json", manifest("optimize", _params(args), None, [args.model]))
    if not res.converged:
        print(f"not converged: gap {res.gradient_gap:.3g} > tol {args.tol:.3g}", file=sys.stderr)
        return EXIT_NONCONVERGED
    return EXIT_OK


def cmd_bounds(args) -> int:
    rows = [buyhold_gap_bounds(args.kj, n).to_dict() for n in args.n]
    extra = {}
    if args.epsilon is not None:
        plan = rebalance_horizon(args.kj, args.epsilon)
        extra["plan"] = plan.to_dict()
    out = _prepare(args.out)
    write_table(out, "result", ["n", "k_j", "lower", "lower_tight", "upper"], rows, extra)
    if extra:
        write_table(out, "plan", ["epsilon", "k_j", "n_star"], [extra["plan"]])
    write_json(out / "manifest.json", manifest("bounds", _params(args), None))
    return EXIT_OK


def _scan_row(rank, rep, n_max):
    row = {"rank": rank, "trial": rep.provenance.get("trial"), "m": rep.model.m, "s": rep.model.s,
           "g1_star": rep.g1_star, "max_violation": rep.max_violation, "verdict": rep.verdict,
           "unconverged": len(rep.unconverged)}
    row.update({f"g{n}_star": g for n, g in zip(rep.horizons, rep.g_star)})
    return row


def cmd_scan(args) -> int:
    inputs = []
    if args.model:
        reports = [maximality_scan(load_model(args.model), args.n_max, args.tol, args.budget)]
        inputs.append(args.model)
    else:
        spec = GeneratorSpec((args.m_min, args.m_max), (args.s_min, args.s_max), args.bound)
        reports = counterexample_search(spec, args.trials, args.n_max, args.seed, args.tol,
                                        args.budget, args.top)
    out = _prepare(args.out)
    columns = ["rank", "trial", "m", "s", "g1_star", "max_violation", "verdict", "unconverged"]
    columns += [f"g{n}_star" for n in range(1, args.n_max + 1)]
    rows = [_scan_row(i, r, args.n_max) for i, r in enumerate(reports)]
    candidates = [r for r in reports if r.verdict == VIOLATION]
    write_table(out, "result", columns, rows,
                {"reports": [r.to_dict() for r in reports], "violation_candidates": len(candidates)})
    if candidates:
        cdir = _prepare(out / "candidates")
        for r in candidates:
            tag = r.provenance.get("trial", 0)
            dump_model(r.model, cdir / f"trial_{tag:06d}.json",
                       {"provenance": r.provenance, "max_violation": r.max_violation})
    write_json(out / "manifest.json", manifest("scan", _params(args), args.seed, inputs))
    print(f"{len(reports)} scanned, {len(candidates)} violation candidates", file=sys.stderr)
    if candidates:
        return EXIT_VIOLATION
    if any(r.unconverged for r in reports):
        return EXIT_NONCONVERGED
    return EXIT_OK


def cmd_backtest(args) -> int:
    ticks = load_ticks(args.ticks)
    for k in args.kj:
        if not 0.0 < k <= 1.0:
            raise UsageError(f"--kj values must lie in (0, 1], got {k}")
    x = realized_returns(ticks)
    model = empirical_model(x, args.r)
    dom = sliding_dominance(x, args.r, args.window)
    rows, g1 = [], None
    for k2 in args.kj:
        curve = empirical_gap_curve(x, args.r, [1.0 - k2, k2], args.n, args.samples, args.seed,
                                    args.budget, args.tol, model=model, g1_star=g1)
        g1 = curve[0].g1_star
        rows.extend(r.to_dict() for r in curve)
    out = _prepare(args.out)
    full = find_dominant(model)
    write_table(out, "result", GapRow.COLUMNS, rows,
                {"g1_star": g1, "tick_count": ticks.tick_count,
                 "dominant_index": full.dominant_index,
                 "ratio_matrix": full.ratio_matrix.tolist()})
    write_table(out, "dominance", ["k", "asset_ratio", "cash_ratio", "asset_dominant", "cash_dominant"],
                dom.rows(), {"window": dom.window, "r": dom.r, "start_index": dom.start_index,
                             "fractions": dom.fractions()})
    write_json(out / "manifest.json", manifest("backtest", _params(args), args.seed, [args.ticks]))
    return EXIT_OK


def cmd_synth_ticks(args) -> int:
    ticks = synthetic_ticks(args.count, args.log_mean, args.log_vol, args.seed, args.start_price, args.dt)
    out = _prepare(args.out)
    write_ticks(ticks, out / "ticks.csv")
    write_json(out / "manifest.json", manifest("synth-ticks", _params(args), args.seed))
    return EXIT_OK


# -- parser -----------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="elgfreq", description="Frequency-dependent expected log growth analysis.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    o = sub.add_parser("optimize", help="certified ELG maximization for one rebalancing period")
    o.add_argument("--model", required=True, help="model JSON file")
    o.add_argument("--n", type=int, default=1)
    o.add_argument("--tol", type=float, default=DEFAULT_TOL)
    o.add_argument("--max-iters", type=int, default=DEFAULT_MAX_ITERS)
    o.add_argument("--budget", type=int, default=DEFAULT_BUDGET)
    o.add_argument("--out", required=True)
    o.set_defaults(func=cmd_optimize)

    b = sub.add_parser("bounds", help="buy-and-hold gap bounds and rebalancing horizon")
    b.add_argument("--kj", type=float, required=True, help="weight on the dominant asset")
    b.add_argument("--n", type=int_list, default=int_list("1-10"), help="e.g. 10, 1-20 or 1,2,5")
    b.add_argument("--epsilon", type=float)
    b.add_argument("--out", required=True)
    b.set_defaults(func=cmd_bounds)

    s = sub.add_parser("scan", help="high-frequency maximality scan")
    s.add_argument("--model", help="scan a single model file instead of random models")
    s.add_argument("--n-max", type=int, default=4)
    s.add_argument("--trials", type=int, default=100)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--tol", type=float, default=DEFAULT_TOL)
    s.add_argument("--budget", type=int, default=DEFAULT_BUDGET)
    s.add_argument("--top", type=int)
    s.add_argument("--m-min", type=int, default=2)
    s.add_argument("--m-max", type=int, default=3)
    s.add_argument("--s-min", type=int, default=2)
    s.add_argument("--s-max", type=int, default=3)
    s.add_argument("--bound", type=float, default=0.8)
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_scan)

    t = sub.add_parser("backtest", help="tick replay: dominance series and gap curves")
    t.add_argument("--ticks", required=True, help="timestamp,price CSV")
    t.add_argument("--kj", type=float_list, default=float_list("0.25,0.5,0.75,0.9"),
                   help="stock weights K_2")
    t.add_argument("--n", type=int_list, default=int_list("1,2,3,5,10,20,50,100"))
    t.add_argument("--window", type=int, default=1000)
    t.add_argument("--r", type=float, default=0.0, help="riskless rate per tick")
    t.add_argument("--samples", type=int, default=10**4)
    t.add_argument("--seed", type=int, default=0)
    t.add_argument("--tol", type=float, default=DEFAULT_TOL)
    t.add_argument("--budget", type=int, default=DEFAULT_BUDGET)
    t.add_argument("--out", required=True)
    t.set_defaults(func=cmd_backtest)

    g = sub.add_parser("synth-ticks", help="write a synthetic geometric random walk tick file")
    g.add_argument("--count", type=int, default=100_000)
    g.add_argument("--log-mean", type=float, default=1e-8)
    g.add_argument("--log-vol", type=float, default=5e-5)
    g.add_argument("--start-price", type=float, default=100.0)
    g.add_argument("--dt", type=float, default=0.1)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out", required=True)
    g.set_defaults(func=cmd_synth_ticks)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ModelError, TickDataError) as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return EXIT_INVALID_INPUT
    except (ModelFormatError, TickFormatError, OSError, BudgetExceeded,
            NotDominantError, UsageError, ValueError) as exc:
        print(f"error: {exc}\nsee `elgfreq {args.command} --help`", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
