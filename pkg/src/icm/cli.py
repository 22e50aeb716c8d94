"""``icm`` command-line interface.

Exit status: 0 on success, 1 on invalid input, 2 when a check or search
finds a violation.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from fractions import Fraction
from typing import Sequence

from icm.bets import BetValidationError, bet_deltas, pooled_bet_build, pooled_bet_pairwise_decompose
from icm.core import EXACT, ICMError, NumericMode, equity, finish_matrix
from icm.fileformat import TournamentFileError, parse_tournament_file
from icm.search import SearchConfig, check_lemma, check_theorem, counterexample_search
from icm.simulate import DEFAULT_MAX_HANDS, SimulationConfig, compare_empirical_vs_icm, simulate_random_walk

EXIT_OK, EXIT_INVALID, EXIT_VIOLATION = 0, 1, 2
PLACES = 4


def num(value):
    """JSON form of a number: exact rationals as ``"p/q"`` strings."""
    if isinstance(value, Fraction):
        return str(value.numerator) if value.denominator == 1 else f"{value.numerator}/{value.denominator}"
    if isinstance(value, int):
        return value
    return float(value)


def fmt(value, places: int = PLACES) -> str:
    return f"{float(value):.{places}f}"


def signed(value, places: int = PLACES) -> str:
    return f"{float(value):+.{places}f}"


def int_range(text: str) -> tuple[int, int]:
    """``"4"`` or ``"3-6"``."""
    try:
        if "-" in text.strip("-"):
            lo, hi = text.split("-", 1)
            lo, hi = int(lo), int(hi)
        else:
            lo = hi = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected N or LO-HI, got {text!r}") from None
    if lo > hi:
        raise argparse.ArgumentTypeError(f"empty range {text!r}")
    return lo, hi


def table(header: Sequence[str], rows: Sequence[Sequence[str]]) -> str:
    widths = [max(len(str(r[c])) for r in [header, *rows]) for c in range(len(header))]
    lines = ["  ".join(str(h).rjust(w) if c else str(h).ljust(w) for c, (h, w) in enumerate(zip(header, widths)))]
    for row in rows:
        lines.append("  ".join(str(v).rjust(w) if c else str(v).ljust(w)
                               for c, (v, w) in enumerate(zip(row, widths))))
    return "\n".join(lines)


def ordinal(r: int) -> str:
    suffix = "th" if 10 <= r % 100 <= 20 else {1: "st", 2: "nd", 3: "rd"}.get(r % 10, "th")
    return f"{r}{suffix}"


def _mode(args) -> NumericMode:
    exact = getattr(args, "exact", False)
    tol = args.tolerance if args.tolerance is not None else 1e-9
    return NumericMode(exact=exact, tolerance=tol)


# -- commands ----------------------------------------------------------------

def cmd_dist(args):
    tf = parse_tournament_file(args.file)
    mode = _mode(args)
    fm = finish_matrix(tf.stacks, method="enumerate" if args.method == "enumerate" else "subset-dp", mode=mode)
    n = fm.n
    doc = {"players": tf.names, "mode": "exact" if mode.exact else "float", "method": args.method,
           "matrix": [[num(v) for v in row] for row in fm.entries]}
    rows = [[name, *(fmt(v) for v in fm.row(i))] for i, name in enumerate(tf.names)]
    text = table(["player", *(ordinal(r + 1) for r in range(n))], rows)
    return doc, text, EXIT_OK


def cmd_equity(args):
    tf = parse_tournament_file(args.file)
    mode = _mode(args)
    eq = equity(tf.stacks, tf.payout_structure, mode)
    doc = {"players": tf.names, "mode": "exact" if mode.exact else "float",
           "chips": list(tf.stacks.counts), "equity": [num(e) for e in eq]}
    rows = [[name, c, fmt(e)] for name, c, e in zip(tf.names, tf.stacks.counts, eq)]
    return doc, table(["player", "chips", "equity"], rows), EXIT_OK


def cmd_bet_ev(args):
    tf = parse_tournament_file(args.file)
    mode = _mode(args)
    res = bet_deltas(tf.stacks, tf.payout_structure, tf.bet_spec(), mode)
    rep = res.report
    roles = ["bettor" if p else "bystander" for p in rep.participants]
    doc = {
        "players": tf.names,
        "mode": "exact" if mode.exact else "float",
        "role": roles,
        "before": [num(v) for v in rep.before],
        "after": [num(v) for v in rep.after],
        "delta": [num(v) for v in rep.delta],
        "two_player_results_apply": res.theorem_applies,
        "violations": res.violations,
    }
    rows = [[name, role, fmt(b), fmt(a), signed(d)]
            for name, role, b, a, d in zip(tf.names, roles, rep.before, rep.after, rep.delta)]
    text = table(["player", "role", "before", "after", "delta"], rows)
    if res.theorem_applies:
        text += "\ntwo-player bet: " + ("bettors lose, bystanders gain" if res.ok
                                          else "; ".join(res.violations))
    return doc, text, EXIT_OK


def cmd_check(args):
    res = check_theorem(args.theorem, args.trials, args.seed, players=args.players, paid=args.paid,
                        outcomes=args.outcomes, payout_style=args.payouts, workers=args.workers)
    doc = {
        "theorem": args.theorem,
        "trials": res.trials,
        "checked": res.checked,
        "violations": [
            {"trial": t, "stacks": list(inst.stacks), "payouts": [num(m) for m in inst.payouts.prizes],
             "players": bad, "delta": [num(d) for d in rep.delta]}
            for t, inst, rep, bad in res.violations
        ],
    }
    text = f"theorem {args.theorem}: {res.checked} instances checked, {len(res.violations)} violations"
    return doc, text, EXIT_OK if res.ok else EXIT_VIOLATION


def cmd_lemma(args):
    ks = list(range(args.k[0], args.k[1] + 1))
    tol = args.tolerance if args.tolerance is not None else 1e-12
    res = check_lemma(ks, args.samples, args.seed, float_tolerance=tol, points=args.points)
    doc = {
        "k": ks,
        "samples": res.samples,
        "exact_nonzero_residuals": len(res.exact_nonzero),
        "float_max_abs_residual": res.float_max_abs,
        "float_tolerance": tol,
        "float_over_tolerance": len(res.float_over),
        "convexity_cases": res.convexity_cases,
        "convexity_failures": len(res.convexity_failures),
    }
    text = "\n".join([
        f"partial-fraction identity, k in {ks[0]}..{ks[-1]}: {res.samples} samples",
        f"  exact residuals nonzero: {len(res.exact_nonzero)}",
        f"  float max |residual|: {res.float_max_abs:.3e} (tolerance {tol:g}, {len(res.float_over)} over)",
        f"g_k grids ({args.points} points): {res.convexity_cases} cases, "
        f"{len(res.convexity_failures)} with a non-positive value or difference",
    ])
    return doc, text, EXIT_OK if res.ok else EXIT_VIOLATION


def _bet_doc(bet):
    return [{"prob": num(o.prob), "deltas": list(o.deltas)} for o in bet.outcomes]


def cmd_search(args):
    config = SearchConfig(participants=args.participants, players=args.players, paid=args.paid,
                          outcomes=args.outcomes, payout_style=args.payouts, trials=args.trials,
                          seed=args.seed, workers=args.workers, allow_busts=args.allow_busts,
                          min_bystanders=args.min_bystanders)
    found = counterexample_search(config)
    doc = {"trials": args.trials, "seed": args.seed, "found": len(found), "counterexamples": [
        {"trial": c.trial, "kinds": c.kinds, "stacks": list(c.stacks),
         "payouts": [num(m) for m in c.payouts.prizes], "participants": sorted(c.bet.participants),
         "outcomes": _bet_doc(c.bet), "before": [num(v) for v in c.report.before],
         "after": [num(v) for v in c.report.after], "delta": [num(v) for v in c.report.delta]}
        for c in found]}
    lines = [f"{len(found)} counterexamples in {args.trials} trials "
             f"({sum('theorem-1' in c.kinds for c in found)} bettor gains, "
             f"{sum('theorem-2' in c.kinds for c in found)} bystander losses)"]
    for c in found[:args.show]:
        deltas = " ".join(signed(d, 6) for d in c.report.delta)
        lines.append(f"  trial {c.trial}: {'/'.join(c.kinds)} stacks={list(c.stacks)} "
                     f"payouts={[num(m) for m in c.payouts.prizes]} bettors={sorted(c.bet.participants)} "
                     f"delta=[{deltas}]")
    return doc, "\n".join(lines), EXIT_VIOLATION if found else EXIT_OK


def _parse_stakes(text: str, names: list[str]) -> dict[int, int]:
    items = [s.strip() for s in text.split(",") if s.strip()]
    out = {}
    if items and all("=" in s for s in items):
        index = {n: i for i, n in enumerate(names)}
        for s in items:
            name, amount = s.split("=", 1)
            if name not in index:
                raise ICMError(f"unknown player {name!r} in --stakes")
            out[index[name]] = int(amount)
    else:
        if len(items) != len(names):
            raise ICMError(f"--stakes needs one amount per player ({len(names)}) or NAME=AMOUNT pairs")
        for i, s in enumerate(items):
            if int(s) != 0:
                out[i] = int(s)
    return out


def cmd_merge(args):
    tf = parse_tournament_file(args.file)
    mode = _mode(args)
    stakes = _parse_stakes(args.stakes, tf.names)
    for i, b in stakes.items():
        if b > tf.stacks.counts[i]:
            raise ICMError(f"{tf.names[i]} stakes {b} but holds {tf.stacks.counts[i]}")
    bet = pooled_bet_build(stakes, tf.stacks.n)
    res = bet_deltas(tf.stacks, tf.payout_structure, bet, mode)
    dec = pooled_bet_pairwise_decompose(stakes, tf.stacks, tf.payout_structure, mode)
    rep = res.report
    doc = {
        "players": tf.names,
        "stakes": {tf.names[i]: b for i, b in stakes.items()},
        "outcomes": _bet_doc(bet),
        "before": [num(v) for v in rep.before],
        "after": [num(v) for v in rep.after],
        "delta": [num(v) for v in rep.delta],
        "stage_bets_valid": dec.stage_bets_valid,
        "distribution_matches": dec.distribution_matches,
        "bystanders_increase": dec.bystanders_increase,
        "problems": dec.problems,
    }
    rows = [[name, "staker" if i in stakes else "bystander", fmt(b), fmt(a), signed(d)]
            for i, (name, b, a, d) in enumerate(zip(tf.names, rep.before, rep.after, rep.delta))]
    text = table(["player", "role", "before", "after", "delta"], rows)
    text += (f"\npairwise chain: stages valid={dec.stage_bets_valid}, "
             f"distribution matches={dec.distribution_matches}, "
             f"bystanders gain={dec.bystanders_increase}")
    return doc, text, EXIT_OK if dec.ok else EXIT_VIOLATION


def cmd_simulate(args):
    tf = parse_tournament_file(args.file)
    config = SimulationConfig(tf.stacks, args.trials, args.seed, args.max_hands, args.workers)
    emp = simulate_random_walk(config)
    rep = compare_empirical_vs_icm(emp, tf.stacks, EXACT, z=args.z)
    n = tf.stacks.n
    doc = {
        "players": tf.names,
        "trials": rep.trials,
        "truncated": rep.truncated,
        "counts": emp.counts,
        "icm": rep.model,
        "empirical": rep.empirical,
        "difference": rep.difference,
        "standard_error": rep.standard_error,
        "column_agrees": rep.column_agrees,
        "max_abs_deviation": rep.max_abs_deviation,
        "warnings": rep.warnings,
    }
    places = [ordinal(r + 1) for r in range(n)]
    blocks = [
        "ICM",
        table(["player", *places], [[nm, *(fmt(v) for v in row)] for nm, row in zip(tf.names, rep.model)]),
        f"random walk ({rep.trials} trials, {rep.truncated} truncated)",
        table(["player", *places], [[nm, *(fmt(v) for v in row)] for nm, row in zip(tf.names, rep.empirical)]),
        "difference / standard error",
        table(["player", *places], [[nm, *(f"{signed(d)}/{fmt(s)}" for d, s in zip(dr, sr))]
                                    for nm, dr, sr in zip(tf.names, rep.difference, rep.standard_error)]),
        f"first place within {args.z:g} sigma: {rep.first_place_agrees}",
        "other places (no agreement expected): max |difference| "
        + ", ".join(f"{p} {fmt(d)}" for p, d in zip(places[1:], rep.max_abs_deviation[1:])),
        *(f"warning: {w}" for w in rep.warnings),
    ]
    return doc, "\n".join(blocks), EXIT_OK


# -- parser ------------------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    # bad arguments are input errors (exit 1); 2 is reserved for violations found
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", default=argparse.SUPPRESS,
                        help="print a JSON document instead of a table")
    common.add_argument("--tolerance", type=float, default=argparse.SUPPRESS,
                        help="float-mode tolerance")

    parser = _Parser(prog="icm", description="Independent Chip Model calculator")
    parser.add_argument("--json", action="store_true", help="print a JSON document instead of a table")
    parser.add_argument("--tolerance", type=float, default=None, help="float-mode tolerance")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("dist", parents=[common], help="finish-position matrix")
    p.add_argument("file")
    p.add_argument("--method", choices=["enumerate", "dp"], default="dp")
    p.add_argument("--exact", action="store_true")
    p.set_defaults(func=cmd_dist)

    p = sub.add_parser("equity", parents=[common], help="expected prize per player")
    p.add_argument("file")
    p.add_argument("--exact", action="store_true")
    p.set_defaults(func=cmd_equity)

    p = sub.add_parser("bet-ev", parents=[common], help="equity before and after the file's bet")
    p.add_argument("file")
    p.add_argument("--exact", action="store_true")
    p.set_defaults(func=cmd_bet_ev)

    p = sub.add_parser("check", parents=[common], help="random two-player fair bets")
    p.add_argument("--theorem", type=int, choices=[1, 2], required=True)
    p.add_argument("--players", type=int_range, default=(3, 6))
    p.add_argument("--paid", type=int_range, default=(2, 5))
    p.add_argument("--outcomes", type=int_range, default=(2, 4))
    p.add_argument("--payouts", choices=["flat", "ladder"], default="flat")
    p.add_argument("--trials", type=int, default=500)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("lemma", parents=[common], help="partial-fraction identity and g_k convexity")
    p.add_argument("--k", type=int_range, default=(0, 4))
    p.add_argument("--samples", type=int, default=200)
    p.add_argument("--points", type=int, default=101)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_lemma)

    p = sub.add_parser("search", parents=[common], help="multi-way bets that break the two-player results")
    p.add_argument("--participants", type=int_range, default=(3, 3))
    p.add_argument("--players", type=int_range, default=(3, 6))
    p.add_argument("--paid", type=int_range, default=(2, 3))
    p.add_argument("--outcomes", type=int_range, default=(2, 3))
    p.add_argument("--payouts", choices=["flat", "ladder"], default="flat")
    p.add_argument("--allow-busts", action="store_true")
    p.add_argument("--min-bystanders", type=int, default=0)
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--show", type=int, default=10, help="counterexamples listed in the table")
    p.set_defaults(func=cmd_search)

    p = sub.add_parser("merge", parents=[common], help="pooled proportional bet and its pairwise chain")
    p.add_argument("file")
    p.add_argument("--stakes", required=True, help="one amount per player (0 = out) or NAME=AMOUNT,...")
    p.add_argument("--float", dest="exact", action="store_false")
    p.set_defaults(func=cmd_merge)

    p = sub.add_parser("simulate", parents=[common], help="random-walk tournaments against the ICM")
    p.add_argument("file")
    p.add_argument("--trials", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--max-hands", type=int, default=DEFAULT_MAX_HANDS)
    p.add_argument("--z", type=float, default=3.0)
    p.set_defaults(func=cmd_simulate)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    try:
        doc, text, code = args.func(args)
    except (BetValidationError, TournamentFileError, ICMError, ValueError) as exc:
        if args.json:
            print(json.dumps({"error": str(exc)}, indent=2))
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    print(json.dumps(doc, indent=2) if args.json else text)
    return code


if __name__ == "__main__":
    sys.exit(main())
