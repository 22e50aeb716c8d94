"""Print equities before and after the three-way satellite bet (data/satellite.json)."""

import argparse
from pathlib import Path

from icm.bets import bet_deltas
from icm.core import EXACT
from icm.fileformat import parse_tournament_file

DEFAULT = Path(__file__).resolve().parent.parent / "data" / "satellite.json"


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("file", nargs="?", default=DEFAULT)
    args = ap.parse_args()

    tf = parse_tournament_file(args.file)
    res = bet_deltas(tf.stacks, tf.payout_structure, tf.bet_spec(), EXACT)
    rep = res.report
    print(f"{'player':<8}{'chips':>7}{'before':>10}{'after':>10}{'delta':>10}  exact delta")
    for i, name in enumerate(tf.names):
        d = rep.delta[i]
        print(f"{name:<8}{tf.stacks.counts[i]:>7}{float(rep.before[i]):>10.4f}"
              f"{float(rep.after[i]):>10.4f}{float(d):>+10.4f}  {d}")
    losers = [tf.names[i] for i, d in res.bystander.items() if d < 0]
    print(f"bystanders losing equity: {', '.join(losers) or 'none'}")


if __name__ == "__main__":
    main()
