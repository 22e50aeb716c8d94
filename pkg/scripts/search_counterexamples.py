"""Search random multi-way fair bets for equity changes of the 'wrong' sign.

Sweeps the number of paid places and reports how often bettors gain and
bystanders lose.
"""

import argparse

from icm.search import SearchConfig, counterexample_search


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--trials", type=int, default=500)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--players", type=int, nargs=2, default=(4, 6))
    ap.add_argument("--workers", type=int, default=1)
    args = ap.parse_args()

    print(f"{'paid':>4}{'bettor gains':>14}{'bystander losses':>18}")
    for paid in range(1, args.players[1]):
        config = SearchConfig(participants=(3, args.players[1]), players=tuple(args.players),
                              paid=(paid, paid), outcomes=(2, 4), min_bystanders=1,
                              trials=args.trials, seed=args.seed, workers=args.workers)
        found = counterexample_search(config)
        gains = sum(bool(c.participant_gainers) for c in found)
        losses = sum(bool(c.bystander_losers) for c in found)
        print(f"{paid:>4}{gains:>14}{losses:>18}")
    print(f"({args.trials} bets per row)")


if __name__ == "__main__":
    main()
