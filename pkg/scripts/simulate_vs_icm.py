"""Compare random-walk finishing frequencies with the model's finish matrix."""

import argparse

from icm.core import ChipStacks
from icm.simulate import SimulationConfig, compare_empirical_vs_icm, simulate_random_walk


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("stacks", type=int, nargs="*", default=[2, 1, 1])
    ap.add_argument("--trials", type=int, default=100_000)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--workers", type=int, default=1)
    args = ap.parse_args()

    stacks = ChipStacks(tuple(args.stacks))
    emp = simulate_random_walk(SimulationConfig(stacks, args.trials, args.seed, workers=args.workers))
    rep = compare_empirical_vs_icm(emp, stacks)
    n = stacks.n
    print("place   " + "".join(f"{r + 1:>18}" for r in range(n)))
    for i in range(n):
        cells = "".join(f"{rep.empirical[i][r]:>9.4f} /{rep.model[i][r]:>7.4f}" for r in range(n))
        print(f"p{i + 1:<3}{stacks.counts[i]:>4}" + cells)
    print("(simulated / model)")
    for r in range(n):
        verdict = "within" if rep.column_agrees[r] else "outside"
        print(f"place {r + 1}: max |diff| {rep.max_abs_deviation[r]:.4f}, {verdict} {rep.z:g} SE")
    for w in rep.warnings:
        print("warning:", w)


if __name__ == "__main__":
    main()
