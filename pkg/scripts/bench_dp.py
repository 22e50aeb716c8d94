"""Time the subset DP against enumeration as the field grows."""

import argparse
import time

from icm.core import EXACT, FLOAT, ChipStacks, finish_matrix
from icm.rng import trial_rng
from icm.search import random_stacks


def timed(fn):
    start = time.perf_counter()
    fn()
    return time.perf_counter() - start


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--max-n", type=int, default=20)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    print(f"{'n':>3}{'dp float':>11}{'dp exact':>11}{'enumerate':>11}")
    for n in range(2, args.max_n + 1):
        s = ChipStacks(random_stacks(trial_rng(args.seed, n, "bench"), n, min_total=100 * n, max_total=1000 * n))
        row = [timed(lambda: finish_matrix(s, "subset-dp", FLOAT))]
        row.append(timed(lambda: finish_matrix(s, "subset-dp", EXACT)) if n <= 10 else None)
        row.append(timed(lambda: finish_matrix(s, "enumerate", FLOAT)) if n <= 8 else None)
        print(f"{n:>3}" + "".join(f"{t:>10.3f}s" if t is not None else f"{'-':>11}" for t in row))


if __name__ == "__main__":
    main()
