"""Per-trial random streams.

Each trial gets its own Mersenne Twister seeded from a BLAKE2b digest of
``(label, seed, trial)``, so results depend only on the trial index and never
on how trials are scheduled across workers.
"""

import hashlib
import random


def stream_seed(seed: int, trial: int, label: str = "") -> int:
    digest = hashlib.blake2b(f"{label}:{seed}:{trial}".encode(), digest_size=16).digest()
    return int.from_bytes(digest, "little")


def trial_rng(seed: int, trial: int, label: str = "") -> random.Random:
    return random.Random(stream_seed(seed, trial, label))


def chunk_ranges(n: int, parts: int) -> list[range]:
    parts = max(1, min(parts, n)) if n else 1
    size, extra = divmod(n, parts)
    out, start = [], 0
    for k in range(parts):
        stop = start + size + (1 if k < extra else 0)
        out.append(range(start, stop))
        start = stop
    return out
