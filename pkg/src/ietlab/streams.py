"""Named, counter-based random substreams derived from one top-level seed.

``substream(seed, "mc", 3)`` always yields the same Philox generator, and
introducing a new stream name never perturbs existing ones.
"""

from __future__ import annotations

import hashlib
from fractions import Fraction

import numpy as np

from .iet import IET, Permutation, build_iet, validate_irreducible


def _name_key(name: str) -> int:
    return int.from_bytes(hashlib.sha256(name.encode()).digest()[:4], "little")


def substream(seed: int, name: str, *index: int) -> np.random.Generator:
    ss = np.random.SeedSequence(int(seed), spawn_key=(_name_key(name), *map(int, index)))
    return np.random.Generator(np.random.Philox(ss))


def strictly_irreducible_permutations(n: int) -> list[Permutation]:
    from itertools import permutations

    return [Permutation(p) for p in permutations(range(1, n + 1)) if validate_irreducible(p)]


def random_permutation(rng: np.random.Generator, n: int) -> Permutation:
    choices = strictly_irreducible_permutations(n)
    if not choices:
        raise ValueError(f"no irreducible permutations on {n} symbols")
    return choices[int(rng.integers(len(choices)))]


def random_iet(rng: np.random.Generator, n: int, perm=None, arithmetic: str = "exact", bits: int = 64) -> IET:
    """Random IET with ``|lambda| = 1``; exact lengths have ``bits``-bit random numerators."""
    perm = random_permutation(rng, n) if perm is None else perm
    nums = [int(v) for v in rng.integers(1, 2**bits, size=n, dtype=np.uint64 if bits == 64 else np.int64)]
    total = sum(nums)
    lengths = [Fraction(v, total) for v in nums]
    if arithmetic == "float":
        lengths = [float(v) for v in lengths]
    return build_iet(lengths, perm, arithmetic)
