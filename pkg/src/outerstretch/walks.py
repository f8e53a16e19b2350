"""Simple non-backtracking random walks on the free group.

The first letter is uniform over the 2N signed generators; every later
letter is uniform over the 2N-1 letters that do not cancel the previous
one.  Trajectories are deterministic per (N, steps, seed) with per-trial
derived substreams.
"""

from __future__ import annotations

import random
from typing import Dict, List, Tuple

from .words import InputError, invert_letters


def walk_rng(seed, trial: int = 0) -> random.Random:
    return random.Random(f"nbwalk:{seed}:{trial}")


def nonbacktracking_walk(n: int, steps: int, rng: random.Random) -> List[int]:
    if n < 2 or steps < 1:
        raise InputError("need rank >= 2 and steps >= 1")
    letters = [x for x in range(-n, n + 1) if x != 0]
    out = [rng.choice(letters)]
    for _ in range(steps - 1):
        prev = out[-1]
        x = rng.choice(letters)
        while x == -prev:
            x = rng.choice(letters)
        out.append(x)
    return out


def subword_frequencies(
    letters: List[int], depth: int
) -> Dict[Tuple[int, ...], int]:
    """Counts of every subword of length <= depth in the cyclic word.

    The input must be non-backtracking; ends that cancel cyclically are
    trimmed first.
    """
    w = list(letters)
    while len(w) >= 2 and w[0] == -w[-1]:
        w = w[1:-1]
    n = len(w)
    counts: Dict[Tuple[int, ...], int] = {}
    for i in range(n):
        sub: list[int] = []
        for j in range(min(depth, n)):
            sub.append(w[(i + j) % n])
            counts[tuple(sub)] = counts.get(tuple(sub), 0) + 1
    return counts


def empirical_current_weight(
    counts: Dict[Tuple[int, ...], int], v: Tuple[int, ...]
) -> int:
    """Occurrence count of v and v^-1, as in a counting current."""
    return counts.get(v, 0) + counts.get(invert_letters(v), 0)
