"""Candidate circuits and the extremal Lipschitz distortion on Outer space.

The sup defining Lambda(T,S) is attained on the finite set of reduced
circuits crossing each unoriented edge at most twice; enumerating that
set gives exact rational distortions and distances.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Tuple

from .automorphisms import Automorphism, apply_endo
from .marked_graphs import (
    MarkedGraph,
    OrientedEdge,
    translation_length,
    unit_rose,
    act,
)
from .words import (
    CyclicWord,
    InputError,
    Word,
    cyclic_length,
    cyclic_reduce,
    invert_letters,
    min_rotation,
    word,
    word_key,
)


@dataclass(frozen=True)
class CandidateSet:
    graph: MarkedGraph
    # (group element via marking, edge circuit); both cyclically reduced
    loops: Tuple[Tuple[Word, Tuple[OrientedEdge, ...]], ...]

    @property
    def circuit_lengths(self) -> Tuple[Tuple[Word, Fraction], ...]:
        return tuple(
            (
                w,
                sum(
                    (self.graph.edges[i].length for i, _ in circ), Fraction(0)
                ),
            )
            for w, circ in self.loops
        )


_CANDIDATE_CACHE: dict = {}


def _canonical_circuit(circ: Tuple[OrientedEdge, ...]) -> Tuple:
    def rotations(c):
        return (c[k:] + c[:k] for k in range(len(c)))

    inv = tuple((i, -s) for i, s in reversed(circ))
    return min(itertools.chain(rotations(circ), rotations(inv)))


def candidates(T: MarkedGraph) -> CandidateSet:
    """All reduced circuits crossing each unoriented edge at most twice,
    deduplicated up to rotation and inversion."""
    cached = _CANDIDATE_CACHE.get(id(T))
    if cached is not None and cached[0] is T:
        return cached[1]

    def head(oe: OrientedEdge) -> str:
        e = T.edges[oe[0]]
        return e.dst if oe[1] > 0 else e.src

    def tail(oe: OrientedEdge) -> str:
        e = T.edges[oe[0]]
        return e.src if oe[1] > 0 else e.dst

    oriented = [
        (i, s) for i in range(len(T.edges)) for s in (1, -1)
    ]
    out_map: Dict[str, List[OrientedEdge]] = {}
    for oe in oriented:
        out_map.setdefault(tail(oe), []).append(oe)

    found: Dict[Tuple, Tuple[OrientedEdge, ...]] = {}

    def dfs(start: OrientedEdge, path: List[OrientedEdge], used: List[int]):
        cur = path[-1]
        if head(cur) == tail(start) and not (
            cur[0] == start[0] and cur[1] == -start[1]
        ):
            circ = tuple(path)
            found.setdefault(_canonical_circuit(circ), circ)
        for nxt in out_map[head(cur)]:
            if nxt[0] == cur[0] and nxt[1] == -cur[1]:
                continue  # backtracking
            if used[nxt[0]] >= 2:
                continue
            if nxt < start:  # rotation pruning: start edge stays minimal
                continue
            used[nxt[0]] += 1
            path.append(nxt)
            dfs(start, path, used)
            path.pop()
            used[nxt[0]] -= 1

    for start in oriented:
        used = [0] * len(T.edges)
        used[start[0]] = 1
        dfs(start, [start], used)

    nontree_index = {}
    pos = 0
    for i, e in enumerate(T.edges):
        if e.eid not in T.tree:
            nontree_index[i] = pos
            pos += 1
    basis_forward = T._marking.basis.forward

    def circuit_word(circ: Tuple[OrientedEdge, ...]) -> Word:
        letters = [
            s * (nontree_index[i] + 1)
            for i, s in circ
            if i in nontree_index
        ]
        return apply_endo(basis_forward, word(letters, T.rank))

    loops = []
    for circ in found.values():
        w = circuit_word(circ)
        if len(w) == 0:
            continue  # null-homotopic tree circuits cannot occur, guard
        loops.append((w, circ))
    loops.sort(key=lambda pair: (len(pair[0]), word_key(pair[0].letters)))
    result = CandidateSet(T, tuple(loops))
    _CANDIDATE_CACHE[id(T)] = (T, result)
    return result


def lambda_distortion(
    T: MarkedGraph, S: MarkedGraph
) -> Tuple[Fraction, Word]:
    """Lambda(T,S) = max ||w||_S / ||w||_T over T's candidates, with the
    lexicographically least witnessing word."""
    if T.rank != S.rank:
        raise InputError(f"rank mismatch: {T.rank} vs {S.rank}")
    best: Optional[Fraction] = None
    witness: Optional[Word] = None
    for w, denom in candidates(T).circuit_lengths:
        ratio = translation_length(S, w) / denom
        key = (len(w), word_key(w.letters))
        if (
            best is None
            or ratio > best
            or (ratio == best and key < (len(witness), word_key(witness.letters)))
        ):
            best, witness = ratio, w
    assert best is not None and witness is not None
    return best, witness


def lipschitz_distance(T: MarkedGraph, S: MarkedGraph) -> float:
    if T.volume() != 1 or S.volume() != 1:
        raise InputError("lipschitz_distance requires volume-1 graphs")
    lam, _ = lambda_distortion(T, S)
    return math.log(lam)


def cyclic_words_of_length(n: int, rank: int):
    """All reduced cyclic words of exactly length n (every rotation and
    orientation appears; callers dedup if needed)."""
    def rec(prefix: List[int]):
        if len(prefix) == n:
            if n == 1 or prefix[0] != -prefix[-1]:
                yield tuple(prefix)
            return
        for x in range(-rank, rank + 1):
            if x == 0 or (prefix and x == -prefix[-1]):
                continue
            prefix.append(x)
            yield from rec(prefix)
            prefix.pop()

    yield from rec([])


def canonical_cyclic_words(n: int, rank: int):
    """Canonical representatives of cyclic words of length n, up to
    rotation (not inversion)."""
    seen = set()
    for letters in cyclic_words_of_length(n, rank):
        canon = min_rotation(letters)
        if canon not in seen:
            seen.add(canon)
            yield CyclicWord(canon, rank)


def brute_force_distortion(
    T: MarkedGraph, S: MarkedGraph, max_len: int
) -> Fraction:
    """Oracle: max ||w||_S/||w||_T over all cyclic words of length <= max_len."""
    best = Fraction(0)
    for n in range(1, max_len + 1):
        for cw in canonical_cyclic_words(n, T.rank):
            w = Word(cw.letters, T.rank)
            denom = translation_length(T, w)
            if denom == 0:
                continue
            best = max(best, translation_length(S, w) / denom)
    return best


def extremal_stretch(phi: Automorphism) -> Tuple[Fraction, Word]:
    """Lambda_A(phi): max of ||phi(w)|| / ||w|| over cyclic words with
    ||w|| in {1, 2}."""
    n = phi.rank
    best: Optional[Fraction] = None
    witness: Optional[Word] = None
    for length in (1, 2):
        for cw in canonical_cyclic_words(length, n):
            w = Word(cw.letters, n)
            ratio = Fraction(cyclic_length(apply_endo(phi.forward, w)), length)
            key = (len(w), word_key(w.letters))
            if (
                best is None
                or ratio > best
                or (
                    ratio == best
                    and key < (len(witness), word_key(witness.letters))
                )
            ):
                best, witness = ratio, w
    assert best is not None and witness is not None
    return best, witness


def extremal_stretch_by_candidates(phi: Automorphism) -> Fraction:
    """Lambda_A(phi) via the general candidate machinery on the rose."""
    T = unit_rose(phi.rank)
    return lambda_distortion(T, act(T, phi))[0]
