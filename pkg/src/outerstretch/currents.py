"""Geodesic currents as weight tables in the rose chart.

A current is queried through cylinder weights weight(v) over reduced
words v; counting and uniform currents have exact rational weights, and
the double-exponential filling current J is carried as a finite term map
with a certified truncation tail.  The intersection form is evaluated in
the length-weighted convention <T, mu> = (1/2) sum over oriented edges
of L(e) * weight(label(e)), which makes <T, eta_w> = ||w||_T exact and
puts <unit rose, uniform> = 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Tuple, Union

import numpy as np

from .lipschitz import canonical_cyclic_words, lambda_distortion
from .marked_graphs import MarkedGraph, translation_length, unit_rose
from .words import (
    CyclicWord,
    InputError,
    Word,
    cyclic_reduce,
    invert_letters,
    min_rotation,
    occurrences,
    word,
)

Weight = Union[Fraction, float]


class ComputationError(Exception):
    """A certified computation could not reach the requested tolerance."""


@dataclass(frozen=True)
class CountingCurrent:
    """eta_w: weight(v) = occurrences of v and v^-1 in the cyclic word w."""

    w: CyclicWord

    @property
    def rank(self) -> int:
        return self.w.rank

    def weight(self, v: Word) -> Fraction:
        if len(v) == 0:
            return Fraction(2 * len(self.w))
        return Fraction(occurrences(v, self.w))


@dataclass(frozen=True)
class UniformCurrent:
    """nu_A: weight(v) = 1 / (N (2N-1)^(|v|-1))."""

    rank: int

    def weight(self, v: Word) -> Fraction:
        if len(v) == 0:
            return Fraction(2)
        n = self.rank
        return Fraction(1, n * (2 * n - 1) ** (len(v) - 1))


@dataclass(frozen=True)
class LinearCurrent:
    """Positive rational combination of currents."""

    coeffs: Tuple[Tuple[Fraction, "Current"], ...]

    def __post_init__(self):
        if not self.coeffs:
            raise InputError("empty linear combination")
        ranks = {mu.rank for _, mu in self.coeffs}
        if len(ranks) != 1:
            raise InputError(f"mixed ranks in combination: {sorted(ranks)}")
        if any(c <= 0 for c, _ in self.coeffs):
            raise InputError("coefficients must be positive")

    @property
    def rank(self) -> int:
        return self.coeffs[0][1].rank

    def weight(self, v: Word) -> Weight:
        return sum(c * mu.weight(v) for c, mu in self.coeffs)


@dataclass(frozen=True)
class TruncatedJCurrent:
    """Finite truncation of J(T) = sum over root-free conjugacy classes
    of exp(-exp(||w||_T)) eta_w, with a certified bound on the dropped
    tail's contribution to any single cylinder weight."""

    T: MarkedGraph
    cutoff: int  # classes with word length <= cutoff are included
    tail_bound: float
    terms: Tuple[Tuple[CyclicWord, float], ...]

    @property
    def rank(self) -> int:
        return self.T.rank

    def weight(self, v: Word) -> float:
        return sum(t * occurrences(v, w) for w, t in self.terms if t > 0.0)


Current = Union[CountingCurrent, UniformCurrent, LinearCurrent, TruncatedJCurrent]


def counting_current(w: Word) -> CountingCurrent:
    cyc, _ = cyclic_reduce(w)
    if len(cyc) == 0:
        raise InputError("counting current of the trivial word")
    return CountingCurrent(cyc)


def uniform_current(n: int) -> UniformCurrent:
    if n < 2:
        raise InputError(f"rank must be >= 2, got {n}")
    return UniformCurrent(n)


# --- weight tables --------------------------------------------------------

@dataclass(frozen=True)
class WeightTable:
    rank: int
    depth: int
    entries: Tuple[Tuple[Tuple[int, ...], Weight], ...]

    def as_dict(self) -> Dict[Tuple[int, ...], Weight]:
        return dict(self.entries)


def _reduced_words(n: int, length: int) -> Iterable[Tuple[int, ...]]:
    def rec(prefix: List[int]):
        if len(prefix) == length:
            yield tuple(prefix)
            return
        for x in range(-n, n + 1):
            if x == 0 or (prefix and x == -prefix[-1]):
                continue
            prefix.append(x)
            yield from rec(prefix)
            prefix.pop()

    yield from rec([])


def weight_table(mu: Current, depth: int) -> WeightTable:
    """Weights of every reduced word of length 1..depth."""
    if depth < 1:
        raise InputError("depth must be >= 1")
    n = mu.rank
    entries = []
    for length in range(1, depth + 1):
        for letters in _reduced_words(n, length):
            entries.append((letters, mu.weight(word(letters, n))))
    return WeightTable(n, depth, tuple(entries))


def flip_defect(table: WeightTable) -> Weight:
    """Max |weight(v) - weight(v^-1)| over the table; 0 for a current."""
    m = table.as_dict()
    return max(abs(wv - m[invert_letters(v)]) for v, wv in m.items())


def switch_defect(table: WeightTable) -> Weight:
    """Max violation of weight(v) = sum_x weight(vx) = sum_x weight(xv)
    over words of length < depth."""
    m = table.as_dict()
    n = table.rank
    worst: Weight = Fraction(0)
    for v, wv in m.items():
        if len(v) >= table.depth:
            continue
        right = sum(m[v + (x,)] for x in range(-n, n + 1)
                    if x != 0 and x != -v[-1])
        left = sum(m[(x,) + v] for x in range(-n, n + 1)
                   if x != 0 and x != -v[0])
        worst = max(worst, abs(wv - right), abs(wv - left))
    return worst


# --- intersection form ----------------------------------------------------

def _rose_letter_labels(T: MarkedGraph) -> Optional[List[Tuple[int, Fraction]]]:
    """For a single-vertex graph whose marking labels are single letters,
    the (letter, length) per edge; None otherwise."""
    if len(T.vertices) != 1:
        return None
    out = []
    labels = dict(T.labels)
    for i, e in enumerate(T.edges):
        lab = labels[e.eid]
        if len(lab) != 1:
            return None
        out.append((lab.letters[0], e.length))
    return out


def intersection_form(T: MarkedGraph, mu: Current) -> Weight:
    if T.rank != mu.rank:
        raise InputError(f"rank mismatch: {T.rank} vs {mu.rank}")
    if isinstance(mu, CountingCurrent):
        return translation_length(T, Word(mu.w.letters, mu.rank))
    if isinstance(mu, LinearCurrent):
        return sum(c * intersection_form(T, nu) for c, nu in mu.coeffs)
    if isinstance(mu, UniformCurrent):
        rose_labels = _rose_letter_labels(T)
        if rose_labels is None:
            raise InputError(
                "uniform-current intersection is only evaluated on roses "
                "with single-letter labels; use the stretch module for "
                "general trees"
            )
        # (1/2) sum over oriented edges of L(e) * weight(label);
        # both orientations of an edge carry the same weight
        return sum(
            length * mu.weight(word([x], mu.rank))
            for x, length in rose_labels
        )
    if isinstance(mu, TruncatedJCurrent):
        return sum(
            t * float(translation_length(T, Word(w.letters, w.rank)))
            for w, t in mu.terms
        )
    raise InputError(f"unsupported current {type(mu).__name__}")


# --- volume entropy -------------------------------------------------------

def _transfer_spectral_radius(T: MarkedGraph, s: float) -> float:
    """Perron root of M(s)[e -> f] = exp(-s L(f)) over non-backtracking
    adjacent oriented edge pairs."""
    edges = T.edges
    oriented = [(i, sgn) for i in range(len(edges)) for sgn in (1, -1)]
    index = {oe: k for k, oe in enumerate(oriented)}

    def head(i, sgn):
        return edges[i].dst if sgn > 0 else edges[i].src

    def tail(i, sgn):
        return edges[i].src if sgn > 0 else edges[i].dst

    m = np.zeros((len(oriented), len(oriented)))
    for e in oriented:
        for f in oriented:
            if f == (e[0], -e[1]):
                continue
            if tail(*f) == head(*e):
                m[index[e], index[f]] = math.exp(-s * float(edges[f[0]].length))
    return max(abs(np.linalg.eigvals(m)))


def volume_entropy(T: MarkedGraph, tol: float = 1e-10) -> float:
    """The unique s with Perron root 1 of the length transfer matrix;
    equals the exponential growth rate of the universal-cover ball."""
    lo, hi = 0.0, 1.0
    while _transfer_spectral_radius(T, hi) > 1.0:
        lo, hi = hi, 2.0 * hi
        if hi > 1e9:  # pragma: no cover
            raise ComputationError("entropy bracket exceeded 1e9")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if _transfer_spectral_radius(T, mid) > 1.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


# --- the filling current J ------------------------------------------------

_J_ENUM_CAP = 12  # max word length enumerated for J truncations


def word_length_constant(T: MarkedGraph) -> int:
    """Integer C with ||w||_A / C <= ||w||_T <= C ||w||_A for all w,
    where ||.||_A is cyclic word length (the unit rose)."""
    U = unit_rose(T.rank)
    lam_tu, _ = lambda_distortion(T, U)
    lam_ut, _ = lambda_distortion(U, T)
    return max(1, math.ceil(max(lam_tu, lam_ut)))


def _j_tail_bound(L: int, n_letters: int, C: int) -> float:
    """Upper bound on the cylinder-weight mass of classes of word length
    > L: each length-n class contributes at most n * exp(-exp(n/C)) to
    any weight and there are fewer than exp(1.1 n log 2N) of them."""
    log_alpha = math.log(2 * n_letters)
    total = 0.0
    n = L + 1
    while True:
        expo = 1.1 * n * log_alpha - math.exp(0.9 * n / C)
        term = 0.0 if expo < -700 else 1.1 * n * math.exp(expo)
        total += term
        n += 1
        if term < 1e-300 and n > L + 2:
            return total
        if n > L + 10000:  # pragma: no cover - divergent parameters
            return math.inf


def _is_root_free(letters: Tuple[int, ...]) -> bool:
    k = len(letters)
    for p in range(1, k):
        if k % p == 0 and letters == letters[p:] + letters[:p]:
            return False
    return True


def j_current(
    T: MarkedGraph, eps: float, min_cutoff: int = 1
) -> TruncatedJCurrent:
    """Truncation of J(T) with every cylinder weight certified to eps."""
    if eps <= 0:
        raise InputError("tolerance must be positive")
    C = word_length_constant(T)
    n = T.rank
    cutoff = None
    for L in range(min(min_cutoff, _J_ENUM_CAP), _J_ENUM_CAP + 1):
        if _j_tail_bound(L, n, C) < eps:
            cutoff = L
            break
    if cutoff is None:
        raise ComputationError(
            f"tail {_j_tail_bound(_J_ENUM_CAP, n, C):.3g} at the "
            f"enumeration cap {_J_ENUM_CAP} exceeds eps={eps:.3g} "
            f"(bi-Lipschitz constant C={C})"
        )
    terms = []
    for length in range(1, cutoff + 1):
        for cw in canonical_cyclic_words(length, n):
            if not _is_root_free(cw.letters):
                continue
            lt = float(translation_length(T, Word(cw.letters, n)))
            expo = -math.exp(lt)
            terms.append((cw, math.exp(expo) if expo > -700 else 0.0))
    return TruncatedJCurrent(T, cutoff, _j_tail_bound(cutoff, n, C), tuple(terms))


def j_current_weight(
    T: MarkedGraph, v: Word, eps: float
) -> Tuple[float, float]:
    """Cylinder weight of the filling current J(T) at v, with the
    certified tail actually achieved."""
    if len(v) == 0:
        raise InputError("weight of the empty cylinder")
    # enumerate past |v| so the cylinder sees its first occurrence
    mu = j_current(T, eps, min_cutoff=len(v) + 1)
    return mu.weight(v), mu.tail_bound
