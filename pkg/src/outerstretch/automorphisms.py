"""Endomorphisms of F_N by generator images, with basis certification.

Certification folds the wedge of image-labeled loops Stallings-style to
decide whether the images form a free basis, then factors the map into
elementary Nielsen moves to obtain an exact inverse and a replayable
certificate.
"""

from __future__ import annotations

import itertools
import random
from collections import deque
from dataclasses import dataclass, field
from typing import Optional, Sequence, Tuple

from .words import (
    InputError,
    Word,
    concat_reduce,
    free_reduce,
    invert_letters,
    parse_word,
    word,
)

# total image length allowed when composing; iterated powers blow up
# geometrically and must fail loudly rather than swap.
DEFAULT_LENGTH_CAP = 10**7


class CompositionCapError(RuntimeError):
    """Total image length exceeded the configured cap."""


@dataclass(frozen=True)
class Endomorphism:
    rank: int
    images: Tuple[Word, ...]

    def __post_init__(self):
        if len(self.images) != self.rank:
            raise InputError(
                f"need {self.rank} images, got {len(self.images)}"
            )
        for im in self.images:
            if im.rank != self.rank:
                raise InputError("image rank mismatch")

    def image_of_letter(self, x: int) -> Tuple[int, ...]:
        im = self.images[abs(x) - 1].letters
        return im if x > 0 else invert_letters(im)

    def total_image_length(self) -> int:
        return sum(len(im) for im in self.images)

    def __str__(self) -> str:
        from .words import letters_to_text

        parts = []
        for i, im in enumerate(self.images):
            gen = chr(ord("a") + i)
            parts.append(f"{gen}->{letters_to_text(im.letters) or '1'}")
        return "; ".join(parts)


def identity(rank: int) -> Endomorphism:
    return Endomorphism(rank, tuple(word([i + 1], rank) for i in range(rank)))


def apply_endo(phi: Endomorphism, w: Word) -> Word:
    if phi.rank != w.rank:
        raise InputError(f"rank mismatch: {phi.rank} vs {w.rank}")
    out: list[int] = []
    for x in w.letters:
        for y in phi.image_of_letter(x):
            if out and out[-1] == -y:
                out.pop()
            else:
                out.append(y)
    return Word(tuple(out), phi.rank)


def compose(
    phi: Endomorphism, psi: Endomorphism, length_cap: int = DEFAULT_LENGTH_CAP
) -> Endomorphism:
    """phi o psi, reducing eagerly.  Fails loudly past the length cap."""
    if phi.rank != psi.rank:
        raise InputError(f"rank mismatch: {phi.rank} vs {psi.rank}")
    images = tuple(apply_endo(phi, im) for im in psi.images)
    total = sum(len(im) for im in images)
    if total > length_cap:
        raise CompositionCapError(
            f"composed image length {total} exceeds cap {length_cap}"
        )
    return Endomorphism(phi.rank, images)


# --- Nielsen moves --------------------------------------------------------
# A move is a tuple: ("rmul", i, j, eps)  a_i -> a_i a_j^eps
#                    ("lmul", i, j, eps)  a_i -> a_j^eps a_i
#                    ("inv", i)           a_i -> a_i^-1
#                    ("swap", i, j)       a_i <-> a_j
# Indices are 0-based.

Move = Tuple


def move_endomorphism(move: Move, rank: int) -> Endomorphism:
    images = [[i + 1] for i in range(rank)]
    kind = move[0]
    if kind == "rmul":
        _, i, j, eps = move
        images[i] = [i + 1, eps * (j + 1)]
    elif kind == "lmul":
        _, i, j, eps = move
        images[i] = [eps * (j + 1), i + 1]
    elif kind == "inv":
        _, i = move
        images[i] = [-(i + 1)]
    elif kind == "swap":
        _, i, j = move
        images[i], images[j] = images[j], images[i]
    else:
        raise ValueError(f"unknown move {move!r}")
    return Endomorphism(rank, tuple(word(im, rank) for im in images))


def invert_move(move: Move) -> Move:
    kind = move[0]
    if kind == "rmul":
        _, i, j, eps = move
        return ("rmul", i, j, -eps)
    if kind == "lmul":
        _, i, j, eps = move
        return ("lmul", i, j, -eps)
    return move


def _apply_move_to_tuple(
    tup: Tuple[Tuple[int, ...], ...], move: Move
) -> Tuple[Tuple[int, ...], ...]:
    lst = list(tup)
    kind = move[0]
    if kind == "rmul":
        _, i, j, eps = move
        other = lst[j] if eps > 0 else invert_letters(lst[j])
        lst[i] = free_reduce(lst[i] + other)
    elif kind == "lmul":
        _, i, j, eps = move
        other = lst[j] if eps > 0 else invert_letters(lst[j])
        lst[i] = free_reduce(other + lst[i])
    elif kind == "inv":
        _, i = move
        lst[i] = invert_letters(lst[i])
    elif kind == "swap":
        _, i, j = move
        lst[i], lst[j] = lst[j], lst[i]
    return tuple(lst)


@dataclass(frozen=True)
class NotABasis:
    """Returned when the images generate a proper subgroup."""

    reason: str

    def __bool__(self) -> bool:
        return False


@dataclass(frozen=True)
class Automorphism:
    forward: Endomorphism
    inverse: Endomorphism
    certificate: Tuple[Move, ...] = field(default=())

    @property
    def rank(self) -> int:
        return self.forward.rank

    def inverted(self) -> "Automorphism":
        return Automorphism(
            self.inverse,
            self.forward,
            tuple(invert_move(m) for m in reversed(self.certificate)),
        )

    def __str__(self) -> str:
        return str(self.forward)


def replay_certificate(certificate: Sequence[Move], rank: int) -> Endomorphism:
    """Compose the certificate moves starting from the identity."""
    phi = identity(rank)
    for mv in certificate:
        phi = compose(phi, move_endomorphism(mv, rank))
    return phi


# --- Stallings folding decision ------------------------------------------

def folds_to_full_rose(images: Sequence[Word], rank: int) -> bool:
    """Fold the wedge of image-labeled loops; True iff the result is the
    rank-N rose, i.e. the images generate (hence freely generate) F_N."""
    if any(len(im) == 0 for im in images):
        return False
    parent: list[int] = [0]
    out: list[dict] = [dict()]

    def find(a: int) -> int:
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    pending: deque = deque()

    def new_vertex() -> int:
        parent.append(len(parent))
        out.append(dict())
        return len(parent) - 1

    for im in images:
        prev = 0
        for k, x in enumerate(im.letters):
            nxt = 0 if k == len(im.letters) - 1 else new_vertex()
            pending.append((prev, x, nxt))
            pending.append((nxt, -x, prev))
            prev = nxt

    while pending:
        u, x, v = pending.popleft()
        u, v = find(u), find(v)
        slot = out[u]
        if x in slot:
            w = find(slot[x])
            if w != v:
                # merge v into w (or w into v): keep the one with more edges
                a, b = (w, v) if len(out[w]) >= len(out[v]) else (v, w)
                parent[b] = a
                moved = out[b]
                out[b] = {}
                for y, t in moved.items():
                    pending.append((a, y, t))
        else:
            slot[x] = v

    roots = {find(i) for i in range(len(parent)) if out[find(i)]}
    roots.add(find(0))
    if len(roots) != 1:
        return False
    r = find(0)
    return all(x in out[r] for x in range(1, rank + 1))


# --- Nielsen factorization -----------------------------------------------

_BFS_CAP = 200000


def _reducing_move(tup) -> Optional[Move]:
    n = len(tup)
    for i in range(n):
        wi = tup[i]
        for j in range(n):
            if i == j:
                continue
            for eps in (1, -1):
                other = tup[j] if eps > 0 else invert_letters(tup[j])
                if len(free_reduce(wi + other)) < len(wi):
                    return ("rmul", i, j, eps)
                if len(free_reduce(other + wi)) < len(wi):
                    return ("lmul", i, j, eps)
    return None


def _level_set_escape(tup) -> Optional[list]:
    """BFS over length-preserving multiplications for a path that enables
    a strict length reduction.  Returns the move path or None."""
    start = tup
    seen = {start}
    queue = deque([(start, [])])
    n = len(tup)
    while queue:
        cur, path = queue.popleft()
        if len(seen) > _BFS_CAP:
            raise RuntimeError("Nielsen certificate search cap exceeded")
        for i in range(n):
            for j in range(n):
                if i == j:
                    continue
                for kind in ("rmul", "lmul"):
                    for eps in (1, -1):
                        mv = (kind, i, j, eps)
                        nxt = _apply_move_to_tuple(cur, mv)
                        if len(nxt[i]) < len(cur[i]):
                            return path + [mv]
                        if len(nxt[i]) == len(cur[i]) and nxt not in seen:
                            seen.add(nxt)
                            queue.append((nxt, path + [mv]))
    return None


def nielsen_factorization(
    images: Sequence[Word], rank: int
) -> Optional[list]:
    """Moves carrying the image tuple to the identity tuple, or None if
    the tuple cannot be reduced (not a basis)."""
    tup = tuple(im.letters for im in images)
    moves: list = []
    while True:
        if any(len(w) == 0 for w in tup):
            return None
        if all(len(w) == 1 for w in tup):
            break
        mv = _reducing_move(tup)
        if mv is None:
            path = _level_set_escape(tup)
            if path is None:
                return None
            for m in path:
                tup = _apply_move_to_tuple(tup, m)
                moves.append(m)
            continue
        tup = _apply_move_to_tuple(tup, mv)
        moves.append(mv)
    # single letters: sort into the identity with swaps and inversions
    if sorted(abs(w[0]) for w in tup) != list(range(1, rank + 1)):
        return None
    tup = list(tup)
    for i in range(rank):
        j = next(k for k in range(i, rank) if abs(tup[k][0]) == i + 1)
        if j != i:
            tup[i], tup[j] = tup[j], tup[i]
            moves.append(("swap", i, j))
        if tup[i][0] < 0:
            tup[i] = (-tup[i][0],)
            moves.append(("inv", i))
    return moves


def certify_basis(phi: Endomorphism):
    """Certify that phi's images form a basis.

    Returns an Automorphism (with exact inverse and Nielsen certificate)
    or a NotABasis value.
    """
    if not folds_to_full_rose(phi.images, phi.rank):
        return NotABasis("images generate a proper subgroup")
    moves = nielsen_factorization(phi.images, phi.rank)
    if moves is None:
        raise RuntimeError(
            "folding accepted a basis but Nielsen factorization stalled"
        )
    inv = identity(phi.rank)
    for mv in moves:
        inv = compose(inv, move_endomorphism(mv, phi.rank))
    certificate = tuple(invert_move(m) for m in reversed(moves))
    aut = Automorphism(phi, inv, certificate)
    ident = identity(phi.rank).images
    if compose(phi, inv).images != ident or compose(inv, phi).images != ident:
        raise RuntimeError("inverse verification failed")  # pragma: no cover
    return aut


def compose_automorphisms(a: Automorphism, b: Automorphism) -> Automorphism:
    return Automorphism(
        compose(a.forward, b.forward),
        compose(b.inverse, a.inverse),
        a.certificate + b.certificate,
    )


# --- generators and random sampling --------------------------------------

def whitehead_and_nielsen_generators(n: int) -> Tuple[Automorphism, ...]:
    """Permutations, inversions and elementary Nielsen maps, certified.

    The permutational members (permutations and inversions) are exactly
    the automorphisms with generic stretching factor 1.
    """
    if n < 2:
        raise InputError("rank must be >= 2")
    gens: list[Automorphism] = []
    for perm in itertools.permutations(range(n)):
        phi = Endomorphism(n, tuple(word([perm[i] + 1], n) for i in range(n)))
        gens.append(certify_basis(phi))
    for i in range(n):
        gens.append(certify_basis(move_endomorphism(("inv", i), n)))
    for i in range(n):
        for j in range(n):
            if i != j:
                for eps in (1, -1):
                    gens.append(
                        certify_basis(move_endomorphism(("rmul", i, j, eps), n))
                    )
    return tuple(gens)


def permutational_generators(n: int) -> Tuple[Automorphism, ...]:
    gens = whitehead_and_nielsen_generators(n)
    count = 0
    for g in gens:
        if all(len(im) == 1 for im in g.forward.images):
            count += 1
    return tuple(g for g in gens if all(len(im) == 1 for im in g.forward.images))


_GEN_CACHE: dict = {}


def _generators(n: int) -> Tuple[Automorphism, ...]:
    if n not in _GEN_CACHE:
        _GEN_CACHE[n] = whitehead_and_nielsen_generators(n)
    return _GEN_CACHE[n]


def random_automorphism(n: int, word_count: int, seed) -> Automorphism:
    """Uniform composition of `word_count` generators; deterministic per
    (n, word_count, seed)."""
    rng = random.Random(f"aut:{n}:{word_count}:{seed}")
    gens = _generators(n)
    phi = Automorphism(identity(n), identity(n), ())
    for _ in range(word_count):
        phi = compose_automorphisms(phi, rng.choice(gens))
    return phi


def parse_endomorphism(text: str, rank: Optional[int] = None) -> Endomorphism:
    """Parse "a->ab; b->b" (whitespace-insensitive)."""
    entries = {}
    for part in text.split(";"):
        part = part.strip()
        if not part:
            continue
        if "->" not in part:
            raise InputError(f"bad assignment {part!r}")
        lhs, rhs = part.split("->", 1)
        lhs = lhs.strip()
        if len(lhs) != 1 or not lhs.islower():
            raise InputError(f"bad generator {lhs!r}")
        entries[ord(lhs) - ord("a") + 1] = rhs.strip()
    if not entries:
        raise InputError("empty automorphism text")
    if rank is None:
        rank = max(
            [max(entries)]
            + [abs(x) for rhs in entries.values() for x in _safe_letters(rhs)]
        )
    images = []
    for i in range(1, rank + 1):
        if i in entries:
            images.append(parse_word(entries[i], rank))
        else:
            images.append(word([i], rank))
    return Endomorphism(rank, tuple(images))


def _safe_letters(text: str):
    from .words import text_to_letters

    return text_to_letters(text)


def phi_family(n: int, m: int) -> Automorphism:
    """The family a_1 -> a_1 a_2^m, a_i -> a_i (i >= 2)."""
    if n < 2 or m < 1:
        raise InputError("need n >= 2 and m >= 1")
    images = [word([1] + [2] * m, n)] + [word([i], n) for i in range(2, n + 1)]
    return certify_basis(Endomorphism(n, tuple(images)))
