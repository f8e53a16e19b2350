"""Freely and cyclically reduced words over a rank-N signed alphabet.

Letters are nonzero integers in [-N, N]: ``i`` is the i-th generator,
``-i`` its inverse.  Text form uses ``a..z`` for generators and
``A..Z`` for inverses, e.g. ``"abAB"``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence, Tuple


class InputError(ValueError):
    """Invalid user-supplied data (bad letter, rank mismatch, ...)."""


def check_letters(letters: Iterable[int], rank: int) -> None:
    if rank < 1:
        raise InputError(f"rank must be positive, got {rank}")
    for x in letters:
        if not isinstance(x, int) or x == 0 or abs(x) > rank:
            raise InputError(f"invalid letter {x!r} for rank {rank}")


def free_reduce(letters: Iterable[int]) -> Tuple[int, ...]:
    """Freely reduce a letter sequence by iterated cancellation."""
    stack: list[int] = []
    for x in letters:
        if stack and stack[-1] == -x:
            stack.pop()
        else:
            stack.append(x)
    return tuple(stack)


def invert_letters(letters: Sequence[int]) -> Tuple[int, ...]:
    return tuple(-x for x in reversed(letters))


def letter_key(x: int) -> int:
    # a1 < a1^-1 < a2 < a2^-1 < ...
    return 2 * (abs(x) - 1) + (0 if x > 0 else 1)


def word_key(letters: Sequence[int]) -> Tuple[int, ...]:
    return tuple(letter_key(x) for x in letters)


@dataclass(frozen=True)
class Word:
    """A freely reduced word; immutable."""

    letters: Tuple[int, ...]
    rank: int

    def __post_init__(self):
        check_letters(self.letters, self.rank)
        for i in range(len(self.letters) - 1):
            if self.letters[i] == -self.letters[i + 1]:
                raise InputError(f"word {self.letters} is not freely reduced")

    def __len__(self) -> int:
        return len(self.letters)

    def inverse(self) -> "Word":
        return Word(invert_letters(self.letters), self.rank)

    def __str__(self) -> str:
        return letters_to_text(self.letters)


@dataclass(frozen=True)
class CyclicWord:
    """A cyclically reduced word stored in its canonical rotation.

    The canonical rotation is lexicographically minimal under the letter
    order a1 < a1^-1 < a2 < a2^-1 < ...  Orientation is not quotiented:
    a cyclic word and its inverse are distinct values.
    """

    letters: Tuple[int, ...]
    rank: int

    def __post_init__(self):
        check_letters(self.letters, self.rank)
        n = len(self.letters)
        for i in range(n):
            if n > 1 and self.letters[i] == -self.letters[(i + 1) % n]:
                raise InputError(f"{self.letters} is not cyclically reduced")
        if n and self.letters != min_rotation(self.letters):
            raise InputError(f"{self.letters} is not in canonical rotation")

    def __len__(self) -> int:
        return len(self.letters)

    def inverse(self) -> "CyclicWord":
        return CyclicWord(min_rotation(invert_letters(self.letters)), self.rank)

    def __str__(self) -> str:
        return letters_to_text(self.letters)


def min_rotation(letters: Sequence[int]) -> Tuple[int, ...]:
    """Lexicographically minimal rotation (Booth-style scan)."""
    n = len(letters)
    if n == 0:
        return tuple(letters)
    keys = [letter_key(x) for x in letters]
    best = 0
    for i in range(1, n):
        for k in range(n):
            a = keys[(best + k) % n]
            b = keys[(i + k) % n]
            if a != b:
                if b < a:
                    best = i
                break
    return tuple(letters[best:]) + tuple(letters[:best])


def word(letters: Iterable[int], rank: int) -> Word:
    """Build a Word, freely reducing the input first."""
    check_letters(letters := tuple(letters), rank)
    return Word(free_reduce(letters), rank)


def reduce(raw: Iterable[int], rank: int) -> Word:
    """Freely reduce a raw letter sequence into a Word."""
    return word(raw, rank)


def concat_reduce(u: Word, v: Word) -> Word:
    if u.rank != v.rank:
        raise InputError(f"rank mismatch: {u.rank} vs {v.rank}")
    return Word(free_reduce(u.letters + v.letters), u.rank)


def cyclic_reduce(w: Word) -> Tuple[CyclicWord, Word]:
    """Split ``w = c * core * c^-1`` with ``core`` cyclically reduced.

    Returns (canonical cyclic word, conjugator c).
    """
    letters = list(w.letters)
    conj: list[int] = []
    while len(letters) >= 2 and letters[0] == -letters[-1]:
        conj.append(letters.pop(0))
        letters.pop()
    return (
        CyclicWord(min_rotation(letters), w.rank),
        Word(tuple(conj), w.rank),
    )


def cyclic_length(w: Word) -> int:
    """Cyclically reduced length ||w||."""
    return len(cyclic_reduce(w)[0])


def occurrences(v: Word, w: CyclicWord) -> int:
    """Occurrences of v and v^-1 in the cyclic word w.

    Counts starting positions in 0..len(w)-1 where v (or its inverse)
    matches w read cyclically; |v| may exceed |w|, in which case the
    match wraps around repeatedly.
    """
    if len(v) == 0:
        raise InputError("occurrence pattern must be nonempty")
    if v.rank != w.rank:
        raise InputError(f"rank mismatch: {v.rank} vs {w.rank}")
    n = len(w)
    if n == 0:
        return 0
    total = 0
    targets = [v.letters, invert_letters(v.letters)]
    if targets[0] == targets[1]:  # cannot happen for reduced v, guard anyway
        targets = targets[:1]
    for pat in targets:
        m = len(pat)
        for i in range(n):
            if all(w.letters[(i + j) % n] == pat[j] for j in range(m)):
                total += 1
    return total


# --- text I/O -------------------------------------------------------------

def letters_to_text(letters: Sequence[int]) -> str:
    out = []
    for x in letters:
        if abs(x) > 26:
            raise InputError("text form only supports rank <= 26")
        c = chr(ord("a") + abs(x) - 1)
        out.append(c if x > 0 else c.upper())
    return "".join(out)


def text_to_letters(text: str) -> Tuple[int, ...]:
    out = []
    for ch in text.strip():
        if ch.islower():
            out.append(ord(ch) - ord("a") + 1)
        elif ch.isupper():
            out.append(-(ord(ch) - ord("A") + 1))
        else:
            raise InputError(f"invalid character {ch!r} in word {text!r}")
    return tuple(out)


def parse_word(text: str, rank: int) -> Word:
    return word(text_to_letters(text), rank)
