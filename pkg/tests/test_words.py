import pytest
from hypothesis import given, strategies as st

from outerstretch.words import (
    CyclicWord,
    InputError,
    Word,
    concat_reduce,
    cyclic_length,
    cyclic_reduce,
    free_reduce,
    invert_letters,
    letters_to_text,
    min_rotation,
    occurrences,
    parse_word,
    text_to_letters,
    word,
)

letters_st = st.lists(
    st.integers(min_value=-3, max_value=3).filter(lambda x: x != 0),
    max_size=30,
).map(tuple)


@given(letters_st)
def test_free_reduce_idempotent(letters):
    once = free_reduce(letters)
    assert free_reduce(once) == once


@given(letters_st)
def test_reduce_commutes_with_inversion(letters):
    assert free_reduce(invert_letters(letters)) == invert_letters(
        free_reduce(letters)
    )


@given(letters_st)
def test_word_times_inverse_is_trivial(letters):
    w = word(free_reduce(letters), 3)
    winv = word(invert_letters(w.letters), 3)
    assert len(concat_reduce(w, winv)) == 0


@given(letters_st)
def test_min_rotation_is_a_rotation_and_invariant(letters):
    reduced = free_reduce(letters)
    canon = min_rotation(reduced)
    assert sorted(canon) == sorted(reduced)
    for k in range(len(reduced)):
        assert min_rotation(reduced[k:] + reduced[:k]) == canon


@given(letters_st)
def test_cyclic_reduce_conjugation_identity(letters):
    w = word(free_reduce(letters), 3)
    cyc, conj = cyclic_reduce(w)
    # w is conjugate to (a rotation of) cyc, so conj * cyc * conj^-1
    # cyclically reduces back to the same canonical class
    middle = word(cyc.letters, 3)
    rebuilt = concat_reduce(
        concat_reduce(conj, middle),
        word(invert_letters(conj.letters), 3),
    )
    assert cyclic_reduce(rebuilt)[0] == cyc
    assert cyclic_length(w) == len(cyc)


def test_cyclic_reduce_examples():
    w = parse_word("aBabA", 2)  # = (aB) a (aB)^-1
    cyc, conj = cyclic_reduce(w)
    assert cyc.letters == (1,)
    assert conj.letters == (1, -2)


def test_occurrences_counts_value_and_inverse_cyclically():
    w = CyclicWord(parse_word("abaB", 2).letters, 2)
    assert occurrences(parse_word("a", 2), w) == 2
    assert occurrences(parse_word("ab", 2), w) == 1
    assert occurrences(parse_word("ba", 2), w) == 1  # via the wraparound
    assert occurrences(parse_word("AB", 2), w) == 1  # inverse of ba


def test_parse_and_format_roundtrip():
    for text in ("abAB", "a", "bbbA", "cBa"):
        assert letters_to_text(text_to_letters(text)) == text


def test_parse_rejects_out_of_rank_letters():
    with pytest.raises(InputError):
        parse_word("ac", 2)
    with pytest.raises(InputError):
        Word((1, 5), 2)


def test_word_rejects_unreduced():
    with pytest.raises(InputError):
        Word((1, -1), 2)
    with pytest.raises(InputError):
        CyclicWord((1, 2, -1), 2)  # cyclically unreduced
