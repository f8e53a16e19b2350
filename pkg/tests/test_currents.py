import math
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from outerstretch.currents import (
    counting_current,
    flip_defect,
    intersection_form,
    j_current,
    j_current_weight,
    switch_defect,
    uniform_current,
    volume_entropy,
    weight_table,
    word_length_constant,
)
from outerstretch.marked_graphs import (
    act,
    dumbbell,
    random_marked_graph,
    rose,
    theta,
    translation_length,
    unit_rose,
)
from outerstretch.automorphisms import apply_endo, random_automorphism
from outerstretch.words import parse_word


def test_counting_current_weights():
    mu = counting_current(parse_word("abaB", 2))
    assert mu.weight(parse_word("a", 2)) == 2
    assert mu.weight(parse_word("ab", 2)) == 1
    assert mu.weight(parse_word("bb", 2)) == 0


def test_counting_current_rejects_trivial():
    from outerstretch.words import InputError

    with pytest.raises(InputError):
        counting_current(parse_word("aA", 2))


def test_uniform_current_weights():
    nu = uniform_current(2)
    assert nu.weight(parse_word("a", 2)) == Fraction(1, 2)
    assert nu.weight(parse_word("ab", 2)) == Fraction(1, 6)
    assert nu.weight(parse_word("aba", 2)) == Fraction(1, 18)


def test_weight_tables_are_consistent():
    for mu in (uniform_current(2), counting_current(parse_word("abAB", 2))):
        table = weight_table(mu, 4)
        assert flip_defect(table) == 0
        assert switch_defect(table) == 0
        # each level of the uniform table sums to 2 (both orientations)
        if not hasattr(mu, "w"):
            by_len = {}
            for v, w in table.entries:
                by_len[len(v)] = by_len.get(len(v), Fraction(0)) + w
            assert all(total == 2 for total in by_len.values())


@given(st.integers(0, 40))
@settings(max_examples=20, deadline=None)
def test_pairing_with_counting_current_is_translation_length(seed):
    T = random_marked_graph(2, ("pair", seed))
    w = parse_word("abAB"[seed % 4] + "ab", 2)
    assert intersection_form(T, counting_current(w)) == translation_length(T, w)


def test_uniform_pairing_on_roses():
    assert intersection_form(unit_rose(2), uniform_current(2)) == 1
    assert intersection_form(unit_rose(5), uniform_current(5)) == 1
    T = rose(2, [Fraction(1, 3), Fraction(2, 3)])
    assert intersection_form(T, uniform_current(2)) == Fraction(1, 2)


def test_uniform_pairing_needs_single_vertex_graph():
    from outerstretch.words import InputError

    with pytest.raises(InputError):
        intersection_form(theta([1, 1, 1]), uniform_current(2))


@given(st.integers(0, 30))
@settings(max_examples=15, deadline=None)
def test_pairing_equivariance(seed):
    T = random_marked_graph(2, ("eq", seed))
    phi = random_automorphism(2, 4, ("eq", seed))
    w = parse_word("ab", 2)
    lhs = intersection_form(act(T, phi), counting_current(w))
    rhs = intersection_form(T, counting_current(apply_endo(phi.forward, w)))
    assert lhs == rhs


def test_volume_entropy_of_roses():
    for n in range(2, 6):
        assert abs(volume_entropy(unit_rose(n)) - math.log(2 * n - 1)) < 1e-10


def test_volume_entropy_scaling():
    T = dumbbell(Fraction(1, 4), Fraction(1, 2), Fraction(1, 4))
    T2 = dumbbell(Fraction(1, 2), 1, Fraction(1, 2))
    h = volume_entropy(T)
    assert h > 0
    assert abs(volume_entropy(T2) - h / 2) < 1e-9


def test_j_current_tail_certificate():
    T = rose(2, [1, 1])
    mu = j_current(T, 1e-6)
    assert mu.tail_bound < 1e-6
    assert all(t > 0 for _, t in mu.terms)


def test_j_current_weight_positive_on_short_words():
    T = rose(2, [1, 1])
    for text in ("a", "ab", "aB", "abA", "BAb"):
        value, tail = j_current_weight(T, parse_word(text, 2), 1e-6)
        assert value > 0
        assert tail < 1e-6


def test_j_current_separates_metrics():
    T = rose(2, [1, 1])
    S = rose(2, [Fraction(1, 2), Fraction(3, 2)])
    va, _ = j_current_weight(T, parse_word("a", 2), 1e-6)
    vb, _ = j_current_weight(S, parse_word("a", 2), 1e-6)
    assert abs(va - vb) > 10 * 1e-6


def test_word_length_constant_is_small_for_round_graphs():
    assert word_length_constant(unit_rose(2)) <= 4
    assert word_length_constant(theta([1, 1, 1])) <= 4
