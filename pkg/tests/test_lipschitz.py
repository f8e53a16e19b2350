from fractions import Fraction

from hypothesis import given, settings, strategies as st

from outerstretch.automorphisms import (
    certify_basis,
    parse_endomorphism,
    random_automorphism,
)
from outerstretch.lipschitz import (
    brute_force_distortion,
    candidates,
    canonical_cyclic_words,
    extremal_stretch,
    extremal_stretch_by_candidates,
    lambda_distortion,
    lipschitz_distance,
)
from outerstretch.marked_graphs import (
    act,
    random_marked_graph,
    rose,
    translation_length,
    unit_rose,
)
from outerstretch.words import Word, parse_word


def test_candidates_of_unit_rose_rank2():
    cand = candidates(unit_rose(2))
    words = [w for w, _ in cand.circuit_lengths]
    # every circuit crosses each unoriented edge at most twice
    for w in words:
        for x in (1, 2):
            assert sum(1 for y in w.letters if abs(y) == x) <= 2
    texts = {str(w) for w in words}
    assert {"a", "b"} <= texts
    assert len(words) == len(texts) == 17  # regression pin


def test_lambda_distortion_known_value():
    T = rose(2, [Fraction(1, 2), Fraction(1, 2)])
    phi = certify_basis(parse_endomorphism("a->ab; b->b"))
    S = act(T, phi)
    lam, witness = lambda_distortion(T, S)
    assert lam == 2
    assert translation_length(S, witness) == lam * translation_length(T, witness)


def test_distortion_against_brute_force_small():
    for seed in range(8):
        T = random_marked_graph(2, ("bf", seed))
        S = random_marked_graph(2, ("bf2", seed))
        lam, _ = lambda_distortion(T, S)
        assert lam == brute_force_distortion(T, S, 6)


@given(st.integers(0, 60))
@settings(max_examples=30, deadline=None)
def test_extremal_stretch_matches_candidate_machinery(seed):
    phi = random_automorphism(2, 4, ("ext", seed))
    lam, witness = extremal_stretch(phi)
    assert lam == extremal_stretch_by_candidates(phi)
    assert len(witness) in (1, 2)


def test_witness_attains_maximum():
    phi = certify_basis(parse_endomorphism("a->ab; b->a"))
    lam, witness = extremal_stretch(phi)
    assert lam == 2


def test_lipschitz_distance_vanishes_on_equal_graphs():
    T = rose(2, [Fraction(1, 2), Fraction(1, 2)])
    assert lipschitz_distance(T, T) == 0.0


def test_distortion_submultiplicative_over_composition():
    T = random_marked_graph(2, "tri0")
    S = random_marked_graph(2, "tri1")
    U = random_marked_graph(2, "tri2")
    assert (
        lambda_distortion(T, U)[0]
        <= lambda_distortion(T, S)[0] * lambda_distortion(S, U)[0]
    )


def test_canonical_cyclic_words_counts():
    # cyclically reduced classes up to rotation and inversion, rank 2
    assert len(list(canonical_cyclic_words(1, 2))) == 4
    assert len(list(canonical_cyclic_words(2, 2))) == 8
