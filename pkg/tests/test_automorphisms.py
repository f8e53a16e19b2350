import pytest
from hypothesis import given, settings, strategies as st

from outerstretch.automorphisms import (
    CompositionCapError,
    NotABasis,
    apply_endo,
    certify_basis,
    compose,
    compose_automorphisms,
    identity,
    parse_endomorphism,
    permutational_generators,
    phi_family,
    random_automorphism,
    replay_certificate,
    whitehead_and_nielsen_generators,
)
from outerstretch.words import parse_word


def _assert_inverse_pair(phi):
    rank = phi.rank
    for x in range(1, rank + 1):
        w = parse_word("abcde"[x - 1], rank)
        assert apply_endo(phi.inverse, apply_endo(phi.forward, w)).letters == (x,)
        assert apply_endo(phi.forward, apply_endo(phi.inverse, w)).letters == (x,)


def test_certify_nielsen_map():
    phi = certify_basis(parse_endomorphism("a->ab; b->b"))
    assert phi
    _assert_inverse_pair(phi)
    # the certificate replays to the forward map
    assert replay_certificate(phi.certificate, 2).images == phi.forward.images


def test_certify_rejects_non_basis():
    bad = certify_basis(parse_endomorphism("a->ab; b->ba"))
    assert isinstance(bad, NotABasis)
    assert not bad
    bad2 = certify_basis(parse_endomorphism("a->a; b->a"))
    assert not bad2


def test_parse_endomorphism_defaults_missing_generators_to_identity():
    phi = parse_endomorphism("a->ab", rank=2)
    assert phi.images[1].letters == (2,)


def test_parse_endomorphism_rejects_garbage():
    with pytest.raises(Exception):
        parse_endomorphism("a->a%; b->b")
    with pytest.raises(Exception):
        parse_endomorphism("")


def test_compose_is_substitution():
    f = parse_endomorphism("a->ab; b->b")
    g = parse_endomorphism("a->a; b->ba")
    fg = compose(f, g)  # w -> f(g(w))
    w = parse_word("a", 2)
    assert apply_endo(fg, w) == apply_endo(f, apply_endo(g, w))


@given(st.integers(0, 40))
@settings(max_examples=25, deadline=None)
def test_random_automorphism_is_certified(seed):
    phi = random_automorphism(2, 4, seed)
    _assert_inverse_pair(phi)


@given(st.integers(0, 20))
@settings(max_examples=10, deadline=None)
def test_random_automorphism_is_seed_deterministic(seed):
    a = random_automorphism(3, 4, seed)
    b = random_automorphism(3, 4, seed)
    assert a.forward.images == b.forward.images


def test_compose_automorphisms_tracks_inverse():
    a = random_automorphism(2, 4, 1)
    b = random_automorphism(2, 4, 2)
    ab = compose_automorphisms(a, b)
    _assert_inverse_pair(ab)
    w = parse_word("ab", 2)
    assert apply_endo(ab.forward, w) == apply_endo(
        a.forward, apply_endo(b.forward, w)
    )


def test_composition_cap_raises():
    phi = parse_endomorphism("a->ab; b->a")
    with pytest.raises(CompositionCapError):
        acc = phi
        for _ in range(200):
            acc = compose(acc, acc, length_cap=10 ** 4)


def test_generator_families():
    gens = whitehead_and_nielsen_generators(3)
    assert len(gens) > 0
    for g in gens:
        _assert_inverse_pair(g)
    for g in permutational_generators(3):
        images = g.forward.images
        assert all(len(im) == 1 for im in images)


def test_phi_family_images():
    phi = phi_family(2, 3)
    assert str(phi.forward).replace(" ", "") in (
        "a->abbb;b->b",
        "a->ab^3;b->b",
    ) or len(phi.forward.images[0]) == 4
    _assert_inverse_pair(phi)
    phi43 = phi_family(4, 2)
    assert phi43.rank == 4
    _assert_inverse_pair(phi43)
