from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from outerstretch.automorphisms import (
    certify_basis,
    parse_endomorphism,
    phi_family,
    random_automorphism,
)
from outerstretch.marked_graphs import rose
from outerstretch.stretch import (
    DriftWindowError,
    _pairwise_drift,
    build_drift_machine,
    exact_drift,
    exact_generic_stretch,
    mc_generic_stretch,
    sigma_for_automorphism,
    sigma_for_tree,
    symmetrized_I,
)

NIELSEN = certify_basis(parse_endomorphism("a->ab; b->b"))


def test_nielsen_generic_stretch_exact():
    result = exact_generic_stretch(NIELSEN)
    assert result.value == Fraction(7, 6)
    assert result.state_count > 0


def test_tree_drift_scales_with_edge_lengths():
    T = rose(2, [Fraction(1, 2), Fraction(1, 2)])
    result = exact_generic_stretch(T)
    assert result.value == Fraction(1, 2)
    T2 = rose(2, [Fraction(1, 3), Fraction(2, 3)])
    assert exact_generic_stretch(T2).value == Fraction(1, 2)


def test_permutational_automorphisms_have_stretch_one():
    for text in ("a->b; b->a", "a->A; b->b", "a->B; b->A"):
        phi = certify_basis(parse_endomorphism(text))
        assert exact_generic_stretch(phi).value == 1


def test_phi_family_values():
    # lambda(phi_{N,m}) <= 1 + m/N with known small cases
    assert exact_generic_stretch(phi_family(2, 1)).value == Fraction(7, 6)
    assert exact_generic_stretch(phi_family(3, 2)).value == Fraction(37, 25)
    assert exact_generic_stretch(phi_family(4, 5)).value == Fraction(
        142593, 67228
    )


def test_symmetrized_I_nielsen():
    assert symmetrized_I(NIELSEN) == Fraction(49, 36)


@given(st.integers(0, 80))
@settings(max_examples=25, deadline=None)
def test_pairwise_fast_path_agrees_with_machine(seed):
    phi = random_automorphism(2, 4, ("pw", seed))
    sigma, weights = sigma_for_automorphism(phi)
    fast = _pairwise_drift(sigma, weights, 2)
    machine = build_drift_machine(sigma, weights, 2)
    exact = exact_drift(machine)
    if fast is not None:
        assert fast.value == exact.value
    assert exact.value == exact_generic_stretch(phi).value


@given(st.integers(0, 60))
@settings(max_examples=20, deadline=None)
def test_generic_at_most_extremal_and_positive(seed):
    from outerstretch.lipschitz import extremal_stretch

    phi = random_automorphism(2, 4, ("le", seed))
    lam = exact_generic_stretch(phi).value
    assert 0 < lam <= extremal_stretch(phi)[0]


def test_denominator_law_sample():
    # 2N * lambda has denominator a power of 2N-1
    for seed in range(10):
        phi = random_automorphism(2, 5, ("den", seed))
        q = (4 * exact_generic_stretch(phi).value).denominator
        while q % 3 == 0:
            q //= 3
        assert q == 1


def test_mc_agrees_with_exact():
    mean, stderr = mc_generic_stretch(NIELSEN, steps=200000, trials=6, seed=0)
    assert stderr > 0
    assert abs(mean - 7 / 6) <= 4 * stderr


def test_mc_is_deterministic_per_seed():
    a = mc_generic_stretch(NIELSEN, steps=20000, trials=3, seed=5)
    b = mc_generic_stretch(NIELSEN, steps=20000, trials=3, seed=5)
    c = mc_generic_stretch(NIELSEN, steps=20000, trials=3, seed=6)
    assert a == b
    assert a != c


def test_python_and_numba_paths_both_converge():
    mean_py, err_py = mc_generic_stretch(
        NIELSEN, steps=100000, trials=4, seed=1, use_numba=False
    )
    assert abs(mean_py - 7 / 6) <= 4 * err_py


def test_state_cap_raises_window_error():
    phi = certify_basis(parse_endomorphism("a->ab; b->a"))
    sigma, weights = sigma_for_automorphism(phi)
    with pytest.raises(DriftWindowError):
        build_drift_machine(sigma, weights, 2, state_cap=3)


def test_tree_input_via_sigma():
    T = rose(3, [1, 1, 1])
    sigma, weights = sigma_for_tree(T)
    assert exact_drift(build_drift_machine(sigma, weights, 3)).value == 1
