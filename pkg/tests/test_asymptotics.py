import math
from fractions import Fraction

import pytest

from outerstretch.asymptotics import (
    algebraic_stretch_estimate,
    growth_fit,
    power_stretch_sequence,
)
from outerstretch.automorphisms import certify_basis, parse_endomorphism
from outerstretch.words import parse_word

NIELSEN = certify_basis(parse_endomorphism("a->ab; b->b"))
FIB = certify_basis(parse_endomorphism("a->ab; b->a"))


def test_extremal_power_sequence_exact():
    seq = power_stretch_sequence(NIELSEN, 5, mode="extremal")
    assert seq.values == (
        Fraction(2),
        Fraction(3),
        Fraction(4),
        Fraction(5),
        Fraction(6),
    )
    assert not any(seq.estimated)
    assert not seq.truncated


def test_generic_power_sequence_exact_prefix():
    seq = power_stretch_sequence(NIELSEN, 4, mode="generic")
    assert seq.values[:2] == (Fraction(7, 6), Fraction(13, 9))
    assert not any(seq.estimated)


def test_generic_power_sequence_falls_back_to_mc():
    # phi^n grows exponentially, so the exact engine hits the state cap
    # quickly and later entries are Monte Carlo estimates (flagged)
    seq = power_stretch_sequence(FIB, 4, mode="generic", state_cap=200)
    assert any(seq.estimated)
    exact_count = sum(1 for e in seq.estimated if not e)
    assert exact_count >= 1
    for flag, err in zip(seq.estimated, seq.stderrs):
        assert (err is not None) == flag


def test_growth_fit_polynomial_case():
    # lambda = 1, ||phi^n|| ~ c n for the unipotent family
    seq = power_stretch_sequence(NIELSEN, 8, mode="extremal")
    fit = growth_fit(seq.floats())
    assert fit.m_est == 1
    assert abs(fit.lambda_est - 1) < 0.05
    assert fit.spread < 10


def test_growth_fit_exponential_case():
    golden = (1 + math.sqrt(5)) / 2
    seq = power_stretch_sequence(FIB, 12, mode="extremal")
    fit = growth_fit(seq.floats())
    assert fit.m_est in (0, 1)
    assert abs(fit.lambda_est - golden) / golden < 0.03
    assert fit.spread < 10


def test_growth_fit_envelope_brackets_data():
    seq = power_stretch_sequence(FIB, 10, mode="extremal")
    values = seq.floats()
    fit = growth_fit(values)
    for i, v in enumerate(values, start=1):
        model = fit.lambda_est ** i * i ** fit.m_est
        assert fit.c1 * model <= v * (1 + 1e-9)
        assert v <= fit.c2 * model * (1 + 1e-9)


def test_growth_fit_needs_enough_points():
    with pytest.raises(Exception):
        growth_fit([1.0, 2.0])


def test_algebraic_stretch_estimate():
    witness = [parse_word("a", 2)]
    est, n = algebraic_stretch_estimate(FIB, witness, 12)
    golden = (1 + math.sqrt(5)) / 2
    assert abs(est - golden) < 0.05
    assert n == 12
