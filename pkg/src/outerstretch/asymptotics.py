"""Growth of stretching factors under iteration.

Sequences lambda_A(phi^n) and Lambda_A(phi^n) grow like lambda^n n^m for
the algebraic stretching factor lambda and an integer polynomial degree
m; this module produces the sequences by iterated composition and fits
the pair (lambda, m) together with a multiplicative envelope.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Sequence, Tuple

from .automorphisms import (
    Automorphism,
    CompositionCapError,
    apply_endo,
    compose_automorphisms,
)
from .lipschitz import extremal_stretch
from .stretch import (
    DriftWindowError,
    exact_generic_stretch,
    mc_generic_stretch,
)
from .words import InputError, Word, cyclic_length

# drift machines for high powers grow geometrically; beyond this cap the
# generic sequence switches to Monte Carlo estimates
DEFAULT_GENERIC_STATE_CAP = 60000
MC_FALLBACK_STEPS = 10 ** 6
MC_FALLBACK_TRIALS = 10


@dataclass(frozen=True)
class PowerSequence:
    mode: str  # "generic" or "extremal"
    values: Tuple[Fraction, ...]
    # per-entry: True when the value is a Monte Carlo estimate rather
    # than an exact rational (generic mode only)
    estimated: Tuple[bool, ...]
    stderrs: Tuple[Optional[float], ...]
    truncated: bool  # composition length cap reached before n_max

    def floats(self) -> Tuple[float, ...]:
        return tuple(float(v) for v in self.values)


def power_stretch_sequence(
    phi: Automorphism,
    n_max: int,
    mode: str = "extremal",
    seed: int = 0,
    state_cap: int = DEFAULT_GENERIC_STATE_CAP,
) -> PowerSequence:
    """[lambda_A(phi^n)] (generic) or [Lambda_A(phi^n)] (extremal) for
    n = 1..n_max.  Generic entries are exact while the drift machine
    fits in state_cap; past that they are Monte Carlo estimates, flagged
    in `estimated` with their standard errors."""
    if n_max < 1:
        raise InputError("n_max must be >= 1")
    if mode not in ("generic", "extremal"):
        raise InputError(f"unknown mode {mode!r}")
    values = []
    estimated = []
    stderrs = []
    truncated = False
    power = phi
    for n in range(1, n_max + 1):
        if mode == "extremal":
            values.append(extremal_stretch(power)[0])
            estimated.append(False)
            stderrs.append(None)
        else:
            try:
                values.append(
                    exact_generic_stretch(power, state_cap=state_cap).value
                )
                estimated.append(False)
                stderrs.append(None)
            except DriftWindowError:
                mean, se = mc_generic_stretch(
                    power,
                    steps=MC_FALLBACK_STEPS,
                    trials=MC_FALLBACK_TRIALS,
                    seed=f"power:{seed}:{n}",
                )
                values.append(Fraction(mean).limit_denominator(10 ** 12))
                estimated.append(True)
                stderrs.append(se)
        if n < n_max:
            try:
                power = compose_automorphisms(phi, power)
            except CompositionCapError:
                truncated = True
                break
    return PowerSequence(
        mode, tuple(values), tuple(estimated), tuple(stderrs), truncated
    )


@dataclass(frozen=True)
class GrowthFit:
    lambda_est: float
    m_est: int
    c1: float
    c2: float
    flagged: bool  # non-monotone input; envelope is the widest seen

    @property
    def spread(self) -> float:
        return self.c2 / self.c1


def _lambda_for_m(seq: Sequence[float], m: int) -> Tuple[float, float]:
    """(lambda estimate, tail drift) for a fixed polynomial degree m.

    Corrected ratios s(n+1)/s(n) * (n/(n+1))^m converge to lambda; the
    last three are Aitken-extrapolated, and the drift (their spread
    relative to the estimate) measures how settled the fit is."""
    lams = [
        seq[i + 1] / seq[i] * ((i + 1) / (i + 2)) ** m
        for i in range(len(seq) - 1)
    ]
    a, b, c = lams[-3], lams[-2], lams[-1]
    denom = (c - b) - (b - a)
    lam = c - (c - b) ** 2 / denom if abs(denom) > 1e-12 * max(c, 1.0) else c
    if not math.isfinite(lam) or lam <= 0:
        lam = sum(lams[-3:]) / 3
    drift = abs(lams[-1] - lams[-3]) / lam
    return lam, drift


def growth_fit(
    sequence: Sequence, candidate_m_range: Iterable[int] = range(0, 5)
) -> GrowthFit:
    """Fit sequence(n) ~ c * lambda^n * n^m with integer m from the
    candidate range; the envelope (c1, c2) brackets every point."""
    seq = [float(v) for v in sequence]
    if len(seq) < 4:
        raise InputError("need at least 4 sequence values to fit")
    if any(v <= 0 for v in seq):
        raise InputError("sequence values must be positive")
    candidates = sorted(set(int(m) for m in candidate_m_range))
    if not candidates or any(m < 0 for m in candidates):
        raise InputError("candidate degrees must be nonnegative")
    best = None
    for m in candidates:
        lam, drift = _lambda_for_m(seq, m)
        if best is None or drift < best[0]:
            best = (drift, m, lam)
    _, m_est, lam = best
    env = [seq[i] / (lam ** (i + 1) * (i + 1) ** m_est) for i in range(len(seq))]
    flagged = any(seq[i + 1] < seq[i] for i in range(len(seq) - 1))
    return GrowthFit(lam, m_est, min(env), max(env), flagged)


def algebraic_stretch_estimate(
    phi: Automorphism, witness_words: Sequence[Word], n_max: int
) -> Tuple[float, int]:
    """max over witnesses of ||phi^n_max(w)||^(1/n_max): a finite-n
    estimate of the algebraic stretching factor sup_w lim ||phi^n(w)||^(1/n).
    Returns (estimate, n_max used)."""
    if not witness_words:
        raise InputError("need at least one witness word")
    if n_max < 1:
        raise InputError("n_max must be >= 1")
    best = 0.0
    for w in witness_words:
        cur = w
        for _ in range(n_max):
            cur = apply_endo(phi.forward, cur)
        norm = cyclic_length(cur)
        if norm > 0:
            best = max(best, norm ** (1.0 / n_max))
        else:
            best = max(best, 1.0)  # torsion-free: only the trivial word
    return best, n_max
