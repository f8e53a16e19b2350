"""Generic stretching factors via the non-backtracking random walk.

Exact values come from a finite-window transducer: the walk's last few
input letters determine how much of the next substituted block cancels,
so the drift is an average of per-transition length increments over the
uniform distribution on reduced windows.  A Monte Carlo engine serves as
an independent oracle.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from .automorphisms import Automorphism
from .marked_graphs import MarkedGraph, translation_length
from .words import InputError, Word, invert_letters, word

Symbol = int  # nonzero int; inverse symbol is the negation
Sigma = Dict[int, Tuple[Symbol, ...]]

DEFAULT_TAIL_CAP = 1 << 14  # max tracked-suffix width


class DriftWindowError(RuntimeError):
    """Machine construction exceeded its size caps."""

    def __init__(self, window: int, states: int):
        self.window = window
        self.states = states
        super().__init__(
            f"drift machine cap exceeded (window/width {window}, "
            f"{states} states)"
        )


@dataclass(frozen=True)
class DriftMachine:
    n: int
    window: int  # steps until the state distribution stabilized
    state_count: int
    sigma: Tuple[Tuple[Symbol, ...], ...]  # indexed by letter slot
    weights: Tuple[int, ...]  # per |symbol|, scaled to integers
    weight_scale: int  # true weight = weights[|s|] / weight_scale
    tail_width: int
    stationary: Tuple = ()


@dataclass(frozen=True)
class DriftResult:
    value: Fraction
    state_count: int
    window: int


def _slot(x: int) -> int:
    # letter -> index in 0..2n-1: a1, a1^-1, a2, ...
    return 2 * (abs(x) - 1) + (0 if x > 0 else 1)


def sigma_for_automorphism(phi: Automorphism) -> Tuple[Sigma, Dict[int, Fraction]]:
    sig: Sigma = {}
    for i, im in enumerate(phi.forward.images):
        if len(im) == 0:
            raise InputError("automorphism image is trivial")
        sig[i + 1] = im.letters
        sig[-(i + 1)] = invert_letters(im.letters)
    weights = {i + 1: Fraction(1) for i in range(phi.rank)}
    return sig, weights


def sigma_for_tree(T: MarkedGraph) -> Tuple[Sigma, Dict[int, Fraction]]:
    """Substitution sending each generator to its reduced edge-path loop;
    symbols are signed (1-based) edge indices, weighted by edge length."""
    from .marked_graphs import circuit_for

    sig: Sigma = {}
    for i in range(T.rank):
        w = word([i + 1], T.rank)
        marking = T._marking
        from .automorphisms import apply_endo

        u = apply_endo(marking.basis.inverse, w)
        path: List[Symbol] = []
        for x in u.letters:
            loop = marking.loops[abs(x) - 1]
            if x < 0:
                loop = tuple((j, -s) for j, s in reversed(loop))
            for j, s in loop:
                sym = s * (j + 1)
                if path and path[-1] == -sym:
                    path.pop()
                else:
                    path.append(sym)
        if not path:
            raise InputError("marking produced a trivial loop")
        sig[i + 1] = tuple(path)
        sig[-(i + 1)] = tuple(-s for s in reversed(path))
    weights = {j + 1: e.length for j, e in enumerate(T.edges)}
    return sig, weights


def _scale_weights(
    sigma: Sigma, weights: Dict[int, Fraction]
) -> Tuple[Tuple[int, ...], int]:
    syms = {abs(s) for block in sigma.values() for s in block}
    scale = 1
    for s in syms:
        scale = scale * weights[s].denominator // math.gcd(
            scale, weights[s].denominator
        )
    table = [0] * (max(syms) + 1)
    for s in syms:
        table[s] = int(weights[s] * scale)
    return tuple(table), scale


def _junction_cancel(left: Sequence[Symbol], block: Sequence[Symbol]) -> int:
    c = 0
    nl, nb = len(left), len(block)
    while c < nl and c < nb and left[nl - 1 - c] == -block[c]:
        c += 1
    return c


# A state is (last input letter, tracked suffix of the reduced image,
# exact flag).  The suffix is the TRUE trailing segment of the reduced
# image of the walk so far; exact means the whole image is tracked.
# Cancellation of the next block must resolve inside the tracked suffix,
# so per-transition length increments are correct for every history
# pooled in the state.
State = Tuple[int, Tuple[Symbol, ...], bool]

_BASE_WIDTH = 2


class _Deepen(Exception):
    """Some tail patterns must be tracked more deeply; restart the build
    with the collected rule updates."""

    def __init__(self, updates: Dict[Tuple[Symbol, ...], int]):
        self.updates = updates
        super().__init__(f"{len(updates)} deepening rules")


class _RuleTrie:
    """Suffix-keyed width requirements: a rule (p, w) forces any state
    whose image ends with p to track at least w symbols."""

    def __init__(self):
        self.root: dict = {"w": 0, "L": 0}

    def insert(self, pattern: Tuple[Symbol, ...], width: int) -> bool:
        node = self.root
        node["L"] = max(node["L"], len(pattern))
        for sym in reversed(pattern):
            node = node.setdefault(sym, {"w": 0, "L": 0})
            node["L"] = max(node["L"], len(pattern))
        if width <= node["w"]:
            return False
        node["w"] = width
        return True

    def required_width(self, tail: Sequence[Symbol], exact: bool) -> int:
        """Minimum width to store for a state with known trailing symbols
        `tail`; a negative return -d means d more known symbols are
        needed to decide whether a longer rule pattern applies."""
        node = self.root
        w = _BASE_WIDTH
        for i in range(1, len(tail) + 1):
            node = node.get(tail[-i])
            if node is None:
                return w
            if node["w"]:
                w = max(w, node["w"])
        if not exact and any(isinstance(k, int) for k in node):
            return len(tail) - node["L"]  # <= -1 by construction
        return w


def _dp_stationary(
    sigma: Sigma,
    n: int,
    rules: _RuleTrie,
    step_cap: int,
    state_cap: int,
) -> Tuple[Dict[State, Fraction], int, int]:
    """Distribution of states under the walk, iterated to exact
    stationarity; returns (distribution, steps to stabilize, max width).
    Raises _Deepen when tracked suffixes are too shallow, after sweeping
    the whole reachable state space so one restart fixes a full round of
    shallow patterns."""
    letters = [x for x in range(-n, n + 1) if x != 0]
    states: List[State] = []
    state_id: Dict[State, int] = {}
    transitions: List[Tuple[int, ...]] = []
    updates: Dict[Tuple[Symbol, ...], int] = {}

    def need(pattern: Tuple[Symbol, ...], width: int) -> None:
        if width > updates.get(pattern, 0):
            updates[pattern] = width

    def make_state(
        y: int,
        known: Tuple[Symbol, ...],
        exact: bool,
        pred_tail: Optional[Tuple[Symbol, ...]],
    ) -> Optional[State]:
        w = rules.required_width(known, exact)
        if w < 0 or (not exact and len(known) < w):
            assert pred_tail is not None  # initial states are exact
            deficit = (-w) if w < 0 else (w - len(known))
            need(pred_tail, len(pred_tail) + deficit)
            return None
        if len(known) > w:
            return (y, known[-w:], False)
        return (y, known, exact)

    def intern(state: State) -> int:
        sid = state_id.get(state)
        if sid is None:
            sid = len(states)
            state_id[state] = sid
            states.append(state)
        return sid

    # numerators over the implicit denominator 2n(2n-1)^step
    init: Dict[int, int] = {}
    for y in letters:
        st = make_state(y, sigma[y], True, None)
        assert st is not None
        sid = intern(st)
        init[sid] = init.get(sid, 0) + 1

    # closure sweep: memoize every reachable transition, batching all
    # deepening needs before any restart
    frontier = 0
    while frontier < len(states):
        if len(states) > state_cap:
            raise DriftWindowError(-1, len(states))
        prev, tail, exact = states[frontier]
        nxt = []
        for y in letters:
            if y == -prev:
                continue
            block = sigma[y]
            c = _junction_cancel(tail, block)
            if not exact and c + 1 > len(tail) and c != len(block):
                # cancellation may reach unknown symbols; require enough
                # to resolve it (the block bounds how far it can run)
                need(tail, min(len(block) + 1, 2 * max(len(tail), 2)))
                continue
            merged = tail[: len(tail) - c] + block[c:]
            st = make_state(y, merged, exact, tail)
            if st is not None:
                nxt.append(intern(st))
        transitions.append(tuple(nxt))
        frontier += 1
    if updates:
        raise _Deepen(updates)

    dist = init
    branch = 2 * n - 1
    for step in range(1, step_cap + 1):
        new: Dict[int, int] = {}
        for sid, num in dist.items():
            for nid in transitions[sid]:
                new[nid] = new.get(nid, 0) + num
        if len(new) == len(dist) and all(
            new.get(s) == num * branch for s, num in dist.items()
        ):
            denom = 2 * n * branch ** (step - 1)
            width = max(len(st[1]) for st in states)
            return (
                {states[s]: Fraction(num, denom) for s, num in dist.items()},
                step,
                width,
            )
        dist = new
    raise RuntimeError(
        f"drift distribution did not stabilize within {step_cap} steps "
        f"({len(dist)} states)"
    )


def build_drift_machine(
    sigma: Sigma,
    weights: Dict[int, Fraction],
    n: int,
    tail_cap: int = DEFAULT_TAIL_CAP,
    step_cap: int = 2000,
    state_cap: int = 2000000,
    restart_cap: int = 500,
) -> DriftMachine:
    for x in range(1, n + 1):
        if x not in sigma or -x not in sigma:
            raise InputError(f"substitution missing letter {x}")
        if sigma[-x] != tuple(-s for s in reversed(sigma[x])):
            raise InputError("substitution must respect inversion")
    wtable, scale = _scale_weights(sigma, weights)
    sig_slots: List[Tuple[Symbol, ...]] = [()] * (2 * n)
    for x, block in sigma.items():
        sig_slots[_slot(x)] = tuple(block)
    rules = _RuleTrie()
    for _ in range(restart_cap):
        try:
            dist, steps, width = _dp_stationary(
                sigma, n, rules, step_cap, state_cap
            )
        except _Deepen as d:
            progressed = False
            for pattern, width in d.updates.items():
                if width > tail_cap:
                    raise DriftWindowError(width, -1)
                progressed |= rules.insert(pattern, width)
            if not progressed:  # pragma: no cover
                raise RuntimeError("deepening made no progress")
            continue
        return DriftMachine(
            n,
            steps,
            len(dist),
            tuple(sig_slots),
            wtable,
            scale,
            width,
            tuple(sorted(dist.items())),
        )
    raise DriftWindowError(-1, -1)  # pragma: no cover - restart cap


def exact_drift(machine: DriftMachine) -> DriftResult:
    n = machine.n
    sigma: Sigma = {}
    for x in range(1, n + 1):
        sigma[x] = machine.sigma[_slot(x)]
        sigma[-x] = machine.sigma[_slot(-x)]
    wt = machine.weights
    block_weight = {
        y: sum(wt[abs(s)] for s in block) for y, block in sigma.items()
    }
    letters = [x for x in range(-n, n + 1) if x != 0]
    total = Fraction(0)
    step_p = Fraction(1, 2 * n - 1)
    for (prev, tail, _exact), p in machine.stationary:
        for y in letters:
            if y == -prev:
                continue
            c = _junction_cancel(tail, sigma[y])
            cancelled = sum(wt[abs(s)] for s in sigma[y][:c])
            total += p * step_p * (block_weight[y] - 2 * cancelled)
    value = total / machine.weight_scale
    if value <= 0:
        raise RuntimeError(f"nonpositive drift {value}; machine is broken")
    return DriftResult(value, machine.state_count, machine.window)


def _pairwise_drift(
    sigma: Sigma, weights: Dict[int, Fraction], n: int
) -> Optional[DriftResult]:
    """Closed-form drift when junction cancellations never interact.

    If c(x,y) + c(y,z) < |sigma(y)| for every admissible triple, no block
    is ever consumed past its middle, so the reduced image length is
    exactly sum |sigma(x_i)| - 2 sum c(x_i, x_{i+1}) and the drift is an
    average over letter pairs.  Returns None when the condition fails
    (deep cancellations need the full state machine)."""
    letters = [x for x in range(-n, n + 1) if x != 0]
    cancel: Dict[Tuple[int, int], int] = {}
    for x in letters:
        for y in letters:
            if y == -x:
                continue
            c = _junction_cancel(sigma[x], sigma[y])
            if c >= len(sigma[x]) or c >= len(sigma[y]):
                return None
            cancel[(x, y)] = c
    for x in letters:
        for y in letters:
            if y == -x:
                continue
            for z in letters:
                if z == -y:
                    continue
                if cancel[(x, y)] + cancel[(y, z)] >= len(sigma[y]):
                    return None
    total = Fraction(0)
    for x in letters:
        for y in letters:
            if y == -x:
                continue
            block = sigma[y]
            cut = cancel[(x, y)]
            total += sum(weights[abs(s)] for s in block)
            total -= 2 * sum(weights[abs(s)] for s in block[:cut])
    value = total / (2 * n * (2 * n - 1))
    if value <= 0:
        raise RuntimeError(f"nonpositive drift {value}")
    return DriftResult(value, 2 * n * (2 * n - 1), 2)


_EXACT_CACHE: Dict[Tuple, DriftResult] = {}


def exact_generic_stretch(
    target,
    tail_cap: int = DEFAULT_TAIL_CAP,
    state_cap: int = 2000000,
) -> DriftResult:
    """lambda_A of an Automorphism or a MarkedGraph, exactly."""
    if isinstance(target, Automorphism):
        key = ("aut", target.forward.images)
        sig_fn = sigma_for_automorphism
    elif isinstance(target, MarkedGraph):
        key = None
        sig_fn = sigma_for_tree
    else:
        raise InputError(f"unsupported target {type(target).__name__}")
    if key is not None and key in _EXACT_CACHE:
        return _EXACT_CACHE[key]
    sigma, weights = sig_fn(target)
    n = target.rank
    result = _pairwise_drift(sigma, weights, n)
    if result is None:
        result = exact_drift(
            build_drift_machine(
                sigma, weights, n, tail_cap, state_cap=state_cap
            )
        )
    if key is not None:
        _EXACT_CACHE[key] = result
    return result


def symmetrized_I(phi: Automorphism) -> Fraction:
    """lambda_A(phi) * lambda_A(phi^-1); >= 1 empirically, = 1 exactly
    for permutational automorphisms."""
    return (
        exact_generic_stretch(phi).value
        * exact_generic_stretch(phi.inverted()).value
    )


# --- Monte Carlo oracle ---------------------------------------------------

def _mc_trial_python(
    sigma_slots, weight_float, n: int, steps: int, rng: random.Random
) -> float:
    letters = [0] * (2 * n)
    for x in range(1, n + 1):
        letters[_slot(x)] = x
        letters[_slot(-x)] = -x
    stack: List[int] = []
    prev = 0
    randrange = rng.randrange
    for _ in range(steps):
        if prev == 0:
            y = letters[randrange(2 * n)]
        else:
            r = randrange(2 * n - 1)
            inv_idx = _slot(-prev)
            if r >= inv_idx:
                r += 1
            y = letters[r]
        prev = y
        for s in sigma_slots[_slot(y)]:
            if stack and stack[-1] == -s:
                stack.pop()
            else:
                stack.append(s)
    i, j = 0, len(stack)
    while j - i >= 2 and stack[i] == -stack[j - 1]:
        i += 1
        j -= 1
    return sum(weight_float[abs(s)] for s in stack[i:j])


_NUMBA_KERNEL = None


def _get_numba_kernel():
    global _NUMBA_KERNEL
    if _NUMBA_KERNEL is not None:
        return _NUMBA_KERNEL
    try:
        import numba
        import numpy as np
    except ImportError:  # pragma: no cover
        _NUMBA_KERNEL = False
        return False

    @numba.njit(cache=True)
    def kernel(sig_mat, sig_len, wts, n, steps, seed):  # pragma: no cover
        np.random.seed(seed)
        maxlen = sig_mat.shape[1]
        stack = np.empty(steps * maxlen + 4, dtype=np.int64)
        top = 0
        prev_slot = -1
        for _ in range(steps):
            if prev_slot < 0:
                slot = np.random.randint(0, 2 * n)
            else:
                inv_slot = prev_slot ^ 1
                slot = np.random.randint(0, 2 * n - 1)
                if slot >= inv_slot:
                    slot += 1
            prev_slot = slot
            for k in range(sig_len[slot]):
                s = sig_mat[slot, k]
                if top > 0 and stack[top - 1] == -s:
                    top -= 1
                else:
                    stack[top] = s
                    top += 1
        i = 0
        j = top
        while j - i >= 2 and stack[i] == -stack[j - 1]:
            i += 1
            j -= 1
        total = 0.0
        for k in range(i, j):
            total += wts[abs(stack[k])]
        return total

    _NUMBA_KERNEL = kernel
    return kernel


def mc_generic_stretch(
    target,
    steps: int,
    trials: int,
    seed,
    use_numba: bool = True,
) -> Tuple[float, float]:
    """Monte Carlo estimate of lambda_A; returns (mean, standard error)."""
    if steps < 1000:
        raise InputError("need at least 1000 steps per trial")
    if isinstance(target, Automorphism):
        sigma, weights = sigma_for_automorphism(target)
    elif isinstance(target, MarkedGraph):
        sigma, weights = sigma_for_tree(target)
    else:
        raise InputError(f"unsupported target {type(target).__name__}")
    n = target.rank
    sigma_slots: List[Tuple[Symbol, ...]] = [()] * (2 * n)
    for x, block in sigma.items():
        sigma_slots[_slot(x)] = tuple(block)
    max_sym = max(abs(s) for block in sigma.values() for s in block)
    weight_float = [0.0] * (max_sym + 1)
    for s, w in weights.items():
        weight_float[s] = float(w)

    kernel = _get_numba_kernel() if use_numba else False
    values = []
    if kernel:
        import numpy as np

        maxlen = max(len(b) for b in sigma_slots)
        sig_mat = np.zeros((2 * n, maxlen), dtype=np.int64)
        sig_len = np.zeros(2 * n, dtype=np.int64)
        for i, block in enumerate(sigma_slots):
            sig_len[i] = len(block)
            for k, s in enumerate(block):
                sig_mat[i, k] = s
        wts = np.array(weight_float, dtype=np.float64)
        for t in range(trials):
            tseed = random.Random(f"mc:{seed}:{t}").getrandbits(31)
            total = kernel(sig_mat, sig_len, wts, n, steps, tseed)
            values.append(total / steps)
    else:
        for t in range(trials):
            rng = random.Random(f"mc:{seed}:{t}")
            total = _mc_trial_python(sigma_slots, weight_float, n, steps, rng)
            values.append(total / steps)
    mean = sum(values) / trials
    if trials > 1:
        var = sum((v - mean) ** 2 for v in values) / (trials - 1)
        stderr = math.sqrt(var / trials)
    else:
        stderr = float("nan")
    return mean, stderr
