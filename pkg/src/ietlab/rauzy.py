"""Rauzy-Veech induction, induction orbits and the Veech properties P1, P2."""

from __future__ import annotations

import bisect
import enum
import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import DegeneracyError
from .iet import IET, Permutation, apply, validate_irreducible


class RauzyRule(str, enum.Enum):
    A = "A"
    B = "B"

    def __str__(self):
        return self.value


def _last_slot_index(iet: IET) -> int:
    """``j = pi^{-1}(n)``, the interval that is moved to the last slot."""
    return iet.perm.inverse(iet.n)


def rauzy_rule(iet: IET) -> RauzyRule:
    """Rule A if ``lambda^n < lambda^j``, rule B if ``lambda^n > lambda^j``."""
    last = iet.lengths[-1]
    other = iet.lengths[_last_slot_index(iet) - 1]
    if abs(last - other) <= iet.tie_tol:
        raise DegeneracyError(f"Rauzy tie: lambda^n = lambda^{_last_slot_index(iet)} = {last}")
    return RauzyRule.A if last < other else RauzyRule.B


def rauzy_cutoff(iet: IET, rule: RauzyRule | None = None):
    """Length ``|lambda'|`` of the interval induced on by one Rauzy step."""
    rule = rauzy_rule(iet) if rule is None else rule
    if rule is RauzyRule.A:
        return iet.total - iet.lengths[-1]
    return iet.total - iet.lengths[_last_slot_index(iet) - 1]


def _step(iet: IET):
    rule = rauzy_rule(iet)
    n, j = iet.n, _last_slot_index(iet)
    lam, im = list(iet.lengths), iet.perm.images
    last_slot_of_n = im[n - 1]
    if rule is RauzyRule.A:
        # interval j loses its right end (length lambda^n), which becomes a new
        # interval j+1 that returns through I_n; old I_{j+1..n-1} shift right
        lengths = lam[: j - 1] + [lam[j - 1] - lam[n - 1], lam[n - 1]] + lam[j : n - 1]
        images = im[:j] + (last_slot_of_n,) + im[j : n - 1]
        times = [1] * n
        times[j] = 2
    else:
        # I_j returns through the right end of I_n and lands just after it
        lengths = lam[: n - 1] + [lam[n - 1] - lam[j - 1]]
        images = tuple(
            last_slot_of_n + 1 if k == j else (v if v <= last_slot_of_n else v + 1)
            for k, v in enumerate(im, 1)
        )
        times = [1] * n
        times[j - 1] = 2
    new = IET(tuple(lengths), Permutation(images), iet.arithmetic)
    return new, rule, tuple(times)


def rauzy_step(iet: IET) -> tuple[IET, RauzyRule]:
    """One step of Rauzy-Veech induction ``(lambda, pi) -> (lambda', pi')``.

    Closed-form update; it agrees with ``first_return_map(iet, rauzy_cutoff(iet))``.
    """
    new, rule, _ = _step(iet)
    return new, rule


def rauzy_step_with_times(iet: IET) -> tuple[IET, RauzyRule, tuple[int, ...]]:
    """Like :func:`rauzy_step`, also returning one-step return times."""
    return _step(iet)


def _combine_return_times(times, j, rule):
    # return times form an additive cocycle with the same index pattern as
    # the Rauzy maps on G^n
    n = len(times)
    if rule is RauzyRule.A:
        return times[:j] + (times[n - 1] + times[j - 1],) + times[j : n - 1]
    out = list(times)
    out[j - 1] = times[n - 1] + times[j - 1]
    return tuple(out)


@dataclass(frozen=True)
class TraceStep:
    """State ``(lambda_m, pi_m)`` after ``m`` steps; ``rule`` produced it."""

    m: int
    rule: RauzyRule | None
    lambda_m: tuple
    pi_m: Permutation
    return_times: tuple[int, ...]
    p1_b: int | None = None
    p2_min_ratio: float | Fraction | None = None
    p1: bool | None = None
    p2: bool | None = None

    @property
    def total(self):
        return sum(self.lambda_m)

    @property
    def strictly_irreducible(self) -> bool:
        return validate_irreducible(self.pi_m)

    def iet(self, arithmetic: str) -> IET:
        return IET(self.lambda_m, self.pi_m, arithmetic)


@dataclass(frozen=True)
class InductionTrace:
    base: IET
    steps: tuple[TraceStep, ...]
    requested_depth: int
    epsilon: float | Fraction | None = None
    degenerate_at: int | None = None

    @property
    def depth(self) -> int:
        return len(self.steps) - 1

    @property
    def complete(self) -> bool:
        return self.degenerate_at is None

    def __getitem__(self, m: int) -> TraceStep:
        return self.steps[m]

    def __len__(self):
        return len(self.steps)


def interval_b_max(iet: IET, length, cap: int) -> int:
    """Largest ``b <= cap`` with no interior breakpoint in ``T^k [0, length)``, ``k < b``.

    The interval is pushed forward as a solid segment; as long as it holds no
    breakpoint it sits inside one ``I_k`` and ``T`` moves it by a translation.
    """
    a, b = (Fraction(0), Fraction(length)) if iet.exact else (0.0, float(length))
    beta = iet.breakpoints
    n = iet.n
    for k in range(cap):
        # first breakpoint beta_i (1 <= i <= n-1) that is >= a
        i = bisect.bisect_left(beta, a, 1, n)
        if i < n and beta[i] < b:
            return k
        shift = iet.translation(bisect.bisect_right(beta, a, 1, n))
        a, b = a + shift, b + shift
    return cap


def _fraction(v) -> Fraction:
    # floats go through their shortest repr so that 0.01 means 1/100
    return Fraction(repr(v)) if isinstance(v, float) else Fraction(v)


def p1_threshold(iet: IET, length_m, epsilon) -> int:
    """``ceil(epsilon * |lambda| / |lambda_m|)``, the smallest admissible ``b``."""
    ratio = _fraction(epsilon) * _fraction(iet.total) / _fraction(length_m)
    return max(0, math.ceil(ratio))


def check_P1(iet: IET, trace: InductionTrace, m: int, epsilon) -> tuple[bool, int]:
    """Veech property P1(epsilon, m) and the (capped) ``b_max`` witnessing it."""
    length_m = trace[m].total
    need = p1_threshold(iet, length_m, epsilon)
    b_max = interval_b_max(iet, length_m, need)
    return b_max >= need, b_max


def p2_min_ratio(lambda_m):
    total = sum(lambda_m)
    return min(lambda_m) / total


def check_P2(trace: InductionTrace, m: int, epsilon) -> bool:
    """Veech property P2(epsilon, m): ``lambda^i_m >= epsilon |lambda_m|`` for all ``i``."""
    lam = trace[m].lambda_m
    return _fraction(min(lam)) >= _fraction(epsilon) * _fraction(sum(lam))


def induction_orbit(iet: IET, depth: int, epsilon=None) -> InductionTrace:
    """Iterate Rauzy-Veech induction ``depth`` times.

    Stops early at a tie and records the failing step in ``degenerate_at``.
    Return times ``a^k_m`` are first return times of ``I^k_m`` into
    ``[0, |lambda_m|)`` under the original map.  When ``epsilon`` is given,
    P1 and P2 are evaluated at every step.
    """
    if depth < 0:
        raise ValueError("depth must be >= 0")

    def record(m, rule, current, times):
        p1_b = p1 = p2 = None
        ratio = p2_min_ratio(current.lengths)
        if epsilon is not None:
            p2 = _fraction(ratio) >= _fraction(epsilon)
            need = p1_threshold(iet, current.total, epsilon)
            p1_b = interval_b_max(iet, current.total, need)
            p1 = p1_b >= need
        return TraceStep(m, rule, current.lengths, current.perm, times, p1_b, ratio, p1, p2)

    current = iet
    times = (1,) * iet.n
    steps = [record(0, None, current, times)]
    degenerate_at = None
    for m in range(1, depth + 1):
        j = _last_slot_index(current)
        try:
            current, rule = rauzy_step(current)
        except DegeneracyError:
            degenerate_at = m
            break
        times = _combine_return_times(times, j, rule)
        steps.append(record(m, rule, current, times))
    return InductionTrace(iet, tuple(steps), depth, epsilon, degenerate_at)


def find_veech_time(iet: IET, epsilon, max_m: int = 200) -> int | None:
    """Smallest ``m <= max_m`` at which both P1 and P2 hold, else ``None``.

    P2 is cheap and is tested first; P1 only at steps that pass P2.
    """
    current = iet
    for m in range(max_m + 1):
        if m > 0:
            try:
                current, _ = rauzy_step(current)
            except DegeneracyError:
                return None
        if _fraction(p2_min_ratio(current.lengths)) < _fraction(epsilon):
            continue
        need = p1_threshold(iet, current.total, epsilon)
        if interval_b_max(iet, current.total, need) >= need:
            return m
    return None


def orbit_return_times(iet: IET, length, points) -> tuple[int, ...]:
    """Return time into ``[0, length)`` of each sample point, by direct iteration."""
    out = []
    for x in points:
        y, t = apply(iet, x), 1
        while not y < length:
            y, t = apply(iet, y), t + 1
        out.append(t)
    return tuple(out)
