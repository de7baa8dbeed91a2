"""Simple skew shifts ``T_phi(x, y) = (T x, phi(x) y)`` and extended Rauzy-Veech induction."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

import numpy as np

from .errors import IterationBudgetError, ValidationError
from .groups import GTuple, gamma_step, gtuple_from_dict, gtuple_to_dict
from .iet import IET, apply, iet_from_dict, iet_to_dict
from .rauzy import rauzy_step

DEFAULT_MAX_ITERS = 10**6


@dataclass(frozen=True)
class SkewShiftTriple:
    """``(lambda, pi, g)``: an IET and the values ``g^k`` of ``phi`` on each ``I_k``."""

    iet: IET
    tuple: GTuple

    def __post_init__(self):
        if len(self.tuple) != self.iet.n:
            raise ValidationError(f"tuple of length {len(self.tuple)} for an IET of {self.iet.n} intervals")

    @property
    def group(self):
        return self.tuple.group

    def phi(self, x):
        return self.tuple.g(self.iet.interval_index(x))


@dataclass(frozen=True)
class SkewPoint:
    x: object
    y: object


def apply_skew(s: SkewShiftTriple, p: SkewPoint) -> SkewPoint:
    k = s.iet.interval_index(p.x)
    return SkewPoint(apply(s.iet, p.x), s.group.mul(s.tuple.g(k), p.y))


def cocycle_product(s: SkewShiftTriple, x, k: int):
    """``Phi_k(x) = phi(T^{k-1} x) ... phi(x)``, with ``Phi_0`` the identity."""
    if k < 0:
        raise ValueError("k must be >= 0")
    exact = s.iet.exact and s.tuple.exact
    y = s.group.identity(exact)
    for _ in range(k):
        y = s.group.mul(s.phi(x), y)
        x = apply(s.iet, x)
    return y


def extended_rauzy_step(s: SkewShiftTriple, gamma: Callable = gamma_step) -> SkewShiftTriple:
    """``R-bar(lambda, pi, g) = (R(lambda, pi), Gamma(lambda, pi) g)``.

    ``gamma`` exists as a fault-injection hook for the verification harness.
    """
    new_iet, _ = rauzy_step(s.iet)
    return SkewShiftTriple(new_iet, gamma(s.iet, s.tuple))


def extended_orbit(s: SkewShiftTriple, depth: int, gamma: Callable = gamma_step) -> list[SkewShiftTriple]:
    """``[s_0, s_1, ..., s_depth]`` with ``s_m = R-bar^m(s)``; raises on a tie."""
    out = [s]
    for _ in range(depth):
        out.append(extended_rauzy_step(out[-1], gamma))
    return out


def first_return_skew(s: SkewShiftTriple, p: SkewPoint, length, max_iters: int = DEFAULT_MAX_ITERS):
    """Iterate ``T_phi`` from ``p`` until the base point is back in ``[0, length)``."""
    q, t = apply_skew(s, p), 1
    while not q.x < length:
        if t >= max_iters:
            raise IterationBudgetError(f"no return to [0, {length}) within {max_iters} steps")
        q, t = apply_skew(s, q), t + 1
    return q, t


@dataclass(frozen=True)
class ConsistencyReport:
    max_base_err: float
    max_fiber_dist: float
    samples: int
    depth: int
    max_return_time: int
    exact: bool

    def passed(self, fiber_tol: float = 1e-9, base_tol: float = 1e-9) -> bool:
        if self.exact:
            return self.max_base_err == 0 and self.max_fiber_dist == 0
        return self.max_base_err <= base_tol and self.max_fiber_dist <= fiber_tol

    def to_dict(self) -> dict:
        return {
            "max_base_err": self.max_base_err,
            "max_fiber_dist": self.max_fiber_dist,
            "samples": self.samples,
            "depth": self.depth,
            "max_return_time": self.max_return_time,
            "exact": self.exact,
        }


def _sample_base_point(rng: np.random.Generator, length, exact: bool):
    if exact:
        return Fraction(int(rng.integers(0, 2**62)), 2**62) * length
    return float(rng.random()) * float(length)


def first_return_consistency(
    s: SkewShiftTriple,
    samples: int,
    rng: np.random.Generator,
    depth: int = 1,
    max_iters: int = DEFAULT_MAX_ITERS,
    gamma: Callable = gamma_step,
) -> ConsistencyReport:
    """Check that ``R-bar^depth(s)`` is the first return map of ``T_phi`` on ``[0, |lambda_depth|) x G``.

    Random points of the induced domain are pushed through the original skew
    shift until they return; the result is compared with one step of the
    induced skew shift.  Exact data (rational lengths, rational U1 angles)
    must agree exactly.
    """
    induced = extended_orbit(s, depth, gamma)[-1]
    length = induced.iet.total
    exact = s.iet.exact and s.tuple.exact
    base_err = fiber = 0.0
    longest = 0
    for _ in range(samples):
        p = SkewPoint(_sample_base_point(rng, length, s.iet.exact), s.group.sample(rng, exact))
        returned, t = first_return_skew(s, p, length, max_iters)
        expected = apply_skew(induced, p)
        base_err = max(base_err, float(abs(returned.x - expected.x)))
        fiber = max(fiber, s.group.dist(returned.y, expected.y))
        longest = max(longest, t)
    return ConsistencyReport(base_err, fiber, samples, depth, longest, exact)


def triple_to_dict(s: SkewShiftTriple) -> dict:
    return {"iet": iet_to_dict(s.iet), "gtuple": gtuple_to_dict(s.tuple)}


def triple_from_dict(doc: dict) -> SkewShiftTriple:
    try:
        return SkewShiftTriple(iet_from_dict(doc["iet"], strict=False), gtuple_from_dict(doc["gtuple"]))
    except KeyError as exc:
        raise ValidationError(f"triple document is missing {exc.args[0]!r}") from None
