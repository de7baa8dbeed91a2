"""Interval exchange transformations as exact piecewise translations.

An IET is given by a length vector ``lambda = (l_1, ..., l_n)`` and a
permutation ``pi``.  The domain ``[0, |lambda|)`` is cut into half-open
intervals ``I_k = [beta_{k-1}, beta_k)`` and interval ``I_k`` is moved, as a
solid segment, to slot ``pi(k)`` of the rearranged order.

Two arithmetic modes are supported.  ``"exact"`` stores lengths as
:class:`fractions.Fraction` and every operation is exact; ``"float"`` stores
Python floats and treats differences below ``FLOAT_TIE_TOL * |lambda|`` as
ties.
"""

from __future__ import annotations

import bisect
from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Rational
from typing import Iterable, Sequence

from .errors import DegeneracyError, DomainError, IterationBudgetError, ValidationError

FLOAT_TIE_TOL = 1e-12

EXACT = "exact"
FLOAT = "float"


@dataclass(frozen=True)
class Permutation:
    """A permutation of ``{1, ..., n}`` stored by its images ``pi(1), ..., pi(n)``."""

    images: tuple[int, ...]

    def __post_init__(self):
        images = tuple(int(v) for v in self.images)
        if len(images) < 2:
            raise ValidationError(f"permutation needs n >= 2 symbols, got {len(images)}")
        if sorted(images) != list(range(1, len(images) + 1)):
            raise ValidationError(f"{images} is not a bijection of 1..{len(images)}")
        object.__setattr__(self, "images", images)

    @property
    def n(self) -> int:
        return len(self.images)

    def __call__(self, k: int) -> int:
        return self.images[k - 1]

    def inverse(self, v: int) -> int:
        """Return ``pi^{-1}(v)``."""
        return self.images.index(v) + 1

    def __iter__(self):
        return iter(self.images)

    def __str__(self):
        return "(" + ",".join(map(str, self.images)) + ")"


def as_permutation(perm) -> Permutation:
    return perm if isinstance(perm, Permutation) else Permutation(tuple(perm))


def irreducibility_failure(perm) -> str | None:
    """Name the first violated irreducibility condition, or ``None``.

    Condition (1): ``pi{1..k} != {1..k}`` for ``1 <= k < n``.
    Condition (2): ``pi(k+1) != pi(k) + 1`` for ``1 <= k < n``.
    """
    perm = as_permutation(perm)
    failure = _block_failure(perm)
    if failure is not None:
        return failure
    im = perm.images
    for k in range(1, perm.n):
        if im[k] == im[k - 1] + 1:
            return f"condition (2) fails at k={k}: pi({k + 1}) = pi({k}) + 1 = {im[k]}"
    return None


def _block_failure(perm: Permutation) -> str | None:
    running_max = 0
    for k in range(1, perm.n):
        running_max = max(running_max, perm.images[k - 1])
        if running_max == k:
            return f"condition (1) fails at k={k}: pi{{1..{k}}} = {{1..{k}}}"
    return None


def validate_irreducible(perm) -> bool:
    """True iff both irreducibility conditions hold for every ``1 <= k < n``.

    This is stricter than the usual convention: besides having no invariant
    prefix block, no two consecutive intervals may travel together.
    """
    return irreducibility_failure(perm) is None


def _coerce_lengths(lengths: Iterable, arithmetic: str | None):
    raw = list(lengths)
    if arithmetic is None:
        arithmetic = FLOAT if any(isinstance(v, float) for v in raw) else EXACT
    if arithmetic == EXACT:
        try:
            values = tuple(v if isinstance(v, Fraction) else Fraction(v) for v in raw)
        except (TypeError, ValueError) as exc:
            raise ValidationError(f"cannot read lengths {raw!r} exactly: {exc}") from None
    elif arithmetic == FLOAT:
        try:
            values = tuple(float(Fraction(v)) if isinstance(v, str) else float(v) for v in raw)
        except (TypeError, ValueError) as exc:
            raise ValidationError(f"cannot read lengths {raw!r} as floats: {exc}") from None
    else:
        raise ValidationError(f"unknown arithmetic mode {arithmetic!r}")
    return values, arithmetic


@dataclass(frozen=True)
class IET:
    """An interval exchange transformation; build with :func:`build_iet`."""

    lengths: tuple
    perm: Permutation
    arithmetic: str = EXACT
    breakpoints: tuple = field(init=False, repr=False, compare=False)
    image_breakpoints: tuple = field(init=False, repr=False, compare=False)
    slot_starts: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        n = self.perm.n
        zero = Fraction(0) if self.arithmetic == EXACT else 0.0
        beta = [zero]
        for v in self.lengths:
            beta.append(beta[-1] + v)
        # slot s (1-based) is occupied by interval pi^{-1}(s)
        image = [zero]
        for s in range(1, n + 1):
            image.append(image[-1] + self.lengths[self.perm.inverse(s) - 1])
        slot_starts = tuple(image[self.perm(k) - 1] for k in range(1, n + 1))
        object.__setattr__(self, "breakpoints", tuple(beta))
        object.__setattr__(self, "image_breakpoints", tuple(image))
        object.__setattr__(self, "slot_starts", slot_starts)

    @property
    def n(self) -> int:
        return self.perm.n

    @property
    def total(self):
        """``|lambda|``, the length of the domain."""
        return self.breakpoints[-1]

    @property
    def exact(self) -> bool:
        return self.arithmetic == EXACT

    @property
    def tie_tol(self):
        return 0 if self.exact else FLOAT_TIE_TOL * self.total

    def translation(self, k: int):
        """Translation amount applied to points of ``I_k``."""
        return self.slot_starts[k - 1] - self.breakpoints[k - 1]

    def interval_index(self, x) -> int:
        """1-based index ``k`` with ``x`` in ``[beta_{k-1}, beta_k)``."""
        if not (0 <= x < self.total):
            raise DomainError(f"x={x} outside [0, {self.total})")
        return bisect.bisect_right(self.breakpoints, x, 1, self.n)

    def __call__(self, x):
        return apply(self, x)

    def __repr__(self):
        lengths = ", ".join(str(v) for v in self.lengths)
        return f"IET(lengths=({lengths}), perm={self.perm}, arithmetic={self.arithmetic!r})"


def build_iet(lengths: Sequence, perm, arithmetic: str | None = None, *, strict: bool = True) -> IET:
    """Validate and build an IET.

    With ``strict`` the permutation must satisfy both irreducibility
    conditions.  ``strict=False`` only requires condition (1); Rauzy-Veech
    induction can leave the strict class while staying in that one.
    """
    perm = as_permutation(perm)
    values, arithmetic = _coerce_lengths(lengths, arithmetic)
    if len(values) != perm.n:
        raise ValidationError(f"{len(values)} lengths for a permutation of {perm.n} symbols")
    for i, v in enumerate(values, 1):
        if not v > 0:
            raise ValidationError(f"length lambda^{i} = {v} is not positive")
    failure = irreducibility_failure(perm) if strict else _block_failure(perm)
    if failure is not None:
        raise ValidationError(f"permutation {perm} is not irreducible: {failure}")
    return IET(values, perm, arithmetic)


def _clamp(iet: IET, y):
    # float rounding can land exactly on |lambda|
    if not iet.exact and y >= iet.total:
        y = iet.total - iet.total * 2.0 ** -53
    return y


def apply(iet: IET, x):
    """Image ``T(x)`` of a point of ``[0, |lambda|)``."""
    k = iet.interval_index(x)
    return _clamp(iet, x + iet.translation(k))


def apply_inverse(iet: IET, y):
    """Preimage ``T^{-1}(y)`` of a point of ``[0, |lambda|)``."""
    if not (0 <= y < iet.total):
        raise DomainError(f"y={y} outside [0, {iet.total})")
    s = bisect.bisect_right(iet.image_breakpoints, y, 1, iet.n)
    k = iet.perm.inverse(s)
    x = y - iet.slot_starts[k - 1] + iet.breakpoints[k - 1]
    return _clamp(iet, x)


def normalize(iet: IET) -> IET:
    """Rescale to ``|lambda| = 1``."""
    total = iet.total
    return IET(tuple(v / total for v in iet.lengths), iet.perm, iet.arithmetic)


def to_float(iet: IET) -> IET:
    return IET(tuple(float(v) for v in iet.lengths), iet.perm, FLOAT)


@dataclass(frozen=True)
class FirstReturn:
    """Induced map on ``[0, cutoff)`` with its itinerary data.

    Subintervals are listed left to right.  ``itineraries[k]`` holds the
    1-based indices of the original intervals visited by points of the k-th
    subinterval before they come back.
    """

    lengths: tuple
    perm: tuple[int, ...]
    return_times: tuple[int, ...]
    itineraries: tuple[tuple[int, ...], ...]
    arithmetic: str

    def iet(self, strict: bool = False) -> IET:
        return build_iet(self.lengths, self.perm, self.arithmetic, strict=strict)


def _split_points(iet: IET, a, b, cuts, tol):
    """Cut ``[a, b)`` at every point of ``cuts`` strictly inside it."""
    inner = [c for c in cuts if a + tol < c < b - tol]
    edges = [a, *inner, b]
    return list(zip(edges[:-1], edges[1:]))


def first_return_map(iet: IET, cutoff, max_iters: int = 10**6) -> FirstReturn:
    """First return map of ``T`` on ``[0, cutoff)`` by direct orbit iteration.

    Pieces of ``[0, cutoff)`` are pushed forward interval by interval and
    split whenever their image straddles ``cutoff`` or a breakpoint, so each
    resulting subinterval has a constant itinerary.  The result has exactly
    ``n`` subintervals when ``cutoff`` is a Rauzy cutoff; fewer than ``n``
    only happens at a breakpoint coincidence and raises DegeneracyError.
    """
    if iet.exact:
        cutoff = Fraction(cutoff)
    if not (0 < cutoff <= iet.total):
        raise DomainError(f"cutoff {cutoff} outside (0, {iet.total}]")
    tol = iet.tie_tol
    inner_breaks = iet.breakpoints[1:-1]

    # (origin_start, current_start, current_end, time, itinerary)
    pending = [(a, a, b, 0, ()) for a, b in _split_points(iet, iet.breakpoints[0], cutoff, inner_breaks, tol)]
    done = []
    while pending:
        origin, a, b, time, itin = pending.pop()
        if time >= max_iters:
            raise IterationBudgetError(f"return time exceeds max_iters={max_iters}")
        k = bisect.bisect_right(iet.breakpoints, a + tol, 1, iet.n)
        shift = iet.translation(k)
        a, b, time, itin = a + shift, b + shift, time + 1, itin + (k,)
        for lo, hi in _split_points(iet, a, b, (cutoff,), tol):
            o = origin + (lo - a)
            if lo < cutoff - tol:
                done.append((o, lo, hi, time, itin))
            else:
                for lo2, hi2 in _split_points(iet, lo, hi, inner_breaks, tol):
                    pending.append((o + (lo2 - lo), lo2, hi2, time, itin))

    done.sort(key=lambda item: item[0])
    if len(done) < iet.n:
        raise DegeneracyError(f"induced map on [0, {cutoff}) has only {len(done)} intervals")
    image_order = sorted(range(len(done)), key=lambda i: done[i][1])
    slot = {i: s + 1 for s, i in enumerate(image_order)}
    return FirstReturn(
        lengths=tuple(hi - lo for _, lo, hi, _, _ in done),
        perm=tuple(slot[i] for i in range(len(done))),
        return_times=tuple(t for *_, t, _ in done),
        itineraries=tuple(it for *_, it in done),
        arithmetic=iet.arithmetic,
    )


def format_scalar(v) -> str:
    """Full-precision text form: ``p/q`` for fractions, ``repr`` for floats."""
    if isinstance(v, Rational):
        v = Fraction(v)
        return str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"
    return repr(float(v))


def iet_to_dict(iet: IET) -> dict:
    return {
        "lengths": [format_scalar(v) for v in iet.lengths],
        "permutation": list(iet.perm.images),
        "arithmetic": iet.arithmetic,
    }


def iet_from_dict(doc: dict, arithmetic: str | None = None, strict: bool = True) -> IET:
    try:
        lengths, perm = doc["lengths"], doc["permutation"]
    except KeyError as exc:
        raise ValidationError(f"IET document is missing {exc.args[0]!r}") from None
    if arithmetic is None:
        arithmetic = doc.get("arithmetic")
    if arithmetic is None:
        arithmetic = FLOAT if any(isinstance(v, float) for v in lengths) else EXACT
    return build_iet(lengths, perm, arithmetic, strict=strict)
