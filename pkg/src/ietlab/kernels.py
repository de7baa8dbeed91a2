"""Orbit kernels: compiled extension when available, NumPy otherwise.

Set ``IETLAB_PURE_PYTHON=1`` to force the NumPy fallback.
"""

from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np

from . import _fallback

if os.environ.get("IETLAB_PURE_PYTHON", "") not in ("", "0"):
    _impl, BACKEND = _fallback, "python"
else:
    try:
        from . import _core as _impl

        BACKEND = "compiled"
    except ImportError:  # extension not built
        _impl, BACKEND = _fallback, "python"

IMPLEMENTATIONS = {"python": _fallback}
if BACKEND == "compiled":
    IMPLEMENTATIONS["compiled"] = _impl


@dataclass(frozen=True)
class FloatIET:
    """Float arrays driving the kernels: interior breakpoints, shifts, total length."""

    breaks: np.ndarray
    shifts: np.ndarray
    total: float


def float_iet(iet) -> FloatIET:
    breaks = np.array([float(b) for b in iet.breakpoints[1:-1]], dtype=float)
    shifts = np.array([float(iet.translation(k)) for k in range(1, iet.n + 1)], dtype=float)
    return FloatIET(breaks, shifts, float(iet.total))


def advance(kind: str, fiet: FloatIET, table: np.ndarray, x: np.ndarray, y: np.ndarray,
            nsteps: int, rec_x=None, rec_y=None, impl=None):
    """Advance ``(x, y)`` in place by ``nsteps`` skew-shift steps.

    ``kind`` is ``"torus"`` (``table`` holds angles, shape ``(n, c)``) or
    ``"quat"`` (``table`` holds unit quaternions, shape ``(n, 4)``).
    """
    impl = _impl if impl is None else impl
    fn = impl.advance_torus if kind == "torus" else impl.advance_quat
    fn(fiet.breaks, fiet.shifts, fiet.total, np.ascontiguousarray(table, dtype=float), x, y, nsteps, rec_x, rec_y)


def orbit_blocks(kind, fiet, table, x, y, nsteps, block=256, impl=None):
    """Yield ``(k0, xs, ys)``: states at times ``k0 .. k0+len(xs)-1``, starting at time 0.

    ``x`` and ``y`` are advanced in place; the arrays yielded are reused
    between blocks.
    """
    m = x.shape[0]
    xs = np.empty((block, m))
    ys = np.empty((block,) + y.shape)
    xs[0], ys[0] = x, y
    first = min(block, nsteps) - 1
    if first > 0:
        advance(kind, fiet, table, x, y, first, xs[1:], ys[1:], impl)
    yield 0, xs[: first + 1], ys[: first + 1]
    done = first + 1
    while done < nsteps:
        size = min(block, nsteps - done)
        advance(kind, fiet, table, x, y, size, xs[:size], ys[:size], impl)
        yield done, xs[:size], ys[:size]
        done += size
