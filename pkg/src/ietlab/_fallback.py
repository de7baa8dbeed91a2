"""NumPy implementation of the orbit kernels (used when the extension is absent).

Both kernels advance a batch of skew-shift points ``(x, y)`` in place for
``nsteps`` steps of ``(x, y) -> (T x, phi(x) y)``.  When ``rec_x``/``rec_y``
are given, the state after step ``t`` is written to ``rec_x[t]``/``rec_y[t]``.
"""

import numpy as np


def _advance_base(breaks, shifts, total, x):
    k = np.searchsorted(breaks, x, side="right")
    x += shifts[k]
    np.minimum(x, np.nextafter(total, 0.0), out=x)
    np.maximum(x, 0.0, out=x)
    return k


def advance_torus(breaks, shifts, total, angles, x, y, nsteps, rec_x=None, rec_y=None):
    for t in range(nsteps):
        k = _advance_base(breaks, shifts, total, x)
        y += angles[k]
        y -= np.floor(y)
        if rec_x is not None:
            rec_x[t] = x
        if rec_y is not None:
            rec_y[t] = y


def advance_quat(breaks, shifts, total, quats, x, y, nsteps, rec_x=None, rec_y=None):
    for t in range(nsteps):
        k = _advance_base(breaks, shifts, total, x)
        g = quats[k]
        aw, ax, ay, az = g[:, 0], g[:, 1], g[:, 2], g[:, 3]
        bw, bx, by, bz = y[:, 0].copy(), y[:, 1].copy(), y[:, 2].copy(), y[:, 3].copy()
        w = aw * bw - ax * bx - ay * by - az * bz
        i = aw * bx + ax * bw + ay * bz - az * by
        j = aw * by - ax * bz + ay * bw + az * bx
        z = aw * bz + ax * by - ay * bx + az * bw
        norm = np.sqrt(w * w + i * i + j * j + z * z)
        y[:, 0] = w / norm
        y[:, 1] = i / norm
        y[:, 2] = j / norm
        y[:, 3] = z / norm
        if rec_x is not None:
            rec_x[t] = x
        if rec_y is not None:
            rec_y[t] = y
