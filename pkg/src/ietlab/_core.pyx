# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled orbit kernels; same contract as ``ietlab._fallback``."""

from libc.math cimport sqrt, floor, nextafter


cdef inline Py_ssize_t _locate(const double[::1] breaks, double x) noexcept nogil:
    cdef Py_ssize_t lo = 0, hi = breaks.shape[0], mid
    while lo < hi:
        mid = (lo + hi) >> 1
        if breaks[mid] <= x:
            lo = mid + 1
        else:
            hi = mid
    return lo


def advance_torus(const double[::1] breaks, const double[::1] shifts, double total,
                  const double[:, ::1] angles, double[::1] x, double[:, ::1] y,
                  Py_ssize_t nsteps, rec_x=None, rec_y=None):
    cdef Py_ssize_t M = x.shape[0], c = y.shape[1], t, p, q, k
    cdef double top = nextafter(total, 0.0), v
    cdef double[:, ::1] rx
    cdef double[:, :, ::1] ry
    cdef bint keep_x = rec_x is not None, keep_y = rec_y is not None
    if keep_x:
        rx = rec_x
    if keep_y:
        ry = rec_y
    with nogil:
        for t in range(nsteps):
            for p in range(M):
                k = _locate(breaks, x[p])
                v = x[p] + shifts[k]
                if v > top:
                    v = top
                if v < 0.0:
                    v = 0.0
                x[p] = v
                for q in range(c):
                    v = y[p, q] + angles[k, q]
                    y[p, q] = v - floor(v)
            if keep_x:
                for p in range(M):
                    rx[t, p] = x[p]
            if keep_y:
                for p in range(M):
                    for q in range(c):
                        ry[t, p, q] = y[p, q]


def advance_quat(const double[::1] breaks, const double[::1] shifts, double total,
                 const double[:, ::1] quats, double[::1] x, double[:, ::1] y,
                 Py_ssize_t nsteps, rec_x=None, rec_y=None):
    cdef Py_ssize_t M = x.shape[0], t, p, k
    cdef double top = nextafter(total, 0.0), v
    cdef double aw, ax, ay, az, bw, bx, by, bz, w, i, j, z, norm
    cdef double[:, ::1] rx
    cdef double[:, :, ::1] ry
    cdef bint keep_x = rec_x is not None, keep_y = rec_y is not None
    if keep_x:
        rx = rec_x
    if keep_y:
        ry = rec_y
    with nogil:
        for t in range(nsteps):
            for p in range(M):
                k = _locate(breaks, x[p])
                v = x[p] + shifts[k]
                if v > top:
                    v = top
                if v < 0.0:
                    v = 0.0
                x[p] = v
                aw = quats[k, 0]; ax = quats[k, 1]; ay = quats[k, 2]; az = quats[k, 3]
                bw = y[p, 0]; bx = y[p, 1]; by = y[p, 2]; bz = y[p, 3]
                w = aw * bw - ax * bx - ay * by - az * bz
                i = aw * bx + ax * bw + ay * bz - az * by
                j = aw * by - ax * bz + ay * bw + az * bx
                z = aw * bz + ax * by - ay * bx + az * bw
                norm = sqrt(w * w + i * i + j * j + z * z)
                y[p, 0] = w / norm
                y[p, 1] = i / norm
                y[p, 2] = j / norm
                y[p, 3] = z / norm
            if keep_x:
                for p in range(M):
                    rx[t, p] = x[p]
            if keep_y:
                for p in range(M):
                    ry[t, p, 0] = y[p, 0]
                    ry[t, p, 1] = y[p, 1]
                    ry[t, p, 2] = y[p, 2]
                    ry[t, p, 3] = y[p, 3]
