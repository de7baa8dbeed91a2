"""Numerical weak-mixing diagnostics for simple skew shifts.

* fixed-vector defect of a tuple and its trajectory along extended induction;
* Cesaro averages of twisted matrix coefficients;
* the eigenvalue scan for one-dimensional characters;
* Cesaro averages of squared correlations.

Monte Carlo integrals use explicitly passed generators; two calls with
equally seeded generators give identical results.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import DegeneracyError, ValidationError
from .groups import CompactGroup, GTuple, Representation
from .kernels import float_iet, orbit_blocks
from .skew import SkewShiftTriple, extended_rauzy_step

BLOCK = 256


def defect_matrix(t: GTuple, rep: Representation) -> np.ndarray:
    """``H = sum_k (Theta(g^k) - I)^* (Theta(g^k) - I)``."""
    rep.group.check(t.group)
    mats = rep.eval_batch(t.as_array()) - np.eye(rep.dim)
    return np.einsum("kji,kjl->il", mats.conj(), mats)


def fixed_vector_defect(t: GTuple, rep: Representation) -> tuple[float, np.ndarray]:
    """Smallest eigenvalue of ``H`` and a unit eigenvector.

    This is ``min_{|w|=1} sum_k |Theta(g^k) w - w|^2``; it vanishes exactly
    when the coordinates of ``t`` share a fixed unit vector.
    """
    vals, vecs = np.linalg.eigh(defect_matrix(t, rep))
    w = vecs[:, 0]
    return max(float(vals[0]), 0.0), w / np.linalg.norm(w)


def defect_batch(group: CompactGroup, arrays: Sequence[np.ndarray], rep: Representation) -> np.ndarray:
    """Defects of many tuples at once; ``arrays[k]`` is the batch of k-th coordinates."""
    eye = np.eye(rep.dim)
    h = 0
    for arr in arrays:
        m = rep.eval_batch(arr) - eye
        h = h + np.einsum("bji,bjl->bil", m.conj(), m)
    return np.clip(np.linalg.eigvalsh(h)[:, 0], 0.0, None)


def defect_volume(group, rep, n, epsilons, samples, rng) -> dict:
    """Haar volume of ``{g in G^n : defect(g) < eps}`` for each ``eps``."""
    d = defect_batch(group, [group.sample_batch(rng, samples) for _ in range(n)], rep)
    return {float(eps): float(np.mean(d < eps)) for eps in epsilons}


@dataclass(frozen=True)
class DefectTrajectory:
    """``(m, defect(g_m), w_m)`` along ``R-bar``; ``degenerate_at`` marks an early stop."""

    values: tuple
    rep: Representation
    requested_depth: int
    degenerate_at: int | None = None

    @property
    def defects(self) -> np.ndarray:
        return np.array([v for _, v, _ in self.values])

    @property
    def min_defect(self) -> float:
        return float(self.defects.min())

    @property
    def complete(self) -> bool:
        return self.degenerate_at is None


def defect_trajectory(s: SkewShiftTriple, rep: Representation, depth: int) -> DefectTrajectory:
    """Defect of ``g_m`` for ``m = 0..depth``, where ``(lambda_m, pi_m, g_m) = R-bar^m(s)``.

    Tending to zero is what an eigenfunction of the twisted equation forces;
    a defect that stays bounded below is evidence against one.
    """
    if depth < 1:
        raise ValueError("depth must be >= 1")
    values = []
    current, degenerate_at = s, None
    for m in range(depth + 1):
        if m > 0:
            try:
                current = extended_rauzy_step(current)
            except DegeneracyError:
                degenerate_at = m
                break
        value, w = fixed_vector_defect(current.tuple, rep)
        values.append((m, value, w))
    return DefectTrajectory(tuple(values), rep, depth, degenerate_at)


def _orbit_setup(s: SkewShiftTriple, x: np.ndarray, y: np.ndarray | None):
    group = s.group
    table = s.tuple.as_array()
    y = group.identity_batch(x.shape[0]) if y is None else y
    return group.kernel_kind, float_iet(s.iet), table, x, y


def _uniform_points(s: SkewShiftTriple, samples: int, rng) -> np.ndarray:
    return rng.random(samples) * float(s.iet.total)


@dataclass(frozen=True)
class MatrixAverage:
    per_step: np.ndarray  # (N, d, d): M_k for k < N
    cesaro: np.ndarray  # (d, d): D_N

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.cesaro, 2))


def matrix_coefficient_average(
    s: SkewShiftTriple, rep: Representation, N: int, M: int, rng: np.random.Generator
) -> MatrixAverage:
    """``M_k = mean_x Theta(Phi_k(x))^{-1}`` for ``k < N`` and ``D_N = mean_k M_k``.

    ``||D_N||`` staying away from 0 as ``N`` grows indicates a solution of the
    twisted equation at eigenvalue 1; decay is evidence of none.
    """
    if N < 1 or M < 1:
        raise ValueError("N and M must be >= 1")
    rep.group.check(s.group)
    x = _uniform_points(s, M, rng)
    kind, fiet, table, x, y = _orbit_setup(s, x, None)
    per_step = np.empty((N, rep.dim, rep.dim), dtype=complex)
    for k0, _, ys in orbit_blocks(kind, fiet, table, x, y, N, BLOCK):
        b = ys.shape[0]
        mats = rep.eval_batch(ys.reshape(b * M, -1)).reshape(b, M, rep.dim, rep.dim)
        # unitary: the inverse is the conjugate transpose
        per_step[k0 : k0 + b] = mats.mean(axis=1).conj().transpose(0, 2, 1)
    return MatrixAverage(per_step, per_step.mean(axis=0))


def _test_function_catalog(total: float, first_length: float) -> dict[str, Callable]:
    return {
        "const": lambda x: np.ones_like(x, dtype=complex),
        "exp1": lambda x: np.exp(2j * np.pi * x / total),
        "exp2": lambda x: np.exp(4j * np.pi * x / total),
        "ind_I1": lambda x: (x < first_length).astype(complex),
        "ind_half": lambda x: (x < total / 2).astype(complex),
    }


TEST_FUNCTIONS = ("const", "exp1", "exp2", "ind_I1", "ind_half")


@dataclass(frozen=True)
class SpectralScan:
    """``D_N(alpha_j)`` on the grid ``alpha_j = exp(2 pi i j / A)``, per test function and shift."""

    A: int
    N: int
    values: dict  # (label, shift) -> complex array of length A
    correlations: dict = field(repr=False)  # label -> c_k, k < N
    trivial_character: bool = False

    def magnitude(self, label: str, shift: float = 0.0) -> np.ndarray:
        return np.abs(self.values[(label, shift)])

    def nearest_index(self, argument: float) -> int:
        """Grid index nearest to the unit scalar of the given argument (in turns)."""
        return int(np.rint((argument % 1.0) * self.A)) % self.A

    def peak(self, exclude_trivial: bool = True) -> dict:
        """Largest ``|D_N|`` over grid, test functions and shifts.

        With a trivial character, ``alpha = 1`` always carries the constant
        eigenfunction, so it is skipped when ``exclude_trivial``.
        """
        best = {"value": -1.0}
        for (label, shift), vals in self.values.items():
            mags = np.abs(vals)
            if exclude_trivial and self.trivial_character and shift == 0.0:
                mags = mags.copy()
                mags[0] = -1.0
            j = int(np.argmax(mags))
            if mags[j] > best["value"]:
                best = {"value": float(mags[j]), "index": j, "argument": j / self.A, "test_fn": label, "shift": shift}
        return best


def eigenvalue_scan(
    s: SkewShiftTriple,
    character: Representation,
    N: int,
    A: int = 2048,
    test_fns: Sequence[str] = TEST_FUNCTIONS,
    M: int = 1000,
    rng: np.random.Generator | None = None,
    shifts: Sequence[float] = (0.0,),
) -> SpectralScan:
    """Scan for eigenvalues of ``f(Tx) = alpha gamma(phi(x)) f(x)``.

    For each test function ``h``, ``c_k = <V^k h, h>`` with
    ``V h(x) = gamma(phi(x))^{-1} h(T x)`` is estimated over ``M`` points and
    ``D_N(alpha) = (1/N) sum_{k<N} alpha^{-k} c_k`` is evaluated on the grid
    with one FFT.  A shift ``t`` replaces ``alpha`` by ``alpha exp(2 pi i t)``.
    """
    if character.dim != 1:
        raise ValidationError(f"eigenvalue_scan needs a one-dimensional character, got dimension {character.dim}")
    character.group.check(s.group)
    rng = np.random.default_rng() if rng is None else rng
    catalog = _test_function_catalog(float(s.iet.total), float(s.iet.lengths[0]))
    unknown = [h for h in test_fns if h not in catalog]
    if unknown:
        raise ValidationError(f"unknown test functions {unknown}; choose from {sorted(catalog)}")

    x = _uniform_points(s, M, rng)
    h0 = {h: catalog[h](x).conj() for h in test_fns}
    kind, fiet, table, x, y = _orbit_setup(s, x, None)
    corr = {h: np.empty(N, dtype=complex) for h in test_fns}
    for k0, xs, ys in orbit_blocks(kind, fiet, table, x, y, N, BLOCK):
        b = xs.shape[0]
        twist = character.top_entry(ys.reshape(b * M, -1)).reshape(b, M).conj()
        for h in test_fns:
            corr[h][k0 : k0 + b] = np.mean(twist * catalog[h](xs) * h0[h], axis=1)

    k = np.arange(N)
    values = {}
    for h in test_fns:
        for t in shifts:
            c = corr[h] * np.exp(-2j * np.pi * k * t) if t else corr[h]
            folded = np.bincount(k % A, weights=c.real, minlength=A) + 1j * np.bincount(k % A, weights=c.imag, minlength=A)
            values[(h, float(t))] = np.fft.fft(folded) / N
    trivial = bool(getattr(character, "trivial", False))
    return SpectralScan(A, N, values, corr, trivial)


def cesaro_correlation(
    s: SkewShiftTriple, rep: Representation, N: int, M: int, rng: np.random.Generator, observable: str = "default"
) -> float:
    """``C_N = (1/N) sum_{k<N} |rho_k|^2`` with ``rho_k = <f o T_phi^k, f>``.

    ``f(x, y) = 1[x < |lambda|/2] Theta(y)_{1,1}``, centred by its sample
    mean; points ``(x, y)`` are drawn from Lebesgue x Haar.  ``observable="zero"``
    uses ``f = 0``.
    """
    if N < 1 or M < 1:
        raise ValueError("N and M must be >= 1")
    rep.group.check(s.group)
    if observable == "zero":
        return 0.0
    if observable != "default":
        raise ValidationError(f"unknown observable {observable!r}")
    half = float(s.iet.total) / 2
    x = _uniform_points(s, M, rng)
    y = s.group.sample_batch(rng, M)

    def f(xs, ys):
        b = xs.shape[0]
        top = rep.top_entry(ys.reshape(b * M, -1)).reshape(b, M)
        vals = (xs < half) * top
        return vals - vals.mean(axis=1, keepdims=True)

    f0 = f(x[None, :], y[None, :])[0].conj()
    kind, fiet, table = s.group.kernel_kind, float_iet(s.iet), s.tuple.as_array()
    rho_sq = np.empty(N)
    for k0, xs, ys in orbit_blocks(kind, fiet, table, x, y, N, BLOCK):
        rho = np.mean(f(xs, ys) * f0, axis=1)
        rho_sq[k0 : k0 + xs.shape[0]] = np.abs(rho) ** 2
    return float(rho_sq.mean())
