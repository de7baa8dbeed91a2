import math
from fractions import Fraction as F

import numpy as np
import pytest

from ietlab.diagnostics import (
    TEST_FUNCTIONS,
    cesaro_correlation,
    defect_batch,
    defect_matrix,
    defect_trajectory,
    defect_volume,
    eigenvalue_scan,
    fixed_vector_defect,
    matrix_coefficient_average,
)
from ietlab.errors import ValidationError
from ietlab.groups import SO3, SU2, U1, Character, GTuple, Spin, haar_tuple, identity_tuple
from ietlab.iet import build_iet
from ietlab.skew import SkewShiftTriple
from ietlab.streams import random_iet, substream

THETA = math.sqrt(2) - 1
ROTATION = build_iet([1 - THETA, THETA], (2, 1))


def zrot(G, psi):
    return G.from_coords([math.cos(psi / 2), 0, 0, math.sin(psi / 2)])


def test_defect_closed_form_z_rotation():
    rep = Spin(SU2(), F(1, 2))
    for psi in np.linspace(0, 2 * np.pi, 25):
        d, w = fixed_vector_defect(GTuple(SU2(), (zrot(SU2(), psi),)), rep)
        assert d == pytest.approx(4 * math.sin(psi / 4) ** 2, abs=1e-10)
        assert np.linalg.norm(w) == pytest.approx(1, abs=1e-12)
    assert fixed_vector_defect(GTuple(SU2(), (zrot(SU2(), math.pi),)), rep)[0] == pytest.approx(2)


def test_defect_identity_and_shared_axis():
    G = SO3()
    rep = Spin(G, 1)
    assert fixed_vector_defect(identity_tuple(G, 3), rep)[0] <= 1e-12
    t = GTuple(G, (zrot(G, 0.4), zrot(G, 1.3), zrot(G, 2.9)))
    d, w = fixed_vector_defect(t, rep)
    assert d <= 1e-12
    for g in t:
        assert np.linalg.norm(rep.eval(g) @ w - w) <= 1e-9


def test_defect_positive_for_generic_tuple(rng):
    t = haar_tuple(SU2(), 3, rng)
    rep = Spin(SU2(), F(1, 2))
    d, w = fixed_vector_defect(t, rep)
    assert d > 1e-3
    # the eigenvalue is the minimum of the quadratic form
    H = defect_matrix(t, rep)
    for _ in range(20):
        v = rng.standard_normal(2) + 1j * rng.standard_normal(2)
        v /= np.linalg.norm(v)
        assert np.real(v.conj() @ H @ v) >= d - 1e-12
    direct = sum(np.linalg.norm(rep.eval(g) @ w - w) ** 2 for g in t)
    assert direct == pytest.approx(d, abs=1e-10)


def test_defect_conjugation_covariance(rng):
    G = SU2()
    for label in ("1/2", "1", "3/2"):
        rep = Spin(G, F(label))
        t = haar_tuple(G, 4, rng)
        c = G.sample(rng)
        conj = t.replace(G.mul(G.mul(c, g), G.inv(c)) for g in t)
        assert fixed_vector_defect(conj, rep)[0] == pytest.approx(fixed_vector_defect(t, rep)[0], abs=1e-10)


def test_defect_batch_matches_single(rng):
    G = SU2()
    rep = Spin(G, 1)
    arrays = [G.sample_batch(rng, 10) for _ in range(3)]
    batch = defect_batch(G, arrays, rep)
    for i in range(10):
        t = GTuple(G, tuple(G.from_coords(a[i]) for a in arrays))
        assert batch[i] == pytest.approx(fixed_vector_defect(t, rep)[0], abs=1e-10)


def test_defect_volume_shrinks():
    vol = defect_volume(SU2(), Spin(SU2(), F(1, 2)), 2, (0.1, 0.01, 0.001), 100_000, np.random.default_rng(3))
    assert vol[0.1] >= vol[0.01] >= vol[0.001]
    assert vol[0.001] < 1e-3 and vol[0.1] < 0.05


def test_trajectory_identity_and_shared_axis():
    T = random_iet(substream(0, "base", 2), 4)
    traj = defect_trajectory(SkewShiftTriple(T, identity_tuple(SU2(), 4)), Spin(SU2(), F(1, 2)), 30)
    assert traj.complete and np.all(traj.defects == 0)
    G = SO3()
    t = GTuple(G, tuple(zrot(G, a) for a in (0.3, 1.1, 2.0, 2.5)))
    traj = defect_trajectory(SkewShiftTriple(T, t), Spin(G, 1), 30)
    assert np.max(traj.defects) <= 1e-12


def test_trajectory_generic_and_partial(rng):
    T = random_iet(substream(0, "base", 4), 4)
    traj = defect_trajectory(SkewShiftTriple(T, haar_tuple(SU2(), 4, rng)), Spin(SU2(), F(1, 2)), 100)
    assert traj.complete and len(traj.values) == 101 and traj.min_defect > 1e-3
    rot = build_iet([F(3, 5), F(2, 5)], (2, 1))
    traj = defect_trajectory(SkewShiftTriple(rot, haar_tuple(SU2(), 2, rng)), Spin(SU2(), F(1, 2)), 10)
    assert traj.degenerate_at == 3 and len(traj.values) == 3
    with pytest.raises(ValueError):
        defect_trajectory(SkewShiftTriple(rot, haar_tuple(SU2(), 2, rng)), Spin(SU2(), F(1, 2)), 0)


def test_matrix_average_trivial_cocycle(rng):
    s = SkewShiftTriple(ROTATION, identity_tuple(SU2(), 2))
    avg = matrix_coefficient_average(s, Spin(SU2(), 1), 100, 50, rng)
    assert np.allclose(avg.per_step, np.eye(3)) and avg.norm == pytest.approx(1)


def test_matrix_average_constant_cocycle_geometric_sum(rng):
    G = SU2()
    c = zrot(G, 2 * np.pi / 3)
    rep = Spin(G, 1)
    s = SkewShiftTriple(random_iet(substream(0, "base", 5), 3, arithmetic="float"), GTuple(G, (c, c, c)))
    N = 100
    avg = matrix_coefficient_average(s, rep, N, 20, rng)
    inv = np.linalg.inv(rep.eval(c))
    expected = sum(np.linalg.matrix_power(inv, k) for k in range(N)) / N
    assert np.allclose(avg.cesaro, expected, atol=1e-10)


def test_matrix_average_decays_and_is_conjugation_invariant():
    G = SU2()
    rep = Spin(G, F(1, 2))
    s = SkewShiftTriple(random_iet(substream(0, "base", 6), 4), haar_tuple(G, 4, substream(0, "tuple", 6)))
    a = matrix_coefficient_average(s, rep, 2000, 500, substream(0, "mc", 6))
    q, _ = np.linalg.qr(np.random.default_rng(1).standard_normal((2, 2)) + 1j * np.random.default_rng(2).standard_normal((2, 2)))
    b = matrix_coefficient_average(s, rep.conjugated(q), 2000, 500, substream(0, "mc", 6))
    assert a.norm < 0.05
    assert b.norm == pytest.approx(a.norm, abs=1e-10)


def test_scan_trivial_character():
    s = SkewShiftTriple(ROTATION, GTuple(U1(), (0.3, 0.3)))
    scan = eigenvalue_scan(s, Character(U1(), 0), 1000, 256, ["const"], 100, np.random.default_rng(0))
    assert scan.values[("const", 0.0)][0] == pytest.approx(1)
    assert scan.trivial_character and scan.peak()["index"] != 0


def test_scan_rotation_peak_location():
    s = SkewShiftTriple(ROTATION, GTuple(U1(), (0.3, 0.3)))
    A, N = 2048, 10_000
    scan = eigenvalue_scan(s, Character(U1(), 1), N, A, TEST_FUNCTIONS, 1000, np.random.default_rng(0))
    predicted = scan.nearest_index(THETA - 0.3)
    peak = scan.peak()
    assert peak["index"] == predicted == 234 and peak["test_fn"] in ("exp1",)
    # exp1 is an exact eigenfunction: |D_N| at an off-grid point is the Dirichlet kernel value
    delta = ((THETA - 0.3) % 1) - predicted / A
    dirichlet = abs(math.sin(math.pi * N * delta) / (N * math.sin(math.pi * delta)))
    assert scan.magnitude("exp1")[predicted] == pytest.approx(dirichlet, abs=1e-9)
    assert np.all(scan.magnitude("exp1") <= 1 + 1e-12)


def test_scan_shift_axis_reaches_eigenvalue():
    s = SkewShiftTriple(ROTATION, GTuple(U1(), (0.3, 0.3)))
    A, N = 2048, 10_000
    j = round(((THETA - 0.3) % 1) * A)
    delta = ((THETA - 0.3) % 1) - j / A
    scan = eigenvalue_scan(s, Character(U1(), 1), N, A, ["exp1"], 200, np.random.default_rng(0), shifts=(0.0, delta))
    assert scan.magnitude("exp1", delta)[j] == pytest.approx(1, abs=1e-6)


def test_scan_generic_u1_flat():
    T = random_iet(substream(0, "base", 7), 4)
    s = SkewShiftTriple(T, haar_tuple(U1(), 4, substream(0, "tuple", 7), exact=True))
    scan = eigenvalue_scan(s, Character(U1(), 1), 10_000, 2048, TEST_FUNCTIONS, 1000, substream(0, "mc", 7))
    assert scan.peak()["value"] < 0.1


def test_scan_rejects_higher_dimension():
    s = SkewShiftTriple(ROTATION, identity_tuple(SU2(), 2))
    with pytest.raises(ValidationError):
        eigenvalue_scan(s, Spin(SU2(), F(1, 2)), 10)
    s = SkewShiftTriple(ROTATION, identity_tuple(U1(), 2))
    with pytest.raises(ValidationError):
        eigenvalue_scan(s, Character(U1(), 1), 10, test_fns=["nope"])


def test_cesaro_rotation_matches_limit():
    # |rho_k| = 1/2 - ||k theta||, whose mean square is 1/12
    s = SkewShiftTriple(ROTATION, GTuple(U1(), (0.3, 0.3)))
    c = cesaro_correlation(s, Character(U1(), 1), 2000, 20_000, np.random.default_rng(11))
    assert c == pytest.approx(1 / 12, abs=0.01)
    assert cesaro_correlation(s, Character(U1(), 1), 10, 10, np.random.default_rng(0), observable="zero") == 0


def test_cesaro_generic_su2_small():
    G = SU2()
    s = SkewShiftTriple(random_iet(substream(0, "base", 8), 4), haar_tuple(G, 4, substream(0, "tuple", 8)))
    assert cesaro_correlation(s, Spin(G, F(1, 2)), 2000, 500, substream(0, "mc", 8)) < 0.05


def test_monte_carlo_is_seeded():
    G = SU2()
    s = SkewShiftTriple(random_iet(substream(0, "base", 9), 4), haar_tuple(G, 4, substream(0, "tuple", 9)))
    a = cesaro_correlation(s, Spin(G, F(1, 2)), 300, 100, substream(1, "mc"))
    b = cesaro_correlation(s, Spin(G, F(1, 2)), 300, 100, substream(1, "mc"))
    assert a == b
