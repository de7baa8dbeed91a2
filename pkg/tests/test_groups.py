import math
from fractions import Fraction as F

import numpy as np
import pytest
from scipy import stats

from ietlab.errors import BackendMismatchError, ValidationError
from ietlab.groups import (
    SO3,
    SU2,
    U1,
    Character,
    GTuple,
    Spin,
    Torus,
    gamma_step,
    group_from_name,
    gtuple_from_dict,
    gtuple_to_dict,
    haar_invariance_deviation,
    haar_tuple,
    identity_tuple,
    nielsen_alpha,
    nielsen_beta,
    rauzy_A,
    rauzy_A_batch,
    rauzy_A_inverse,
    rauzy_B,
    rauzy_B_batch,
    rauzy_B_inverse,
    rep_eval,
    rep_from_dict,
    representation_from_label,
    tuple_dist,
)
from ietlab.iet import build_iet

GROUPS = [U1(), Torus(2), SU2(), SO3()]


def zrot(psi):
    return SU2().from_coords([math.cos(psi / 2), 0, 0, math.sin(psi / 2)])


@pytest.mark.parametrize("G", GROUPS, ids=lambda g: g.name)
def test_group_axioms(G, rng):
    for _ in range(50):
        a, b, c = (G.sample(rng) for _ in range(3))
        e = G.identity()
        assert G.dist(G.mul(e, a), a) < 1e-12
        assert G.dist(G.mul(a, G.inv(a)), e) < 1e-7  # arccos-free, but still sqrt-limited near 0
        assert G.dist(G.mul(G.mul(a, b), c), G.mul(a, G.mul(b, c))) < 1e-7
        d = G.dist(a, b)
        assert abs(d - G.dist(b, a)) < 1e-12
        assert G.dist(a, c) <= d + G.dist(b, c) + 1e-12
        assert abs(G.dist(G.mul(c, a), G.mul(c, b)) - d) < 1e-7
        assert abs(G.dist(G.mul(a, c), G.mul(b, c)) - d) < 1e-7


def test_exact_u1():
    G = U1()
    a, b = F(3, 4), F(1, 2)
    assert G.mul(a, b) == F(1, 4) and G.inv(a) == F(1, 4)
    assert G.dist(F(1, 10), F(9, 10)) == pytest.approx(0.2)
    s = G.sample(np.random.default_rng(0), exact=True)
    assert isinstance(s, F) and s.denominator <= 2**32


def test_su2_distance_convention():
    G = SU2()
    minus = G.from_coords([-1, 0, 0, 0])
    assert G.dist(G.identity(), minus) == pytest.approx(math.pi)
    # SO3 identifies q and -q
    assert SO3().dist(SO3().identity(), SO3().from_coords([-1, 0, 0, 0])) == 0
    assert SO3().dist(SO3().identity(), SO3().from_coords([0, 0, 0, 1])) == pytest.approx(math.pi)


def test_su2_stays_normalised(rng):
    G = SU2()
    a = G.sample(rng)
    for _ in range(10_000):
        a = G.mul(a, G.sample(rng))
    assert abs(np.linalg.norm(a) - 1) < 1e-12
    assert not a.flags.writeable


def test_backend_mismatch():
    with pytest.raises(BackendMismatchError):
        tuple_dist(identity_tuple(U1(), 2), identity_tuple(SU2(), 2))
    with pytest.raises(BackendMismatchError):
        Character(SU2(), 1)
    with pytest.raises(BackendMismatchError):
        Spin(U1(), F(1, 2))
    with pytest.raises(ValidationError):
        Spin(SO3(), F(1, 2))
    with pytest.raises(ValidationError):
        group_from_name("sp4")
    with pytest.raises(ValidationError):
        SU2().from_coords([1, 1, 0, 0])


def test_haar_u1_uniform_ks():
    x = U1().sample_batch(np.random.default_rng(7), 100_000)[:, 0]
    assert stats.kstest(x, "uniform").pvalue > 1e-3


def test_haar_su2_uniform_on_sphere():
    q = SU2().sample_batch(np.random.default_rng(8), 100_000)
    # each coordinate of a uniform point of S^3 has density (2/pi) sqrt(1-t^2); w^2 ~ Beta(1/2, 3/2)
    assert stats.kstest(q[:, 0] ** 2, stats.beta(0.5, 1.5).cdf).pvalue > 1e-3


@pytest.mark.parametrize("G, label", [(U1(), "1"), (Torus(2), "1,2"), (SU2(), "1/2"), (SU2(), "1"), (SO3(), "1")])
def test_peter_weyl_mean(G, label):
    rep = representation_from_label(G, label)
    mats = rep.eval_batch(G.sample_batch(np.random.default_rng(9), 10_000))
    assert np.linalg.norm(mats.mean(axis=0), 2) < 0.05


@pytest.mark.parametrize("G", [U1(), SU2()], ids=lambda g: g.name)
def test_left_translation_preserves_haar(G, rng):
    rep = representation_from_label(G, "1" if G.kernel_kind == "torus" else "1/2")
    M = 50_000
    c = G.to_array([G.sample(rng)])
    direct = rep.eval_batch(G.sample_batch(rng, M)).mean(axis=0)
    pushed = rep.eval_batch(G.mul_batch(np.repeat(c, M, axis=0), G.sample_batch(rng, M))).mean(axis=0)
    assert np.max(np.abs(direct - pushed)) < 5 / math.sqrt(M)


@pytest.mark.parametrize(
    "G, label",
    [(U1(), "1"), (U1(), "2"), (U1(), "3"), (Torus(3), "1,-2,3"), (SU2(), "1/2"), (SU2(), "1"), (SU2(), "3/2"), (SU2(), "3"), (SO3(), "1"), (SO3(), "2")],
)
def test_representation_laws(G, label, rng):
    rep = representation_from_label(G, label)
    a, b = G.sample_batch(rng, 2000), G.sample_batch(rng, 2000)
    ta, tb, tab = rep.eval_batch(a), rep.eval_batch(b), rep.eval_batch(G.mul_batch(a, b))
    assert np.max(np.abs(tab - ta @ tb)) < 1e-12
    eye = np.eye(rep.dim)
    assert np.max(np.abs(ta @ ta.conj().transpose(0, 2, 1) - eye)) < 1e-12
    assert np.allclose(rep_eval(rep, G.identity()), eye, atol=1e-15)
    assert np.allclose(rep.top_entry(a), ta[:, 0, 0], atol=1e-14)


def test_character_values():
    rep = Character(U1(), 2)
    assert rep_eval(rep, F(1, 4))[0, 0] == pytest.approx(-1)
    assert rep.trivial is False and Character(U1(), 0).trivial


def test_spin_half_of_z_rotation():
    psi = 0.7
    m = rep_eval(Spin(SU2(), F(1, 2)), zrot(psi))
    assert abs(m[0, 1]) < 1e-15 and abs(m[1, 0]) < 1e-15
    assert np.angle(m[0, 0]) == pytest.approx(-psi / 2)
    assert np.angle(m[1, 1]) == pytest.approx(psi / 2)


def test_spin_dimension_and_irreducibility(rng):
    # Schur: the Haar average of |chi|^2 is 1 for an irreducible representation
    for j in ("1/2", "1", "3/2"):
        rep = Spin(SU2(), F(j))
        assert rep.dim == int(2 * F(j)) + 1
        chi = np.trace(rep.eval_batch(SU2().sample_batch(rng, 40_000)), axis1=1, axis2=2)
        assert np.mean(np.abs(chi) ** 2) == pytest.approx(1, abs=0.05)


def test_so3_reps_ignore_sign(rng):
    q = SU2().sample_batch(rng, 100)
    rep = Spin(SO3(), 1)
    assert np.allclose(rep.eval_batch(q), rep.eval_batch(-q), atol=1e-14)


def test_nielsen_maps():
    G = U1()
    t = GTuple(G, (F(1, 10), F(2, 10), F(3, 10)))
    assert nielsen_alpha(t, 1, 3).elements == (F(3, 10), F(2, 10), F(1, 10))
    assert nielsen_alpha(nielsen_alpha(t, 1, 2), 1, 2) == t
    assert nielsen_beta(GTuple(G, (F(1, 10), F(2, 10)))).elements == (F(3, 10), F(2, 10))
    with pytest.raises(IndexError):
        nielsen_alpha(t, 2, 2)
    with pytest.raises(IndexError):
        nielsen_beta(GTuple(G, (F(1, 10),)))


def test_nielsen_beta_order_nonabelian(rng):
    G = SU2()
    a, b = G.sample(rng), G.sample(rng)
    out = nielsen_beta(GTuple(G, (a, b)))
    assert G.dist(out.g(1), G.mul(b, a)) < 1e-12


def test_rauzy_maps_formulas(rng):
    G = SU2()
    g1, g2, g3 = (G.sample(rng) for _ in range(3))
    t = GTuple(G, (g1, g2, g3))
    a = rauzy_A(t, (3, 2, 1))  # j = 1
    expected = (g1, G.mul(g3, g1), g2)
    assert max(G.dist(x, y) for x, y in zip(a, expected)) < 1e-12
    b = rauzy_B(t, (2, 3, 1))  # j = 2
    expected = (g1, G.mul(g3, g2), g3)
    assert max(G.dist(x, y) for x, y in zip(b, expected)) < 1e-12
    two = GTuple(G, (g1, g2))
    assert tuple_dist(rauzy_A(two, (2, 1)), GTuple(G, (g1, G.mul(g2, g1)))) < 1e-12
    ident = identity_tuple(G, 3)
    assert tuple_dist(rauzy_A(ident, (3, 2, 1)), ident) == 0
    with pytest.raises(ValidationError):
        rauzy_A(two, (3, 2, 1))


def test_rauzy_b_abelian():
    t = GTuple(U1(), (F(1, 3), F(1, 2)))
    assert rauzy_B(t, (2, 1)).elements == (F(5, 6), F(1, 2))


def _swap(t, i, j):
    return t if i == j else nielsen_alpha(t, min(i, j), max(i, j))


def _times_left(t, p, q):
    """Coordinate p becomes g^q g^p, by Nielsen maps only."""
    u = _swap(t, 1, p)
    q2 = p if q == 1 else q
    u = nielsen_beta(_swap(u, 2, q2))
    return _swap(_swap(u, 2, q2), 1, p)


def _nielsen_A(t, j):
    """alpha/beta word for map A: carry g^n to slot j+1, then combine slots j and j+1."""
    n = len(t)
    for k in range(n, j + 1, -1):
        t = _swap(t, k - 1, k)
    # slot j+1 holds g^n; swap so that beta-type left product keeps g^j untouched
    t = _swap(t, j, j + 1)
    t = _times_left(t, j, j + 1)  # slot j: g^j g^n
    return _swap(t, j, j + 1)


PERMS_J = [(2, 1), (3, 2, 1), (2, 3, 1), (4, 3, 2, 1), (2, 4, 1, 3), (4, 1, 3, 2)]


@pytest.mark.parametrize("perm", PERMS_J)
def test_rauzy_b_is_a_nielsen_composition(perm, rng):
    G = SU2()
    n, j = len(perm), perm.index(len(perm)) + 1
    t = haar_tuple(G, n, rng)
    assert tuple_dist(rauzy_B(t, perm), _times_left(t, j, n)) < 1e-12


@pytest.mark.parametrize("perm", PERMS_J)
def test_rauzy_a_nielsen_composition(perm, rng):
    n, j = len(perm), perm.index(len(perm)) + 1
    # abelian case: A is exactly an alpha/beta word
    t = haar_tuple(U1(), n, rng, exact=True)
    assert _nielsen_A(t, j) == rauzy_A(t, perm)
    # non-abelian: the same word yields g^j g^n where A has g^n g^j;
    # both maps preserve Haar measure, by left and right invariance
    G = SU2()
    t = haar_tuple(G, n, rng)
    word, a = _nielsen_A(t, j), rauzy_A(t, perm)
    assert G.dist(word.g(j + 1), G.mul(t.g(j), t.g(n))) < 1e-12
    assert G.dist(a.g(j + 1), G.mul(t.g(n), t.g(j))) < 1e-12
    others = [k for k in range(1, n + 1) if k != j + 1]
    assert max(G.dist(word.g(k), a.g(k)) for k in others) < 1e-12


@pytest.mark.parametrize("perm", [(2, 1), (3, 2, 1), (2, 3, 1), (3, 1, 2), (4, 3, 2, 1), (2, 4, 1, 3)])
def test_rauzy_inverses(perm, rng):
    for G in (SU2(), U1()):
        exact = G.kernel_kind == "torus"
        t = haar_tuple(G, len(perm), rng, exact=exact)
        for fwd, inv in ((rauzy_A, rauzy_A_inverse), (rauzy_B, rauzy_B_inverse)):
            back = inv(fwd(t, perm), perm)
            if exact:
                assert back == t and fwd(inv(t, perm), perm) == t
            else:
                assert tuple_dist(back, t) < 1e-12
                assert tuple_dist(fwd(inv(t, perm), perm), t) < 1e-12


def test_batch_maps_match_elementwise(rng):
    G = SU2()
    arrays = [G.sample_batch(rng, 5) for _ in range(3)]
    for perm in ((3, 2, 1), (2, 3, 1)):
        for one, batch in ((rauzy_A, rauzy_A_batch), (rauzy_B, rauzy_B_batch)):
            out = batch(G, arrays, perm)
            for i in range(5):
                t = GTuple(G, tuple(G.from_coords(a[i]) for a in arrays))
                assert tuple_dist(one(t, perm), GTuple(G, tuple(G.from_coords(o[i]) for o in out))) < 1e-12


def test_gamma_step():
    G = U1()
    g1, g2 = F(1, 10), F(3, 10)
    t = GTuple(G, (g1, g2))
    assert gamma_step(build_iet([0.6, 0.4], (2, 1)), t).elements == (g1, g1 + g2)
    assert gamma_step(build_iet([0.4, 0.6], (2, 1)), t).elements == (g1 + g2, g2)
    ident = identity_tuple(G, 2, exact=True)
    assert gamma_step(build_iet([0.4, 0.6], (2, 1)), ident) == ident


def test_haar_invariance_statistic():
    for G, reps in ((U1(), ["1", "2"]), (SU2(), ["1/2", "1"])):
        out = haar_invariance_deviation(
            G, [representation_from_label(G, r) for r in reps], 3, [(3, 2, 1), (2, 3, 1)], 20_000,
            np.random.default_rng(1), np.random.default_rng(2),
        )
        assert out["max_deviation"] < out["threshold"]
        assert len(out["rows"]) == 2 * 2 * len(reps) * 3


def test_serialization(rng):
    for G in GROUPS:
        t = haar_tuple(G, 3, rng)
        back = gtuple_from_dict(gtuple_to_dict(t))
        assert back.group == G and tuple_dist(back, t) < 1e-15
    exact = haar_tuple(U1(), 2, rng, exact=True)
    assert gtuple_from_dict(gtuple_to_dict(exact)) == exact
    rep = Spin(SU2(), F(3, 2))
    assert rep_from_dict(rep.to_dict()).label == "3/2"
