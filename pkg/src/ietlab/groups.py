"""Compact group backends, unitary representations and the Rauzy maps on G^n.

Backends
--------
``U1``
    Elements are angles in ``[0, 1)`` (Fraction for exact work, float otherwise).
``Torus(k)``
    Tuples of ``k`` angles.
``SU2``
    Unit quaternions ``(w, x, y, z)`` as read-only float arrays.
``SO3``
    Same coordinates, identified up to sign.

Representations
---------------
``Character(group, p)`` is ``theta -> exp(2 pi i p.theta)`` on U1/Torus and
``Spin(group, j)`` is the spin-``j`` representation of SU2 (integer ``j`` for
SO3), realised on degree-``2j`` homogeneous polynomials in two variables with
the orthonormal basis ``u^{j+m} v^{j-m} / sqrt((j+m)! (j-m)!)``, ordered by
decreasing ``m``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Callable, Sequence

import numpy as np

from .errors import BackendMismatchError, ValidationError
from .iet import IET, Permutation, as_permutation

U1_EXACT_DENOMINATOR = 2**32


def _reduce_angle(a):
    if isinstance(a, Fraction):
        return a - math.floor(a)
    a = float(a) % 1.0
    return 0.0 if a == 1.0 else a


def _circle_dist(a, b):
    d = _reduce_angle(a - b)
    return float(min(d, 1 - d))


def _as_angle(v, exact: bool):
    if exact:
        return _reduce_angle(v if isinstance(v, Fraction) else Fraction(v))
    return _reduce_angle(float(Fraction(v)) if isinstance(v, str) else float(v))


class CompactGroup:
    """Common interface of the group backends."""

    name: str
    kernel_kind: str  # "torus" or "quat": which orbit kernel handles it
    coord_dim: int

    def __eq__(self, other):
        return type(self) is type(other) and self.name == other.name

    def __hash__(self):
        return hash(self.name)

    def __repr__(self):
        return f"{type(self).__name__}()"

    def check(self, other: "CompactGroup"):
        if self != other:
            raise BackendMismatchError(f"backend mismatch: {self.name} vs {other.name}")


class _AngleGroup(CompactGroup):
    kernel_kind = "torus"

    # elements are stored as tuples for Torus and bare scalars for U1
    def _pack(self, seq):
        raise NotImplementedError

    def _unpack(self, a):
        raise NotImplementedError

    def identity(self, exact: bool = False):
        zero = Fraction(0) if exact else 0.0
        return self._pack([zero] * self.coord_dim)

    def mul(self, a, b):
        return self._pack([_reduce_angle(u + v) for u, v in zip(self._unpack(a), self._unpack(b))])

    def inv(self, a):
        return self._pack([_reduce_angle(-u) for u in self._unpack(a)])

    def dist(self, a, b) -> float:
        return max(_circle_dist(u, v) for u, v in zip(self._unpack(a), self._unpack(b)))

    def sample(self, rng: np.random.Generator, exact: bool = False):
        if exact:
            nums = rng.integers(0, U1_EXACT_DENOMINATOR, size=self.coord_dim)
            return self._pack([Fraction(int(v), U1_EXACT_DENOMINATOR) for v in nums])
        return self._pack(list(rng.random(self.coord_dim)))

    def sample_batch(self, rng: np.random.Generator, size: int) -> np.ndarray:
        return rng.random((size, self.coord_dim))

    def is_exact(self, a) -> bool:
        return all(isinstance(v, Fraction) for v in self._unpack(a))

    def coords(self, a) -> list:
        return list(self._unpack(a))

    def from_coords(self, coords, exact: bool | None = None):
        coords = list(coords)
        if len(coords) != self.coord_dim:
            raise ValidationError(f"{self.name} element needs {self.coord_dim} coordinates, got {len(coords)}")
        if exact is None:
            exact = not any(isinstance(v, float) for v in coords)
        return self._pack([_as_angle(v, exact) for v in coords])

    def to_array(self, elements) -> np.ndarray:
        return np.array([[float(v) for v in self._unpack(a)] for a in elements], dtype=float).reshape(
            len(elements), self.coord_dim
        )

    def mul_batch(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        return np.mod(a + b, 1.0)

    def inv_batch(self, a: np.ndarray) -> np.ndarray:
        return np.mod(-a, 1.0)

    def identity_batch(self, size: int) -> np.ndarray:
        return np.zeros((size, self.coord_dim))


class U1(_AngleGroup):
    name = "u1"
    coord_dim = 1

    def _pack(self, seq):
        return seq[0]

    def _unpack(self, a):
        return (a,)


class Torus(_AngleGroup):
    def __init__(self, k: int):
        if k < 1:
            raise ValidationError("torus dimension must be >= 1")
        self.coord_dim = int(k)
        self.name = f"torus{k}"

    def __repr__(self):
        return f"Torus({self.coord_dim})"

    def _pack(self, seq):
        return tuple(seq)

    def _unpack(self, a):
        return tuple(a)


def _freeze(q: np.ndarray) -> np.ndarray:
    q.setflags(write=False)
    return q


def quat_mul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Hamilton product on arrays of shape ``(..., 4)``."""
    aw, ax, ay, az = a[..., 0], a[..., 1], a[..., 2], a[..., 3]
    bw, bx, by, bz = b[..., 0], b[..., 1], b[..., 2], b[..., 3]
    return np.stack(
        [
            aw * bw - ax * bx - ay * by - az * bz,
            aw * bx + ax * bw + ay * bz - az * by,
            aw * by - ax * bz + ay * bw + az * bx,
            aw * bz + ax * by - ay * bx + az * bw,
        ],
        axis=-1,
    )


def quat_normalize(q: np.ndarray) -> np.ndarray:
    w, x, y, z = q[..., 0], q[..., 1], q[..., 2], q[..., 3]
    norm = np.sqrt(w * w + x * x + y * y + z * z)
    return q / norm[..., None]


def _sphere_angle(a: np.ndarray, b: np.ndarray) -> float:
    # 2*atan2(|a-b|, |a+b|) is the great-circle angle, stable near 0 and pi
    return float(2.0 * math.atan2(np.linalg.norm(a - b), np.linalg.norm(a + b)))


class SU2(CompactGroup):
    name = "su2"
    kernel_kind = "quat"
    coord_dim = 4

    def identity(self, exact: bool = False):
        return _freeze(np.array([1.0, 0.0, 0.0, 0.0]))

    def _canon(self, q):
        return q

    def mul(self, a, b):
        return _freeze(self._canon(quat_normalize(quat_mul(a, b))))

    def inv(self, a):
        return _freeze(self._canon(a * np.array([1.0, -1.0, -1.0, -1.0])))

    def dist(self, a, b) -> float:
        """Great-circle angle on the unit 3-sphere, in ``[0, pi]``."""
        return _sphere_angle(np.asarray(a), np.asarray(b))

    def sample(self, rng: np.random.Generator, exact: bool = False):
        return _freeze(self._canon(quat_normalize(rng.standard_normal(4))))

    def sample_batch(self, rng: np.random.Generator, size: int) -> np.ndarray:
        return quat_normalize(rng.standard_normal((size, 4)))

    def is_exact(self, a) -> bool:
        return False

    def coords(self, a) -> list:
        return [float(v) for v in a]

    def from_coords(self, coords, exact: bool | None = None):
        q = np.array([float(Fraction(v)) if isinstance(v, str) else float(v) for v in coords], dtype=float)
        if q.shape != (4,):
            raise ValidationError(f"{self.name} element needs 4 coordinates, got {len(q)}")
        norm = np.linalg.norm(q)
        if abs(norm - 1.0) > 1e-9:
            raise ValidationError(f"{self.name} element {list(coords)} is not a unit quaternion")
        return _freeze(self._canon(q / norm))

    def to_array(self, elements) -> np.ndarray:
        return np.array([np.asarray(a, dtype=float) for a in elements]).reshape(len(elements), 4)

    def mul_batch(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        return quat_normalize(quat_mul(a, b))

    def inv_batch(self, a: np.ndarray) -> np.ndarray:
        return a * np.array([1.0, -1.0, -1.0, -1.0])

    def identity_batch(self, size: int) -> np.ndarray:
        out = np.zeros((size, 4))
        out[:, 0] = 1.0
        return out


class SO3(SU2):
    """Rotations, as unit quaternions modulo sign (canonical: first nonzero coordinate > 0)."""

    name = "so3"

    def _canon(self, q):
        nz = np.flatnonzero(np.abs(q) > 0)
        if nz.size and q[nz[0]] < 0:
            return -q
        return q

    def dist(self, a, b) -> float:
        """Rotation angle of ``a b^{-1}``, in ``[0, pi]``."""
        a, b = np.asarray(a), np.asarray(b)
        return 2.0 * min(_sphere_angle(a, b), _sphere_angle(a, -b))


def group_from_name(name: str, dim: int | None = None) -> CompactGroup:
    name = name.lower()
    if name in ("u1", "u(1)"):
        return U1()
    if name == "su2":
        return SU2()
    if name == "so3":
        return SO3()
    if name.startswith("torus"):
        k = int(name[5:]) if name[5:] else (dim or 1)
        return Torus(k)
    raise ValidationError(f"unknown group backend {name!r}")


def haar_sample(group: CompactGroup, rng: np.random.Generator, exact: bool = False):
    """One Haar-distributed element (exact rational angles on request for U1/Torus)."""
    return group.sample(rng, exact)


# ---------------------------------------------------------------------------
# n-tuples and the maps of G^n


@dataclass(frozen=True)
class GTuple:
    """An n-tuple ``(g^1, ..., g^n)`` of elements of one group."""

    group: CompactGroup
    elements: tuple

    def __post_init__(self):
        object.__setattr__(self, "elements", tuple(self.elements))

    def __len__(self):
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def __getitem__(self, i):
        return self.elements[i]

    def g(self, k: int):
        """1-based access, ``g^k``."""
        return self.elements[k - 1]

    @property
    def exact(self) -> bool:
        return all(self.group.is_exact(a) for a in self.elements)

    def replace(self, elements) -> "GTuple":
        return GTuple(self.group, tuple(elements))

    def as_array(self) -> np.ndarray:
        return self.group.to_array(self.elements)


def identity_tuple(group: CompactGroup, n: int, exact: bool = False) -> GTuple:
    return GTuple(group, (group.identity(exact),) * n)


def haar_tuple(group: CompactGroup, n: int, rng: np.random.Generator, exact: bool = False) -> GTuple:
    return GTuple(group, tuple(group.sample(rng, exact) for _ in range(n)))


def nielsen_alpha(t: GTuple, i: int, j: int) -> GTuple:
    """Swap coordinates ``i < j`` (1-based)."""
    if not 1 <= i < j <= len(t):
        raise IndexError(f"need 1 <= i < j <= {len(t)}, got i={i}, j={j}")
    el = list(t.elements)
    el[i - 1], el[j - 1] = el[j - 1], el[i - 1]
    return t.replace(el)


def nielsen_beta(t: GTuple) -> GTuple:
    """``(g^1, g^2, ...) -> (g^2 g^1, g^2, ...)``."""
    if len(t) < 2:
        raise IndexError("nielsen_beta needs at least two coordinates")
    el = list(t.elements)
    el[0] = t.group.mul(el[1], el[0])
    return t.replace(el)


def _rauzy_a_seq(seq: Sequence, j: int, mul: Callable) -> list:
    n = len(seq)
    return list(seq[:j]) + [mul(seq[n - 1], seq[j - 1])] + list(seq[j : n - 1])


def _rauzy_b_seq(seq: Sequence, j: int, mul: Callable) -> list:
    n = len(seq)
    out = list(seq)
    out[j - 1] = mul(seq[n - 1], seq[j - 1])
    return out


def _check_length(t: GTuple, perm: Permutation):
    if len(t) != perm.n:
        raise ValidationError(f"tuple of length {len(t)} for a permutation of {perm.n} symbols")


def rauzy_A(t: GTuple, perm) -> GTuple:
    """Rauzy map A, with ``j = pi^{-1}(n)``::

        h^k = g^k          for k <= j
        h^{j+1} = g^n g^j
        h^k = g^{k-1}      for j+2 <= k <= n
    """
    perm = as_permutation(perm)
    _check_length(t, perm)
    return t.replace(_rauzy_a_seq(t.elements, perm.inverse(perm.n), t.group.mul))


def rauzy_B(t: GTuple, perm) -> GTuple:
    """Rauzy map B, with ``j = pi^{-1}(n)``: ``h^j = g^n g^j``, other coordinates kept."""
    perm = as_permutation(perm)
    _check_length(t, perm)
    return t.replace(_rauzy_b_seq(t.elements, perm.inverse(perm.n), t.group.mul))


def rauzy_A_inverse(t: GTuple, perm) -> GTuple:
    perm = as_permutation(perm)
    _check_length(t, perm)
    n, j, mul, inv = perm.n, perm.inverse(perm.n), t.group.mul, t.group.inv
    h = t.elements
    g_n = mul(h[j], inv(h[j - 1]))
    return t.replace(list(h[:j]) + list(h[j + 1 : n]) + [g_n])


def rauzy_B_inverse(t: GTuple, perm) -> GTuple:
    perm = as_permutation(perm)
    _check_length(t, perm)
    n, j = perm.n, perm.inverse(perm.n)
    el = list(t.elements)
    el[j - 1] = t.group.mul(t.group.inv(el[n - 1]), el[j - 1])
    return t.replace(el)


def rauzy_A_batch(group: CompactGroup, arrays: Sequence[np.ndarray], perm) -> list[np.ndarray]:
    """Rauzy map A on a batch: ``arrays[k]`` holds samples of the k-th coordinate."""
    perm = as_permutation(perm)
    return _rauzy_a_seq(list(arrays), perm.inverse(perm.n), group.mul_batch)


def rauzy_B_batch(group: CompactGroup, arrays: Sequence[np.ndarray], perm) -> list[np.ndarray]:
    perm = as_permutation(perm)
    return _rauzy_b_seq(list(arrays), perm.inverse(perm.n), group.mul_batch)


def gamma_step(iet: IET, t: GTuple) -> GTuple:
    """Extended Veech cocycle: ``A g`` under Rauzy rule A, ``B g`` under rule B."""
    from .rauzy import RauzyRule, rauzy_rule

    rule = rauzy_rule(iet)
    return rauzy_A(t, iet.perm) if rule is RauzyRule.A else rauzy_B(t, iet.perm)


def tuple_dist(a: GTuple, b: GTuple) -> float:
    """Max-over-coordinates distance on G^n."""
    a.group.check(b.group)
    return max(a.group.dist(u, v) for u, v in zip(a.elements, b.elements))


# ---------------------------------------------------------------------------
# representations


class Representation:
    group: CompactGroup
    dim: int

    @property
    def backend(self) -> str:
        return self.group.name

    @property
    def label(self) -> str:
        raise NotImplementedError

    def eval_batch(self, arr: np.ndarray) -> np.ndarray:
        """Matrices ``Theta(a)`` for a batch of coordinates, shape ``(M, d, d)``."""
        raise NotImplementedError

    def eval(self, a) -> np.ndarray:
        return self.eval_batch(self.group.to_array([a]))[0]

    def top_entry(self, arr: np.ndarray) -> np.ndarray:
        """Matrix coefficient ``Theta(a)_{1,1}`` for a batch."""
        return self.eval_batch(arr)[:, 0, 0]

    def conjugated(self, unitary: np.ndarray) -> "Representation":
        return ConjugatedRep(self, unitary)

    def to_dict(self) -> dict:
        return {"backend": self.backend, "label": self.label}

    def __repr__(self):
        return f"{type(self).__name__}({self.backend}, {self.label})"


def rep_eval(rep: Representation, a) -> np.ndarray:
    return rep.eval(a)


class Character(Representation):
    """``exp(2 pi i <p, theta>)`` on U1 or a torus."""

    def __init__(self, group: CompactGroup, p):
        if group.kernel_kind != "torus":
            raise BackendMismatchError(f"characters live on U1/Torus, not {group.name}")
        p = (int(p),) if np.ndim(p) == 0 else tuple(int(v) for v in p)
        if len(p) != group.coord_dim:
            raise ValidationError(f"character index {p} does not match {group.name}")
        self.group, self.p, self.dim = group, p, 1

    @property
    def label(self) -> str:
        return ",".join(map(str, self.p))

    @property
    def trivial(self) -> bool:
        return not any(self.p)

    def eval(self, a) -> np.ndarray:
        # exact reduction first keeps rational angles accurate
        phase = _reduce_angle(sum(pi * v for pi, v in zip(self.p, self.group.coords(a))))
        return np.array([[np.exp(2j * np.pi * float(phase))]])

    def eval_batch(self, arr: np.ndarray) -> np.ndarray:
        phase = np.mod(arr @ np.array(self.p, dtype=float), 1.0)
        return np.exp(2j * np.pi * phase)[:, None, None]


def su2_matrices(q: np.ndarray):
    """Entries ``(U11, U12, U21, U22)`` of ``U = wI - i(x sx + y sy + z sz)``."""
    w, x, y, z = q[..., 0], q[..., 1], q[..., 2], q[..., 3]
    return w - 1j * z, -y - 1j * x, y - 1j * x, w + 1j * z


class Spin(Representation):
    """Spin-``j`` representation of SU2 (or SO3 for integer ``j``), dimension ``2j+1``."""

    def __init__(self, group: CompactGroup, j):
        if group.kernel_kind != "quat":
            raise BackendMismatchError(f"spin representations live on SU2/SO3, not {group.name}")
        j = Fraction(j)
        if j <= 0 or (2 * j).denominator != 1:
            raise ValidationError(f"spin must be a positive half-integer, got {j}")
        if isinstance(group, SO3) and j.denominator != 1:
            raise ValidationError(f"SO3 only has integer spins, got {j}")
        self.group, self.j = group, j
        self.two_j = int(2 * j)
        self.dim = self.two_j + 1

    @property
    def label(self) -> str:
        return str(self.j)

    @cached_property
    def _terms(self):
        # D[a', a] = sum over r+s = a' of coef * U11^r U21^(a-r) U12^s U22^(b-s),
        # a = j+m is the power of u in the source basis vector, b = 2j - a
        tj = self.two_j
        fact = [math.factorial(i) for i in range(tj + 1)]
        terms = []
        for a in range(tj + 1):
            b = tj - a
            for r, s in itertools.product(range(a + 1), range(b + 1)):
                ap = r + s
                coef = math.comb(a, r) * math.comb(b, s) * math.sqrt(fact[ap] * fact[tj - ap] / (fact[a] * fact[b]))
                # row/column index in decreasing-m order is 2j - power of u
                terms.append((tj - ap, tj - a, coef, r, a - r, s, b - s))
        return terms

    def eval_batch(self, arr: np.ndarray) -> np.ndarray:
        arr = np.asarray(arr, dtype=float).reshape(-1, 4)
        u11, u12, u21, u22 = su2_matrices(arr)
        if self.two_j == 1:
            return np.stack([np.stack([u11, u12], -1), np.stack([u21, u22], -1)], -2)
        powers = [np.stack([e**i for i in range(self.two_j + 1)]) for e in (u11, u21, u12, u22)]
        p11, p21, p12, p22 = powers
        out = np.zeros((arr.shape[0], self.dim, self.dim), dtype=complex)
        for row, col, coef, e11, e21, e12, e22 in self._terms:
            out[:, row, col] += coef * p11[e11] * p21[e21] * p12[e12] * p22[e22]
        return out

    def top_entry(self, arr: np.ndarray) -> np.ndarray:
        """``Theta(a)_{1,1} = U11^{2j}`` for a batch of quaternions."""
        u11 = su2_matrices(np.asarray(arr).reshape(-1, 4))[0]
        return u11**self.two_j


class ConjugatedRep(Representation):
    """``a -> V Theta(a) V^*`` for a fixed unitary ``V``; unitarily equivalent to ``Theta``."""

    def __init__(self, rep: Representation, unitary: np.ndarray):
        unitary = np.asarray(unitary, dtype=complex)
        if unitary.shape != (rep.dim, rep.dim):
            raise ValidationError("conjugating matrix has the wrong shape")
        self.rep, self.unitary = rep, unitary
        self.group, self.dim = rep.group, rep.dim

    @property
    def label(self) -> str:
        return self.rep.label

    def eval_batch(self, arr: np.ndarray) -> np.ndarray:
        return self.unitary @ self.rep.eval_batch(arr) @ self.unitary.conj().T


def representation_from_label(group: CompactGroup, label) -> Representation:
    if group.kernel_kind == "torus":
        if isinstance(label, str):
            label = [int(v) for v in label.split(",")]
        return Character(group, label)
    return Spin(group, Fraction(str(label)))


def rep_to_dict(rep: Representation) -> dict:
    return rep.to_dict()


def rep_from_dict(doc: dict, group: CompactGroup | None = None) -> Representation:
    group = group or group_from_name(doc["backend"])
    return representation_from_label(group, doc["label"])


def gtuple_to_dict(t: GTuple) -> dict:
    from .iet import format_scalar

    doc = {
        "backend": t.group.name,
        "elements": [[format_scalar(v) if isinstance(v, Fraction) else float(v) for v in t.group.coords(a)] for a in t],
    }
    return doc


def gtuple_from_dict(doc: dict) -> GTuple:
    try:
        group = group_from_name(doc["backend"])
        elements = doc["elements"]
    except KeyError as exc:
        raise ValidationError(f"tuple document is missing {exc.args[0]!r}") from None
    return GTuple(group, tuple(group.from_coords(c) for c in elements))


# ---------------------------------------------------------------------------
# Haar invariance of the Rauzy maps


def haar_invariance_deviation(
    group: CompactGroup,
    reps: Sequence[Representation],
    n: int,
    perms: Sequence,
    samples: int,
    rng_direct: np.random.Generator,
    rng_push: np.random.Generator,
) -> dict:
    """Compare matrix-coefficient means of Haar samples of G^n with their A/B pushforwards.

    Returns the largest deviation over every coordinate, every matrix entry,
    every representation, both maps and every permutation, together with the
    Monte Carlo threshold ``5 / sqrt(samples)``.
    """
    direct = [group.sample_batch(rng_direct, samples) for _ in range(n)]
    base_means = {rep.label: [rep.eval_batch(c).mean(axis=0) for c in direct] for rep in reps}
    worst, rows = 0.0, []
    for perm in perms:
        source = [group.sample_batch(rng_push, samples) for _ in range(n)]
        for name, fn in (("A", rauzy_A_batch), ("B", rauzy_B_batch)):
            pushed = fn(group, source, perm)
            for rep in reps:
                for k, arr in enumerate(pushed):
                    dev = float(np.max(np.abs(rep.eval_batch(arr).mean(axis=0) - base_means[rep.label][k])))
                    rows.append({"perm": list(as_permutation(perm).images), "map": name, "rep": rep.label, "k": k + 1, "deviation": dev})
                    worst = max(worst, dev)
    return {"max_deviation": worst, "threshold": 5.0 / math.sqrt(samples), "samples": samples, "rows": rows}
