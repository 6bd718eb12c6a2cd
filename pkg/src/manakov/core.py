"""Domain types, index conventions and the so(4) Lie-Poisson bracket.

The six independent components of the antisymmetric 4x4 momentum matrix are
stored in the fixed order ``(l12, l13, l14, l23, l24, l34)``.  The 3-vector
views used throughout the spectral and Wurzel modules are

    m = (l23, l31, l12) = (l23, -l13, l12),    n = (l14, l24, l34),

i.e. ``m_j = l_kl`` and ``n_j = l_j4`` for cyclic ``(j, k, l)`` of ``(1, 2, 3)``.
All indices in public signatures are 1-based, matching the usual notation.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, DuplicateModulus, IndexOutOfRange

PAIRS = ((1, 2), (1, 3), (1, 4), (2, 3), (2, 4), (3, 4))
PAIR_INDEX = {p: i for i, p in enumerate(PAIRS)}
CYCLIC = {1: (2, 3), 2: (3, 1), 3: (1, 2)}

_IU = np.triu_indices(4, 1)


def component(l, i: int, j: int):
    """Return ``l_ij`` for any ordered pair, applying ``l_ji = -l_ij``."""
    if not (1 <= i <= 4 and 1 <= j <= 4):
        raise IndexOutOfRange(f"index pair ({i}, {j}) outside 1..4")
    if i == j:
        return 0.0 * l[0]
    if i < j:
        return l[PAIR_INDEX[(i, j)]]
    return -l[PAIR_INDEX[(j, i)]]


def to_matrix(l) -> np.ndarray:
    l = np.asarray(l)
    L = np.zeros(l.shape[:-1] + (4, 4), dtype=l.dtype)
    L[..., _IU[0], _IU[1]] = l
    L[..., _IU[1], _IU[0]] = -l
    return L


def from_matrix(L) -> np.ndarray:
    L = np.asarray(L)
    return L[..., _IU[0], _IU[1]]


def m_n(l) -> tuple[np.ndarray, np.ndarray]:
    l = np.asarray(l)
    l12, l13, l14, l23, l24, l34 = (l[..., i] for i in range(6))
    return np.stack([l23, -l13, l12], -1), np.stack([l14, l24, l34], -1)


def from_m_n(m, n) -> np.ndarray:
    m = np.asarray(m)
    n = np.asarray(n)
    return np.stack([m[..., 2], -m[..., 1], n[..., 0], m[..., 0], n[..., 1], n[..., 2]], -1)


def derive_c(a, b) -> np.ndarray:
    """Manakov inertia matrix ``c_ij = (b_i - b_j)/(a_i - a_j)``, zero diagonal."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != (4,) or b.shape != (4,):
        raise ConfigError("a and b must each have four entries")
    da = a[:, None] - a[None, :]
    off = ~np.eye(4, dtype=bool)
    if np.any(da[off] == 0):
        raise DuplicateModulus(f"moduli a must be pairwise distinct, got {a.tolist()}")
    c = np.zeros((4, 4))
    c[off] = (b[:, None] - b[None, :])[off] / da[off]
    return c


@dataclass(frozen=True)
class InertiaParameters:
    a: np.ndarray
    b: np.ndarray
    c: np.ndarray = field(repr=False)

    @classmethod
    def manakov(cls, a, b) -> "InertiaParameters":
        a = np.asarray(a, dtype=float)
        b = np.asarray(b, dtype=float)
        return cls(a, b, derive_c(a, b))


@dataclass(frozen=True)
class AngularMomentum:
    """Thin wrapper around the six stored components."""

    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values)
        if v.shape != (6,):
            raise ValueError("angular momentum has exactly six components")
        object.__setattr__(self, "values", v)

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.values, dtype=dtype)

    @property
    def m(self) -> np.ndarray:
        return m_n(self.values)[0]

    @property
    def n(self) -> np.ndarray:
        return m_n(self.values)[1]

    @classmethod
    def from_m_n(cls, m, n) -> "AngularMomentum":
        return cls(from_m_n(m, n))

    def matrix(self) -> np.ndarray:
        return to_matrix(self.values)


@dataclass(frozen=True)
class IntegralLevels:
    h0: float
    h1: float
    h2: float
    h3: float

    def as_array(self) -> np.ndarray:
        return np.array([self.h0, self.h1, self.h2, self.h3])

    @property
    def scale(self) -> float:
        return float(max(1.0, abs(self.h1), abs(self.h2), abs(self.h3)))


def poisson_bracket(i: int, j: int, k: int, m: int, l) -> float:
    """``{l_ij, l_km}`` for the standard so(4) structure, evaluated at ``l``."""
    for idx in (i, j, k, m):
        if not 1 <= idx <= 4:
            raise IndexOutOfRange(f"index {idx} outside 1..4")
    if i == j or k == m:
        raise IndexOutOfRange("bracket needs off-diagonal generators")
    out = 0.0 * l[0]
    if j == k:
        out = out + component(l, i, m)
    if j == m:
        out = out - component(l, i, k)
    if i == m:
        out = out + component(l, j, k)
    if i == k:
        out = out - component(l, j, m)
    return out


def quadratic_weights(a) -> tuple[np.ndarray, np.ndarray]:
    """Per-component weights of H2 and H3 in storage order.

    The component ``l_jk`` is weighted by the complementary pair ``(p, q)``,
    ``{j, k, p, q} = {1, 2, 3, 4}``.  This is the weighting produced by the
    polynomial part of the generating function and is the one conserved by
    the Manakov flow.
    """
    a = np.asarray(a, dtype=float)
    w2 = np.empty(6)
    w3 = np.empty(6)
    for idx, (j, k) in enumerate(PAIRS):
        p, q = (r for r in (1, 2, 3, 4) if r not in (j, k))
        w2[idx] = a[p - 1] + a[q - 1]
        w3[idx] = a[p - 1] * a[q - 1]
    return w2, w3


def integrals(l, a) -> IntegralLevels:
    l = np.asarray(l)
    m, n = m_n(l)
    w2, w3 = quadratic_weights(a)
    sq = l * l
    return IntegralLevels(
        h0=m @ n,
        h1=sq.sum(),
        h2=w2 @ sq,
        h3=w3 @ sq,
    )


def integrals_series(states, a) -> np.ndarray:
    """Integral values along an array of states, shape ``(n, 4)``."""
    states = np.asarray(states)
    m, n = m_n(states)
    w2, w3 = quadratic_weights(a)
    sq = states * states
    return np.column_stack([(m * n).sum(-1), sq.sum(-1), sq @ w2, sq @ w3])


def hamiltonian(l, c) -> float:
    c = np.asarray(c)
    cu = c[_IU]
    return 0.5 * cu @ (np.asarray(l) ** 2)
