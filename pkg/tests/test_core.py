import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from manakov.core import (
    PAIRS,
    AngularMomentum,
    InertiaParameters,
    component,
    derive_c,
    from_m_n,
    from_matrix,
    hamiltonian,
    integrals,
    m_n,
    poisson_bracket,
    to_matrix,
)
from manakov.errors import DuplicateModulus

finite = st.floats(-3, 3, allow_nan=False, allow_infinity=False)
states = st.lists(finite, min_size=6, max_size=6).map(np.array)


def test_manakov_c_is_pairwise_sum_for_squares():
    a = np.array([1.0, 2.0, 3.0, 4.0])
    c = derive_c(a, a ** 2)
    expected = a[:, None] + a[None, :]
    np.fill_diagonal(expected, 0.0)
    assert np.allclose(c, expected)


def test_bracket_rejects_bad_indices():
    with pytest.raises(IndexError):
        poisson_bracket(1, 5, 2, 3, np.ones(6))
    with pytest.raises(IndexError):
        poisson_bracket(2, 2, 1, 3, np.ones(6))


def test_duplicate_modulus_rejected():
    with pytest.raises(DuplicateModulus):
        derive_c([1, 2, 2, 4], [1, 2, 3, 4])


def test_matrix_round_trip_and_antisymmetry():
    l = np.arange(1.0, 7.0)
    L = to_matrix(l)
    assert np.allclose(L, -L.T)
    assert np.allclose(from_matrix(L), l)
    assert component(l, 3, 1) == -l[PAIRS.index((1, 3))]


def test_m_n_layout():
    l = np.arange(1.0, 7.0)  # l12, l13, l14, l23, l24, l34
    m, n = m_n(l)
    assert np.allclose(m, [4.0, -2.0, 1.0])
    assert np.allclose(n, [3.0, 5.0, 6.0])
    assert np.allclose(from_m_n(m, n), l)
    am = AngularMomentum(l)
    assert np.allclose(AngularMomentum.from_m_n(am.m, am.n).values, l)


def test_integral_values_small_state():
    # only l12 = 1 and l34 = 2: by hand h0 = 1*2, h1 = 1 + 4,
    # quadratic weights pair l12 with (a3 + a4) and l34 with (a1 + a2)
    a = np.array([1.0, 2.0, 3.0, 4.0])
    l = np.zeros(6)
    l[0], l[5] = 1.0, 2.0
    h = integrals(l, a)
    assert h.h0 == pytest.approx(2.0)
    assert h.h1 == pytest.approx(5.0)
    assert h.h2 == pytest.approx(1 * 7 + 4 * 3)
    assert h.h3 == pytest.approx(1 * 12 + 4 * 2)


def test_hamiltonian_is_half_weighted_square():
    c = InertiaParameters.manakov([1, 2, 3, 4], [1, 4, 9, 16]).c
    l = np.arange(1.0, 7.0)
    w = np.array([c[i - 1, j - 1] for i, j in PAIRS])
    assert hamiltonian(l, c) == pytest.approx(0.5 * np.sum(w * l * l))


generators = st.sampled_from(PAIRS)


@given(states, generators, generators)
def test_bracket_antisymmetric(l, p, q):
    (i, j), (k, m) = p, q
    assert poisson_bracket(i, j, k, m, l) == pytest.approx(-poisson_bracket(k, m, i, j, l))


def _bracket_gradient(i, j, k, m):
    g = np.zeros(6)
    for r in range(6):
        e = np.zeros(6)
        e[r] = 1.0
        g[r] = poisson_bracket(i, j, k, m, e)
    return g


@settings(max_examples=30, deadline=None)
@given(states)
def test_bracket_jacobi(l):
    # {{x_a, x_b}, x_c} + cyclic = 0 for the linear coordinate functions
    grads = {(p, q): _bracket_gradient(*PAIRS[p], *PAIRS[q]) for p in range(6) for q in range(6)}

    def outer(p, q, r):
        # {f, x_r} with f = grad(p,q).l linear
        return sum(grads[(p, q)][s] * poisson_bracket(*PAIRS[s], *PAIRS[r], l) for s in range(6))

    for p in range(6):
        for q in range(6):
            for r in range(6):
                total = outer(p, q, r) + outer(q, r, p) + outer(r, p, q)
                assert abs(total) < 1e-9


@settings(max_examples=30, deadline=None)
@given(states)
def test_casimirs_commute_with_coordinates(l):
    a = np.array([1.0, 2.0, 3.0, 4.0])
    eps = 1e-6
    grads = []
    for k in (0, 1):
        g = np.zeros(6)
        for r in range(6):
            e = np.zeros(6)
            e[r] = eps
            g[r] = (integrals(l + e, a).as_array()[k] - integrals(l - e, a).as_array()[k]) / (2 * eps)
        grads.append(g)
    for g in grads:
        for (k, m) in PAIRS:
            val = sum(g[r] * poisson_bracket(*PAIRS[r], k, m, l) for r in range(6))
            assert abs(val) < 1e-6 * (1 + np.abs(l).max() ** 2)
