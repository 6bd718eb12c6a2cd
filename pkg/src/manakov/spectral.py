"""Spectral data of an integral level: quartic roots, isotropic vectors,
the (xi, eta) linear change of variables and the moduli of the curve.

Conventions used below (see README for the full list):

* ``x[j, p] = r_j(s_p)/sqrt(F'(s_p))`` and ``y[j, p] = q_j(s_p)/sqrt(F'(s_p))``
  with ``r_j`` the principal root of ``(s - a_j)(s - a_4)`` and
  ``q_j = sqrt(G)/r_j``.  At a root of F the branch of ``sqrt(G)`` is the
  one annihilating the generating function.
* ``l^(p)_j = x[j, p] m_j + y[j, p] n_j``.
* ``Delta[j, p]`` is the 2x2 minor ``x[j,q] y[j,r] - x[j,r] y[j,q]`` over the
  roots 1..3 with ``(p, q, r)`` cyclic.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .core import CYCLIC, IntegralLevels, from_m_n, integrals, m_n
from .errors import (
    BranchSelectionFailed,
    DegenerateLevel,
    FitResidualTooLarge,
    InconsistentModulus,
    RepeatedRoot,
    VanishingDelta,
)


def quartic_coefficients(h: IntegralLevels, a) -> np.ndarray:
    """Monic coefficients (highest degree first) of F(s)."""
    P = np.array([h.h1, -h.h2, h.h3], dtype=float)
    G = np.poly(np.asarray(a, dtype=float))
    den = h.h1 ** 2 - 4 * h.h0 ** 2
    if abs(den) <= 1e-14 * h.scale ** 2:
        raise DegenerateLevel("h1^2 = 4 h0^2: the quartic is undefined")
    return (np.polymul(P, P) - 4 * h.h0 ** 2 * G) / den


def order_roots(roots) -> np.ndarray:
    """Deterministic labelling s_1..s_4.

    Lexicographic sort on (real, imag).  With two conjugate pairs the result
    is ``(s, conj s, t, conj t)`` with ``Im s, Im t > 0`` taken in sorted order.
    """
    r = np.asarray(roots, dtype=complex)
    r = r[np.lexsort((r.imag, r.real))]
    tol = 1e-9 * max(1.0, np.abs(r).max())
    upper = [z for z in r if z.imag > tol]
    lower = [z for z in r if z.imag < -tol]
    if len(upper) == 2 and len(lower) == 2:
        return np.array([upper[0], np.conj(upper[0]), upper[1], np.conj(upper[1])])
    return r


def _polish(coef, z, iters=6):
    dcoef = np.polyder(coef)
    for _ in range(iters):
        fz = np.polyval(coef, z)
        dz = np.polyval(dcoef, z)
        if dz == 0:
            break
        step = fz / dz
        z = z - step
        if abs(step) <= 1e-17 * max(1.0, abs(z)):
            break
    return z


def quartic_roots(h: IntegralLevels, a, separation: float = 1e-7) -> np.ndarray:
    """Roots of F, via companion-matrix eigenvalues then Newton polish."""
    coef = quartic_coefficients(h, a)
    raw = np.roots(coef).astype(complex)
    roots = np.array([_polish(coef, z) for z in raw])
    size = max(1.0, np.abs(roots).max())
    for i in range(4):
        for j in range(i + 1, 4):
            if abs(roots[i] - roots[j]) < separation * size:
                raise RepeatedRoot(f"roots {roots[i]:.6g} and {roots[j]:.6g} coincide")
    return order_roots(roots)


def _lambda_poly(s, h: IntegralLevels):
    return h.h1 * s * s - h.h2 * s + h.h3


def root_tables(roots, a, h: IntegralLevels, tol: float = 1e-8):
    """Branch-fixed tables ``x, y`` (3 x 4) and ``sqrt(G)`` at each root."""
    a = np.asarray(a, dtype=float)
    coef = quartic_coefficients(h, a)
    dcoef = np.polyder(coef)
    x = np.zeros((3, 4), complex)
    y = np.zeros((3, 4), complex)
    sg = np.zeros(4, complex)
    for p, s in enumerate(roots):
        root_g = -_lambda_poly(s, h) / (2 * h.h0)
        G = np.prod(s - a)
        if abs(root_g ** 2 - G) > tol * max(1.0, abs(G), abs(root_g) ** 2):
            raise BranchSelectionFailed(f"no branch of sqrt(G) annihilates f at s={s:.6g}")
        sf = np.sqrt(complex(np.polyval(dcoef, s)))
        r = np.sqrt((s - a[:3]) * (s - a[3]))
        x[:, p] = r / sf
        y[:, p] = root_g / r / sf
        sg[p] = root_g
    return x, y, sg


def isotropic_vectors(l, a, roots, h: IntegralLevels | None = None) -> np.ndarray:
    """Rows are ``l^(p)`` for p = 1..4; rows 0 and 1 are the pair used downstream."""
    if h is None:
        h = integrals(l, a)
    x, y, _ = root_tables(roots, a, h)
    m, n = m_n(np.asarray(l))
    return (x * m[:, None] + y * n[:, None]).T


def xi_eta(l1, l2) -> tuple[np.ndarray, np.ndarray]:
    return l1 + 1j * l2, l1 - 1j * l2


def delta_table(x, y) -> np.ndarray:
    """``Delta[j, p]`` for j, p in 0..2 (minors over the first three roots)."""
    D = np.zeros((3, 3), complex)
    for p in range(3):
        q, r = (p + 1) % 3, (p + 2) % 3
        D[:, p] = x[:, q] * y[:, r] - x[:, r] * y[:, q]
    return D


def koetter_coefficients(x, y, tol: float = 1e-12):
    """Coefficients with ``m = alpha xi + beta eta`` and ``n = gamma xi + delta eta``.

    Returns ``(alpha, beta, gamma, delta, Delta)``.  Only the root pair
    (s_1, s_2) enters the coefficients; ``Delta[:, 2]`` is their minor.
    """
    D = delta_table(x, y)
    d3 = D[:, 2]
    if np.any(np.abs(d3) < tol * np.abs(D).max()):
        raise VanishingDelta("a minor over the selected root pair vanishes")
    x1, x2 = x[:, 0], x[:, 1]
    y1, y2 = y[:, 0], y[:, 1]
    alpha = (y2 + 1j * y1) / (2 * d3)
    beta = (y2 - 1j * y1) / (2 * d3)
    gamma = -(x2 + 1j * x1) / (2 * d3)
    delta = -(x2 - 1j * x1) / (2 * d3)
    return alpha, beta, gamma, delta, D


def moduli(D, tol: float = 1e-6) -> np.ndarray:
    """``d_1, d_2, d_3`` from the minor table, checking the reciprocal formula."""
    root = (D[:, 0] - 1j * D[:, 1]) / D[:, 2]
    inv = -(D[:, 0] + 1j * D[:, 1]) / D[:, 2]
    bad = np.abs(root * inv - 1)
    if np.any(bad > tol):
        raise InconsistentModulus(f"sqrt(d) * (1/sqrt(d)) deviates from 1 by {bad.max():.3g}")
    return root ** 2


def full_moduli(d3) -> np.ndarray:
    """``(d_0, ..., d_4)`` with ``d_0 = 0`` and ``d_4 = d_1 d_2 d_3``."""
    d3 = np.asarray(d3, dtype=complex)
    return np.concatenate([[0.0], d3, [np.prod(d3)]])


def quadrics(xi, eta, d3) -> np.ndarray:
    """The three quadrics the (xi, eta) coordinates satisfy."""
    d3 = np.asarray(d3)
    return np.array([
        np.sum(xi * xi + eta * eta),
        np.sum(xi * eta),
        np.sum(d3 * xi * xi + eta * eta / d3),
    ])


@dataclass(frozen=True)
class SpectralData:
    a: np.ndarray
    levels: IntegralLevels
    roots: np.ndarray
    sqrt_g: np.ndarray = field(repr=False)
    x: np.ndarray = field(repr=False)
    y: np.ndarray = field(repr=False)
    delta: np.ndarray = field(repr=False)
    alpha: np.ndarray = field(repr=False)
    beta: np.ndarray = field(repr=False)
    gamma: np.ndarray = field(repr=False)
    delta_c: np.ndarray = field(repr=False)
    d3: np.ndarray

    @property
    def d(self) -> np.ndarray:
        return full_moduli(self.d3)

    def isotropic(self, l) -> np.ndarray:
        m, n = m_n(np.asarray(l))
        return (self.x * m[:, None] + self.y * n[:, None]).T

    def xi_eta(self, l) -> tuple[np.ndarray, np.ndarray]:
        lp = self.isotropic(l)
        return xi_eta(lp[0], lp[1])

    def to_state(self, xi, eta) -> np.ndarray:
        m = self.alpha * xi + self.beta * eta
        n = self.gamma * xi + self.delta_c * eta
        return from_m_n(m, n)

    def quadrics(self, xi, eta) -> np.ndarray:
        return quadrics(xi, eta, self.d3)


def spectral_data(h: IntegralLevels, a, separation: float = 1e-7) -> SpectralData:
    a = np.asarray(a, dtype=float)
    if h.h0 == 0:
        raise RepeatedRoot("h0 = 0 makes F a perfect square")
    roots = quartic_roots(h, a, separation)
    x, y, sg = root_tables(roots, a, h)
    alpha, beta, gamma, delta, D = koetter_coefficients(x, y)
    return SpectralData(a, h, roots, sg, x, y, D, alpha, beta, gamma, delta, moduli(D))


def epsilon(roots, d4) -> complex:
    """The displayed closed form for epsilon, principal branches throughout."""
    s1, s2, s3, s4 = np.asarray(roots, dtype=complex)
    num = np.sqrt((s3 - s1) * (s2 - s4)) - np.sqrt((s2 - s3) * (s1 - s4))
    return np.sqrt(complex(d4)) * num / np.sqrt((s1 - s2) * (s3 - s4))


def _pair_constant(d, j, k):
    rest = [d[m] for m in range(5) if m not in (j, k)]
    return d[j] * d[k] * (-sum(rest)) - np.prod(rest)


@dataclass(frozen=True)
class NormalForm:
    """H0 written in (xi, eta) coordinates.

    ``X, Y, Z`` are the raw coefficients of ``xi^2, eta^2, xi eta``;
    ``A, B`` the reduced ones, ``H0 = sum A (xi^2 - eta^2) + B xi eta`` on
    the quadrics.  ``fit`` holds the scalars of the model
    ``A = fit[0] + fit[1] d + fit[2]/d`` and ``B = fit[3] (d + 1/d)``.
    ``K0, K1, K2`` are the coefficients of ``H0/g^2 = K0 + K1 P0 + K2 P0^2``
    after substituting the Wurzel parametrisation, and ``eps = -K1/(2 K0)``.
    """

    X: np.ndarray
    Y: np.ndarray
    Z: np.ndarray
    A: np.ndarray
    B: np.ndarray
    lam: np.ndarray
    fit: np.ndarray
    residual: float
    K0: complex
    K1: complex
    K2: complex

    @property
    def eps(self) -> complex:
        return -self.K1 / (2 * self.K0)

    @property
    def square_defect(self) -> float:
        """Relative size of ``K1^2 - 4 K0 K2``; zero when the form is a perfect square."""
        return abs(self.K1 ** 2 - 4 * self.K0 * self.K2) / max(abs(self.K1) ** 2, 1e-300)

    def raw(self, xi, eta) -> complex:
        return np.sum(self.X * xi * xi + self.Y * eta * eta + self.Z * xi * eta)

    def reduced(self, xi, eta) -> complex:
        return np.sum(self.A * (xi * xi - eta * eta) + self.B * xi * eta)


def h0_normal_form(sd: SpectralData, tol: float = 1e-8) -> NormalForm:
    dj = sd.d3
    d = sd.d
    X = sd.alpha * sd.gamma
    Y = sd.beta * sd.delta_c
    Z = sd.alpha * sd.delta_c + sd.beta * sd.gamma
    scale = max(np.abs(X).max(), np.abs(Y).max(), np.abs(Z).max())
    # add lam1*Q1 + lam3*Q3 so the xi^2 and eta^2 coefficients become opposite
    M1 = np.column_stack([2 * np.ones(3), dj + 1 / dj])
    lam13 = np.linalg.lstsq(M1, -(X + Y), rcond=None)[0]
    r1 = np.abs(M1 @ lam13 + X + Y).max()
    A = X + lam13[0] + lam13[1] * dj
    # subtract lam2*Q2 so B follows the delta (d + 1/d) model
    M2 = np.column_stack([np.ones(3), dj + 1 / dj])
    lam2, dlt = np.linalg.lstsq(M2, Z, rcond=None)[0]
    r2 = np.abs(M2 @ np.array([lam2, dlt]) - Z).max()
    B = Z - lam2
    abc = np.linalg.solve(np.column_stack([np.ones(3), dj, 1 / dj]), A)
    residual = max(r1, r2) / scale
    if residual > tol:
        raise FitResidualTooLarge(f"normal form model residual {residual:.3g}")

    # coefficients after xi = sqrt(c) g P_kl, eta = sqrt(c) g P_j4
    ct = np.array([1 / ((d[j] - d[k]) * (d[j] - d[q])) for j, (k, q) in CYCLIC.items()])
    cc = (dj - d[4]) * ct
    K0 = K2 = 0.0
    for j, (k, q) in CYCLIC.items():
        w = cc[j - 1] * A[j - 1]
        K0 = K0 + w * (_pair_constant(d, k, q) - _pair_constant(d, j, 4))
        K2 = K2 + w * ((d[j] + d[4]) - (d[k] + d[q]))
    # B enters through sum c_j (Z_j) P_kl P_j4 with Z = mu + nu/(d - d4)
    M3 = np.column_stack([np.ones(3), 1 / (dj - d[4])])
    nu = np.linalg.lstsq(M3, Z, rcond=None)[0][1]
    K1 = -nu
    return NormalForm(X, Y, Z, A, B, np.array([lam13[0], lam2, lam13[1]]),
                      np.array([abc[0], abc[1], abc[2], dlt]), float(residual), K0, K1, K2)
