"""Square-root functions on the genus-2 curve ``y^2 = R(z) = prod_{j=0}^{4} (z - d_j)``.

Moduli are passed as the full 5-vector ``d = (0, d_1, d_2, d_3, d_4)`` with
``d_4 = d_1 d_2 d_3`` (see :func:`manakov.spectral.full_moduli`).  Labels
``"kl"`` and ``"j4"`` index the pair functions; ``"0"``..``"4"`` the single ones.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import CYCLIC
from .errors import DiagonalDivisor, NoConvergence

PAIR_LABELS = ("23", "31", "12", "14", "24", "34")
PAIR_INDICES = {"23": (2, 3), "31": (3, 1), "12": (1, 2), "14": (1, 4), "24": (2, 4), "34": (3, 4)}
KL = {1: "23", 2: "31", 3: "12"}
J4 = {1: "14", 2: "24", 3: "34"}


def curve_poly(z, d):
    return np.prod([z - dj for dj in d], axis=0)


def curve_coefficients(d) -> np.ndarray:
    """Coefficients of R, lowest degree first."""
    return np.poly(np.asarray(d, dtype=complex))[::-1]


@dataclass(frozen=True)
class CurvePoint:
    z: complex
    y: complex

    def flip(self) -> "CurvePoint":
        return CurvePoint(self.z, -self.y)

    def defect(self, d) -> float:
        R = curve_poly(self.z, d)
        return abs(self.y ** 2 - R) / max(1.0, abs(R))

    @classmethod
    def on_curve(cls, z, d, sheet: int = 1) -> "CurvePoint":
        return cls(complex(z), sheet * np.sqrt(complex(curve_poly(z, d))))


@dataclass(frozen=True)
class Divisor:
    p1: CurvePoint
    p2: CurvePoint

    @property
    def z(self) -> np.ndarray:
        return np.array([self.p1.z, self.p2.z])

    @property
    def y(self) -> np.ndarray:
        return np.array([self.p1.y, self.p2.y])

    def iota(self) -> "Divisor":
        """Hyperelliptic involution applied to both points."""
        return Divisor(self.p1.flip(), self.p2.flip())

    def swap(self) -> "Divisor":
        return Divisor(self.p2, self.p1)


@dataclass(frozen=True)
class ModuliConstants:
    c: np.ndarray
    c_tilde: np.ndarray

    @property
    def sqrt_c(self) -> np.ndarray:
        return np.sqrt(self.c.astype(complex))


def moduli_constants(d) -> ModuliConstants:
    ct = np.array([1 / ((d[j] - d[k]) * (d[j] - d[q])) for j, (k, q) in CYCLIC.items()])
    return ModuliConstants((np.asarray(d[1:4]) - d[4]) * ct, ct)


def p_single(j: int, D: Divisor, d) -> complex:
    return np.sqrt(D.p1.z - d[j]) * np.sqrt(D.p2.z - d[j])


def p_pair(j: int, k: int, D: Divisor, d, diag_tol: float = 1e-8) -> complex:
    z1, z2 = D.p1.z, D.p2.z
    if abs(z1 - z2) < diag_tol * max(1.0, abs(z1)):
        raise DiagonalDivisor("divisor points share the same z")
    t1 = D.p1.y / ((z1 - d[j]) * (z1 - d[k]))
    t2 = D.p2.y / ((z2 - d[j]) * (z2 - d[k]))
    return p_single(j, D, d) * p_single(k, D, d) / (z1 - z2) * (t1 - t2)


def wurzel_values(D: Divisor, d) -> dict[str, complex]:
    out = {str(j): p_single(j, D, d) for j in range(5)}
    for lab, (j, k) in PAIR_INDICES.items():
        out[lab] = p_pair(j, k, D, d)
    return out


def resolvent_factor(d) -> complex:
    """Constant multiplying the right side of the partial-fraction identity.

    ``kappa(d) = -d_4 (d_1 d_2 - 1)(d_1 d_3 - 1)(d_2 d_3 - 1)``.
    """
    return -d[4] * (d[1] * d[2] - 1) * (d[1] * d[3] - 1) * (d[2] * d[3] - 1)


def _rel(terms, rhs=0.0):
    terms = np.asarray(terms)
    size = max(np.abs(terms).max(), abs(rhs), 1e-300)
    return abs(terms.sum() - rhs) / size


def identity_residuals(P: dict, d, s: complex) -> dict:
    """Residuals of the Wurzel identities for a table of function values.

    ``P`` maps the labels ``"0"`` and the six pair labels to values, which
    may come from a divisor or from theta quotients.  Residuals are relative
    to the largest term.  ``cross_ct_sign`` records which sign makes
    ``sum c~_j P_j4 P_kl = -sign P_0`` hold.
    """
    mc = moduli_constants(d)
    kl = np.array([P[KL[j]] for j in (1, 2, 3)])
    j4 = np.array([P[J4[j]] for j in (1, 2, 3)])
    dj = np.asarray(d[1:4])
    c, ct = mc.c, mc.c_tilde
    res_terms = []
    for j, (k, q) in CYCLIC.items():
        res_terms.append(c[j - 1] * kl[j - 1] ** 2 / ((s - d[k]) * (s - d[q])))
        res_terms.append(c[j - 1] * j4[j - 1] ** 2 / ((s - d[j]) * (s - d[4])))
    rhs = resolvent_factor(d) * s / np.prod([s - d[m] for m in range(1, 5)])
    cross = ct * j4 * kl
    p0 = P["0"]
    sign = 1 if abs(cross.sum() + p0) <= abs(cross.sum() - p0) else -1
    return {
        "resolvent": _rel(res_terms, rhs),
        "trace_d4": _rel(ct * j4 ** 2, d[4]),
        "trace_p0": _rel(dj * ct * kl ** 2, p0 ** 2),
        "cross_c": _rel(c * j4 * kl),
        "cross_ct": _rel(cross, -sign * p0),
        "cross_ct_sign": sign,
        "weighted": _rel(np.concatenate([c * j4 ** 2 / dj, c * dj * kl ** 2])),
    }


def identity_suite(D: Divisor, d, s: complex) -> dict:
    """:func:`identity_residuals` for the Wurzel functions of ``D``."""
    return identity_residuals(wurzel_values(D, d), d, s)


def kleinian_form(z1, z2, d):
    """Symmetric polynomial F with ``F(z, z) = 2 R(z)`` and ``F(z1, z2) - 2 y1 y2`` divisible by ``(z1-z2)^2``."""
    lam = curve_coefficients(d)
    return sum(z1 ** r * z2 ** r * (2 * lam[2 * r] + lam[2 * r + 1] * (z1 + z2)) for r in range(3))


def _pair_affine(d):
    """Rows ``(1, d_j d_k, -(d_j+d_k))`` and offsets so that
    ``P_jk^2 = W + d_j d_k s1 - (d_j + d_k) s2 + offset`` where
    ``s1 = z1 + z2``, ``s2 = z1 z2`` and ``W = (F(z1,z2) - 2 y1 y2)/(z1-z2)^2``."""
    rows = []
    offs = []
    for lab in PAIR_LABELS:
        j, k = PAIR_INDICES[lab]
        rest = [d[m] for m in range(5) if m not in (j, k)]
        rows.append([1.0, d[j] * d[k], -(d[j] + d[k])])
        offs.append(d[j] * d[k] * (-sum(rest)) - np.prod(rest))
    return np.array(rows, dtype=complex), np.array(offs, dtype=complex)


def forward(D: Divisor, g: complex, d, signs=None) -> tuple[np.ndarray, np.ndarray]:
    """``xi_j = sqrt(c_j) g P_kl`` and ``eta_j = sqrt(c_j) g P_j4``.

    ``signs`` (shape (2, 3)) multiplies the xi and eta components; it absorbs
    the branch choices of the principal square roots.
    """
    sc = moduli_constants(d).sqrt_c
    P = wurzel_values(D, d)
    sg = np.ones((2, 3)) if signs is None else np.asarray(signs)
    xi = sg[0] * sc * g * np.array([P[KL[j]] for j in (1, 2, 3)])
    eta = sg[1] * sc * g * np.array([P[J4[j]] for j in (1, 2, 3)])
    return xi, eta


@dataclass(frozen=True)
class Recovery:
    """Result of inverting the Wurzel parametrisation.

    ``divisor`` and ``g`` form one solution; the other is
    ``(divisor.iota(), -g)`` with the same ``signs``.
    """

    divisor: Divisor
    g: complex
    signs: np.ndarray
    p0: complex
    residual: float

    @property
    def alternative(self) -> tuple[Divisor, complex]:
        return self.divisor.iota(), -self.g


def _targets(xi, eta, d, g2):
    mc = moduli_constants(d)
    V = {}
    for j in (1, 2, 3):
        V[KL[j]] = xi[j - 1] ** 2 / (mc.c[j - 1] * g2)
        V[J4[j]] = eta[j - 1] ** 2 / (mc.c[j - 1] * g2)
    return np.array([V[lab] for lab in PAIR_LABELS])


def _pair_squares(z1, z2, y1, y2, d):
    out = []
    for lab in PAIR_LABELS:
        j, k = PAIR_INDICES[lab]
        A1 = (z1 - d[j]) * (z1 - d[k])
        A2 = (z2 - d[j]) * (z2 - d[k])
        out.append((y1 * A2 - y2 * A1) ** 2 / (A1 * A2 * (z1 - z2) ** 2))
    return np.array(out)


def _system(v, d, V, vs):
    z1, z2, y1, y2 = v
    R1 = curve_poly(z1, d)
    R2 = curve_poly(z2, d)
    return np.concatenate([
        [(y1 * y1 - R1) / max(1.0, abs(R1)), (y2 * y2 - R2) / max(1.0, abs(R2))],
        (_pair_squares(z1, z2, y1, y2, d) - V) / vs,
    ])


def _polish(v, d, V, iters=4):
    vs = max(1.0, np.abs(V).max())
    f = _system(v, d, V, vs)
    for _ in range(iters):
        J = np.zeros((8, 4), complex)
        for i in range(4):
            h = 1e-7 * max(1.0, abs(v[i]))
            e = np.zeros(4, complex)
            e[i] = h
            J[:, i] = (_system(v + e, d, V, vs) - _system(v - e, d, V, vs)) / (2 * h)
        step = np.linalg.lstsq(J, -f, rcond=None)[0]
        nv = v + step
        nf = _system(nv, d, V, vs)
        if np.abs(nf).max() >= np.abs(f).max():
            break
        v, f = nv, nf
    return v, float(np.abs(f).max())


def recover_divisor(xi, eta, d, tol: float = 1e-6, polish: bool = True) -> Recovery:
    """Closed-form inverse of :func:`forward`.

    g^2 follows from the ``trace_d4`` identity.  The six squared pair
    functions are affine in ``(W, z1 + z2, z1 z2)``; a least-squares solve
    gives the symmetric functions of the divisor, then ``y1 y2`` from W.
    """
    xi = np.asarray(xi, dtype=complex)
    eta = np.asarray(eta, dtype=complex)
    mc = moduli_constants(d)
    g2 = np.sum(mc.c_tilde * eta ** 2 / mc.c) / d[4]
    if g2 == 0 or not np.isfinite(g2):
        raise NoConvergence("g^2 vanishes; no divisor fits")
    V = _targets(xi, eta, d, g2)
    M, off = _pair_affine(d)
    W, s1, s2 = np.linalg.lstsq(M, V - off, rcond=None)[0]
    disc = np.sqrt(s1 * s1 - 4 * s2)
    z1, z2 = (s1 + disc) / 2, (s1 - disc) / 2
    Y = (kleinian_form(z1, z2, d) - W * (z1 - z2) ** 2) / 2
    R1, R2 = curve_poly(z1, d), curve_poly(z2, d)
    # take the square root on the better conditioned point
    if abs(R1) >= abs(R2):
        y1 = np.sqrt(R1)
        y2 = Y / y1
    else:
        y2 = np.sqrt(R2)
        y1 = Y / y2
    v = np.array([z1, z2, y1, y2])
    if polish:
        v, res = _polish(v, d, V)
    else:
        res = float(np.abs(_system(v, d, V, max(1.0, np.abs(V).max()))).max())
    D = Divisor(CurvePoint(v[0], v[2]), CurvePoint(v[1], v[3]))
    g = np.sqrt(g2)
    P = wurzel_values(D, d)
    kl = np.array([P[KL[j]] for j in (1, 2, 3)])
    j4 = np.array([P[J4[j]] for j in (1, 2, 3)])
    fx = mc.sqrt_c * g * kl
    fe = mc.sqrt_c * g * j4
    # principal branches fix each function only up to sign, separately for xi and eta
    signs = np.array([
        np.where((xi * np.conj(fx)).real >= 0, 1, -1),
        np.where((eta * np.conj(fe)).real >= 0, 1, -1),
    ])
    size = max(np.abs(xi).max(), np.abs(eta).max())
    mismatch = max(np.abs(xi - signs[0] * fx).max(), np.abs(eta - signs[1] * fe).max()) / size
    if not np.isfinite(res) or res > tol or mismatch > max(tol, 1e-4):
        raise NoConvergence(f"divisor recovery residual {max(res, mismatch):.3g}")
    p0 = -np.sum(mc.c_tilde * xi * eta / mc.c) / g2
    return Recovery(D, g, signs, p0, max(res, float(mismatch)))
