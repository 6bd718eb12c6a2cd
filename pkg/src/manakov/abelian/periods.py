"""Period matrix of ``y^2 = prod_{j=0}^{4} (z - d_j)``.

The five finite branch points are sorted lexicographically by (real, imag)
into a chain ``e_1, ..., e_5`` (``e_6`` is infinity).  With ``I_i`` the
integral of ``(1, x) dx / y`` along the segment ``[e_i, e_{i+1}]`` and
``gamma_i = 2 s_i I_i`` the loop around that segment, the cycles are

    a_1 = gamma_1,   a_2 = gamma_3,   b_1 = gamma_2 + gamma_4,   b_2 = gamma_4.

The orientation signs ``s_i`` (``s_1 = 1``) are fixed by requiring a
symmetric ``tau`` with positive definite imaginary part; exactly one choice
passes for a canonical basis.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from ..errors import BranchPointCollision, QuadratureFailure


def branch_chain(d, tol: float = 1e-9) -> np.ndarray:
    e = np.asarray(d, dtype=complex)
    size = max(1.0, np.abs(e).max())
    for i in range(len(e)):
        for j in range(i + 1, len(e)):
            if abs(e[i] - e[j]) < 1e-10 * size:
                raise BranchPointCollision(f"branch points {e[i]:.6g} and {e[j]:.6g} coincide")
    # quantise real parts so numerically collinear points sort along their line
    key_re = np.round(e.real / (tol * size))
    return e[np.lexsort((e.imag, key_re))]


def sqrt_ratio_product(x, x0, points) -> np.ndarray:
    """``prod sqrt((x - e)/(x0 - e))``, continuous along the segment from x0 to x."""
    out = np.ones(np.shape(x), dtype=complex)
    for e in points:
        out = out * np.sqrt((x - e) / (x0 - e))
    return out


def _chebyshev_segment(e1, e2, others, n):
    e1, e2 = complex(e1), complex(e2)
    others = [complex(e) for e in others]
    m = (e1 + e2) / 2
    h = (e2 - e1) / 2
    k = np.arange(1, n + 1)
    t = np.cos((2 * k - 1) * np.pi / (2 * n))
    x = m + h * t
    # y = i h sqrt(1 - t^2) W(t) on the segment, dx = h dt
    W = sqrt_ratio_product(x, m, others) * np.prod([np.sqrt(m - e) for e in others])
    w = -1j * np.pi / n
    return np.array([w * np.sum(1 / W), w * np.sum(x / W)])


def segment_integral(e1, e2, others, n: int | None = None, tol: float = 1e-14, n_max: int = 1 << 14):
    """Integrals of ``dx/y`` and ``x dx/y`` from e1 to e2 (adaptive Gauss-Chebyshev).

    With ``n`` given, a single rule of that size is used.
    """
    if n is not None:
        return _chebyshev_segment(e1, e2, others, n)
    n = 32
    prev = _chebyshev_segment(e1, e2, others, n)
    while n < n_max:
        n *= 2
        cur = _chebyshev_segment(e1, e2, others, n)
        if np.abs(cur - prev).max() <= tol * max(1.0, np.abs(cur).max()):
            return cur
        prev = cur
    raise QuadratureFailure(f"segment [{e1:.4g}, {e2:.4g}] did not converge with {n_max} nodes")


@dataclass(frozen=True)
class PeriodMatrix:
    tau: np.ndarray
    A: np.ndarray = field(repr=False)
    B: np.ndarray = field(repr=False)
    chain: np.ndarray = field(repr=False)
    segments: np.ndarray = field(repr=False)
    orientation: np.ndarray = field(repr=False)
    asymmetry: float = 0.0

    @property
    def A_inv(self) -> np.ndarray:
        return np.linalg.inv(self.A)

    @property
    def base_index(self) -> int:
        """Chain position of the branch point z = 0."""
        return int(np.argmin(np.abs(self.chain)))

    def half_periods(self) -> np.ndarray:
        """Normalised integral from the base point to each chain point, shape (5, 2)."""
        seg = self.A_inv @ self.segments
        k0 = self.base_index
        out = np.zeros((5, 2), complex)
        for m in range(5):
            lo, hi = sorted((k0, m))
            out[m] = seg[:, lo:hi].sum(axis=1)
        return out

    def lattice(self) -> np.ndarray:
        """Columns generate the period lattice of the normalised differentials."""
        return np.column_stack([np.eye(2), self.tau])


def _cycles(I, s):
    G = 2 * I * s
    A = np.column_stack([G[:, 0], G[:, 2]])
    B = np.column_stack([G[:, 1] + G[:, 3], G[:, 3]])
    return A, B


def period_matrix(d, n: int | None = None) -> PeriodMatrix:
    e = branch_chain(d)
    segs = []
    for i in range(4):
        others = [e[j] for j in range(5) if j not in (i, i + 1)]
        segs.append(segment_integral(e[i], e[i + 1], others, n))
    I = np.array(segs).T
    best = None
    for tail in itertools.product((1, -1), repeat=3):
        s = np.array((1,) + tail)
        A, B = _cycles(I, s)
        tau = np.linalg.solve(A, B)
        asym = abs(tau[0, 1] - tau[1, 0]) / max(1.0, np.abs(tau).max())
        im = (tau.imag + tau.imag.T) / 2
        if np.linalg.eigvalsh(im).min() <= 0:
            continue
        if best is None or asym < best[0]:
            best = (asym, s, A, B, tau)
    if best is None or best[0] > 1e-6:
        raise QuadratureFailure("no orientation of the chain cycles gives a Riemann matrix")
    asym, s, A, B, tau = best
    return PeriodMatrix(tau, A, B, e, I, s, float(asym))
