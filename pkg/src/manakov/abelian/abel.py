"""Abel map with base point at the branch point z = 0, and lattice bookkeeping."""
from __future__ import annotations

import numpy as np

from ..errors import PathNearBranchPoint
from ..wurzel import CurvePoint, Divisor
from .periods import PeriodMatrix, period_matrix, sqrt_ratio_product

_GL_X, _GL_W = np.polynomial.legendre.leggauss(40)


class AbelMap:
    """Precomputed data for repeated Abel map evaluation on one curve."""

    def __init__(self, d, pm: PeriodMatrix | None = None, panels: int = 8):
        self.d = np.asarray(d, dtype=complex)
        if pm is None:
            pm = period_matrix(self.d)
        self.pm = pm
        self.A_inv = pm.A_inv
        self.half = pm.half_periods()
        self.panels = panels
        self._lat = pm.lattice()
        self._lat_real = np.vstack([self._lat.real, self._lat.imag])
        e = pm.chain
        self.far_radius = 4.0 * max(1.0, np.abs(e).max())
        # anchor the image of infinity through a reference point on a ray
        # leaving the last chain point away from the other branch points
        ref = CurvePoint.on_curve(e[-1] + self.far_radius / 2, self.d)
        self.infinity = self._near(ref) + self._to_infinity(ref)

    def point(self, P: CurvePoint) -> np.ndarray:
        """Normalised integral from the base point to P."""
        if abs(P.z) > self.far_radius:
            return self.infinity - self._to_infinity(P)
        return self._near(P)

    def _to_infinity(self, P: CurvePoint) -> np.ndarray:
        """Normalised integral from P to infinity along the ray through P.

        With ``x = z/s^2`` the integrands become ``2 z^(k+1) s^(2-2k) / (y Q(s))``
        where ``Q(s) = prod sqrt((z - e s^2)/(z - e))``, regular on [0, 1].
        """
        z, y = complex(P.z), complex(P.y)
        sN = (_GL_X + 1) / 2
        wN = _GL_W / 2
        tot = np.zeros(2, complex)
        for p in range(self.panels):
            s = (p + sN) / self.panels
            Q = np.ones_like(s, dtype=complex)
            for e in self.pm.chain:
                Q = Q * np.sqrt((z - e * s * s) / (z - e))
            w = wN / self.panels * 2 / (y * Q)
            tot += np.array([np.sum(w * z * s * s), np.sum(w * z * z)])
        return self.A_inv @ tot

    def _near(self, P: CurvePoint) -> np.ndarray:
        """Integral from the base point via the branch point nearest to P.

        The path runs from the branch point nearest to ``P.z`` straight to P.
        With ``x = e + (z - e) s^2`` the integrand is regular at ``s = 0``;
        ``sqrt(z - e)`` is read off the stored ``y`` so the sheet is never
        recomputed from a bare square root.
        """
        e = self.pm.chain
        z, y = complex(P.z), complex(P.y)
        dist = np.abs(e - z)
        m = int(np.argmin(dist))
        em = e[m]
        if dist[m] == 0:
            return self.half[m].copy()
        others = [e[j] for j in range(5) if j != m]
        wz = np.prod([np.sqrt(z - q) for q in others])
        if wz == 0:
            raise PathNearBranchPoint("point coincides with a branch point")
        sq = y / wz  # a square root of z - e_m on the sheet of P
        sN = (_GL_X + 1) / 2
        wN = _GL_W / 2
        tot = np.zeros(2, complex)
        for p in range(self.panels):
            s = (p + sN) / self.panels
            x = em + (z - em) * s * s
            w = wz * sqrt_ratio_product(x, z, others)
            f = wN / self.panels * 2 * sq / w
            tot += np.array([np.sum(f), np.sum(f * x)])
        return self.half[m] + self.A_inv @ tot

    def __call__(self, D: Divisor) -> np.ndarray:
        return self.point(D.p1) + self.point(D.p2)

    def reduce(self, v) -> np.ndarray:
        """Representative of ``v`` modulo the lattice, near the origin."""
        v = np.asarray(v, dtype=complex)
        k = np.linalg.solve(self._lat_real, np.concatenate([v.real, v.imag]))
        return v - self._lat @ np.round(k)

    def lattice_coordinates(self, v) -> np.ndarray:
        v = np.asarray(v, dtype=complex)
        return np.linalg.solve(self._lat_real, np.concatenate([v.real, v.imag]))


def abel_map(D: Divisor, d, pm: PeriodMatrix | None = None) -> np.ndarray:
    return AbelMap(d, pm)(D)


def unwrap(images, amap: AbelMap) -> tuple[np.ndarray, np.ndarray]:
    """Continuous lift of a sequence of Abel images known up to sign and lattice.

    Each new image may belong to the divisor or to its hyperelliptic
    conjugate (``u -> -u``).  The candidate closest to the linear
    extrapolation of the previous two lifted points wins.  Returns the
    lifted series and the chosen signs.
    """
    out = [np.asarray(images[0], dtype=complex)]
    signs = [1]
    for k in range(1, len(images)):
        prev = out[-1]
        pred = prev if k == 1 else 2 * prev - out[-2]
        cands = [prev + amap.reduce(sg * images[k] - prev) for sg in (1, -1)]
        errs = [np.abs(c - pred).sum() for c in cands]
        i = int(np.argmin(errs))
        out.append(cands[i])
        signs.append(1 if i == 0 else -1)
    return np.array(out), np.array(signs)
