"""Matching Wurzel function values with theta quotients.

For each label the quotient ``P(D) / (theta_a(u)/theta_s(u))`` with
``u = abel(D)`` must be the same constant for every divisor, up to the sign
ambiguity inherent in the square roots defining ``P``.  The constant and the
per-sample signs are recorded.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import CalibrationSpreadTooLarge
from ..wurzel import CurvePoint, Divisor, wurzel_values
from .abel import AbelMap
from .theta import CHARACTERISTICS, CLASSICAL_TABLE, ThetaContext, theta

LABELS = ("23", "31", "12", "14", "24", "34", "0", "")


@dataclass(frozen=True)
class CalibrationConstants:
    kappa: dict
    spread: dict
    signs: dict = field(repr=False)
    table: dict = field(default_factory=dict)
    searched: bool = False
    base_point: complex = 0j

    @property
    def max_spread(self) -> float:
        return max(self.spread.values())


def sign_aligned(ratios) -> tuple[complex, float, np.ndarray]:
    """Constant, relative spread and signs for values equal to ``+-kappa``."""
    r = np.asarray(ratios, dtype=complex)
    ref = r[np.argmax(np.abs(r))]
    signs = np.where((r / ref).real >= 0, 1, -1)
    al = signs * r
    kappa = np.median(al.real) + 1j * np.median(al.imag)
    spread = np.abs(al - kappa).max() / max(abs(kappa), 1e-300)
    return kappa, float(spread), signs


@dataclass(frozen=True)
class _Sample:
    P: dict
    th: dict


def _samples(divisors, amap: AbelMap, tau, N):
    out = []
    for D in divisors:
        u = amap(D)
        P = wurzel_values(D, amap.d)
        P[""] = 1.0
        th = {ch: theta(u, tau, ch, N) for ch in CHARACTERISTICS}
        out.append(_Sample(P, th))
    return out


def _fit(samples, label, num, den):
    ratios = [s.P[label] * s.th[den] / s.th[num] for s in samples]
    return sign_aligned(ratios)


def calibrate(ctx: ThetaContext, amap: AbelMap, divisors, tol: float = 1e-6,
              labels=LABELS, search: bool = True) -> CalibrationConstants:
    """Calibrate the table in ``ctx``; fall back to an exhaustive search.

    The search runs over the 16 denominator characteristics and, per label,
    over the 16 numerator characteristics, keeping the assignment whose
    worst spread is smallest.
    """
    if len(divisors) < 10:
        raise ValueError("calibration needs at least 10 divisors")
    samples = _samples(divisors, amap, ctx.tau, ctx.N)

    def attempt(table):
        kap, spr, sg = {}, {}, {}
        for lab in labels:
            kap[lab], spr[lab], sg[lab] = _fit(samples, lab, table[lab], table[""])
        return kap, spr, sg

    kap, spr, sg = attempt(ctx.table)
    if max(spr.values()) <= tol or not search:
        if max(spr.values()) > tol:
            raise CalibrationSpreadTooLarge(f"spread {max(spr.values()):.3g} with the given table")
        return CalibrationConstants(kap, spr, sg, dict(ctx.table), False)

    best = None
    for den in CHARACTERISTICS:
        table = {"": den}
        worst = 0.0
        for lab in labels:
            if lab == "":
                continue
            fits = [(_fit(samples, lab, ch, den)[1], ch) for ch in CHARACTERISTICS if ch != den]
            s, ch = min(fits)
            table[lab] = ch
            worst = max(worst, s)
            if best is not None and worst >= best[0]:
                break
        else:
            if best is None or worst < best[0]:
                best = (worst, table)
    worst, table = best
    if worst > tol:
        raise CalibrationSpreadTooLarge(f"best characteristic assignment has spread {worst:.3g}")
    kap, spr, sg = attempt(table)
    return CalibrationConstants(kap, spr, sg, table, True)


def random_divisors(d, count: int, rng, radius: float | None = None) -> list[Divisor]:
    """Divisors with complex-normal z (scaled to the moduli) and random sheets."""
    d = np.asarray(d, dtype=complex)
    if radius is None:
        radius = max(1.0, np.abs(d).max())
    out = []
    while len(out) < count:
        z = radius * (rng.normal(size=2) + 1j * rng.normal(size=2)) / 2
        if abs(z[0] - z[1]) < 1e-3 * radius:
            continue
        sheets = rng.choice([1, -1], size=2)
        out.append(Divisor(CurvePoint.on_curve(z[0], d, sheets[0]), CurvePoint.on_curve(z[1], d, sheets[1])))
    return out


__all__ = ["CalibrationConstants", "calibrate", "random_divisors", "sign_aligned", "LABELS", "CLASSICAL_TABLE"]
