"""Linear flow on the Jacobian and the closed-form reconstruction of the state."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..core import integrals
from ..errors import RecoveryError, ThetaZeroDenominator
from ..spectral import NormalForm, SpectralData, h0_normal_form, spectral_data
from ..wurzel import J4, KL, Recovery, moduli_constants, recover_divisor
from .abel import AbelMap, unwrap
from .calibrate import CalibrationConstants, calibrate, random_divisors
from .periods import period_matrix
from .theta import ThetaContext


def linear_flow_fit(times, u) -> tuple[np.ndarray, np.ndarray, float]:
    """Least-squares line ``u(t) = u0 + v t``; returns ``(u0, v, max residual)``."""
    times = np.asarray(times, dtype=float)
    u = np.asarray(u, dtype=complex)
    if len(times) < 2:
        raise ValueError("need at least two samples")
    M = np.column_stack([np.ones_like(times), times])
    coef = np.linalg.lstsq(M, u, rcond=None)[0]
    return coef[0], coef[1], float(np.abs(M @ coef - u).max())


@dataclass(frozen=True)
class Gauge:
    """Data fixing ``g = C/(1 - eps f_0)`` together with the trajectory-specific constants.

    ``kappa`` maps each label to the multiplier turning the theta quotient
    into the function value seen along this trajectory.
    """

    eps: complex
    C: complex
    kappa: dict


def f_values(u, ctx: ThetaContext, kappa: dict, zero_tol: float = 1e-12) -> dict:
    den = ctx.theta(u, "")
    if abs(den) < zero_tol:
        raise ThetaZeroDenominator("theta vanishes at this argument")
    return {lab: kappa[lab] * ctx.theta(u, lab) / den for lab in kappa if lab != ""}


def reconstruct(u, ctx: ThetaContext, gauge: Gauge, sd: SpectralData) -> np.ndarray:
    """State (in storage order) at Jacobian point ``u``."""
    f = f_values(u, ctx, gauge.kappa)
    g = gauge.C / (1 - gauge.eps * f["0"])
    sc = moduli_constants(sd.d).sqrt_c
    xi = g * sc * np.array([f[KL[j]] for j in (1, 2, 3)])
    eta = g * sc * np.array([f[J4[j]] for j in (1, 2, 3)])
    return sd.to_state(xi, eta)


@dataclass
class Uniformization:
    times: np.ndarray
    sd: SpectralData
    normal_form: NormalForm
    amap: AbelMap = field(repr=False)
    ctx: ThetaContext = field(repr=False)
    calibration: CalibrationConstants = field(repr=False)
    recoveries: list = field(repr=False)
    u: np.ndarray = field(repr=False)
    u0: np.ndarray = None
    v: np.ndarray = None
    fit_residual: float = np.inf
    gauge: Gauge = None

    def kappa_mismatch(self) -> float:
        """Largest relative gap between the gauge constants and the calibrated ones, up to sign."""
        worst = 0.0
        for lab, k in self.gauge.kappa.items():
            kc = self.calibration.kappa[lab]
            worst = max(worst, min(abs(k - kc), abs(k + kc)) / abs(kc))
        return worst

    @property
    def z(self) -> np.ndarray:
        return np.array([r.divisor.z for r in self.recoveries])

    def state(self, t) -> np.ndarray:
        return reconstruct(self.u0 + self.v * t, self.ctx, self.gauge, self.sd)


def uniformize(times, states, a, calibration_samples: int = 12, seed: int = 0) -> Uniformization:
    """Run the full chain on sampled states of one trajectory.

    Spectral data and moduli come from the first state.  Every sample is
    mapped to (xi, eta), then to a divisor and its Abel image; the images
    are unwrapped and fitted by a line.  Theta quotients are calibrated on
    random divisors and the trajectory's own gauge is read at the first
    sample.
    """
    times = np.asarray(times, dtype=float)
    states = np.asarray(states, dtype=float)
    h = integrals(states[0], a)
    sd = spectral_data(h, a)
    nf = h0_normal_form(sd)
    d = sd.d
    pm = period_matrix(d)
    amap = AbelMap(d, pm)
    ctx = ThetaContext(pm.tau)
    rng = np.random.default_rng(seed)
    cal = calibrate(ctx, amap, random_divisors(d, calibration_samples, rng))
    ctx = ctx.with_table(cal.table)

    recs: list[Recovery] = []
    images = []
    for i, l in enumerate(states):
        xi, eta = sd.xi_eta(l)
        try:
            rec = recover_divisor(xi, eta, d)
        except RecoveryError as exc:
            raise RecoveryError(f"divisor recovery failed at t={times[i]:g}: {exc}") from exc
        recs.append(rec)
        images.append(amap(rec.divisor))
    u, _ = unwrap(images, amap)
    u0, v, res = linear_flow_fit(times, u)

    # the gauge: function values seen along this trajectory at the first sample
    xi, eta = sd.xi_eta(states[0])
    r0 = recs[0]
    sc = moduli_constants(d).sqrt_c
    T = {"0": r0.p0}
    for j in (1, 2, 3):
        T[KL[j]] = xi[j - 1] / (sc[j - 1] * r0.g)
        T[J4[j]] = eta[j - 1] / (sc[j - 1] * r0.g)
    den = ctx.theta(u[0], "")
    kappa = {lab: T[lab] * den / ctx.theta(u[0], lab) for lab in T}
    eps = nf.eps
    C = r0.g * (1 - eps * r0.p0)
    out = Uniformization(times, sd, nf, amap, ctx, cal, recs, u, u0, v, res, Gauge(eps, C, kappa))
    return out
