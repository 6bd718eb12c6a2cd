import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from manakov.abelian import (
    CHARACTERISTICS,
    CLASSICAL_TABLE,
    LABELS,
    ThetaContext,
    branch_chain,
    calibrate,
    f_values,
    linear_flow_fit,
    parity,
    period_matrix,
    random_divisors,
    segment_integral,
    sign_aligned,
    theta,
    truncation_radius,
    unwrap,
)
from manakov.core import integrals
from manakov.errors import BranchPointCollision, CalibrationSpreadTooLarge, ThetaZeroDenominator
from manakov.wurzel import CurvePoint, curve_poly, identity_residuals

TAU = np.array([[1.1j + 0.3, 0.2 + 0.4j], [0.2 + 0.4j, 0.9j - 0.1]])
small = st.floats(-1, 1, allow_nan=False)
vectors = st.tuples(small, small, small, small).map(lambda t: np.array([t[0] + 1j * t[1], t[2] + 1j * t[3]]))
chars = st.sampled_from(CHARACTERISTICS)


@pytest.fixture(scope="module")
def curve(pipeline):
    return pipeline.sd.d, pipeline.amap


def test_segment_integrals_match_quadrature_oracle():
    # |integral| of dx/sqrt|R| and x dx/sqrt|R| for R = x(x-1)(x-2)(x-3)(x-4), by tanh-sinh quadrature
    I12 = segment_integral(1, 2, [0, 3, 4])
    I23 = segment_integral(2, 3, [0, 1, 4])
    assert np.allclose(np.abs(I12), [1.374514749848095, 2.097041184435093], rtol=1e-12)
    assert np.allclose(np.abs(I23), [1.374514749848095, 3.401017814957287], rtol=1e-12)


def test_branch_chain_sorts_and_rejects_collisions():
    chain = branch_chain([2 + 1j, 0, 2 - 1j, 1e-17 + 3j, 1])
    assert np.allclose(chain, [0, 3j, 1, 2 - 1j, 2 + 1j])
    with pytest.raises(BranchPointCollision):
        branch_chain([0, 1, 1, 2, 3])


def test_period_matrix_is_riemann_matrix(curve):
    d, amap = curve
    tau = amap.pm.tau
    assert np.abs(tau - tau.T).max() < 1e-9
    assert np.linalg.eigvalsh(tau.imag).min() > 0
    fine = period_matrix(d, n=4096).tau
    assert np.abs(fine - tau).max() < 1e-9


def test_period_matrix_real_curve():
    pm = period_matrix(np.array([0, 1, 2, 3, 4], dtype=complex))
    assert np.abs(pm.tau - pm.tau.T).max() < 1e-9
    assert np.linalg.eigvalsh(pm.tau.imag).min() > 0


def test_theta_diagonal_oracle():
    # product of two one-dimensional sums sum_n exp(-2 pi n^2), each 1.0037348854877391
    tau = np.diag([2j, 2j])
    assert abs(theta(np.zeros(2), tau) - 1.0074837203450847) < 1e-10


def test_theta_truncation_stable():
    u = np.array([0.3 - 0.2j, -0.1 + 0.4j])
    N = truncation_radius(TAU)
    for ch in CHARACTERISTICS:
        assert abs(theta(u, TAU, ch, N) - theta(u, TAU, ch, N + 6)) < 1e-13


def test_truncation_radius_grows_as_tau_flattens():
    assert truncation_radius(np.diag([0.2j, 0.2j])) > truncation_radius(np.diag([2j, 2j]))


@settings(max_examples=40, deadline=None)
@given(vectors, chars)
def test_theta_parity(u, ch):
    assert abs(theta(-u, TAU, ch) - parity(ch) * theta(u, TAU, ch)) < 1e-12 * max(1.0, abs(theta(u, TAU, ch)))


@settings(max_examples=40, deadline=None)
@given(vectors, chars, st.sampled_from([0, 1]))
def test_theta_quasi_periodicity(u, ch, k):
    base = theta(u, TAU, ch)
    e = np.eye(2)[k]
    scale = max(1.0, abs(base))
    assert abs(theta(u + e, TAU, ch) - (-1) ** ch[k] * base) < 1e-12 * scale
    factor = np.exp(-1j * np.pi * TAU[k, k] - 2j * np.pi * u[k] - 1j * np.pi * ch[2 + k])
    assert abs(theta(u + TAU @ e, TAU, ch) - factor * base) < 1e-12 * scale * max(1.0, abs(factor))


def test_odd_characteristics_vanish_at_origin():
    odd = [ch for ch in CHARACTERISTICS if parity(ch) < 0]
    assert len(odd) == 6
    for ch in odd:
        assert abs(theta(np.zeros(2), TAU, ch)) < 1e-14


def _continue(z, d, y_ref):
    y = np.sqrt(complex(curve_poly(z, d)))
    return y if abs(y - y_ref) <= abs(y + y_ref) else -y


@pytest.mark.parametrize("z0", [0.4 + 0.3j, -1.2 + 0.8j, 9.0 - 4.0j, 30.0 + 20.0j])
def test_abel_map_differential(curve, z0):
    # u(P') - u(P) against Simpson's rule for the normalised differentials
    d, amap = curve
    h = 1e-2 * max(1.0, abs(z0)) * np.exp(0.7j)
    P = CurvePoint.on_curve(z0, d)
    ym = _continue(z0 + h / 2, d, P.y)
    y1 = _continue(z0 + h, d, ym)
    Q = CurvePoint(z0 + h, y1)
    zs = np.array([z0, z0 + h / 2, z0 + h])
    ys = np.array([P.y, ym, y1])
    w = np.array([1, 4, 1]) * h / 6
    raw = np.array([np.sum(w / ys), np.sum(w * zs / ys)])
    diff = amap.point(Q) - amap.point(P)
    assert np.abs(diff - amap.A_inv @ raw).max() < 1e-9


def test_abel_map_far_and_near_agree(curve):
    d, amap = curve
    r = amap.far_radius
    z_in = r * (1 - 1e-3) * np.exp(0.3j)
    z_out = r * (1 + 1e-3) * np.exp(0.3j)
    P = CurvePoint.on_curve(z_in, d)
    Q = CurvePoint(z_out, _continue(z_out, d, P.y))
    assert abs(P.z) < r < abs(Q.z)
    step = amap.point(Q) - amap.point(P)
    assert np.abs(step).max() < 1e-2


def test_abel_map_is_odd_under_involution(curve):
    d, amap = curve
    rng = np.random.default_rng(4)
    for D in random_divisors(d, 5, rng):
        k = amap.lattice_coordinates(amap(D) + amap(D.iota()))
        assert np.abs(k - np.round(k)).max() < 1e-9


def test_reduce_moves_by_lattice(curve):
    _, amap = curve
    v = np.array([3.7 - 2.1j, -5.2 + 0.4j])
    r = amap.reduce(v)
    k = amap.lattice_coordinates(v - r)
    assert np.abs(k - np.round(k)).max() < 1e-9
    assert np.abs(amap.lattice_coordinates(r)).max() <= 0.5 + 1e-9


def test_unwrap_follows_a_line(curve):
    _, amap = curve
    rng = np.random.default_rng(1)
    t = np.linspace(0, 1, 30)
    line = np.array([0.1 + 0.05j, -0.2 + 0.1j])[None, :] + t[:, None] * np.array([0.3 + 0.2j, 0.1 - 0.4j])
    images = []
    for u in line:
        sg = rng.choice([1, -1])
        shift = amap.pm.lattice() @ rng.integers(-2, 3, size=4)
        images.append(sg * u + shift)
    lifted, _ = unwrap(images, amap)
    offset = lifted[0] - line[0]
    assert np.abs(lifted - line - offset).max() < 1e-12


def test_sign_aligned():
    rng = np.random.default_rng(0)
    ratios = (2 - 1j) * rng.choice([1, -1], size=15)
    kappa, spread, signs = sign_aligned(ratios)
    assert spread < 1e-15
    assert np.allclose(signs * ratios, kappa)


def test_calibration(pipeline):
    cal = pipeline.calibration
    assert set(cal.kappa) == set(LABELS)
    assert cal.max_spread < 1e-6
    assert cal.searched


def test_classical_table_fails_without_search(pipeline):
    ctx = ThetaContext(pipeline.ctx.tau, dict(CLASSICAL_TABLE))
    divs = random_divisors(pipeline.sd.d, 10, np.random.default_rng(3))
    with pytest.raises(CalibrationSpreadTooLarge):
        calibrate(ctx, pipeline.amap, divs, search=False)


def test_calibration_needs_ten_divisors(pipeline):
    divs = random_divisors(pipeline.sd.d, 5, np.random.default_rng(3))
    with pytest.raises(ValueError):
        calibrate(pipeline.ctx, pipeline.amap, divs)


def test_theta_zero_denominator():
    ctx = ThetaContext(TAU, {"": (1, 0, 1, 0), "0": (0, 0, 0, 0)})
    with pytest.raises(ThetaZeroDenominator):
        f_values(np.zeros(2), ctx, {"0": 1.0})


def test_linear_flow_fit_exact_line():
    t = np.linspace(0, 2, 11)
    u0 = np.array([0.1 + 0.2j, -0.3j])
    v = np.array([1.5 - 0.5j, 0.25 + 2j])
    fit0, fitv, res = linear_flow_fit(t, u0 + t[:, None] * v)
    assert np.allclose(fit0, u0) and np.allclose(fitv, v)
    assert res < 1e-13


def test_linear_flow_fit_stationary_point():
    # a fixed point of the flow maps to a constant Jacobian point
    t = np.linspace(0, 5, 20)
    u = np.tile([0.4 - 0.1j, 0.2 + 0.3j], (20, 1))
    _, v, res = linear_flow_fit(t, u)
    assert np.abs(v).max() < 1e-14 and res < 1e-14


def test_gauge_invariant_along_trajectory(pipeline):
    # (1 - eps P0) g is one constant up to the sign of g
    eps, C = pipeline.gauge.eps, pipeline.gauge.C
    for rec in pipeline.recoveries:
        val = (1 - eps * rec.p0) * rec.g
        assert min(abs(val - C), abs(val + C)) < 1e-7 * abs(C)


def test_normal_form_constant_matches_h0(pipeline, samples50, a):
    h0 = integrals(samples50[1][0], a).h0
    nf = pipeline.normal_form
    assert abs(nf.K0 * pipeline.gauge.C ** 2 - h0) < 1e-7 * abs(h0)


def test_kappa_from_trajectory_matches_calibration(pipeline):
    assert pipeline.kappa_mismatch() < 1e-6


def test_reconstruction_close_to_samples(pipeline, samples50):
    times, states = samples50
    err = max(np.abs(pipeline.state(t) - l).max() for t, l in zip(times, states))
    assert err < 1e-6


def test_theta_quotients_satisfy_wurzel_identities(pipeline):
    # calibrated quotients at arbitrary Jacobian points, not only at divisor images
    rng = np.random.default_rng(9)
    d = pipeline.sd.d
    for _ in range(10):
        u = rng.normal(size=2) * 0.5 + 1j * rng.normal(size=2) * 0.3
        f = f_values(u, pipeline.ctx, pipeline.calibration.kappa)
        rep = identity_residuals(f, d, complex(rng.normal(), rng.normal()))
        for key in ("resolvent", "trace_d4", "trace_p0", "cross_c", "cross_ct", "weighted"):
            assert rep[key] < 1e-6, key

