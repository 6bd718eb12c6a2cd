"""Euler-Frahm vector field, fixed-step integrators, generating function and Lax pair."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import CYCLIC, PAIRS, from_matrix, integrals_series, m_n, poisson_bracket, to_matrix
from .errors import BranchDiscontinuity, ConfigError, NonFiniteState


def euler_frahm_rhs(l, c) -> np.ndarray:
    """Time derivative ``L w - w L`` with ``w = c * L`` (elementwise), in storage order.

    Accepts a single state of shape ``(6,)`` or a stack ``(..., 6)``.
    """
    L = to_matrix(l)
    W = np.asarray(c) * L
    return from_matrix(L @ W - W @ L)


def hamiltonian_vector_field(l, c) -> np.ndarray:
    """``{H, l_jk}`` assembled from the bracket and the chain rule.

    Slow on purpose: it is an independent check of :func:`euler_frahm_rhs`.
    """
    l = np.asarray(l)
    c = np.asarray(c)
    out = np.zeros(6, dtype=l.dtype)
    for t, (j, k) in enumerate(PAIRS):
        acc = 0.0
        for s, (p, q) in enumerate(PAIRS):
            # dH/dl_pq = c_pq l_pq
            acc = acc + c[p - 1, q - 1] * l[s] * poisson_bracket(p, q, j, k, l)
        out[t] = acc
    return out


@dataclass(frozen=True)
class Trajectory:
    times: np.ndarray
    states: np.ndarray
    dt: float
    method: str

    def __post_init__(self):
        if len(self.times) != len(self.states):
            raise ValueError("times and states differ in length")
        if len(self.times) > 1 and np.any(np.diff(self.times) <= 0):
            raise ValueError("times must be strictly increasing")

    def __len__(self):
        return len(self.times)

    def at(self, t: float) -> np.ndarray:
        """State at a sample time (nearest sample; exact for multiples of dt)."""
        i = int(np.argmin(np.abs(self.times - t)))
        return self.states[i]

    def subsample(self, stride: int) -> "Trajectory":
        return Trajectory(self.times[::stride], self.states[::stride], self.dt * stride, self.method)


def _rk4_step(l, c, h):
    k1 = euler_frahm_rhs(l, c)
    k2 = euler_frahm_rhs(l + 0.5 * h * k1, c)
    k3 = euler_frahm_rhs(l + 0.5 * h * k2, c)
    k4 = euler_frahm_rhs(l + h * k3, c)
    return l + h / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)


def _midpoint_step(l, c, h, tol=1e-15, max_iter=60):
    # fixed point iteration on the implicit midpoint equation
    nxt = l + h * euler_frahm_rhs(l, c)
    for _ in range(max_iter):
        new = l + h * euler_frahm_rhs(0.5 * (l + nxt), c)
        if np.max(np.abs(new - nxt)) <= tol * max(1.0, np.max(np.abs(new))):
            return new
        nxt = new
    return nxt


_STEPPERS = {"rk4": _rk4_step, "midpoint": _midpoint_step}


def integrate(l0, c, t_end: float, dt: float, method: str = "rk4", stride: int = 1) -> Trajectory:
    """Fixed-step integration of the Euler-Frahm equations on ``[0, t_end]``.

    ``stride`` keeps every stride-th step; the stored grid is always a
    multiple of ``dt``.  If ``t_end`` is not a multiple of ``dt`` the final
    step is shortened so the last sample lands on ``t_end``.
    """
    if not dt > 0 or not t_end > 0:
        raise ConfigError("dt and t_end must be positive")
    if method not in _STEPPERS:
        raise ConfigError(f"unknown integrator {method!r}")
    step = _STEPPERS[method]
    c = np.asarray(c, dtype=float)
    l = np.array(l0, dtype=float)
    n = int(np.floor(t_end / dt + 1e-9))
    last = t_end - n * dt
    times = [0.0]
    states = [l.copy()]
    for i in range(1, n + 1):
        l = step(l, c, dt)
        if i % stride == 0:
            if not np.all(np.isfinite(l)):
                raise NonFiniteState(f"non-finite state at t={i * dt:g}")
            times.append(i * dt)
            states.append(l.copy())
    if last > 1e-12 * dt:
        l = step(l, c, last)
        times.append(t_end)
        states.append(l.copy())
    if not np.all(np.isfinite(l)):
        raise NonFiniteState("non-finite final state")
    return Trajectory(np.array(times), np.array(states), dt, method)


def relative_drift(traj: Trajectory, a) -> np.ndarray:
    """Max relative deviation of (H0..H3) from their initial values."""
    h = integrals_series(traj.states, a)
    scale = max(1.0, np.abs(h[0, 1:]).max())
    return np.abs(h - h[0]).max(axis=0) / scale


def g_poly(s, a):
    return np.prod([s - aj for aj in a], axis=0)


def generating_function_f(s, l, a, branch: int = 1) -> complex:
    """Generating function of the integrals at spectral parameter ``s``.

    Computed from the components (not from the integral values), so it is an
    independent check of the polynomial ``h1 s^2 - h2 s + h3``.
    """
    s = complex(s)
    m, n = m_n(np.asarray(l))
    poly = 0.0
    for j, (k, q) in CYCLIC.items():
        poly += (s - a[j - 1]) * (s - a[3]) * m[j - 1] ** 2 + (s - a[k - 1]) * (s - a[q - 1]) * n[j - 1] ** 2
    return poly + 2 * branch * (m @ n) * np.sqrt(complex(g_poly(s, a)))


def lax_roots(s, a) -> tuple[np.ndarray, np.ndarray, complex]:
    """Square roots entering l(s) and m(s) at parameter ``s``.

    ``r_j`` is the principal root of ``(s - a_j)(s - a_4)``.  The branch of
    ``sqrt(G)`` is pinned by ``r_1 r_2 r_3 = -sqrt(G) (s - a_4)`` and the
    partner roots are ``q_j = sqrt(G)/r_j``.  None of this depends on time.
    """
    s = complex(s)
    r = np.sqrt(np.array([(s - a[j]) * (s - a[3]) for j in range(3)], dtype=complex))
    sqrt_g = -np.prod(r) / (s - a[3])
    return r, sqrt_g / r, sqrt_g


def cross_matrix(v) -> np.ndarray:
    v1, v2, v3 = v
    return np.array([[0, v3, -v2], [-v3, 0, v1], [v2, -v1, 0]])


@dataclass(frozen=True)
class LaxMatrices:
    L: np.ndarray
    M: np.ndarray


def lax_matrices(l, a, s) -> LaxMatrices:
    m, n = m_n(np.asarray(l))
    r, q, _ = lax_roots(s, a)
    return LaxMatrices(cross_matrix(r * m + q * n), cross_matrix(q * m + r * n))


def lax_residual(traj: Trajectory, a, s, jump_tol: float = 0.5) -> float:
    """Max norm of ``dL/dt - [L, M]`` over interior samples (5-point stencil).

    The samples must be uniformly spaced.  A jump in the l(s) vector between
    neighbours larger than ``jump_tol`` times its typical size is reported
    as a branch discontinuity.
    """
    times = traj.times
    h = times[1] - times[0]
    if not np.allclose(np.diff(times), h, rtol=1e-9, atol=0):
        raise ValueError("lax_residual needs uniformly spaced samples")
    Ls = []
    Ms = []
    for state in traj.states:
        lm = lax_matrices(state, a, s)
        Ls.append(lm.L)
        Ms.append(lm.M)
    Ls = np.array(Ls)
    Ms = np.array(Ms)
    size = np.abs(Ls).max()
    steps = np.abs(np.diff(Ls, axis=0)).max(axis=(1, 2))
    if size > 0 and steps.max() > jump_tol * size:
        raise BranchDiscontinuity("l(s) jumps between adjacent samples")
    dL = (Ls[:-4] - 8 * Ls[1:-3] + 8 * Ls[3:-1] - Ls[4:]) / (12 * h)
    Lc = Ls[2:-2]
    Mc = Ms[2:-2]
    comm = Lc @ Mc - Mc @ Lc
    return float(np.abs(dL - comm).max())
