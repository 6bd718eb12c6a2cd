"""Genus-2 theta functions with half-integer characteristics.

A characteristic is a 4-tuple ``(g1, g2, h1, h2)`` with entries in {0, 1},
i.e. the matrix ``[[g1, g2], [h1, h2]]`` written row by row, and

    theta[g, h](u) = sum_n exp(i pi (n + g/2) tau (n + g/2) + 2 pi i (n + g/2)(u + h/2)).
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

CHARACTERISTICS = tuple(itertools.product((0, 1), repeat=4))

# label -> characteristic as printed in the classical table; "" is the denominator
CLASSICAL_TABLE = {
    "23": (0, 0, 1, 1),
    "31": (1, 0, 1, 1),
    "12": (1, 0, 0, 0),
    "14": (1, 1, 1, 1),
    "24": (0, 1, 1, 1),
    "34": (0, 1, 0, 0),
    "0": (1, 1, 0, 0),
    "": (0, 0, 0, 0),
}


def parity(ch) -> int:
    """+1 for even, -1 for odd characteristics."""
    return -1 if (ch[0] * ch[2] + ch[1] * ch[3]) % 2 else 1


def truncation_radius(tau, digits: float = 14.0) -> int:
    """Radius N so the dropped Gaussian tail is below ``10**-digits``."""
    lam = np.linalg.eigvalsh(np.asarray(tau).imag).min()
    return int(np.ceil(np.sqrt(digits * np.log(10) / (np.pi * lam)))) + 2


def theta(u, tau, ch=(0, 0, 0, 0), N: int | None = None) -> complex:
    """Theta series summed over a square window centred on the dominant term."""
    u = np.asarray(u, dtype=complex)
    tau = np.asarray(tau, dtype=complex)
    if N is None:
        N = truncation_radius(tau)
    Y = tau.imag
    centre = -np.round(np.linalg.solve(Y, u.imag)).astype(int)
    g = np.asarray(ch[:2]) / 2
    h = np.asarray(ch[2:]) / 2
    r = np.arange(-N, N + 1)
    n1, n2 = np.meshgrid(r + centre[0], r + centre[1], indexing="ij")
    a1 = n1 + g[0]
    a2 = n2 + g[1]
    q = a1 * a1 * tau[0, 0] + a1 * a2 * (tau[0, 1] + tau[1, 0]) + a2 * a2 * tau[1, 1]
    lin = a1 * (u[0] + h[0]) + a2 * (u[1] + h[1])
    return np.exp(1j * np.pi * q + 2j * np.pi * lin).sum()


def theta_all(u, tau, N: int | None = None) -> dict:
    return {ch: theta(u, tau, ch, N) for ch in CHARACTERISTICS}


@dataclass(frozen=True)
class ThetaContext:
    tau: np.ndarray
    table: dict = field(default_factory=lambda: dict(CLASSICAL_TABLE))
    N: int = 0

    def __post_init__(self):
        tau = np.asarray(self.tau, dtype=complex)
        object.__setattr__(self, "tau", (tau + tau.T) / 2)
        if self.N <= 0:
            object.__setattr__(self, "N", truncation_radius(self.tau))

    def theta(self, u, label: str = "") -> complex:
        return theta(u, self.tau, self.table[label], self.N)

    def ratio(self, u, label: str) -> complex:
        return self.theta(u, label) / self.theta(u, "")

    def with_table(self, table: dict) -> "ThetaContext":
        return ThetaContext(self.tau, dict(table), self.N)
