"""Numerical integration and algebro-geometric solution of the so(4) Manakov top."""
from .core import (
    AngularMomentum,
    InertiaParameters,
    IntegralLevels,
    derive_c,
    from_m_n,
    integrals,
    m_n,
    poisson_bracket,
)
from .dynamics import Trajectory, euler_frahm_rhs, generating_function_f, integrate, lax_residual
from .spectral import SpectralData, epsilon, h0_normal_form, quartic_roots, spectral_data
from .wurzel import CurvePoint, Divisor, identity_suite, p_pair, p_single, recover_divisor

__version__ = "0.1.0"

__all__ = [
    "AngularMomentum", "InertiaParameters", "IntegralLevels", "derive_c", "from_m_n", "integrals", "m_n",
    "poisson_bracket", "Trajectory", "euler_frahm_rhs", "generating_function_f", "integrate", "lax_residual",
    "SpectralData", "epsilon", "h0_normal_form", "quartic_roots", "spectral_data",
    "CurvePoint", "Divisor", "identity_suite", "p_pair", "p_single", "recover_divisor",
]
