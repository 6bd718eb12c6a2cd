"""Period matrix, theta functions, Abel map and the closed-form solution."""
from .abel import AbelMap, abel_map, unwrap
from .calibrate import LABELS, CalibrationConstants, calibrate, random_divisors, sign_aligned
from .flow import Gauge, Uniformization, f_values, linear_flow_fit, reconstruct, uniformize
from .periods import PeriodMatrix, branch_chain, period_matrix, segment_integral
from .theta import CHARACTERISTICS, CLASSICAL_TABLE, ThetaContext, parity, theta, truncation_radius

__all__ = [
    "AbelMap", "abel_map", "unwrap",
    "LABELS", "CalibrationConstants", "calibrate", "random_divisors", "sign_aligned",
    "Gauge", "Uniformization", "f_values", "linear_flow_fit", "reconstruct", "uniformize",
    "PeriodMatrix", "branch_chain", "period_matrix", "segment_integral",
    "CHARACTERISTICS", "CLASSICAL_TABLE", "ThetaContext", "parity", "theta", "truncation_radius",
]
