"""Monotonicity of Var(X^s)^(1/s), AM-GM gap variance bounds and the
positive/negative-part variance decomposition, on finite weighted samples."""

__version__ = "0.1.0"

from .amgm import (
    AmGmGapReport,
    a2_lower_bound,
    amgm_gap,
    cartwright_field_bounds,
    full_report,
    thm4_bounds,
)
from .core import (
    Tolerance,
    WeightedSample,
    geometric_mean_w,
    lp_norm_w,
    mean_w,
    power_transform,
    variance_w,
)
from .power_variance import (
    InterpolationWitness,
    PowerVarianceCurve,
    check_monotone,
    curve,
    interpolated_norm_bound,
    log_power_variance,
    power_variance,
)
from .sign import (
    DecompositionReport,
    SignAtoms,
    decomposition_report,
    decomposition_reports,
    power_decomposition_bounds,
    power_decomposition_table,
    sign_atoms,
    split_parts,
    total_variance_identity,
)
