"""Interval exchanges, Rauzy-Veech induction and skew shifts over compact groups."""

__version__ = "0.1.0"

from .errors import (
    BackendMismatchError,
    DegeneracyError,
    DomainError,
    IETLabError,
    IterationBudgetError,
    ValidationError,
)
from .iet import IET, FirstReturn, Permutation, apply, apply_inverse, build_iet, first_return_map, validate_irreducible
from .rauzy import (
    InductionTrace,
    RauzyRule,
    check_P1,
    check_P2,
    find_veech_time,
    induction_orbit,
    rauzy_step,
)
from .groups import (
    SO3,
    SU2,
    U1,
    Character,
    GTuple,
    Spin,
    Torus,
    gamma_step,
    group_from_name,
    haar_invariance_deviation,
    haar_sample,
    haar_tuple,
    nielsen_alpha,
    nielsen_beta,
    rauzy_A,
    rauzy_B,
    rep_eval,
)
from .skew import SkewPoint, SkewShiftTriple, apply_skew, extended_rauzy_step, first_return_consistency
from .diagnostics import (
    cesaro_correlation,
    defect_trajectory,
    eigenvalue_scan,
    fixed_vector_defect,
    matrix_coefficient_average,
)
from .kernels import BACKEND as KERNEL_BACKEND
from .streams import random_iet, substream

__all__ = [
    "BackendMismatchError",
    "DegeneracyError",
    "DomainError",
    "IETLabError",
    "IterationBudgetError",
    "ValidationError",
    "IET",
    "FirstReturn",
    "Permutation",
    "apply",
    "apply_inverse",
    "build_iet",
    "first_return_map",
    "validate_irreducible",
    "InductionTrace",
    "RauzyRule",
    "check_P1",
    "check_P2",
    "find_veech_time",
    "induction_orbit",
    "rauzy_step",
    "SO3",
    "SU2",
    "U1",
    "Character",
    "GTuple",
    "Spin",
    "Torus",
    "gamma_step",
    "group_from_name",
    "haar_invariance_deviation",
    "haar_sample",
    "haar_tuple",
    "nielsen_alpha",
    "nielsen_beta",
    "rauzy_A",
    "rauzy_B",
    "rep_eval",
    "SkewPoint",
    "SkewShiftTriple",
    "apply_skew",
    "extended_rauzy_step",
    "first_return_consistency",
    "cesaro_correlation",
    "defect_trajectory",
    "eigenvalue_scan",
    "fixed_vector_defect",
    "matrix_coefficient_average",
    "KERNEL_BACKEND",
    "random_iet",
    "substream",
]
