"""Numerical laboratory for the kernel calculus of time-ordered Fock
product systems over the algebra of continuous functions on [0, inf) with
a limit at infinity: unit kernels and their semigroups, the bimodule
algebra of continuous units, membership in the subsystem generated by the
unit (1, 0), and its index."""

from .algebra import (
    AlgebraElement,
    GridMismatchError,
    GridSpec,
    UnresolvedTailWarning,
    constant,
    is_positive,
    limit_at_infinity,
    pointwise,
    reciprocal,
    shift,
    star,
    sup_norm,
)
from .fock import (
    FockUnit,
    GramReport,
    KernelOperator,
    NParticleVector,
    UnsupportedParameterError,
    apply,
    generator_unit,
    gram_matrix,
    gram_psd_check,
    kernel,
    left_action,
    matrix_exponential,
    module_inner,
    multiplication_operator,
    operator_norm,
    semigroup,
    unit_component,
    vacuum_unit,
)
from .subsystem import (
    MembershipReport,
    Step1Witness,
    WitnessKind,
    approximate,
    centrality_check,
    convergence_report,
    convexify,
    index_representative,
    membership,
    theta_check,
    witness_step1,
)
from .unit_algebra import (
    ReferencedUnit,
    boxplus_left,
    boxplus_right,
    default_probe_units,
    dual_path_residual,
    equivalent,
    index_norm,
    left_mul,
    power_beta,
    right_mul,
    semi_inner,
    wrap,
)

__version__ = "0.1.0"

__all__ = [
    "AlgebraElement",
    "GridMismatchError",
    "GridSpec",
    "UnresolvedTailWarning",
    "constant",
    "is_positive",
    "limit_at_infinity",
    "pointwise",
    "reciprocal",
    "shift",
    "star",
    "sup_norm",
    "FockUnit",
    "GramReport",
    "KernelOperator",
    "NParticleVector",
    "UnsupportedParameterError",
    "apply",
    "generator_unit",
    "gram_matrix",
    "gram_psd_check",
    "kernel",
    "left_action",
    "matrix_exponential",
    "module_inner",
    "multiplication_operator",
    "operator_norm",
    "semigroup",
    "unit_component",
    "vacuum_unit",
    "MembershipReport",
    "Step1Witness",
    "WitnessKind",
    "approximate",
    "centrality_check",
    "convergence_report",
    "convexify",
    "index_representative",
    "membership",
    "theta_check",
    "witness_step1",
    "ReferencedUnit",
    "boxplus_left",
    "boxplus_right",
    "default_probe_units",
    "dual_path_residual",
    "equivalent",
    "index_norm",
    "left_mul",
    "power_beta",
    "right_mul",
    "semi_inner",
    "wrap",
    "__version__",
]
