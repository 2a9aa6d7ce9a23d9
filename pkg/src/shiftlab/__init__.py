"""Numerical laboratory for real-valued spectral shift functions of contraction
and dissipative matrix pairs, built on periodic Schaffer dilations."""

from shiftlab.circle import (
    FourierCoeffs,
    SampledCircleFunction,
    StepFunctionCircle,
    determinant_ssf,
    fourier,
    hardy_deficit,
    integrate_step,
    unitary_ssf,
    zygmund_and_conjugate,
)
from shiftlab.contraction import (
    PipelineConfig,
    check_hypotheses,
    corollary_xt,
    real_ssf,
    verify_trace_formula,
)
from shiftlab.dilation import build_periodic, compress_power, dilation_pair, julia_block
from shiftlab.dissipative import (
    DissipativeOperator,
    StepFunctionLine,
    cayley,
    check_condition_31,
    nonintegrability_probe,
    pull_back_ssf,
    real_ssf_line,
    verify_trace_formula_line,
)
from shiftlab.kernels import BACKEND
from shiftlab.opcore import (
    EnsembleConfig,
    LaurentPolynomial,
    Operator,
    RationalFunction,
    an_functional,
    classify,
    defect,
    poly_eval,
    random_operator,
    rational_eval,
    schatten_norm,
)

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "DissipativeOperator",
    "EnsembleConfig",
    "FourierCoeffs",
    "LaurentPolynomial",
    "Operator",
    "PipelineConfig",
    "RationalFunction",
    "SampledCircleFunction",
    "StepFunctionCircle",
    "StepFunctionLine",
    "an_functional",
    "build_periodic",
    "cayley",
    "check_condition_31",
    "check_hypotheses",
    "classify",
    "compress_power",
    "corollary_xt",
    "defect",
    "determinant_ssf",
    "dilation_pair",
    "fourier",
    "hardy_deficit",
    "integrate_step",
    "julia_block",
    "nonintegrability_probe",
    "poly_eval",
    "pull_back_ssf",
    "random_operator",
    "rational_eval",
    "real_ssf",
    "real_ssf_line",
    "schatten_norm",
    "unitary_ssf",
    "verify_trace_formula",
    "verify_trace_formula_line",
    "zygmund_and_conjugate",
]
