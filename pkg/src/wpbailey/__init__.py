"""Exact-arithmetic verification of WP and elliptic WP Bailey identities."""

from .arith import Monomial, NomeSeries, rat
from .bailey import (
    BibasicPair, TransformStep, WPPair, apply_transform, bibasic_closed_form, build_path,
    kernel_M, kernel_Mtilde, lift_bibasic, transform_data, unit_pair, verify_pair,
)
from .errors import (
    ConstraintViolation, DivisionByZeroSeries, IndexRangeError, InsufficientTruncation,
    MissingRoot, PoleAtZeroNome, SamplingExhausted, WPBaileyError,
)
from .harness import ParamPoint, exponent_probe, run_case, run_tree
from .identities import REGISTRY, get_case, kernel_suite
from .qobjects import FactorialSpec, qfact, qratio, theta
from .report import IdentityReport
from .series import phi, vsum, wsum

__version__ = "0.1.0"

__all__ = [
    "BibasicPair", "ConstraintViolation", "DivisionByZeroSeries", "FactorialSpec", "IdentityReport",
    "IndexRangeError", "InsufficientTruncation", "MissingRoot", "Monomial", "NomeSeries", "ParamPoint",
    "PoleAtZeroNome", "REGISTRY", "SamplingExhausted", "TransformStep", "WPBaileyError", "WPPair",
    "apply_transform", "bibasic_closed_form", "build_path", "exponent_probe", "get_case", "kernel_M",
    "kernel_Mtilde", "kernel_suite", "lift_bibasic", "phi", "qfact", "qratio", "rat", "run_case",
    "run_tree", "theta", "transform_data", "unit_pair", "verify_pair", "vsum", "wsum",
]
