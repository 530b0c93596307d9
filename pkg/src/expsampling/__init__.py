"""Max-product and max-min Durrmeyer-type exponential sampling operators."""

__version__ = "0.1.0"

from .analysis import ErrorReport, RateEstimate, estimate_rate, log_modulus, pointwise_errors, rate_bound_maxproduct
from .kernels import (
    KernelPhi,
    KernelPsi,
    continuous_moment,
    discrete_abs_moment,
    mellin_bspline,
    mellin_fejer,
    parse_kernel,
    phi_floor,
    validate_kernel_pair,
)
from .operators import OperatorParams, evaluate, max_min_durrmeyer, max_product_durrmeyer
from .quadrature import QuadratureSpec, durrmeyer_coefficient, integrate_mellin
from .signals import F, G, Signal, constant, parse_signal

__all__ = [
    "ErrorReport", "RateEstimate", "estimate_rate", "log_modulus", "pointwise_errors", "rate_bound_maxproduct",
    "KernelPhi", "KernelPsi", "continuous_moment", "discrete_abs_moment", "mellin_bspline", "mellin_fejer",
    "parse_kernel", "phi_floor", "validate_kernel_pair", "OperatorParams", "evaluate", "max_min_durrmeyer",
    "max_product_durrmeyer", "QuadratureSpec", "durrmeyer_coefficient", "integrate_mellin", "F", "G", "Signal",
    "constant", "parse_signal",
]
