"""
Exponential sampling operators of Durrmeyer type.

All four operators share the lattice weights phi(z^n e^-k) over an index
window and the sample functionals c_k(h) = n int psi(u^n e^-k) h(u) du/u.
The nonlinear operators replace the sum over k by a lattice supremum.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .kernels import KernelPhi, KernelPsi
from .quadrature import QuadratureSpec, durrmeyer_coefficient, kantorovich_coefficient
from .signals import Signal, constant

__all__ = [
    "OperatorParams",
    "EvalTrace",
    "sup_over",
    "min_pair",
    "index_window",
    "max_product_durrmeyer",
    "max_min_durrmeyer",
    "linear_durrmeyer",
    "kantorovich",
    "OPERATORS",
    "evaluate",
]

POSITIVITY_THRESHOLD = 1e-12
UNIT_CHECK_TOL = 1e-7

_ONE = constant(1.0)


@dataclass(frozen=True)
class OperatorParams:
    """Operator configuration.

    ``integration_domain`` restricts every sample integral (numerator and
    normaliser alike) to a compact interval [a, b] of (0, inf); ``None``
    integrates over the whole half-line.
    """

    n: int
    phi: KernelPhi
    psi: KernelPsi
    quad: QuadratureSpec = field(default_factory=QuadratureSpec)
    k_window_pad: float = 0.0
    integration_domain: tuple[float, float] | None = None

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise ValueError("n must be a positive integer")
        if self.k_window_pad < 0:
            raise ValueError("k_window_pad must be nonnegative")
        if self.integration_domain is not None:
            a, b = self.integration_domain
            if not 0 < a < b < math.inf:
                raise ValueError("integration_domain must be a compact interval inside (0, inf)")


@dataclass(frozen=True)
class EvalTrace:
    z: float
    k_indices: list[int]
    numerator: float
    denominator: float
    value: float


def sup_over(values) -> float:
    """Lattice supremum of a finite family."""
    values = np.asarray(values, dtype=float)
    if values.size == 0:
        raise ValueError("supremum over an empty family")
    return float(np.max(values))


def min_pair(a, b):
    """Lattice meet a ^ b."""
    return np.minimum(a, b) if np.ndim(a) or np.ndim(b) else min(a, b)


def index_window(phi: KernelPhi, n: int, z: float, pad: float = 0.0) -> list[int]:
    """Indices k with n log z - k inside the log-support of phi, widened by n * pad.

    Boundary-inclusive. Kernels without compact support use the radius where
    their envelope drops below 1e-6.
    """
    if not z > 0:
        raise ValueError("z must be positive")
    c = n * math.log(z)
    if phi.log_support is not None:
        a, b = phi.log_support
    else:
        R = phi.lattice_radius()
        a, b = -R, R
    slack = 1e-12 * max(1.0, abs(c))
    lo = math.ceil(c - b - n * pad - slack)
    hi = math.floor(c - a + n * pad + slack)
    return list(range(lo, hi + 1))


@lru_cache(maxsize=8192)
def _unit_coefficient(psi: KernelPsi, n: int, k: int, quad: QuadratureSpec, domain) -> float:
    return durrmeyer_coefficient(psi, _ONE, n, k, quad, domain).value


def _lattice(signal: Signal, z: float, params: OperatorParams):
    ks = index_window(params.phi, params.n, z, params.k_window_pad)
    if not ks:
        raise ValueError(f"empty index window at z={z}")
    n = params.n
    karr = np.asarray(ks, dtype=float)
    weights = np.asarray(params.phi.profile(n * math.log(z) - karr), dtype=float)
    coeffs = np.array([durrmeyer_coefficient(params.psi, signal, n, k, params.quad,
                                             params.integration_domain).value for k in ks])
    return ks, weights, coeffs


def _normaliser(ks, weights, z, params: OperatorParams) -> float:
    units = np.array([_unit_coefficient(params.psi, params.n, k, params.quad, params.integration_domain)
                      for k in ks])
    if params.integration_domain is None and np.any(np.abs(units - 1.0) > UNIT_CHECK_TOL):
        warnings.warn(f"psi={params.psi.name} does not integrate to 1 "
                      f"(max deviation {np.max(np.abs(units - 1.0)):.2e})", RuntimeWarning, stacklevel=3)
    # indices outside the window carry zero (or vanishing) weight, so the sup over Z is >= 0
    den = max(0.0, sup_over(weights * units))
    if den <= POSITIVITY_THRESHOLD:
        raise ValueError(f"operator denominator {den:.3g} not positive at z={z} (window k={ks[0]}..{ks[-1]})")
    return den


def max_product_durrmeyer(signal: Signal, z: float, params: OperatorParams) -> EvalTrace:
    """Max-product Durrmeyer operator at z.

    Ratio of the lattice sups of phi(z^n e^-k) c_k(h) and phi(z^n e^-k) c_k(1).
    """
    ks, w, c = _lattice(signal, z, params)
    den = _normaliser(ks, w, z, params)
    num = max(0.0, sup_over(w * c))
    return EvalTrace(float(z), ks, num, den, num / den)


def max_min_durrmeyer(signal: Signal, z: float, params: OperatorParams) -> EvalTrace:
    """Max-min Durrmeyer operator at z: sup_k of c_k(h) ^ phi(z^n e^-k) / normaliser.

    The signal must be declared [0, 1]-valued.
    """
    if not signal.is_fuzzy:
        raise ValueError(f"max-min operator needs a [0, 1]-valued signal; {signal.name} declares {signal.range_bounds}")
    ks, w, c = _lattice(signal, z, params)
    den = _normaliser(ks, w, z, params)
    value = max(0.0, sup_over(min_pair(c, w / den)))
    return EvalTrace(float(z), ks, value, den, value)


def linear_durrmeyer(signal: Signal, z: float, params: OperatorParams) -> float:
    """Linear Durrmeyer exponential sampling operator: sum_k phi(z^n e^-k) c_k(h)."""
    _, w, c = _lattice(signal, z, params)
    return float(np.sum(w * c))


def kantorovich(signal: Signal, z: float, params: OperatorParams) -> float:
    """Kantorovich exponential sampling operator: sum_k phi(z^n e^-k) n int_{k/n}^{(k+1)/n} h(e^v) dv."""
    ks = index_window(params.phi, params.n, z, params.k_window_pad)
    if not ks:
        raise ValueError(f"empty index window at z={z}")
    n = params.n
    w = np.asarray(params.phi.profile(n * math.log(z) - np.asarray(ks, dtype=float)), dtype=float)
    cells = np.array([kantorovich_coefficient(signal, n, k, params.quad, params.integration_domain).value
                      for k in ks])
    return float(np.sum(w * cells))


OPERATORS = {
    "max-product": max_product_durrmeyer,
    "max-min": max_min_durrmeyer,
    "linear": linear_durrmeyer,
    "kantorovich": kantorovich,
}


def evaluate(operator: str, signal: Signal, z: float, params: OperatorParams) -> float:
    """Operator value at z by identifier (see ``OPERATORS``)."""
    try:
        fn = OPERATORS[operator]
    except KeyError:
        raise ValueError(f"unknown operator {operator!r}") from None
    out = fn(signal, z, params)
    return out.value if isinstance(out, EvalTrace) else float(out)
