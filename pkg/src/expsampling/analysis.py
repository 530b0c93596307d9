"""
Error tables, the logarithmic modulus of continuity, the a-priori error
bound for the max-product operator, and empirical convergence rates.
"""

from __future__ import annotations

import io
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.optimize import minimize_scalar
from scipy.stats import linregress

from .kernels import KernelPhi, KernelPsi, MomentReport, continuous_moment, discrete_abs_moment, phi_floor
from .operators import OperatorParams, evaluate
from .signals import Signal

__all__ = [
    "ErrorReport",
    "RateEstimate",
    "RateBound",
    "log_modulus",
    "LogModulus",
    "pointwise_errors",
    "rate_bound_maxproduct",
    "best_rate_bound",
    "estimate_rate",
    "fmt",
]


def fmt(x: float) -> str:
    """Six significant digits, locale-independent."""
    return f"{x:.6g}"


@dataclass
class ErrorReport:
    """Absolute errors |operator(h)(z) - h(z)| over a (z, n) grid.

    ``approx`` has shape (len(z_values), len(n_values)); cells whose
    evaluation raised hold NaN and are listed in ``failures``.
    """

    operator_name: str
    signal_name: str
    z_values: list[float]
    n_values: list[int]
    approx: np.ndarray
    exact: np.ndarray
    failures: dict[tuple[int, int], str] = field(default_factory=dict)

    @property
    def errors(self) -> np.ndarray:
        return np.abs(self.approx - self.exact[:, None])

    @property
    def rows(self) -> list[tuple[float, dict[int, float]]]:
        err = self.errors
        return [(z, {n: float(err[i, j]) for j, n in enumerate(self.n_values)}) for i, z in enumerate(self.z_values)]

    def error(self, z: float, n: int) -> float:
        return float(self.errors[self.z_values.index(z), self.n_values.index(n)])

    def sup_errors(self) -> np.ndarray:
        """Largest error over the z grid, per n."""
        return np.nanmax(self.errors, axis=0)

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write("z,n,approx,exact,abs_error\n")
        err = self.errors
        for i, z in enumerate(self.z_values):
            for j, n in enumerate(self.n_values):
                buf.write(f"{fmt(z)},{n},{fmt(self.approx[i, j])},{fmt(self.exact[i])},{fmt(err[i, j])}\n")
        return buf.getvalue()


def pointwise_errors(operator: str, signal: Signal, z_list, n_list, params: OperatorParams,
                     jobs: int = 1) -> ErrorReport:
    """Evaluate ``operator`` on the full (z, n) cross product.

    ``params`` is a template whose ``n`` is replaced per column. Cells are
    independent and may be computed on ``jobs`` threads; results are placed
    by index so the report does not depend on scheduling.
    """
    z_list = [float(z) for z in z_list]
    n_list = [int(n) for n in n_list]
    if not z_list or not n_list:
        raise ValueError("z and n lists must be nonempty")
    cells = [(i, j) for i in range(len(z_list)) for j in range(len(n_list))]
    per_n = {n: replace(params, n=n) for n in n_list}

    def run(cell):
        i, j = cell
        try:
            return evaluate(operator, signal, z_list[i], per_n[n_list[j]]), None
        except (ValueError, ArithmeticError) as exc:
            return math.nan, str(exc)

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(run, cells))
    else:
        results = [run(c) for c in cells]

    approx = np.empty((len(z_list), len(n_list)))
    failures = {}
    for (i, j), (value, msg) in zip(cells, results):
        approx[i, j] = value
        if msg is not None:
            failures[(i, j)] = msg
    exact = np.asarray(signal.evaluate(np.asarray(z_list)), dtype=float)
    return ErrorReport(operator, signal.name, z_list, n_list, approx, exact, failures)


class LogModulus:
    """Grid estimate of the logarithmic modulus of continuity of a signal.

    Samples the signal on a log-uniform grid of ``interval`` and records, for
    every index shift s, the largest |h(x_i + s dx) - h(x_i)|. The modulus at
    a radius is the running maximum over admissible shifts. Shifts are scanned
    lazily, up to the largest radius asked for so far. This is a lower
    estimate of the continuum supremum.
    """

    def __init__(self, signal: Signal, interval: tuple[float, float] | None = None, grid: int = 4096):
        lo, hi = interval if interval is not None else signal.support
        if not (0 < lo < hi < math.inf):
            raise ValueError(f"log modulus needs a compact interval inside (0, inf), got [{lo}, {hi}]; "
                             "pass an explicit interval for supports touching 0 or infinity")
        if grid < 2:
            raise ValueError("grid must be >= 2")
        self.x = np.linspace(math.log(lo), math.log(hi), grid)
        self.dx = float(self.x[1] - self.x[0])
        # clip so that exp(log hi) rounding past hi cannot fall off the support
        self._h = np.asarray(signal.evaluate(np.clip(np.exp(self.x), lo, hi)), dtype=float)
        self._running = [0.0]

    def _extend(self, s: int) -> None:
        h = self._h
        for shift in range(len(self._running), s + 1):
            self._running.append(max(self._running[-1], float(np.max(np.abs(h[shift:] - h[:-shift])))))

    def __call__(self, varsigma: float) -> float:
        if not varsigma > 0:
            raise ValueError("varsigma must be positive")
        s = min(int(math.floor(varsigma / self.dx * (1 + 1e-12))), self._h.size - 1)
        self._extend(s)
        return self._running[s]


def log_modulus(signal: Signal, varsigma: float, grid: int = 4096,
                interval: tuple[float, float] | None = None) -> float:
    """sup |h(s) - h(t)| over grid pairs with |log s - log t| <= varsigma."""
    return LogModulus(signal, interval, grid)(varsigma)


@dataclass(frozen=True)
class RateBound:
    value: float
    varsigma: float
    divergent: bool = False
    modulus: float = math.nan


def _moment_value(m) -> tuple[float, bool]:
    if isinstance(m, MomentReport):
        return m.value, not m.finite
    m = float(m)
    return m, not math.isfinite(m)


def rate_bound_maxproduct(signal: Signal, varsigma: float, m0, m1, M0, M1, floor: float, n: int,
                          interval: tuple[float, float] | None = None, grid: int = 4096,
                          modulus: LogModulus | None = None) -> RateBound:
    """Upper bound on |max-product(h)(z) - h(z)| for a given varsigma.

    omega/floor * m0*M0 + omega/(n*floor*varsigma) * (m0*M1 + m1*M0), with
    omega the logarithmic modulus at varsigma. Moments may be numbers or
    ``MomentReport`` objects; any divergent moment yields a flagged, infinite
    bound.
    """
    if not varsigma > 0:
        raise ValueError("varsigma must be positive")
    vals = [_moment_value(m) for m in (m0, m1, M0, M1)]
    if any(div for _, div in vals):
        return RateBound(math.inf, varsigma, True)
    (m0, _), (m1, _), (M0, _), (M1, _) = vals
    if not floor > 0:
        raise ValueError("floor must be positive")
    mod = modulus if modulus is not None else LogModulus(signal, interval, grid)
    w = mod(varsigma)
    value = w / floor * m0 * M0 + w / (n * floor * varsigma) * (m0 * M1 + m1 * M0)
    return RateBound(value, varsigma, False, w)


def best_rate_bound(signal: Signal, phi: KernelPhi, psi: KernelPsi, n: int,
                    interval: tuple[float, float] | None = None, grid: int = 4096) -> RateBound:
    """The max-product bound minimised over varsigma in [1/n, 1] (bounded scalar search)."""
    m0, m1 = discrete_abs_moment(phi, 0), discrete_abs_moment(phi, 1)
    M0, M1 = continuous_moment(psi, 0), continuous_moment(psi, 1)
    floor = phi_floor(phi)
    if not all(m.finite for m in (m0, m1, M0, M1)):
        return RateBound(math.inf, math.nan, True)
    mod = LogModulus(signal, interval, grid)

    def bound(s):
        return rate_bound_maxproduct(signal, s, m0, m1, M0, M1, floor, n, modulus=mod).value

    lo = 1.0 / n
    if lo >= 1.0:
        return rate_bound_maxproduct(signal, 1.0, m0, m1, M0, M1, floor, n, modulus=mod)
    res = minimize_scalar(bound, bounds=(lo, 1.0), method="bounded", options={"xatol": 1e-6})
    best = min((float(res.x), lo, 1.0), key=bound)
    return rate_bound_maxproduct(signal, best, m0, m1, M0, M1, floor, n, modulus=mod)


@dataclass(frozen=True)
class RateEstimate:
    slope: float
    intercept: float
    r_squared: float
    n_values: tuple[int, ...]
    defined: bool = True


def estimate_rate(report: ErrorReport, zero_tol: float = 1e-12) -> RateEstimate:
    """Least-squares slope of log(sup-grid error) against log n.

    Returns an estimate with ``defined=False`` (slope NaN) when any sup error
    is zero up to ``zero_tol`` (round-off level), e.g. for constant signals.
    """
    ns = tuple(report.n_values)
    if len(set(ns)) < 4:
        raise ValueError("rate estimation needs at least four distinct n values")
    sup = report.sup_errors()
    if not np.all(np.isfinite(sup)):
        raise ValueError("report contains failed cells")
    if np.any(sup <= zero_tol):
        return RateEstimate(math.nan, math.nan, math.nan, ns, False)
    fit = linregress(np.log(ns), np.log(sup))
    return RateEstimate(float(fit.slope), float(fit.intercept), float(fit.rvalue ** 2), ns)
