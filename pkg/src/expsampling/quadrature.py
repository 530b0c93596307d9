"""
Integration against the Haar measure dt/t on (0, inf).

Every integral is taken in the log variable x = log t, where dt/t becomes dx,
using composite Simpson panels on [-T, T]. Tails beyond T are either bounded
(``tail`` callables) or, for kernels exposing an exact antiderivative, closed
by product integration over geometrically growing cells.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import TYPE_CHECKING, Callable, Iterable, Sequence

import numpy as np

if TYPE_CHECKING:
    from .kernels import Kernel
    from .signals import Signal

__all__ = [
    "QuadratureSpec",
    "QuadResult",
    "integrate_log",
    "integrate_mellin",
    "durrmeyer_coefficient",
    "kantorovich_coefficient",
]


@dataclass(frozen=True)
class QuadratureSpec:
    """Composite-rule configuration in the log domain.

    Parameters
    ----------
    truncation_radius : float
        Radius T of the explicitly integrated window [-T, T] (log units).
        Kernels with an exact antiderivative get their tails beyond T closed
        analytically, so T only trades speed for closure accuracy.
    panels : int
        Simpson panels per unit of log-domain length. Must be even so that
        panel edges line up with the period-2 oscillation of the Fejer kernel.
    rule : str
        Base rule identifier; only ``"simpson"`` is implemented.
    abs_tol : float
        Tolerance against which results are flagged.
    """

    truncation_radius: float = 256.0
    panels: int = 64
    rule: str = "simpson"
    abs_tol: float = 1e-9

    def __post_init__(self):
        if not self.truncation_radius > 0:
            raise ValueError("truncation_radius must be positive")
        if self.panels < 1 or self.panels % 2:
            raise ValueError("panels must be a positive even integer")
        if not self.abs_tol > 0:
            raise ValueError("abs_tol must be positive")
        if self.rule != "simpson":
            raise ValueError(f"unknown quadrature rule {self.rule!r}")

    @classmethod
    def for_kernel(cls, kernel: Kernel, abs_tol: float = 1e-9, cap: float = 1e4, **kwargs) -> QuadratureSpec:
        """Smallest truncation radius whose tail bound is below ``abs_tol``, capped at ``cap``."""
        bound = getattr(kernel, "tail_bound", None)
        if bound is None:
            return cls(truncation_radius=cap, abs_tol=abs_tol, **kwargs)
        T = 1.0
        while T < cap and bound(T) > abs_tol:
            T *= 2.0
        if T >= cap:
            return cls(truncation_radius=cap, abs_tol=abs_tol, **kwargs)
        lo = T / 2.0
        for _ in range(60):
            mid = 0.5 * (lo + T)
            if bound(mid) > abs_tol:
                lo = mid
            else:
                T = mid
        return cls(truncation_radius=T, abs_tol=abs_tol, **kwargs)


@dataclass(frozen=True)
class QuadResult:
    value: float
    est_error: float
    evaluations: int
    within_tol: bool = True

    def __float__(self):
        return float(self.value)


def _simpson_nodes(cuts: Sequence[float], panels: int):
    """Nodes and weights of composite Simpson over consecutive cut intervals.

    Returns sample points, fine weights, the weights of the half-resolution
    rule on the same nodes (zero at odd nodes) used for the Richardson error
    estimate, and per-node nudge lengths. The two end nodes of every cut
    interval are sampled a hair inside it, so a jump sitting on a cut
    contributes its one-sided limits instead of one shared value; the nudge
    times the sampled value bounds what that shift costs.
    """
    xs, ws, wcs, nds = [], [], [], []
    for a, b in zip(cuts[:-1], cuts[1:]):
        if not b > a:
            continue
        m = max(4, 4 * math.ceil((b - a) * panels / 4))
        x = np.linspace(a, b, m + 1)
        h = (b - a) / m
        w = np.full(m + 1, 2.0)
        w[1::2] = 4.0
        w[0] = w[-1] = 1.0
        wc = np.zeros(m + 1)
        wc[::2] = 2.0
        wc[2::4] = 4.0
        wc[0] = wc[-1] = 1.0
        nudge = min(1e-6 * h, 1e-11 * max(1.0, abs(a), abs(b)))
        x[0] += nudge
        x[-1] -= nudge
        nd = np.zeros(m + 1)
        nd[0] = nd[-1] = nudge
        nds.append(nd)
        xs.append(x)
        ws.append(w * (h / 3.0))
        wcs.append(wc * (2.0 * h / 3.0))
    if not xs:
        empty = np.zeros(0)
        return empty, empty, empty, empty
    return np.concatenate(xs), np.concatenate(ws), np.concatenate(wcs), np.concatenate(nds)


def _cut_list(a: float, b: float, breakpoints: Iterable[float]) -> list[float]:
    inner = sorted({float(p) for p in breakpoints if a < p < b})
    return [a, *inner, b]


def integrate_log(g: Callable[[np.ndarray], np.ndarray], a: float, b: float, panels: int = 64,
                  breakpoints: Iterable[float] = ()) -> QuadResult:
    """Composite Simpson for a log-domain integrand ``g(x)`` over the finite interval [a, b]."""
    if not (math.isfinite(a) and math.isfinite(b)):
        raise ValueError("integrate_log needs finite limits")
    if b <= a:
        return QuadResult(0.0, 0.0, 0)
    x, w, wc, nudges = _simpson_nodes(_cut_list(a, b, breakpoints), panels)
    with np.errstate(over="ignore", invalid="ignore"):
        y = np.asarray(g(x), dtype=float)
    bad = ~np.isfinite(y)
    if bad.any():
        x0 = float(x[np.argmax(bad)])
        raise ValueError(f"non-finite integrand sample at x={x0!r} (t=e^x={math.exp(x0) if x0 < 700 else math.inf!r})")
    fine = float(w @ y)
    coarse = float(wc @ y)
    return QuadResult(fine, abs(fine - coarse) / 15.0 + float(nudges @ np.abs(y)), int(x.size))


def integrate_mellin(f: Callable[[np.ndarray], np.ndarray], spec: QuadratureSpec = QuadratureSpec(),
                     tail: Callable[[float], float] | None = None,
                     breakpoints: Iterable[float] = ()) -> QuadResult:
    """Integral of ``f(t) dt/t`` over [e^-T, e^T], computed as the integral of f(e^x) over [-T, T].

    ``breakpoints`` are log-domain points where f is not smooth. When ``tail``
    is given, ``tail(T)`` is added to the reported error estimate. Beyond
    T of about 700, e^-T underflows; integrate the log-domain profile with
    ``integrate_log`` instead.
    """
    T = spec.truncation_radius
    res = integrate_log(lambda x: f(np.exp(x)), -T, T, spec.panels, breakpoints)
    err = res.est_error + (float(tail(T)) if tail is not None else 0.0)
    return QuadResult(res.value, err, res.evaluations, err <= spec.abs_tol)


def _geometric_edges(start: float, stop: float, ratio: float, far: float) -> np.ndarray:
    """Cell edges from ``start`` out to ``stop`` (both >= 0), growing by ``ratio``."""
    edges = [start]
    e = start
    limit = min(stop, far)
    while e < limit:
        e = min(max(e * ratio, e + 2.0), limit)
        edges.append(e)
    return np.asarray(edges)


def _tail_closure(kernel: Kernel, h_of_x, start: float, stop: float, sign: float,
                  h_sup: float, ratio: float = 1.25, far: float = 1e12) -> tuple[float, float, int]:
    """Product integration of profile(x) * h(x) on the tail sign*[start, stop].

    The kernel mass of each cell is exact (via the antiderivative); h enters
    through the trapezoid average of its edge values. Returns value, error
    bound and number of h evaluations.
    """
    edges = _geometric_edges(start, stop, ratio, far)
    xs = sign * edges
    hv = np.asarray(h_of_x(xs), dtype=float)
    lo, hi = (xs[:-1], xs[1:]) if sign > 0 else (xs[1:], xs[:-1])
    masses = kernel.mass(lo, hi)
    value = float(np.sum(masses * 0.5 * (hv[:-1] + hv[1:])))
    err = float(np.sum(np.abs(masses) * 0.5 * np.abs(hv[1:] - hv[:-1])))
    if stop > edges[-1]:
        a, b = (edges[-1], stop) if sign > 0 else (-stop, -edges[-1])
        rest = float(kernel.mass(a, b))
        value += rest * float(hv[-1])
        err += abs(rest) * 2.0 * h_sup
    return value, err, int(xs.size)


def _signal_window(signal: Signal, domain: tuple[float, float] | None) -> tuple[float, float]:
    lo, hi = signal.support
    if domain is not None:
        lo, hi = max(lo, domain[0]), min(hi, domain[1])
    return lo, hi


def _log(u: float) -> float:
    if u <= 0:
        return -math.inf
    return math.log(u) if math.isfinite(u) else math.inf


def durrmeyer_coefficient(psi: Kernel, signal: Signal, n: int, k: int,
                          spec: QuadratureSpec = QuadratureSpec(),
                          domain: tuple[float, float] | None = None) -> QuadResult:
    """Sample functional n * int_0^inf psi(u^n e^-k) h(u) du/u.

    With x = n log u - k this is the integral over x of psi(e^x) h(e^{(x+k)/n}),
    restricted to the signal support (and to ``domain`` if given). Signal
    breakpoints and kernel knots become panel edges; tails beyond the
    truncation radius are closed analytically when the kernel allows it.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    lo, hi = _signal_window(signal, domain)
    if not hi > lo:
        return QuadResult(0.0, 0.0, 0)
    xlo, xhi = n * _log(lo) - k, n * _log(hi) - k
    if psi.log_support is not None:
        xlo, xhi = max(xlo, psi.log_support[0]), min(xhi, psi.log_support[1])
    if not xhi > xlo:
        return QuadResult(0.0, 0.0, 0)

    def h_of_x(x):
        return signal.log_evaluate((np.asarray(x, dtype=float) + k) / n, window=(lo, hi))

    bps = [n * _log(b) - k for b in signal.breakpoints if lo < b < hi]
    bps += list(psi.knots)
    T = spec.truncation_radius
    inner = [p for p in bps if xlo < p < xhi]
    a = max(xlo, min([-T, *inner]))
    b = min(xhi, max([T, *inner]))

    res = integrate_log(lambda x: psi.profile(x) * h_of_x(x), a, b, spec.panels, inner)
    value, err, evals = res.value, res.est_error, res.evaluations
    h_sup = max(abs(signal.range_bounds[0]), abs(signal.range_bounds[1]))
    for start, stop, sign in ((b, xhi, 1.0), (-a, -xlo, -1.0)):
        if not stop > start:
            continue
        if psi.antiderivative is not None:
            v, e, m = _tail_closure(psi, h_of_x, start, stop, sign, h_sup)
            value, err, evals = value + v, err + e, evals + m
        else:
            err += psi.tail_bound(start) * h_sup
    return QuadResult(value, err, evals, err <= spec.abs_tol)


def kantorovich_coefficient(signal: Signal, n: int, k: int, spec: QuadratureSpec = QuadratureSpec(),
                            domain: tuple[float, float] | None = None) -> QuadResult:
    """Cell average n * int_{k/n}^{(k+1)/n} h(e^v) dv, integrated in x = n v - k over [0, 1]."""
    lo, hi = _signal_window(signal, domain)
    if not hi > lo:
        return QuadResult(0.0, 0.0, 0)
    a = max(0.0, n * _log(lo) - k)
    b = min(1.0, n * _log(hi) - k)
    if not b > a:
        return QuadResult(0.0, 0.0, 0)
    bps = [n * _log(p) - k for p in signal.breakpoints if lo < p < hi]
    res = integrate_log(lambda x: signal.log_evaluate((x + k) / n, window=(lo, hi)), a, b, spec.panels, bps)
    return QuadResult(res.value, res.est_error, res.evaluations, res.est_error <= spec.abs_tol)
