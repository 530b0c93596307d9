"""
Signals on (0, inf): a vectorised function, a closed support interval outside
of which the signal is 0, declared value bounds on the support, and the
points where it may fail to be smooth (used as quadrature panel edges).
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Callable

import numpy as np

__all__ = ["Signal", "constant", "F", "G", "BUILTINS", "from_csv", "parse_signal", "jumps"]


@dataclass(frozen=True, eq=False)
class Signal:
    name: str
    func: Callable[[np.ndarray], np.ndarray]
    support: tuple[float, float] = (0.0, math.inf)
    range_bounds: tuple[float, float] = (0.0, 1.0)
    breakpoints: tuple[float, ...] = ()

    def __post_init__(self):
        lo, hi = self.support
        if not (0 <= lo < hi):
            raise ValueError(f"signal {self.name}: support must satisfy 0 <= lo < hi, got {self.support}")
        if self.range_bounds[0] > self.range_bounds[1]:
            raise ValueError(f"signal {self.name}: empty range bounds")

    def evaluate(self, u):
        """Signal values at u > 0; zero outside the support."""
        u = np.asarray(u, dtype=float)
        lo, hi = self.support
        inside = (u >= lo) & (u <= hi)
        out = np.zeros(u.shape)
        if np.any(inside):
            out[inside] = self.func(u[inside])
        return float(out) if out.ndim == 0 else out

    __call__ = evaluate

    def log_evaluate(self, y, window: tuple[float, float] | None = None):
        """Values at u = e^y, zero outside the support (further cut to ``window`` if given).

        The exponential is only taken at points inside the window.
        """
        y = np.asarray(y, dtype=float)
        lo, hi = window if window is not None else self.support
        lo, hi = max(lo, self.support[0]), min(hi, self.support[1])
        ylo = math.log(lo) if lo > 0 else -math.inf
        yhi = math.log(hi) if math.isfinite(hi) else math.inf
        inside = (y >= ylo) & (y <= yhi)
        out = np.zeros(y.shape)
        if np.any(inside):
            with np.errstate(over="ignore"):
                out[inside] = self.func(np.exp(y[inside]))
        return out

    @property
    def is_fuzzy(self) -> bool:
        """True when the declared values lie in [0, 1] (required by the max-min operator)."""
        return self.range_bounds[0] >= 0.0 and self.range_bounds[1] <= 1.0

    def with_range(self, lo: float, hi: float) -> Signal:
        return replace(self, range_bounds=(lo, hi))

    def _edges(self) -> tuple[float, ...]:
        lo, hi = self.support
        return tuple(p for p in (lo, hi) if 0 < p < math.inf)

    def _combine(self, other: Signal, op, name, bounds) -> Signal:
        a, b = self, other
        return Signal(
            name=name,
            func=lambda u: op(a.evaluate(u), b.evaluate(u)),
            support=(min(a.support[0], b.support[0]), max(a.support[1], b.support[1])),
            range_bounds=bounds,
            breakpoints=tuple(sorted(set(a.breakpoints + b.breakpoints + a._edges() + b._edges()))),
        )

    def _bounds_with_zero(self):
        # outside its own support a summand contributes 0
        lo, hi = self.range_bounds
        return min(lo, 0.0), max(hi, 0.0)

    def __add__(self, other: Signal) -> Signal:
        (a0, a1), (b0, b1) = self._bounds_with_zero(), other._bounds_with_zero()
        return self._combine(other, np.add, f"({self.name}+{other.name})", (a0 + b0, a1 + b1))

    def __sub__(self, other: Signal) -> Signal:
        (a0, a1), (b0, b1) = self._bounds_with_zero(), other._bounds_with_zero()
        return self._combine(other, np.subtract, f"({self.name}-{other.name})", (a0 - b1, a1 - b0))

    def __mul__(self, lam: float) -> Signal:
        lam = float(lam)
        f = self.func
        lo, hi = sorted((lam * self.range_bounds[0], lam * self.range_bounds[1]))
        return replace(self, name=f"{lam:g}*{self.name}", func=lambda u: lam * f(u), range_bounds=(lo, hi))

    __rmul__ = __mul__

    def __abs__(self) -> Signal:
        f = self.func
        lo, hi = self.range_bounds
        top = max(abs(lo), abs(hi))
        bottom = 0.0 if lo <= 0 <= hi else min(abs(lo), abs(hi))
        return replace(self, name=f"|{self.name}|", func=lambda u: np.abs(f(u)), range_bounds=(bottom, top))


def constant(c: float, support: tuple[float, float] = (0.0, math.inf)) -> Signal:
    c = float(c)
    return Signal(f"const:{c:g}", lambda u: np.full(np.shape(u), c), support, (c, c))


def _f(u):
    u = np.asarray(u, dtype=float)
    return np.arctan((np.sin(np.pi * u) + 1.0) / (1.0 + u * u)) / np.arctan(2.0)


def _g(u):
    u = np.asarray(u, dtype=float)
    return np.select(
        [u < 1.1, u < 2.0],
        [0.1 + (0.8 / 9.0) * u * u, 0.9 - 0.4 * np.sin(2.0 * np.pi * (u - 1.1)) ** 2],
        0.3 + 0.7 * (3.0 - u),
    )


#: smooth oscillatory test function on [0, 3], zero-extended
F = Signal("f", _f, support=(0.0, 3.0), range_bounds=(0.0, 1.0))
#: piecewise test function on [0, 3]; as printed it jumps at u = 1.1 and u = 2.0
G = Signal("g", _g, support=(0.0, 3.0), range_bounds=(0.0, 1.0), breakpoints=(1.1, 2.0))

BUILTINS = {"f": F, "g": G}


def from_csv(path: str | Path) -> Signal:
    """Signal from a two-column CSV of ``u,value`` rows.

    Values are linearly interpolated in log u and the signal is zero outside
    the range of the file. A header row is skipped if it does not parse.
    """
    path = Path(path)
    us, vs = [], []
    with path.open(newline="") as fh:
        for row in csv.reader(fh):
            if not row or row[0].lstrip().startswith("#"):
                continue
            try:
                u, v = float(row[0]), float(row[1])
            except (ValueError, IndexError):
                if us:
                    raise ValueError(f"{path}: malformed row {row!r}") from None
                continue
            if u <= 0:
                raise ValueError(f"{path}: sample positions must be positive, got {u}")
            us.append(u)
            vs.append(v)
    if len(us) < 2:
        raise ValueError(f"{path}: need at least two samples")
    order = np.argsort(us)
    xs = np.log(np.asarray(us)[order])
    ys = np.asarray(vs)[order]
    if np.any(np.diff(xs) <= 0):
        raise ValueError(f"{path}: duplicate sample positions")

    def func(u):
        return np.interp(np.log(u), xs, ys)

    nodes = tuple(float(v) for v in np.exp(xs[1:-1])) if xs.size <= 514 else ()
    return Signal(f"file:{path}", func, (float(np.exp(xs[0])), float(np.exp(xs[-1]))),
                  (float(ys.min()), float(ys.max())), nodes)


def parse_signal(text: str) -> Signal:
    """Signal from ``f``, ``g``, ``const:<c>`` or ``file:<path>``."""
    text = text.strip()
    if text in BUILTINS:
        return BUILTINS[text]
    if text.startswith("const:"):
        return constant(float(text.split(":", 1)[1]))
    if text.startswith("file:"):
        return from_csv(text.split(":", 1)[1])
    raise ValueError(f"unknown signal {text!r}")


def jumps(signal: Signal, points, eps: float = 1e-9, tol: float = 1e-6) -> list[tuple[float, float, float]]:
    """(u, left limit, right limit) for each point where the one-sided limits differ by more than ``tol``."""
    out = []
    for p in points:
        left, right = float(signal.evaluate(p - eps)), float(signal.evaluate(p + eps))
        if abs(left - right) > tol:
            out.append((float(p), left, right))
    return out
