"""
Mellin-type kernels and their moments.

Kernels are stored through their log-domain profile x -> K(e^x). Two roles
exist: ``KernelPhi`` weights the lattice samples z^n e^-k and needs a declared
log-support or a decay envelope; ``KernelPsi`` is integrated against dt/t and
carries a tail bound on its mass outside [-T, T].
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field, fields, replace
from typing import Callable

import numpy as np
from scipy.special import sici

from .quadrature import integrate_log

__all__ = [
    "Kernel",
    "KernelPhi",
    "KernelPsi",
    "MomentReport",
    "ConditionResult",
    "ValidationReport",
    "mellin_bspline",
    "mellin_fejer",
    "as_phi",
    "as_psi",
    "discrete_abs_moment",
    "continuous_moment",
    "phi_floor",
    "validate_kernel_pair",
    "parse_kernel",
    "KERNEL_FAMILIES",
]

DEFAULT_GRID = 10_001


@dataclass(frozen=True, eq=False)
class Kernel:
    """A real kernel on (0, inf) represented by its log-domain profile.

    Attributes
    ----------
    name : str
    profile : callable
        Vectorised map x -> K(e^x).
    log_support : (float, float) or None
        Closed interval outside which the profile is exactly zero.
    antiderivative : callable or None
        Exact x -> int_{-inf}^x profile, accepting +-inf. Enables analytic
        tail closure and exact cell masses.
    envelope : callable or None
        Nonincreasing bound on |profile(x)| as a function of |x| (for |x| >= 1).
    knots : tuple of float
        Points where the profile is not smooth.
    nonnegative : bool
    """

    name: str
    profile: Callable[[np.ndarray], np.ndarray]
    log_support: tuple[float, float] | None = None
    antiderivative: Callable[[np.ndarray], np.ndarray] | None = None
    envelope: Callable[[float], float] | None = None
    knots: tuple[float, ...] = ()
    nonnegative: bool = False

    def evaluate(self, z):
        z = np.asarray(z, dtype=float)
        if np.any(z <= 0):
            raise ValueError("kernels are defined on (0, inf)")
        out = self.profile(np.log(z))
        return float(out) if out.ndim == 0 else out

    __call__ = evaluate

    def mass(self, a, b):
        """Exact integral of the profile over [a, b] (log domain)."""
        if self.antiderivative is None:
            raise NotImplementedError(f"kernel {self.name} has no antiderivative")
        return self.antiderivative(np.asarray(b, dtype=float)) - self.antiderivative(np.asarray(a, dtype=float))

    def scaled(self, factor: float) -> Kernel:
        """Same kernel multiplied by ``factor``."""
        prof, anti, env = self.profile, self.antiderivative, self.envelope
        changes = dict(
            name=f"{factor:g}*{self.name}",
            profile=lambda x: factor * prof(x),
            antiderivative=None if anti is None else (lambda x: factor * anti(x)),
            envelope=None if env is None else (lambda r: abs(factor) * env(r)),
            nonnegative=self.nonnegative and factor >= 0,
        )
        tb = getattr(self, "tail_bound", None)
        if tb is not None:
            changes["tail_bound"] = lambda T: abs(factor) * tb(T)
        return replace(self, **changes)


@dataclass(frozen=True, eq=False)
class KernelPhi(Kernel):
    """Discrete-side kernel; rejected unless its lattice sums can be truncated."""

    def __post_init__(self):
        if self.log_support is None and self.envelope is None:
            raise ValueError(f"kernel {self.name}: needs log_support or a decay envelope")

    def lattice_radius(self, tol: float = 1e-6) -> float:
        """Log radius beyond which |profile| is below ``tol`` (exactly 0 for compact support)."""
        if self.log_support is not None:
            return max(abs(self.log_support[0]), abs(self.log_support[1]))
        R = 1.0
        while self.envelope(R) > tol:
            R *= 2.0
            if R > 1e9:
                raise ValueError(f"kernel {self.name}: envelope does not decay")
        return R


def _support_tail(kernel: Kernel):
    a, b = kernel.log_support
    top = max(abs(a), abs(b))
    if kernel.antiderivative is not None and kernel.nonnegative:
        def bound(T):
            if T >= top:
                return 0.0
            return float(kernel.mass(-np.inf, -T) + kernel.mass(T, np.inf))
        return bound
    x = np.linspace(a, b, 4001)
    peak = float(np.max(np.abs(kernel.profile(x))))
    return lambda T: 0.0 if T >= top else peak * (max(0.0, -T - a) + max(0.0, b - T))


@dataclass(frozen=True, eq=False)
class KernelPsi(Kernel):
    """Integral-side kernel with a bound on its absolute mass outside [-T, T]."""

    tail_bound: Callable[[float], float] | None = field(default=None)

    def __post_init__(self):
        if self.tail_bound is None:
            if self.log_support is None:
                raise ValueError(f"kernel {self.name}: needs log_support or a tail bound")
            object.__setattr__(self, "tail_bound", _support_tail(self))


def as_phi(kernel: Kernel) -> KernelPhi:
    if isinstance(kernel, KernelPhi):
        return kernel
    return KernelPhi(**{f.name: getattr(kernel, f.name) for f in fields(Kernel)})


def as_psi(kernel: Kernel, tail_bound=None) -> KernelPsi:
    if isinstance(kernel, KernelPsi) and tail_bound is None:
        return kernel
    return KernelPsi(**{f.name: getattr(kernel, f.name) for f in fields(Kernel)},
                     tail_bound=tail_bound if tail_bound is not None else getattr(kernel, "tail_bound", None))


# ---------------------------------------------------------------------------
# kernel families

def _truncated_power_sum(x, order: int, power: int, scale: float):
    x = np.asarray(x, dtype=float)
    half = order / 2.0
    xc = np.clip(x, -half, half)
    out = np.zeros_like(xc)
    for k in range(order + 1):
        y = half + xc - k
        if power == 0:
            term = (y >= 0).astype(float)
        else:
            term = np.where(y > 0, y, 0.0) ** power
        out += (-1) ** k * math.comb(order, k) * term
    return out * scale, x, half


def mellin_bspline(order: int) -> KernelPhi:
    """Mellin B-spline of the given order, supported on log z in [-order/2, order/2]."""
    if int(order) != order or order < 1:
        raise ValueError("B-spline order must be a positive integer")
    order = int(order)
    half = order / 2.0

    def profile(x):
        vals, x, _ = _truncated_power_sum(x, order, order - 1, 1.0 / math.factorial(order - 1))
        return np.where((x >= -half) & (x <= half), vals, 0.0) if order > 1 else \
            np.where((x >= -half) & (x < half), 1.0, 0.0)

    def antiderivative(x):
        vals, x, _ = _truncated_power_sum(x, order, order, 1.0 / math.factorial(order))
        return np.where(x >= half, 1.0, np.where(x <= -half, 0.0, vals))

    return KernelPhi(
        name=f"bspline:{order}",
        profile=profile,
        log_support=(-half, half),
        antiderivative=antiderivative,
        knots=tuple(-half + j for j in range(order + 1)),
        nonnegative=True,
    )


def mellin_fejer(beta: float, t_param: float = 0.0) -> KernelPsi:
    """Mellin-Fejer kernel (beta / (2 pi z^t)) * sinc(beta log(sqrt z) / pi)^2, with normalised sinc.

    For t_param = 0 the kernel is even in log z, has unit Mellin integral and
    an exact antiderivative through the sine integral. For t_param != 0 the
    factor z^-t makes one tail non-integrable, so the tail bound is infinite.
    """
    if not beta >= 1:
        raise ValueError("beta must be >= 1")
    beta, t_param = float(beta), float(t_param)
    c = beta / (2.0 * math.pi)

    def profile(x):
        x = np.asarray(x, dtype=float)
        with np.errstate(over="ignore"):
            weight = np.exp(-t_param * x) if t_param else 1.0
        return c * weight * np.sinc(beta * x / (2.0 * math.pi)) ** 2

    name = f"fejer:{beta:g}:{t_param:g}"
    if t_param:
        return KernelPsi(name=name, profile=profile, tail_bound=lambda T: math.inf, nonnegative=True)

    def antiderivative(x):
        x = np.asarray(x, dtype=float)
        si = sici(beta * x)[0]
        xs = np.where(np.isfinite(x) & (x != 0), x, 1.0)
        ratio = np.where(np.isfinite(x) & (x != 0), np.sin(beta * xs / 2.0) ** 2 / xs, 0.0)
        return 0.5 + si / math.pi - 2.0 * ratio / (math.pi * beta)

    return KernelPsi(
        name=name,
        profile=profile,
        antiderivative=antiderivative,
        envelope=lambda r: 2.0 / (math.pi * beta * r * r) if r > 0 else c,
        nonnegative=True,
        # |sin| <= 1 gives profile <= 2 / (pi beta x^2); integrate both tails
        tail_bound=lambda T: 4.0 / (math.pi * beta * T),
    )


# ---------------------------------------------------------------------------
# moments

@dataclass(frozen=True)
class MomentReport:
    order: int
    value: float
    divergent: bool = False
    method: str = ""

    @property
    def finite(self) -> bool:
        return not self.divergent and math.isfinite(self.value)


def _lattice_reduce(phi: KernelPhi, grid: int, radius: float, weight, reduce_over_d):
    """Reduce the lattice sup over k of weight(profile, x) for x = d - k, d in [0, 1]."""
    d = np.linspace(0.0, 1.0, grid)
    if phi.log_support is not None:
        a, b = phi.log_support
        ks = range(math.floor(-b) - 1, math.ceil(1 - a) + 2)
    else:
        R = math.ceil(radius)
        ks = range(-R - 1, R + 2)
    best = np.full(grid, -np.inf)
    for k in ks:
        x = d - k
        np.maximum(best, weight(phi.profile(x), x), out=best)
    return reduce_over_d(best)


def discrete_abs_moment(phi: KernelPhi, r: int, grid: int = DEFAULT_GRID, radius: float = 32.0,
                        doublings: int = 3, ceiling: float = 1e6, growth_tol: float = 1e-3) -> MomentReport:
    """Discrete absolute moment sup_z max_k |phi(z e^-k)| |log z - k|^r.

    The lattice {log z - k} is invariant under integer shifts of log z, so the
    sup over z > 0 is taken over log z in [0, 1]. The grid is refined once
    (doubled) and the finer value reported. Kernels without compact support
    are scanned over radii ``radius * 2**j``; steady growth (or exceeding
    ``ceiling``) is reported as divergence.
    """
    if grid < 2:
        raise ValueError("grid must be >= 2")
    if r < 0:
        raise ValueError("order must be nonnegative")

    def weight(vals, x):
        return np.abs(vals) * np.abs(x) ** r

    def sup_at(g, R):
        return float(_lattice_reduce(phi, g, R, weight, np.max))

    if phi.log_support is not None:
        coarse, fine = sup_at(grid, 0), sup_at(2 * grid - 1, 0)
        return MomentReport(r, fine, False,
                            f"log-period grid {2 * grid - 1} pts, compact support, refinement delta {abs(fine - coarse):.2e}")

    radii = [radius * 2 ** j for j in range(doublings + 1)]
    sups = [sup_at(grid, R) for R in radii]
    growth = [(s1 - s0) / max(s0, 1e-300) for s0, s1 in zip(sups[:-1], sups[1:])]
    if sups[-1] > ceiling or (len(growth) >= 2 and min(growth[-2:]) > growth_tol):
        return MomentReport(r, math.inf, True,
                            f"lattice sup grows with radius: {', '.join(f'{R:g}->{s:.4g}' for R, s in zip(radii, sups))}")
    fine = sup_at(2 * grid - 1, radii[-1])
    return MomentReport(r, fine, False,
                        f"log-period grid {2 * grid - 1} pts, radius {radii[-1]:g}, refinement delta {abs(fine - sups[-1]):.2e}")


def continuous_moment(psi: KernelPsi, r: int, absolute: bool = True, tol: float = 1e-9,
                      panels: int = 64, base_radius: float = 64.0, doublings: int = 4) -> MomentReport:
    """Continuous moment int psi(t) (log t)^r dt/t, or its absolute version.

    Compactly supported kernels are integrated exactly over the support.
    Otherwise partial integrals over [-T, T] are taken for T doubling from
    ``base_radius``. If their increments stop contracting the moment is
    flagged divergent; otherwise the order-0 moment is completed with the
    exact tail mass when the kernel provides one.
    """
    if not tol > 0:
        raise ValueError("tol must be positive")
    if r < 0:
        raise ValueError("order must be nonnegative")

    if absolute:
        def g(x):
            return np.abs(psi.profile(x)) * np.abs(x) ** r
    else:
        def g(x):
            return psi.profile(x) * x ** r
    kind = "absolute" if absolute else "algebraic"

    if psi.log_support is not None:
        a, b = psi.log_support
        res = integrate_log(g, a, b, panels, psi.knots)
        return MomentReport(r, res.value if not absolute else abs(res.value), False,
                            f"{kind}, compact support [{a:g}, {b:g}], rule error {res.est_error:.1e}")

    radii = [base_radius * 2 ** j for j in range(doublings + 1)]
    partial = [integrate_log(g, -T, T, panels, psi.knots).value for T in radii]
    if not all(math.isfinite(p) for p in partial):
        return MomentReport(r, math.inf, True, f"{kind}, non-finite partial integral")
    inc = [abs(p1 - p0) for p0, p1 in zip(partial[:-1], partial[1:])]
    if inc[-1] > tol and inc[-1] > 0.75 * inc[-2]:
        return MomentReport(r, math.inf, True,
                            f"{kind}, partial integrals keep growing under doubling T: "
                            + ", ".join(f"T={T:g}:{p:.6g}" for T, p in zip(radii, partial)))
    value = partial[-1]
    T = radii[-1]
    note = f"{kind}, T={T:g}, last increment {inc[-1]:.1e}"
    if r == 0 and psi.antiderivative is not None and (not absolute or psi.nonnegative):
        value += float(psi.mass(-np.inf, -T) + psi.mass(T, np.inf))
        note += ", exact tail mass added"
    elif psi.tail_bound is not None and r == 0:
        note += f", tail bound {psi.tail_bound(T):.1e}"
    return MomentReport(r, abs(value) if absolute else value, False, note)


def phi_floor(phi: KernelPhi, grid: int = DEFAULT_GRID, threshold: float = 1e-12) -> float:
    """Positive floor of the lattice sup: inf over log z in [0, 1] of max_k phi(z e^-k).

    Emits a ``RuntimeWarning`` and returns 0.0 when the infimum falls below
    ``threshold``.
    """
    if grid < 2:
        raise ValueError("grid must be >= 2")
    radius = phi.lattice_radius()

    def weight(vals, x):
        return vals

    value = min(float(_lattice_reduce(phi, g, radius, weight, np.min)) for g in (grid, 2 * grid - 1))
    if value <= threshold:
        warnings.warn(f"lattice floor of {phi.name} is not positive ({value:.3g})", RuntimeWarning, stacklevel=2)
        return 0.0
    return value


# ---------------------------------------------------------------------------
# admissibility

@dataclass(frozen=True)
class ConditionResult:
    name: str
    passed: bool
    value: float
    detail: str = ""


@dataclass(frozen=True)
class ValidationReport:
    phi: str
    psi: str
    conditions: tuple[ConditionResult, ...]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.conditions)

    def __getitem__(self, name: str) -> ConditionResult:
        for c in self.conditions:
            if c.name == name:
                return c
        raise KeyError(name)

    def lines(self) -> list[str]:
        out = [f"phi={self.phi} psi={self.psi}"]
        for c in self.conditions:
            out.append(f"  [{'PASS' if c.passed else 'FAIL'}] {c.name}: {c.value:.10g}  {c.detail}".rstrip())
        return out


def validate_kernel_pair(phi: KernelPhi, psi: KernelPsi, tol: float = 1e-8, order: int = 2) -> ValidationReport:
    """Check the four admissibility conditions for a (phi, psi) pair.

    (a) discrete absolute moment of phi of the given order is finite,
    (b) the lattice floor of phi is positive,
    (c) psi has unit Mellin integral within ``tol``,
    (d) psi is absolutely integrable against dt/t.
    """
    m = discrete_abs_moment(phi, order)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        floor = phi_floor(phi)
    unit = continuous_moment(psi, 0, absolute=False)
    m0 = continuous_moment(psi, 0, absolute=True)
    conds = (
        ConditionResult(f"phi_moment_m{order}", m.finite, m.value, m.method),
        ConditionResult("phi_floor", floor > 0, floor),
        ConditionResult("psi_unit_integral", unit.finite and abs(unit.value - 1.0) <= tol, unit.value, unit.method),
        ConditionResult("psi_abs_integrable", m0.finite, m0.value, m0.method),
    )
    return ValidationReport(phi.name, psi.name, conds)


# ---------------------------------------------------------------------------
# identifiers: bspline:<order>, fejer:<beta>:<t> (beta may be "pi")

def _number(text: str) -> float:
    text = text.strip().lower()
    if text in ("pi", "+pi"):
        return math.pi
    if text == "-pi":
        return -math.pi
    return float(text)


def _bspline_from(args: list[str]) -> Kernel:
    if len(args) != 1:
        raise ValueError("expected bspline:<order>")
    return mellin_bspline(int(args[0]))


def _fejer_from(args: list[str]) -> Kernel:
    if len(args) not in (1, 2):
        raise ValueError("expected fejer:<beta>:<t>")
    return mellin_fejer(_number(args[0]), _number(args[1]) if len(args) == 2 else 0.0)


KERNEL_FAMILIES: dict[str, Callable[[list[str]], Kernel]] = {
    "bspline": _bspline_from,
    "fejer": _fejer_from,
}


def parse_kernel(identifier: str, role: str = "phi") -> Kernel:
    """Build a kernel from its identifier, cast to the requested role ('phi' or 'psi')."""
    family, *args = identifier.strip().split(":")
    if family not in KERNEL_FAMILIES:
        raise ValueError(f"unknown kernel family {family!r} in {identifier!r}")
    try:
        kernel = KERNEL_FAMILIES[family](args)
    except (TypeError, ValueError) as exc:
        raise ValueError(f"bad kernel identifier {identifier!r}: {exc}") from None
    if role == "phi":
        return as_phi(kernel)
    if role == "psi":
        return as_psi(kernel)
    raise ValueError(f"unknown kernel role {role!r}")
