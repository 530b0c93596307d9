"""Independent brute-force references for the operators and sample integrals.

Everything here avoids the package's quadrature: composite Gauss-Legendre on
a grid ten times denser than the default Simpson panels, and a lattice
window of +-50 indices around n log z regardless of the kernel support.
"""

from __future__ import annotations

import math

import numpy as np

GL_NODES, GL_WEIGHTS = np.polynomial.legendre.leggauss(3)
DENSITY = 640  # panels per unit log length (10x the operator default)
WINDOW = 50


def gauss_legendre(g, a, b, cuts=(), density=DENSITY):
    """Composite 3-point Gauss-Legendre of g over [a, b], with ``cuts`` forced as panel edges."""
    if not b > a:
        return 0.0
    edges = [a, *sorted(c for c in set(cuts) if a < c < b), b]
    total = 0.0
    for lo, hi in zip(edges[:-1], edges[1:]):
        m = max(1, math.ceil((hi - lo) * density))
        e = np.linspace(lo, hi, m + 1)
        mid, half = 0.5 * (e[1:] + e[:-1]), 0.5 * (e[1:] - e[:-1])
        x = (mid[:, None] + half[:, None] * GL_NODES[None, :]).ravel()
        w = (half[:, None] * GL_WEIGHTS[None, :]).ravel()
        total += float(w @ g(x))
    return total


def _window(signal, domain):
    lo, hi = signal.support
    if domain is not None:
        lo, hi = max(lo, domain[0]), min(hi, domain[1])
    return lo, hi


def coefficient(psi, signal, n, k, domain=None):
    """n * int psi(u^n e^-k) h(u) du/u over a compact u-window."""
    lo, hi = _window(signal, domain)
    xlo = n * math.log(lo) - k if lo > 0 else -math.inf
    xhi = n * math.log(hi) - k if math.isfinite(hi) else math.inf
    if psi.log_support is not None:
        xlo, xhi = max(xlo, psi.log_support[0]), min(xhi, psi.log_support[1])
    if not (math.isfinite(xlo) and math.isfinite(xhi)):
        raise ValueError("oracle needs a compact integration window")
    cuts = [n * math.log(p) - k for p in signal.breakpoints] + list(psi.knots)

    def g(x):
        u = np.exp((x + k) / n)
        return psi.profile(x) * np.asarray(signal.evaluate(u), dtype=float)

    return gauss_legendre(g, xlo, xhi, cuts)


class BruteForce:
    """Operator values from a wide index window and dense Gauss-Legendre sample integrals.

    Coefficients are memoised per (signal name, n, k) since windows of nearby
    z overlap.
    """

    def __init__(self, phi, psi, domain=None):
        self.phi, self.psi, self.domain = phi, psi, domain
        self._memo = {}

    def c(self, signal, n, k):
        key = (id(signal), n, k)
        if key not in self._memo:
            self._memo[key] = coefficient(self.psi, signal, n, k, self.domain)
        return self._memo[key]

    def _lattice(self, signal, one, z, n):
        centre = n * math.log(z)
        ks = np.arange(math.floor(centre) - WINDOW, math.ceil(centre) + WINDOW + 1)
        w = np.asarray(self.phi.profile(centre - ks), dtype=float)
        ch = np.array([self.c(signal, n, int(k)) for k in ks])
        c1 = np.array([self.c(one, n, int(k)) for k in ks])
        return ks, w, ch, c1

    def max_product(self, signal, one, z, n):
        _, w, ch, c1 = self._lattice(signal, one, z, n)
        return max(0.0, float(np.max(w * ch))) / max(0.0, float(np.max(w * c1)))

    def max_min(self, signal, one, z, n):
        _, w, ch, c1 = self._lattice(signal, one, z, n)
        den = max(0.0, float(np.max(w * c1)))
        return max(0.0, float(np.max(np.minimum(ch, w / den))))

    def linear(self, signal, one, z, n):
        _, w, ch, _ = self._lattice(signal, one, z, n)
        return float(np.sum(w * ch))

    def kantorovich(self, signal, z, n):
        centre = n * math.log(z)
        ks = np.arange(math.floor(centre) - WINDOW, math.ceil(centre) + WINDOW + 1)
        lo, hi = _window(signal, self.domain)
        total = 0.0
        for k in ks:
            a = max(0.0, n * math.log(lo) - k) if lo > 0 else 0.0
            b = min(1.0, n * math.log(hi) - k) if math.isfinite(hi) else 1.0
            if not b > a:
                continue
            cuts = [n * math.log(p) - k for p in signal.breakpoints]
            cell = gauss_legendre(lambda x: np.asarray(signal.evaluate(np.exp((x + k) / n)), dtype=float),
                                  a, b, cuts)
            total += float(self.phi.profile(centre - k)) * cell
        return total


def bspline_sum(order, x):
    """The defining truncated-power sum of the B-spline, term by term in exact-ish float."""
    total = 0.0
    for k in range(order + 1):
        y = order / 2 + x - k
        if y > 0:
            total += (-1) ** k * math.comb(order, k) * y ** (order - 1)
    return total / math.factorial(order - 1)


def lattice_sup_grid(phi, d_grid, weight, radius=60):
    """max_k weight(phi(e^{d-k}), d-k) for each d, scanning |k| <= radius."""
    best = np.full(len(d_grid), -np.inf)
    for k in range(-radius, radius + 1):
        x = d_grid - k
        best = np.maximum(best, weight(phi.profile(x), x))
    return best
