"""Riemann-Hilbert observables: the residue matrix Y1(a), the density-like
function u(x), reconstruction of log P by double integration, and the
right-tail closed forms.

Y1(a) is the 1/z coefficient of the solution of the Riemann-Hilbert problem
attached to the two-contour operator.  Its entries carry the derivatives of
the gap probability:

    (Y1)_{11} = P'(a)/P(a),
    d/da (Y1)_{11} = (Y1)_{12}(Y1)_{21} = -u(a),
    log P(a)  = integral_a^inf (x - a) (Y1)_{12}(Y1)_{21} dx.

Y1 is computed from the resolvent formula: solve (I - Q_a)F = f on the
contour union, then Y1 = sum of w_i F(s_i) h(s_i)^T.  Everything here reuses
the Nystrom machinery; no boundary-value problem is solved.
"""

from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import dataclass

import numpy as np

from . import kernels, special
from .contours import (GeometryError, LINE, build_hairpin, deformed_contours,
                       gamma_contour_integral, truncation_radius)
from .fredholm import DiscreteOperator, HalfLineGrid, solve_resolvent

__all__ = [
    "UnderflowWarning",
    "Y1Matrix",
    "UFunction",
    "RhWorkspace",
    "y1_matrix",
    "u_of_x",
    "u_asymptotic",
    "log_u_asymptotic",
    "log_gap_from_u",
    "residue_sum",
    "asym_u1_21",
    "asym_u1_12",
    "asym_u1_12_closed",
    "u_asym_composed",
]

_IM_TOL = 1e-8
_LOG_FLOOR = -700.0


class UnderflowWarning(RuntimeWarning):
    """A magnitude left the representable range; use the log channel."""


@dataclass(frozen=True)
class Y1Matrix:
    """2x2 residue matrix of the Riemann-Hilbert solution at infinity.

    e11 is real (the log-derivative of the gap probability) and the product
    e12*e21 is real; the individual off-diagonal phases are convention-bound
    and not asserted."""

    e11: complex
    e12: complex
    e21: complex
    e22: complex
    a: float
    alpha: float

    @property
    def log_deriv(self) -> float:
        """P'(a)/P(a)."""
        return self.e11.real

    @property
    def u(self) -> float:
        """u(a) = -(Y1)_12 (Y1)_21."""
        return -(self.e12 * self.e21).real


@dataclass(frozen=True)
class UFunction:
    x: float
    u: float
    u_asym: float


class RhWorkspace:
    """Precomputed contour data for Y1 sweeps at fixed alpha.

    The a-dependence of the coupling kernel sits in scalar exponential
    factors: e^{-az} on line rows and e^{+az} on loop columns.  The base
    matrix and base vectors are assembled once at a = 0 and rescaled per
    evaluation point, so a sweep costs one dense solve per point and no
    contour rebuilds.  Valid for evaluation points 0 < a <= x_max (x_max
    sets the oscillation budget of the line grid)."""

    def __init__(self, alpha: float, x_max: float, order: int = 16,
                 refine: float = 1.0):
        if x_max <= 0.0:
            raise ValueError("x_max must be positive")
        self.alpha = float(alpha)
        self.x_max = float(x_max)
        pair = kernels.qa_pair(alpha, a_max=x_max, order=order, refine=refine)
        self.union = pair.union()
        self.q_base = kernels.qa_matrix(self.union, 0.0, alpha)
        self.f_base, self.h_base = kernels.rh_vector_arrays(
            self.union.nodes, self.union.labels, 0.0, alpha)
        self._on_line = self.union.labels == LINE

    def _scales(self, a: float) -> tuple[np.ndarray, np.ndarray]:
        z = self.union.nodes
        row = np.where(self._on_line, np.exp(-a * z), 1.0)
        col = np.where(self._on_line, 1.0, np.exp(a * z))
        return row, col

    def y1(self, a: float) -> Y1Matrix:
        if not 0.0 < a <= self.x_max + 1e-9:
            raise ValueError(f"a={a} outside workspace range (0, {self.x_max}]")
        row, col = self._scales(a)
        q_a = row[:, None] * self.q_base * col[None, :]
        f_a = row[:, None] * self.f_base
        h_a = col[:, None] * self.h_base
        op = DiscreteOperator(q_a, self.union.weights)
        big_f = solve_resolvent(op, f_a)
        y1 = (self.union.weights[:, None] * big_f).T @ h_a
        e11, e12, e21, e22 = y1[0, 0], y1[0, 1], y1[1, 0], y1[1, 1]
        if abs(e11.imag) > _IM_TOL * (1.0 + abs(e11)):
            raise ArithmeticError(f"(Y1)_11 has imaginary residue {e11.imag:.3e}")
        prod = e12 * e21
        if abs(prod.imag) > _IM_TOL * (1.0 + abs(prod)):
            raise ArithmeticError(
                f"(Y1)_12 (Y1)_21 has imaginary residue {prod.imag:.3e}")
        return Y1Matrix(e11, e12, e21, e22, a, self.alpha)


def y1_matrix(a: float, alpha: float, workspace: RhWorkspace | None = None,
              order: int = 16, refine: float = 1.0) -> Y1Matrix:
    """Residue matrix Y1(a) from the resolvent formula."""
    if a <= 0.0:
        raise ValueError(f"need a > 0, got {a}")
    ws = workspace or RhWorkspace(alpha, a, order=order, refine=refine)
    return ws.y1(a)


def u_of_x(x: float, alpha: float, workspace: RhWorkspace | None = None,
           order: int = 16, refine: float = 1.0) -> float:
    """u(x) = -(Y1)_12 (Y1)_21, the integrand of the gap-probability
    double-integral representation."""
    return y1_matrix(x, alpha, workspace, order=order, refine=refine).u


def log_u_asymptotic(x: float, alpha: float) -> float:
    """Log of the right-tail asymptotic of u; never under- or overflows."""
    if x <= 0.0 or alpha <= 0.0:
        raise special.DomainError("x and alpha must be positive")
    t = x / alpha
    lg = special.log_gamma(complex(t)).real
    return (-(x * x + math.log(t) ** 2) / (2.0 * alpha)
            - lg - 0.5 * math.log(2.0 * math.pi * alpha))


def u_asymptotic(x: float, alpha: float) -> float:
    """Right-tail asymptotic exp(-(x^2 + log^2(x/alpha))/(2 alpha)) /
    (Gamma(x/alpha) sqrt(2 pi alpha)); use log_u_asymptotic below 1e-300."""
    lg = log_u_asymptotic(x, alpha)
    return math.exp(lg) if lg > _LOG_FLOOR else 0.0


def log_gap_from_u(a: float, alpha: float, length: float = 30.0,
                   panels: int = 6, order: int = 8,
                   workspace: RhWorkspace | None = None,
                   refine: float = 1.0) -> float:
    """log P(a) reconstructed as -integral_a^(a+length) (x-a) u(x) dx.

    The grid is graded toward a like the half-line determinant grid; u decays
    like exp(-x^2 / 2 alpha), so the tail past (x-a) u < 1e-20 is dropped
    rather than spent on resolvent solves."""
    if a <= 0.0:
        raise ValueError(f"need a > 0, got {a}")
    x_end = truncation_radius(0.5 / alpha, growth=0.0, target=46.0)
    length = min(length, max(5.0, x_end - a))
    ws = workspace or RhWorkspace(alpha, a + length, refine=refine)
    grid = HalfLineGrid(a, length, panels, order)
    total = 0.0
    for x, w in zip(grid.nodes, grid.weights):
        total += w * (x - a) * u_of_x(float(x), alpha, ws)
    return -total


def residue_sum(alpha: float, a: float, tol: float = 1e-18) -> float:
    """S(a) = sum_k (-1)^k / k! * exp(-alpha k^2/2 - a k); the pole expansion
    of the loop integral in the right-tail moment.  Converges for a > 0."""
    if alpha <= 0.0 or a <= 0.0:
        raise special.DomainError("alpha and a must be positive")
    total, k, log_fact = 0.0, 0, 0.0
    while True:
        loge = -alpha * k * k / 2.0 - a * k - log_fact
        term = math.exp(loge) if loge > _LOG_FLOOR else 0.0
        total += term if k % 2 == 0 else -term
        if k > 0 and term < tol * abs(total):
            return total
        k += 1
        log_fact += math.log(k)
        if k > 400:
            return total


def asym_u1_21(a: float, alpha: float, order: int = 16, refine: float = 1.0,
               method: str = "quadrature") -> complex:
    """Leading right-tail moment carried by the loop contour.

    Equals (i alpha / a) exp(-a^2 / 4 alpha) S(a) exactly; "quadrature"
    evaluates the loop integral on the steepest-descent contour, "residue"
    sums the pole expansion.  The two must agree to rounding."""
    if a * a <= 1.0:
        raise GeometryError(f"need a^2 > 1 for the deformed contour, got a={a}")
    log_pref = -a * a / (4.0 * alpha) + math.log(alpha / a)
    if method == "residue":
        factor = residue_sum(alpha, a)
    elif method == "quadrature":
        loop, _ = deformed_contours(alpha, a, order=order, refine=refine)
        factor = gamma_contour_integral(loop, alpha, a)
    else:
        raise ValueError(f"unknown method {method!r}")
    if log_pref + math.log(abs(factor) + 1e-300) < _LOG_FLOOR:
        warnings.warn("tail moment below 1e-300; log channel only",
                      UnderflowWarning)
        return 0.0j
    return 1j * math.exp(log_pref) * factor


def _u1_12_grid(a: float, alpha: float, order: int,
                truncation: float) -> tuple[np.ndarray, np.ndarray]:
    # Gaussian weight width ~ sqrt(alpha)/a; phase frequency ~ (a/alpha) log(a/alpha)
    sigma = math.sqrt(alpha) / a
    freq = (a / alpha) * (1.0 + abs(math.log(a / alpha)))
    cap = max(1.3 * order / freq, 0.02)
    first = min(1.0, 2.0 * sigma, cap)
    cuts = [0.0]
    while cuts[-1] < truncation:
        w = min(first * 1.4 ** (len(cuts) - 1), cap, truncation - cuts[-1])
        cuts.append(cuts[-1] + max(w, 1e-3))
    edges = np.array(cuts)
    edges[-1] = truncation
    xg, wg = np.polynomial.legendre.leggauss(order)
    ns, ws = [], []
    for lo, hi in zip(edges[:-1], edges[1:]):
        mid, half = (lo + hi) / 2.0, (hi - lo) / 2.0
        ns.append(mid + half * xg)
        ws.append(half * wg)
    x = np.concatenate(ns)
    w = np.concatenate(ws)
    return np.concatenate([-x[::-1], x]), np.concatenate([w[::-1], w])


def asym_u1_12(a: float, alpha: float, truncation: float | None = None,
               order: int = 16) -> complex:
    """Leading right-tail moment carried by the line contour:
    (1/2 pi i) integral over the real line of exp(-(a^2/2 alpha)(x^2 + 1/2))
    / Gamma((a/alpha)(1 - ix)) dx, evaluated in log space."""
    if a <= 0.0 or alpha <= 0.0:
        raise special.DomainError("a and alpha must be positive")
    t = a / alpha
    if truncation is None:
        # integrand magnitude exp(-(a^2/2a)x^2 + (pi t / 2)|x|) below e^-40
        truncation = truncation_radius(a * a / (2.0 * alpha),
                                       growth=math.pi * t / 2.0, target=40.0)
    x, w = _u1_12_grid(a, alpha, order, truncation)
    z = t * (1.0 - 1j * x)
    loggam = np.array([special.log_gamma(zz) for zz in z])
    log_integrand = -loggam - (a * a / (2.0 * alpha)) * (x * x + 0.5)
    peak = float(np.max(log_integrand.real))
    total = np.sum(w * np.exp(log_integrand - peak)) / (2.0j * math.pi)
    mag = abs(total)
    if mag == 0.0 or peak + math.log(mag) < _LOG_FLOOR:
        warnings.warn("tail moment below 1e-300; log channel only",
                      UnderflowWarning)
        return 0.0j
    return total * math.exp(peak)


def asym_u1_12_closed(a: float, alpha: float) -> complex:
    """Closed-form limit of asym_u1_12, exact up to O((log a)^2 / a):
    exp(-(a^2 + 2 log^2(a/alpha))/(4 alpha)) / (i sqrt(2 pi alpha)
    Gamma(1 + a/alpha))."""
    if a <= 0.0 or alpha <= 0.0:
        raise special.DomainError("a and alpha must be positive")
    t = a / alpha
    log_mag = (-(a * a + 2.0 * math.log(t) ** 2) / (4.0 * alpha)
               - special.log_gamma(complex(1.0 + t)).real
               - 0.5 * math.log(2.0 * math.pi * alpha))
    if log_mag < _LOG_FLOOR:
        warnings.warn("tail moment below 1e-300; log channel only",
                      UnderflowWarning)
        return 0.0j
    return -1j * math.exp(log_mag)


def u_asym_composed(a: float, alpha: float, order: int = 16,
                    refine: float = 1.0) -> float:
    """u(a) rebuilt from the two tail moments:
    u = (a^2/alpha^2) * asym_u1_12 * asym_u1_21.  Positive real for a > 1;
    agrees with u_asymptotic up to the O((log a)^2 / a) factor."""
    m12 = asym_u1_12(a, alpha, order=order)
    m21 = asym_u1_21(a, alpha, order=order, refine=refine)
    value = (a * a) / (alpha * alpha) * m12 * m21
    if abs(value.imag) > _IM_TOL * (1.0 + abs(value)):
        raise ArithmeticError(f"composed u has imaginary residue {value.imag:.3e}")
    return value.real
