"""Correlation kernels: critical, conjugated, finite-product, factored forms,
and the two-contour integrable kernel with its line reduction.

Everything is a double (or single) contour integral over a hairpin-loop /
vertical-line pair.  Matrix-valued evaluators batch the node sums as three
dense products so Nystrom assembly stays cheap; the scalar ops wrap them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .special import DomainError, gamma, log_gamma, recip_gamma
from .contours import (
    LINE,
    LOOP,
    PAIR_MARGIN,
    GeometryError,
    QuadratureGrid,
    build_closed_loop,
    build_hairpin,
    build_vertical,
    deformed_contours,
    truncation_radius,
    union_grid,
)

__all__ = [
    "ContourPair",
    "kernel_pair",
    "qa_pair",
    "critical_kernel",
    "conjugated_kernel",
    "kernel_matrix",
    "finite_kernel",
    "centering_shift",
    "left_factor",
    "right_factor",
    "factored_kernel",
    "rh_vectors",
    "rh_vector_arrays",
    "integrable_kernel",
    "qa_matrix",
    "line_reduced_kernel",
    "ha_matrix",
    "cross_blocks",
]

_TWO_PI_I = 2.0j * math.pi
_IM_TOL = 1e-9

# decay budget: contour tails are cut where integrands drop by e^{-40}
_TAIL_LOG = 40.0


def _gamma_arr(z: np.ndarray) -> np.ndarray:
    return np.array([gamma(zz) for zz in z])


def _recip_arr(z: np.ndarray) -> np.ndarray:
    return np.array([recip_gamma(zz) for zz in z])


def _log_gamma_left(z: complex) -> complex:
    """A logarithm of Gamma(z) valid on either half-plane, for use inside a
    single exp(); its branch may differ from the principal one by 2 pi i k."""
    if z.real >= 0.5:
        return log_gamma(z)
    # reflection in log form; sin stays away from 0 by the pole clearance
    s = complex(np.sin(math.pi * z))
    return math.log(math.pi) - np.log(s) - log_gamma(1.0 - z)


@dataclass
class ContourPair:
    """A loop/line grid pair plus the parameters it was built for."""

    loop: QuadratureGrid
    line: QuadratureGrid
    alpha: float

    def union(self) -> QuadratureGrid:
        return union_grid(self.line, self.loop)


def kernel_pair(alpha: float, x_max: float = 30.0, x_min: float = 0.0,
                order: int = 16, refine: float = 1.0,
                target: float = _TAIL_LOG) -> ContourPair:
    """Contour pair sized for the critical/conjugated kernel at |x|,|y| within
    [x_min, x_max]: Gaussian coefficient alpha/2 on both contours."""
    if alpha <= 0.0:
        raise GeometryError("alpha must be positive")
    growth_loop = max(0.0, -x_min)  # exp(x t) grows along the arms iff x < 0
    T_loop = truncation_radius(alpha / 2.0, growth=growth_loop, target=target,
                               gamma_decay=True)
    T_line = truncation_radius(alpha / 2.0, growth=math.pi / 2.0, target=target)
    loop = build_hairpin(T=T_loop, order=order, refine=refine,
                         max_frequency=abs(x_max))
    line = build_vertical(T=T_line, order=order, refine=refine,
                          max_frequency=abs(x_max))
    return ContourPair(loop, line, alpha)


def qa_pair(alpha: float, a_max: float, order: int = 16, refine: float = 1.0,
            target: float = _TAIL_LOG, deformed: bool = False,
            a: float | None = None) -> ContourPair:
    """Contour pair sized for the two-contour operator kernels (Gaussian
    coefficient alpha/4).  With deformed=True the steepest-descent pair for
    the given a is used instead of the defaults."""
    if alpha <= 0.0:
        raise GeometryError("alpha must be positive")
    if deformed:
        loop, line = deformed_contours(alpha, a if a is not None else a_max,
                                       order=order, refine=refine, target=target)
        return ContourPair(loop, line, alpha)
    T_loop = truncation_radius(alpha / 4.0, growth=0.0, target=target,
                               gamma_decay=True)
    T_line = truncation_radius(alpha / 4.0, growth=math.pi / 2.0, target=target)
    loop = build_hairpin(T=T_loop, order=order, refine=refine,
                         max_frequency=a_max)
    line = build_vertical(T=T_line, order=order, refine=refine,
                          max_frequency=a_max)
    return ContourPair(loop, line, alpha)


def kernel_matrix(x: np.ndarray, y: np.ndarray, pair: ContourPair,
                  shift: float = 0.5) -> np.ndarray:
    """Matrix K[i, j] of the double-contour kernel at (x_i, y_j).

    shift=0.5 gives the conjugated kernel exp(-(x-y)/2) K_crit(x, y); shift=0
    gives K_crit itself.  Separates into three dense products: loop-side
    vector, fixed Cauchy coupling, line-side vector.
    """
    alpha = pair.alpha
    t, wt = pair.loop.nodes, pair.loop.weights
    s, ws = pair.line.nodes, pair.line.weights
    x = np.atleast_1d(np.asarray(x, dtype=float))
    y = np.atleast_1d(np.asarray(y, dtype=float))

    gt = _gamma_arr(t) * np.exp(-alpha * t * t / 2.0)
    gs = _recip_arr(s) * np.exp(alpha * s * s / 2.0)
    V = np.exp(np.outer(x, t - shift)) * gt            # (nx, nt)
    W = np.exp(np.outer(-y, s - shift)) * gs           # (ny, ns)
    C = (wt[:, None] * ws[None, :]) / (s[None, :] - t[:, None])
    return (V @ C @ W.T) / _TWO_PI_I ** 2


def _as_real(value: complex, scale: float = 1.0) -> float:
    if abs(value.imag) > _IM_TOL * (scale + abs(value)):
        raise ArithmeticError(f"kernel value has residual imaginary part {value}")
    return value.real


def critical_kernel(x: float, y: float, alpha: float, pair: ContourPair | None = None,
                    refine: float = 1.0) -> float:
    """Limiting kernel of the critically-scaled product process at real (x, y)."""
    if pair is None:
        m = max(abs(x), abs(y), 1.0)
        pair = kernel_pair(alpha, x_max=m, x_min=min(x, y, 0.0), refine=refine)
    val = kernel_matrix(np.array([x]), np.array([y]), pair, shift=0.0)[0, 0]
    return _as_real(val)


def conjugated_kernel(x: float, y: float, alpha: float,
                      pair: ContourPair | None = None,
                      refine: float = 1.0) -> float:
    """exp(-(x-y)/2) K_crit(x, y): the symmetric-decay form used on (a, inf).

    Requires x, y > 0; the decay bound exp(-(x+y)/2) only holds there."""
    if x <= 0.0 or y <= 0.0:
        raise DomainError(f"conjugated kernel needs x, y > 0, got ({x}, {y})")
    if pair is None:
        pair = kernel_pair(alpha, x_max=max(x, y, 1.0), refine=refine)
    val = kernel_matrix(np.array([x]), np.array([y]), pair, shift=0.5)[0, 0]
    return _as_real(val)


def centering_shift(n: int, m: int) -> float:
    """Centering a_N = (M+1)(log N - 1/(2N)) of the finite-N process."""
    if n < 1 or m < 1:
        raise DomainError("matrix dimension and factor count must be >= 1")
    return (m + 1) * (math.log(n) - 1.0 / (2.0 * n))


def finite_kernel(x: float, y: float, n: int, m: int, order: int = 16,
                  refine: float = 1.0) -> float:
    """Finite-N product-process kernel at real (x, y), log-space evaluation.

    The loop encircles the n gamma poles {0, -1, ..., -n+1} and closes at
    -n + 1/2; all gamma ratios are combined in log scale before a single exp,
    so factor counts up to m = 512 stay finite.  Raises OverflowError only if
    the combined exponent itself exceeds 700.
    """
    if n < 1 or m < 1:
        raise DomainError("need n >= 1 and m >= 1")
    if m > 512:
        raise DomainError("factor count above the supported envelope of 512")
    freq = max(abs(x), abs(y), 1.0)
    alpha_eff = (m + 1) / n
    T_line = truncation_radius(alpha_eff / 2.0, growth=math.pi / 2.0)
    loop = build_closed_loop(-n + 0.5, order=order, refine=refine,
                             max_frequency=freq)
    line = build_vertical(0.5, T_line, order=order, refine=refine,
                          max_frequency=freq)

    t, wt = loop.nodes, loop.weights
    s, ws = line.nodes, line.weights
    lg_t = np.array([_log_gamma_left(tt) for tt in t])
    lg_tn = np.array([log_gamma(tt + n) for tt in t])
    lg_s = np.array([log_gamma(ss) for ss in s])
    lg_sn = np.array([log_gamma(ss + n) for ss in s])

    # total exponent, combined before exponentiation
    part_t = -(m + 1) * lg_tn + lg_t + x * t
    part_s = (m + 1) * lg_sn - lg_s - y * s

    block = 4096
    peak = -np.inf
    for lo in range(0, s.size, block):
        e = part_t[:, None] + part_s[None, lo:lo + block] \
            - np.log(s[None, lo:lo + block] - t[:, None])
        peak = max(peak, float(np.max(e.real)))
    if peak > 700.0:
        raise OverflowError(f"finite-kernel exponent {peak:.1f} exceeds 700")

    acc = 0.0 + 0.0j
    for lo in range(0, s.size, block):
        sl = slice(lo, lo + block)
        e = part_t[:, None] + part_s[None, sl] - np.log(s[None, sl] - t[:, None])
        acc += wt @ np.exp(e - peak) @ ws[sl]
    val = acc * math.exp(peak) / _TWO_PI_I ** 2 if peak > -np.inf else 0.0
    return _as_real(complex(val))


def left_factor(x: float, q: float, alpha: float,
                loop: QuadratureGrid | None = None) -> float:
    """(1/2pi i) * loop integral of Gamma(t) exp(-alpha t^2/2 + (x+q)(t-1/2))."""
    if loop is None:
        T = truncation_radius(alpha / 2.0, growth=max(0.0, -(x + q)),
                              gamma_decay=True)
        loop = build_hairpin(T=T, max_frequency=max(1.0, abs(x + q)))
    t = loop.nodes
    vals = _gamma_arr(t) * np.exp(-alpha * t * t / 2.0 + (x + q) * (t - 0.5))
    return _as_real(loop.integrate(vals) / _TWO_PI_I)


def right_factor(q: float, y: float, alpha: float,
                 line: QuadratureGrid | None = None) -> float:
    """(1/2pi i) * line integral of exp(alpha s^2/2 - (y+q)(s-1/2)) / Gamma(s)."""
    if line is None:
        T = truncation_radius(alpha / 2.0, growth=math.pi / 2.0)
        line = build_vertical(T=T, max_frequency=max(1.0, abs(y + q)))
    s = line.nodes
    vals = _recip_arr(s) * np.exp(alpha * s * s / 2.0 - (y + q) * (s - 0.5))
    return _as_real(line.integrate(vals) / _TWO_PI_I)


def factored_kernel(x: float, y: float, alpha: float, u_order: int = 32,
                    refine: float = 1.0) -> float:
    """Conjugated kernel rebuilt from its rank-factorization: the product of
    the two one-contour factors integrated over the coupling variable.

    The coupling integral over q in (0, inf) is mapped to u in (0, 1) by
    q = -2 log(1-u), under which the integrand becomes smooth and one
    Gauss-Legendre panel of moderate order converges spectrally.
    """
    if x <= 0.0 or y <= 0.0:
        raise DomainError(f"factored kernel needs x, y > 0, got ({x}, {y})")
    un, uw = np.polynomial.legendre.leggauss(int(u_order * max(1.0, refine)))
    u = 0.5 * (un + 1.0)
    w = 0.5 * uw
    q = -2.0 * np.log1p(-u)
    jac = 2.0 / (1.0 - u)

    T_loop = truncation_radius(alpha / 2.0, gamma_decay=True)
    loop = build_hairpin(T=T_loop, refine=refine,
                         max_frequency=max(1.0, x + float(q.max())))
    T_line = truncation_radius(alpha / 2.0, growth=math.pi / 2.0)
    line = build_vertical(T=T_line, refine=refine,
                          max_frequency=max(1.0, y + float(q.max())))

    t, wt = loop.nodes, loop.weights
    s, ws = line.nodes, line.weights
    gt = _gamma_arr(t) * np.exp(-alpha * t * t / 2.0)
    gs = _recip_arr(s) * np.exp(alpha * s * s / 2.0)
    G = np.exp(np.outer(x + q, t - 0.5)) @ (wt * gt) / _TWO_PI_I
    Gt = np.exp(np.outer(-(y + q), s - 0.5)) @ (ws * gs) / _TWO_PI_I
    return _as_real(complex(np.sum(w * jac * G * Gt)))


# -- two-contour integrable kernel -------------------------------------------

def rh_vectors(z: complex, label: str, a: float, alpha: float):
    """The two-vectors (f, h) whose outer product builds the integrable kernel
    and the jump matrix; f carries the 1/(2 pi i) normalization."""
    f = np.zeros(2, dtype=complex)
    h = np.zeros(2, dtype=complex)
    quarter = alpha * z * z / 4.0
    if label == LINE:
        f[0] = np.exp(quarter - a * z) / _TWO_PI_I
        h[1] = -recip_gamma(z) * np.exp(quarter)
    elif label == LOOP:
        f[1] = np.exp(-quarter) / _TWO_PI_I
        h[0] = gamma(z) * np.exp(-quarter + a * z)
    else:
        raise ValueError(f"unknown contour label {label!r}")
    return f, h


def rh_vector_arrays(nodes: np.ndarray, labels: np.ndarray, a: float,
                     alpha: float) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized (f, h) rows for every node of a union grid."""
    n = nodes.size
    F = np.zeros((n, 2), dtype=complex)
    H = np.zeros((n, 2), dtype=complex)
    on_line = labels == LINE
    on_loop = labels == LOOP
    z = nodes
    quarter = alpha * z * z / 4.0
    F[on_line, 0] = np.exp(quarter[on_line] - a * z[on_line]) / _TWO_PI_I
    F[on_loop, 1] = np.exp(-quarter[on_loop]) / _TWO_PI_I
    H[on_loop, 0] = _gamma_arr(z[on_loop]) * np.exp(-quarter[on_loop] + a * z[on_loop])
    H[on_line, 1] = -_recip_arr(z[on_line]) * np.exp(quarter[on_line])
    return F, H


def integrable_kernel(x: complex, y: complex, label_x: str, label_y: str,
                      a: float, alpha: float) -> complex:
    """Two-contour operator kernel (f(x) . h(y)) / (x - y).

    Identically zero when both points sit on the same contour (the f and h
    supports are complementary), which is what makes the operator a pure
    off-diagonal coupling between the line and the loop."""
    if label_x == label_y:
        return 0.0 + 0.0j
    f, _ = rh_vectors(x, label_x, a, alpha)
    _, h = rh_vectors(y, label_y, a, alpha)
    num = f[0] * h[0] + f[1] * h[1]
    return num / (x - y)


def qa_matrix(union: QuadratureGrid, a: float, alpha: float) -> np.ndarray:
    """Unweighted kernel matrix of the two-contour operator on a union grid.

    Block structure over (line nodes, loop nodes): [[0, A], [B, 0]], where A
    couples line<-loop and B loop<-line."""
    F, H = rh_vector_arrays(union.nodes, union.labels, a, alpha)
    num = F @ H.T
    diff = union.nodes[:, None] - union.nodes[None, :]
    np.fill_diagonal(diff, 1.0)  # numerator already vanishes on the diagonal
    return num / diff


def cross_blocks(pair: ContourPair, a: float) -> tuple[np.ndarray, np.ndarray]:
    """The two coupling blocks: A[z, t] line<-loop and B[t, s] loop<-line."""
    alpha = pair.alpha
    z = pair.line.nodes
    t = pair.loop.nodes
    gz = np.exp(alpha * z * z / 4.0 - a * z)
    gt = _gamma_arr(t) * np.exp(-alpha * t * t / 4.0 + a * t)
    A = (gz[:, None] * gt[None, :]) / (z[:, None] - t[None, :]) / _TWO_PI_I
    hz = _recip_arr(z) * np.exp(alpha * z * z / 4.0)
    ft = np.exp(-alpha * t * t / 4.0)
    B = (ft[:, None] * hz[None, :]) / (z[None, :] - t[:, None]) / _TWO_PI_I
    return A, B


def line_reduced_kernel(z: complex, s: complex, a: float, alpha: float,
                        loop: QuadratureGrid) -> complex:
    """Line-to-line kernel obtained by integrating the two coupling blocks
    over the loop: -(1/4 pi^2) int_loop e^{a(t-z)} Gamma(t)/Gamma(s)
    e^{alpha(z^2+s^2-2t^2)/4} / ((s-t)(z-t)) dt."""
    t, wt = loop.nodes, loop.weights
    g = _gamma_arr(t) * np.exp(a * t - alpha * t * t / 2.0)
    pref = np.exp(-a * z + alpha * (z * z + s * s) / 4.0) * recip_gamma(s)
    integ = np.sum(wt * g / ((s - t) * (z - t)))
    return pref * integ / _TWO_PI_I ** 2


def ha_matrix(pair: ContourPair, a: float,
              loop_override: QuadratureGrid | None = None) -> np.ndarray:
    """Matrix of the line-reduced kernel on the pair's line grid; the loop
    integration grid may be overridden to decouple it from the pair."""
    alpha = pair.alpha
    loop = loop_override if loop_override is not None else pair.loop
    z = pair.line.nodes
    t, wt = loop.nodes, loop.weights
    g = wt * _gamma_arr(t) * np.exp(a * t - alpha * t * t / 2.0)
    U = np.exp(-a * z + alpha * z * z / 4.0)[:, None] / (z[:, None] - t[None, :])
    V = (_recip_arr(z) * np.exp(alpha * z * z / 4.0))[:, None] / (z[:, None] - t[None, :])
    return (U * g[None, :]) @ V.T / _TWO_PI_I ** 2
