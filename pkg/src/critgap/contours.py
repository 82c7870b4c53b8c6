"""Integration contours and composite Gauss-Legendre grids.

Two families of contours appear throughout: a hairpin loop wrapping the
non-positive real axis (where the gamma factors have their poles) and a
vertical line to its right.  Grids carry complex weights with the contour
parametrization derivative already folded in, so `sum(w * f(nodes))`
approximates the contour integral of f directly.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .special import gamma

__all__ = [
    "LOOP",
    "LINE",
    "GeometryError",
    "ContourSpec",
    "QuadratureGrid",
    "build_hairpin",
    "build_vertical",
    "build_closed_loop",
    "deformed_contours",
    "union_grid",
    "truncation_radius",
    "gamma_contour_integral",
]

LOOP = "loop"
LINE = "line"

# minimum horizontal separation between a loop's crossing and a line's abscissa
PAIR_MARGIN = 0.05

_DEFAULT_HALF_WIDTH = 0.25
_DEFAULT_NOSE = 0.25
_DEFAULT_LINE_ABSCISSA = 0.5
_ARM_GROWTH = 1.3       # geometric panel-width growth along hairpin arms
_ARM_FIRST_WIDTH = 0.3  # near-nose arm panel width the defaults aim for
_LINE_GROWTH = 1.35
_LINE_FIRST_WIDTH = 0.5
_ARC_PANELS = 4


class GeometryError(ValueError):
    """Contour constraints violated (sizes, separations, pole clearance)."""


@dataclass(frozen=True)
class ContourSpec:
    """Geometry summary of a contour, kept alongside its grid."""

    kind: str           # "hairpin" | "line" | "closed-loop"
    half_width: float   # smallest |Im| of the horizontal pieces / nose radius
    crossing: float     # abscissa where the contour crosses the real axis
    truncation: float   # arm extent (hairpins/loops) or |Im| cutoff (lines)
    left_edge: float | None = None  # closing abscissa of a closed loop


@dataclass
class QuadratureGrid:
    """Composite Gauss-Legendre grid along a contour.

    weights are complex and include dz, so weighted sums of node values are
    contour integrals.  labels marks every node as belonging to the loop or
    the line family, which is what the two-contour operator kernels key on.
    """

    nodes: np.ndarray
    weights: np.ndarray
    labels: np.ndarray
    panel_count: int
    order: int
    spec: ContourSpec

    def __len__(self) -> int:
        return self.nodes.size

    def integrate(self, values: np.ndarray) -> complex:
        return complex(np.sum(self.weights * np.asarray(values)))

    def to_json(self) -> str:
        payload = {
            "spec": asdict(self.spec),
            "panel_count": int(self.panel_count),
            "order": int(self.order),
            "labels": self.labels.tolist(),
            "nodes": [[z.real, z.imag] for z in self.nodes],
            "weights": [[w.real, w.imag] for w in self.weights],
        }
        return json.dumps(payload, indent=1)


def _gl_rule(order: int) -> tuple[np.ndarray, np.ndarray]:
    if order not in _gl_rule.cache:
        _gl_rule.cache[order] = np.polynomial.legendre.leggauss(order)
    return _gl_rule.cache[order]


_gl_rule.cache = {}


def _check_basic(delta: float, T: float, panels: int, order: int) -> None:
    if not 0.0 < delta < 0.5:
        raise GeometryError(f"half-width must lie in (0, 1/2), got {delta}")
    if T < 5.0:
        raise GeometryError(f"truncation must be >= 5, got {T}")
    if panels < 4:
        raise GeometryError(f"need at least 4 panels, got {panels}")
    if not 4 <= order <= 64:
        raise GeometryError(f"order per panel must lie in [4, 64], got {order}")


def _geometric_cuts(length: float, count: int, growth: float,
                    cap: float = math.inf) -> np.ndarray:
    """Breakpoints on [0, length]: `count` panels, widths growing by `growth`.

    Widths above `cap` are redistributed by extra uniform splits, so the
    returned array may define more than `count` panels.
    """
    widths = growth ** np.arange(count)
    widths = length * widths / widths.sum()
    out = [0.0]
    for w in widths:
        splits = max(1, int(math.ceil(w / cap)))
        step = w / splits
        for _ in range(splits):
            out.append(out[-1] + step)
    out[-1] = length
    return np.asarray(out)


def _geometric_count(length: float, first: float, growth: float) -> int:
    # panels needed so the first width comes out near `first`
    n = math.log(1.0 + length * (growth - 1.0) / first) / math.log(growth)
    return max(4, int(math.ceil(n)))


def _segment(z0: complex, z1: complex, cuts: np.ndarray,
             order: int) -> tuple[np.ndarray, np.ndarray, int]:
    x, w = _gl_rule(order)
    nodes, weights = [], []
    dz = z1 - z0
    for a, b in zip(cuts[:-1], cuts[1:]):
        mid, half = (a + b) / 2.0, (b - a) / 2.0
        nodes.append(z0 + dz * (mid + half * x))
        weights.append(w * half * dz)
    return np.concatenate(nodes), np.concatenate(weights), len(cuts) - 1


def _arc(center: float, radius: float, th0: float, th1: float,
         n_panels: int, order: int) -> tuple[np.ndarray, np.ndarray, int]:
    x, w = _gl_rule(order)
    cuts = np.linspace(th0, th1, n_panels + 1)
    nodes, weights = [], []
    for a, b in zip(cuts[:-1], cuts[1:]):
        mid, half = (a + b) / 2.0, (b - a) / 2.0
        th = mid + half * x
        z = center + radius * np.exp(1j * th)
        nodes.append(z)
        weights.append(w * half * 1j * radius * np.exp(1j * th))
    return np.concatenate(nodes), np.concatenate(weights), n_panels


def _min_pole_distance(nodes: np.ndarray) -> float:
    k = np.minimum(0.0, np.round(nodes.real))
    return float(np.min(np.abs(nodes - k)))


def _finish(pieces, label: str, order: int, spec: ContourSpec) -> QuadratureGrid:
    nodes = np.concatenate([p[0] for p in pieces])
    weights = np.concatenate([p[1] for p in pieces])
    count = sum(p[2] for p in pieces)
    labels = np.full(nodes.size, label, dtype="U4")
    return QuadratureGrid(nodes, weights, labels, count, order, spec)


def truncation_radius(coeff: float, growth: float = 0.0, target: float = 40.0,
                      gamma_decay: bool = False) -> float:
    """Extent T where exp(-coeff T^2 + growth T) (optionally times the
    superexponential gamma decay along the arms) has dropped by exp(-target)."""
    if coeff <= 0.0:
        raise GeometryError("Gaussian coefficient must be positive")
    T = (growth + math.sqrt(growth * growth + 4.0 * coeff * target)) / (2.0 * coeff)
    if gamma_decay:
        for _ in range(40):  # Newton on the full decay budget
            f = coeff * T * T - growth * T + T * (math.log(T) - 1.0) + 1.0 - target
            df = 2.0 * coeff * T - growth + math.log(T)
            step = f / df
            T -= step
            if abs(step) < 1e-9:
                break
        T = max(T, 5.0)
    return max(T, 5.0)


def _throat_cuts(length: float, radius: float) -> np.ndarray:
    # refine toward the end of the throat nearest the pole at the origin
    dists = [length]
    while dists[-1] > 0.8 * radius:
        dists.append(dists[-1] * 0.45)
    cuts = [0.0] + [length - d for d in dists[1:]] + [length]
    return np.asarray(cuts)


def _arc_panel_count(radius: float, max_frequency: float, order: int) -> int:
    # phase of exp(x z) sweeps ~2 x radius over the arc; keep panels resolved
    return max(_ARC_PANELS, int(math.ceil(2.0 * max_frequency * radius / order)))


def build_hairpin(delta: float = _DEFAULT_HALF_WIDTH, nose: float = _DEFAULT_NOSE,
                  T: float = 10.0, panels: int | None = None, order: int = 16,
                  *, max_frequency: float = 0.0, refine: float = 1.0) -> QuadratureGrid:
    """Open hairpin around the non-positive reals, positively oriented.

    Runs from -T - i*delta along the lower arm, closes around the real axis
    at abscissa `nose` with a semicircular arc, and returns to -T + i*delta.
    When nose < delta the loop pinches: the outer arms stay at height delta
    and only a short throat near the origin drops to the nose radius, which
    keeps every node at least half the nose radius away from the gamma poles
    without refining the whole arm.
    """
    arm_first = _ARM_FIRST_WIDTH / refine
    if max_frequency > 0.0:
        arm_first = min(arm_first, 1.3 * order / max_frequency)
    if panels is None:
        panels = _geometric_count(T, arm_first, _ARM_GROWTH)
    _check_basic(delta, T, panels, order)
    if not nose > 0.0:
        raise GeometryError(f"nose abscissa must be positive, got {nose}")

    d_nose = min(delta, nose)
    center = nose - d_nose
    pinched = d_nose < delta
    throat_start = -0.25 if pinched else center
    arm_end = -0.7 if pinched else center
    if T <= -arm_end + 1.0:
        raise GeometryError(f"truncation {T} too small for the arm layout")

    # arm breakpoints: fine near the nose end, geometrically coarser far out
    arm_len = T + arm_end
    arm_cuts = _geometric_cuts(arm_len, panels, _ARM_GROWTH)
    lower = _segment(complex(-T, -delta), complex(arm_end, -delta),
                     1.0 - arm_cuts[::-1] / arm_len, order)
    pieces = [lower]
    if pinched:
        slant_cuts = np.linspace(0.0, 1.0, 3)
        pieces.append(_segment(complex(arm_end, -delta),
                               complex(throat_start, -d_nose), slant_cuts, order))
        tc = _throat_cuts(center - throat_start, d_nose)
        pieces.append(_segment(complex(throat_start, -d_nose),
                               complex(center, -d_nose),
                               tc / (center - throat_start), order))
    pieces.append(_arc(center, d_nose, -math.pi / 2.0, math.pi / 2.0,
                       _arc_panel_count(d_nose, max_frequency, order), order))
    if pinched:
        tc = _throat_cuts(center - throat_start, d_nose)
        back = 1.0 - tc[::-1] / (center - throat_start)
        pieces.append(_segment(complex(center, d_nose),
                               complex(throat_start, d_nose), back, order))
        pieces.append(_segment(complex(throat_start, d_nose),
                               complex(arm_end, delta), np.linspace(0, 1, 3), order))
    # upper arm mirrors the lower one: fine near the nose, coarse far out
    upper = _segment(complex(arm_end, delta), complex(-T, delta),
                     arm_cuts / arm_len, order)
    pieces.append(upper)

    spec = ContourSpec("hairpin", d_nose, nose, T)
    grid = _finish(pieces, LOOP, order, spec)
    if _min_pole_distance(grid.nodes) < 0.5 * d_nose - 1e-12:
        raise GeometryError("hairpin nodes too close to a gamma pole")
    return grid


def build_vertical(b: float = _DEFAULT_LINE_ABSCISSA, T: float = 10.0,
                   panels: int | None = None, order: int = 16, *,
                   max_frequency: float = 0.0, refine: float = 1.0) -> QuadratureGrid:
    """Upward vertical line Re s = b, |Im s| <= T, graded toward the axis.

    max_frequency caps panel widths at ~1.3*order/frequency so integrands
    carrying a factor exp(-i y Im s) stay resolved up to |y| = max_frequency.
    """
    first = _LINE_FIRST_WIDTH / refine
    cap = math.inf
    if max_frequency > 0.0:
        cap = max(1.3 * order / max_frequency, 0.05)
        first = min(first, cap)
    if panels is None:
        panels = _geometric_count(T, first, _LINE_GROWTH)
    if T < 5.0:
        raise GeometryError(f"truncation must be >= 5, got {T}")
    if panels < 4:
        raise GeometryError(f"need at least 4 panels, got {panels}")
    if not 4 <= order <= 64:
        raise GeometryError(f"order per panel must lie in [4, 64], got {order}")

    half = _geometric_cuts(T, panels, _LINE_GROWTH, cap=cap)
    cuts = np.concatenate([-half[::-1], half[1:]])  # -T ... 0 ... T
    norm = (cuts + T) / (2.0 * T)
    piece = _segment(complex(b, -T), complex(b, T), norm, order)
    spec = ContourSpec("line", 0.0, b, T)
    return _finish([piece], LINE, order, spec)


def build_closed_loop(left_edge: float, delta: float = _DEFAULT_HALF_WIDTH,
                      nose: float = _DEFAULT_NOSE, order: int = 16, *,
                      max_frequency: float = 0.0, refine: float = 1.0) -> QuadratureGrid:
    """Closed positively-oriented loop: arms from `left_edge` to the nose arc,
    closed by a vertical edge at Re z = left_edge.

    Encircles exactly the gamma poles in (left_edge, nose).  max_frequency
    declares the largest |x| of an exp(x z) factor the grid must resolve."""
    if not 0.0 < delta < 0.5:
        raise GeometryError(f"half-width must lie in (0, 1/2), got {delta}")
    if nose < delta:
        raise GeometryError(f"closed loop needs nose >= half-width, got {nose}")
    if nose <= left_edge:
        raise GeometryError("left edge must sit left of the nose")
    if abs(left_edge - round(left_edge)) < 0.5 * delta and round(left_edge) <= 0:
        raise GeometryError("closing edge too close to a gamma pole")
    center = nose - delta
    length = center - left_edge
    first = _ARM_FIRST_WIDTH / refine
    if max_frequency > 0.0:
        first = min(first, 1.3 * order / max_frequency)
    panels = max(4, _geometric_count(length, first, _ARM_GROWTH))
    arm_cuts = _geometric_cuts(length, panels, _ARM_GROWTH)

    lower = _segment(complex(left_edge, -delta), complex(center, -delta),
                     1.0 - arm_cuts[::-1] / length, order)
    arc = _arc(center, delta, -math.pi / 2.0, math.pi / 2.0,
               _arc_panel_count(delta, max_frequency, order), order)
    upper = _segment(complex(center, delta), complex(left_edge, delta),
                     arm_cuts / length, order)
    edge = _segment(complex(left_edge, delta), complex(left_edge, -delta),
                    np.linspace(0.0, 1.0, 3), order)

    pieces = [lower, arc, upper, edge]
    spec = ContourSpec("closed-loop", delta, nose, abs(left_edge), left_edge)
    grid = _finish(pieces, LOOP, order, spec)
    if _min_pole_distance(grid.nodes) < 0.5 * delta - 1e-12:
        raise GeometryError("loop nodes too close to a gamma pole")
    return grid


def deformed_contours(alpha: float, a: float, order: int = 16, *,
                      refine: float = 1.0, target: float = 40.0,
                      max_frequency: float = 0.0) -> tuple[QuadratureGrid, QuadratureGrid]:
    """Steepest-descent-adapted contour pair: loop nose at 1/(alpha a), line
    through a/alpha.  Requires a^2 > 1 so the two crossings stay separated."""
    if alpha <= 0.0:
        raise GeometryError("alpha must be positive")
    if a * a <= 1.0:
        raise GeometryError(f"deformed pair needs a^2 > 1, got a = {a}")
    nose = 1.0 / (alpha * a)
    b = a / alpha
    if b - nose < PAIR_MARGIN:
        raise GeometryError(f"loop nose {nose} and line {b} too close")
    T_loop = truncation_radius(alpha / 4.0, growth=0.0, target=target,
                               gamma_decay=True)
    T_line = truncation_radius(alpha / 4.0, growth=math.pi / 2.0, target=target)
    loop = build_hairpin(_DEFAULT_HALF_WIDTH, nose, T_loop, order=order,
                         refine=refine)
    line = build_vertical(b, T_line, order=order, refine=refine,
                          max_frequency=max(max_frequency, a))
    return loop, line


def union_grid(line: QuadratureGrid, loop: QuadratureGrid) -> QuadratureGrid:
    """Concatenated two-contour grid, line nodes first, loop nodes second."""
    if line.spec.crossing - loop.spec.crossing < PAIR_MARGIN:
        raise GeometryError("line must pass right of the loop nose")
    spec = ContourSpec("union", loop.spec.half_width,
                       loop.spec.crossing, max(loop.spec.truncation,
                                               line.spec.truncation))
    return QuadratureGrid(
        np.concatenate([line.nodes, loop.nodes]),
        np.concatenate([line.weights, loop.weights]),
        np.concatenate([line.labels, loop.labels]),
        line.panel_count + loop.panel_count,
        max(line.order, loop.order),
        spec,
    )


def gamma_contour_integral(grid: QuadratureGrid, alpha: float, a: float) -> complex:
    """(1/2pi i) * integral of Gamma(z) exp(-alpha z^2/2 + a z) over the grid.

    For any loop around the non-positive reals this equals the alternating
    residue series sum_k (-1)^k/k! exp(-alpha k^2/2 - a k)."""
    z = grid.nodes
    vals = np.array([gamma(zz) for zz in z])
    integrand = vals * np.exp(-alpha * z * z / 2.0 + a * z)
    return grid.integrate(integrand) / (2.0j * math.pi)
