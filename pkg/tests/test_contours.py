"""Contour-builder and quadrature tests.

Reference integrals use closed forms (residues, Gaussian integrals) rather
than a second quadrature, so the grids are tested against exact numbers.
"""

from __future__ import annotations

import math

import numpy as np
import pytest

from critgap.contours import (GeometryError, LINE, LOOP, build_closed_loop,
                              build_hairpin, build_vertical,
                              deformed_contours, gamma_contour_integral,
                              truncation_radius, union_grid)
from critgap.special import gamma


def alternating_pole_sum(alpha: float, a: float, terms: int = 20) -> float:
    total, fact = 0.0, 1.0
    for k in range(terms):
        if k:
            fact *= k
        total += (-1.0) ** k / fact * math.exp(-alpha * k * k / 2.0 - a * k)
    return total


def test_hairpin_structure():
    grid = build_hairpin()
    assert len(grid) == grid.panel_count * grid.order
    assert np.all(grid.labels == LOOP)
    assert grid.weights.shape == grid.nodes.shape
    # endpoints approach -T -i delta and -T +i delta (open hairpin)
    assert grid.nodes[0].real < -5.0 and grid.nodes[0].imag < 0.0
    assert grid.nodes[-1].real < -5.0 and grid.nodes[-1].imag > 0.0


def test_hairpin_endpoint_integral():
    # integral of dz equals the endpoint difference 2 i delta
    grid = build_hairpin(delta=0.25, T=10.0)
    total = grid.integrate(np.ones(len(grid)))
    assert total == pytest.approx(0.5j, abs=1e-12)


def test_hairpin_residue_series():
    for alpha, a in [(2.0, 1.0), (1.0, 2.0), (0.5, 1.5)]:
        grid = build_hairpin(T=truncation_radius(alpha / 2.0, 0.0, 40.0,
                                                 gamma_decay=True))
        got = gamma_contour_integral(grid, alpha, a)
        want = alternating_pole_sum(alpha, a)
        assert abs(got - want) <= 1e-12 * abs(want)


def test_pinched_hairpin_residue_series():
    # nose tighter than the arm half-width: throat grading keeps accuracy
    grid = build_hairpin(nose=0.1, T=10.0)
    got = gamma_contour_integral(grid, 2.0, 1.0)
    want = alternating_pole_sum(2.0, 1.0)
    assert abs(got - want) <= 1e-12 * abs(want)


def test_vertical_line_gaussian():
    # along Re z = b the integral of exp(z^2) dz equals i sqrt(pi),
    # independent of b (shift invariance)
    for b in (0.5, 0.3):
        grid = build_vertical(b=b, T=8.0)
        total = grid.integrate(np.exp(grid.nodes ** 2))
        assert total == pytest.approx(1j * math.sqrt(math.pi), abs=1e-12)


def test_vertical_structure():
    grid = build_vertical()
    assert np.all(grid.labels == LINE)
    assert np.all(np.isclose(grid.nodes.real, 0.5))
    assert np.all(np.diff(grid.nodes.imag) > 0)


def test_closed_loop_residue():
    loop = build_closed_loop(left_edge=-0.5)
    # closed: integral of dz vanishes; Gamma picks up only the pole at 0
    assert abs(loop.integrate(np.ones(len(loop)))) <= 1e-12
    vals = np.array([gamma(z) for z in loop.nodes])
    assert loop.integrate(vals) / (2.0j * math.pi) == pytest.approx(1.0, abs=1e-12)


def test_closed_loop_two_poles():
    loop = build_closed_loop(left_edge=-1.5)
    vals = np.array([gamma(z) for z in loop.nodes])
    # residues at 0 and -1: 1 - 1 = 0
    assert abs(loop.integrate(vals) / (2.0j * math.pi)) <= 1e-12


def test_truncation_radius_solves_decay_budget():
    for coeff, growth, target in [(0.25, 0.0, 40.0), (0.5, math.pi / 2, 40.0),
                                  (0.125, math.pi / 2, 30.0)]:
        T = truncation_radius(coeff, growth, target)
        assert T >= 5.0
        assert coeff * T * T - growth * T == pytest.approx(target, abs=1e-6)
    # gamma decay contributes, shrinking the radius
    assert (truncation_radius(0.25, 0.0, 40.0, gamma_decay=True)
            < truncation_radius(0.25, 0.0, 40.0))


def test_truncation_radius_monotone_in_target():
    radii = [truncation_radius(0.25, 1.0, t) for t in (20.0, 40.0, 80.0)]
    assert radii[0] < radii[1] < radii[2]


def test_refine_and_frequency_grow_grids():
    base = build_hairpin()
    assert len(build_hairpin(refine=2.0)) > len(base)
    # nose-arc oscillation budget only bites once frequency ~ order/radius
    assert len(build_hairpin(max_frequency=300.0)) > len(base)
    line = build_vertical(T=10.0)
    assert len(build_vertical(T=10.0, max_frequency=40.0)) > len(line)


def test_deformed_pair_geometry():
    loop, line = deformed_contours(2.0, 3.0)
    assert loop.spec.crossing == pytest.approx(1.0 / 6.0)
    assert line.spec.crossing == pytest.approx(1.5)
    assert np.max(loop.nodes.real) < np.min(line.nodes.real)
    with pytest.raises(GeometryError):
        deformed_contours(2.0, 1.0)   # a^2 <= 1
    with pytest.raises(GeometryError):
        deformed_contours(2.0, 0.5)


def test_deformed_loop_still_sums_residues():
    loop, _ = deformed_contours(1.0, 4.0)
    got = gamma_contour_integral(loop, 1.0, 4.0)
    want = alternating_pole_sum(1.0, 4.0)
    assert abs(got - want) <= 1e-12 * abs(want)


def test_union_grid_orders_line_first():
    loop = build_hairpin(T=6.0)
    line = build_vertical(T=6.0)
    union = union_grid(line, loop)
    n_line = len(line)
    assert np.all(union.labels[:n_line] == LINE)
    assert np.all(union.labels[n_line:] == LOOP)
    assert len(union) == len(line) + len(loop)
    np.testing.assert_allclose(union.weights[:n_line], line.weights)


def test_union_grid_rejects_overlap():
    loop = build_hairpin(nose=0.48, T=6.0)
    line = build_vertical(b=0.5, T=6.0)  # separation 0.02 < margin
    with pytest.raises(GeometryError):
        union_grid(line, loop)


def test_geometry_validation():
    with pytest.raises(GeometryError):
        build_hairpin(delta=0.5)
    with pytest.raises(GeometryError):
        build_hairpin(T=3.0)
    with pytest.raises(GeometryError):
        build_hairpin(order=2)
    with pytest.raises(GeometryError):
        build_vertical(T=3.0)
    with pytest.raises(GeometryError):
        build_closed_loop(left_edge=-1.0)   # sits on a pole
    with pytest.raises(GeometryError):
        build_closed_loop(left_edge=-0.5, nose=0.1)  # nose < delta


def test_line_integral_self_convergence():
    # reciprocal-gamma integrand: stable under doubling the truncation
    from critgap.special import recip_gamma
    vals = []
    for T in (8.0, 16.0):
        grid = build_vertical(b=0.5, T=T, max_frequency=3.0)
        f = np.array([recip_gamma(s) for s in grid.nodes])
        vals.append(grid.integrate(f * np.exp(grid.nodes ** 2 - 3.0 * grid.nodes)))
    assert abs(vals[0] - vals[1]) <= 1e-10 * (1.0 + abs(vals[1]))


def test_grid_json_round_trip():
    import json

    grid = build_vertical(T=6.0)
    blob = json.loads(grid.to_json())
    nodes = np.array([complex(re, im) for re, im in blob["nodes"]])
    np.testing.assert_allclose(nodes, grid.nodes)
    assert blob["order"] == grid.order
