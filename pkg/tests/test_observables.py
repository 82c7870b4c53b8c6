"""Riemann-Hilbert observable tests.

The derivative identities are checked against finite differences of the
independently computed determinant; asymptotic anchors were evaluated with
mpmath at 25 digits and frozen.
"""

from __future__ import annotations

import math

import numpy as np
import pytest

from critgap import fredholm, observables
from critgap.contours import GeometryError
from critgap.observables import (RhWorkspace, UnderflowWarning, asym_u1_12,
                                 asym_u1_12_closed, asym_u1_21,
                                 log_gap_from_u, log_u_asymptotic,
                                 residue_sum, u_asym_composed, u_asymptotic,
                                 u_of_x, y1_matrix)

U_ASYM_ANCHORS = [
    (2.0, 2.0, 0.1037768743551486758350671),   # log(x/alpha) = 0 cases
    (1.0, 1.0, 0.2419707245191433497978302),
    (10.0, 2.0, 8.542491838342900122802461e-14),
    (6.0, 2.0, 1.287276724589378442184321e-5),
]

RESIDUE_SUM_ANCHORS = [
    (2.0, 1.0, 0.8659030689022088870830544),
    (2.0, 4.0, 0.9932651249807157175497042),
    (1.0, 1.0, 0.7859357343672298429280077),
]


def test_u_asymptotic_anchors():
    for x, alpha, ref in U_ASYM_ANCHORS:
        assert u_asymptotic(x, alpha) == pytest.approx(ref, rel=1e-12)


def test_u_asymptotic_log_channel():
    for x, alpha, ref in U_ASYM_ANCHORS:
        assert log_u_asymptotic(x, alpha) == pytest.approx(math.log(ref),
                                                           rel=1e-12)
    # beyond double range the log stays finite while the value floors at 0
    assert u_asymptotic(60.0, 1.0) == 0.0
    assert log_u_asymptotic(60.0, 1.0) < -1000.0


def test_residue_sum_anchors():
    for alpha, a, ref in RESIDUE_SUM_ANCHORS:
        assert residue_sum(alpha, a) == pytest.approx(ref, rel=1e-14)


def test_residue_sum_monotone_to_one():
    prev = 0.0
    for a in np.linspace(2.0, 12.0, 9):
        s = residue_sum(1.0, float(a))
        assert prev < s < 1.0
        prev = s
    assert 1.0 - residue_sum(1.0, 12.0) <= 2e-5


def test_y1_log_derivative_identity():
    step = 1e-3
    for a, alpha in [(2.0, 1.0), (1.5, 2.0)]:
        lo = fredholm.gap_probability(a - step, alpha, "contour-Q",
                                      estimate_error=False).log_p
        hi = fredholm.gap_probability(a + step, alpha, "contour-Q",
                                      estimate_error=False).log_p
        diff = (hi - lo) / (2.0 * step)
        y1 = y1_matrix(a, alpha)
        assert abs(y1.log_deriv - diff) <= 1e-5 * (1.0 + abs(diff))


def test_y1_ode_identity():
    a, alpha, step = 2.0, 1.0, 1e-3
    ws = RhWorkspace(alpha, a + 1.0)
    lhs = (ws.y1(a + step).e11.real - ws.y1(a - step).e11.real) / (2.0 * step)
    y0 = ws.y1(a)
    assert abs(lhs - (y0.e12 * y0.e21).real) <= 1e-4


def test_y1_el11_vanishes_at_large_a():
    y1 = y1_matrix(8.0, 2.0)
    assert abs(y1.e11) <= 1e-6


def test_u_positive_on_right_tail():
    ws = RhWorkspace(2.0, 8.0)
    for x in (4.0, 6.0, 8.0):
        assert u_of_x(x, 2.0, ws) >= 0.0


def test_u_equals_second_log_derivative():
    # 5-point central second difference of log P(a) at a=2, alpha=1
    a, alpha, h = 2.0, 1.0, 2e-2
    logps = [fredholm.gap_probability(a + k * h, alpha, "contour-Q",
                                      estimate_error=False).log_p
             for k in (-2, -1, 0, 1, 2)]
    second = (-logps[0] + 16 * logps[1] - 30 * logps[2] + 16 * logps[3]
              - logps[4]) / (12.0 * h * h)
    assert u_of_x(a, alpha) == pytest.approx(-second, rel=1e-3)


def test_workspace_matches_fresh_build():
    # rescaled base matrices vs a from-scratch workspace at a different x_max
    wide = RhWorkspace(1.0, 6.0)
    narrow = RhWorkspace(1.0, 2.0)
    y_wide, y_narrow = wide.y1(2.0), narrow.y1(2.0)
    assert y_wide.e11 == pytest.approx(y_narrow.e11, rel=1e-8, abs=1e-10)
    assert (y_wide.e12 * y_wide.e21) == pytest.approx(
        y_narrow.e12 * y_narrow.e21, rel=1e-8, abs=1e-12)


def test_workspace_range_checks():
    ws = RhWorkspace(1.0, 3.0)
    with pytest.raises(ValueError):
        ws.y1(3.5)
    with pytest.raises(ValueError):
        ws.y1(0.0)
    with pytest.raises(ValueError):
        y1_matrix(-1.0, 1.0)
    with pytest.raises(ValueError):
        RhWorkspace(1.0, 0.0)


def test_closure_against_determinant():
    a, alpha = 2.0, 1.0
    rebuilt = log_gap_from_u(a, alpha)
    direct = fredholm.gap_probability(a, alpha, "contour-Q",
                                      estimate_error=False).log_p
    assert abs(rebuilt - direct) <= 1e-4
    # integrand positivity: each node contributes with one sign
    ws = RhWorkspace(alpha, a + 8.0)
    grid = fredholm.HalfLineGrid(a, 8.0, 4, 6)
    for x in grid.nodes[::5]:
        assert (x - a) * u_of_x(float(x), alpha, ws) >= 0.0


def test_closure_vanishes_at_large_a():
    assert abs(log_gap_from_u(8.0, 1.0)) <= 1e-10


def test_tail_moment_loop_routes_agree():
    for a, alpha in [(4.0, 2.0), (2.0, 1.0), (8.0, 2.0)]:
        quad = asym_u1_21(a, alpha, method="quadrature")
        res = asym_u1_21(a, alpha, method="residue")
        assert abs(quad - res) <= 1e-10 * abs(res)


def test_tail_moment_loop_normalization():
    # value * (a / (i alpha)) * exp(a^2 / (4 alpha)) -> 1 from below-ish
    for a in (6.0, 10.0, 14.0):
        val = asym_u1_21(a, 2.0, method="residue")
        scaled = (val * a / (1j * 2.0) * math.exp(a * a / 8.0)).real
        assert abs(scaled - 1.0) <= 2.0 * math.exp(-a)


def test_tail_moment_loop_geometry_guard():
    with pytest.raises(GeometryError):
        asym_u1_21(1.0, 2.0)
    with pytest.raises(GeometryError):
        asym_u1_21(0.5, 1.0)


def test_tail_moment_line_structure():
    val = asym_u1_12(4.0, 2.0)
    assert abs(val.real) <= 1e-10 * abs(val)   # purely imaginary
    v8 = asym_u1_12(4.0, 2.0, truncation=8.0)
    v12 = asym_u1_12(4.0, 2.0, truncation=12.0)
    assert abs(v8 - v12) <= 1e-12 * abs(v12)


def test_tail_moment_line_closed_form_window():
    ratio = asym_u1_12(10.0, 2.0) / asym_u1_12_closed(10.0, 2.0)
    assert 0.75 <= ratio.real <= 1.25
    assert abs(ratio.imag) <= 1e-10
    # window tightens as a grows
    r6 = asym_u1_12(6.0, 2.0) / asym_u1_12_closed(6.0, 2.0)
    assert abs(ratio.real - 1.0) < abs(r6.real - 1.0)


def test_u_asym_composed_windows():
    comp = u_asym_composed(6.0, 2.0)
    assert comp > 0.0
    assert 0.7 <= comp / u_asymptotic(6.0, 2.0) <= 1.3
    assert 0.7 <= comp / u_of_x(6.0, 2.0) <= 1.3


def test_asymptotic_ratio_improves():
    r6 = u_of_x(6.0, 2.0) / u_asymptotic(6.0, 2.0)
    r8 = u_of_x(8.0, 2.0) / u_asymptotic(8.0, 2.0)
    assert 0.5 <= r6 <= 1.5
    assert abs(r8 - 1.0) < abs(r6 - 1.0)


def test_underflow_warnings():
    with pytest.warns(UnderflowWarning):
        assert asym_u1_12(80.0, 1.0) == 0.0j
    with pytest.warns(UnderflowWarning):
        assert asym_u1_21(80.0, 1.0, method="residue") == 0.0j
    with pytest.warns(UnderflowWarning):
        asym_u1_12_closed(80.0, 1.0)


def test_domain_guards():
    from critgap.special import DomainError
    with pytest.raises(DomainError):
        u_asymptotic(-1.0, 1.0)
    with pytest.raises(DomainError):
        residue_sum(1.0, 0.0)
    with pytest.raises(DomainError):
        asym_u1_12(0.0, 1.0)
    with pytest.raises(ValueError):
        log_gap_from_u(0.0, 1.0)
