import cmath
import math

import numpy as np
import pytest

from ahyper.asymptotics import (
    asymptotic_ratio,
    dominance_order,
    estimate_beta1,
    leading_term,
    stokes_lines,
)
from ahyper.critical import solve_critical
from ahyper.lattice import PointConfiguration
from ahyper.laurent import from_config

BESSEL = PointConfiguration(1, ((1,), (-1,)))
TRI = PointConfiguration(2, ((1, 0), (0, 1), (-1, -1)))
H_BESSEL = from_config(BESSEL, (0.5, 0.5))
H_TRI = from_config(TRI, (1, 1, 1))


def saddle_at(crit, x):
    return [p for p in crit if abs(p.coords[0] - x) < 1e-8][0]


def test_leading_term_bessel_plus():
    crit = solve_critical(H_BESSEL)
    term = leading_term(H_BESSEL, [1], saddle_at(crit, 1.0), calibrate=False)
    assert term.prefactor == pytest.approx(1j * math.sqrt(2 * math.pi))
    assert term.rate == pytest.approx(1.0)
    assert term.power == -0.5
    # term at lambda: i sqrt(2 pi / lam) e^lam
    lam = 25.0
    assert term.evaluate(lam) == pytest.approx(1j * math.sqrt(2 * math.pi / lam)
                                               * math.exp(lam))


def test_leading_term_bessel_minus():
    crit = solve_critical(H_BESSEL)
    term = leading_term(H_BESSEL, [1], saddle_at(crit, -1.0), calibrate=False)
    assert abs(term.prefactor) == pytest.approx(math.sqrt(2 * math.pi))
    assert term.rate == pytest.approx(-1.0)


def test_squared_branch_invariant():
    for h, c in ((H_BESSEL, [1]), (H_TRI, [1, 1])):
        crit = solve_critical(h)
        for i, p in enumerate(crit):
            t = leading_term(h, c, p, index=i, calibrate=False)
            lhs = t.prefactor ** 2 * t.hessian_det
            rhs = t.alpha_power ** 2 * (2 * math.pi) ** h.n
            assert abs(lhs - rhs) <= 1e-12 * abs(rhs)


def test_calibrated_ratio_bessel():
    crit = solve_critical(H_BESSEL)
    plus = saddle_at(crit, 1.0)
    term = leading_term(H_BESSEL, [1], plus)
    ratios = asymptotic_ratio(H_BESSEL, [1], plus, term, [20.0, 40.0, 80.0])
    errs = [abs(r - 1) for _, r in ratios]
    assert errs[0] > errs[1] > errs[2]
    assert 0.35 <= errs[1] / errs[0] <= 0.65
    assert 0.35 <= errs[2] / errs[1] <= 0.65


def test_beta1_estimate_matches_bessel_series():
    # u(lam)/term = I_1 asymptotics: 2 pi i I_1(lam) ~ i sqrt(2pi/lam) e^lam (1 - 3/(8 lam))
    crit = solve_critical(H_BESSEL)
    plus = saddle_at(crit, 1.0)
    term = leading_term(H_BESSEL, [1], plus)
    ratios = asymptotic_ratio(H_BESSEL, [1], plus, term, [40.0, 80.0])
    est = estimate_beta1(ratios, term)
    assert est["beta1_ratio"].real == pytest.approx(-3 / 8, abs=2e-2)


def test_sector_guard():
    crit = solve_critical(H_BESSEL)
    plus = saddle_at(crit, 1.0)
    term = leading_term(H_BESSEL, [1], plus, calibrate=False)
    with pytest.raises(ValueError):
        asymptotic_ratio(H_BESSEL, [1], plus, term, [20.0 * cmath.exp(0.5j)])
    asymptotic_ratio(H_BESSEL, [1], plus, term, [20.0 * cmath.exp(0.5j)], force=True)


def test_stokes_lines_bessel():
    crit = solve_critical(H_BESSEL)
    lines, skipped = stokes_lines(crit)
    assert not skipped
    assert len(lines) == 1
    assert lines[0].angles[0] == pytest.approx(math.pi / 2)
    assert lines[0].angles[1] == pytest.approx(3 * math.pi / 2)


def test_stokes_lines_triangle():
    crit = solve_critical(H_TRI)
    lines, skipped = stokes_lines(crit)
    assert not skipped and len(lines) == 3
    angles = sorted(a for l in lines for a in l.angles)
    # pairwise differences of 3, 3w, 3w^2 give pi/3-spaced directions
    want = [k * math.pi / 3 for k in range(6)]
    for a, w in zip(angles, want):
        assert a == pytest.approx(w, abs=1e-12)


def test_stokes_single_point_empty():
    cfg = PointConfiguration(1, ((1,),))
    crit = solve_critical(from_config(cfg, (1.0,)))
    lines, skipped = stokes_lines(crit)
    assert lines == [] and skipped == []


def test_dominance_order_bessel():
    crit = solve_critical(H_BESSEL)
    i_plus = [i for i, p in enumerate(crit) if abs(p.coords[0] - 1) < 1e-9][0]
    i_minus = 1 - i_plus
    order, ties = dominance_order(crit, 1.0)
    assert order == [i_plus, i_minus] and not ties
    order, ties = dominance_order(crit, -1.0)
    assert order == [i_minus, i_plus]
    order, ties = dominance_order(crit, 1j)
    assert ties  # on the Stokes line


def test_dominance_scale_invariance():
    crit = solve_critical(H_TRI)
    rng = np.random.default_rng(3)
    for _ in range(20):
        lam = cmath.exp(1j * rng.uniform(0, 2 * math.pi))
        o1, _ = dominance_order(crit, lam)
        o2, _ = dominance_order(crit, rng.uniform(0.1, 7.0) * lam)
        assert o1 == o2


def test_stokes_crossing_flips():
    crit = solve_critical(H_TRI)
    lines, _ = stokes_lines(crit)
    angles = sorted(a for l in lines for a in l.angles)
    for theta, line_pair in [(a, l.pair) for l in lines for a in l.angles]:
        lo, _ = dominance_order(crit, cmath.exp(1j * (theta - 0.01)))
        hi, _ = dominance_order(crit, cmath.exp(1j * (theta + 0.01)))
        # exactly the line's pair swaps, adjacently
        diff = [k for k in range(3) if lo[k] != hi[k]]
        assert len(diff) == 2 and abs(diff[0] - diff[1]) == 1
        assert {lo[diff[0]], lo[diff[1]]} == set(line_pair)
        assert lo[diff[0]] == hi[diff[1]] and lo[diff[1]] == hi[diff[0]]
