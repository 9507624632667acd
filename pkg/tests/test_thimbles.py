import cmath
import math

import numpy as np
import pytest

from ahyper.critical import solve_critical
from ahyper.errors import HypothesisViolation, NoPole, ResonantBranch
from ahyper.lattice import PointConfiguration
from ahyper.laurent import LaurentPolynomial, TorusPoint, from_config, theta_gradient
from ahyper.thimbles import (
    R_CUT,
    build_thimble,
    cycle_basis_1d,
    descent_frame,
    loop_cycle,
    make_ray_grid,
    sectors_1d,
    thimble_basis,
    trace_descent,
)

BESSEL = PointConfiguration(1, ((1,), (-1,)))
AIRY = PointConfiguration(1, ((3,), (1,)))
TRI = PointConfiguration(2, ((1, 0), (0, 1), (-1, -1)))

H_BESSEL = from_config(BESSEL, (0.5, 0.5))
H_AIRY = from_config(AIRY, (1 / 3, -1))
H_TRI = from_config(TRI, (1, 1, 1))


def test_sectors_airy_infinity():
    secs = sectors_1d(H_AIRY, "at-infinity")
    want = [(math.pi / 6, math.pi / 2),
            (5 * math.pi / 6, 7 * math.pi / 6),
            (3 * math.pi / 2, 11 * math.pi / 6)]
    assert len(secs) == 3
    for s, (lo, hi) in zip(secs, want):
        assert s.theta_lo == pytest.approx(lo)
        assert s.theta_hi == pytest.approx(hi)


def test_sectors_bessel_both_divisors():
    inf = sectors_1d(H_BESSEL, "at-infinity")
    zer = sectors_1d(H_BESSEL, "at-zero")
    assert len(inf) == 1 and len(zer) == 1
    assert inf[0].theta_lo == pytest.approx(math.pi / 2)
    assert inf[0].theta_hi == pytest.approx(3 * math.pi / 2)
    assert zer[0].theta_lo == pytest.approx(math.pi / 2)
    assert zer[0].theta_hi == pytest.approx(3 * math.pi / 2)


def test_sectors_pure_pole_at_zero():
    h = LaurentPolynomial(1, {(-2,): 1.0})
    assert len(sectors_1d(h, "at-zero")) == 2
    with pytest.raises(NoPole):
        sectors_1d(h, "at-infinity")


def test_sector_decay_property():
    # exp(h) decays along the mid-angle of every sector at its divisor
    for h in (H_BESSEL, H_AIRY, from_config(BESSEL, (0.3 + 0.4j, -0.2 + 0.9j))):
        for divisor, r in (("at-infinity", 40.0), ("at-zero", 1 / 40.0)):
            try:
                secs = sectors_1d(h, divisor)
            except NoPole:
                continue
            for s in secs:
                x = TorusPoint.from_logs([complex(math.log(r), s.mid)])
                val = theta_gradient(h, x)[0]
                assert val.real < -1.0, (divisor, s)


def test_cycle_basis_counts():
    assert len(cycle_basis_1d(H_AIRY, [1])) == 3
    assert len(cycle_basis_1d(H_BESSEL, ["1/3"])) == 2
    h = from_config(PointConfiguration(1, ((1,),)), (1.0,))
    assert len(cycle_basis_1d(h, [1])) == 1  # Hankel-type contour, Vol_Z([0,1]) = 1


def test_cycle_basis_resonant_branch():
    with pytest.raises(ResonantBranch):
        cycle_basis_1d(H_BESSEL, [1])  # two-sided with integer c
    cycle_basis_1d(H_AIRY, [1])  # one-sided: integer c is fine


def test_cycle_branch_log_continuity():
    for cyc in cycle_basis_1d(H_AIRY, [1]) + cycle_basis_1d(H_BESSEL, ["1/3"]):
        us = [p.log_branch[0] for p in cyc.samples]
        for a, b in zip(us[:-1], us[1:]):
            assert abs(b - a) < math.pi / 4


def test_cycle_endpoint_decay():
    for cyc in cycle_basis_1d(H_AIRY, [1]):
        us = [p.log_branch[0] for p in cyc.samples]
        w = [theta_gradient(H_AIRY, p)[0].real + (1 - 1) * u.real
             for p, u in zip(cyc.samples, us)]
        assert w[0] - max(w) < math.log(1e-16)
        assert w[-1] - max(w) < math.log(1e-16)


def test_descent_frame_bessel():
    crit = solve_critical(H_BESSEL)
    plus = [p for p in crit if abs(p.coords[0] - 1) < 1e-9][0]
    frame, sigmas = descent_frame(plus.theta_hessian)
    # theta-theta h = (x + 1/x)/2 = 1 at x = 1: descent along the unit circle
    assert sigmas[0] == pytest.approx(1.0)
    assert abs(frame[0, 0].real) < 1e-12 and abs(abs(frame[0, 0].imag) - 1) < 1e-12


def test_trace_descent_invariants():
    crit = solve_critical(H_BESSEL)
    minus = [p for p in crit if abs(p.coords[0] + 1) < 1e-9][0]
    frame, _ = descent_frame(minus.theta_hessian)
    grid = make_ray_grid(R_CUT)
    ray = trace_descent(H_BESSEL, minus, frame[:, 0], grid)
    hs = np.array([theta_gradient(H_BESSEL, TorusPoint.from_logs(u))[0]
                   for u in ray.us])
    # Im h conserved, Re h strictly decreasing along the ray
    assert np.max(np.abs(hs.imag - minus.value.imag)) < 1e-6 * max(1.0, abs(minus.value))
    assert np.all(np.diff(hs.real) < 0)
    assert hs.real[0] < minus.value.real


def test_trace_descent_rejects_ascent_direction():
    crit = solve_critical(H_BESSEL)
    plus = [p for p in crit if abs(p.coords[0] - 1) < 1e-9][0]
    with pytest.raises(ValueError):
        trace_descent(H_BESSEL, plus, np.array([1.0 + 0j]))  # ascent at x=1


def test_thimble_basis_counts_and_tie_rotation():
    crit = solve_critical(H_BESSEL)
    basis = thimble_basis(H_BESSEL, [1], crit)
    assert len(basis) == 2
    phases = sorted(abs(t.flow_phase) for t in basis)
    assert phases[0] == 0.0          # descent from the lower saddle is clean
    assert phases[1] > 0.0           # upper saddle needs the tie rotation


def test_thimble_ray_invariants_bessel():
    crit = solve_critical(H_BESSEL)
    for t in thimble_basis(H_BESSEL, [1], crit):
        rot = cmath.exp(1j * t.flow_phase)
        ref = rot * t.saddle.value
        for ray in t.rays:
            vals = np.array([theta_gradient(t.flow_h, TorusPoint.from_logs(u))[0]
                             for u in ray.us])
            assert np.max(np.abs(vals.imag - ref.imag)) \
                < 1e-6 * max(1.0, abs(t.saddle.value)) + 1e-9
            assert np.all(np.diff(vals.real) < 0)
            # branch-log continuity along the stored ray
            gaps = np.max(np.abs(np.diff(ray.us, axis=0)), axis=1)
            assert float(gaps.max()) < math.pi / 4


def test_thimble_basis_triangle_loops():
    crit = solve_critical(H_TRI)
    basis = thimble_basis(H_TRI, [1, 1], crit)
    assert len(basis) == 3
    for t in basis:
        assert t.flow_phase == 0.0   # distinct imaginary parts: no rotation needed
        loops = t.loops
        assert loops is not None
        rot = cmath.exp(1j * t.flow_phase)
        # Im(flow h) constant across every stored level loop
        for lv in (0, len(loops.taus) // 2, len(loops.taus) - 1):
            U = loops.loops[lv]
            vals = np.exp(U @ t.flow_h.exponents.T) @ t.flow_h.coefficients
            assert np.max(np.abs(vals.imag - (rot * t.saddle.value).imag)) \
                < 1e-6 * max(1.0, abs(t.saddle.value))
            # level loops sit exactly on their Re h level
            drop = (rot * t.saddle.value).real - vals.real
            assert np.max(np.abs(drop - loops.taus[lv])) < 1e-8 * (1 + loops.taus[lv])
            # consecutive samples stay close in u
            closed = np.vstack([U, U[:1]])
            assert np.max(np.abs(np.diff(closed, axis=0))) < math.pi / 4
        # flow hops stayed small during evolution
        assert loops.max_hop < math.pi / 4


def test_thimble_basis_hypothesis_violation():
    crit = solve_critical(H_AIRY)
    with pytest.raises(HypothesisViolation):
        thimble_basis(H_AIRY, [1], crit)


def test_refinement_stability():
    # halving the flow tolerance moves stored ray endpoints by < 1e-6 relative
    crit = solve_critical(H_BESSEL)
    minus = [p for p in crit if abs(p.coords[0] + 1) < 1e-9][0]
    frame, _ = descent_frame(minus.theta_hessian)
    grid = make_ray_grid(R_CUT)
    a = trace_descent(H_BESSEL, minus, frame[:, 0], grid, rtol=1e-9)
    b = trace_descent(H_BESSEL, minus, frame[:, 0], grid, rtol=1e-10)
    rel = np.max(np.abs(a.us[-1] - b.us[-1])) / max(1.0, np.max(np.abs(b.us[-1])))
    assert rel < 1e-6


def test_loop_cycle_closure():
    c = loop_cycle(radius=0.5)
    first, last = c.samples[0], c.samples[-1]
    assert first.coordinates[0] == pytest.approx(last.coordinates[0])
    assert (last.log_branch[0] - first.log_branch[0]).imag == pytest.approx(2 * math.pi)
