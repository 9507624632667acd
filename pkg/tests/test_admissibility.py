import random
from fractions import Fraction

import pytest

from ahyper.admissibility import (
    ParameterVector,
    admissibility,
    as_parameter,
    in_omega_zero,
    nondegenerate,
    nonresonant,
    nonresonant_report,
)
from ahyper.lattice import PointConfiguration, build_delta

BESSEL = PointConfiguration(1, ((1,), (-1,)))
AIRY = PointConfiguration(1, ((3,), (1,)))
TRI = PointConfiguration(2, ((1, 0), (0, 1), (-1, -1)))


def test_parameter_parsing():
    c = as_parameter(["1/3"])
    assert c.is_exact and c.exact[0] == (Fraction(1, 3), Fraction(0))
    c = as_parameter([("1/2", "-2/5")])
    assert c.components[0] == pytest.approx(0.5 - 0.4j)
    c = as_parameter([0.3333333])
    assert not c.is_exact
    c = as_parameter(["0.25"])  # decimal strings parse exactly
    assert c.is_exact and c.exact[0][0] == Fraction(1, 4)


def test_nonresonant_bessel_any_c():
    P = build_delta(BESSEL)
    for c in ["1/3", 2, "-7/2", ("1/2", "1/3")]:
        assert nonresonant(P, [c])


def test_nonresonant_airy():
    P = build_delta(AIRY)
    assert nonresonant(P, ["1/3"])
    assert not nonresonant(P, [2])


def test_nonresonant_triangle_any_c():
    P = build_delta(TRI)
    assert nonresonant(P, ["1/2", "22/7"])
    assert nonresonant(P, [3, -5])


def test_nonresonant_mod_z_invariance():
    rng = random.Random(9)
    P = build_delta(AIRY)
    for _ in range(50):
        c = [(Fraction(rng.randint(-20, 20), rng.randint(1, 9)),
              Fraction(rng.randint(-5, 5), rng.randint(1, 7)))]
        v = [rng.randint(-4, 4)]
        cp = ParameterVector.make(c)
        assert nonresonant(P, cp) == nonresonant(P, cp.shifted(v))


def test_nonresonant_heuristic_tier():
    P = build_delta(AIRY)
    ok, conf, detail = nonresonant_report(P, [0.5])
    assert ok and conf == "heuristic"
    ok, conf, detail = nonresonant_report(P, [2.0 + 1e-12])
    assert not ok and conf == "heuristic"
    assert any(d.get("note") == "resonance-suspect" for d in detail)


def test_nondegenerate_bessel_vertex_criterion():
    assert nondegenerate(BESSEL, [0.5, 0.5]).ok
    assert not nondegenerate(BESSEL, [1, 0]).ok
    assert not nondegenerate(BESSEL, [0, 1]).ok


def test_nondegenerate_airy():
    rep = nondegenerate(AIRY, [1 / 3, -1])
    assert rep.ok
    # the only face of Delta=[0,3] away from the origin is the vertex {3}
    assert [e.kind for e in rep.evidence] == ["vertex"]


def test_nondegenerate_triangle():
    rep = nondegenerate(TRI, [1, 1, 1])
    assert rep.ok
    kinds = sorted(e.kind for e in rep.evidence)
    assert kinds == ["edge"] * 3 + ["vertex"] * 3


def test_nondegenerate_edge_repeated_root():
    # edge part z1 + z2 x + z3 x^2 on the segment [0..2]x{1}: (1+u)^2 has a double root
    cfg = PointConfiguration(2, ((0, 1), (1, 1), (2, 1), (0, -1)))
    assert not nondegenerate(cfg, [1, 2, 1, 1]).ok
    assert nondegenerate(cfg, [1, 3, 1, 1]).ok


def test_edge_on_ray_through_origin_is_not_quantified():
    # a line through two support points and the origin: since 0 is in Delta,
    # the corresponding face of Delta contains 0 and is excluded from the
    # non-degeneracy quantifier (the face is [0, (3,3)], not [(1,1), (3,3)])
    cfg = PointConfiguration(2, ((1, 1), (3, 3), (1, 0), (-1, -2)))
    rep = nondegenerate(cfg, [1, 1, 1, 1])
    for e in rep.evidence:
        assert not ((1, 1) in e.vertices and (3, 3) in e.vertices)


def test_nondegenerate_n1_closed_form_1000_random():
    rng = random.Random(123)
    for _ in range(1000):
        size = rng.randint(2, 5)
        pts = set()
        while len(pts) < size:
            pts.add(rng.randint(-4, 4))
        pts = sorted(pts)
        if 1 not in pts and -1 not in pts:
            pts.append(1)  # keep Z-generation
        try:
            cfg = PointConfiguration(1, tuple((p,) for p in pts))
        except Exception:
            continue
        z = [rng.choice([0, 0, 1]) * complex(rng.uniform(-1, 1), rng.uniform(-1, 1))
             for _ in pts]
        lo = min(min(pts), 0)
        hi = max(max(pts), 0)
        expect = True
        for endpoint in (lo, hi):
            if endpoint == 0:
                continue
            coeff = z[pts.index(endpoint)]
            if coeff == 0:
                expect = False
        got = nondegenerate(cfg, z).ok
        assert got == expect, (pts, z)


def test_nondegenerate_scaling_invariance():
    rng = random.Random(77)
    for lam in (2.0, -3.0 + 1.0j, 1e-3):
        for _ in range(20):
            z = [complex(rng.uniform(-1, 1), rng.uniform(-1, 1)) for _ in range(3)]
            a = nondegenerate(TRI, z).ok
            b = nondegenerate(TRI, [lam * v for v in z]).ok
            assert a == b


def test_in_omega_zero_examples():
    assert in_omega_zero(BESSEL, [0.5, 0.5]).ok
    assert not in_omega_zero(BESSEL, [1, 0]).ok
    # h = (1/3) x^3: the only face of Delta=[0,3] away from 0 is the vertex {3}
    # (coefficient 1/3 != 0) and the critical system x^3 = 0 is empty on the
    # torus, so membership holds vacuously
    assert in_omega_zero(AIRY, [1 / 3, 0]).ok


def test_in_omega_zero_scaling():
    for lam in (2.0, 10.0):
        assert in_omega_zero(BESSEL, [lam / 2, lam / 2]).ok
        assert in_omega_zero(TRI, [lam, lam, lam]).ok


def test_in_omega_zero_rejects_double_root():
    # theta h = x (3x^2 + 2x + 1/3) has a double root at x = -1/3
    cfg = PointConfiguration(1, ((1,), (2,), (3,)))
    assert not in_omega_zero(cfg, [1 / 3, 1, 1]).ok


def test_admissibility_aggregate():
    P = build_delta(BESSEL)
    v = admissibility(BESSEL, ["1/3"], [0.5, 0.5], P)
    assert v.nonresonant and v.nondegenerate.ok and v.in_omega_zero
    v = admissibility(AIRY, [2], [1 / 3, -1])
    assert not v.nonresonant and v.nondegenerate.ok
