"""Genericity checks: nonresonance of the parameter and non-degeneracy of h_z.

Nonresonance is an arithmetic property (membership of <kappa, c> in Z), so
it is decided over exact rationals whenever the parameter is given
exactly; float parameters fall back to a proximity heuristic and are
flagged as such.

Non-degeneracy quantifies over the proper faces of Delta avoiding the
origin: vertex faces reduce to a nonzero coefficient, edge faces to a
repeated-root test of a univariate reduction, and two-dimensional faces
(n = 3) to a small torus system solved numerically.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import UnsupportedDimension
from .intlin import (
    dot,
    int_rank,
    kernel_basis,
    primitive,
    solve_integer_coords,
    solve_rational_coords,
    sub,
)
from .lattice import LatticePolytope, PointConfiguration, build_delta, proper_faces_avoiding_origin
from .laurent import from_config

EXACT = "exact"
CERTIFIED = "numeric-certified"
HEURISTIC = "heuristic"

_CONF_ORDER = {EXACT: 0, CERTIFIED: 1, HEURISTIC: 2}

RESONANCE_PROXIMITY = 1e-9
EDGE_ROOT_SEPARATION = 1e-9


def _to_fraction_pair(entry):
    """Parse one parameter component into (re, im) Fractions, or None if inexact."""
    if isinstance(entry, (tuple, list)):
        if len(entry) != 2:
            raise ValueError("complex parameter entries are [re, im] pairs")
        re, im = entry
    elif isinstance(entry, complex):
        re, im = entry.real, entry.imag
    else:
        re, im = entry, 0

    def conv(v):
        if isinstance(v, Fraction):
            return v
        if isinstance(v, int):
            return Fraction(v)
        if isinstance(v, str):
            return Fraction(v)  # accepts "p/q" and decimal strings
        return None  # float and everything else: inexact

    fre, fim = conv(re), conv(im)
    if fre is None or fim is None:
        return None, complex(float(re), float(im))
    return (fre, fim), complex(float(fre), float(fim))


@dataclass(frozen=True)
class ParameterVector:
    """Parameter c in C^n with exact rational real/imaginary parts when available."""

    exact: tuple      # per-component (Fraction, Fraction) or None
    components: tuple  # complex float view

    @classmethod
    def make(cls, entries):
        exact, comp = [], []
        for e in entries:
            ex, c = _to_fraction_pair(e)
            exact.append(ex)
            comp.append(c)
        return cls(tuple(exact), tuple(comp))

    @property
    def n(self):
        return len(self.components)

    @property
    def is_exact(self):
        return all(e is not None for e in self.exact)

    def shifted(self, intvec):
        """c + v for an integer vector v (used by the mod-Z invariance test)."""
        ents = []
        for e, c, v in zip(self.exact, self.components, intvec):
            if e is None:
                ents.append(complex(c.real + v, c.imag))
            else:
                ents.append((e[0] + v, e[1]))
        return ParameterVector.make(ents)

    def minus_one(self):
        return self.shifted([-1] * self.n)


def as_parameter(c):
    if isinstance(c, ParameterVector):
        return c
    if isinstance(c, (int, float, complex, Fraction, str)):
        c = [c]
    return ParameterVector.make(list(c))


def nonresonant(P: LatticePolytope, c) -> bool:
    ok, _conf, _detail = nonresonant_report(P, c)
    return ok


def nonresonant_report(P: LatticePolytope, c):
    """Decide c ∉ Z^n + Lin(Gamma) for every codimension-1 face Gamma through 0.

    Since 0 in Gamma makes Lin(Gamma) the hyperplane kappa^perp for the
    facet's primitive inner normal, the membership reduces to
    <kappa, c> in Z, decided exactly for rational c.
    """
    c = as_parameter(c)
    if c.n != P.n:
        raise ValueError("parameter dimension mismatch")
    detail = []
    ok = True
    conf = EXACT
    for f in P.facets:
        if not f.contains_origin:
            continue
        if c.is_exact:
            re = sum(Fraction(k) * e[0] for k, e in zip(f.kappa, c.exact))
            im = sum(Fraction(k) * e[1] for k, e in zip(f.kappa, c.exact))
            in_z = (im == 0 and re.denominator == 1)
            detail.append({"kappa": f.kappa, "pairing": f"{re}+{im}i", "integer": in_z,
                           "confidence": EXACT})
        else:
            val = sum(k * cc for k, cc in zip(f.kappa, c.components))
            dist = abs(val.imag) + abs(val.real - round(val.real))
            in_z = dist < RESONANCE_PROXIMITY
            conf = HEURISTIC
            detail.append({"kappa": f.kappa, "pairing": val, "integer": in_z,
                           "confidence": HEURISTIC, "note": "resonance-suspect" if in_z else ""})
        if in_z:
            ok = False
    return ok, conf, detail


@dataclass
class FaceEvidence:
    kind: str          # "vertex" | "edge" | "face2"
    vertices: tuple
    ok: bool
    confidence: str
    detail: str = ""
    witness: tuple = ()


@dataclass
class NondegeneracyReport:
    ok: bool
    confidence: str
    evidence: list = field(default_factory=list)

    def __bool__(self):
        return self.ok


def _edge_reduction(face, config, z):
    """Exponent positions and coefficients of h^Gamma along an edge direction."""
    pts = [(a, zz) for a, zz in zip(config.points, z) if face.contains(a)]
    verts = sorted(face.vertices)
    d = primitive(sub(verts[-1], verts[0]))
    # position of each point along the edge
    j = next(i for i, x in enumerate(d) if x != 0)
    base = min((p for p, _ in pts), key=lambda p: (p[j] - verts[0][j]) // d[j]) if pts else verts[0]
    ks, cs, apts = [], [], []
    for p, zz in pts:
        t = (p[j] - base[j]) // d[j]
        ks.append(t)
        cs.append(zz)
        apts.append(p)
    return base, d, ks, cs, apts


def _poly_from_positions(ks, cs):
    deg = max(ks) if ks else 0
    coeffs = np.zeros(deg + 1, dtype=np.complex128)
    for k, c in zip(ks, cs):
        coeffs[deg - k] += c  # np.roots order: highest degree first
    return coeffs


def _repeated_root_separation(coeffs):
    """Estimate how far p is from having a repeated C* root.

    For each root rho of p' (Newton-polished), the two p-roots that would
    coalesce there sit at rho +- sqrt(2 p(rho)/p''(rho)); the smallest such
    relative splitting is returned, or None when p' has no C* roots.
    """
    p = np.polynomial.Polynomial(coeffs[::-1])
    dp = p.deriv()
    d2p = dp.deriv()
    lead = float(np.max(np.abs(coeffs)))
    best = None
    witness = None
    for rho in np.roots(coeffs[:-1] * np.arange(len(coeffs) - 1, 0, -1)) if len(coeffs) > 2 else []:
        if abs(rho) < 1e-12:
            continue
        for _ in range(8):  # polish on p'
            dv = dp(rho)
            d2v = d2p(rho)
            if abs(d2v) < 1e-300:
                break
            rho = rho - dv / d2v
        pv = p(rho)
        scale_at = lead * max(1.0, abs(rho)) ** (len(coeffs) - 1)
        d2v = d2p(rho)
        if abs(pv) <= 1e-15 * scale_at:
            sep = 0.0
        elif abs(d2v) > 1e-12 * scale_at:
            sep = 2.0 * abs(np.sqrt(2.0 * pv / d2v)) / max(1.0, abs(rho))
        else:
            sep = (abs(pv) / scale_at) ** (1.0 / 3.0)
        if best is None or sep < best:
            best = sep
            witness = complex(rho)
    return best, witness


def _check_edge(face, config, z):
    base, d, ks, cs, _ = _edge_reduction(face, config, z)
    nz = [(k, c) for k, c in zip(ks, cs) if c != 0]
    scale = max((abs(c) for _, c in nz), default=0.0)
    if not nz:
        return FaceEvidence("edge", face.vertices, False, EXACT,
                            "face part vanishes identically")
    span_rank = int_rank([base, d])
    if span_rank <= 1:
        # 0 lies on the line through the edge: a(j) = (s + k_j) d
        j = next(i for i, x in enumerate(d) if x != 0)
        s = Fraction(base[j], d[j])
        qc = [(k, (s + k) * c) for k, c in nz if (s + k) != 0]
        if len(qc) == 0:
            return FaceEvidence("edge", face.vertices, False, EXACT,
                                "Euler reduction vanishes identically")
        if len(qc) == 1:
            return FaceEvidence("edge", face.vertices, True, EXACT,
                                "Euler reduction is a monomial")
        coeffs = _poly_from_positions([k for k, _ in qc],
                                      [complex(c) for _, c in qc])
        roots = [r for r in np.roots(coeffs) if abs(r) > 1e-12]
        w = roots[0]
        return FaceEvidence("edge", face.vertices, False, CERTIFIED,
                            "Euler reduction has a torus root", (w,))
    # generic edge: repeated C*-root test of p(u), decided by whether p and
    # p' share a root (evaluate p at the polished roots of p')
    if len(nz) == 1:
        return FaceEvidence("edge", face.vertices, True, EXACT, "monomial face part")
    coeffs = _poly_from_positions([k for k, _ in nz], [complex(c) for _, c in nz])
    sep, witness = _repeated_root_separation(coeffs)
    if sep is None or sep >= EDGE_ROOT_SEPARATION:
        conf = CERTIFIED if (sep is None or sep >= 1e-6) else HEURISTIC
        msg = "no critical points of the edge polynomial on C*" if sep is None \
            else f"estimated nearest double-root separation {sep:.3e}"
        return FaceEvidence("edge", face.vertices, True, conf, msg)
    conf = CERTIFIED if sep < 1e-12 else HEURISTIC
    return FaceEvidence("edge", face.vertices, False, conf,
                        f"repeated torus root (separation estimate {sep:.3e})",
                        (witness,))


def _check_face2(face, config, z):
    """Two-dimensional face of an n=3 polytope: small torus system, multi-start."""
    from .critical import _solve_system_2d  # local import to avoid a cycle
    from .laurent import LaurentPolynomial, TorusPoint, euler_derivative, evaluate

    pts = [(a, zz) for a, zz in zip(config.points, z) if face.contains(a)]
    nz = [(a, zz) for a, zz in pts if zz != 0]
    if not nz:
        return FaceEvidence("face2", face.vertices, False, EXACT,
                            "face part vanishes identically")
    kappa = face.tight[0][0]
    basis = kernel_basis(kappa)
    base = nz[0][0]
    ks = [solve_integer_coords(basis, sub(a, base)) for a, _ in nz]
    g = LaurentPolynomial(2, {k: c for k, c in zip(ks, [c for _, c in nz])})
    scale = max(1.0, g.coeff_scale())
    if int_rank([base] + list(basis)) == 3:
        # 0 off the affine span: need a common torus zero of (g, theta_1 g, theta_2 g)
        eqs = [g, euler_derivative(g, 1), euler_derivative(g, 2)]
        live = [e for e in eqs if not e.is_zero]
        if len(live) < 2:
            # g is a nonzero monomial: no torus zero at all
            return FaceEvidence("face2", face.vertices, True, EXACT, "monomial face part")
        sols = _solve_system_2d(live[0], live[1])
        rest = live[2:]
        for w in sols:
            tp = TorusPoint.from_coordinates(w)
            if all(abs(evaluate(e, tp)) <= 1e-7 * scale for e in rest):
                return FaceEvidence("face2", face.vertices, False, CERTIFIED,
                                    "torus critical point on the face", tuple(w))
        return FaceEvidence("face2", face.vertices, True, CERTIFIED,
                            f"no common zero among {len(sols)} candidates")
    # origin in the affine span of the face: square Euler-reduced system
    s1, s2 = solve_rational_coords([basis[0], basis[1]], base)
    f1 = LaurentPolynomial(2, {a: float(s1 + a[0]) * c for a, c in g.terms.items()})
    f2 = LaurentPolynomial(2, {a: float(s2 + a[1]) * c for a, c in g.terms.items()})
    if f1.is_zero and f2.is_zero:
        return FaceEvidence("face2", face.vertices, False, EXACT,
                            "Euler reduction vanishes identically")
    if f1.is_zero or f2.is_zero:
        live = f2 if f1.is_zero else f1
        if len(live.terms) == 1:
            return FaceEvidence("face2", face.vertices, True, EXACT,
                                "Euler reduction is a monomial")
        return FaceEvidence("face2", face.vertices, False, EXACT,
                            "Euler reduction cuts a torus curve")
    sols = _solve_system_2d(f1, f2)
    if sols:
        return FaceEvidence("face2", face.vertices, False, CERTIFIED,
                            "torus critical point on the face", tuple(sols[0]))
    return FaceEvidence("face2", face.vertices, True, CERTIFIED, "no torus solution found")


def nondegenerate(config: PointConfiguration, z, P: LatticePolytope = None) -> NondegeneracyReport:
    """Adolphson non-degeneracy of h_z: empty face-critical sets for all faces avoiding 0."""
    P = P or build_delta(config)
    z = [complex(v) for v in z]
    evidence = []
    for face in proper_faces_avoiding_origin(P):
        if face.dim == 0:
            v = face.vertices[0]
            coeff = next((zz for a, zz in zip(config.points, z) if a == v), 0j)
            evidence.append(FaceEvidence("vertex", face.vertices, coeff != 0, EXACT,
                                         f"coefficient {coeff}"))
        elif face.dim == 1:
            evidence.append(_check_edge(face, config, z))
        elif face.dim == 2 and P.n == 3:
            evidence.append(_check_face2(face, config, z))
        else:
            raise UnsupportedDimension(
                f"face systems of dimension {face.dim} beyond n=3 are not implemented")
    ok = all(e.ok for e in evidence)
    conf = max((e.confidence for e in evidence), key=lambda s: _CONF_ORDER[s], default=EXACT)
    return NondegeneracyReport(ok, conf, evidence)


@dataclass
class OmegaZeroVerdict:
    ok: bool
    nondegenerate: NondegeneracyReport
    critical_points: list
    confidence: str
    detail: str = ""

    def __bool__(self):
        return self.ok


def in_omega_zero(config: PointConfiguration, z, P: LatticePolytope = None) -> OmegaZeroVerdict:
    """z in Omega_0: non-degenerate and every torus critical point Morse.

    Propagates SolveIncomplete from the critical-point solver (failing the
    count certificate is signal, not something to paper over).
    """
    from .critical import solve_critical

    nd = nondegenerate(config, z, P)
    if not nd.ok:
        return OmegaZeroVerdict(False, nd, [], nd.confidence, "fails non-degeneracy")
    h = from_config(config, z)
    if h.is_zero:
        return OmegaZeroVerdict(False, nd, [], EXACT, "zero polynomial")
    pts = solve_critical(h)
    morse = all(p.morse for p in pts)
    conf = max([nd.confidence, CERTIFIED], key=lambda s: _CONF_ORDER[s])
    return OmegaZeroVerdict(morse, nd, pts, conf,
                            "" if morse else "non-Morse critical point present")


@dataclass
class AdmissibilityVerdict:
    nonresonant: bool
    nondegenerate: NondegeneracyReport
    in_omega_zero: bool
    confidence: str
    detail: dict = field(default_factory=dict)


def admissibility(config: PointConfiguration, c, z, P: LatticePolytope = None) -> AdmissibilityVerdict:
    P = P or build_delta(config)
    nr, nr_conf, nr_detail = nonresonant_report(P, c)
    from .errors import SolveIncomplete

    nd = nondegenerate(config, z, P)
    if nd.ok:
        try:
            om = in_omega_zero(config, z, P)
            om_ok, om_conf, om_detail = om.ok, om.confidence, om.detail
        except SolveIncomplete as exc:
            om_ok, om_conf, om_detail = False, HEURISTIC, str(exc)
    else:
        om_ok, om_conf, om_detail = False, nd.confidence, "fails non-degeneracy"
    conf = max([nr_conf, nd.confidence, om_conf], key=lambda s: _CONF_ORDER[s])
    return AdmissibilityVerdict(nr, nd, om_ok, conf,
                                {"nonresonance": nr_detail, "omega0": om_detail})
