"""Torus critical points of h_z, count certificates, and deformed systems.

Solver ladder:
  n = 1   clear denominators to one univariate polynomial, companion-matrix
          roots, Newton polish;
  n = 2   hidden-variable Sylvester resultant (determinant interpolated on a
          circle, coefficients by FFT), back-substitution, Newton polish;
          multi-start Newton top-up when the resultant path misses roots;
  n >= 3  multi-start Newton from log-uniform torus seeds.

Every returned point is polished on the Euler system theta_i h = 0 and
deduplicated at 1e-8 relative distance; the count is certified against
Vol_Z(Delta) when the origin is interior (Bernstein count).
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateConfiguration, GenericityFailure, SolveIncomplete
from .lattice import LatticePolytope, normalized_volume, origin_interior
from .laurent import (
    LaurentPolynomial,
    TorusPoint,
    delta_polytope,
    euler_derivative,
    from_config,
    hessian,
    newton_polytope,
    theta_gradient,
)

DEDUP_RADIUS = 1e-8
RESIDUAL_TOL = 1e-10
MORSE_TOL = 1e-10
SEEDS_PER_ROOT = 50


@dataclass
class CriticalPoint:
    """One torus critical point with its saddle data."""

    location: TorusPoint
    value: complex
    hessian_det: complex
    morse: bool
    residual: float
    theta_hessian: np.ndarray  # matrix of theta_i theta_j h at the point

    @property
    def coords(self):
        return self.location.coordinates


@dataclass
class CountCertificate:
    found: int
    expected: int
    status: str  # "complete" | "incomplete" | "not-applicable"

    @property
    def complete(self):
        return self.status == "complete"


def _newton_polish(eqs, u0, scale, max_iter=80):
    """Newton iteration in log coordinates on the square system eqs(e^u) = 0.

    Runs to a stall rather than to a residual threshold so that multiple
    roots settle into their double-precision noise ball (position error
    ~sqrt(eps)) instead of stopping a few orders of magnitude short.
    Returns (u, residual) or None when the iteration leaves the basin.
    """
    n = len(u0)
    u = np.array(u0, dtype=np.complex128)
    best = None
    no_gain = 0
    for _ in range(max_iter):
        vals = np.zeros(n, dtype=np.complex128)
        jac = np.zeros((n, n), dtype=np.complex128)
        for i, f in enumerate(eqs):
            v, g = theta_gradient(f, TorusPoint.from_logs(u))
            vals[i] = v
            jac[i] = g
        res = float(np.max(np.abs(vals)))
        if best is None or res < 0.5 * best[1]:
            best = (u.copy(), res)
            no_gain = 0
        else:
            if res < best[1]:
                best = (u.copy(), res)
            no_gain += 1
            if no_gain >= 6:
                break
        try:
            step = np.linalg.solve(jac, -vals)
        except np.linalg.LinAlgError:
            return None
        if not np.all(np.isfinite(step)) or np.max(np.abs(step)) > 50:
            return None
        u = u + step
        if np.max(np.abs(step)) < 1e-15 * (1.0 + np.max(np.abs(u))):
            vals = np.array([theta_gradient(f, TorusPoint.from_logs(u))[0] for f in eqs])
            res = float(np.max(np.abs(vals)))
            if res < best[1]:
                best = (u.copy(), res)
            break
    return best


def _dedup(points):
    out = []
    for p in points:
        dup = False
        for q in out:
            rel = max(abs(a - b) / max(1.0, abs(b))
                      for a, b in zip(p.coords, q.coords))
            if rel < DEDUP_RADIUS:
                dup = True
                break
            # a root that failed Morse certification is located no better
            # than ~sqrt(eps); merge noise-ball copies of multiple roots
            if rel < 1e-6 and not p.morse and not q.morse:
                dup = True
                break
        if not dup:
            out.append(p)
    return out


def _morse_certified(h, u, Q):
    """Guard against noise-limited multiple roots.

    A k-fold root can only be located to ~sqrt(eps) in double precision, so
    its theta-Hessian there is ~sqrt(eps) rather than 0. Certify the Morse
    property only when the smallest singular value of Q clears a floor set
    by the evaluation amplitude of h at the point.
    """
    amp = float(np.sum(np.abs(h.coefficients)
                       * np.exp(h.exponents @ np.real(u))))
    maxdeg = float(np.max(np.sum(np.abs(h.exponents), axis=1))) if len(h.terms) else 1.0
    sigma_min = float(np.linalg.svd(Q, compute_uv=False)[-1])
    return sigma_min > 3e-7 * amp * max(1.0, maxdeg) ** 2


def _finish_point(h, eqs, u, residual):
    x = TorusPoint.from_logs(u)
    val = theta_gradient(h, x)[0]
    H = complex(np.linalg.det(hessian(h, x)))
    from .laurent import theta_hessian as _th

    Q = _th(h, x)[2]
    morse = abs(H) > MORSE_TOL * max(1.0, abs(val)) and _morse_certified(h, np.asarray(u), Q)
    return CriticalPoint(x, val, H, morse, residual, Q)


def _solve_system_1d(f):
    """Nonzero roots of a univariate Laurent polynomial via companion matrix."""
    if f.is_zero or len(f.terms) == 1:
        return []
    exps = [a[0] for a in f.terms.keys()]
    lo = min(exps)
    deg = max(exps) - lo
    coeffs = np.zeros(deg + 1, dtype=np.complex128)
    for a, c in f.terms.items():
        coeffs[deg - (a[0] - lo)] = c
    roots = np.roots(coeffs)
    scale = f.coeff_scale()
    return [complex(r) for r in roots if abs(r) > 1e-12 * max(1.0, scale)]


def _poly_grid(f, shift):
    """Coefficient matrix C[i, j] of x^i y^j for the cleared polynomial x^s1 y^s2 f."""
    exps = f.exponents
    dx = int(exps[:, 0].max() + shift[0]) + 1
    dy = int(exps[:, 1].max() + shift[1]) + 1
    C = np.zeros((dx, dy), dtype=np.complex128)
    for (a, b), c in f.terms.items():
        C[a + shift[0], b + shift[1]] = c
    return C


def _sylvester_det_samples(C1, C2, xs):
    """det Sylvester_y(p1, p2) at each sample x (eliminating y)."""
    d1 = C1.shape[1] - 1
    d2 = C2.shape[1] - 1
    m = d1 + d2
    dets = np.zeros(len(xs), dtype=np.complex128)
    for s, x in enumerate(xs):
        powers = x ** np.arange(max(C1.shape[0], C2.shape[0]))
        a = powers[: C1.shape[0]] @ C1  # coefficients in y, degree ascending
        b = powers[: C2.shape[0]] @ C2
        S = np.zeros((m, m), dtype=np.complex128)
        for r in range(d2):
            S[r, r: r + d1 + 1] = a[::-1]
        for r in range(d1):
            S[d2 + r, r: r + d2 + 1] = b[::-1]
        dets[s] = np.linalg.det(S)
    return dets


def _solve_system_2d(f1, f2, seeds_rng=None, expected=None):
    """Common torus zeros of two bivariate Laurent polynomials.

    Hidden-variable resultant in x by interpolation on a circle, then
    back-substitution and Newton polish. Returns coordinate pairs; callers
    wrap them into CriticalPoint records as needed.
    """
    scale = max(f1.coeff_scale(), f2.coeff_scale(), 1e-300)
    shift1 = [int(-min(f1.exponents[:, k].min(), 0)) for k in range(2)]
    shift2 = [int(-min(f2.exponents[:, k].min(), 0)) for k in range(2)]
    C1 = _poly_grid(f1, shift1)
    C2 = _poly_grid(f2, shift2)
    degx = (C1.shape[0] - 1) * (C2.shape[1] - 1) + (C2.shape[0] - 1) * (C1.shape[1] - 1)
    K = 1
    while K < 2 * (degx + 1):
        K *= 2
    xs = np.exp(2j * np.pi * np.arange(K) / K)
    dets = _sylvester_det_samples(C1, C2, xs)
    eqs = [f1, f2]
    sols = []
    detmax = float(np.max(np.abs(dets)))
    if detmax > 1e-12 * scale ** (C1.shape[1] + C2.shape[1] - 2):
        coeffs_asc = np.fft.fft(dets) / K  # values on roots of unity -> coefficients
        coeffs = coeffs_asc[: degx + 1][::-1]
        lead = np.max(np.abs(coeffs))
        keep = np.abs(coeffs) > 1e-13 * lead
        first = int(np.argmax(keep))
        coeffs = coeffs[first:]
        xroots = [complex(r) for r in np.roots(coeffs) if abs(r) > 1e-10]
        for xr in xroots:
            powers = xr ** np.arange(C1.shape[0])
            ycoeffs = (powers @ C1)[::-1]
            nzmax = np.max(np.abs(ycoeffs))
            if nzmax < 1e-13 * scale:
                continue
            for yr in np.roots(ycoeffs):
                if abs(yr) < 1e-10:
                    continue
                pol = _newton_polish(eqs, [cmath.log(xr), cmath.log(complex(yr))], scale)
                if pol and pol[1] <= RESIDUAL_TOL * scale:
                    sols.append(pol[0])
    # deterministic multi-start top-up (also the fallback when the resultant
    # is numerically degenerate)
    if expected is not None and _count_distinct(sols) < expected or detmax == 0:
        rng = seeds_rng or np.random.default_rng(20240)
        want = expected if expected is not None else 8
        for _ in range(SEEDS_PER_ROOT * max(1, want)):
            if expected is not None and _count_distinct(sols) >= expected:
                break
            u0 = (rng.uniform(-1, 1, size=2)
                  + 1j * rng.uniform(-np.pi, np.pi, size=2))
            pol = _newton_polish(eqs, u0, scale)
            if pol and pol[1] <= RESIDUAL_TOL * scale:
                sols.append(pol[0])
    uniq = _dedup_logs(sols)
    return [tuple(cmath.exp(v) for v in u) for u in uniq]


def _count_distinct(sols):
    return len(_dedup_logs(sols))


def _dedup_logs(sols):
    uniq = []
    for u in sols:
        x = [cmath.exp(v) for v in u]
        dup = False
        for w in uniq:
            y = [cmath.exp(v) for v in w]
            rel = max(abs(a - b) / max(1.0, abs(b)) for a, b in zip(x, y))
            if rel < DEDUP_RADIUS:
                dup = True
                break
        if not dup:
            uniq.append(u)
    return uniq


def _solve_multistart(eqs, expected, rng, scale):
    sols = []
    budget = SEEDS_PER_ROOT * max(1, expected)
    n = len(eqs)
    for _ in range(budget):
        if _count_distinct(sols) >= expected:
            break
        u0 = rng.uniform(-1, 1, size=n) + 1j * rng.uniform(-np.pi, np.pi, size=n)
        pol = _newton_polish(eqs, u0, scale)
        if pol and pol[1] <= RESIDUAL_TOL * scale:
            sols.append(pol[0])
    return _dedup_logs(sols)


def _solve_euler_system(h, eqs, expected, seed=20240):
    """Shared driver: dispatch by dimension, polish, dedup, sort."""
    scale = max(1.0, h.coeff_scale(), *(f.coeff_scale() for f in eqs))
    n = h.n
    points = []
    if n == 1:
        for r in _solve_system_1d(eqs[0]):
            pol = _newton_polish(eqs, [cmath.log(r)], scale)
            if pol and pol[1] <= RESIDUAL_TOL * scale:
                points.append(_finish_point(h, eqs, pol[0], pol[1]))
    elif n == 2:
        if eqs[0].is_zero or eqs[1].is_zero:
            pairs = []
        else:
            pairs = _solve_system_2d(eqs[0], eqs[1],
                                     seeds_rng=np.random.default_rng(seed),
                                     expected=expected)
        for xy in pairs:
            u = [cmath.log(v) for v in xy]
            pol = _newton_polish(eqs, u, scale)
            if pol and pol[1] <= RESIDUAL_TOL * scale:
                points.append(_finish_point(h, eqs, pol[0], pol[1]))
    else:
        rng = np.random.default_rng(seed)
        for u in _solve_multistart(eqs, expected or 8, rng, scale):
            points.append(_finish_point(h, eqs, u, float(np.max(np.abs(
                [theta_gradient(f, TorusPoint.from_logs(u))[0] for f in eqs])))))
    points = _dedup(points)
    points.sort(key=lambda p: (round(p.value.real, 9), round(p.value.imag, 9),
                               tuple((round(c.real, 9), round(c.imag, 9))
                                     for c in p.coords)))
    return points


def solve_critical(h: LaurentPolynomial, seed=20240):
    """All isolated torus solutions of theta_1 h = ... = theta_n h = 0.

    Raises SolveIncomplete when 0 is interior to Delta and the Bernstein
    count Vol_Z(Delta) is not reached (partial results attached).
    """
    if h.is_zero:
        raise DegenerateConfiguration("zero polynomial")
    eqs = [euler_derivative(h, i + 1) for i in range(h.n)]
    P = delta_polytope(h)
    expected = normalized_volume(P) if origin_interior(P) else None
    points = _solve_euler_system(h, eqs, expected, seed)
    cert = count_certificate(points, P)
    if cert.status == "incomplete":
        raise SolveIncomplete(
            f"found {cert.found} of {cert.expected} expected critical points",
            points=points, certificate=cert)
    return points


def count_certificate(points, P: LatticePolytope) -> CountCertificate:
    """Compare the found count with Vol_Z(Delta) when the theorem applies."""
    found = len(points)
    expected = normalized_volume(P)
    if not origin_interior(P):
        return CountCertificate(found, expected, "not-applicable")
    if found != expected:
        return CountCertificate(found, expected, "incomplete")
    for i, p in enumerate(points):
        for q in points[i + 1:]:
            rel = max(abs(a - b) / max(1.0, abs(b))
                      for a, b in zip(p.coords, q.coords))
            if rel <= DEDUP_RADIUS:
                return CountCertificate(found, expected, "incomplete")
    return CountCertificate(found, expected, "complete")


def solve_deformed(h0: LaurentPolynomial, a, seed=20240):
    """Torus solutions of x_i d_i h0 - a_i h0 = 0 (critical points of h0 x^{-a}).

    The expected count is Vol_Z of the Newton polytope of h0 itself; for
    generic a it is attained, otherwise SolveIncomplete is raised.
    """
    a = [complex(v) for v in a]
    if len(a) != h0.n:
        raise ValueError("deformation vector length mismatch")
    P0 = newton_polytope(h0)  # raises DegenerateConfiguration if not full-dim
    eqs = []
    for i in range(h0.n):
        ti = euler_derivative(h0, i + 1)
        terms = dict(ti.terms)
        for e, c in h0.terms.items():
            terms[e] = terms.get(e, 0j) - a[i] * c
        eqs.append(LaurentPolynomial(h0.n, terms))
    expected = normalized_volume(P0)
    points = _solve_deformed_points(h0, eqs, expected, seed)
    if len(points) != expected:
        raise SolveIncomplete(
            f"found {len(points)} of {expected} deformed critical points",
            points=points,
            certificate=CountCertificate(len(points), expected, "incomplete"))
    return points


def _solve_deformed_points(h0, eqs, expected, seed):
    scale = max(1.0, h0.coeff_scale(), *(f.coeff_scale() for f in eqs))
    n = h0.n
    sols = []
    if n == 1:
        sols = [[cmath.log(r)] for r in _solve_system_1d(eqs[0])]
    elif n == 2:
        if not (eqs[0].is_zero or eqs[1].is_zero):
            sols = [[cmath.log(v) for v in xy]
                    for xy in _solve_system_2d(eqs[0], eqs[1],
                                               seeds_rng=np.random.default_rng(seed),
                                               expected=expected)]
    else:
        sols = _solve_multistart(eqs, expected, np.random.default_rng(seed), scale)
    out = []
    for u0 in sols:
        pol = _newton_polish(eqs, u0, scale)
        if not pol or pol[1] > RESIDUAL_TOL * scale:
            continue
        x = TorusPoint.from_logs(pol[0])
        val = theta_gradient(h0, x)[0]
        # Jacobian of the deformed system in ordinary coordinates
        n_ = h0.n
        J = np.zeros((n_, n_), dtype=np.complex128)
        for i, f in enumerate(eqs):
            _, g = theta_gradient(f, x)
            J[i] = g / np.array(x.coordinates)
        detJ = complex(np.linalg.det(J))
        morse = abs(detJ) > MORSE_TOL * max(1.0, abs(val))
        out.append(CriticalPoint(x, val, detJ, morse, pol[1], None))
    out = _dedup(out)
    out.sort(key=lambda p: (round(p.value.real, 9), round(p.value.imag, 9),
                            tuple((round(c.real, 9), round(c.imag, 9))
                                  for c in p.coords)))
    return out


def generic_deformation_sample(config, z, seed=0, attempts=20):
    """Perturb the first-basis coefficients of z until h_z is Morse (Omega_0).

    The perturbation shifts the coefficients of the first n configuration
    points that form an R^n basis by complex numbers from the polydisk of
    radius 1e-2 * |z|; the unperturbed z is accepted on the first attempt
    when it is already in Omega_0.
    """
    from .admissibility import in_omega_zero
    from .intlin import int_rank

    z = [complex(v) for v in z]
    basis_idx = []
    rows = []
    for j, p in enumerate(config.points):
        if int_rank(rows + [p]) > len(basis_idx):
            basis_idx.append(j)
            rows.append(p)
        if len(basis_idx) == config.n:
            break
    if len(basis_idx) < config.n:
        raise GenericityFailure("configuration has no R^n basis among its points")
    rng = np.random.default_rng(seed)
    scale = 1e-2 * max(abs(v) for v in z) if any(z) else 1e-2
    for attempt in range(attempts):
        if attempt == 0:
            trial = list(z)
        else:
            trial = list(z)
            for j in basis_idx:
                r = np.sqrt(rng.uniform(0, 1)) * scale
                phi = rng.uniform(0, 2 * np.pi)
                trial[j] = trial[j] - r * np.exp(1j * phi)
        try:
            verdict = in_omega_zero(config, trial)
        except SolveIncomplete:
            continue
        if verdict.ok:
            return trial
    raise GenericityFailure(f"no Morse perturbation found in {attempts} attempts")
