"""Numerical evaluation of the period integrals along cycles and thimbles.

In logarithmic coordinates the integrand exp(h(x)) x^(c-1) dx becomes
exp(H(u) + <c, u>) du, with the multi-valued factor computed exclusively
from the stored branch logs u (no principal-branch powers on raw
coordinates anywhere).

Cycles are u-space polylines integrated by adaptive Gauss-Kronrod 7/15;
thimbles are integrated on their stored flow grid: per-ray composite
Gauss panels in r = sqrt(tau) (the substitution that restores smoothness
at the saddle), and for n = 2 an outer trapezoid over the direction
circle with the 2-form assembled from stored flow tangents and a spectral
psi-derivative.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .admissibility import as_parameter
from .errors import NonDecayingEndpoint, StepTooSmall, UnsupportedDimension
from .laurent import LaurentPolynomial, from_config
from .thimbles import Cycle1D, Thimble

# Gauss-Kronrod 7/15 on [-1, 1]
_XK = np.array([
    -0.991455371120813, -0.949107912342759, -0.864864423359769,
    -0.741531185599394, -0.586087235467691, -0.405845151377397,
    -0.207784955007898, 0.0,
    0.207784955007898, 0.405845151377397, 0.586087235467691,
    0.741531185599394, 0.864864423359769, 0.949107912342759,
    0.991455371120813,
])
_WK = np.array([
    0.022935322010529, 0.063092092629979, 0.104790010322250,
    0.140653259715525, 0.169004726639267, 0.190350578064785,
    0.204432940075298, 0.209482141084728,
    0.204432940075298, 0.190350578064785, 0.169004726639267,
    0.140653259715525, 0.104790010322250, 0.063092092629979,
    0.022935322010529,
])
_WG = np.array([
    0.129484966168870, 0.279705391489277, 0.381830050505119,
    0.417959183673469,
    0.381830050505119, 0.279705391489277, 0.129484966168870,
])
_G_IDX = np.arange(1, 15, 2)

MAX_EXPONENT = 700.0


@dataclass
class IntegralResult:
    value: complex
    error_estimate: float
    evaluations: int

    def __complex__(self):
        return complex(self.value)


def _weights(h, cvec, U):
    """exp(H(u) + <c, u>) at the rows of U."""
    ex = kernels.eval_h_batch(h.exponents, h.coefficients, U) + U @ cvec
    if np.max(ex.real) > MAX_EXPONENT:
        raise OverflowError("integrand exponent exceeds double range")
    return np.exp(ex)


def integrate_cycle(h: LaurentPolynomial, c, cycle, reltol=None, density=1) -> IntegralResult:
    """Integral of exp(h) x^(c-1) dx over a stored cycle or thimble."""
    cvec = np.array(as_parameter(c).components, dtype=np.complex128)
    if isinstance(cycle, Thimble):
        if cycle.n == 1:
            return _integrate_thimble_1d(h, cvec, cycle)
        if cycle.n == 2:
            return _integrate_thimble_2d(h, cvec, cycle)
        raise UnsupportedDimension("thimble quadrature implemented for n <= 2")
    return _integrate_polyline(h, cvec, cycle, reltol or 1e-9, density)


def _integrate_polyline(h, cvec, cycle: Cycle1D, reltol, density):
    if h.n != 1:
        raise UnsupportedDimension("polyline cycles are 1d")
    us = np.array([p.log_branch[0] for p in cycle.samples], dtype=np.complex128)
    if len(us) < 2:
        raise ValueError("cycle needs at least two samples")
    # truncation precondition: endpoints decayed, or the cycle closes up
    expo = (kernels.eval_h_batch(h.exponents, h.coefficients, us.reshape(-1, 1))
            + us * cvec[0]).real
    wmax = float(np.max(expo))
    closed = (abs(np.exp(us[0]) - np.exp(us[-1])) < 1e-10 * max(1.0, abs(np.exp(us[0])))
              and abs(np.exp(cvec[0] * (us[-1] - us[0])) - 1.0) < 1e-8)
    if not closed:
        drop = math.log(1e-16)
        if expo[0] - wmax > drop or expo[-1] - wmax > drop:
            raise NonDecayingEndpoint(
                f"endpoint integrand within {math.exp(max(expo[0], expo[-1]) - wmax):.2e} "
                "of the path maximum")
    segs = []
    for a, b in zip(us[:-1], us[1:]):
        for t in range(density):
            segs.append((a + (b - a) * t / density, a + (b - a) * (t + 1) / density))

    evals = 0

    def gk(a, b):
        nonlocal evals
        mid = 0.5 * (a + b)
        half = 0.5 * (b - a)
        pts = (mid + half * _XK).reshape(-1, 1)
        vals = _weights(h, cvec, pts) * half
        evals += len(pts)
        ik = complex(np.sum(_WK * vals))
        ig = complex(np.sum(_WG * vals[_G_IDX]))
        return ik, abs(ik - ig)

    pieces = []
    total = 0j
    err = 0.0
    for a, b in segs:
        ik, e = gk(a, b)
        pieces.append([e, a, b, ik])
        total += ik
        err += e
    target = reltol * max(abs(total), 1e-300)
    rounds = 0
    while err > target and rounds < 4000:
        pieces.sort(key=lambda p: -p[0])
        e0, a, b, ik = pieces.pop(0)
        mid = 0.5 * (a + b)
        l_ik, l_e = gk(a, mid)
        r_ik, r_e = gk(mid, b)
        total += l_ik + r_ik - ik
        err += l_e + r_e - e0
        pieces.append([l_e, a, mid, l_ik])
        pieces.append([r_e, mid, b, r_ik])
        rounds += 1
    return IntegralResult(total, float(err), evals)


def _loop_level_sum(h, cvec, loop, thetas, r, stride=1):
    """One level's contribution density: (2pi/K) sum F det[du/dr, du/dphi].

    du/dr comes from the stored flow tangents (tangential reparametrization
    components drop out of the determinant), du/dphi from spectral
    differentiation of the uniformly resampled loop.
    """
    U = loop[::stride]
    G = thetas[::stride]
    K = U.shape[0]
    g2 = np.sum(np.abs(G) ** 2, axis=1, keepdims=True)
    dudr = -2.0 * r * np.conj(G) / g2
    dudphi = _spectral_dpsi(U)
    det = dudr[:, 0] * dudphi[:, 1] - dudr[:, 1] * dudphi[:, 0]
    W = _weights(h, cvec, U)
    return complex(np.sum(W * det)) * (2 * math.pi / K), K


def _integrate_thimble_1d(h, cvec, thimble, reltol=1e-11):
    """Adaptive integral over the thimble's node polyline.

    The integrand is entire in u, so the integral only depends on the ray
    endpoints: the polyline through the stored samples is an exact
    representative of the thimble's class and the adaptive rule absorbs
    any sharp passage near other saddles.
    """
    minus = [r for r in thimble.rays if r.psi != 0.0][0]
    plus = [r for r in thimble.rays if r.psi == 0.0][0]
    u_star = np.array(thimble.saddle.location.log_branch, dtype=np.complex128)
    us = np.concatenate([minus.us[::-1, 0], [minus.launch_u[0]], [u_star[0]],
                         [plus.launch_u[0]], plus.us[:, 0]])
    path = Cycle1D([_LogOnly(u) for u in us], None, None, 1, False, "thimble")
    return _integrate_polyline(h, cvec, path, reltol, 1)


class _LogOnly:
    """Minimal TorusPoint stand-in carrying just the branch log."""

    __slots__ = ("log_branch",)

    def __init__(self, u):
        self.log_branch = (complex(u),)


def _spectral_dpsi(arr):
    """d/dphi along axis 0 of a uniformly sampled periodic array (K, ...)."""
    K = arr.shape[0]
    m = np.fft.fftfreq(K, d=1.0 / K)
    if K % 2 == 0:
        m[K // 2] = 0.0
    shape = (K,) + (1,) * (arr.ndim - 1)
    return np.fft.ifft(np.fft.fft(arr, axis=0) * (1j * m).reshape(shape), axis=0)


def _integrate_thimble_2d(h, cvec, thimble):
    """Level-loop quadrature: Gauss in r = sqrt(tau), trapezoid over loops.

    The inner disk tau < inner_tau is covered by the quadratic model at
    the saddle (its relative error is O(inner_tau^(3/2))).
    """
    loops = thimble.loops
    grid = thimble.grid
    dens = np.zeros(len(loops.taus), dtype=np.complex128)
    dens_half = np.zeros(len(loops.taus), dtype=np.complex128)
    evals = 0
    for j, r in enumerate(grid.rs):
        dens[j], K = _loop_level_sum(h, cvec, loops.loops[j], loops.thetas[j], r)
        dens_half[j], Kh = _loop_level_sum(h, cvec, loops.loops[j],
                                           loops.thetas[j], r, stride=2)
        evals += K + Kh
    u_star = np.array(thimble.saddle.location.log_branch, dtype=np.complex128)
    s1, s2 = loops.sigmas
    disk = (_weights(h, cvec, u_star.reshape(1, 2))[0]
            * 2.0 * math.pi * loops.inner_tau * loops.frame_det
            / math.sqrt(s1 * s2))
    fine = complex(np.sum(grid.fine_w * dens[grid.fine_idx])) + disk
    coarse = complex(np.sum(grid.coarse_w * dens[grid.coarse_idx])) + disk
    half = complex(np.sum(grid.fine_w * dens_half[grid.fine_idx])) + disk
    err = abs(fine - coarse) + abs(fine - half)
    return IntegralResult(fine, err, evals)


def period_vector(h: LaurentPolynomial, c, basis, reltol=None):
    """u_i(z) for each basis element (cycles or thimbles)."""
    return [integrate_cycle(h, c, b, reltol=reltol) for b in basis]


# ----------------------------------------------------------------------
# finite-difference residuals of the defining differential operators


def _stencil_1d(order, step):
    if order == 0:
        return [(0.0, 1.0)]
    if order == 1:
        return [(step, 0.5 / step), (-step, -0.5 / step)]
    if order == 2:
        return [(step, 1.0 / step ** 2), (0.0, -2.0 / step ** 2),
                (-step, 1.0 / step ** 2)]
    if order == 3:
        return [(2 * step, 0.5 / step ** 3), (step, -1.0 / step ** 3),
                (-step, 1.0 / step ** 3), (-2 * step, -0.5 / step ** 3)]
    raise UnsupportedDimension("finite differences implemented up to order 3")


def _compose_stencils(per_var):
    out = [((), 1.0)]
    for st in per_var:
        out = [(offs + (d,), w * wi) for offs, w in out for d, wi in st]
    return out


class _PeriodCache:
    def __init__(self, config, c, basis, reltol):
        self.config = config
        self.c = c
        self.basis = basis
        self.reltol = reltol
        self.cache = {}
        self.err = 0.0

    def __call__(self, z):
        key = tuple(complex(v) for v in z)
        if key not in self.cache:
            res = period_vector(from_config(self.config, key), self.c,
                                self.basis, reltol=self.reltol)
            self.err = max(self.err, max(r.error_estimate for r in res))
            self.cache[key] = np.array([r.value for r in res])
        return self.cache[key]


def check_pde(config, c, z, basis, which, reltol=1e-10):
    """Max relative residual of a defining operator on the numeric periods.

    ``which`` is ("euler", i) with 1 <= i <= n, or ("box", mu) with mu in
    Ker A ∩ Z^N and |mu|_1 <= 3. Derivatives in z are central differences
    (relative steps 1e-4 for first order, 1e-3 with one Richardson
    extrapolation for the box operator).
    """
    z = [complex(v) for v in z]
    cpar = as_parameter(c)
    periods = _PeriodCache(config, cpar, basis, reltol)
    u0 = periods(z)
    zscale = max(abs(v) for v in z)
    kind, data = which

    if kind == "euler":
        i = int(data)
        if not 1 <= i <= config.n:
            raise ValueError("euler index out of range")
        step = 1e-4 * zscale
        du = np.zeros((config.size, len(basis)), dtype=np.complex128)
        for j in range(config.size):
            zp = list(z); zp[j] += step
            zm = list(z); zm[j] -= step
            du[j] = (periods(zp) - periods(zm)) / (2 * step)
        op = np.zeros(len(basis), dtype=np.complex128)
        for j, a in enumerate(config.points):
            op += a[i - 1] * z[j] * du[j]
        op += cpar.components[i - 1] * u0
        scale = np.maximum(np.abs(u0),
                           np.max(np.abs([z[j] * du[j] for j in range(config.size)]),
                                  axis=0))
        noise = periods.err / step
        if noise > 0.5 * float(np.min(scale)):
            raise StepTooSmall("quadrature noise dominates the Euler residual")
        return float(np.max(np.abs(op) / np.maximum(scale, 1e-300)))

    if kind == "box":
        mu = [int(m) for m in data]
        if len(mu) != config.size:
            raise ValueError("box multi-index length mismatch")
        for i in range(config.n):
            if sum(config.points[j][i] * mu[j] for j in range(config.size)) != 0:
                raise ValueError("mu is not in the kernel of the exponent matrix")
        if sum(abs(m) for m in mu) > 3:
            raise UnsupportedDimension("finite-difference order limit |mu|_1 <= 3")

        def deriv(orders, step):
            stencil = _compose_stencils([_stencil_1d(o, step) for o in orders])
            acc = np.zeros(len(basis), dtype=np.complex128)
            for offs, w in stencil:
                zp = [z[j] + offs[j] for j in range(len(z))]
                acc = acc + w * periods(zp)
            return acc

        plus = [max(m, 0) for m in mu]
        minus = [max(-m, 0) for m in mu]
        step = 1e-3 * zscale
        orderp = sum(plus)
        orderm = sum(minus)

        def box_at(s):
            return deriv(plus, s) - deriv(minus, s)

        d1 = box_at(step)
        d2 = box_at(step / 2)
        val = (4.0 * d2 - d1) / 3.0  # Richardson, error O(step^4)
        scale = np.maximum(np.abs(u0), np.maximum(np.abs(deriv(plus, step / 2)),
                                                  np.abs(deriv(minus, step / 2))))
        noise = periods.err / (step / 2) ** max(orderp, orderm, 1)
        if noise > 0.5 * float(np.min(scale)):
            raise StepTooSmall("quadrature noise dominates the box residual")
        return float(np.max(np.abs(val) / np.maximum(scale, 1e-300)))

    raise ValueError("which must be ('euler', i) or ('box', mu)")
