"""Rapid-decay integration cycles: 1d sector connectors and descent thimbles.

Geometry lives in logarithmic coordinates u = log x throughout: the torus
is a product of punctured planes, and in u the descent flow
du/ds = -conj(theta h) is the gradient flow of Re h with Im h conserved.
Cycles are stored as u-polylines (the branch logs ARE the path data);
thimble rays are stored at fixed drop values tau = Re h(saddle) - Re h,
which the reparametrized flow du/dtau = -conj(g)/|g|^2 hits exactly.

When two critical values share their imaginary part the descent flow can
run into the lower saddle (a saddle connection). Construction then
retries with the coefficients rotated by e^{i delta} (delta from a small
ladder starting at 1e-3) and records the rotation: the traced chain is a
steepest-descent thimble of the rotated flow and a valid rapid-decay
cycle for the original integrand.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .admissibility import as_parameter
from .critical import CriticalPoint
from .errors import (
    FlowEscape,
    HypothesisViolation,
    NoPole,
    ResonantBranch,
    SaddleConnection,
)
from .lattice import normalized_volume, origin_interior
from .laurent import LaurentPolynomial, TorusPoint, delta_polytope

R_CUT = -math.log(1e-18)
LAUNCH_EPS = 1e-4
TIE_DELTAS = (0.0, 1e-3, -1e-3, 1e-2, -1e-2, 5e-2, -5e-2)
DECAY_RATIO = 1e-16


@dataclass(frozen=True)
class Sector:
    """One open rapid-decay arc on a divisor circle."""

    divisor: str        # "at-zero" | "at-infinity"
    index: int          # 1-based, ordered by increasing lower endpoint in [0, 2pi)
    theta_lo: float
    theta_hi: float

    @property
    def mid(self):
        return 0.5 * (self.theta_lo + self.theta_hi)


@dataclass
class Cycle1D:
    """A sampled connector between rapid-decay sectors (u-space polyline)."""

    samples: list                # TorusPoint nodes with continuous branch logs
    from_sector: Sector
    to_sector: Sector
    orientation: int = 1
    closed: bool = False
    label: str = ""


@dataclass
class RayGrid:
    """Shared node grid in r = sqrt(tau) for thimble rays.

    Carries two interleaved composite-Gauss rules (full and half panel
    count) for the n = 2 quadrature plus any extra geometry nodes inserted
    to keep the sampled paths dense; all rays of a thimble share it.
    """

    taus: np.ndarray
    rs: np.ndarray
    fine_idx: np.ndarray
    fine_w: np.ndarray
    coarse_idx: np.ndarray
    coarse_w: np.ndarray
    tau_max: float
    extra_taus: tuple = ()


def make_ray_grid(tau_max, panels=12, order=10, extra_taus=()):
    r_max = math.sqrt(tau_max)
    x, w = np.polynomial.legendre.leggauss(order)

    def composite(nseg):
        edges = np.linspace(0.0, r_max, nseg + 1)
        rs, ws = [], []
        for a, b in zip(edges[:-1], edges[1:]):
            rs.append(0.5 * (b - a) * x + 0.5 * (a + b))
            ws.append(0.5 * (b - a) * w)
        return np.concatenate(rs), np.concatenate(ws)

    rf, wf = composite(panels)
    rc, wc = composite(max(1, panels // 2))
    re = np.sqrt(np.asarray(sorted(set(float(t) for t in extra_taus)), dtype=np.float64)) \
        if len(extra_taus) else np.zeros(0)
    rs = np.concatenate([rf, rc, re])
    order_idx = np.argsort(rs, kind="stable")
    rs = rs[order_idx]
    inv = np.empty_like(order_idx)
    inv[order_idx] = np.arange(len(order_idx))
    return RayGrid(
        taus=rs ** 2,
        rs=rs,
        fine_idx=inv[: len(rf)],
        fine_w=wf,
        coarse_idx=inv[len(rf): len(rf) + len(rc)],
        coarse_w=wc,
        tau_max=tau_max,
        extra_taus=tuple(float(t) for t in sorted(set(extra_taus))),
    )


@dataclass
class Ray:
    """One descent trajectory sampled on the shared tau grid."""

    psi: float                  # direction angle in the descent frame (0/pi for n=1)
    direction: np.ndarray       # launch direction in u-space (complex, unit)
    launch_u: np.ndarray
    tau0: float
    us: np.ndarray              # (k, n) u at the grid nodes
    thetas: np.ndarray          # (k, n) theta-gradient of the FLOW polynomial there

    def endpoint(self):
        return self.us[-1]


@dataclass
class LoopLevels:
    """n = 2 thimble stored as its family of level loops.

    Level ell is the loop {Re(flow h) = Re h(saddle) - tau_ell} on the
    thimble, sampled at K_ell points uniform in chord length (K_ell grows
    with the loop so consecutive samples stay close in u). The inner disk
    tau < inner_tau is covered by the local quadratic model.
    """

    taus: np.ndarray
    loops: list       # per level: (K_l, 2) complex u points, positively oriented
    thetas: list      # per level: theta-gradients of the flow polynomial
    inner_tau: float
    frame_det: complex
    sigmas: tuple
    max_hop: float    # largest single flow displacement used during evolution


@dataclass
class Thimble:
    """Stable-manifold cycle through one Morse saddle."""

    saddle: CriticalPoint
    rays: list                  # n = 1: the two descent rays
    frame: np.ndarray           # columns: orthonormal descent directions in u-space
    h: LaurentPolynomial        # coefficients the thimble belongs to
    flow_h: LaurentPolynomial   # possibly phase-rotated polynomial driving the flow
    flow_phase: float
    grid: RayGrid
    sphere_count: int = 0       # direction samples at the base level (n >= 2)
    loops: LoopLevels = None    # n = 2 level-loop data

    @property
    def n(self):
        return self.h.n


# ----------------------------------------------------------------------
# sectors and 1d cycles


def _poles_1d(h):
    exps = [a[0] for a in h.terms.keys()]
    m_zero = max(0, -min(exps))
    m_inf = max(0, max(exps))
    return m_zero, m_inf


def sectors_1d(h: LaurentPolynomial, which: str):
    """Rapid-decay arcs of exp(h) on the chosen divisor circle (n = 1).

    At infinity with dominant term a x^m these are the m arcs where
    Re(a e^{i m theta}) < 0; at zero with dominant term b x^{-m'} the m'
    arcs where Re(b e^{-i m' theta}) < 0.
    """
    if h.n != 1:
        raise ValueError("sectors_1d is a 1d operation")
    m_zero, m_inf = _poles_1d(h)
    two_pi = 2 * math.pi
    if which == "at-infinity":
        if m_inf == 0:
            raise NoPole("no pole at infinity")
        m = m_inf
        a = h.terms[(max(x[0] for x in h.terms),)]
        lo0 = (math.pi / 2 - cmath.phase(a)) / m
    elif which == "at-zero":
        if m_zero == 0:
            raise NoPole("no pole at the origin")
        m = m_zero
        b = h.terms[(min(x[0] for x in h.terms),)]
        lo0 = (cmath.phase(b) - 3 * math.pi / 2) / m
    else:
        raise ValueError("divisor must be 'at-zero' or 'at-infinity'")
    width = math.pi / m
    arcs = []
    for k in range(m):
        lo = lo0 + k * two_pi / m
        lo %= two_pi
        arcs.append((lo, lo + width))
    arcs.sort()
    return [Sector(which, i + 1, lo, hi) for i, (lo, hi) in enumerate(arcs)]


def _wrap_to_pi(theta):
    return (theta + math.pi) % (2 * math.pi) - math.pi


def _decay_weight(h, cvec, u):
    hv = kernels.eval_h(h.exponents, h.coefficients, np.array([u]))
    return hv.real + sum((ck * uk).real for ck, uk in zip(cvec, [u]))


def _connector_path(h, cvec, sec_from, sec_to, r_arc):
    """u-polyline from one sector of a divisor to the next, through an annulus."""
    two_pi = 2 * math.pi
    at_zero = sec_from.divisor == "at-zero"
    th_a = _wrap_to_pi(sec_from.mid)
    gap = (sec_to.mid - sec_from.mid) % two_pi
    if gap <= 0:
        gap += two_pi
    th_b = th_a + gap

    def weight(u):
        return _decay_weight(h, cvec, u)

    # walk the endpoint radius out (or in) until the integrand has decayed
    lr_arc = math.log(r_arc)
    u_arc_a = complex(lr_arc, 0) + 1j * th_a
    u_arc_b = complex(lr_arc, 0) + 1j * th_b
    ref = max(weight(u_arc_a), weight(u_arc_b), weight(complex(lr_arc, 0.5 * (th_a + th_b))))
    target = ref + math.log(DECAY_RATIO) - 4.0

    def end_radius(theta):
        lr = lr_arc
        step = -0.35 if at_zero else 0.35
        for _ in range(2000):
            lr += step
            if weight(complex(lr, 0) + 1j * theta) <= target:
                return lr
        raise FlowEscape("no decay along the sector mid-angle")

    lr_a = end_radius(th_a)
    lr_b = end_radius(th_b)

    nodes = []

    def add_linear(ua, ub, max_step):
        k = max(2, int(abs(ub - ua) / max_step) + 1)
        for t in np.linspace(0.0, 1.0, k + 1)[0 if not nodes else 1:]:
            nodes.append(ua + t * (ub - ua))

    add_linear(complex(lr_a, 0) + 1j * th_a, u_arc_a, 0.5)
    add_linear(u_arc_a, u_arc_b, 0.25)
    add_linear(u_arc_b, complex(lr_b, 0) + 1j * th_b, 0.5)
    return [TorusPoint.from_logs([u]) for u in nodes]


def _pick_arc_radius(h, m_zero, m_inf):
    """Annulus radius keeping exp(Re h) moderate along the turning arc."""
    if m_zero > 0 and m_inf > 0:
        b = abs(h.terms[(min(x[0] for x in h.terms),)])
        a = abs(h.terms[(max(x[0] for x in h.terms),)])
        base = (b / a) ** (1.0 / (m_zero + m_inf))
    else:
        base = 1.0
    thetas = np.linspace(0, 2 * math.pi, 64, endpoint=False)
    best, best_val = base, None
    for fac in (0.5, 0.75, 1.0, 1.5, 2.0):
        r = base * fac
        us = np.log(r) + 1j * thetas
        vals = kernels.eval_h_batch(h.exponents, h.coefficients,
                                    us.reshape(-1, 1)).real
        m = float(np.max(vals))
        if best_val is None or m < best_val:
            best, best_val = r, m
    return best


def cycle_basis_1d(h: LaurentPolynomial, c):
    """The Vol_Z(Delta) sector-to-sector connectors for n = 1.

    One-sided polytopes ([0, m] or [-m, 0]) give the m consecutive-sector
    connectors on the pole-carrying divisor (the last one wraps around);
    two-sided polytopes give the m1 + m2 connectors of both divisors and
    require non-integer c (otherwise the monodromy of x^{c-1} is trivial
    and that basis degenerates).
    """
    if h.n != 1:
        raise ValueError("cycle_basis_1d is a 1d operation")
    cpar = as_parameter(c)
    cvec = list(cpar.components)
    m_zero, m_inf = _poles_1d(h)
    if m_zero == 0 and m_inf == 0:
        raise NoPole("h has no pole at either divisor")
    if m_zero > 0 and m_inf > 0:
        if cpar.is_exact:
            re, im = cpar.exact[0]
            resonant = (im == 0 and re.denominator == 1)
        else:
            v = cpar.components[0]
            resonant = abs(v.imag) + abs(v.real - round(v.real)) < 1e-9
        if resonant:
            raise ResonantBranch(
                "two-sided cycle basis needs non-integer c (nontrivial monodromy)")
    r_arc = _pick_arc_radius(h, m_zero, m_inf)
    cycles = []
    for divisor, m in (("at-zero", m_zero), ("at-infinity", m_inf)):
        if m == 0:
            continue
        secs = sectors_1d(h, divisor)
        for i in range(m):
            s_from = secs[i]
            s_to = secs[(i + 1) % m]
            samples = _connector_path(h, cvec, s_from, s_to, r_arc)
            label = ("gamma" if divisor == "at-zero" else "gamma'") + f"_{i + 1}"
            cycles.append(Cycle1D(samples, s_from, s_to, 1, False, label))
    expected = normalized_volume(delta_polytope(h))
    assert len(cycles) == expected, (len(cycles), expected)
    return cycles


def loop_cycle(radius=1.0, base_angle=-math.pi, turns=1, samples_per_turn=48):
    """A closed circle around the origin with continuously tracked logs (n = 1)."""
    thetas = np.linspace(base_angle, base_angle + 2 * math.pi * turns,
                         samples_per_turn * turns + 1)
    pts = [TorusPoint.from_logs([complex(math.log(radius), t)]) for t in thetas]
    return Cycle1D(pts, None, None, 1, True, "loop")


# ----------------------------------------------------------------------
# descent rays and thimbles


def descent_frame(theta_hess):
    """Orthonormal basis of the descent subspace of the local quadratic model.

    The linearized flow is the real-symmetric map delta -> -conj(Q delta);
    its positive eigenspace (escape directions of the saddle, along which
    Re h decreases) is returned as complex column vectors, together with
    the corresponding escape rates sigma_k (ascending).
    """
    Q = np.asarray(theta_hess, dtype=np.complex128)
    n = Q.shape[0]
    X, Y = Q.real, Q.imag
    M = np.block([[-X, Y], [Y, X]])
    vals, vecs = np.linalg.eigh(M)
    cols, rates = [], []
    for k in range(2 * n):
        if vals[k] > 0:
            v = vecs[:n, k] + 1j * vecs[n:, k]
            cols.append(v)
            rates.append(float(vals[k]))
    if len(cols) != n:
        raise SaddleConnection("saddle is not Morse enough for a descent frame")
    return np.array(cols).T, np.array(rates)  # ordered by increasing rate


def _launch_directions(frame, sigmas, sphere_count, tau_ref=1.0):
    """Direction samples whose flow images sweep the tau_ref level uniformly.

    Rays launched on a round eps-circle cluster exponentially toward the
    fastest descent axis (component k grows like e^{sigma_k s}), which
    ruins the angular quadrature for anisotropic saddles. Pre-warping the
    launch components by the linear-model growth factors makes the level
    loop at tau_ref uniform in the sample angle; residual clustering at
    other levels is only polynomial in tau/tau_ref.
    """
    s1, s2 = sigmas
    tau_axis = 0.5 * s2 * LAUNCH_EPS ** 2
    time_to_ref = max(0.0, math.log(tau_ref / tau_axis) / (2.0 * s2))
    scale = np.array([math.exp(-s1 * time_to_ref) / math.sqrt(s1),
                      math.exp(-s2 * time_to_ref) / math.sqrt(s2)])
    scale /= scale.max()
    out = []
    for k in range(sphere_count):
        phi = 2 * math.pi * k / sphere_count
        v = (math.cos(phi) * scale[0] * frame[:, 0]
             + math.sin(phi) * scale[1] * frame[:, 1])
        out.append((phi, v / np.linalg.norm(v)))
    return out


def trace_descent(h: LaurentPolynomial, saddle: CriticalPoint, direction,
                  grid: RayGrid = None, psi=0.0, rtol=1e-10, atol=1e-13):
    """Integrate one steepest-descent ray of Re h from the saddle.

    ``direction`` is a unit vector in u-space tangent to the descent
    subspace; the launch point is saddle + eps * direction with
    eps = 1e-4. Returns a Ray sampled on the shared tau grid.
    """
    grid = grid or make_ray_grid(R_CUT)
    v = np.asarray(direction, dtype=np.complex128)
    v = v / math.sqrt(float(np.sum(np.abs(v) ** 2)))
    u_star = np.array(saddle.location.log_branch, dtype=np.complex128)
    u0 = u_star + LAUNCH_EPS * v
    E, co = h.exponents, h.coefficients
    h_star = kernels.eval_h(E, co, u_star)
    h0 = kernels.eval_h(E, co, u0)
    tau0 = h_star.real - h0.real
    if tau0 <= 0:
        raise ValueError("not a descent direction of the local model")
    amp_g = float(np.sum(np.abs(co) * np.sum(np.abs(E), axis=1)
                         * np.exp(E @ np.real(u_star))))
    stall = (1e-8 * max(amp_g, 1e-300)) ** 2
    us, gs, filled, status = kernels.flow_descent(
        E, co, u0, tau0, grid.taus, rtol=rtol, atol=atol, stall_floor=stall)
    if status == kernels.FLOW_STALL:
        raise SaddleConnection(
            f"descent ray stalled after {filled} of {len(grid.taus)} nodes "
            "(imaginary parts of two critical values collide)",
            partial=us[:filled])
    if status != kernels.FLOW_OK:
        raise FlowEscape(f"flow integration failed with status {status}",
                         partial=us[:filled])
    return Ray(psi, v, u0, tau0, us, gs)


def _tail_shortfall(thimble, cvec):
    """How many e-folds of decay the tails are missing for weight x^c."""
    u_star = np.array(thimble.saddle.location.log_branch, dtype=np.complex128)
    ref = sum((ck * uk).real for ck, uk in zip(cvec, u_star))
    tails = [ray.us[-1] for ray in thimble.rays]
    if thimble.loops is not None:
        tails = list(thimble.loops.loops[-1])
    worst = -math.inf
    for ut in tails:
        tail = sum((ck * uk).real for ck, uk in zip(cvec, ut))
        worst = max(worst, -thimble.grid.tau_max + (tail - ref))
    return worst - math.log(DECAY_RATIO) + 2.5


def _batch_theta(E, co, U):
    W = np.exp(U @ E.T) * co
    return W @ E.astype(np.complex128)


def _resample_loop(pts, K_new):
    """Periodic chord-length resampling of a closed loop to K_new points."""
    from scipy.interpolate import CubicSpline

    closed = np.vstack([pts, pts[:1]])
    seg = np.sqrt(np.sum(np.abs(np.diff(closed, axis=0)) ** 2, axis=1))
    t = np.concatenate([[0.0], np.cumsum(seg)])
    total = t[-1]
    if total == 0:
        return np.repeat(pts[:1], K_new, axis=0)
    t /= total
    data = np.concatenate([closed.real, closed.imag], axis=1)
    data[-1] = data[0]
    cs = CubicSpline(t, data, bc_type="periodic")
    out = cs(np.linspace(0.0, 1.0, K_new, endpoint=False))
    return out[:, :2] + 1j * out[:, 2:]


def _evolve_loops(flow_h, saddle, frame, sigmas, grid, K_base, stall_floor,
                  max_points=1024):
    """March the level loops of an n = 2 thimble down the tau ladder.

    Per level transition: vectorized fixed-substep RK4 on
    du/dtau = -conj(g)/|g|^2 followed by a Newton projection back onto the
    exact level (the co-area formula needs loops exactly on levels; the
    tangential drift the projection leaves behind is reabsorbed by the
    chord-length resampling and drops out of the 2-form determinant).
    """
    E, co = flow_h.exponents, flow_h.coefficients
    u_star = np.array(saddle.location.log_branch, dtype=np.complex128)
    h_star = kernels.eval_h(E, co, u_star)
    s1, s2 = sigmas
    tau_s = min(1e-6, 0.5 * float(grid.taus[0]))
    phis = 2 * math.pi * np.arange(K_base) / K_base
    b1 = math.sqrt(2 * tau_s / s1) * np.cos(phis)
    b2 = math.sqrt(2 * tau_s / s2) * np.sin(phis)
    U = u_star[None, :] + b1[:, None] * frame[:, 0][None, :] \
        + b2[:, None] * frame[:, 1][None, :]

    def values(U):
        return np.exp(U @ E.T) @ co

    def tangents(U):
        G = _batch_theta(E, co, U)
        g2 = np.sum(np.abs(G) ** 2, axis=1, keepdims=True)
        if np.min(g2) <= stall_floor:
            raise SaddleConnection("level loop ran into another critical point")
        return -np.conj(G) / g2, G

    def project(U, tgt):
        # full complex Newton on H(u) = h* - tgt + i Im(h*): along the flow
        # direction dH/dt = -1 exactly, so this pins the level AND removes
        # the Im drift accumulated by the fixed-step march
        h_tgt = complex(h_star.real - tgt, h_star.imag)
        for _ in range(3):
            t, _ = tangents(U)
            U = U + t * (values(U) - h_tgt)[:, None]
        return U

    taus_list, loops, thetas = [], [], []
    max_hop = 0.0
    tau_now = float(np.mean(h_star.real - values(U).real))
    for tgt in grid.taus:
        span = tgt - tau_now
        nsub = int(min(80, max(2, math.ceil(span / 0.05))))
        dt = span / nsub
        for _ in range(nsub):
            k1, _ = tangents(U)
            k2, _ = tangents(U + 0.5 * dt * k1)
            k3, _ = tangents(U + 0.5 * dt * k2)
            k4, _ = tangents(U + dt * k3)
            step = (dt / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
            max_hop = max(max_hop, float(np.max(np.abs(step))))
            U = U + step
        U = project(U, tgt)
        # resample: keep consecutive samples within MAX_NODE_GAP in u
        closed = np.vstack([U, U[:1]])
        length = float(np.sum(np.sqrt(np.sum(np.abs(np.diff(closed, axis=0)) ** 2,
                                             axis=1))))
        K_new = int(min(max_points,
                        max(K_base, 2 * math.ceil(length / MAX_NODE_GAP / 2))))
        U = project(_resample_loop(U, K_new), tgt)
        _, G = tangents(U)
        taus_list.append(float(tgt))
        loops.append(U.copy())
        thetas.append(G)
        tau_now = float(tgt)
    fd = complex(frame[0, 0] * frame[1, 1] - frame[1, 0] * frame[0, 1])
    return LoopLevels(np.array(taus_list), loops, thetas, tau_s, fd,
                      (float(s1), float(s2)), max_hop)


MAX_NODE_GAP = 0.3  # u-space gap between consecutive stored samples


def _refinement_taus(grid, rays):
    """tau midpoints needed wherever consecutive samples jump too far in u."""
    need = set()
    for ray in rays:
        gaps = np.max(np.abs(np.diff(ray.us, axis=0)), axis=1)
        for j in np.nonzero(gaps > MAX_NODE_GAP)[0]:
            k = max(2, int(math.ceil(gaps[j] / MAX_NODE_GAP)))
            lo, hi = grid.taus[j], grid.taus[j + 1]
            for t in np.linspace(lo, hi, k + 1)[1:-1]:
                need.add(float(t))
    return need


def _stall_floor(flow_h, u_star):
    E, co = flow_h.exponents, flow_h.coefficients
    amp_g = float(np.sum(np.abs(co) * np.sum(np.abs(E), axis=1)
                         * np.exp(E @ np.real(u_star))))
    return (1e-8 * max(amp_g, 1e-300)) ** 2


def _trace_all(h, saddle, delta, grid, sphere_count, rtol):
    flow_h = h if delta == 0.0 else h.scale(cmath.exp(1j * delta))
    frame, sigmas = descent_frame(cmath.exp(1j * delta) * saddle.theta_hessian)
    rays = []
    loops = None
    if h.n == 1:
        for psi, sign in ((0.0, 1.0), (math.pi, -1.0)):
            rays.append(trace_descent(flow_h, saddle, sign * frame[:, 0],
                                      grid, psi=psi, rtol=rtol))
    else:
        u_star = np.array(saddle.location.log_branch, dtype=np.complex128)
        loops = _evolve_loops(flow_h, saddle, frame, sigmas, grid,
                              sphere_count, _stall_floor(flow_h, u_star))
    return flow_h, frame, rays, loops


def build_thimble(h: LaurentPolynomial, saddle: CriticalPoint, c=None,
                  sphere_count=64, panels=12, order=10, rtol=1e-10,
                  quality_tol=1e-4):
    """Trace the full thimble through one saddle.

    Retries across the tie-rotation ladder when the flow runs into another
    saddle, densifies the sample grid until consecutive nodes are closer
    than MAX_NODE_GAP in u, extends the tails until the x^c-weighted
    integrand has decayed, and (n = 2) accepts a rotation only when the
    internal quadrature error estimate clears ``quality_tol``.
    """
    n = h.n
    if n > 2:
        from .errors import UnsupportedDimension

        raise UnsupportedDimension("thimble construction implemented for n <= 2")
    cvec = list(as_parameter(c).components) if c is not None else [0j] * n
    last_exc = None
    best = None
    for delta in TIE_DELTAS:
        tau_max = R_CUT
        extra = set()
        cur_K = sphere_count
        try:
            for _round in range(8):
                grid = make_ray_grid(tau_max, panels=panels, order=order,
                                     extra_taus=sorted(extra))
                flow_h, frame, rays, loops = _trace_all(h, saddle, delta, grid,
                                                        cur_K, rtol)
                thimble = Thimble(saddle, rays, frame, h, flow_h, delta, grid,
                                  cur_K if n >= 2 else 0, loops)
                need = _refinement_taus(grid, rays) if n == 1 else set()
                short = _tail_shortfall(thimble, cvec)
                if need - extra:
                    extra |= need
                    continue
                if short > 0:
                    tau_max += 1.6 * short
                    extra = {t for t in extra if t < tau_max}
                    continue
                if n == 2:
                    from .quadrature import integrate_cycle  # local: avoid cycle

                    probe = integrate_cycle(h, cvec, thimble)
                    rel = probe.error_estimate / max(abs(probe.value), 1e-300)
                    if rel > quality_tol:
                        if cur_K < 4 * sphere_count:
                            cur_K *= 2
                            continue
                        if best is None or rel < best[0]:
                            best = (rel, thimble)
                        raise SaddleConnection(
                            f"quadrature error {rel:.2e} above quality gate")
                return thimble
            raise FlowEscape("thimble refinement did not settle")
        except (SaddleConnection, FlowEscape) as exc:
            # a collapsing step size is how an exact tie manifests at scaled
            # coefficients; both go to the next rotation in the ladder
            last_exc = exc
            continue
    if best is not None:
        return best[1]
    raise last_exc


def thimble_basis(h: LaurentPolynomial, c, critical, sphere_count=64,
                  panels=12, order=10, rtol=1e-10):
    """One thimble per Morse critical point; requires 0 interior and a full count."""
    P = delta_polytope(h)
    if not origin_interior(P):
        raise HypothesisViolation(
            "0 is not interior to the Newton polytope; use cycle_basis_1d for n=1")
    expected = normalized_volume(P)
    if len(critical) != expected:
        raise HypothesisViolation(
            f"need a complete critical set ({len(critical)} given, {expected} expected)")
    out = []
    for saddle in critical:
        if not saddle.morse:
            raise HypothesisViolation("non-Morse critical point in the basis")
        out.append(build_thimble(h, saddle, c, sphere_count, panels, order, rtol))
    return out
