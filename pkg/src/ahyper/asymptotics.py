"""Saddle-point expansion data and Stokes-line geometry.

The leading term of the period through a Morse saddle alpha(i) under
coefficient scaling z -> lambda z is

    (sqrt(-1))^n alpha(i)^(c-1) exp(lambda h_z(alpha(i)))
        * (2 pi)^(n/2) / sqrt(H_i(z)) * lambda^(-n/2) * (1 + O(1/lambda)),

with H_i the ordinary Hessian determinant. The square root branch is not
fixed by the formula (the Morse-coordinate choice hides it), so it is
calibrated against one matched numeric thimble integral per saddle and
recorded; the squared combination prefactor^2 * H_i is branch-free.

Stokes lines of a pair of saddles are the directions where
Re[lambda (v_i - v_j)] = 0; the dominance order of the saddle
contributions flips exactly there.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .admissibility import as_parameter
from .critical import CriticalPoint
from .laurent import LaurentPolynomial

SECTOR_DELTA = 0.3
LAMBDA_CAL = 30.0
STOKES_MIN_SEPARATION = 1e-10


@dataclass
class AsymptoticTerm:
    saddle_index: int
    prefactor: complex   # (i)^n alpha^(c-1) (2 pi)^(n/2) / sqrt(H_i)
    rate: complex        # h_z(alpha(i))
    power: float         # -n/2
    sqrt_branch: int     # recorded sign choice of sqrt(H_i)
    hessian_det: complex
    alpha_power: complex  # (i)^n prod alpha_k^(c_k - 1), branch-free part

    def evaluate(self, lam):
        """The leading term at coefficient scale lambda."""
        return self.prefactor * cmath.exp(lam * self.rate) * lam ** self.power


@dataclass(frozen=True)
class StokesLine:
    pair: tuple          # (i, j) saddle indices
    angles: tuple        # two antipodal directions in [0, 2 pi)
    value_gap: complex   # v_i - v_j


def _scaled_saddle(saddle: CriticalPoint, lam) -> CriticalPoint:
    n = saddle.location.n
    return CriticalPoint(saddle.location, lam * saddle.value,
                         lam ** n * saddle.hessian_det, saddle.morse,
                         abs(lam) * saddle.residual,
                         lam * saddle.theta_hessian)


def _thimble_integral_at(h, c, saddle, lam, **kw):
    from .quadrature import integrate_cycle
    from .thimbles import build_thimble

    th = build_thimble(h.scale(lam), _scaled_saddle(saddle, lam), c, **kw)
    return integrate_cycle(h.scale(lam), c, th)


def leading_term(h: LaurentPolynomial, c, saddle: CriticalPoint, index=0,
                 calibrate=True, lambda_cal=LAMBDA_CAL) -> AsymptoticTerm:
    """Leading saddle-point term; sqrt branch calibrated numerically.

    With calibrate=False the principal branch of sqrt(H_i) is used and the
    sign record stays +1.
    """
    cpar = as_parameter(c)
    n = h.n
    alpha_pow = (1j) ** n
    for xk, lk, ck in zip(saddle.location.coordinates, saddle.location.log_branch,
                          cpar.components):
        alpha_pow *= cmath.exp((ck - 1) * lk)
    root = cmath.sqrt(saddle.hessian_det)
    branch = 1
    pref = alpha_pow * (2 * math.pi) ** (n / 2.0) / root
    term = AsymptoticTerm(index, pref, saddle.value, -n / 2.0, branch,
                          saddle.hessian_det, alpha_pow)
    if calibrate:
        val = _thimble_integral_at(h, cpar, saddle, lambda_cal).value
        ratio = val / term.evaluate(lambda_cal)
        if abs(ratio + 1) < abs(ratio - 1):
            term = AsymptoticTerm(index, -pref, saddle.value, -n / 2.0, -1,
                                  saddle.hessian_det, alpha_pow)
    return term


def asymptotic_ratio(h: LaurentPolynomial, c, saddle: CriticalPoint, term,
                     lambdas, force=False, sector_delta=SECTOR_DELTA, **kw):
    """(lambda, thimble integral / leading term) along a lambda ladder.

    Refuses lambda outside the admissible sector |arg lambda| < sector_delta
    unless forced (the expansion is only valid in a narrow sector).
    """
    if term is None:
        term = leading_term(h, c, saddle)
    out = []
    for lam in lambdas:
        lamc = complex(lam)
        if abs(cmath.phase(lamc)) >= sector_delta and not force:
            raise ValueError(f"lambda={lam} outside the sector |arg| < {sector_delta}")
        val = _thimble_integral_at(h, as_parameter(c), saddle, lamc, **kw).value
        out.append((lamc, val / term.evaluate(lamc)))
    return out


def estimate_beta1(ratios, term=None):
    """Richardson estimate of the 1/lambda coefficient from a ratio ladder.

    Returns the coefficient b in ratio ~ 1 + b/lambda (and, when the term
    is given, the matching expansion coefficient beta_1 = b * (2 pi)^(n/2)
    / sqrt(H)).
    """
    if len(ratios) < 2:
        raise ValueError("need at least two ladder points")
    (l1, r1), (l2, r2) = ratios[-2], ratios[-1]
    b1 = l1 * (r1 - 1)
    b2 = l2 * (r2 - 1)
    fac = l2 / l1
    b = (fac * b2 - b1) / (fac - 1)
    out = {"beta1_ratio": b}
    if term is not None:
        out["beta1"] = b * term.prefactor / term.alpha_power
    return out


def stokes_lines(critical):
    """Directions where two saddle contributions exchange dominance.

    Returns (lines, skipped) where skipped lists pairs whose critical
    values are numerically equal (no line direction is defined).
    """
    lines = []
    skipped = []
    vals = [p.value for p in critical]
    scale = max([abs(v) for v in vals] + [1.0])
    for i in range(len(vals)):
        for j in range(i + 1, len(vals)):
            dv = vals[i] - vals[j]
            if abs(dv) < STOKES_MIN_SEPARATION * scale:
                skipped.append((i, j))
                continue
            theta = (math.pi / 2 - cmath.phase(dv)) % math.pi
            lines.append(StokesLine((i, j), (theta, theta + math.pi), dv))
    lines.sort(key=lambda l: l.angles[0])
    return lines, skipped


def dominance_order(critical, lam):
    """Saddle indices sorted by decreasing Re(lambda v_i), plus tie groups."""
    lam = complex(lam)
    if lam == 0:
        raise ValueError("lambda must be nonzero")
    keys = [(-(lam * p.value).real, i) for i, p in enumerate(critical)]
    keys.sort()
    order = [i for _, i in keys]
    scale = max([abs(lam * p.value) for p in critical] + [1.0])
    ties = []
    group = [order[0]] if order else []
    for (ka, _), (kb, ib) in zip(keys[:-1], keys[1:]):
        if abs(kb - ka) <= 1e-12 * scale:
            group.append(ib)
        else:
            if len(group) > 1:
                ties.append(tuple(group))
            group = [ib]
    if len(group) > 1:
        ties.append(tuple(group))
    return order, ties
