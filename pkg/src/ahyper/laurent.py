"""Laurent polynomials with complex coefficients on the torus (C*)^n.

Evaluation, Euler derivatives, face restriction and Hessians all run off
the term data exactly (no finite differences). Points on the torus carry
continuously tracked logarithms, so powers x^(c-1) stay single-valued
along paths; every evaluation here goes through those branch logs.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateConfiguration
from .kernels import eval_h, eval_h_theta, eval_h_theta_hess
from .lattice import PointConfiguration, hull_polytope


class LaurentPolynomial:
    """Finitely supported map Z^n -> C, zero coefficients pruned exactly."""

    __slots__ = ("n", "terms", "_E", "_c")

    def __init__(self, n, terms):
        self.n = int(n)
        clean = {}
        for a, z in terms.items():
            a = tuple(int(x) for x in a)
            if len(a) != self.n:
                raise ValueError("exponent length mismatch")
            z = complex(z)
            if z != 0:
                clean[a] = z
        self.terms = dict(sorted(clean.items()))
        if self.terms:
            self._E = np.array(list(self.terms.keys()), dtype=np.int64)
            self._c = np.array(list(self.terms.values()), dtype=np.complex128)
        else:
            self._E = np.zeros((0, self.n), dtype=np.int64)
            self._c = np.zeros(0, dtype=np.complex128)

    @property
    def exponents(self):
        return self._E

    @property
    def coefficients(self):
        return self._c

    @property
    def is_zero(self):
        return not self.terms

    @property
    def support(self):
        return tuple(self.terms.keys())

    def coeff_scale(self):
        return float(np.max(np.abs(self._c))) if not self.is_zero else 0.0

    def scale(self, factor):
        return LaurentPolynomial(self.n, {a: factor * z for a, z in self.terms.items()})

    def __eq__(self, other):
        return isinstance(other, LaurentPolynomial) and self.n == other.n \
            and self.terms == other.terms

    def __repr__(self):
        body = " + ".join(f"({z:.6g})*x^{a}" for a, z in self.terms.items()) or "0"
        return f"Laurent<{self.n}>[{body}]"


@dataclass(frozen=True)
class TorusPoint:
    """A point of (C*)^n together with chosen logarithms of its coordinates."""

    coordinates: tuple
    log_branch: tuple

    def __post_init__(self):
        coords = tuple(complex(x) for x in self.coordinates)
        logs = tuple(complex(l) for l in self.log_branch)
        object.__setattr__(self, "coordinates", coords)
        object.__setattr__(self, "log_branch", logs)
        for x, l in zip(coords, logs):
            if x == 0:
                raise ValueError("torus points have nonzero coordinates")
            if abs(cmath.exp(l) - x) > 1e-12 * abs(x):
                raise ValueError("log_branch does not reproduce the coordinate")

    @classmethod
    def from_logs(cls, logs):
        logs = tuple(complex(l) for l in logs)
        return cls(tuple(cmath.exp(l) for l in logs), logs)

    @classmethod
    def from_coordinates(cls, coords):
        coords = tuple(complex(x) for x in coords)
        return cls(coords, tuple(cmath.log(x) for x in coords))

    @property
    def n(self):
        return len(self.coordinates)

    def log_array(self):
        return np.array(self.log_branch, dtype=np.complex128)


def from_config(config: PointConfiguration, z) -> LaurentPolynomial:
    """h_z(x) = sum_j z_j x^{a(j)}; zero coefficients are dropped."""
    z = list(z)
    if len(z) != config.size:
        raise ValueError("coefficient vector length must match the configuration")
    return LaurentPolynomial(config.n, dict(zip(config.points, z)))


def evaluate(h: LaurentPolynomial, x: TorusPoint) -> complex:
    if h.is_zero:
        return 0j
    return eval_h(h._E, h._c, x.log_array())


def euler_derivative(h: LaurentPolynomial, i: int) -> LaurentPolynomial:
    """theta_i h = x_i * dh/dx_i (axis i is 1-based)."""
    if not 1 <= i <= h.n:
        raise ValueError("axis out of range")
    return LaurentPolynomial(h.n, {a: a[i - 1] * z for a, z in h.terms.items()})


def face_part(h: LaurentPolynomial, face) -> LaurentPolynomial:
    """Terms of h whose exponents lie on the given face."""
    return LaurentPolynomial(h.n, {a: z for a, z in h.terms.items() if face.contains(a)})


def theta_gradient(h: LaurentPolynomial, x: TorusPoint):
    """(h(x), vector of theta_i h(x)) evaluated from the term data."""
    if h.is_zero:
        return 0j, np.zeros(h.n, dtype=np.complex128)
    return eval_h_theta(h._E, h._c, x.log_array())


def theta_hessian(h: LaurentPolynomial, x: TorusPoint):
    """(h(x), theta-gradient, matrix of theta_i theta_j h(x))."""
    if h.is_zero:
        z = np.zeros(h.n, dtype=np.complex128)
        return 0j, z, np.zeros((h.n, h.n), dtype=np.complex128)
    return eval_h_theta_hess(h._E, h._c, x.log_array())


def gradient(h: LaurentPolynomial, x: TorusPoint):
    """Ordinary partials (dh/dx_1, ..., dh/dx_n)."""
    _, g = theta_gradient(h, x)
    return g / np.array(x.coordinates)


def hessian(h: LaurentPolynomial, x: TorusPoint):
    """Ordinary second partials d^2 h / dx_j dx_k as an n x n matrix."""
    _, g, Q = theta_hessian(h, x)
    xs = np.array(x.coordinates)
    H = Q / np.outer(xs, xs)
    H[np.diag_indices(h.n)] -= g / xs ** 2
    return H


def hessian_det(h: LaurentPolynomial, x: TorusPoint) -> complex:
    return complex(np.linalg.det(hessian(h, x)))


def newton_polytope(h: LaurentPolynomial):
    """Convex hull of the support (no origin adjoined); must be full-dimensional."""
    if h.is_zero:
        raise DegenerateConfiguration("zero polynomial has empty Newton polytope")
    return hull_polytope(h.support, h.n)


def delta_polytope(h: LaurentPolynomial):
    """conv(support ∪ {0}) — the polytope governing counts and sectors."""
    if h.is_zero:
        raise DegenerateConfiguration("zero polynomial")
    pts = list(h.support) + [tuple(0 for _ in range(h.n))]
    return hull_polytope(pts, h.n)
