"""Exact integer linear algebra helpers for the lattice layer.

Everything here runs on Python ints (arbitrary precision); no floats.
Sizes are desk scale (n <= 3, a handful of points), so the simple
elimination algorithms below are more than fast enough.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd


def vec_gcd(v):
    g = 0
    for x in v:
        g = gcd(g, abs(x))
    return g


def primitive(v):
    """Divide an integer vector by the gcd of its entries (0 vector unchanged)."""
    g = vec_gcd(v)
    if g <= 1:
        return tuple(v)
    return tuple(x // g for x in v)


def dot(u, v):
    return sum(a * b for a, b in zip(u, v))


def sub(u, v):
    return tuple(a - b for a, b in zip(u, v))


def int_rank(rows):
    """Rank of an integer matrix (list of row tuples) by exact fraction elimination."""
    m = [[Fraction(x) for x in row] for row in rows]
    rank = 0
    ncols = len(m[0]) if m else 0
    row = 0
    for col in range(ncols):
        piv = None
        for r in range(row, len(m)):
            if m[r][col] != 0:
                piv = r
                break
        if piv is None:
            continue
        m[row], m[piv] = m[piv], m[row]
        for r in range(row + 1, len(m)):
            if m[r][col] != 0:
                f = m[r][col] / m[row][col]
                m[r] = [a - f * b for a, b in zip(m[r], m[row])]
        row += 1
        rank += 1
        if row == len(m):
            break
    return rank


def hnf_row(rows):
    """Row-style Hermite normal form of an integer matrix.

    Returns (H, rank) where H is a list of nonzero rows in echelon form
    spanning the same row lattice as the input.
    """
    m = [list(r) for r in rows if any(r)]
    if not m:
        return [], 0
    ncols = len(m[0])
    h = []
    row = 0
    for col in range(ncols):
        piv = None
        for r in range(row, len(m)):
            if m[r][col] != 0:
                piv = r
                break
        if piv is None:
            continue
        m[row], m[piv] = m[piv], m[row]
        # gcd out the column below the pivot
        changed = True
        while changed:
            changed = False
            for r in range(row + 1, len(m)):
                if m[r][col] == 0:
                    continue
                if abs(m[r][col]) < abs(m[row][col]):
                    m[row], m[r] = m[r], m[row]
                q = m[r][col] // m[row][col]
                m[r] = [a - q * b for a, b in zip(m[r], m[row])]
                if m[r][col] != 0:
                    changed = True
        if m[row][col] < 0:
            m[row] = [-a for a in m[row]]
        row += 1
        if row == len(m):
            break
    h = [tuple(r) for r in m[:row] if any(r)]
    return h, len(h)


def generates_full_lattice(points, n):
    """True iff the integer vectors generate Z^n as a group.

    Equivalent to the Smith normal form of the n x N matrix having all
    diagonal entries 1; checked via the Hermite form of the row lattice
    spanned by the points (determinant of the echelon basis = covolume).
    """
    h, rank = hnf_row(points)
    if rank < n:
        return False
    det = 1
    for i, row in enumerate(h):
        # echelon: pivot of row i is its first nonzero entry
        piv = next(x for x in row if x != 0)
        det *= abs(piv)
    return det == 1


def kernel_basis(kappa):
    """Integer basis of the saturated sublattice kappa^perp ∩ Z^n.

    ``kappa`` must be a primitive integer vector. Returns n-1 integer
    vectors. Built from a unimodular completion of kappa obtained by
    extended-gcd column operations.
    """
    n = len(kappa)
    # U starts as identity; columns are candidate basis vectors of Z^n.
    # We perform column operations on the row vector kappa, mirroring them
    # on U, until kappa*U = (g, 0, ..., 0).
    k = list(kappa)
    u = [[1 if i == j else 0 for j in range(n)] for i in range(n)]

    def colop(j, l, q):
        # col_j -= q * col_l
        k[j] -= q * k[l]
        for i in range(n):
            u[i][j] -= q * u[i][l]

    def colswap(j, l):
        k[j], k[l] = k[l], k[j]
        for i in range(n):
            u[i][j], u[i][l] = u[i][l], u[i][j]

    for j in range(1, n):
        while k[j] != 0:
            if k[0] == 0 or abs(k[j]) < abs(k[0]):
                colswap(0, j)
            q = k[j] // k[0]
            colop(j, 0, q)
    if k[0] < 0:
        k[0] = -k[0]
        for i in range(n):
            u[i][0] = -u[i][0]
    assert k[0] == vec_gcd(kappa) and all(x == 0 for x in k[1:])
    return [tuple(u[i][j] for i in range(n)) for j in range(1, n)]


def solve_rational_coords(basis, vec):
    """Coordinates of ``vec`` in ``basis`` (list of columns) over Q.

    Raises ValueError when ``vec`` is outside the rational span.
    """
    ncols = len(basis)
    n = len(vec)
    aug = [[Fraction(basis[j][i]) for j in range(ncols)] + [Fraction(vec[i])] for i in range(n)]
    pivots = []
    row = 0
    for col in range(ncols):
        piv = None
        for r in range(row, n):
            if aug[r][col] != 0:
                piv = r
                break
        if piv is None:
            continue
        aug[row], aug[piv] = aug[piv], aug[row]
        for r in range(n):
            if r != row and aug[r][col] != 0:
                f = aug[r][col] / aug[row][col]
                aug[r] = [a - f * b for a, b in zip(aug[r], aug[row])]
        pivots.append((row, col))
        row += 1
    coords = [Fraction(0)] * ncols
    for r, c in pivots:
        coords[c] = aug[r][-1] / aug[r][c]
    rec = [sum(Fraction(basis[j][i]) * coords[j] for j in range(ncols)) for i in range(n)]
    if rec != [Fraction(v) for v in vec]:
        raise ValueError("vector not in the rational span of the basis")
    return tuple(coords)


def solve_integer_coords(basis, vec):
    """Coordinates of ``vec`` in the integer ``basis`` (list of columns).

    Exact rational solve; raises ValueError if the solution is not integral
    or the system is inconsistent.
    """
    ncols = len(basis)
    n = len(vec)
    # Gaussian elimination on the n x (ncols+1) augmented fraction matrix.
    aug = [[Fraction(basis[j][i]) for j in range(ncols)] + [Fraction(vec[i])] for i in range(n)]
    pivots = []
    row = 0
    for col in range(ncols):
        piv = None
        for r in range(row, n):
            if aug[r][col] != 0:
                piv = r
                break
        if piv is None:
            continue
        aug[row], aug[piv] = aug[piv], aug[row]
        for r in range(n):
            if r != row and aug[r][col] != 0:
                f = aug[r][col] / aug[row][col]
                aug[r] = [a - f * b for a, b in zip(aug[r], aug[row])]
        pivots.append((row, col))
        row += 1
    coords = [Fraction(0)] * ncols
    for r, c in pivots:
        coords[c] = aug[r][-1] / aug[r][c]
    # consistency of the non-pivot rows
    for r in range(n):
        resid = sum(aug[r][j] * 0 for j in range(ncols))  # eliminated rows
        if r >= len(pivots) and aug[r][-1] != 0:
            raise ValueError("vector not in the span of the basis")
    out = []
    for q in coords:
        if q.denominator != 1:
            raise ValueError("vector not in the integer lattice of the basis")
        out.append(int(q))
    # verify (cheap, exact)
    rec = [sum(basis[j][i] * out[j] for j in range(ncols)) for i in range(n)]
    if list(rec) != list(vec):
        raise ValueError("vector not in the span of the basis")
    return tuple(out)
