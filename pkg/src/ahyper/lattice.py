"""Exact geometry of the Newton polytope Delta = conv(A ∪ {0}) and its facet data.

All arithmetic in this module is exact (Python ints / Fractions); no floats.
The facet table carries, for each primitive inner normal kappa:

* the pole order  m = -min_{a in Delta} <kappa, a>  of h_z along the
  corresponding toric divisor,
* the supporting face and its (n-1)-dimensional normalized volume v,
  measured in the intrinsic lattice of the face,

and the identity  sum_i v_i * m_i = Vol_Z(Delta)  is exposed as an
operation so it can be exercised on random polytopes.

Dimensions 1 <= n <= 3 are supported exactly; that covers every
operation downstream layers certify against.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from math import gcd

from .errors import DegenerateConfiguration, InvalidConfiguration, UnsupportedDimension
from .intlin import (
    dot,
    generates_full_lattice,
    int_rank,
    kernel_basis,
    primitive,
    solve_integer_coords,
    sub,
    vec_gcd,
)


@dataclass(frozen=True)
class PointConfiguration:
    """N distinct integer exponent vectors in Z^n, generating Z^n as a group."""

    n: int
    points: tuple

    def __post_init__(self):
        if self.n < 1:
            raise InvalidConfiguration("dimension must be positive")
        pts = tuple(tuple(int(x) for x in p) for p in self.points)
        object.__setattr__(self, "points", pts)
        if any(len(p) != self.n for p in pts):
            raise InvalidConfiguration("all points must have length n")
        if len(set(pts)) != len(pts):
            raise InvalidConfiguration("points must be distinct")
        if len(pts) < self.n:
            raise InvalidConfiguration("need at least n points")
        if not generates_full_lattice(pts, self.n):
            raise InvalidConfiguration("points do not generate Z^n")

    @property
    def size(self):
        return len(self.points)


@dataclass(frozen=True)
class FacetDatum:
    """One facet of the polytope with its divisor data."""

    kappa: tuple          # primitive inner normal
    offset: int           # min over the polytope of <kappa, .>
    pole_order: int       # m = -offset
    supporting_face: tuple  # indices into LatticePolytope.vertices
    face_volume: int      # v = normalized (n-1)-volume of the facet in its lattice
    contains_origin: bool


@dataclass(frozen=True)
class Face:
    """A face of the polytope: tight facet constraints plus incidence data."""

    dim: int
    vertices: tuple        # vertex coordinates (tuples), lex-sorted
    tight: tuple           # (kappa, offset) pairs cutting the face out
    contains_origin: bool
    directions: tuple      # lattice basis of the face's direction space

    def contains(self, point):
        """Exact test: the integer point lies on this face's affine span equalities."""
        return all(dot(k, point) == b for k, b in self.tight)


class LatticePolytope:
    """Full-dimensional lattice polytope with exact facet data."""

    def __init__(self, n, points, vertices, facets):
        self.n = n
        self.points = points      # every lattice point given at build time (hull input)
        self.vertices = vertices  # lex-sorted tuple of vertex tuples
        self.facets = facets      # tuple of FacetDatum, sorted by (kappa, offset)

    def __repr__(self):
        return (f"LatticePolytope(n={self.n}, vertices={len(self.vertices)}, "
                f"facets={len(self.facets)}, vol={normalized_volume(self)})")

    def contains(self, point):
        return all(dot(f.kappa, point) >= f.offset for f in self.facets)


def _hull_1d(points):
    xs = [p[0] for p in points]
    lo, hi = min(xs), max(xs)
    if lo == hi:
        raise DegenerateConfiguration("1d hull is a single point")
    return [(lo,), (hi,)]


def _cross2(o, a, b):
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def _hull_2d(points):
    """Monotone chain; returns hull vertices in counterclockwise order."""
    pts = sorted(set(points))
    if len(pts) < 3:
        raise DegenerateConfiguration("2d hull needs three affinely independent points")
    lower, upper = [], []
    for p in pts:
        while len(lower) >= 2 and _cross2(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    for p in reversed(pts):
        while len(upper) >= 2 and _cross2(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    hull = lower[:-1] + upper[:-1]
    if len(hull) < 3:
        raise DegenerateConfiguration("points are collinear")
    return hull


def _cross3(u, v):
    return (u[1] * v[2] - u[2] * v[1],
            u[2] * v[0] - u[0] * v[2],
            u[0] * v[1] - u[1] * v[0])


def _facet_planes_3d(points):
    """All supporting planes of conv(points) by exact triple enumeration.

    Desk scale: O(N^4) integer work, fine for the point counts this
    toolkit certifies (N <= ~20).
    """
    pts = sorted(set(points))
    planes = {}
    for a, b, c in itertools.combinations(pts, 3):
        nu = _cross3(sub(b, a), sub(c, a))
        if nu == (0, 0, 0):
            continue
        nu = primitive(nu)
        vals = [dot(nu, p) for p in pts]
        base = dot(nu, a)
        if all(v >= base for v in vals):
            kappa, off = nu, base
        elif all(v <= base for v in vals):
            kappa, off = tuple(-x for x in nu), -base
        else:
            continue
        planes[(kappa, off)] = [p for p in pts if dot(kappa, p) == off]
    if not planes:
        raise DegenerateConfiguration("3d hull has no supporting planes")
    return planes


def _face_lattice_coords(base, basis, pts):
    return [solve_integer_coords(basis, sub(p, base)) for p in pts]


def _polygon_vertices_in_plane(kappa, on_plane):
    """Cyclic (ccw in plane coordinates) vertex list of a facet polygon."""
    base = on_plane[0]
    basis = kernel_basis(kappa)
    coords2 = _face_lattice_coords(base, basis, on_plane)
    hull2 = _hull_2d(coords2)
    back = {c: p for c, p in zip(coords2, on_plane)}
    return [back[c] for c in hull2]


def _shoelace2(loop):
    s = 0
    for i in range(len(loop)):
        s += _cross2((0, 0), loop[i], loop[(i + 1) % len(loop)])
    return abs(s)


def _facet_volume(n, kappa, facet_vertex_coords, facet_points):
    """Normalized (n-1)-volume of a facet in its own lattice."""
    if n == 1:
        return 1  # 0-dimensional face: convention forced by the pyramid identity
    if n == 2:
        a, b = facet_vertex_coords[0], facet_vertex_coords[-1]
        ends = sorted(facet_vertex_coords)
        return vec_gcd(sub(ends[-1], ends[0]))
    # n == 3: area in the intrinsic lattice of the plane
    loop = _polygon_vertices_in_plane(kappa, facet_points)
    base = loop[0]
    basis = kernel_basis(kappa)
    coords2 = _face_lattice_coords(base, basis, loop)
    return _shoelace2(coords2)


def hull_polytope(points, n):
    """Exact convex hull of integer points as a LatticePolytope (1 <= n <= 3)."""
    pts = tuple(sorted(set(tuple(int(x) for x in p) for p in points)))
    if not pts:
        raise DegenerateConfiguration("no points")
    base = pts[0]
    if int_rank([sub(p, base) for p in pts[1:]]) < n:
        raise DegenerateConfiguration("polytope is not full-dimensional")

    facets = []
    if n == 1:
        verts = _hull_1d(pts)
        lo, hi = verts[0][0], verts[1][0]
        vertices = tuple(sorted(verts))
        vidx = {v: i for i, v in enumerate(vertices)}
        for kappa, off, v in (((1,), lo, (lo,)), ((-1,), -hi, (hi,))):
            facets.append(FacetDatum(kappa, off, -off, (vidx[v],), 1, off == 0))
    elif n == 2:
        hull = _hull_2d(pts)
        vertices = tuple(sorted(hull))
        vidx = {v: i for i, v in enumerate(vertices)}
        k = len(hull)
        for i in range(k):
            a, b = hull[i], hull[(i + 1) % k]
            d = sub(b, a)
            kappa = primitive((-d[1], d[0]))  # inward for a ccw polygon
            off = dot(kappa, a)
            sup = tuple(sorted((vidx[a], vidx[b])))
            v = vec_gcd(d)
            facets.append(FacetDatum(kappa, off, -off, sup, v, off == 0))
    elif n == 3:
        planes = _facet_planes_3d(pts)
        vertset = set()
        polys = {}
        for (kappa, off), on_plane in planes.items():
            loop = _polygon_vertices_in_plane(kappa, on_plane)
            polys[(kappa, off)] = (loop, on_plane)
            vertset.update(loop)
        vertices = tuple(sorted(vertset))
        vidx = {v: i for i, v in enumerate(vertices)}
        for (kappa, off), (loop, on_plane) in sorted(polys.items()):
            sup = tuple(sorted(vidx[v] for v in loop))
            v = _facet_volume(3, kappa, loop, on_plane)
            facets.append(FacetDatum(kappa, off, -off, sup, v, off == 0))
    else:
        raise UnsupportedDimension(f"exact hull implemented for n <= 3, got n={n}")

    facets.sort(key=lambda f: (f.kappa, f.offset))
    return LatticePolytope(n, pts, vertices, tuple(facets))


def build_delta(config: PointConfiguration) -> LatticePolytope:
    """Delta = conv({0} ∪ A) with all facet data populated."""
    origin = tuple(0 for _ in range(config.n))
    return hull_polytope(config.points + (origin,), config.n)


def normalized_volume(P: LatticePolytope, base_index: int = 0) -> int:
    """Vol_Z(P) = n! * Vol(P) by star triangulation from a chosen vertex.

    ``base_index`` selects the apex vertex; any choice gives the same
    value (triangulation additivity), which the test suite exercises.
    """
    n = P.n
    if n == 1:
        return P.vertices[-1][0] - P.vertices[0][0]
    if n == 2:
        # shoelace over any cyclic order: rebuild ccw hull from the vertices
        hull = _hull_2d(P.vertices)
        s = 0
        for i in range(len(hull)):
            s += _cross2((0, 0), hull[i], hull[(i + 1) % len(hull)])
        return abs(s)
    v0 = P.vertices[base_index % len(P.vertices)]
    total = 0
    for f in P.facets:
        if dot(f.kappa, v0) == f.offset:
            continue  # facet contains the apex
        loop = _polygon_vertices_in_plane(f.kappa, [P.vertices[i] for i in f.supporting_face])
        a = loop[0]
        for i in range(1, len(loop) - 1):
            m = [sub(a, v0), sub(loop[i], v0), sub(loop[i + 1], v0)]
            det = (m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
                   - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
                   + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]))
            total += abs(det)
    return total


def origin_interior(P: LatticePolytope) -> bool:
    """True iff 0 lies strictly inside every facet hyperplane (all pole orders positive)."""
    return all(f.pole_order > 0 for f in P.facets)


def pyramid_identity(P: LatticePolytope):
    """Check sum_i v_i * m_i = Vol_Z(P); returns (bool, per-facet witness table)."""
    table = []
    total = 0
    for f in P.facets:
        table.append({"kappa": f.kappa, "m": f.pole_order, "v": f.face_volume,
                      "product": f.face_volume * f.pole_order})
        total += f.face_volume * f.pole_order
    vol = normalized_volume(P)
    return total == vol, {"sum": total, "volume": vol, "facets": table}


def _direction_basis(vertices, n):
    if len(vertices) == 1:
        return ()
    diffs = [sub(v, vertices[0]) for v in vertices[1:]]
    # prune to a basis of the direction space over Q, then saturate:
    # faces of lattice polytopes have vertex differences spanning the
    # direction lattice up to finite index; for the uses here (membership
    # and dimension counts) a spanning set reduced by HNF suffices.
    from .intlin import hnf_row

    h, rank = hnf_row(diffs)
    return tuple(h)


def _make_face(P, tight_keys, verts):
    verts = tuple(sorted(verts))
    dims = int_rank([sub(v, verts[0]) for v in verts[1:]]) if len(verts) > 1 else 0
    origin = tuple(0 for _ in range(P.n))
    has0 = all(dot(k, origin) == b for k, b in tight_keys) and P.contains(origin)
    return Face(dims, verts, tuple(sorted(tight_keys)), has0, _direction_basis(verts, P.n))


def faces(P: LatticePolytope, d: int):
    """Complete list of d-dimensional faces, each with origin flag and direction basis."""
    n = P.n
    if d < 0 or d > n:
        raise UnsupportedDimension(f"faces of dimension {d} of an n={n} polytope")
    if d == n:
        origin = tuple(0 for _ in range(n))
        return [Face(n, P.vertices, (), P.contains(origin), _direction_basis(P.vertices, n))]
    facet_keys = [(f.kappa, f.offset) for f in P.facets]
    if d == n - 1:
        out = []
        for f, key in zip(P.facets, facet_keys):
            verts = [P.vertices[i] for i in f.supporting_face]
            out.append(_make_face(P, (key,), verts))
        return sorted(out, key=lambda fc: fc.vertices)
    if d == 0:
        out = []
        for v in P.vertices:
            tight = tuple(k for k in facet_keys if dot(k[0], v) == k[1])
            out.append(_make_face(P, tight, (v,)))
        return out
    # n = 3, d = 1: edges as pairwise facet intersections
    seen = {}
    for (fa, ka), (fb, kb) in itertools.combinations(zip(P.facets, facet_keys), 2):
        common = set(fa.supporting_face) & set(fb.supporting_face)
        if len(common) < 2:
            continue
        verts = tuple(sorted(P.vertices[i] for i in common))
        if len(verts) > 1 and int_rank([sub(v, verts[0]) for v in verts[1:]]) != 1:
            continue
        tight = tuple(k for k in facet_keys
                      if all(dot(k[0], v) == k[1] for v in verts))
        seen[verts] = _make_face(P, tight, verts)
    return [seen[k] for k in sorted(seen)]


def proper_faces_avoiding_origin(P: LatticePolytope):
    """All proper faces Gamma with 0 not in Gamma (the non-degeneracy quantifier)."""
    out = []
    for d in range(P.n):
        for f in faces(P, d):
            if not f.contains_origin:
                out.append(f)
    return out
