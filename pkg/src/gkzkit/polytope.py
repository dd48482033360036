"""Exact polyhedral geometry at desk scale.

Hulls are found by exhaustive facet enumeration inside the affine span of
the input, so everything works for lower dimensional point sets as well.
Intended for dimension <= 6 and a few dozen points.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, NamedTuple, Sequence

from . import linalg
from .linalg import LatticeBasis

Point = tuple[int, ...]


@dataclass(frozen=True)
class PointSet:
    """Integer points of a common dimension; duplicates dropped, order kept."""

    dim: int
    points: tuple[Point, ...]

    def __init__(self, points: Iterable[Sequence[int]], dim: int | None = None):
        pts: list[Point] = []
        seen = set()
        for p in points:
            p = tuple(int(x) for x in p)
            if p not in seen:
                seen.add(p)
                pts.append(p)
        if dim is None:
            if not pts:
                raise ValueError("cannot infer dimension of an empty point set")
            dim = len(pts[0])
        if any(len(p) != dim for p in pts):
            raise ValueError("points of mixed dimension")
        object.__setattr__(self, "dim", dim)
        object.__setattr__(self, "points", tuple(pts))

    def __len__(self):
        return len(self.points)

    def __iter__(self):
        return iter(self.points)


def _as_pointset(P) -> PointSet:
    return P if isinstance(P, PointSet) else PointSet(P)


class _Frame:
    """Integer coordinates on the affine span of a point set.

    ``basis`` is a saturated basis of ``V & Z^D`` where ``V`` is the
    direction space; ``equations`` is an integer basis of ``V``'s orthogonal
    complement.
    """

    def __init__(self, points: Sequence[Point], ambient: int):
        self.base = points[0]
        diffs = [[a - b for a, b in zip(p, self.base)] for p in points[1:]]
        self.equations = linalg.kernel_lattice(diffs, ambient).as_matrix()
        self.basis = linalg.kernel_lattice(self.equations, ambient).as_matrix()
        self.dim = len(self.basis)
        self.ambient = ambient
        self._pivots = [next(j for j, x in enumerate(row) if x) for row in self.basis]

    def in_span(self, x: Sequence) -> bool:
        return all(
            sum(e * (a - b) for e, a, b in zip(eq, x, self.base)) == 0
            for eq in self.equations
        )

    def local(self, x: Sequence) -> tuple:
        """Coordinates of ``x - base`` in ``basis``; ints for lattice points."""
        rest = [Fraction(a - b) for a, b in zip(x, self.base)]
        coords = []
        # basis is in HNF: solve by forward substitution on pivot columns
        for row, piv in zip(self.basis, self._pivots):
            c = rest[piv] / row[piv]
            coords.append(c)
            if c:
                rest = [r - c * v for r, v in zip(rest, row)]
        if any(rest):
            raise ValueError("point is not in the affine span")
        return tuple(int(c) if c.denominator == 1 else c for c in coords)


class Facet(NamedTuple):
    normal: tuple[int, ...]
    offset: int


@dataclass(frozen=True)
class HullDescription:
    """Facet description ``<normal, x> >= offset`` within the affine span.

    ``equations`` (with ``base_point``) cut out the affine span; ``basis`` is
    a saturated lattice basis of its direction space.
    """

    ambient_dim: int
    affine_dim: int
    facets: tuple[Facet, ...]
    base_point: Point
    basis: tuple[Point, ...]
    equations: tuple[Point, ...]
    vertices: tuple[Point, ...] = field(default=())

    def in_span(self, q: Sequence) -> bool:
        return all(
            sum(e * (a - b) for e, a, b in zip(eq, q, self.base_point)) == 0
            for eq in self.equations
        )

    def contains(self, q: Sequence) -> bool:
        return self.in_span(q) and all(
            sum(a * b for a, b in zip(f.normal, q)) >= f.offset for f in self.facets
        )


def _primitive(v: Sequence[int]) -> tuple[int, ...]:
    g = math.gcd(*v)
    return tuple(x // g for x in v) if g > 1 else tuple(v)


def _cofactor_normal(rows: Sequence[Sequence[int]], d: int) -> tuple[int, ...]:
    """Integer vector orthogonal to the ``d-1`` rows (generalized cross product)."""
    return tuple(
        (-1) ** k * linalg.det([[r[j] for j in range(d) if j != k] for r in rows])
        for k in range(d)
    )


def _local_facets(loc: Sequence[tuple[int, ...]], d: int) -> list[tuple[tuple[int, ...], int, frozenset]]:
    """Facets of a full dimensional point set in Z^d: (normal, offset, tight indices)."""
    found: dict[tuple, tuple] = {}
    covered: list[frozenset] = []
    for combo in itertools.combinations(range(len(loc)), d):
        if any(set(combo) <= tight for tight in covered):
            continue
        p0 = loc[combo[0]]
        rows = [[a - b for a, b in zip(loc[i], p0)] for i in combo[1:]]
        n = _cofactor_normal(rows, d)
        if not any(n):
            continue
        n = _primitive(n)
        vals = [sum(a * b for a, b in zip(n, p)) for p in loc]
        h = sum(a * b for a, b in zip(n, p0))
        if all(v >= h for v in vals):
            key = (n, h)
        elif all(v <= h for v in vals):
            key = (tuple(-x for x in n), -h)
        else:
            continue
        if key not in found:
            tight = frozenset(i for i, v in enumerate(vals) if v == h)
            found[key] = tight
            covered.append(tight)
    return [(n, h, t) for (n, h), t in found.items()]


def convex_hull(P) -> HullDescription:
    """Exact facet description of ``conv(P)`` within its affine span."""
    P = _as_pointset(P)
    if not P.points:
        raise ValueError("convex hull of an empty point set")
    pts = list(P.points)
    fr = _Frame(pts, P.dim)
    d = fr.dim
    loc = [fr.local(p) for p in pts]
    facets: list[Facet] = []
    tight_sets: list[frozenset] = []
    if d >= 1:
        for _, _, tight in _local_facets(loc, d):
            # lift: the ambient normal inside V orthogonal to the facet
            t = sorted(tight)
            rows = [[a - b for a, b in zip(pts[i], pts[t[0]])] for i in t[1:]]
            rows += fr.equations
            ker = linalg.kernel_lattice(rows, P.dim).basis
            assert len(ker) == 1
            n = ker[0]
            h = sum(a * b for a, b in zip(n, pts[t[0]]))
            if any(sum(a * b for a, b in zip(n, p)) < h for p in pts):
                n, h = tuple(-x for x in n), -h
            facets.append(Facet(n, h))
            tight_sets.append(tight)
    facets_sorted = sorted(zip(facets, tight_sets))
    facets = [f for f, _ in facets_sorted]
    tight_sets = [t for _, t in facets_sorted]
    if d == 0:
        vertices = (pts[0],)
    else:
        local_normals = _facet_local_normals(fr, facets)
        vertices = tuple(
            sorted(
                p
                for i, p in enumerate(pts)
                if linalg.rank([n for n, t in zip(local_normals, tight_sets) if i in t]) == d
            )
        )
    return HullDescription(
        ambient_dim=P.dim,
        affine_dim=d,
        facets=tuple(facets),
        base_point=fr.base,
        basis=tuple(tuple(b) for b in fr.basis),
        equations=tuple(tuple(e) for e in fr.equations),
        vertices=vertices,
    )


def _facet_local_normals(fr: _Frame, facets: Sequence[Facet]) -> list[list[int]]:
    # restriction of each ambient functional to the lattice basis of V
    return [[sum(a * b for a, b in zip(f.normal, bv)) for bv in fr.basis] for f in facets]


def contains_strict_interior(H: HullDescription, q: Sequence) -> bool:
    """True iff ``q`` lies in the relative interior of the hull."""
    if len(q) != H.ambient_dim:
        raise ValueError("dimension mismatch")
    if not H.in_span(q):
        return False
    return all(sum(a * b for a, b in zip(f.normal, q)) > f.offset for f in H.facets)


class ConeFacets(NamedTuple):
    """Inner facet normals of a cone plus equations of its linear span."""

    normals: tuple[tuple[int, ...], ...]
    equations: tuple[tuple[int, ...], ...]


def cone_facets(P) -> ConeFacets:
    """Primitive inner normals of the facets of ``cone(P)``.

    Normals are taken inside the linear span of ``P``; for a cone that is not
    full dimensional the span equations are returned alongside.
    """
    P = _as_pointset(P)
    D = P.dim
    gens = [p for p in P.points if any(p)]
    equations = linalg.kernel_lattice(gens, D).as_matrix() if gens else linalg.identity(D)
    k = D - len(equations)
    normals = set()
    if k >= 1:
        for combo in itertools.combinations(range(len(gens)), k - 1):
            rows = [list(gens[i]) for i in combo] + equations
            if linalg.rank(rows) != D - 1:
                continue
            ker = linalg.kernel_lattice(rows, D).basis
            phi = ker[0]
            vals = [sum(a * b for a, b in zip(phi, g)) for g in gens]
            if all(v >= 0 for v in vals):
                normals.add(phi)
            elif all(v <= 0 for v in vals):
                normals.add(tuple(-x for x in phi))
    # a cone equal to its whole span has no facets; drop functionals vanishing everywhere
    normals = {n for n in normals if any(sum(a * b for a, b in zip(n, g)) for g in gens)}
    return ConeFacets(tuple(sorted(normals)), tuple(tuple(e) for e in equations))


def _restricted_index(fr: _Frame, lattice: LatticeBasis) -> int:
    """Index of ``lattice & V`` inside ``Z^D & V``."""
    E = fr.equations
    K = lattice.as_matrix()
    if E:
        constraint = [[sum(a * b for a, b in zip(e, kv)) for kv in K] for e in E]
        coeffs = linalg.kernel_lattice(constraint, len(K)).as_matrix()
        sub = [[sum(c * kv[j] for c, kv in zip(cv, K)) for j in range(fr.ambient)] for cv in coeffs]
    else:
        sub = K
    coords = [list(fr.local([a + b for a, b in zip(v, fr.base)])) for v in sub]
    if len(coords) != fr.dim or linalg.rank(coords) < fr.dim:
        raise ValueError("lattice does not span the affine span of the points")
    if any(isinstance(c, Fraction) for row in coords for c in row):
        raise ValueError("lattice is not contained in the integer lattice of the span")
    return abs(linalg.det(coords))


def _pyramid_volume(pts: Sequence[Point], ambient: int) -> int:
    """Normalized volume by coning from a vertex over the facets missing it.

    A pyramid of lattice height ``h`` over a facet ``F`` has normalized
    volume ``h * vol(F)``; facets are measured recursively in their own
    lattices. Independent of :func:`placing_triangulation`.
    """
    fr = _Frame(list(pts), ambient)
    d = fr.dim
    if d == 0:
        return 1
    loc = [fr.local(p) for p in pts]
    if d == 1:
        return max(p[0] for p in loc) - min(p[0] for p in loc)
    apex = loc.index(min(loc))
    total = 0
    for n, h, tight in _local_facets(loc, d):
        height = sum(a * b for a, b in zip(n, loc[apex])) - h
        if height:
            total += height * _pyramid_volume([loc[i] for i in sorted(tight)], d)
    return total


def normalized_volume(P, lattice: LatticeBasis | None = None, dim: int | None = None) -> int:
    """``d!`` times the volume of ``conv(P)`` in the lattice of its affine span.

    With ``lattice=None`` the measuring lattice is ``Z^D`` restricted to the
    span; otherwise the restriction of ``lattice`` to the direction space.
    If ``dim`` is given and the affine dimension is smaller, the result is 0.
    """
    P = _as_pointset(P)
    if not P.points:
        raise ValueError("volume of an empty point set")
    pts = list(P.points)
    fr = _Frame(pts, P.dim)
    if dim is not None and fr.dim < dim:
        return 0
    vol = _pyramid_volume(pts, P.dim)
    if lattice is None or fr.dim == 0:
        return vol
    idx = _restricted_index(fr, lattice)
    q, r = divmod(vol, idx)
    if r:
        raise ValueError("points do not lie on a translate of the given lattice")
    return q


def minkowski_sum(P, Q) -> PointSet:
    P, Q = _as_pointset(P), _as_pointset(Q)
    if P.dim != Q.dim:
        raise ValueError("dimension mismatch")
    return PointSet((tuple(a + b for a, b in zip(p, q)) for p in P for q in Q), P.dim)


def lattice_points(H: HullDescription) -> PointSet:
    """All integer points of a bounded hull, by bounding box scan."""
    if not H.vertices:
        raise ValueError("hull is unbounded or has no vertex data")
    lo = [min(v[i] for v in H.vertices) for i in range(H.ambient_dim)]
    hi = [max(v[i] for v in H.vertices) for i in range(H.ambient_dim)]
    box = itertools.product(*(range(a, b + 1) for a, b in zip(lo, hi)))
    return PointSet((p for p in box if H.contains(p)), H.ambient_dim)


@dataclass(frozen=True)
class Triangulation:
    """Maximal simplices as sorted index tuples into the source point list."""

    simplices: tuple[tuple[int, ...], ...]
    order: tuple[int, ...] = ()


def _simplex_volume(loc, simplex) -> int:
    p0 = loc[simplex[0]]
    return abs(linalg.det([[a - b for a, b in zip(loc[i], p0)] for i in simplex[1:]]))


def _orient(loc, face, q) -> int:
    p0 = loc[face[0]]
    rows = [[a - b for a, b in zip(loc[i], p0)] for i in face[1:]]
    rows.append([a - b for a, b in zip(q, p0)])
    s = linalg.det(rows)
    return (s > 0) - (s < 0)


def placing_triangulation(points, order: Sequence[int] | None = None) -> Triangulation:
    """Placing triangulation, inserting points in ``order``.

    The default order is lexicographic by coordinates. The first affinely
    independent points in that order form the initial simplex; each later
    point is coned over the boundary facets it sees. Points landing inside
    the current hull are not used. Indices refer to the first occurrence
    of each point in ``points``.
    """
    raw = [tuple(p) for p in points]
    first: dict[Point, int] = {}
    for i, p in enumerate(raw):
        first.setdefault(p, i)
    uniq = sorted(first.values())
    if order is None:
        order = sorted(uniq, key=lambda i: raw[i])
    else:
        order = [first[raw[i]] for i in order]
        order = list(dict.fromkeys(order))
    fr = _Frame([raw[i] for i in uniq], len(raw[0]))
    d = fr.dim
    if d == 0:
        return Triangulation((), tuple(order))
    loc = {i: fr.local(raw[i]) for i in uniq}

    start: list[int] = [order[0]]
    for i in order[1:]:
        if len(start) == d + 1:
            break
        rows = [[a - b for a, b in zip(loc[j], loc[start[0]])] for j in start[1:] + [i]]
        if linalg.rank(rows) == len(rows):
            start.append(i)
    simplices = [tuple(start)]
    for i in order:
        if i in start:
            continue
        q = loc[i]
        count: dict[tuple, int] = {}
        opposite: dict[tuple, int] = {}
        for s in simplices:
            for k in range(d + 1):
                face = tuple(sorted(s[:k] + s[k + 1:]))
                count[face] = count.get(face, 0) + 1
                opposite[face] = s[k]
        new = []
        for face, c in count.items():
            if c != 1:
                continue
            inside = _orient(loc, face, loc[opposite[face]])
            here = _orient(loc, face, q)
            if here != 0 and here == -inside:
                new.append(face + (i,))
        simplices.extend(new)
    return Triangulation(tuple(sorted(tuple(sorted(s)) for s in simplices)), tuple(order))


def triangulation_volumes(points, tri: Triangulation) -> list[int]:
    """Normalized volume of each simplex in the ambient lattice of the span."""
    raw = [tuple(p) for p in points]
    fr = _Frame(list(dict.fromkeys(raw)), len(raw[0]))
    loc = [fr.local(p) for p in raw]
    return [_simplex_volume(loc, s) for s in tri.simplices]
