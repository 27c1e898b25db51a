"""Exact integer-lattice machinery.

Combinatorial decisions (slope order, direction equality, convexity) use Python
integers only.  Floating point appears only in the counting estimates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cmp_to_key
from typing import Callable, NamedTuple, Sequence

import numpy as np

from .errors import EmptyConstruction, NonZeroSum, ValidationError
from .geometry import ConvexBody, grid_angles

MAX_RADIUS = 10**6
PRIMITIVE_DENSITY = 6.0 / math.pi**2


class Vec(NamedTuple):
    x: int
    y: int

    def __add__(self, other):
        return Vec(self.x + other.x, self.y + other.y)

    def __sub__(self, other):
        return Vec(self.x - other.x, self.y - other.y)

    def __neg__(self):
        return Vec(-self.x, -self.y)

    def cross(self, other) -> int:
        return self.x * other.y - self.y * other.x

    @property
    def norm2(self) -> int:
        return self.x * self.x + self.y * self.y

    @property
    def is_primitive(self) -> bool:
        return math.gcd(self.x, self.y) == 1

    def direction(self) -> Vec:
        g = math.gcd(self.x, self.y)
        return Vec(self.x // g, self.y // g)


def vec(v) -> Vec:
    return Vec(int(v[0]), int(v[1]))


def vec_sum(vectors) -> Vec:
    return Vec(sum(v.x for v in vectors), sum(v.y for v in vectors))


def _half(v: Vec) -> int:
    return 0 if v.y > 0 or (v.y == 0 and v.x > 0) else 1


def slope_cmp(a: Vec, b: Vec) -> int:
    """Anticlockwise angle from direction 0 (inclusive); equal directions: shorter first."""
    ha, hb = _half(a), _half(b)
    if ha != hb:
        return ha - hb
    c = a.cross(b)
    if c:
        return -1 if c > 0 else 1
    return (a.norm2 > b.norm2) - (a.norm2 < b.norm2)


slope_key = cmp_to_key(slope_cmp)


def slope_order(vectors) -> list[Vec]:
    vs = [vec(v) for v in vectors]
    if any(v.x == 0 and v.y == 0 for v in vs):
        raise ValidationError("slope order is undefined for the zero vector")
    return sorted(vs, key=slope_key)


MAX_BOX_POINTS = 4 * 10**7


def _box(radius_bound: float, bounds=None) -> np.ndarray:
    """Integer points of ``[-R, R]^2``, or of ``bounds = (xmin, xmax, ymin, ymax)`` inside it."""
    if radius_bound > MAX_RADIUS:
        raise ValidationError(f"radius bound {radius_bound} exceeds {MAX_RADIUS}")
    R = int(math.ceil(radius_bound))
    x0, x1, y0, y1 = -R, R, -R, R
    if bounds is not None:
        x0, x1 = max(x0, math.floor(bounds[0])), min(x1, math.ceil(bounds[1]))
        y0, y1 = max(y0, math.floor(bounds[2])), min(y1, math.ceil(bounds[3]))
    size = max(0, x1 - x0 + 1) * max(0, y1 - y0 + 1)
    if size > MAX_BOX_POINTS:
        raise ValidationError(f"enumeration box of {size} points is too large")
    xs, ys = np.meshgrid(np.arange(x0, x1 + 1), np.arange(y0, y1 + 1), indexing="ij")
    return np.column_stack([xs.ravel(), ys.ravel()])


def primitive_points(radius_bound: float, bounds=None) -> np.ndarray:
    pts = _box(radius_bound, bounds)
    return pts[np.gcd(pts[:, 0], pts[:, 1]) == 1]


def primitive_vectors_in(region: Callable[[np.ndarray], np.ndarray], radius_bound: float) -> list[Vec]:
    """Primitive integer vectors accepted by the vectorised predicate ``region``.

    ``region`` must be contained in the disk of radius ``radius_bound``.
    """
    pts = primitive_points(radius_bound)
    if len(pts) == 0:
        return []
    pts = pts[np.asarray(region(pts), dtype=bool)]
    return slope_order(map(tuple, pts.tolist()))


# --- counting ---------------------------------------------------------------


@dataclass(frozen=True)
class PointCount:
    count: int
    estimate: float
    bound: float
    perimeter: float

    @property
    def within_bound(self) -> bool:
        return abs(self.count - self.estimate) <= self.bound


def _polygon_columns(vertices):
    """Yield ``(x, lo, hi)`` integer ranges of lattice points in a convex polygon, exactly."""
    pts = [(Fraction(x), Fraction(y)) for x, y in vertices]
    xmin = math.ceil(min(p[0] for p in pts))
    xmax = math.floor(max(p[0] for p in pts))
    edges = list(zip(pts, pts[1:] + pts[:1]))
    for X in range(xmin, xmax + 1):
        ys = []
        for (x1, y1), (x2, y2) in edges:
            if x1 == x2:
                if x1 == X:
                    ys += [y1, y2]
            elif min(x1, x2) <= X <= max(x1, x2):
                ys.append(y1 + (X - x1) * (y2 - y1) / (x2 - x1))
        if ys:
            lo, hi = math.ceil(min(ys)), math.floor(max(ys))
            if lo <= hi:
                yield X, lo, hi


def _body_columns(body: ConvexBody):
    pts = _box(body.r_out + 1)
    inside = pts[body.contains(pts)]
    for X in np.unique(inside[:, 0]):
        col = inside[inside[:, 0] == X, 1]
        yield int(X), int(col.min()), int(col.max())


def _columns(region):
    if isinstance(region, ConvexBody):
        return _body_columns(region)
    return _polygon_columns(region)


def polygon_area(vertices) -> float:
    v = np.asarray(vertices, dtype=float)
    x, y = v.T
    return 0.5 * abs(float(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y)))


def polygon_perimeter(vertices) -> float:
    v = np.asarray(vertices, dtype=float)
    return float(np.sum(np.hypot(*(np.roll(v, -1, axis=0) - v).T)))


def _area_and_perimeter(region) -> tuple[float, float]:
    if isinstance(region, ConvexBody):
        return region.area, region.euclidean_perimeter
    return polygon_area(region), polygon_perimeter(region)


def count_lattice_points(region) -> PointCount:
    """Exact ``|K cap Z^2|`` by scanline, with ``(Area K, 2L)`` for the standard bound.

    ``region`` is a convex polygon (vertex list) or a ``ConvexBody``.
    """
    total = sum(hi - lo + 1 for _, lo, hi in _columns(region))
    a, L = _area_and_perimeter(region)
    return PointCount(total, a, 2.0 * L, L)


def count_primitive_points(region) -> PointCount:
    """Exact ``|K cap P|`` with ``((6/pi^2) Area K, 3 L log L)``, natural log."""
    total = 0
    for X, lo, hi in _columns(region):
        ys = np.arange(lo, hi + 1)
        total += int(np.count_nonzero(np.gcd(X, ys) == 1))
    a, L = _area_and_perimeter(region)
    return PointCount(total, PRIMITIVE_DENSITY * a, 3.0 * L * math.log(L), L)


def region_points(region, primitive: bool = False) -> np.ndarray:
    chunks = []
    for X, lo, hi in _columns(region):
        ys = np.arange(lo, hi + 1)
        if primitive:
            ys = ys[np.gcd(X, ys) == 1]
        chunks.append(np.column_stack([np.full(ys.size, X), ys]))
    return np.concatenate(chunks) if chunks else np.empty((0, 2), dtype=int)


@dataclass(frozen=True)
class HomogeneousSum:
    total: float
    estimate: float
    bound: float
    integral: float
    max_abs: float
    perimeter: float

    @property
    def within_bound(self) -> bool:
        return abs(self.total - self.estimate) <= self.bound


def _check_homogeneous(f, rng=None):
    rng = rng or np.random.default_rng(0)
    x = rng.normal(size=(8, 2))
    lam = rng.uniform(0.0, 4.0, size=8)
    lhs = np.asarray(f(x * lam[:, None]), dtype=float)
    rhs = lam * np.asarray(f(x), dtype=float)
    if not np.allclose(lhs, rhs, rtol=1e-9, atol=1e-12):
        raise ValidationError("f is not positively 1-homogeneous")


def _fan_integral(f, vertices, panels=64, order=8) -> float:
    """``int_K f`` for 1-homogeneous ``f`` by the signed fan of triangles (0, a, b).

    Over such a triangle the integral reduces to ``cross(a, b)/3 * int_0^1 f(a + s(b - a)) ds``.
    """
    v = np.asarray(vertices, dtype=float)
    nodes, weights = np.polynomial.legendre.leggauss(order)
    s = (np.arange(panels)[:, None] + 0.5 * (nodes[None, :] + 1.0)).ravel() / panels
    w = np.tile(weights, panels) / (2.0 * panels)
    total = 0.0
    for a, b in zip(v, np.roll(v, -1, axis=0)):
        seg = a[None, :] + s[:, None] * (b - a)[None, :]
        total += (a[0] * b[1] - a[1] * b[0]) / 3.0 * float(np.sum(w * f(seg)))
    return total


def _polar_integral(f, body: ConvexBody, n=8192) -> float:
    t = grid_angles(n)
    u = np.column_stack([np.cos(t), np.sin(t)])
    rho = body.radial(t)
    return float(np.sum(np.asarray(f(u)) * rho**3 / 3.0) * 2.0 * math.pi / n)


def _boundary_samples(region) -> np.ndarray:
    if isinstance(region, ConvexBody):
        return region.radial_function(8192).boundary()
    v = np.asarray(region, dtype=float)
    s = np.linspace(0.0, 1.0, 65)[:-1]
    return np.concatenate([a + s[:, None] * (b - a) for a, b in zip(v, np.roll(v, -1, axis=0))])


def homogeneous_sum(f, region, primitive: bool = False) -> HomogeneousSum:
    """``sum f(z)`` over lattice (or primitive) points of ``region`` with its standard estimate.

    Lattice points: estimate ``int_K f``, bound ``2ML``.  Primitive points: estimate
    ``(6/pi^2) int_K f``, bound ``3ML log L``.  ``M = max |f|`` over ``K``, attained on
    the boundary by homogeneity.
    """
    _check_homogeneous(f)
    pts = region_points(region, primitive)
    total = float(np.sum(f(pts.astype(float)))) if len(pts) else 0.0
    if isinstance(region, ConvexBody):
        integral = _polar_integral(f, region)
    else:
        integral = _fan_integral(f, region)
    M = float(np.max(np.abs(f(_boundary_samples(region)))))
    _, L = _area_and_perimeter(region)
    if primitive:
        return HomogeneousSum(total, PRIMITIVE_DENSITY * integral, 3.0 * M * L * math.log(L), integral, M, L)
    return HomogeneousSum(total, integral, 2.0 * M * L, integral, M, L)


# --- polygons ---------------------------------------------------------------


@dataclass(frozen=True)
class LatticePolygon:
    """Convex lattice polygon, vertices anticlockwise.

    ``merges`` records parallel same-direction inputs that the increasing-slope
    construction summed into one edge, as ``(parts, merged)`` pairs.
    """

    vertices: tuple
    merges: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "vertices", tuple(vec(v) for v in self.vertices))

    @property
    def n(self) -> int:
        return len(self.vertices)

    @property
    def edges(self) -> list[Vec]:
        vs = self.vertices
        return [vs[(i + 1) % len(vs)] - vs[i] for i in range(len(vs))]

    def is_convex(self) -> bool:
        es = self.edges
        return len(es) >= 3 and all(es[i].cross(es[(i + 1) % len(es)]) > 0 for i in range(len(es)))

    def translated(self, d) -> LatticePolygon:
        d = vec(d)
        return LatticePolygon(tuple(v + d for v in self.vertices), self.merges)

    def normalized(self) -> LatticePolygon:
        """Leftmost vertex (lowest among ties) at the origin, listed first."""
        i = min(range(self.n), key=lambda k: (self.vertices[k].x, self.vertices[k].y))
        vs = self.vertices[i:] + self.vertices[:i]
        return LatticePolygon(vs, self.merges).translated(-vs[0])

    def area2(self) -> int:
        """Twice the area, exact."""
        vs = self.vertices
        return sum(vs[i].cross(vs[(i + 1) % len(vs)]) for i in range(len(vs)))

    def to_json(self) -> dict:
        return {"vertices": [list(v) for v in self.vertices], "edges": [list(e) for e in self.edges]}


def edges_of(polygon: LatticePolygon) -> list[Vec]:
    return polygon.edges


def merge_parallel(vectors) -> tuple[list[Vec], tuple]:
    """Sum vectors that point in the same direction; zero vectors are dropped."""
    groups: dict[Vec, list[Vec]] = {}
    for v in vectors:
        v = vec(v)
        if v.x == 0 and v.y == 0:
            continue
        groups.setdefault(v.direction(), []).append(v)
    merged, merges = [], []
    for parts in groups.values():
        total = vec_sum(parts)
        merged.append(total)
        if len(parts) > 1:
            merges.append((tuple(parts), total))
    return merged, tuple(merges)


def increasing_slope_construct(vectors: Sequence) -> LatticePolygon:
    """The convex polygon whose edge set is ``vectors`` (after merging parallel ones).

    Vertices are the partial sums in anticlockwise slope order, starting at the origin.
    """
    vs = [vec(v) for v in vectors]
    s = vec_sum(vs)
    if s.x or s.y:
        raise NonZeroSum(f"vectors sum to {tuple(s)}, not zero")
    merged, merges = merge_parallel(vs)
    if len(merged) < 3:
        raise EmptyConstruction(f"only {len(merged)} distinct directions")
    ordered = slope_order(merged)
    pos, vertices = Vec(0, 0), []
    for e in ordered:
        vertices.append(pos)
        pos = pos + e
    return LatticePolygon(tuple(vertices), merges)


def convex_hull(points) -> list[Vec]:
    """Strict convex hull of integer points, anticlockwise (monotone chain, exact)."""
    pts = sorted(set(vec(p) for p in points))
    if len(pts) < 3:
        return pts

    def chain(seq):
        out = []
        for p in seq:
            while len(out) >= 2 and (out[-1] - out[-2]).cross(p - out[-2]) <= 0:
                out.pop()
            out.append(p)
        return out

    lower, upper = chain(pts), chain(reversed(pts))
    return lower[:-1] + upper[:-1]
