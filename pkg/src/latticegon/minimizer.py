"""Low-perimeter convex lattice n-gons.

Three constructions share one result type:

* ``exact_minimizer``: certified global minimum for small ``n`` by branch and bound;
* ``greedy_polygon``: the ``n`` shortest primitive vectors closed by one extra edge;
* ``shape_guided_polygon``: the primitive vectors of ``lam * S`` for a unit-area,
  centred shape ``S``, closed by a special edge and trimmed to ``n`` vertices.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    BudgetExceeded,
    DegenerateClosing,
    EmptyConstruction,
    InfeasibleShape,
    SearchTooLarge,
    ValidationError,
)
from .geometry import ConvexBody, RadialFunction, area, centroid
from .lattice import (
    LatticePolygon,
    Vec,
    increasing_slope_construct,
    primitive_points,
    slope_key,
    vec,
    vec_sum,
)

MAX_CANDIDATES = 10**5


@dataclass(frozen=True)
class MinimizerResult:
    polygon: LatticePolygon
    perimeter: float
    n: int
    method: str
    special_edge: Vec | None = None
    certified: bool = False
    info: dict = field(default_factory=dict)

    @property
    def edges(self) -> list[Vec]:
        return self.polygon.edges

    def scaled_perimeter(self) -> float:
        return self.perimeter / self.n**1.5

    def to_json(self) -> dict:
        out = self.polygon.to_json()
        out.update(
            perimeter=self.perimeter,
            n=self.n,
            method=self.method,
            certified=self.certified,
            special_edge=None if self.special_edge is None else list(self.special_edge),
        )
        return out


def perimeter(polygon: LatticePolygon, body: ConvexBody) -> float:
    """Anticlockwise D-perimeter; for asymmetric D the clockwise value differs."""
    edges = np.array(polygon.edges, dtype=float)
    return math.fsum(np.atleast_1d(body.norm(edges)).tolist())


def min_perimeter_orientation(polygon: LatticePolygon, body: ConvexBody) -> float:
    """Smaller of the anticlockwise perimeter under D and under -D."""
    return min(perimeter(polygon, body), perimeter(polygon, body.reflected()))


def _norm_key(value: float) -> float:
    return round(value, 11)


def _primitives_with_norm(body: ConvexBody, radius: float):
    # bounding box of radius*D from dense boundary samples, padded for chords between samples
    b = body.boundary_samples * radius
    pad = 2e-3 * radius * body.r_out + 1
    bounds = (b[:, 0].min() - pad, b[:, 0].max() + pad, b[:, 1].min() - pad, b[:, 1].max() + pad)
    pts = primitive_points(radius * body.r_out * (1 + 1e-9) + 1, bounds)
    norms = np.asarray(body.norm(pts.astype(float)))
    keep = norms <= radius * (1 + 1e-12)
    return pts[keep], norms[keep]


def _sorted_by_norm(pts, norms):
    items = [(Vec(int(x), int(y)), float(nv)) for (x, y), nv in zip(pts.tolist(), norms.tolist())]
    items.sort(key=lambda it: (_norm_key(it[1]), slope_key(it[0]), it[0].norm2))
    return items


def shortest_primitive_vectors(body: ConvexBody, n: int) -> list[Vec]:
    """The ``n`` primitive vectors of least D-norm; ties by (norm, angle, length)."""
    if n < 1:
        raise ValidationError("n must be positive")
    radius = math.pi / math.sqrt(6.0) * math.sqrt(n / body.area) * 1.25 + 2.0 / body.r_in
    while True:
        pts, norms = _primitives_with_norm(body, radius)
        if len(pts) >= n:
            return [v for v, _ in _sorted_by_norm(pts, norms)[:n]]
        radius *= 1.5


def trim_polygon(polygon: LatticePolygon, n: int, anchor: int) -> LatticePolygon:
    """Keep ``n`` consecutive vertices including both ends of edge ``anchor``.

    The dropped block sits opposite the anchor edge.
    """
    m = polygon.n
    if m <= n:
        return polygon
    vs = polygon.vertices
    w = vs[anchor + 1:] + vs[: anchor + 1]
    d, s = m - n, n // 2
    return LatticePolygon(w[s + d:] + w[:s], polygon.merges)


def _edge_index(polygon: LatticePolygon, direction: Vec) -> int | None:
    d = direction.direction()
    for i, e in enumerate(polygon.edges):
        if e.direction() == d:
            return i
    return None


def _longest_edge(polygon: LatticePolygon, body: ConvexBody) -> int:
    norms = body.norm(np.array(polygon.edges, dtype=float))
    return int(np.argmax(norms))


def _close_and_trim(vectors, body, n, method, info):
    closing = -vec_sum(vectors)
    try:
        poly = increasing_slope_construct(list(vectors) + [closing])
    except EmptyConstruction as exc:
        raise DegenerateClosing(str(exc)) from exc
    special = None
    if closing != Vec(0, 0):
        idx = _edge_index(poly, closing)
        special = poly.edges[idx]
    else:
        idx = _longest_edge(poly, body)
    info.update(closing=list(closing), untrimmed_vertices=poly.n)
    if method == "greedy":
        idx = _longest_edge(poly, body)
    poly = trim_polygon(poly, n, idx).normalized()
    return MinimizerResult(poly, perimeter(poly, body), poly.n, method, special, False, info)


def greedy_polygon(body: ConvexBody, n: int) -> MinimizerResult:
    """n shortest primitives plus the closing vector, trimmed to n vertices if needed."""
    if n < 3:
        raise ValidationError("n must be at least 3")
    vs = shortest_primitive_vectors(body, n)
    return _close_and_trim(vs, body, n, "greedy", {})


def check_shape(shape: RadialFunction, tol: float = 1e-6) -> None:
    a = area(shape)
    g = centroid(shape)
    if abs(a - 1.0) > tol:
        raise InfeasibleShape(f"shape area {a:.9g} is not 1")
    if float(np.hypot(*g)) > tol:
        raise InfeasibleShape(f"shape centroid {g.tolist()} is not at the origin")


def _shape_gauge(shape: RadialFunction, pts: np.ndarray) -> np.ndarray:
    p = pts.astype(float)
    return np.hypot(p[:, 0], p[:, 1]) / shape(np.arctan2(p[:, 1], p[:, 0]))


def _primitives_in_scaled_shape(shape: RadialFunction, n: int):
    """All primitive z with ``|z| / shape(angle z) <= lam`` for the least lam giving >= n."""
    big = math.pi * math.sqrt(n / 6.0) * 1.2 + 2.0 / float(np.min(shape.samples))
    r_max = float(np.max(shape.samples))
    while True:
        pts = primitive_points(big * r_max + 1)
        s = _shape_gauge(shape, pts)
        inside = s <= big
        if np.count_nonzero(inside) >= n:
            lam = float(np.partition(s[inside], n - 1)[n - 1])
            return pts, s, lam
        big *= 1.3


def _closing_dir(total):
    zx, zy = int(round(-total[0])), int(round(-total[1]))
    if zx == 0 and zy == 0:
        return None
    g = math.gcd(zx, zy)
    return (zx // g, zy // g)


def _swap_refine(chosen, pool, body, offset=(0, 0), fixed=frozenset(), max_swaps=10_000):
    """Swap vectors between ``chosen`` and ``pool`` while the closed perimeter drops.

    The closed perimeter of a set is ``sum ||z|| + ||-sum z||``.  On exit the
    closing edge is non-zero and parallel to no chosen vector, so the chosen
    vectors plus the closing edge are the edges of a polygon with one more vertex
    than there are chosen vectors.  ``offset`` is the sum of the vectors that
    stay fixed and ``fixed`` their set, used for the parallel check.
    """
    chosen = chosen.astype(float)
    pool = pool.astype(float)
    cn = np.asarray(body.norm(chosen))
    pn = np.asarray(body.norm(pool))
    total = chosen.sum(axis=0) + np.asarray(offset, dtype=float)
    keys = set(map(tuple, chosen.astype(int).tolist())) | set(fixed)
    swaps = 0

    def deltas():
        here = float(body.norm(-total))
        new_tot = total[None, None, :] - chosen[:, None, :] + pool[None, :, :]
        return pn[None, :] - cn[:, None] + np.asarray(body.norm(-new_tot)) - here, new_tot

    def apply(i, j, new_total):
        nonlocal total
        keys.discard(tuple(int(v) for v in chosen[i]))
        keys.add(tuple(int(v) for v in pool[j]))
        total = new_total
        chosen[i], pool[j] = pool[j].copy(), chosen[i].copy()
        cn[i], pn[j] = pn[j], cn[i]

    while swaps < max_swaps:
        delta, new_tot = deltas()
        i, j = np.unravel_index(int(np.argmin(delta)), delta.shape)
        if not delta[i, j] < -1e-12 * max(1.0, float(np.sum(cn))):
            break
        apply(i, j, new_tot[i, j])
        swaps += 1
    def usable(tot, out=None, into=None):
        d = _closing_dir(tot)
        return d is not None and d != into and (d not in keys or d == out)

    if not usable(total):
        delta, new_tot = deltas()
        for flat in np.argsort(delta, axis=None):
            i, j = np.unravel_index(int(flat), delta.shape)
            out, into = tuple(int(v) for v in chosen[i]), tuple(int(v) for v in pool[j])
            if usable(new_tot[i, j], out, into):
                apply(i, j, new_tot[i, j])
                swaps += 1
                break
        else:
            raise DegenerateClosing("no swap yields a usable closing edge")
    return chosen.astype(int), swaps


def shape_guided_polygon(
    body: ConvexBody, shape: RadialFunction, n: int, refine: bool = False, shell: int = 600
) -> MinimizerResult:
    """Primitive vectors of the least ``lam * shape`` holding >= n of them, closed and trimmed.

    The closing vector ``z0 = -sum z`` becomes the special edge; the result keeps
    ``n`` consecutive vertices including both of its endpoints.

    With ``refine`` the construction instead takes the ``n - 1`` primitives of
    least shape gauge and swaps up to ``shell`` of the outermost ones against the
    nearest outside ones while ``sum ||z|| + ||z0||`` decreases.  The closing edge
    then ends up short and the polygon needs no trimming, so no long chord or
    special edge distorts the edge set.
    """
    if n < 3:
        raise ValidationError("n must be at least 3")
    check_shape(shape)
    pts, s, lam = _primitives_in_scaled_shape(shape, n)
    info = {"lambda": lam}
    if not refine:
        chosen = pts[s <= lam * (1 + 1e-12)]
        info["collected"] = int(len(chosen))
        vectors = [Vec(int(x), int(y)) for x, y in chosen.tolist()]
        return _close_and_trim(vectors, body, n, "shape_guided", info)
    order = np.argsort(s, kind="stable")
    k = n - 1
    width = min(shell, k)
    core, inner, outer = order[: k - width], order[k - width: k], order[k: k + shell]
    core_keys = set(map(tuple, pts[core].tolist()))
    swapped, swaps = _swap_refine(pts[inner], pts[outer], body, pts[core].sum(axis=0), fixed=core_keys)
    chosen = np.concatenate([pts[core], swapped])
    info.update(collected=int(len(chosen)), swaps=swaps)
    vectors = [Vec(int(x), int(y)) for x, y in chosen.tolist()]
    return _close_and_trim(vectors, body, n, "shape_guided", info)


# --- exact search -----------------------------------------------------------


class _Search:
    def __init__(self, body, n, items, upper, budget):
        self.body = body
        self.n = n
        self.vecs = [v for v, _ in items]
        self.norms = [c for _, c in items]
        self.index = {v: i for i, v in enumerate(self.vecs)}
        m = len(items)
        self.prefix = [0.0]
        for c in self.norms:
            self.prefix.append(self.prefix[-1] + c)
        xs = [v.x for v in self.vecs]
        ys = [v.y for v in self.vecs]
        self.min_x = _suffix(xs, min)
        self.max_x = _suffix(xs, max)
        self.min_y = _suffix(ys, min)
        self.max_y = _suffix(ys, max)
        self.m = m
        self.tol = 1e-12 * upper
        self.best = upper * (1 + 1e-9)
        self.best_set = None
        self.nodes = 0
        self.budget = budget
        self._table(max((abs(x) for x in xs), default=0), max((abs(y) for y in ys), default=0))

    def _table(self, mx, my):
        R = self.n * max(mx, my)
        self.offset = R
        if (2 * R + 1) ** 2 <= 4_000_000:
            g = np.arange(-R, R + 1, dtype=float)
            X, Y = np.meshgrid(g, g, indexing="ij")
            self.closing = np.asarray(self.body.norm(np.stack([-X, -Y], axis=-1)))
        else:
            self.closing = None

    def closing_norm(self, sx, sy):
        if self.closing is not None:
            return float(self.closing[sx + self.offset, sy + self.offset])
        return float(self.body.norm(np.array([-sx, -sy], dtype=float)))

    def offer(self, chosen, cost):
        key = sorted(tuple(self.vecs[i]) for i in chosen)
        if self.best_set is None or cost < self.best - self.tol:
            if cost <= self.best + self.tol:
                self.best, self.best_set = cost, (key, list(chosen))
        elif cost <= self.best + self.tol and key < self.best_set[0]:
            self.best, self.best_set = min(cost, self.best), (key, list(chosen))

    def run(self):
        self._dfs(0, self.n, 0, 0, 0.0, [])

    def _dfs(self, start, k, sx, sy, cost, chosen):
        self.nodes += 1
        if self.nodes > self.budget:
            raise _OutOfBudget
        closing = self.closing_norm(sx, sy)
        if cost + closing > self.best + self.tol:
            return
        if k == 1:
            j = self.index.get(Vec(-sx, -sy))
            if j is not None and j >= start:
                self.offer(chosen + [j], cost + self.norms[j])
            return
        for i in range(start, self.m - k + 1):
            if cost + self.prefix[i + k] - self.prefix[i] > self.best + self.tol:
                break
            if not (k * self.min_x[i] <= -sx <= k * self.max_x[i] and k * self.min_y[i] <= -sy <= k * self.max_y[i]):
                break
            v = self.vecs[i]
            self._dfs(i + 1, k - 1, sx + v.x, sy + v.y, cost + self.norms[i], chosen + [i])


class _OutOfBudget(Exception):
    pass


def _suffix(values, fn):
    out = list(values)
    for i in range(len(out) - 2, -1, -1):
        out[i] = fn(out[i], out[i + 1])
    return out


def exact_minimizer(body: ConvexBody, n: int, budget: int = 5_000_000) -> MinimizerResult:
    """Global minimum of the D-perimeter over convex lattice n-gons, 3 <= n <= 10.

    Candidates are primitive vectors with norm at most ``U - (n-1) m1`` where ``U``
    is the greedy perimeter and ``m1`` the least primitive norm.  Subsets of
    ``n`` distinct candidates summing to zero are searched in norm order.  Among
    optima equal to 1e-12 relative, the lexicographically smallest sorted edge
    list wins.
    """
    if not 3 <= n <= 10:
        raise ValidationError("exact search supports 3 <= n <= 10")
    upper = greedy_polygon(body, n).perimeter
    m1 = float(body.norm(np.array(shortest_primitive_vectors(body, 1)[0], dtype=float)))
    radius = upper - (n - 1) * m1
    # primitive density times area of radius*D; refuse before enumerating a huge box
    expected = 6.0 / math.pi**2 * body.area * radius**2
    if expected > 4 * MAX_CANDIDATES:
        raise SearchTooLarge(f"about {expected:.3g} candidate vectors exceed {MAX_CANDIDATES}")
    pts, norms = _primitives_with_norm(body, radius * (1 + 1e-9))
    if len(pts) > MAX_CANDIDATES:
        raise SearchTooLarge(f"{len(pts)} candidate vectors exceed {MAX_CANDIDATES}")
    search = _Search(body, n, _sorted_by_norm(pts, norms), upper, budget)
    info = {"candidates": int(len(pts)), "upper_bound": upper}
    try:
        search.run()
    except _OutOfBudget:
        info["nodes"] = search.nodes
        best = None
        if search.best_set is not None:
            best = _exact_result(search, body, n, False, info)
        raise BudgetExceeded(f"node budget {budget} exhausted", best) from None
    info["nodes"] = search.nodes
    if search.best_set is None:
        raise ValidationError("no primitive zero-sum edge set found below the greedy bound")
    return _exact_result(search, body, n, True, info)


def _exact_result(search, body, n, certified, info):
    edges = [search.vecs[i] for i in search.best_set[1]]
    poly = increasing_slope_construct(edges).normalized()
    return MinimizerResult(poly, perimeter(poly, body), n, "exact", None, certified, info)


def density_lower_bound(body: ConvexBody, n: int) -> float:
    """Sum of the n smallest primitive D-norms; no convex lattice n-gon is shorter."""
    vs = shortest_primitive_vectors(body, n)
    return math.fsum(np.atleast_1d(body.norm(np.array(vs, dtype=float))).tolist())


def _in_parallelogram(a: Vec, b: Vec, x: Vec) -> bool:
    d = a.cross(b)
    s, t = x.cross(b), a.cross(x)
    if d < 0:
        d, s, t = -d, -s, -t
    return 0 <= s <= d and 0 <= t <= d


def swap_certificate_violations(edges) -> list[tuple]:
    """Witnesses against optimality of an edge set.

    For edges ``a != +-b`` and the parallelogram ``T = {0, a, b, a+b}``, an optimal
    edge set admits no distinct primitive ``x, y`` in ``T`` outside the edge set with
    ``x + y`` in ``T``.  Returns the offending ``(a, b, x, y)`` tuples.
    """
    es = [vec(e) for e in edges]
    eset = set(es)
    bad = []
    for a, b in itertools.combinations(es, 2):
        if a == -b or a.cross(b) == 0:
            continue
        xs = [0, a.x, b.x, a.x + b.x]
        ys = [0, a.y, b.y, a.y + b.y]
        inside = [
            Vec(x, y)
            for x in range(min(xs), max(xs) + 1)
            for y in range(min(ys), max(ys) + 1)
            if math.gcd(x, y) == 1 and Vec(x, y) not in eset and _in_parallelogram(a, b, Vec(x, y))
        ]
        for x, y in itertools.combinations(inside, 2):
            if _in_parallelogram(a, b, x + y):
                bad.append((a, b, x, y))
    return bad
