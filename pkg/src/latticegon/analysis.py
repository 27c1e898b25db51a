"""Convergence experiments, Hausdorff comparisons and SVG output."""

from __future__ import annotations

import json
import logging
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np
from scipy.spatial import cKDTree

from .errors import NumericError, ValidationError
from .geometry import ConvexBody, body_from_json, scale_to_unit_area
from .lattice import convex_hull, polygon_area
from .minimizer import density_lower_bound, exact_minimizer, greedy_polygon, shape_guided_polygon
from .variational import limit_polygon, solve_vp

log = logging.getLogger(__name__)

METHODS = ("shape_guided", "greedy", "exact")


def densify(vertices, count: int = 4096) -> np.ndarray:
    """Closed polyline through ``vertices`` resampled to about ``count`` points, vertices kept."""
    v = np.asarray(vertices, dtype=float)
    nxt = np.roll(v, -1, axis=0)
    seg = np.hypot(*(nxt - v).T)
    per = float(seg.sum())
    out = []
    for a, b, length in zip(v, nxt, seg):
        k = max(1, int(math.ceil(count * length / per))) if per > 0 else 1
        s = np.arange(k)[:, None] / k
        out.append(a + s * (b - a))
    return np.concatenate(out)


def _spacing(points) -> float:
    p = np.asarray(points, dtype=float)
    return float(np.max(np.hypot(*(np.roll(p, -1, axis=0) - p).T)))


def hausdorff(a, b) -> tuple[float, float]:
    """Symmetric max-min distance between two sampled closed boundaries.

    Returns ``(distance, gap)``: the true boundary distance lies within ``gap`` (half
    the largest sample spacing of each curve, summed) of ``distance``.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if len(a) < 64 or len(b) < 64:
        raise ValidationError("boundaries need at least 64 samples each")
    d_ab = cKDTree(b).query(a)[0].max()
    d_ba = cKDTree(a).query(b)[0].max()
    return float(max(d_ab, d_ba)), 0.5 * (_spacing(a) + _spacing(b))


def diameter(points) -> float:
    p = np.asarray(points, dtype=float)
    d = p[:, None, :] - p[None, :, :]
    return float(np.sqrt(np.max(np.einsum("ijk,ijk->ij", d, d))))


def normalize_area(points) -> np.ndarray:
    p = np.asarray(points, dtype=float)
    return p / math.sqrt(polygon_area(p))


@dataclass
class ExperimentConfig:
    n_values: tuple = ()
    body_path: str | None = None
    body: ConvexBody | None = None
    grid: int = 2048
    method: str = "shape_guided"
    seed: int = 0
    output_dir: str | None = None
    refine: bool = False
    exact_up_to: int = 8

    def __post_init__(self):
        self.n_values = tuple(int(n) for n in self.n_values)
        if any(n < 3 for n in self.n_values):
            raise ValidationError("every n must be at least 3")
        if any(b <= a for a, b in zip(self.n_values, self.n_values[1:])):
            raise ValidationError("n values must be strictly increasing")
        if self.grid < 256 or self.grid > 2**20 or self.grid & (self.grid - 1):
            raise ValidationError("grid must be a power of two in [256, 2^20]")
        if self.method not in METHODS:
            raise ValidationError(f"method must be one of {METHODS}")
        if self.body is None and self.body_path is None:
            raise ValidationError("a body or a body path is required")

    def load_body(self) -> ConvexBody:
        if self.body is not None:
            return self.body
        with open(self.body_path, encoding="utf-8") as fh:
            return body_from_json(json.load(fh))


@dataclass
class ConvergenceRecord:
    n: int
    method: str
    perimeter: float | None = None
    scaled: float | None = None
    alpha_ref: float | None = None
    hausdorff_C: float | None = None
    hausdorff_P: float | None = None
    lower_bound: float | None = None
    exact_scaled: float | None = None
    info: dict = field(default_factory=dict)
    error: str | None = None

    @property
    def relative_error(self) -> float:
        return abs(self.scaled - self.alpha_ref) / self.alpha_ref

    def to_json(self) -> dict:
        return asdict(self)


def _limit_comparisons(result, shape_boundary, limit_boundary):
    hull = convex_hull(result.edges)
    c_n = normalize_area(densify(hull))
    h_c, _ = hausdorff(c_n, shape_boundary)
    poly = normalize_area(densify(result.polygon.normalized().vertices))
    h_p, _ = hausdorff(poly, limit_boundary)
    return h_c, h_p


def run_convergence(config: ExperimentConfig) -> list[ConvergenceRecord]:
    """Scaled perimeters and limit-shape distances for each ``n``.

    The body is rescaled to unit area.  Failures at one ``n`` are recorded on its
    row and the sweep continues.
    """
    records: list[ConvergenceRecord] = []
    if not config.n_values:
        _write(config, records)
        return records
    body = scale_to_unit_area(config.load_body())
    sol = solve_vp(body, grid=config.grid)
    shape_boundary = sol.r.boundary()
    limit_boundary = normalize_area(limit_polygon(sol).boundary)
    for n in config.n_values:
        rec = ConvergenceRecord(n=n, method=config.method, alpha_ref=sol.alpha)
        try:
            if config.method == "exact":
                res = exact_minimizer(body, n)
            elif config.method == "greedy":
                res = greedy_polygon(body, n)
            else:
                res = shape_guided_polygon(body, sol.r, n, refine=config.refine)
            rec.perimeter = res.perimeter
            rec.scaled = res.perimeter / n**1.5
            rec.lower_bound = density_lower_bound(body, n) / n**1.5
            rec.hausdorff_C, rec.hausdorff_P = _limit_comparisons(res, shape_boundary, limit_boundary)
            rec.info = {k: v for k, v in res.info.items() if k in ("lambda", "collected", "swaps", "closing", "nodes")}
            if n <= config.exact_up_to and config.method != "exact":
                rec.exact_scaled = exact_minimizer(body, n).perimeter / n**1.5
        except (ValidationError, NumericError) as exc:
            log.warning("n=%d failed: %s", n, exc)
            rec.error = f"{type(exc).__name__}: {exc}"
        records.append(rec)
    _write(config, records)
    return records


def format_table(records) -> str:
    head = f"{'n':>7} {'perimeter':>14} {'scaled':>10} {'alpha':>10} {'rel.err':>9} {'haus C':>8} {'haus P':>8}"
    lines = [head]
    for r in records:
        if r.error:
            lines.append(f"{r.n:>7} failed: {r.error}")
            continue
        lines.append(
            f"{r.n:>7} {r.perimeter:>14.6f} {r.scaled:>10.6f} {r.alpha_ref:>10.6f} "
            f"{r.relative_error:>9.5f} {r.hausdorff_C:>8.5f} {r.hausdorff_P:>8.5f}"
        )
    return "\n".join(lines) + "\n"


def _write(config, records):
    if not config.output_dir:
        return
    out = Path(config.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "convergence.jsonl", "w", encoding="utf-8") as fh:
        for r in records:
            fh.write(json.dumps(r.to_json(), sort_keys=True) + "\n")
    (out / "convergence.txt").write_text(format_table(records), encoding="utf-8")


# --- SVG --------------------------------------------------------------------


def _fmt(x: float) -> str:
    s = f"{x:.6f}".rstrip("0").rstrip(".")
    return "0" if s in ("-0", "") else s


def render_svg(objects, path, grid_lines: bool = False, size: int = 600) -> Path:
    """Write closed curves as an SVG.

    ``objects`` is a list of ``(points, css_class)`` pairs.  The y-axis points up.
    """
    if not objects:
        raise ValidationError("nothing to render")
    curves = [(np.asarray(p, dtype=float), str(cls)) for p, cls in objects]
    allpts = np.concatenate([c for c, _ in curves])
    lo, hi = allpts.min(axis=0), allpts.max(axis=0)
    span = float(max(hi[0] - lo[0], hi[1] - lo[1], 1e-12))
    pad = 0.05 * span
    x0, y0 = lo[0] - pad, -hi[1] - pad
    w, h = hi[0] - lo[0] + 2 * pad, hi[1] - lo[1] + 2 * pad
    stroke = _fmt(span / 400)
    parts = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" '
        f'viewBox="{_fmt(x0)} {_fmt(y0)} {_fmt(w)} {_fmt(h)}">',
        "<style>path{fill:none;stroke-width:%s}.grid{stroke:#ddd}.polygon{stroke:#1f4e9c}"
        ".limit{stroke:#c0392b}.shape{stroke:#27ae60}.hull{stroke:#8e44ad}</style>" % stroke,
    ]
    if grid_lines and span <= 200:
        d = []
        for gx in range(math.ceil(lo[0]), math.floor(hi[0]) + 1):
            d.append(f"M{gx} {_fmt(y0)}V{_fmt(y0 + h)}")
        for gy in range(math.ceil(lo[1]), math.floor(hi[1]) + 1):
            d.append(f"M{_fmt(x0)} {-gy}H{_fmt(x0 + w)}")
        parts.append(f'<path class="grid" d="{"".join(d)}"/>')
    for pts, cls in curves:
        d = "M" + "L".join(f"{_fmt(x)} {_fmt(-y)}" for x, y in pts) + "Z"
        parts.append(f'<path class="{cls}" d="{d}"/>')
    parts.append("</svg>")
    path = Path(path)
    try:
        path.write_text("\n".join(parts) + "\n", encoding="utf-8")
    except OSError as exc:
        raise OSError(f"cannot write SVG to {path}: {exc}") from exc
    return path
