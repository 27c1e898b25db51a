import json
import math
import re

import numpy as np
import pytest

from latticegon import EllipseFocusBody, scale_to_unit_area, shape_guided_polygon, solve_vp, unit_area_disk
from latticegon.analysis import (
    ExperimentConfig,
    densify,
    diameter,
    format_table,
    hausdorff,
    normalize_area,
    render_svg,
    run_convergence,
)
from latticegon.errors import ValidationError
from latticegon.variational import limit_polygon
from oracles import support_distance


def circle(radius, n=4096):
    t = 2 * np.pi * np.arange(n) / n
    return radius * np.column_stack([np.cos(t), np.sin(t)])


# --- Hausdorff ------------------------------------------------------------------


def test_identical_sets():
    d, gap = hausdorff(circle(1), circle(1))
    assert d == 0.0 and gap > 0


def test_concentric_circles():
    d, gap = hausdorff(circle(1), circle(1.1))
    assert abs(d - 0.1) <= gap


def test_square_against_rotated_square():
    sq = densify([(-0.5, -0.5), (0.5, -0.5), (0.5, 0.5), (-0.5, 0.5)], 8192)
    h = math.sqrt(0.5)
    diamond = densify([(h, 0), (0, h), (-h, 0), (0, -h)], 8192)
    d, _ = hausdorff(sq, diamond)
    assert d == pytest.approx(support_distance(sq, diamond), abs=1e-3)
    assert d == pytest.approx((math.sqrt(2) - 1) / 2, abs=1e-3)


def test_hausdorff_needs_samples():
    with pytest.raises(ValidationError):
        hausdorff(circle(1, 32), circle(1))


def test_helpers():
    sq = [(0, 0), (2, 0), (2, 2), (0, 2)]
    assert diameter(sq) == pytest.approx(2 * math.sqrt(2))
    dense = densify(sq, 400)
    assert len(dense) >= 400 and np.allclose(dense[0], (0, 0))
    unit = normalize_area(sq)
    assert np.allclose(unit, np.array(sq) / 2)


def test_ellipse_focus_polygon_close_to_limit_polygon():
    body = scale_to_unit_area(EllipseFocusBody(1.0, (0.4, 0.3)))
    sol = solve_vp(body)
    lp = normalize_area(limit_polygon(sol).boundary)
    res = shape_guided_polygon(body, sol.r, 2000)
    poly = normalize_area(densify(res.polygon.vertices))
    d, _ = hausdorff(poly, lp)
    assert d < 0.15 * diameter(lp[::8])


# --- config ---------------------------------------------------------------------


@pytest.mark.parametrize(
    "kwargs",
    [
        {"n_values": (5, 4)},
        {"n_values": (2, 5)},
        {"n_values": (4,), "grid": 300},
        {"n_values": (4,), "grid": 128},
        {"n_values": (4,), "method": "magic"},
    ],
)
def test_config_validation(kwargs):
    kwargs.setdefault("body", unit_area_disk())
    with pytest.raises(ValidationError):
        ExperimentConfig(**kwargs)


def test_config_needs_body():
    with pytest.raises(ValidationError):
        ExperimentConfig(n_values=(4,))


# --- convergence runs ----------------------------------------------------------


def test_empty_run(tmp_path):
    recs = run_convergence(ExperimentConfig(n_values=(), body=unit_area_disk(), output_dir=str(tmp_path)))
    assert recs == []
    assert (tmp_path / "convergence.jsonl").read_text() == ""


def test_exact_square_scaled(tmp_path):
    recs = run_convergence(ExperimentConfig(n_values=(4,), body=unit_area_disk(), method="exact"))
    assert recs[0].scaled == pytest.approx(math.sqrt(math.pi) / 2, rel=1e-12)


def test_run_writes_deterministic_output(tmp_path):
    outs = []
    for k in range(2):
        d = tmp_path / f"run{k}"
        cfg = ExperimentConfig(n_values=(6, 50, 200), body=unit_area_disk(), output_dir=str(d), seed=3)
        recs = run_convergence(cfg)
        outs.append((d / "convergence.jsonl").read_bytes())
    assert outs[0] == outs[1]
    lines = [json.loads(x) for x in outs[0].decode().splitlines()]
    assert [x["n"] for x in lines] == [6, 50, 200]
    assert lines[0]["exact_scaled"] is not None and lines[2]["exact_scaled"] is None
    assert "scaled" in (tmp_path / "run0" / "convergence.txt").read_text()
    for r in recs:
        assert r.scaled > 0 and r.hausdorff_C >= 0 and r.hausdorff_P >= 0
        assert r.scaled >= r.lower_bound - 1e-12
        assert r.exact_scaled is None or r.exact_scaled <= r.scaled + 1e-12


def test_failures_are_recorded_per_n(quad):
    recs = run_convergence(ExperimentConfig(n_values=(4, 11, 12), body=quad, method="exact"))
    assert recs[0].error is None
    assert recs[1].error and recs[1].error.startswith("ValidationError")
    assert "failed" in format_table(recs)


def test_disk_sweep_approaches_alpha():
    recs = run_convergence(ExperimentConfig(n_values=(100, 400, 1600, 6400), body=unit_area_disk(), exact_up_to=0))
    errors = [r.relative_error for r in recs]
    assert all(a > b for a, b in zip(errors, errors[1:]))
    assert errors[-1] < 0.10


# --- SVG --------------------------------------------------------------------


def test_svg_unit_square(tmp_path):
    p = render_svg([([(0, 0), (1, 0), (1, 1), (0, 1)], "polygon")], tmp_path / "sq.svg")
    text = p.read_text()
    paths = re.findall(r'<path class="(\w+)" d="([^"]+)"', text)
    assert len(paths) == 1
    cls, d = paths[0]
    assert cls == "polygon" and d.startswith("M") and d.endswith("Z") and d.count("L") == 3


def test_svg_overlay_and_determinism(tmp_path):
    objs = [([(0, 0), (1, 0), (1, 1), (0, 1)], "polygon"), (circle(0.5, 64) + 0.5, "limit")]
    a = render_svg(objs, tmp_path / "a.svg", grid_lines=True).read_bytes()
    b = render_svg(objs, tmp_path / "b.svg", grid_lines=True).read_bytes()
    assert a == b
    classes = re.findall(r'<path class="(\w+)"', a.decode())
    assert classes == ["grid", "polygon", "limit"]


def test_svg_empty_and_bad_path(tmp_path):
    target = tmp_path / "none.svg"
    with pytest.raises(ValidationError):
        render_svg([], target)
    assert not target.exists()
    with pytest.raises(OSError, match="missing"):
        render_svg([([(0, 0), (1, 0), (0, 1)], "polygon")], tmp_path / "missing" / "x.svg")
