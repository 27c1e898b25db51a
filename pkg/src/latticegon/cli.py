"""Command-line front end.

Exit codes: 0 on success, 2 for invalid input, 3 when a numeric routine fails
(no convergence, search budget exhausted, non-closing limit curve).
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

import numpy as np

from .analysis import ExperimentConfig, densify, format_table, render_svg, run_convergence
from .errors import BudgetExceeded, NumericError, ValidationError
from .geometry import DEFAULT_GRID, RadialFunction, body_from_json, scale_to_unit_area, unit_area_disk
from .lattice import convex_hull
from .minimizer import exact_minimizer, greedy_polygon, min_perimeter_orientation, shape_guided_polygon
from .variational import alpha_two_ways, is_circle_limit, limit_polygon, solve_vp

log = logging.getLogger("latticegon")

EXIT_OK, EXIT_INVALID, EXIT_NUMERIC = 0, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INVALID, f"{self.prog}: error: {message}\n")


def _read_json(path):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise ValidationError(f"cannot read {path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{path} is not valid JSON: {exc}") from exc


def _load_body(args):
    body = unit_area_disk() if args.body is None else body_from_json(_read_json(args.body))
    return body if args.raw_scale else scale_to_unit_area(body)


def _emit(args, payload: dict, text: str, name: str):
    if args.json:
        print(json.dumps(payload, sort_keys=True))
    else:
        print(text)
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / f"{name}.json").write_text(json.dumps(payload, sort_keys=True, indent=1) + "\n", encoding="utf-8")


def _result_text(res, body, both):
    lines = [
        f"method     {res.method}",
        f"n          {res.n}",
        f"perimeter  {res.perimeter:.12g}",
        f"scaled     {res.perimeter / res.n**1.5:.10f}",
        f"certified  {res.certified}",
        "vertices   " + " ".join(f"({v.x},{v.y})" for v in res.polygon.vertices[:40]),
    ]
    if res.n > 40:
        lines[-1] += " ..."
    if both:
        lines.append(f"min over orientations {min_perimeter_orientation(res.polygon, body):.12g}")
    return "\n".join(lines)


def _result_payload(res, body, both):
    payload = res.to_json()
    if both:
        payload["perimeter_min_orientation"] = min_perimeter_orientation(res.polygon, body)
    return payload


def cmd_solve_vp(args):
    sol = solve_vp(_load_body(args), grid=args.grid)
    payload = sol.to_json()
    if not args.samples:
        payload.pop("r_samples")
    text = (
        f"a = {sol.a:.12g}\nb = {sol.b:.12g}\nc = {sol.c:.12g}\n"
        f"alpha = {sol.alpha:.12g}\niterations = {sol.iterations}\n"
        f"max residual = {float(np.max(np.abs(sol.residuals))):.3g}"
    )
    _emit(args, payload, text, "vp")


def cmd_limit_shape(args):
    body = _load_body(args)
    sol = solve_vp(body, grid=args.grid)
    lp = limit_polygon(sol)
    payload = {
        "shape_boundary": sol.r.boundary().tolist(),
        "limit_polygon": lp.to_json(),
        "circle_limit": is_circle_limit(body, grid=args.grid),
        "alpha": sol.alpha,
    }
    text = (
        f"alpha = {sol.alpha:.12g}\nclosure gap = {lp.closure_gap:.3g}\n"
        f"circle limit = {payload['circle_limit']}"
    )
    _emit(args, payload, text, "limit_shape")
    if args.out:
        shape = sol.r.boundary()
        limit = lp.boundary - lp.boundary.mean(axis=0)
        render_svg([(shape, "shape"), (limit, "limit")], Path(args.out) / "limit_shape.svg")


def cmd_alpha(args):
    body = _load_body(args)
    sol = solve_vp(body, grid=args.grid)
    planar, sector = alpha_two_ways(sol, body)
    rel = abs(planar - sector) / abs(sector)
    payload = {"alpha_sector": sector, "alpha_planar": planar, "relative_difference": rel}
    _emit(args, payload, f"sector  {sector:.15g}\nplanar  {planar:.15g}\nrel.diff {rel:.3g}", "alpha")


def _polygon_command(args, res, body, name):
    _emit(args, _result_payload(res, body, args.both_orientations), _result_text(res, body, args.both_orientations), name)
    if args.out:
        render_svg([(res.polygon.vertices, "polygon")], Path(args.out) / f"{name}.svg", grid_lines=True)


def cmd_exact(args):
    body = _load_body(args)
    try:
        res = exact_minimizer(body, args.n, budget=args.budget)
    except BudgetExceeded as exc:
        if exc.best is not None:
            print("best uncertified: " + json.dumps(exc.best.to_json(), sort_keys=True), file=sys.stderr)
        raise
    _polygon_command(args, res, body, "exact")


def cmd_greedy(args):
    body = _load_body(args)
    _polygon_command(args, greedy_polygon(body, args.n), body, "greedy")


def cmd_shape_guided(args):
    body = _load_body(args)
    if args.shape:
        data = _read_json(args.shape)
        shape = RadialFunction(data["r_samples"] if "r_samples" in data else data["samples"])
    else:
        shape = solve_vp(body, grid=args.grid).r
    _polygon_command(args, shape_guided_polygon(body, shape, args.n, refine=args.refine), body, "shape_guided")


def cmd_converge(args):
    body = _load_body(args)
    config = ExperimentConfig(
        n_values=args.n,
        body=body,
        grid=args.grid,
        method=args.method,
        seed=args.seed,
        output_dir=args.out,
        refine=args.refine,
        exact_up_to=args.exact_up_to,
    )
    records = run_convergence(config)
    if args.json:
        for r in records:
            print(json.dumps(r.to_json(), sort_keys=True))
    else:
        print(format_table(records), end="")


def _curves_from(data):
    """Closed curves in a JSON document written by this tool."""
    if isinstance(data, list):
        return [c for item in data for c in _curves_from(item)]
    if not isinstance(data, dict):
        raise ValidationError("render input must be a JSON object or list")
    curves = []
    if "vertices" in data:
        curves.append((data["vertices"], "polygon"))
    if "edges" in data and data.get("hull"):
        curves.append((convex_hull(data["edges"]), "hull"))
    if "shape_boundary" in data:
        curves.append((data["shape_boundary"], "shape"))
    if "limit_polygon" in data:
        b = np.asarray(data["limit_polygon"]["boundary"], dtype=float)
        curves.append((b - b.mean(axis=0), "limit"))
    if "boundary" in data:
        curves.append((data["boundary"], "limit"))
    return curves


def cmd_render(args):
    curves = _curves_from(_read_json(args.input))
    if not curves:
        raise ValidationError(f"nothing to draw in {args.input}")
    target = Path(args.svg) if args.svg else Path(args.out or ".") / (Path(args.input).stem + ".svg")
    target.parent.mkdir(parents=True, exist_ok=True)
    path = render_svg(curves, target, grid_lines=args.grid_lines)
    print(path)


def _common(suppress: bool) -> argparse.ArgumentParser:
    # Sub-commands get the same flags with suppressed defaults so a flag given
    # before the sub-command name is not overwritten.
    def d(value):
        return argparse.SUPPRESS if suppress else value

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--body", metavar="FILE", default=d(None), help="body JSON (default: the unit-area disk)")
    common.add_argument("--grid", type=int, default=d(DEFAULT_GRID), help="angular samples (power of two)")
    common.add_argument("--out", metavar="DIR", default=d(None), help="directory for JSON/SVG output")
    common.add_argument("--seed", type=int, default=d(0))
    common.add_argument("--json", action="store_true", default=d(False), help="print JSON instead of text")
    common.add_argument(
        "--raw-scale", action="store_true", default=d(False), help="use the body as given, not rescaled to unit area"
    )
    common.add_argument("-v", "--verbose", action="store_true", default=d(False))
    return common


def build_parser() -> argparse.ArgumentParser:
    common = _common(suppress=True)
    p = _Parser(prog="latticegon", description=__doc__.splitlines()[0], parents=[_common(suppress=False)])
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name, fn, help_):
        sp = sub.add_parser(name, help=help_, parents=[common])
        sp.set_defaults(func=fn)
        return sp

    sp = add("solve-vp", cmd_solve_vp, "solve the variational problem")
    sp.add_argument("--samples", action="store_true", help="include the radial samples in JSON")
    add("limit-shape", cmd_limit_shape, "limit shape C and limit polygon P")
    add("alpha", cmd_alpha, "asymptotic constant computed two ways")
    for name, fn, help_ in (
        ("exact", cmd_exact, "certified minimal n-gon (small n)"),
        ("greedy", cmd_greedy, "n shortest primitive vectors, closed"),
        ("shape-guided", cmd_shape_guided, "primitive vectors of a scaled shape, closed"),
    ):
        sp = add(name, fn, help_)
        sp.add_argument("--n", type=int, required=True)
        sp.add_argument("--both-orientations", action="store_true", help="also report the smaller of the D and -D perimeters")
        if name == "exact":
            sp.add_argument("--budget", type=int, default=5_000_000, help="search node budget")
        if name == "shape-guided":
            sp.add_argument("--shape", metavar="FILE", help="radial samples JSON (default: the solved limit shape)")
            sp.add_argument("--refine", action="store_true", help="n-1 vectors plus a short closing edge, locally improved")
    sp = add("converge", cmd_converge, "convergence table over several n")
    sp.add_argument("--n", type=int, nargs="+", required=True)
    sp.add_argument("--method", default="shape_guided", choices=("shape_guided", "greedy", "exact"))
    sp.add_argument("--refine", action="store_true")
    sp.add_argument("--exact-up-to", type=int, default=8)
    sp = add("render", cmd_render, "draw polygons and curves from a JSON output as SVG")
    sp.add_argument("--input", required=True, metavar="FILE")
    sp.add_argument("--svg", metavar="FILE", help="output path (default: OUT/<input>.svg)")
    sp.add_argument("--grid-lines", action="store_true")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        args.func(args)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except NumericError as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
