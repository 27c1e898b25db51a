"""Unit bodies, their (possibly asymmetric) gauge norms, and radial-function calculus.

Angles are measured anticlockwise from the positive x-axis and live in
``[0, 2*pi)``.  Every integral over a period uses the periodic rectangle rule on
a uniform grid, which is spectrally accurate for smooth integrands.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import InvalidBody

TWO_PI = 2.0 * math.pi
DEFAULT_GRID = 2048


def _is_power_of_two(n: int) -> bool:
    return n >= 1 and (n & (n - 1)) == 0


def grid_angles(n: int) -> np.ndarray:
    return TWO_PI * np.arange(n) / n


def _frozen(a) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class RadialFunction:
    """Samples ``r(2*pi*j/N)`` of a positive periodic function, ``N`` a power of two."""

    samples: np.ndarray

    def __post_init__(self):
        s = _frozen(self.samples)
        if s.ndim != 1 or not _is_power_of_two(s.size) or s.size < 4:
            raise InvalidBody(f"radial grid size must be a power of two >= 4, got shape {s.shape}")
        if not np.all(np.isfinite(s)) or np.any(s <= 0):
            raise InvalidBody("radial samples must be finite and strictly positive")
        object.__setattr__(self, "samples", s)

    @property
    def n(self) -> int:
        return self.samples.size

    @property
    def step(self) -> float:
        return TWO_PI / self.n

    @property
    def angles(self) -> np.ndarray:
        return grid_angles(self.n)

    def __call__(self, t):
        """Periodic linear interpolation."""
        return np.interp(np.mod(t, TWO_PI), self.angles, self.samples, period=TWO_PI)

    def scaled(self, s: float) -> RadialFunction:
        return RadialFunction(self.samples * s)

    def integrate(self, values) -> float:
        return float(np.sum(values) * self.step)

    def boundary(self) -> np.ndarray:
        t = self.angles
        return np.column_stack([self.samples * np.cos(t), self.samples * np.sin(t)])


def area(rf: RadialFunction) -> float:
    return 0.5 * rf.integrate(rf.samples**2)


def centroid_moment(rf: RadialFunction) -> np.ndarray:
    """``(int r^3 cos t dt, int r^3 sin t dt)``; the centroid is this over ``3 * area``."""
    t = rf.angles
    r3 = rf.samples**3
    return np.array([rf.integrate(r3 * np.cos(t)), rf.integrate(r3 * np.sin(t))])


def centroid(rf: RadialFunction) -> np.ndarray:
    return centroid_moment(rf) / (3.0 * area(rf))


def curvature_indicator(rf: RadialFunction) -> np.ndarray:
    """Discrete ``(1/r)'' + 1/r`` at each grid point.

    The second difference is divided by ``2(1 - cos h)`` instead of ``h**2`` so that
    ``a cos t + b sin t`` (a straight boundary segment) is annihilated exactly; the
    sign then says whether three consecutive boundary samples turn left.
    """
    w = 1.0 / rf.samples
    h = rf.step
    return (np.roll(w, -1) + np.roll(w, 1) - 2.0 * math.cos(h) * w) / (2.0 * (1.0 - math.cos(h)))


def convexity_certificate(rf: RadialFunction, tol: float | None = None) -> bool:
    w_max = float(np.max(1.0 / rf.samples))
    if tol is None:
        h = rf.step
        # roundoff floor: straight pieces cancel to ~eps * w / (1 - cos h)
        tol = 1e-8 * w_max + 64 * np.finfo(float).eps * w_max / (2.0 * (1.0 - math.cos(h)))
    return bool(np.all(curvature_indicator(rf) >= -tol))


class ConvexBody:
    """A convex body ``D`` with the origin in its interior.

    Subclasses provide the gauge ``norm`` and the radial function ``radial``;
    everything else derives from those.  Instances are immutable.
    """

    kind = "abstract"

    def norm(self, x) -> np.ndarray | float:
        raise NotImplementedError

    def radial(self, t):
        t = np.asarray(t, dtype=float)
        u = np.stack([np.cos(t), np.sin(t)], axis=-1)
        return 1.0 / self.norm(u)

    def scaled(self, s: float) -> ConvexBody:
        raise NotImplementedError

    def reflected(self) -> ConvexBody:
        """The body ``-D``; its norm gives clockwise perimeters."""
        raise NotImplementedError

    def to_json(self) -> dict:
        raise NotImplementedError

    def radial_function(self, n: int = DEFAULT_GRID) -> RadialFunction:
        return RadialFunction(self.radial(grid_angles(n)))

    def kinks(self) -> np.ndarray:
        """Angles where the radial function is not smooth (empty for smooth bodies)."""
        return np.empty(0)

    @cached_property
    def area(self) -> float:
        return area(self.radial_function(8192))

    @cached_property
    def centroid(self) -> np.ndarray:
        return centroid(self.radial_function(8192))

    @cached_property
    def r_in(self) -> float:
        return float(np.min(self.radial(grid_angles(8192))))

    @cached_property
    def r_out(self) -> float:
        return float(np.max(self.radial(grid_angles(8192))))

    @cached_property
    def boundary_samples(self) -> np.ndarray:
        """Boundary points at 8192 equally spaced angles."""
        return self.radial_function(8192).boundary()

    @cached_property
    def euclidean_perimeter(self) -> float:
        pts = self.boundary_samples
        return float(np.sum(np.hypot(*(np.roll(pts, -1, axis=0) - pts).T)))

    def contains(self, x, tol: float = 1e-12) -> np.ndarray:
        return np.asarray(self.norm(x)) <= 1.0 + tol

    def __repr__(self):
        return f"{type(self).__name__}({self.to_json()})"


def _polar_norm(x, radius_at) -> np.ndarray | float:
    x = np.asarray(x, dtype=float)
    length = np.hypot(x[..., 0], x[..., 1])
    theta = np.arctan2(x[..., 1], x[..., 0])
    out = length / radius_at(theta)
    return float(out) if out.ndim == 0 else out


class DiskBody(ConvexBody):
    kind = "disk"

    def __init__(self, radius: float = 1.0):
        if not radius > 0:
            raise InvalidBody("disk radius must be positive")
        self.radius = float(radius)

    def norm(self, x):
        x = np.asarray(x, dtype=float)
        out = np.hypot(x[..., 0], x[..., 1]) / self.radius
        return float(out) if out.ndim == 0 else out

    def radial(self, t):
        return np.full(np.shape(t), self.radius) if np.ndim(t) else self.radius

    def scaled(self, s):
        return DiskBody(self.radius * s)

    def reflected(self):
        return self

    def to_json(self):
        return {"type": "disk", "radius": self.radius}

    @cached_property
    def area(self):
        return math.pi * self.radius**2

    @cached_property
    def centroid(self):
        return np.zeros(2)

    @cached_property
    def r_in(self):
        return self.radius

    @cached_property
    def r_out(self):
        return self.radius

    @cached_property
    def euclidean_perimeter(self):
        return TWO_PI * self.radius


class EllipseFocusBody(ConvexBody):
    """Ellipse with a focus at the origin: ``r(t) = p / (1 + e_x cos t + e_y sin t)``."""

    kind = "ellipse_focus"

    def __init__(self, p: float, e=(0.0, 0.0)):
        e = np.asarray(e, dtype=float)
        if not p > 0:
            raise InvalidBody("semi-latus rectum p must be positive")
        if e.shape != (2,) or not float(e @ e) < 1.0:
            raise InvalidBody("eccentricity vector must have length < 1")
        self.p = float(p)
        self.e = _frozen(e)

    def norm(self, x):
        x = np.asarray(x, dtype=float)
        out = (np.hypot(x[..., 0], x[..., 1]) + x @ self.e) / self.p
        return float(out) if out.ndim == 0 else out

    def radial(self, t):
        return self.p / (1.0 + self.e[0] * np.cos(t) + self.e[1] * np.sin(t))

    def scaled(self, s):
        return EllipseFocusBody(self.p * s, self.e)

    def reflected(self):
        return EllipseFocusBody(self.p, -self.e)

    def to_json(self):
        return {"type": "ellipse_focus", "p": self.p, "e": self.e.tolist()}

    @property
    def eccentricity(self) -> float:
        return float(np.hypot(*self.e))

    @cached_property
    def area(self):
        return math.pi * self.p**2 / (1.0 - self.eccentricity**2) ** 1.5

    @cached_property
    def centroid(self):
        # centre sits a*|e| from the focus, opposite to the perihelion direction
        return -self.p / (1.0 - self.eccentricity**2) * self.e

    @cached_property
    def r_in(self):
        return self.p / (1.0 + self.eccentricity)

    @cached_property
    def r_out(self):
        return self.p / (1.0 - self.eccentricity)


class PolygonBody(ConvexBody):
    """Convex polygon, vertices anticlockwise; the gauge is exact via facet normals."""

    kind = "polygon"

    def __init__(self, vertices):
        v = np.asarray(vertices, dtype=float)
        if v.ndim != 2 or v.shape[1] != 2 or v.shape[0] < 3 or not np.all(np.isfinite(v)):
            raise InvalidBody("polygon needs at least 3 finite 2-D vertices")
        edges = np.roll(v, -1, axis=0) - v
        if np.any(np.hypot(*edges.T) == 0):
            raise InvalidBody("polygon has repeated vertices")
        turns = edges[:, 0] * np.roll(edges, -1, axis=0)[:, 1] - edges[:, 1] * np.roll(edges, -1, axis=0)[:, 0]
        scale = float(np.max(np.hypot(*edges.T))) ** 2
        if np.any(turns < -1e-12 * scale) or np.sum(turns) <= 0:
            raise InvalidBody("polygon must be convex with vertices in anticlockwise order")
        normals = np.column_stack([edges[:, 1], -edges[:, 0]])
        offsets = np.einsum("ij,ij->i", normals, v)
        if np.any(offsets <= 1e-12 * scale):
            raise InvalidBody("origin must lie strictly inside the polygon")
        self.vertices = _frozen(v)
        self._facets = _frozen(normals / offsets[:, None])

    def norm(self, x):
        x = np.asarray(x, dtype=float)
        out = np.max(x @ self._facets.T, axis=-1)
        out = np.maximum(out, 0.0)
        return float(out) if out.ndim == 0 else out

    def scaled(self, s):
        return PolygonBody(self.vertices * s)

    def reflected(self):
        return PolygonBody(-self.vertices)

    def to_json(self):
        return {"type": "polygon", "vertices": self.vertices.tolist()}

    def kinks(self):
        return np.sort(np.mod(np.arctan2(self.vertices[:, 1], self.vertices[:, 0]), TWO_PI))

    @cached_property
    def area(self):
        x, y = self.vertices.T
        return 0.5 * float(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))

    @cached_property
    def centroid(self):
        x, y = self.vertices.T
        xn, yn = np.roll(x, -1), np.roll(y, -1)
        cr = x * yn - xn * y
        return np.array([np.sum((x + xn) * cr), np.sum((y + yn) * cr)]) / (6.0 * self.area)

    @cached_property
    def r_in(self):
        return float(np.min(1.0 / np.hypot(*self._facets.T)))

    @cached_property
    def r_out(self):
        return float(np.max(np.hypot(*self.vertices.T)))

    @cached_property
    def euclidean_perimeter(self):
        return float(np.sum(np.hypot(*(np.roll(self.vertices, -1, axis=0) - self.vertices).T)))


class RadialBody(ConvexBody):
    """Body given by radial samples; off-grid values use periodic linear interpolation."""

    kind = "radial"

    def __init__(self, rf):
        if not isinstance(rf, RadialFunction):
            rf = RadialFunction(rf)
        self.rf = rf

    def norm(self, x):
        return _polar_norm(x, self.rf)

    def radial(self, t):
        return self.rf(t)

    def radial_function(self, n=DEFAULT_GRID):
        if n == self.rf.n:
            return self.rf
        return super().radial_function(n)

    def scaled(self, s):
        return RadialBody(self.rf.scaled(s))

    def reflected(self):
        return RadialBody(np.roll(self.rf.samples, -self.rf.n // 2))

    def to_json(self):
        return {"type": "radial", "samples": self.rf.samples.tolist()}

    def kinks(self):
        return self.rf.angles

    @cached_property
    def area(self):
        return area(self.rf)

    @cached_property
    def centroid(self):
        return centroid(self.rf)

    @cached_property
    def r_in(self):
        return float(np.min(self.rf.samples))

    @cached_property
    def r_out(self):
        return float(np.max(self.rf.samples))


def unit_area_disk() -> DiskBody:
    return DiskBody(1.0 / math.sqrt(math.pi))


def norm_eval(body: ConvexBody, x):
    return body.norm(x)


def radial_eval(body: ConvexBody, t):
    return body.radial(t)


def scale_to_unit_area(body: ConvexBody) -> ConvexBody:
    s = body.area ** -0.5
    if abs(s - 1.0) < 1e-15:
        return body
    return body.scaled(s)


def body_from_json(data: dict) -> ConvexBody:
    kind = data.get("type")
    try:
        if kind == "polygon":
            return PolygonBody(data["vertices"])
        if kind == "radial":
            return RadialBody(RadialFunction(data["samples"]))
        if kind == "ellipse_focus":
            return EllipseFocusBody(data["p"], data.get("e", (0.0, 0.0)))
        if kind == "disk":
            return DiskBody(data.get("radius", 1.0))
    except (KeyError, TypeError) as exc:
        raise InvalidBody(f"malformed {kind!r} body: {exc}") from exc
    raise InvalidBody(f"unknown body type {kind!r}")
