"""Limit shape, asymptotic constant and limit polygon for a unit body.

The minimiser of ``int r^3/r0`` under zero first moments of ``r^3`` and unit area
is ``1/r = a/r0 + b cos t + c sin t`` for the unique ``a > 0, b, c`` meeting the
three constraints.  ``solve_vp`` finds ``(a, b, c)`` by damped Newton iteration.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import GridMismatch, NoConvergence, NonPositive, NotClosed, ValidationError
from .geometry import (
    DEFAULT_GRID,
    TWO_PI,
    ConvexBody,
    RadialFunction,
    area,
    centroid_moment,
    convexity_certificate,
)

ALPHA_FACTOR = math.pi / (3.0 * math.sqrt(6.0))


def vp_objective(r: RadialFunction, r0: RadialFunction) -> float:
    if r.n != r0.n:
        raise GridMismatch(f"grid sizes differ: {r.n} vs {r0.n}")
    return r.integrate(r.samples**3 / r0.samples)


def constraint_residuals(r: RadialFunction) -> np.ndarray:
    m = centroid_moment(r)
    return np.array([m[0], m[1], area(r) - 1.0])


@dataclass(frozen=True)
class VPSolution:
    a: float
    b: float
    c: float
    r: RadialFunction
    r0: RadialFunction
    scale: float
    objective: float
    alpha: float
    residuals: np.ndarray
    iterations: int

    def radius(self, t, body: ConvexBody):
        """The solution radial function at arbitrary angles, using the body's exact ``r0``."""
        r0 = self.scale * np.asarray(body.radial(t))
        return 1.0 / (self.a / r0 + self.b * np.cos(t) + self.c * np.sin(t))

    def to_json(self) -> dict:
        return {
            "a": self.a,
            "b": self.b,
            "c": self.c,
            "alpha": self.alpha,
            "objective": self.objective,
            "residuals": self.residuals.tolist(),
            "iterations": self.iterations,
            "grid": self.r.n,
            "r_samples": self.r.samples.tolist(),
        }


def _family(w0, cos_t, sin_t, p):
    d = p[0] * w0 + p[1] * cos_t + p[2] * sin_t
    if np.min(d) <= 0:
        return None
    return 1.0 / d


def solve_vp(
    r0: RadialFunction | ConvexBody,
    grid: int = DEFAULT_GRID,
    x0=None,
    tol: float = 1e-10,
    max_iter: int = 100,
) -> VPSolution:
    """Solve the variational problem for the body with radial function ``r0``.

    ``r0`` is first rescaled to unit area.  Newton steps use a central-difference
    Jacobian (relative step 1e-6) and are halved while they leave the positive
    region or fail to reduce the largest residual.
    """
    if isinstance(r0, ConvexBody):
        r0 = r0.radial_function(grid)
    if not convexity_certificate(r0):
        raise ValidationError("r0 is not the radial function of a convex body")
    scale = area(r0) ** -0.5
    r0n = r0.scaled(scale)
    t = r0n.angles
    w0, cos_t, sin_t = 1.0 / r0n.samples, np.cos(t), np.sin(t)

    def F(p):
        r = _family(w0, cos_t, sin_t, p)
        if r is None:
            return None
        return constraint_residuals(RadialFunction(r))

    p = np.array([math.sqrt(area(r0n)), 0.0, 0.0] if x0 is None else x0, dtype=float)
    res = F(p)
    if res is None:
        raise NonPositive("starting point gives a non-positive radial function")
    it = 0
    while np.max(np.abs(res)) >= tol:
        if it >= max_iter:
            raise NoConvergence(f"no convergence after {max_iter} iterations, residual {np.max(np.abs(res)):.3g}")
        it += 1
        J = np.empty((3, 3))
        for i in range(3):
            h = 1e-6 * max(abs(p[i]), abs(p[0]))
            e = np.zeros(3)
            e[i] = h
            fp, fm = F(p + e), F(p - e)
            if fp is not None and fm is not None:
                J[:, i] = (fp - fm) / (2 * h)
            elif fp is not None:
                J[:, i] = (fp - res) / h
            else:
                J[:, i] = (res - fm) / h
        step = np.linalg.solve(J, -res)
        lam, accepted, positive = 1.0, False, False
        for _ in range(60):
            trial = F(p + lam * step)
            if trial is not None:
                positive = True
                if np.max(np.abs(trial)) < np.max(np.abs(res)) * (1 - 1e-4 * lam):
                    accepted = True
                    break
            lam *= 0.5
        if not accepted:
            if not positive:
                raise NonPositive("every damped step leaves the positive region")
            raise NoConvergence(f"residual stagnated at {np.max(np.abs(res)):.3g}")
        p = p + lam * step
        res = trial
    r = RadialFunction(_family(w0, cos_t, sin_t, p))
    obj = vp_objective(r, r0n)
    return VPSolution(float(p[0]), float(p[1]), float(p[2]), r, r0n, scale, obj, ALPHA_FACTOR * obj, res, it)


def _angular_panels(kinks, minimum=512):
    """Breakpoints covering [0, 2pi] that include every kink angle."""
    pts = np.unique(np.concatenate([np.mod(kinks, TWO_PI), np.linspace(0.0, TWO_PI, minimum + 1)]))
    return pts[np.diff(np.concatenate([pts, [np.inf]])) > 1e-14]


def alpha_two_ways(sol: VPSolution, body: ConvexBody) -> tuple[float, float]:
    """``(pi/sqrt6) int_C ||x|| dx`` by 2-D quadrature, and ``(pi/(3 sqrt6)) int r^3/r0``.

    The 2-D route integrates the body's own norm over ``C`` with Gauss-Legendre
    panels in angle (split at the body's kinks) and in radius, evaluating the
    solution's radial function off-grid from its closed form.
    """
    edges = _angular_panels(body.kinks())
    nodes, weights = np.polynomial.legendre.leggauss(10)
    lo, hi = edges[:-1, None], edges[1:, None]
    t = (lo + (hi - lo) * 0.5 * (nodes + 1.0)).ravel()
    wt = ((hi - lo) * 0.5 * weights).ravel()
    R = sol.radius(t, body)
    rn, rw = np.polynomial.legendre.leggauss(3)
    total = 0.0
    u = np.column_stack([np.cos(t), np.sin(t)])
    for x, w in zip(rn, rw):
        rho = R * 0.5 * (x + 1.0)
        vals = rho * np.asarray(body.norm(rho[:, None] * u)) / sol.scale
        total += float(np.sum(wt * w * 0.5 * R * vals))
    return math.pi / math.sqrt(6.0) * total, sol.alpha


@dataclass(frozen=True)
class LimitPolygon:
    boundary: np.ndarray
    translation: np.ndarray
    closure_gap: float

    def to_json(self) -> dict:
        return {
            "boundary": self.boundary.tolist(),
            "translation": self.translation.tolist(),
            "closure_gap": self.closure_gap,
        }


def _periodic_antiderivative(g: np.ndarray) -> tuple[np.ndarray, complex]:
    """Spectral ``int_0^t g`` at grid points; also returns the mean of ``g``."""
    n = g.size
    c = np.fft.fft(g) / n
    k = np.fft.fftfreq(n, 1.0 / n)
    t = TWO_PI * np.arange(n) / n
    coef = np.zeros_like(c)
    nz = k != 0
    coef[nz] = c[nz] / (1j * k[nz])
    vals = np.fft.ifft(coef) * n - np.sum(coef)
    return np.real(vals + c[0] * t), c[0]


def limit_polygon(sol: VPSolution, closure_tol: float = 1e-6) -> LimitPolygon:
    """Boundary ``P(t) = int_0^t (r^3/3) u(s) ds``, leftmost point moved to the origin."""
    t = sol.r.angles
    w = sol.r.samples**3 / 3.0
    px, mx = _periodic_antiderivative(w * np.cos(t))
    py, my = _periodic_antiderivative(w * np.sin(t))
    gap = TWO_PI * float(np.hypot(np.real(mx), np.real(my)))
    if gap > closure_tol:
        raise NotClosed(f"P(2pi) - P(0) has length {gap:.3g}")
    pts = np.column_stack([px, py])
    i = min(range(len(pts)), key=lambda k: (round(pts[k, 0], 14), pts[k, 1]))
    shift = -pts[i]
    pts = pts + shift
    d = np.roll(pts, -1, axis=0) - pts
    turn = d[:, 0] * np.roll(d, -1, axis=0)[:, 1] - d[:, 1] * np.roll(d, -1, axis=0)[:, 0]
    if np.any(turn < -1e-12 * float(np.max(np.abs(turn)))):
        raise NotClosed("limit curve is not convex")
    return LimitPolygon(pts, shift, gap)


def is_circle_limit(body: ConvexBody, grid: int = DEFAULT_GRID, tol: float = 1e-8) -> bool:
    """True iff ``1/r0`` lies in span{1, cos t, sin t}: an ellipse with a focus at 0."""
    rf = body.radial_function(grid)
    t = rf.angles
    w = 1.0 / rf.samples
    A = np.column_stack([np.ones_like(t), np.cos(t), np.sin(t)])
    coef, *_ = np.linalg.lstsq(A, w, rcond=None)
    return bool(np.max(np.abs(A @ coef - w)) < tol * np.max(w))


def _resample_translated(radius, shift, n):
    """Radial samples of the star body ``{radius(t) u(t)} - shift`` at grid angles."""
    theta = TWO_PI * np.arange(n) / n
    ut = np.column_stack([np.cos(theta), np.sin(theta)])

    def signed_angle(t):
        q = radius(t)[:, None] * np.column_stack([np.cos(t), np.sin(t)]) - shift
        return np.arctan2(ut[:, 0] * q[:, 1] - ut[:, 1] * q[:, 0], np.einsum("ij,ij->i", ut, q)), q

    r_min = float(np.min(radius(theta)))
    delta = min(math.pi / 4, 3.0 * float(np.hypot(*shift)) / r_min + 1e-6)
    lo, hi = theta - delta, theta + delta
    for _ in range(64):
        mid = 0.5 * (lo + hi)
        f, _ = signed_angle(mid)
        lo = np.where(f < 0, mid, lo)
        hi = np.where(f < 0, hi, mid)
    _, q = signed_angle(0.5 * (lo + hi))
    return np.hypot(q[:, 0], q[:, 1])


def feasible_perturbation(sol: VPSolution, body: ConvexBody, h, eps: float) -> RadialFunction:
    """Perturb the solution by ``eps * h`` and restore feasibility.

    The perturbed set is translated until its discrete centroid vanishes, then
    rescaled to unit area, so the result satisfies the discrete constraints to
    roundoff.
    """
    n = sol.r.n

    def radius(t):
        return sol.radius(t, body) + eps * np.asarray(h(t))

    shift = np.zeros(2)
    rt = RadialFunction(radius(sol.r.angles))
    for _ in range(30):
        g = centroid_moment(rt) / (3.0 * area(rt))
        if float(np.hypot(*g)) < 1e-15:
            break
        shift = shift + g
        rt = RadialFunction(_resample_translated(radius, shift, n))
    return rt.scaled(area(rt) ** -0.5)
