"""Anisotropic perimeter, the halfspace-cut constant beta, and the inequality checks.

The perimeter integrand is the support function of W evaluated at the outward
unit normal; with that convention the boundary of W itself satisfies
perimeter(W) = n * volume(W), which is the identity the verification leans on.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .bodies import (BALL, ELLIPSE, POLYTOPE, ConvexBody, UnitDirection,
                     as_direction, cross2, gauge_many, halfspace_cut,
                     support_many, volume)
from .errors import ValidationError

# angular step used when an analytic curve has to be polygonized; fine enough
# that length/area errors stay near 1e-9 relative
ARC_STEP = 2.0e-4

_MC_SEED = 20240817
_MC_POINTS = 200_000


@dataclass
class Surface:
    """Oriented facet soup: straight segments with outward unit normals (2D)."""

    segments: np.ndarray   # (F, 2, 2) endpoint pairs, traversal order
    normals: np.ndarray    # (F, 2) outward unit normals
    measures: np.ndarray   # (F,) lengths

    def __post_init__(self):
        self.segments = np.asarray(self.segments, dtype=float)
        self.normals = np.asarray(self.normals, dtype=float)
        self.measures = np.asarray(self.measures, dtype=float)
        if len(self.segments) == 0:
            return
        if np.any(np.abs(np.linalg.norm(self.normals, axis=1) - 1.0) > 1e-9):
            raise ValidationError("surface normal is not unit length")
        if np.any(self.measures <= 0):
            raise ValidationError("surface facet with nonpositive measure")
        d = self.segments[:, 1] - self.segments[:, 0]
        lens = np.linalg.norm(d, axis=1)
        expected = np.column_stack([d[:, 1], -d[:, 0]]) / lens[:, None]
        if np.max(np.abs(expected - self.normals)) > 1e-9:
            raise ValidationError("surface normals inconsistent with vertex orientation")
        if np.max(np.abs(lens - self.measures)) > 1e-9 * max(1.0, float(lens.max())):
            raise ValidationError("facet measure inconsistent with endpoints")

    @classmethod
    def from_loop(cls, verts: np.ndarray) -> "Surface":
        """Surface of a closed CCW vertex loop (domain on the left of travel)."""
        verts = np.asarray(verts, dtype=float)
        nxt = np.roll(verts, -1, axis=0)
        d = nxt - verts
        lens = np.linalg.norm(d, axis=1)
        keep = lens > 1e-15
        verts, nxt, d, lens = verts[keep], nxt[keep], d[keep], lens[keep]
        normals = np.column_stack([d[:, 1], -d[:, 0]]) / lens[:, None]
        return cls(np.stack([verts, nxt], axis=1), normals, lens)

    @classmethod
    def from_segments(cls, segs) -> "Surface":
        segs = np.asarray(segs, dtype=float)
        d = segs[:, 1] - segs[:, 0]
        lens = np.linalg.norm(d, axis=1)
        normals = np.column_stack([d[:, 1], -d[:, 0]]) / lens[:, None]
        return cls(segs, normals, lens)

    def __len__(self):
        return len(self.segments)


def circle_loop(radius: float, center=(0.0, 0.0), step: float = ARC_STEP) -> np.ndarray:
    n = max(8, int(math.ceil(2 * math.pi / step)))
    ang = 2 * math.pi * np.arange(n) / n
    return np.asarray(center, dtype=float) + radius * np.column_stack([np.cos(ang), np.sin(ang)])


def boundary_surface(body: ConvexBody) -> Surface:
    """The full boundary of a 2D body as a Surface (analytic kinds polygonized)."""
    if body.dimension != 2:
        raise ValidationError("boundary_surface is 2D only")
    if body.kind == POLYTOPE:
        return Surface.from_loop(body.vertices)
    if body.kind == BALL:
        return Surface.from_loop(circle_loop(body.parameters[0]))
    if body.kind == ELLIPSE:
        a, b = body.parameters
        loop = circle_loop(1.0)
        return Surface.from_loop(loop * np.array([a, b]))
    raise ValidationError(f"no boundary surface for kind {body.kind!r}")


def anisotropic_perimeter(body: ConvexBody, surface: Surface) -> float:
    """Sum over facets of support(W, normal) * measure."""
    if len(surface) == 0:
        return 0.0
    return float(np.dot(support_many(body, surface.normals), surface.measures))


# -- halfspace cut fractions and beta ----------------------------------------

def _mc_cloud(body: ConvexBody) -> np.ndarray:
    """Fixed-seed point cloud uniform in W, used for 3D cut fractions."""
    cloud = getattr(body, "_mc_cloud_cache", None)
    if cloud is not None:
        return cloud
    rng = np.random.default_rng(_MC_SEED)
    R = body.bounding_radius()
    kept = []
    total = 0
    while total < _MC_POINTS:
        pts = rng.uniform(-R, R, size=(4 * _MC_POINTS, body.dimension))
        pts = pts[gauge_many(body, pts) <= 1.0]
        kept.append(pts)
        total += len(pts)
    cloud = np.vstack(kept)[:_MC_POINTS]
    body._mc_cloud_cache = cloud
    return cloud


def cut_fraction(body: ConvexBody, v) -> float:
    """Volume fraction of W on the {<x,v> >= 0} side of the origin.

    Exact in 2D (clipping / central symmetry); Monte-Carlo with a fixed-seed
    cloud in 3D, where no exact clipping kernel is kept.
    """
    v = as_direction(v)
    if body.dimension != len(v):
        raise ValidationError("direction dimension does not match body")
    if body.kind in (BALL, ELLIPSE):
        return 0.5
    if body.dimension == 2:
        return volume(halfspace_cut(body, v)) / volume(body)
    return float(np.mean(_mc_cloud(body) @ v >= 0.0))


def cut_area_batch(body: ConvexBody, dirs: np.ndarray) -> np.ndarray:
    """Clipped areas of {<x,v> >= 0} for many directions at once (2D polytope).

    Batched form of the edge clip: the cut line passes through the origin, so
    the chord between the two crossing points drops out of the shoelace sum
    and each edge contributes its cross term weighted by the inside fraction.
    """
    if body.kind != POLYTOPE or body.dimension != 2:
        raise ValidationError("batched cut areas need a 2D polytope")
    v = body.vertices
    nxt = np.roll(v, -1, axis=0)
    c = cross2(v, nxt)
    s = v @ dirs.T
    sn = np.roll(s, -1, axis=0)
    denom = s - sn
    with np.errstate(divide="ignore", invalid="ignore"):
        t = np.where(np.abs(denom) > 1e-300, s / denom, 0.0)
    w = np.where(s >= 0, np.where(sn >= 0, 1.0, t),
                 np.where(sn >= 0, 1.0 - t, 0.0))
    return 0.5 * np.einsum("e,ea->a", c, w)


@dataclass
class BetaResult:
    """Minimal cut fraction and a minimizing direction."""

    value: float
    direction: UnitDirection
    approximate: bool = False
    resolution: float = 0.0

    def __iter__(self):
        return iter((self.value, self.direction))


def _golden_min(f, a: float, b: float, tol: float = 1e-12):
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    x1 = b - invphi * (b - a)
    x2 = a + invphi * (b - a)
    f1, f2 = f(x1), f(x2)
    while (b - a) > tol:
        if f1 <= f2:
            b, x2, f2 = x2, x1, f1
            x1 = b - invphi * (b - a)
            f1 = f(x1)
        else:
            a, x1, f1 = x1, x2, f2
            x2 = a + invphi * (b - a)
            f2 = f(x2)
    x = 0.5 * (a + b)
    return x, f(x)


def _fibonacci_sphere(n: int) -> np.ndarray:
    i = np.arange(n) + 0.5
    phi = math.pi * (3.0 - math.sqrt(5.0)) * i
    z = 1.0 - 2.0 * i / n
    r = np.sqrt(np.maximum(0.0, 1.0 - z * z))
    return np.column_stack([r * np.cos(phi), r * np.sin(phi), z])


def beta(body: ConvexBody, angular_resolution: float = 2 * math.pi / 4096) -> BetaResult:
    """Infimum over unit directions of the halfspace cut fraction of W.

    2D: exhaustive angle grid at the requested step, then golden-section
    refinement on the best bracket (ties broken toward the smallest angle).
    3D: Fibonacci-sphere scan plus Nelder-Mead polish, flagged approximate.
    Always in (0, 0.5]; equal to 0.5 exactly for centrally symmetric bodies.
    """
    if angular_resolution <= 0:
        raise ValidationError("angular resolution must be positive")
    if body.kind in (BALL, ELLIPSE):
        return BetaResult(0.5, UnitDirection.from_angle(0.0), False, angular_resolution)
    if body.dimension == 2:
        step = angular_resolution
        angles = np.arange(0.0, 2 * math.pi, step)

        def f(theta):
            return cut_fraction(body, (math.cos(theta), math.sin(theta)))

        dirs = np.column_stack([np.cos(angles), np.sin(angles)])
        vals = cut_area_batch(body, dirs) / volume(body)
        k = int(np.argmin(vals))
        t0 = angles[k]
        t_ref, v_ref = _golden_min(f, t0 - step, t0 + step)
        if v_ref <= vals[k]:
            best_t, best_v = t_ref, v_ref
        else:
            best_t, best_v = t0, float(vals[k])
        return BetaResult(best_v, UnitDirection.from_angle(best_t), False, step)

    from scipy.optimize import minimize

    n_dirs = int(np.clip(4 * math.pi / angular_resolution ** 2, 256, 20000))
    dirs = _fibonacci_sphere(n_dirs)
    cloud = _mc_cloud(body)
    fracs = np.mean(cloud @ dirs.T >= 0.0, axis=0)
    k = int(np.argmin(fracs))
    v0 = dirs[k]
    th0 = math.acos(np.clip(v0[2], -1, 1))
    ph0 = math.atan2(v0[1], v0[0])

    def f_sph(p):
        th, ph = p
        v = np.array([math.sin(th) * math.cos(ph), math.sin(th) * math.sin(ph), math.cos(th)])
        return float(np.mean(cloud @ v >= 0.0))

    res = minimize(f_sph, np.array([th0, ph0]), method="Nelder-Mead",
                   options={"xatol": 1e-4, "fatol": 1e-7, "maxiter": 400})
    th, ph = res.x
    v = np.array([math.sin(th) * math.cos(ph), math.sin(th) * math.sin(ph), math.cos(th)])
    v /= np.linalg.norm(v)
    val = min(float(fracs[k]), float(res.fun))
    return BetaResult(val, UnitDirection(v), True, angular_resolution)


# -- reports ------------------------------------------------------------------

def _fmt(x) -> str:
    return f"{x:.15g}"


@dataclass
class InequalityReport:
    """One evaluation of the obstacle isoperimetric inequality (n = 2)."""

    lhs: float            # perimeter(Sigma)^2 / area(Omega)
    rhs: float            # beta * perimeter(dW)^2 / volume(W)
    margin: float
    beta_value: float
    beta_direction: UnitDirection
    passed: bool

    def to_text(self) -> str:
        d = self.beta_direction.components
        return "\n".join([
            f"lhs={_fmt(self.lhs)}",
            f"rhs={_fmt(self.rhs)}",
            f"margin={_fmt(self.margin)}",
            f"beta={_fmt(self.beta_value)}",
            f"beta_dir_x={_fmt(d[0])}",
            f"beta_dir_y={_fmt(d[1])}",
            f"pass={'true' if self.passed else 'false'}",
        ]) + "\n"


def inequality_report(body: ConvexBody, domain,
                      angular_resolution: float = 2 * math.pi / 4096) -> InequalityReport:
    """Check perimeter(Sigma)^2/area > beta * perimeter(dW)^2/volume(W) on a domain."""
    from .domains import measures

    if body.dimension != 2:
        raise ValidationError("inequality check is 2D")
    area, perim_sigma, _ = measures(domain, body)
    b = beta(body, angular_resolution)
    pw = anisotropic_perimeter(body, boundary_surface(body))
    lhs = perim_sigma ** 2 / area
    rhs = b.value * pw ** 2 / volume(body)
    margin = lhs - rhs
    return InequalityReport(lhs, rhs, margin, b.value, b.direction, margin > 0)


@dataclass
class SharpnessRow:
    r: float
    lhs: float
    rhs: float

    @property
    def ratio(self) -> float:
        return self.lhs / self.rhs


@dataclass
class SharpnessTable:
    rows: list

    def to_csv(self) -> str:
        lines = ["r,lhs,rhs,ratio"]
        for row in self.rows:
            lines.append(",".join(_fmt(x) for x in (row.r, row.lhs, row.rhs, row.ratio)))
        return "\n".join(lines) + "\n"

    def ratios(self) -> np.ndarray:
        return np.array([row.ratio for row in self.rows])


def sharpness_sweep(body: ConvexBody, v, radii,
                    angular_resolution: float = 2 * math.pi / 4096,
                    direction_tol: float = 1e-5) -> SharpnessTable:
    """Inequality ratio along the family W minus the ball of radius r at -r*v.

    As r grows the domain converges to the halfspace cut of W, so the ratio
    decreases toward 1 from above. v must (nearly) minimize the cut fraction.
    """
    from .domains import build_sharpness_domain, measures

    v = as_direction(v)
    radii = [float(r) for r in radii]
    if not radii or any(r <= 0 for r in radii):
        raise ValidationError("radii must be positive")
    if any(b >= a for a, b in zip(radii[1:], radii)):
        raise ValidationError("radii must be strictly increasing")
    b = beta(body, angular_resolution)
    if cut_fraction(body, v) > b.value + direction_tol:
        raise ValidationError("direction does not minimize the cut fraction")
    pw = anisotropic_perimeter(body, boundary_surface(body))
    rhs = b.value * pw ** 2 / volume(body)
    rows = []
    for r in radii:
        dom = build_sharpness_domain(body, v, r)
        area, perim_sigma, _ = measures(dom, body)
        rows.append(SharpnessRow(r, perim_sigma ** 2 / area, rhs))
    return SharpnessTable(rows)
