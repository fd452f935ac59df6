"""Convex bodies with the origin inside: support function, gauge, volumes, halfspace cuts.

A body W plays two roles at once: it is the unit ball of the gauge (W = {gauge < 1})
and it induces the support function used as the surface-energy integrand. Polytopes
are exact; `ball` and `ellipse` are handled by closed forms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ValidationError

COORD_LIMIT = 1.0e6
GEOM_EPS = 1.0e-12

POLYTOPE = "polytope"
BALL = "ball"
ELLIPSE = "ellipse"
# result-only kinds produced by halfspace_cut on analytic bodies; they support
# volume() but not support()/gauge()
HALF_BALL = "half_ball"
HALF_ELLIPSE = "half_ellipse"

_ANALYTIC = (BALL, ELLIPSE)
_HALF = (HALF_BALL, HALF_ELLIPSE)


def _check_coords(arr):
    a = np.asarray(arr, dtype=float)
    if not np.all(np.isfinite(a)):
        raise ValidationError("non-finite coordinate")
    if np.any(np.abs(a) > COORD_LIMIT):
        raise ValidationError(f"coordinate exceeds bound {COORD_LIMIT:g}")
    return a


def cross2(a, b):
    """z-component of the cross product of 2D vectors (broadcasts)."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    return a[..., 0] * b[..., 1] - a[..., 1] * b[..., 0]


def _shoelace(verts):
    x, y = verts[:, 0], verts[:, 1]
    return 0.5 * float(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))


@dataclass(frozen=True)
class UnitDirection:
    """A Euclidean unit vector; the normal of the cutting halfspace {<x,v> >= 0}."""

    components: np.ndarray

    def __post_init__(self):
        v = _check_coords(self.components).reshape(-1)
        if v.size not in (2, 3):
            raise ValidationError("direction must be 2- or 3-dimensional")
        if abs(np.linalg.norm(v) - 1.0) > 1e-12:
            raise ValidationError("direction is not unit length")
        object.__setattr__(self, "components", v)

    @classmethod
    def from_angle(cls, theta: float) -> "UnitDirection":
        return cls(np.array([math.cos(theta), math.sin(theta)]))

    def __iter__(self):
        return iter(self.components)

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.components, dtype=dtype)


def as_direction(v) -> np.ndarray:
    """Coerce v to a validated unit vector (ndarray)."""
    if isinstance(v, UnitDirection):
        return v.components
    return UnitDirection(np.asarray(v, dtype=float)).components


@dataclass
class ConvexBody:
    """Convex body with 0 strictly inside (waived for halfspace-cut results)."""

    dimension: int
    kind: str
    vertices: np.ndarray | None = None
    parameters: tuple = ()
    _cut_result: bool = field(default=False, repr=False)
    _facets: tuple | None = field(default=None, repr=False, compare=False)
    _hull: object = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        if self.dimension not in (2, 3):
            raise ValidationError("dimension must be 2 or 3")
        if self.kind == POLYTOPE:
            self._init_polytope()
        elif self.kind == BALL:
            (r,) = self.parameters
            if not (0 < r <= COORD_LIMIT):
                raise ValidationError("ball radius must be positive")
        elif self.kind == ELLIPSE:
            if self.dimension != 2:
                raise ValidationError("ellipse kind is 2D only")
            a, b = self.parameters
            if not (0 < a <= COORD_LIMIT and 0 < b <= COORD_LIMIT):
                raise ValidationError("ellipse semi-axes must be positive")
        elif self.kind in _HALF:
            pass  # built internally by halfspace_cut
        else:
            raise ValidationError(f"unknown body kind {self.kind!r}")

    def _init_polytope(self):
        v = _check_coords(self.vertices)
        if v.ndim != 2 or v.shape[1] != self.dimension:
            raise ValidationError("vertex array shape does not match dimension")
        self.vertices = v
        if self.dimension == 2:
            if len(v) < 3:
                raise ValidationError("2D polytope needs at least 3 vertices")
            area2 = _shoelace(v)
            if area2 <= GEOM_EPS:
                raise ValidationError("vertices are not in counterclockwise order "
                                      "or the polygon is degenerate")
            e = np.roll(v, -1, axis=0) - v
            lengths = np.linalg.norm(e, axis=1)
            if np.any(lengths <= GEOM_EPS):
                raise ValidationError("repeated vertex")
            # outward normals for CCW orientation and their plane offsets
            normals = np.column_stack([e[:, 1], -e[:, 0]]) / lengths[:, None]
            offsets = np.sum(normals * v, axis=1)
            cross = e[:, 0] * np.roll(e[:, 1], -1) - e[:, 1] * np.roll(e[:, 0], -1)
            if np.any(cross <= GEOM_EPS * np.max(lengths) ** 2):
                raise ValidationError("vertices are not in strictly convex position")
            if not self._cut_result and np.any(offsets <= GEOM_EPS):
                raise ValidationError("origin is not strictly inside the body")
            self._facets = (normals, offsets)
        else:
            from scipy.spatial import ConvexHull

            if len(v) < 4:
                raise ValidationError("3D polytope needs at least 4 vertices")
            hull = ConvexHull(v)
            if len(hull.vertices) != len(v):
                raise ValidationError("vertices are not in convex position")
            # hull equations: A x + b <= 0; origin inside iff b < 0 strictly
            if not self._cut_result and np.any(hull.equations[:, -1] >= -GEOM_EPS):
                raise ValidationError("origin is not strictly inside the body")
            self._hull = hull
            normals = hull.equations[:, :-1]
            offsets = -hull.equations[:, -1]
            self._facets = (normals, offsets)

    # -- closed-form data -------------------------------------------------

    @property
    def facet_normals(self):
        return self._facets[0]

    @property
    def facet_offsets(self):
        return self._facets[1]

    def bounding_radius(self) -> float:
        if self.kind == POLYTOPE:
            return float(np.max(np.linalg.norm(self.vertices, axis=1)))
        if self.kind == BALL:
            return self.parameters[0]
        if self.kind == ELLIPSE:
            return max(self.parameters)
        raise ValidationError(f"bounding_radius undefined for kind {self.kind!r}")


# -- named constructors ----------------------------------------------------

def polytope(vertices) -> ConvexBody:
    v = np.asarray(vertices, dtype=float)
    return ConvexBody(dimension=v.shape[1], kind=POLYTOPE, vertices=v)


def ball(radius: float = 1.0, dimension: int = 2) -> ConvexBody:
    return ConvexBody(dimension=dimension, kind=BALL, parameters=(float(radius),))


def ellipse(a: float, b: float) -> ConvexBody:
    return ConvexBody(dimension=2, kind=ELLIPSE, parameters=(float(a), float(b)))


def square(half_width: float = 1.0) -> ConvexBody:
    h = float(half_width)
    return polytope([[h, -h], [h, h], [-h, h], [-h, -h]])


def regular_polygon(n: int, circumradius: float = 1.0, phase: float = 0.0) -> ConvexBody:
    ang = phase + 2 * np.pi * np.arange(n) / n
    return polytope(np.column_stack([np.cos(ang), np.sin(ang)]) * circumradius)


def random_convex_polygon(seed: int, n_vertices: int, scale: float = 1.0) -> ConvexBody:
    """Random convex polygon with exactly n_vertices, origin strictly inside.

    Uses Valtr's construction (random x/y increments paired by angle), then
    recenters at the centroid. Deterministic in the seed.
    """
    if n_vertices < 3:
        raise ValidationError("need at least 3 vertices")
    rng = np.random.default_rng(seed)
    for _ in range(64):
        xs = np.sort(rng.uniform(0, 1, n_vertices))
        ys = np.sort(rng.uniform(0, 1, n_vertices))
        dx = _valtr_deltas(xs, rng)
        dy = _valtr_deltas(ys, rng)
        rng.shuffle(dy)
        ang = np.arctan2(dy, dx)
        order = np.argsort(ang)
        verts = np.cumsum(np.column_stack([dx[order], dy[order]]), axis=0)
        verts -= _polygon_centroid(verts)
        verts *= scale
        try:
            return polytope(verts)
        except ValidationError:
            continue  # collinear draw; resample
    raise ValidationError("failed to sample a strictly convex polygon")


def _valtr_deltas(coords, rng):
    lo, hi = coords[0], coords[-1]
    inner = coords[1:-1]
    up = rng.uniform(0, 1, len(inner)) < 0.5
    chain_a = np.concatenate([[lo], inner[up], [hi]])
    chain_b = np.concatenate([[lo], inner[~up], [hi]])
    return np.concatenate([np.diff(chain_a), -np.diff(chain_b)])


def _polygon_centroid(verts):
    x, y = verts[:, 0], verts[:, 1]
    xn, yn = np.roll(x, -1), np.roll(y, -1)
    cross = x * yn - xn * y
    a = cross.sum() / 2.0
    cx = np.sum((x + xn) * cross) / (6 * a)
    cy = np.sum((y + yn) * cross) / (6 * a)
    return np.array([cx, cy])


def centrally_symmetrized(body: ConvexBody) -> ConvexBody:
    """Convex hull of W and -W; always centrally symmetric about 0."""
    from scipy.spatial import ConvexHull

    if body.kind != POLYTOPE or body.dimension != 2:
        raise ValidationError("symmetrization implemented for 2D polytopes")
    pts = np.vstack([body.vertices, -body.vertices])
    hull = ConvexHull(pts)
    return polytope(pts[hull.vertices])


# -- the two norms ----------------------------------------------------------

def support(body: ConvexBody, x) -> float:
    """Support function of W at x: sup over w in W of <x, w>. One-homogeneous, convex."""
    x = np.asarray(x, dtype=float)
    if body.kind == POLYTOPE:
        return float(np.max(body.vertices @ x))
    if body.kind == BALL:
        return body.parameters[0] * float(np.linalg.norm(x))
    if body.kind == ELLIPSE:
        a, b = body.parameters
        return float(math.hypot(a * x[0], b * x[1]))
    raise ValidationError(f"support undefined for kind {body.kind!r}")


def gauge(body: ConvexBody, x) -> float:
    """Minkowski gauge of W at x: inf{t > 0 : x in tW}; equals 1 on the boundary.

    For polytopes this is the exact facet-plane maximum, not the dual sup formula.
    """
    x = np.asarray(x, dtype=float)
    if body.kind == POLYTOPE:
        n, d = body._facets
        return max(0.0, float(np.max((n @ x) / d)))
    if body.kind == BALL:
        return float(np.linalg.norm(x)) / body.parameters[0]
    if body.kind == ELLIPSE:
        a, b = body.parameters
        return float(math.hypot(x[0] / a, x[1] / b))
    raise ValidationError(f"gauge undefined for kind {body.kind!r}")


def support_many(body: ConvexBody, vecs: np.ndarray) -> np.ndarray:
    """Vectorized support function over rows of vecs."""
    vecs = np.asarray(vecs, dtype=float)
    if body.kind == POLYTOPE:
        return np.max(vecs @ body.vertices.T, axis=1)
    if body.kind == BALL:
        return body.parameters[0] * np.linalg.norm(vecs, axis=1)
    if body.kind == ELLIPSE:
        a, b = body.parameters
        return np.hypot(a * vecs[:, 0], b * vecs[:, 1])
    raise ValidationError(f"support undefined for kind {body.kind!r}")


def gauge_many(body: ConvexBody, pts: np.ndarray) -> np.ndarray:
    """Vectorized gauge over rows of pts."""
    pts = np.asarray(pts, dtype=float)
    if body.kind == POLYTOPE:
        n, d = body._facets
        return np.maximum(0.0, np.max((pts @ n.T) / d, axis=1))
    if body.kind == BALL:
        return np.linalg.norm(pts, axis=1) / body.parameters[0]
    if body.kind == ELLIPSE:
        a, b = body.parameters
        return np.hypot(pts[:, 0] / a, pts[:, 1] / b)
    raise ValidationError(f"gauge undefined for kind {body.kind!r}")


def volume(body: ConvexBody) -> float:
    """Area (2D) / volume (3D); exact for every supported kind."""
    if body.kind == POLYTOPE:
        if body.dimension == 2:
            a = _shoelace(body.vertices)
        else:
            a = body._hull.volume
        if a <= 0:
            raise ValidationError("degenerate body has no volume")
        return float(a)
    if body.kind == BALL:
        r = body.parameters[0]
        return math.pi * r * r if body.dimension == 2 else 4.0 / 3.0 * math.pi * r ** 3
    if body.kind == ELLIPSE:
        a, b = body.parameters
        return math.pi * a * b
    if body.kind == HALF_BALL:
        r = body.parameters[0]
        return 0.5 * math.pi * r * r
    if body.kind == HALF_ELLIPSE:
        a, b = body.parameters[:2]
        return 0.5 * math.pi * a * b
    raise ValidationError(f"volume undefined for kind {body.kind!r}")


# -- halfspace clipping ------------------------------------------------------

def clip_polygon_halfplane(verts: np.ndarray, v: np.ndarray, offset: float = 0.0) -> np.ndarray:
    """Sutherland-Hodgman clip of a CCW polygon against {<x,v> >= offset}."""
    s = verts @ v - offset
    scale = max(1.0, float(np.max(np.abs(verts))))
    tol = GEOM_EPS * scale
    out = []
    n = len(verts)
    for i in range(n):
        a, sa = verts[i], s[i]
        b, sb = verts[(i + 1) % n], s[(i + 1) % n]
        if sa >= -tol:
            out.append(a)
        if (sa > tol and sb < -tol) or (sa < -tol and sb > tol):
            t = sa / (sa - sb)
            out.append(a + t * (b - a))
    if not out:
        return np.empty((0, 2))
    pts = np.array(out)
    keep = np.linalg.norm(pts - np.roll(pts, 1, axis=0), axis=1) > tol
    return pts[keep]


def halfspace_cut(body: ConvexBody, v) -> ConvexBody:
    """The body cut by the halfspace {<x,v> >= 0} through the origin.

    2D only. The result may have 0 on its boundary, so the interior-origin
    invariant is waived for it. Analytic kinds return a closed-form half body
    (any cut through the center of a centrally symmetric body halves it exactly).
    """
    v = as_direction(v)
    if body.dimension != 2:
        raise ValidationError("halfspace_cut is a 2D operation")
    if body.kind == BALL:
        return ConvexBody(2, HALF_BALL, parameters=(body.parameters[0], v[0], v[1]),
                          _cut_result=True)
    if body.kind == ELLIPSE:
        a, b = body.parameters
        return ConvexBody(2, HALF_ELLIPSE, parameters=(a, b, v[0], v[1]),
                          _cut_result=True)
    if body.kind != POLYTOPE:
        raise ValidationError(f"cannot cut body of kind {body.kind!r}")
    pts = clip_polygon_halfplane(body.vertices, v)
    if len(pts) < 3 or _shoelace(pts) <= 0:
        raise ValidationError("halfspace cut through the interior origin cannot be empty")
    return ConvexBody(2, POLYTOPE, vertices=pts, _cut_result=True)


# -- file format -------------------------------------------------------------
#
# first line: "dim kind [params...]"; polytope vertices follow one per line,
# whitespace-separated decimals with dot separator.

def dump_body(body: ConvexBody) -> str:
    if body.kind == POLYTOPE:
        lines = [f"{body.dimension} polytope"]
        lines += [" ".join(f"{c:.17g}" for c in row) for row in body.vertices]
        return "\n".join(lines) + "\n"
    if body.kind == BALL:
        return f"{body.dimension} ball {body.parameters[0]:.17g}\n"
    if body.kind == ELLIPSE:
        a, b = body.parameters
        return f"2 ellipse {a:.17g} {b:.17g}\n"
    raise ValidationError(f"cannot serialize body of kind {body.kind!r}")


def parse_body(text: str) -> ConvexBody:
    lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise ValidationError("empty body file")
    head = lines[0].split()
    try:
        dim = int(head[0])
    except (ValueError, IndexError) as exc:
        raise ValidationError(f"malformed body header: {lines[0]!r}") from exc
    if len(head) < 2:
        raise ValidationError(f"malformed body header: {lines[0]!r}")
    kind = head[1]
    try:
        if kind == POLYTOPE:
            verts = [[float(t) for t in ln.split()] for ln in lines[1:]]
            return ConvexBody(dim, POLYTOPE, vertices=np.array(verts, dtype=float))
        if kind == BALL:
            return ConvexBody(dim, BALL, parameters=(float(head[2]),))
        if kind == ELLIPSE:
            return ConvexBody(dim, ELLIPSE, parameters=(float(head[2]), float(head[3])))
    except (ValueError, IndexError) as exc:
        raise ValidationError(f"malformed body file: {exc}") from exc
    raise ValidationError(f"unknown body kind {kind!r}")


def load_body(path) -> ConvexBody:
    try:
        with open(path, "r", encoding="ascii") as fh:
            return parse_body(fh.read())
    except OSError as exc:
        raise ValidationError(f"cannot read body file {path}: {exc}") from exc


def save_body(body: ConvexBody, path) -> None:
    with open(path, "w", encoding="ascii") as fh:
        fh.write(dump_body(body))
