"""Planar domains lying outside a circular obstacle.

A domain is one or more closed boundary loops traversed with the interior on
the left. Loops mix straight free-boundary edges (SIGMA) with arcs of the
obstacle circle (GAMMA). Areas use Green's theorem with exact arc terms; arcs
are only polygonized downstream (meshing, point-membership tests).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .bodies import (BALL, POLYTOPE, ConvexBody, as_direction, cross2,
                     _check_coords)
from .errors import ValidationError
from .isoperimetry import ARC_STEP, Surface, anisotropic_perimeter, circle_loop

SIGMA = "SIGMA"
GAMMA = "GAMMA"

CHAIN_TOL = 1e-9
# turning angle below which consecutive short edges count as one smooth chain
SMOOTH_TURN = 1e-3


@dataclass
class Seg:
    """Straight free-boundary edge, traversed p0 -> p1 with the domain on the left."""

    p0: np.ndarray
    p1: np.ndarray
    tag: str = SIGMA

    def __post_init__(self):
        self.p0 = np.asarray(self.p0, dtype=float)
        self.p1 = np.asarray(self.p1, dtype=float)

    @property
    def start(self):
        return self.p0

    @property
    def end(self):
        return self.p1

    def length(self):
        return float(np.linalg.norm(self.p1 - self.p0))


@dataclass
class Arc:
    """Arc of the obstacle circle, traversed theta0 -> theta1 (signed sweep)."""

    center: np.ndarray
    radius: float
    theta0: float
    theta1: float
    tag: str = GAMMA

    def __post_init__(self):
        self.center = np.asarray(self.center, dtype=float)

    def point(self, theta: float) -> np.ndarray:
        return self.center + self.radius * np.array([math.cos(theta), math.sin(theta)])

    @property
    def start(self):
        return self.point(self.theta0)

    @property
    def end(self):
        return self.point(self.theta1)

    @property
    def sweep(self) -> float:
        return self.theta1 - self.theta0

    def length(self) -> float:
        return self.radius * abs(self.sweep)


def _element_area(el) -> float:
    """Green's theorem contribution (1/2) * integral of (x dy - y dx)."""
    if isinstance(el, Seg):
        return 0.5 * float(cross2(el.p0, el.p1))
    a, b = el.theta0, el.theta1
    cx, cy = el.center
    r = el.radius
    return 0.5 * (r * r * (b - a) + r * (cx * (math.sin(b) - math.sin(a))
                                         - cy * (math.cos(b) - math.cos(a))))


def _loop_area(loop) -> float:
    return sum(_element_area(el) for el in loop)


@dataclass
class ObstacleDomain:
    """Region outside the open ball of given center/radius, with tagged boundary."""

    obstacle_center: np.ndarray
    obstacle_radius: float
    loops: list

    _polygon: object = field(default=None, repr=False, compare=False)
    tangential_junctions: bool = field(default=False, compare=False)

    def __post_init__(self):
        self.obstacle_center = _check_coords(self.obstacle_center).reshape(2)
        r = float(self.obstacle_radius)
        if r <= 0:
            raise ValidationError("obstacle radius must be positive")
        self.obstacle_radius = r
        if not self.loops:
            raise ValidationError("domain has no boundary loops")
        self._validate()

    # -- construction-time checks -----------------------------------------

    def _validate(self):
        r, c = self.obstacle_radius, self.obstacle_center
        scale = max(1.0, r, float(np.max(np.abs(c))))
        n_sigma = 0
        for loop in self.loops:
            if not loop:
                raise ValidationError("empty boundary loop")
            for el, nxt in zip(loop, loop[1:] + loop[:1]):
                gap = np.linalg.norm(np.asarray(el.end) - np.asarray(nxt.start))
                if gap > CHAIN_TOL * scale:
                    raise ValidationError(f"open boundary loop (gap {gap:g})")
                if isinstance(el, Seg):
                    n_sigma += 1
                    if el.length() <= 1e-15:
                        raise ValidationError("zero-length boundary edge")
                    if _segment_distance(c, el.p0, el.p1) < r - 1e-9 * scale:
                        raise ValidationError("free boundary enters the obstacle ball")
                    _check_coords(el.p0), _check_coords(el.p1)
                else:
                    if abs(el.radius - r) > 1e-12 * scale or \
                            np.linalg.norm(el.center - c) > 1e-12 * scale:
                        raise ValidationError("arc does not lie on the obstacle circle")
                    if el.sweep >= 0:
                        raise ValidationError(
                            "arc traversed with the domain on the ball side")
                    if -el.sweep > 2 * math.pi + 1e-9:
                        raise ValidationError("arc sweep exceeds a full turn")
        if n_sigma == 0:
            raise ValidationError("domain with empty free boundary is impossible")
        areas = [_loop_area(loop) for loop in self.loops]
        shells = [a for a in areas if a > 0]
        if len(shells) != 1:
            raise ValidationError("domain must have exactly one outer loop")
        if sum(areas) <= 0:
            raise ValidationError("domain has nonpositive area")
        poly = self.polygon()
        if not poly.is_valid:
            raise ValidationError("boundary loops self-intersect")
        from shapely import Point

        if poly.contains(Point(*c)):
            raise ValidationError("obstacle ball lies inside the domain interior")
        self.tangential_junctions = self._scan_junctions()

    def _scan_junctions(self) -> bool:
        flagged = False
        for loop in self.loops:
            for el, nxt in zip(loop, loop[1:] + loop[:1]):
                pair = (el, nxt)
                if not (isinstance(el, Seg) ^ isinstance(nxt, Seg)):
                    continue
                seg = el if isinstance(el, Seg) else nxt
                p = np.asarray(el.end)
                d = seg.p1 - seg.p0
                d = d / np.linalg.norm(d)
                radial = (p - self.obstacle_center) / self.obstacle_radius
                tangent = np.array([-radial[1], radial[0]])
                if abs(abs(float(np.dot(d, tangent))) - 1.0) < 0.5 * SMOOTH_TURN ** 2:
                    flagged = True
        return flagged

    # -- derived geometry ---------------------------------------------------

    def signed_area(self) -> float:
        return float(sum(_loop_area(loop) for loop in self.loops))

    @property
    def area(self) -> float:
        return self.signed_area()

    def sigma_surface(self) -> Surface:
        segs = [(el.p0, el.p1) for loop in self.loops for el in loop
                if isinstance(el, Seg)]
        return Surface.from_segments(np.array(segs))

    def gamma_arcs(self) -> list:
        return [el for loop in self.loops for el in loop if isinstance(el, Arc)]

    def gamma_length(self) -> float:
        return float(sum(a.length() for a in self.gamma_arcs()))

    def polygon(self, arc_step: float = ARC_STEP):
        """Shapely polygon with arcs polygonized; cached."""
        if self._polygon is not None:
            return self._polygon
        from shapely.geometry import Polygon

        rings = []
        for loop in self.loops:
            pts = []
            for el in loop:
                if isinstance(el, Seg):
                    pts.append(el.p0)
                else:
                    n = max(2, int(math.ceil(abs(el.sweep) / arc_step)))
                    ths = el.theta0 + (el.theta1 - el.theta0) * np.arange(n) / n
                    pts.extend(el.point(t) for t in ths)
            rings.append((_loop_area(loop), np.array(pts)))
        shell = max(rings, key=lambda t: t[0])[1]
        holes = [ring for a, ring in rings if a <= 0]
        self._polygon = Polygon(shell, holes)
        return self._polygon

    def contains_points(self, pts: np.ndarray) -> np.ndarray:
        """Strict interior membership (polygonized near arcs, exact ball exclusion)."""
        import shapely

        pts = np.asarray(pts, dtype=float)
        inside = shapely.contains_xy(self.polygon(), pts[:, 0], pts[:, 1])
        d = np.linalg.norm(pts - self.obstacle_center, axis=1)
        return inside & (d >= self.obstacle_radius * (1.0 - 1e-12))

    def bbox(self):
        pts = np.array(self.polygon().exterior.coords)
        return pts.min(axis=0), pts.max(axis=0)

    def diameter(self) -> float:
        lo, hi = self.bbox()
        return float(np.linalg.norm(hi - lo))

    # -- boundary resampling for the mesher ---------------------------------

    def loop_polylines(self, chord: float):
        """Per loop: (vertices, edge tags) with every chord <= requested length.

        Arc vertices are placed exactly on the obstacle circle. Runs of short,
        nearly collinear free edges (polygonized analytic curves) are resampled
        by arclength instead of keeping every tiny input edge.
        """
        out = []
        for loop in self.loops:
            tokens = _tokenize_loop(loop, chord)
            pts, tags = [], []
            if len(tokens) == 1 and tokens[0][0] == "run":
                poly = tokens[0][1]
                closed = np.vstack([poly, poly[:1]])
                pts_arr = _resample_polyline(closed, chord, closed_loop=True)
                out.append((pts_arr, np.array([SIGMA] * len(pts_arr))))
                continue
            for kind, payload in tokens:
                if kind == "arc":
                    el = payload
                    n = max(1, int(math.ceil(el.length() / chord)))
                    ths = el.theta0 + el.sweep * np.arange(n) / n
                    for t in ths:
                        pts.append(el.point(t))
                        tags.append(GAMMA)
                elif kind == "seg":
                    el = payload
                    n = max(1, int(math.ceil(el.length() / chord)))
                    for i in range(n):
                        pts.append(el.p0 + (el.p1 - el.p0) * (i / n))
                        tags.append(SIGMA)
                else:  # smooth run of short edges
                    arr = _resample_polyline(payload, chord, closed_loop=False)
                    for p in arr[:-1]:
                        pts.append(p)
                        tags.append(SIGMA)
            out.append((np.array(pts), np.array(tags)))
        return out


def _tokenize_loop(loop, chord):
    """Group consecutive short smooth Segs into runs; arcs and long segs stand alone."""
    items = []
    for el in loop:
        if isinstance(el, Arc):
            items.append(("arc", el))
        elif el.length() >= 0.5 * chord:
            items.append(("seg", el))
        else:
            items.append(("short", el))
    tokens = []
    i = 0
    n = len(items)
    while i < n:
        kind, el = items[i]
        if kind != "short":
            tokens.append((kind, el))
            i += 1
            continue
        run = [el]
        j = i + 1
        while j < n and items[j][0] == "short" and _smooth_join(run[-1], items[j][1]):
            run.append(items[j][1])
            j += 1
        poly = np.vstack([run[0].p0] + [s.p1 for s in run])
        tokens.append(("run", poly))
        i = j
    # merge a trailing run into a leading run across the loop start
    if len(tokens) >= 2 and tokens[0][0] == "run" and tokens[-1][0] == "run":
        first, last = tokens[0][1], tokens[-1][1]
        if np.linalg.norm(last[-1] - first[0]) < 1e-12 * max(1.0, np.abs(first).max()):
            tokens = tokens[1:-1] + [("run", np.vstack([last, first[1:]]))]
    if all(t[0] == "run" for t in tokens) and len(tokens) > 1:
        merged = np.vstack([tokens[0][1]] + [t[1][1:] for t in tokens[1:]])
        tokens = [("run", merged[:-1])]
    elif len(tokens) == 1 and tokens[0][0] == "run":
        tokens = [("run", tokens[0][1][:-1])]
    return tokens


def _smooth_join(a: Seg, b: Seg) -> bool:
    da = a.p1 - a.p0
    db = b.p1 - b.p0
    na, nb = np.linalg.norm(da), np.linalg.norm(db)
    if na == 0 or nb == 0:
        return False
    sin_turn = abs(float(cross2(da, db))) / (na * nb)
    return sin_turn < SMOOTH_TURN and float(np.dot(da, db)) > 0


def _resample_polyline(poly: np.ndarray, chord: float, closed_loop: bool) -> np.ndarray:
    seglen = np.linalg.norm(np.diff(poly, axis=0), axis=1)
    cum = np.concatenate([[0.0], np.cumsum(seglen)])
    total = cum[-1]
    n = max(8 if closed_loop else 1, int(math.ceil(total / chord)))
    targets = total * np.arange(n) / n if closed_loop else \
        total * np.arange(n + 1) / n
    xs = np.interp(targets, cum, poly[:, 0])
    ys = np.interp(targets, cum, poly[:, 1])
    return np.column_stack([xs, ys])


def _segment_distance(p, a, b) -> float:
    d = b - a
    t = float(np.dot(p - a, d)) / float(np.dot(d, d))
    t = min(1.0, max(0.0, t))
    return float(np.linalg.norm(a + t * d - p))


# -- measures -----------------------------------------------------------------

def measures(domain: ObstacleDomain, body: ConvexBody):
    """(area, anisotropic perimeter of Sigma, Euclidean length of Gamma).

    Area uses Green's theorem with exact circular-arc terms; Gamma never enters
    the anisotropic perimeter.
    """
    area = domain.signed_area()
    if area <= 0:
        raise ValidationError("degenerate domain")
    perim_sigma = anisotropic_perimeter(body, domain.sigma_surface())
    return area, perim_sigma, domain.gamma_length()


# -- constructions --------------------------------------------------------------

def subtract_ball(body: ConvexBody, center, radius: float) -> ObstacleDomain:
    """The 2D body minus an open ball, as an obstacle domain.

    The body may be a polytope or a disk (polygonized); the ball may bite the
    boundary, sit fully inside (annular hole), or be disjoint (detached domain).
    """
    center = _check_coords(center).reshape(2)
    radius = float(radius)
    if radius <= 0:
        raise ValidationError("obstacle radius must be positive")
    if body.dimension != 2:
        raise ValidationError("obstacle domains are 2D")
    if body.kind == POLYTOPE:
        verts = body.vertices
    elif body.kind == BALL:
        verts = circle_loop(body.parameters[0])
    else:
        raise ValidationError("body must be a 2D polytope or disk")
    return subtract_ball_from_loop(verts, center, radius)


def subtract_ball_from_loop(verts: np.ndarray, center, radius: float) -> ObstacleDomain:
    verts = np.asarray(verts, dtype=float)
    center = np.asarray(center, dtype=float)
    scale = max(1.0, float(np.max(np.abs(verts))), radius)
    tol = 1e-12 * scale

    # split polygon edges at circle crossings, classify sub-edges by midpoint
    kept_segs = []
    crossings = []  # (point, angle, kind) in boundary-traversal order
    n = len(verts)
    any_inside = False
    for i in range(n):
        a, b = verts[i], verts[(i + 1) % n]
        ts = _edge_circle_params(a, b, center, radius, tol)
        pts = [a] + [a + t * (b - a) for t in ts] + [b]
        for p, q in zip(pts[:-1], pts[1:]):
            if np.linalg.norm(q - p) <= tol:
                continue
            mid = 0.5 * (p + q)
            outside = np.linalg.norm(mid - center) >= radius
            if outside:
                kept_segs.append(Seg(p, q))
            else:
                any_inside = True
        for t in ts:
            p = a + t * (b - a)
            before = a + max(0.0, t - 1e-9) * (b - a)
            after = a + min(1.0, t + 1e-9) * (b - a)
            going_in = (np.linalg.norm(after - center)
                        < np.linalg.norm(before - center))
            ang = math.atan2(p[1] - center[1], p[0] - center[0])
            crossings.append((p, ang, "entry" if going_in else "exit"))

    if not crossings:
        return _no_crossing_domain(verts, center, radius, any_inside)

    arcs = _arcs_inside_polygon(verts, center, radius, crossings)
    loops = _stitch([*kept_segs, *arcs], scale)
    return ObstacleDomain(center, radius, loops)


def _edge_circle_params(a, b, center, radius, tol):
    d = b - a
    f = a - center
    qa = float(np.dot(d, d))
    qb = 2.0 * float(np.dot(f, d))
    qc = float(np.dot(f, f)) - radius * radius
    disc = qb * qb - 4 * qa * qc
    if disc <= tol * tol * qa:
        return []
    root = math.sqrt(disc)
    out = []
    for t in ((-qb - root) / (2 * qa), (-qb + root) / (2 * qa)):
        if 1e-12 < t < 1 - 1e-12:
            out.append(t)
    return sorted(out)


def _no_crossing_domain(verts, center, radius, any_inside):
    from shapely.geometry import Point, Polygon

    poly = Polygon(verts)
    if any_inside or poly.exterior.distance(Point(*center)) + 1e-15 < radius \
            and poly.contains(Point(*center)) is False and any_inside:
        raise ValidationError("degenerate tangency between body and obstacle")
    if Point(*verts[0]).distance(Point(*center)) < radius:
        raise ValidationError("obstacle ball covers the body")
    shell = [Seg(verts[i], verts[(i + 1) % len(verts)]) for i in range(len(verts))]
    if poly.contains(Point(*center)):
        if poly.exterior.distance(Point(*center)) <= radius:
            raise ValidationError("obstacle circle touches the boundary tangentially")
        hole = [Arc(center, radius, 0.0, -2 * math.pi)]
        return ObstacleDomain(center, radius, [shell, hole])
    if poly.distance(Point(*center)) <= radius:
        raise ValidationError("obstacle circle touches the boundary tangentially")
    return ObstacleDomain(center, radius, [shell])


def _arcs_inside_polygon(verts, center, radius, crossings):
    import shapely
    from shapely.geometry import Polygon

    poly = Polygon(verts)
    angs = sorted(c[1] for c in crossings)
    arcs = []
    m = len(angs)
    for i in range(m):
        lo = angs[i]
        hi = angs[(i + 1) % m] + (2 * math.pi if i + 1 == m else 0.0)
        if hi - lo < 1e-12:
            continue
        mid = 0.5 * (lo + hi)
        probe = center + radius * np.array([math.cos(mid), math.sin(mid)])
        if shapely.contains_xy(poly, probe[0], probe[1]):
            arcs.append(Arc(center, radius, hi, lo))  # clockwise traversal
    return arcs


def _stitch(elements, scale):
    """Chain elements into closed loops by matching endpoints."""
    from scipy.spatial import cKDTree

    if not elements:
        raise ValidationError("nothing to stitch")
    starts = np.array([np.asarray(el.start) for el in elements])
    tree = cKDTree(starts)
    used = [False] * len(elements)
    loops = []
    for i0 in range(len(elements)):
        if used[i0]:
            continue
        loop = [elements[i0]]
        used[i0] = True
        while True:
            endpt = np.asarray(loop[-1].end)
            dist, j = tree.query(endpt, k=2)
            cand = None
            for d, idx in zip(np.atleast_1d(dist), np.atleast_1d(j)):
                if idx < len(elements) and not used[idx] and d < 1e-7 * scale:
                    cand = idx
                    break
            if cand is None:
                gap = np.linalg.norm(endpt - np.asarray(loop[0].start))
                if gap < 1e-7 * scale:
                    break
                raise ValidationError("boundary stitching failed (open chain)")
            loop.append(elements[cand])
            used[cand] = True
        loops.append(_snap_loop(loop))
    return loops


def _snap_loop(loop):
    """Force exact endpoint sharing along the chain (removes stitching fuzz)."""
    for el, nxt in zip(loop, loop[1:] + loop[:1]):
        if isinstance(nxt, Seg):
            nxt.p0 = np.asarray(el.end, dtype=float).copy()
        if isinstance(el, Seg):
            el.p1 = np.asarray(nxt.start, dtype=float).copy()
    return loop


def build_sharpness_domain(body: ConvexBody, v, r: float) -> ObstacleDomain:
    """W minus the ball of radius r centered at -r*v (tangent to {<x,v>=0} at 0).

    As r grows the domain converges to the halfspace cut of W from above;
    the boundary discrepancy scales like diam(W)^2 / (8 r).
    """
    v = as_direction(v)
    r = float(r)
    if r <= 0:
        raise ValidationError("radius must be positive")
    return subtract_ball(body, -r * v, r)


def concentric_annulus(outer_radius: float, obstacle_radius: float,
                       center=(0.0, 0.0)) -> ObstacleDomain:
    """Annulus between the obstacle circle and a polygonized outer circle."""
    if outer_radius <= obstacle_radius:
        raise ValidationError("outer radius must exceed the obstacle radius")
    center = np.asarray(center, dtype=float)
    outer = circle_loop(outer_radius, center)
    shell = [Seg(outer[i], outer[(i + 1) % len(outer)]) for i in range(len(outer))]
    hole = [Arc(center, obstacle_radius, 0.0, -2 * math.pi)]
    return ObstacleDomain(center, obstacle_radius, [shell, hole])


def random_domain(seed: int, r: float, complexity: int,
                  attached: bool | None = None) -> ObstacleDomain:
    """Deterministic random test domain outside the ball of radius r.

    Attached domains are star-shaped polylines glued to the obstacle circle
    along one arc; detached domains are star polygons clear of the ball
    (empty Gamma). Resamples internally until all invariants hold.
    """
    if complexity < 3:
        raise ValidationError("complexity must be at least 3")
    if r <= 0:
        raise ValidationError("obstacle radius must be positive")
    rng = np.random.default_rng(seed)
    center = rng.uniform(-r, r, size=2)
    if attached is None:
        attached = rng.random() < 0.75
    for _ in range(200):
        try:
            if attached:
                return _random_attached(rng, center, r, complexity)
            return _random_detached(rng, center, r, complexity)
        except ValidationError:
            continue
    raise ValidationError("random domain generation failed to satisfy invariants")


MIN_CORNER = math.radians(40.0)


def _check_feature_size(segs, min_sep):
    """Reject sharp corners and near-touching non-adjacent edges; keeps the
    generated domains meshable at reasonable resolutions."""
    n = len(segs)
    for i in range(n):
        a, b = segs[i], segs[(i + 1) % n]
        da = a.p1 - a.p0
        db = b.p1 - b.p0
        if np.linalg.norm(a.p1 - b.p0) > 1e-9:
            continue  # not a shared corner (chain interrupted by an arc)
        cosang = -float(da @ db) / (np.linalg.norm(da) * np.linalg.norm(db))
        if math.acos(np.clip(cosang, -1, 1)) < MIN_CORNER:
            raise ValidationError("sharp corner")
    for i in range(n):
        for j in range(i + 2, n):
            if i == 0 and j == n - 1:
                continue
            if _segment_pair_distance(segs[i], segs[j]) < min_sep:
                raise ValidationError("narrow neck")


def _segment_pair_distance(a: Seg, b: Seg) -> float:
    best = math.inf
    for p in (b.p0, b.p1):
        best = min(best, _segment_distance(p, a.p0, a.p1))
    for p in (a.p0, a.p1):
        best = min(best, _segment_distance(p, b.p0, b.p1))
    return best


def _random_attached(rng, center, r, k):
    alpha = rng.uniform(0, 2 * math.pi)
    width = rng.uniform(math.pi / 3, 1.6 * math.pi)
    ths = alpha + width * (np.arange(k + 1) / k)
    ths[1:-1] += rng.uniform(-0.25, 0.25, k - 1) * (width / k)
    # radial spread proportional to the angular gap keeps spikes obtuse
    spread = min(1.25, 2.2 * width / k)
    rho = np.empty(k + 1)
    rho[0] = rho[-1] = r
    rho[1:-1] = r * (1.35 + spread * rng.uniform(0, 1, k - 1))
    pts = center + rho[:, None] * np.column_stack([np.cos(ths), np.sin(ths)])
    segs = [Seg(pts[i], pts[i + 1]) for i in range(k)]
    for s in segs:
        if _segment_distance(center, s.p0, s.p1) < r - 1e-12:
            raise ValidationError("edge dips into the ball")
    _check_feature_size(segs, 0.25 * r)
    arc = Arc(center, r, ths[-1], ths[0])
    return ObstacleDomain(center, r, [segs + [arc]])


def _random_detached(rng, center, r, k):
    size = r * rng.uniform(0.8, 1.6)
    away = rng.uniform(0, 2 * math.pi)
    c2 = center + (r + 2.2 * size) * np.array([math.cos(away), math.sin(away)])
    ths = rng.uniform(0, 2 * math.pi) + 2 * math.pi * np.arange(k) / k
    ths += rng.uniform(-0.3, 0.3, k) * (2 * math.pi / k)
    spread = min(0.55, 1.3 / k + 0.25)
    rho = size * (1.0 - spread * rng.uniform(0, 1, k))
    pts = c2 + rho[:, None] * np.column_stack([np.cos(ths), np.sin(ths)])
    segs = [Seg(pts[i], pts[(i + 1) % k]) for i in range(k)]
    for s in segs:
        if _segment_distance(center, s.p0, s.p1) < r - 1e-12:
            raise ValidationError("edge dips into the ball")
    _check_feature_size(segs, 0.2 * size)
    return ObstacleDomain(center, r, [segs])


# -- file format ----------------------------------------------------------------
#
#   obstacle cx cy r
#   sigma
#   x1 y1 x2 y2
#   gamma
#   theta_start theta_end

def dump_domain(domain: ObstacleDomain) -> str:
    c, r = domain.obstacle_center, domain.obstacle_radius
    lines = [f"obstacle {c[0]:.17g} {c[1]:.17g} {r:.17g}", "sigma"]
    for loop in domain.loops:
        for el in loop:
            if isinstance(el, Seg):
                lines.append(f"{el.p0[0]:.17g} {el.p0[1]:.17g} "
                             f"{el.p1[0]:.17g} {el.p1[1]:.17g}")
    lines.append("gamma")
    for loop in domain.loops:
        for el in loop:
            if isinstance(el, Arc):
                lines.append(f"{el.theta0:.17g} {el.theta1:.17g}")
    return "\n".join(lines) + "\n"


def parse_domain(text: str) -> ObstacleDomain:
    lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
    if not lines or not lines[0].startswith("obstacle"):
        raise ValidationError("domain file must start with an obstacle line")
    head = lines[0].split()
    try:
        cx, cy, r = float(head[1]), float(head[2]), float(head[3])
    except (ValueError, IndexError) as exc:
        raise ValidationError(f"malformed obstacle line: {lines[0]!r}") from exc
    center = np.array([cx, cy])
    section = None
    elements = []
    for ln in lines[1:]:
        if ln == "sigma":
            section = "sigma"
            continue
        if ln == "gamma":
            section = "gamma"
            continue
        try:
            vals = [float(t) for t in ln.split()]
        except ValueError as exc:
            raise ValidationError(f"malformed domain line: {ln!r}") from exc
        if section == "sigma":
            if len(vals) != 4:
                raise ValidationError(f"sigma edge needs 4 numbers: {ln!r}")
            elements.append(Seg(np.array(vals[:2]), np.array(vals[2:])))
        elif section == "gamma":
            if len(vals) != 2:
                raise ValidationError(f"gamma arc needs 2 numbers: {ln!r}")
            elements.append(Arc(center, r, vals[0], vals[1]))
        else:
            raise ValidationError("domain data before any sigma/gamma section")
    if not elements:
        raise ValidationError("domain file has no boundary elements")
    scale = max(1.0, r, float(np.max(np.abs(center))))
    loops = _stitch(elements, scale)
    return ObstacleDomain(center, r, loops)


def load_domain(path) -> ObstacleDomain:
    try:
        with open(path, "r", encoding="ascii") as fh:
            return parse_domain(fh.read())
    except OSError as exc:
        raise ValidationError(f"cannot read domain file {path}: {exc}") from exc


def save_domain(domain: ObstacleDomain, path) -> None:
    with open(path, "w", encoding="ascii") as fh:
        fh.write(dump_domain(domain))
