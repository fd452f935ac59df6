"""Conforming triangulation of obstacle domains.

Strategy: resample the boundary at chord length <= h (arc vertices exactly on
the obstacle circle), lay a hexagonal lattice of interior points with a safety
clearance from the boundary, Delaunay-triangulate everything and keep the
triangles whose centroid lies in the polygonized domain. Boundary conformity
and the edge-length budget are verified, not assumed.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .bodies import cross2
from .domains import GAMMA, SIGMA, ObstacleDomain
from .errors import NumericError, ResourceError, ValidationError

LATTICE_FACTOR = 0.72   # interior spacing relative to h
CLEARANCE_FACTOR = 0.57  # keep interior points this far (times h) from the boundary
MAX_EDGE_FACTOR = 1.5
VERTEX_BUDGET = 1_000_000


class Region(enum.IntEnum):
    INTERIOR = 0
    SIGMA = 1
    GAMMA = 2
    JUNCTION = 3


@dataclass
class TriMesh:
    vertices: np.ndarray        # (N, 2)
    triangles: np.ndarray       # (T, 3) CCW
    boundary_edges: np.ndarray  # (E, 2) vertex indices, traversal order
    boundary_tags: np.ndarray   # (E,) SIGMA / GAMMA
    boundary_normals: np.ndarray  # (E, 2) outward
    h: float
    domain: ObstacleDomain | None = None
    vertex_region: np.ndarray | None = None
    _areas: np.ndarray | None = field(default=None, repr=False, compare=False)

    def tri_areas(self) -> np.ndarray:
        if self._areas is None:
            p = self.vertices[self.triangles]
            self._areas = 0.5 * np.abs(
                cross2(p[:, 1] - p[:, 0], p[:, 2] - p[:, 0]))
        return self._areas

    @property
    def total_area(self) -> float:
        return float(self.tri_areas().sum())

    def n_vertices(self) -> int:
        return len(self.vertices)

    def max_edge_length(self) -> float:
        p = self.vertices[self.triangles]
        e = np.concatenate([p[:, 1] - p[:, 0], p[:, 2] - p[:, 1], p[:, 0] - p[:, 2]])
        return float(np.max(np.linalg.norm(e, axis=1)))

    def junction_mask(self) -> np.ndarray:
        return self.vertex_region == Region.JUNCTION

    def sigma_flux_vector(self, edge_values: np.ndarray) -> np.ndarray:
        """Assemble sum over SIGMA edges of value * length / 2 onto endpoints."""
        out = np.zeros(len(self.vertices))
        sel = self.boundary_tags == SIGMA
        edges = self.boundary_edges[sel]
        vals = edge_values[sel]
        lens = np.linalg.norm(self.vertices[edges[:, 1]] - self.vertices[edges[:, 0]],
                              axis=1)
        w = 0.5 * vals * lens
        np.add.at(out, edges[:, 0], w)
        np.add.at(out, edges[:, 1], w)
        return out


def mesh_domain(domain: ObstacleDomain, h: float) -> TriMesh:
    """Triangulate the domain with target edge length h (max edge <= 1.5 h)."""
    if not (0 < h < domain.diameter() / 4):
        raise ValidationError("mesh size must satisfy 0 < h < diam/4")

    polylines = [(_camber_straight_runs(pts), tags)
                 for pts, tags in domain.loop_polylines(h)]
    bpts, btags, bedges_local = [], [], []
    offset = 0
    for pts, tags in polylines:
        m = len(pts)
        bpts.append(pts)
        btags.append(tags)
        idx = offset + np.arange(m)
        bedges_local.append(np.column_stack([idx, offset + (np.arange(m) + 1) % m]))
        offset += m
    bpts = np.vstack(bpts)
    btags = np.concatenate(btags)
    bedges = np.vstack(bedges_local)

    area = domain.area
    projected = len(bpts) + 1.3 * area / (0.866 * (LATTICE_FACTOR * h) ** 2)
    if projected > VERTEX_BUDGET:
        raise ResourceError(
            f"mesh would need about {int(projected)} vertices (budget {VERTEX_BUDGET})")

    interior = _interior_lattice(domain, polylines, bpts, bedges, h)
    points = np.vstack([bpts, interior]) if len(interior) else bpts

    from scipy.spatial import Delaunay

    tri = Delaunay(points)
    simplices = tri.simplices
    cent = points[simplices].mean(axis=1)
    keep = _contains(polylines, cent)
    simplices = simplices[keep]

    # enforce CCW orientation
    p = points[simplices]
    det = cross2(p[:, 1] - p[:, 0], p[:, 2] - p[:, 0])
    flip = det < 0
    simplices[flip] = simplices[flip][:, [0, 2, 1]]
    areas = 0.5 * np.abs(det)
    if np.any(areas <= 1e-14 * h * h):
        raise NumericError("degenerate triangle in mesh")

    _check_conformity(simplices, bedges, len(bpts))

    normals = _edge_normals(points, bedges)
    region = _vertex_regions(len(points), bedges, btags)

    mesh = TriMesh(points, simplices, bedges, btags, normals, h, domain, region)
    if mesh.max_edge_length() > MAX_EDGE_FACTOR * h * (1 + 1e-9):
        raise NumericError(
            f"mesh edge {mesh.max_edge_length():.3g} exceeds {MAX_EDGE_FACTOR}*h")
    return mesh


def _camber_straight_runs(pts: np.ndarray) -> np.ndarray:
    """Bow collinear boundary stretches outward by a parabolic ~1e-8 camber.

    Exactly collinear point triples make the point-set Delaunay triangulation
    ambiguous along the boundary (zero-area fans that defeat the conformity
    filter); a strictly convex-outward camber puts every chord on the local
    hull without moving the boundary at any scale the solver can see.
    """
    pts = pts.copy()
    n = len(pts)
    e = np.roll(pts, -1, axis=0) - pts
    lens = np.linalg.norm(e, axis=1)
    turn = cross2(np.roll(e, 1, axis=0), e)
    straight = np.abs(turn) <= 1e-12 * np.maximum(lens, np.roll(lens, 1)) ** 2
    if not straight.any() or straight.all():
        return pts
    # maximal circular runs of straight vertices
    i = 0
    while straight[i % n] and i < n:
        i += 1
    start = i % n  # a corner vertex
    k = start
    visited = 0
    while visited < n:
        k = (k + 1) % n
        visited += 1
        if not straight[k]:
            continue
        run = [k]
        while straight[(k + 1) % n] and len(run) < n:
            k = (k + 1) % n
            visited += 1
            run.append(k)
        a = pts[(run[0] - 1) % n]
        b = pts[(run[-1] + 1) % n]
        chord = b - a
        clen = np.linalg.norm(chord)
        outward = np.array([chord[1], -chord[0]]) / clen
        m = len(run)
        t = (np.arange(m) + 1.0) / (m + 1.0)
        pts[run] += (4e-8 * clen) * (t * (1 - t))[:, None] * outward
    return pts


def _interior_lattice(domain, polylines, bpts, bedges, h):
    from scipy.spatial import cKDTree

    s = LATTICE_FACTOR * h
    lo, hi = domain.bbox()
    xs0 = np.arange(lo[0] - s, hi[0] + s, s)
    ys = np.arange(lo[1] - s, hi[1] + s, s * math.sqrt(3) / 2)
    cols = []
    for j, y in enumerate(ys):
        xs = xs0 + (s / 2 if j % 2 else 0.0)
        cols.append(np.column_stack([xs, np.full_like(xs, y)]))
    cand = np.vstack(cols)
    cand = cand[_contains(polylines, cand)]

    # densified boundary for clearance queries
    dense = [bpts]
    a = bpts[bedges[:, 0] % len(bpts)]
    b = bpts[bedges[:, 1] % len(bpts)]
    lens = np.linalg.norm(b - a, axis=1)
    nsub = np.maximum(1, np.ceil(lens / (h / 8)).astype(int))
    for k in range(1, int(nsub.max())):
        sel = nsub > k
        t = (k / nsub[sel])[:, None]
        dense.append(a[sel] + t * (b[sel] - a[sel]))
    tree = cKDTree(np.vstack(dense))

    front = _offset_front(polylines, h, tree, bpts, bedges)
    if len(cand):
        d, _ = tree.query(cand)
        cand = cand[d >= CLEARANCE_FACTOR * h]
    if len(front) and len(cand):
        d, _ = cKDTree(front).query(cand)
        cand = cand[d >= 0.48 * h]
    if len(front) == 0:
        return cand
    return np.vstack([front, cand]) if len(cand) else front


def _offset_front(polylines, h, boundary_tree, bpts, bedges):
    """One advancing-front layer 0.75h inside the boundary.

    Offsetting along vertex bisectors keeps the gap between the boundary and
    the lattice from ever exceeding the edge-length budget, whatever the angle
    between boundary and lattice rows. A front point is kept only if it stays
    outside the diametral disk of every nearby boundary chord, which preserves
    the Gabriel (hence Delaunay) status of the chords.
    """
    from scipy.spatial import cKDTree

    pts_all = []
    for pts, _tags in polylines:
        prv = np.roll(pts, 1, axis=0)
        nxt = np.roll(pts, -1, axis=0)
        d1 = pts - prv
        d2 = nxt - pts
        n1 = np.column_stack([d1[:, 1], -d1[:, 0]])
        n1 /= np.linalg.norm(n1, axis=1)[:, None]
        n2 = np.column_stack([d2[:, 1], -d2[:, 0]])
        n2 /= np.linalg.norm(n2, axis=1)[:, None]
        bis = -(n1 + n2)
        norms = np.linalg.norm(bis, axis=1)
        ok = norms > 1e-9
        q = pts[ok] + (0.75 * h) * bis[ok] / norms[ok][:, None]
        pts_all.append(q)
    cand = np.vstack(pts_all)
    cand = cand[_contains(polylines, cand)]
    if len(cand) == 0:
        return cand
    d, _ = boundary_tree.query(cand)
    cand = cand[d >= 0.33 * h]
    if len(cand) == 0:
        return cand

    mids = 0.5 * (bpts[bedges[:, 0]] + bpts[bedges[:, 1]])
    half = 0.5 * np.linalg.norm(bpts[bedges[:, 1]] - bpts[bedges[:, 0]], axis=1)
    mid_tree = cKDTree(mids)
    keep = np.ones(len(cand), dtype=bool)
    for i, hits in enumerate(mid_tree.query_ball_point(cand, 0.55 * h)):
        for j in hits:
            if np.linalg.norm(cand[i] - mids[j]) < half[j] * (1 + 1e-9):
                keep[i] = False
                break
    return _thin_points(cand[keep], 0.45 * h)


def _thin_points(pts, min_dist):
    """Greedy subset with pairwise spacing >= min_dist (spatial-hash accept)."""
    cell = min_dist
    grid = {}
    kept = []
    md2 = min_dist * min_dist
    for p in pts:
        ci, cj = int(math.floor(p[0] / cell)), int(math.floor(p[1] / cell))
        ok = True
        for di in (-1, 0, 1):
            for dj in (-1, 0, 1):
                for q in grid.get((ci + di, cj + dj), ()):
                    dd = (p[0] - q[0]) ** 2 + (p[1] - q[1]) ** 2
                    if dd < md2:
                        ok = False
                        break
                if not ok:
                    break
            if not ok:
                break
        if ok:
            kept.append(p)
            grid.setdefault((ci, cj), []).append(p)
    return np.array(kept) if kept else np.empty((0, 2))


def _contains(polylines, pts):
    """Membership in the chord-polygonized domain (the region actually meshed)."""
    import shapely
    from shapely.geometry import Polygon

    rings = []
    for loop_pts, _tags in polylines:
        x, y = loop_pts[:, 0], loop_pts[:, 1]
        a = 0.5 * np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y)
        rings.append((a, loop_pts))
    shell = max(rings, key=lambda t: t[0])[1]
    holes = [r for a, r in rings if a <= 0]
    poly = Polygon(shell, holes)
    return shapely.contains_xy(poly, pts[:, 0], pts[:, 1])


def _check_conformity(simplices, bedges, n_boundary):
    edges = np.concatenate([simplices[:, [0, 1]], simplices[:, [1, 2]],
                            simplices[:, [2, 0]]])
    key = np.sort(edges, axis=1)
    uniq, counts = np.unique(key, axis=0, return_counts=True)
    mesh_boundary = {tuple(e) for e in uniq[counts == 1]}
    loop_boundary = {tuple(sorted(e)) for e in bedges.tolist()}
    if mesh_boundary != loop_boundary:
        missing = loop_boundary - mesh_boundary
        extra = mesh_boundary - loop_boundary
        raise NumericError(
            f"mesh boundary does not match the domain boundary "
            f"({len(missing)} missing, {len(extra)} extra edges)")
    if np.any(counts > 2):
        raise NumericError("non-manifold mesh edge")


def _edge_normals(points, bedges):
    d = points[bedges[:, 1]] - points[bedges[:, 0]]
    lens = np.linalg.norm(d, axis=1)
    return np.column_stack([d[:, 1], -d[:, 0]]) / lens[:, None]


def _vertex_regions(n, bedges, btags):
    region = np.full(n, Region.INTERIOR, dtype=np.int8)
    sig = np.zeros(n, dtype=bool)
    gam = np.zeros(n, dtype=bool)
    for (i, j), tag in zip(bedges, btags):
        if tag == SIGMA:
            sig[i] = sig[j] = True
        else:
            gam[i] = gam[j] = True
    region[sig] = Region.SIGMA
    region[gam] = Region.GAMMA
    region[sig & gam] = Region.JUNCTION
    return region


# -- text dump -------------------------------------------------------------------
#
#   v x y      vertex line
#   t i j k    triangle line
#   b i j TAG  boundary edge line

def dump_mesh(mesh: TriMesh) -> str:
    lines = [f"v {x:.17g} {y:.17g}" for x, y in mesh.vertices]
    lines += [f"t {i} {j} {k}" for i, j, k in mesh.triangles]
    lines += [f"b {i} {j} {tag}" for (i, j), tag in
              zip(mesh.boundary_edges, mesh.boundary_tags)]
    return "\n".join(lines) + "\n"


def parse_mesh(text: str) -> TriMesh:
    """Rebuild a mesh from a dump; for inspection/plotting (no domain attached)."""
    verts, tris, bed, tags = [], [], [], []
    for ln in text.splitlines():
        parts = ln.split()
        if not parts:
            continue
        if parts[0] == "v":
            verts.append([float(parts[1]), float(parts[2])])
        elif parts[0] == "t":
            tris.append([int(parts[1]), int(parts[2]), int(parts[3])])
        elif parts[0] == "b":
            bed.append([int(parts[1]), int(parts[2])])
            tags.append(parts[3])
        else:
            raise ValidationError(f"malformed mesh line: {ln!r}")
    if not verts or not tris:
        raise ValidationError("mesh dump lacks vertices or triangles")
    verts = np.array(verts)
    bed = np.array(bed, dtype=int)
    tags = np.array(tags)
    normals = _edge_normals(verts, bed)
    region = _vertex_regions(len(verts), bed, tags)
    # h is not stored in the dump; recover the scale from boundary chords
    lens = np.linalg.norm(verts[bed[:, 1]] - verts[bed[:, 0]], axis=1)
    return TriMesh(verts, np.array(tris, dtype=int), bed, tags, normals,
                   float(np.max(lens)), None, region)


def save_mesh(mesh: TriMesh, path) -> None:
    with open(path, "w", encoding="ascii") as fh:
        fh.write(dump_mesh(mesh))


def load_mesh(path) -> TriMesh:
    try:
        with open(path, "r", encoding="ascii") as fh:
            return parse_mesh(fh.read())
    except OSError as exc:
        raise ValidationError(f"cannot read mesh file {path}: {exc}") from exc
