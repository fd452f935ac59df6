"""Independent oracles used to cross-check the package implementations.

Everything here deliberately avoids the code paths under test: cut areas come
from an exact polar integral, the gauge from a linear program, volumes from
Monte-Carlo, the sharpness family from circle-circle closed forms, and contact
slacks from a plain double loop.
"""

import math

import numpy as np


# -- exact polar cut-area for convex polygons ---------------------------------

class PolarCutArea:
    """Closed-form area of {x in W : <x, u(phi)> >= 0} via radial integration.

    For a convex polygon with 0 strictly inside, (1/2) * integral of rho^2
    over the half-turn of directions has an exact per-edge antiderivative
    (d^2/2) * tan(theta - psi) on each edge's angular sector.
    """

    def __init__(self, vertices: np.ndarray):
        v = np.asarray(vertices, dtype=float)
        ang = np.arctan2(v[:, 1], v[:, 0])
        k = int(np.argmin(ang))
        v = np.roll(v, -k, axis=0)
        ang = np.arctan2(v[:, 1], v[:, 0])
        ang = np.unwrap(ang)
        assert np.all(np.diff(ang) > 0)
        e = np.roll(v, -1, axis=0) - v
        lens = np.linalg.norm(e, axis=1)
        normals = np.column_stack([e[:, 1], -e[:, 0]]) / lens[:, None]
        self.psi = np.arctan2(normals[:, 1], normals[:, 0])
        self.d = np.sum(normals * v, axis=1)
        self.alpha = np.concatenate([ang, [ang[0] + 2 * math.pi]])
        segs = (self.d ** 2 / 2) * (np.tan(self.alpha[1:] - self.psi)
                                    - np.tan(self.alpha[:-1] - self.psi))
        self.cum = np.concatenate([[0.0], np.cumsum(segs)])
        self.area = self.cum[-1]

    def _G(self, theta):
        theta = np.asarray(theta, dtype=float)
        base = self.alpha[0]
        wraps = np.floor((theta - base) / (2 * math.pi))
        t = theta - 2 * math.pi * wraps
        i = np.clip(np.searchsorted(self.alpha, t, side="right") - 1,
                    0, len(self.d) - 1)
        g = self.cum[i] + (self.d[i] ** 2 / 2) * (np.tan(t - self.psi[i])
                                                  - np.tan(self.alpha[i] - self.psi[i]))
        return g + wraps * self.area

    def cut_area(self, phi):
        """Area of W intersected with {<x, (cos phi, sin phi)> >= 0}."""
        return self._G(np.asarray(phi) + math.pi / 2) - self._G(np.asarray(phi) - math.pi / 2)

    def brute_beta(self, n_angles: int = 1_000_000):
        phis = 2 * math.pi * np.arange(n_angles) / n_angles
        fracs = self.cut_area(phis) / self.area
        k = int(np.argmin(fracs))
        return float(fracs[k]), float(phis[k])


# -- LP oracle for the gauge (dual-norm sup formula) ---------------------------

def gauge_by_lp(vertices: np.ndarray, x) -> float:
    """sup{ <x, v> : <v, w_j> <= 1 for every vertex w_j of W }."""
    from scipy.optimize import linprog

    x = np.asarray(x, dtype=float)
    res = linprog(-x, A_ub=np.asarray(vertices, dtype=float),
                  b_ub=np.ones(len(vertices)), bounds=(None, None),
                  method="highs")
    assert res.status == 0, res.message
    return float(-res.fun)


# -- Monte-Carlo volume of a clipped body --------------------------------------

def mc_clipped_area(vertices: np.ndarray, v, n_samples: int = 10_000_000,
                    seed: int = 0):
    """Area of {x in polygon : <x,v> >= 0} by rejection sampling in the bbox."""
    rng = np.random.default_rng(seed)
    verts = np.asarray(vertices, dtype=float)
    lo, hi = verts.min(axis=0), verts.max(axis=0)
    pts = rng.uniform(lo, hi, size=(n_samples, 2))
    import shapely
    from shapely.geometry import Polygon

    inside = shapely.contains_xy(Polygon(verts), pts[:, 0], pts[:, 1])
    hit = inside & (pts @ np.asarray(v, dtype=float) >= 0)
    box = np.prod(hi - lo)
    p = hit.mean()
    area = box * p
    sigma = box * math.sqrt(p * (1 - p) / n_samples)
    return area, sigma


def mc_domain_area(domain, n_samples: int = 2_000_000, seed: int = 1):
    lo, hi = domain.bbox()
    rng = np.random.default_rng(seed)
    pts = rng.uniform(lo, hi, size=(n_samples, 2))
    p = domain.contains_points(pts).mean()
    box = float(np.prod(hi - lo))
    return box * p, box * math.sqrt(p * (1 - p) / n_samples)


# -- circle-circle closed forms for the disk sharpness family -------------------

def lens_area(r1, r2, d):
    """Intersection area of circles radius r1, r2 with center distance d."""
    a1 = math.acos((d * d + r1 * r1 - r2 * r2) / (2 * d * r1))
    a2 = math.acos((d * d + r2 * r2 - r1 * r1) / (2 * d * r2))
    tri = 0.5 * math.sqrt(max(0.0, (-d + r1 + r2) * (d + r1 - r2)
                              * (d - r1 + r2) * (d + r1 + r2)))
    return r1 * r1 * a1 + r2 * r2 * a2 - tri


def disk_sharpness_exact(r):
    """(area, sigma_length, gamma_length) for unit disk minus ball r at (0,-r)."""
    area = math.pi - lens_area(1.0, r, r)
    sigma_len = math.pi + 2 * math.asin(1.0 / (2 * r))
    gamma_len = 2 * r * math.acos(1 - 1.0 / (2 * r * r))
    return area, sigma_len, gamma_len


def square_sharpness_exact(r):
    """(area, anisotropic sigma perimeter) for [-1,1]^2 minus ball r at (0,-r)."""
    sag = r - math.sqrt(r * r - 1.0)
    area = 2.0 + (2 * r - (math.sqrt(r * r - 1.0) + r * r * math.asin(1.0 / r)))
    perim = 4.0 + 2.0 * sag
    return area, perim


# -- independent contact evaluations --------------------------------------------

def contact_slack_loops(points, values, grads):
    """Literal double-loop evaluation of the supporting-plane slack."""
    n = len(values)
    out = np.empty(n)
    for p in range(n):
        worst = math.inf
        for x in range(n):
            gap = values[x] - values[p] - float(grads[p] @ (points[x] - points[p]))
            worst = min(worst, gap)
        out[p] = worst
    return out


def contact_slack_matrix(points, values, grads):
    """One-shot full-matrix evaluation over raw arrays (no chunking)."""
    s = values[None, :] - values[:, None] \
        - np.einsum("pd,xd->px", grads, points) \
        + np.einsum("pd,pd->p", grads, points)[:, None]
    return s.min(axis=1)


# -- misc ------------------------------------------------------------------------

def radial_solution(c, r_inner):
    """Closed-form field for the concentric annulus: quadratic plus log."""
    def u(s):
        return c * s * s / 4.0 - (c * r_inner * r_inner / 2.0) * np.log(s)

    def du(s):
        return c * s / 2.0 - c * r_inner * r_inner / (2.0 * s)

    return u, du


def structured_square_mesh(n, lo=(0.0, 0.0), hi=(1.0, 1.0)):
    """Simple structured TriMesh on a rectangle (all-SIGMA boundary, no domain)."""
    from wulfflab.meshing import TriMesh, Region, _edge_normals, _vertex_regions

    xs = np.linspace(lo[0], hi[0], n + 1)
    ys = np.linspace(lo[1], hi[1], n + 1)
    X, Y = np.meshgrid(xs, ys)
    pts = np.column_stack([X.ravel(), Y.ravel()])

    def vid(i, j):
        return j * (n + 1) + i

    tris = []
    for j in range(n):
        for i in range(n):
            a, b, c, d = vid(i, j), vid(i + 1, j), vid(i + 1, j + 1), vid(i, j + 1)
            tris.append([a, b, c])
            tris.append([a, c, d])
    bed = []
    for i in range(n):
        bed.append([vid(i, 0), vid(i + 1, 0)])
    for j in range(n):
        bed.append([vid(n, j), vid(n, j + 1)])
    for i in range(n, 0, -1):
        bed.append([vid(i, n), vid(i - 1, n)])
    for j in range(n, 0, -1):
        bed.append([vid(0, j), vid(0, j - 1)])
    bed = np.array(bed, dtype=int)
    tags = np.array(["SIGMA"] * len(bed))
    h = float(max((hi[0] - lo[0]) / n, (hi[1] - lo[1]) / n)) * math.sqrt(2)
    return TriMesh(pts, np.array(tris, dtype=int), bed, tags,
                   _edge_normals(pts, bed), h, None,
                   _vertex_regions(len(pts), bed, tags))
