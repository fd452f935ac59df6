"""Discrete lower contact sets, restricted normal cones, and gradient-image coverage.

The contact test is global: a vertex belongs to the lower contact set iff its
recovered tangent plane stays below the field at every mesh vertex (the domain
is non-convex, so a local test would not be sound). Complexity O(N^2), run in
blocks of matrix algebra; acceptable at desk scale.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .bodies import ConvexBody, gauge, gauge_many
from .errors import NumericError, ResourceError, ValidationError
from .meshing import Region, TriMesh
from .neumann import ScalarField

_BLOCK = 1024


def default_contact_epsilon(mesh: TriMesh, field: ScalarField) -> float:
    """O(h^2) tolerance: discrete solutions violate the exact test at that order."""
    return 5.0 * mesh.h ** 2 * (1.0 + field.max_gradient())


@dataclass
class ContactSet:
    indices: np.ndarray      # member vertex indices
    slack: np.ndarray        # per-vertex worst violation of the plane test
    epsilon: float
    member_mask: np.ndarray

    def __len__(self):
        return len(self.indices)

    def to_csv(self) -> str:
        lines = ["vertex,slack,member"]
        for i, (s, m) in enumerate(zip(self.slack, self.member_mask)):
            lines.append(f"{i},{s:.15g},{'true' if m else 'false'}")
        return "\n".join(lines) + "\n"


def contact_slack(mesh: TriMesh, field: ScalarField) -> np.ndarray:
    """min over x of u(x) - u(p) - <g(p), x - p> for every vertex p (g recovered).

    The O(N^2) sweep is evaluated as blocked rank-4 matrix products with a
    running minimum, which keeps every intermediate inside cache.
    """
    x = mesh.vertices
    u = field.values
    g = field.vertex_gradients
    n = len(u)
    # S[p, q] = 1*u[q] + c[p]*1 + g[p,0]*(-x0[q]) + g[p,1]*(-x1[q])
    right = np.vstack([u, np.ones(n), -x[:, 0], -x[:, 1]])
    c = np.einsum("pd,pd->p", g, x) - u
    left = np.column_stack([np.ones(n), c, g[:, 0], g[:, 1]])
    slack = np.full(n, np.inf)
    xb = 4 * _BLOCK
    for lo in range(0, n, _BLOCK):
        hi = min(n, lo + _BLOCK)
        lblock = left[lo:hi]
        best = slack[lo:hi]
        for xlo in range(0, n, xb):
            s = lblock @ right[:, xlo:xlo + xb]
            np.minimum(best, s.min(axis=1), out=best)
    return slack


def lower_contact_set(mesh: TriMesh, field: ScalarField,
                      epsilon: float | None = None) -> ContactSet:
    if epsilon is None:
        epsilon = default_contact_epsilon(mesh, field)
    if epsilon < 0:
        raise ValidationError("contact tolerance must be nonnegative")
    slack = contact_slack(mesh, field)
    member = slack >= -epsilon
    member &= mesh.vertex_region != Region.JUNCTION
    return ContactSet(np.nonzero(member)[0], slack, float(epsilon), member)


def contact_triangle_mask(mesh: TriMesh, contact: ContactSet) -> np.ndarray:
    """Triangles whose three vertices are all contact members."""
    return contact.member_mask[mesh.triangles].all(axis=1)


@dataclass
class MinimizerLocation:
    point: np.ndarray
    region: Region
    vertex: int


def minimizer_location(mesh: TriMesh, field: ScalarField, body: ConvexBody, v,
                       gauge_margin: float = 0.05) -> MinimizerLocation:
    """Discrete argmin of u(.) - <v, .> over all vertices and its region tag.

    Requires gauge(v) <= 1 - margin: the tilt must stay strictly inside W for
    the flux comparison that pushes the minimizer off the free boundary.
    """
    v = np.asarray(v, dtype=float)
    if gauge_margin <= 0:
        raise ValidationError("gauge margin must be positive")
    if gauge(body, v) > 1.0 - gauge_margin + 1e-12:
        raise ValidationError("tilt vector is not strictly inside the body")
    vals = field.values - mesh.vertices @ v
    k = int(np.argmin(vals))
    return MinimizerLocation(mesh.vertices[k], Region(mesh.vertex_region[k]), k)


def gamma_vertices(mesh: TriMesh) -> np.ndarray:
    """Vertices strictly on the obstacle arcs (junctions excluded)."""
    return np.nonzero(mesh.vertex_region == Region.GAMMA)[0]


def gamma_argmin(mesh: TriMesh, field: ScalarField, v=None) -> int:
    """Arc-restricted minimizer of u(.) - <v, .>; ties toward the smallest index."""
    idx = gamma_vertices(mesh)
    if idx.size == 0:
        raise NumericError("mesh has no interior obstacle-arc vertices")
    vals = field.values[idx]
    if v is not None:
        vals = vals - mesh.vertices[idx] @ np.asarray(v, dtype=float)
    return int(idx[np.argmin(vals)])


def sphere_normal(mesh: TriMesh, vertex: int) -> np.ndarray:
    """Outward normal of the obstacle ball at a boundary vertex."""
    dom = mesh.domain
    if dom is None:
        raise ValidationError("mesh lacks domain provenance")
    d = mesh.vertices[vertex] - dom.obstacle_center
    return d / np.linalg.norm(d)


@dataclass
class NormalConeQuery:
    """Membership query: is v in the normal cone of the arc at p (sign-restricted)?"""

    point: np.ndarray
    vector: np.ndarray
    sign: int = +1

    def __post_init__(self):
        self.point = np.asarray(self.point, dtype=float)
        self.vector = np.asarray(self.vector, dtype=float)
        if self.sign not in (+1, -1):
            raise ValidationError("sign must be +1 or -1")


def locate_gamma_vertex(mesh: TriMesh, point, tol: float = 1e-9) -> int:
    pts = np.asarray(point, dtype=float)
    idx = gamma_vertices(mesh)
    if idx.size == 0:
        raise ValidationError("mesh has no obstacle-arc vertices")
    d = np.linalg.norm(mesh.vertices[idx] - pts, axis=1)
    k = int(np.argmin(d))
    scale = max(1.0, float(np.abs(mesh.vertices).max()))
    if d[k] > tol * scale:
        raise ValidationError("query point does not lie on an obstacle arc vertex")
    return int(idx[k])


def normal_cone_membership(mesh: TriMesh, field: ScalarField,
                           query: NormalConeQuery,
                           epsilon: float | None = None) -> bool:
    """v is a member iff <x - p, v> <= u(x) - u(p) for every arc vertex x,
    and the sign-restricted component along the sphere normal is nonnegative."""
    p = locate_gamma_vertex(mesh, query.point)
    if epsilon is None:
        epsilon = default_contact_epsilon(mesh, field)
    idx = gamma_vertices(mesh)
    x = mesh.vertices[idx]
    gaps = field.values[idx] - field.values[p] - (x - mesh.vertices[p]) @ query.vector
    if float(gaps.min()) < -epsilon:
        return False
    s = sphere_normal(mesh, p)
    return query.sign * float(query.vector @ s) >= -1e-12


def gradient_image_coverage(mesh: TriMesh, field: ScalarField, contact: ContactSet,
                            body: ConvexBody, v, delta: float | None = None) -> float:
    """Fraction of a grid sample of the halfspace cut of W that lies within
    delta of some contact-triangle gradient.

    Samples stay delta inside the gauge ball and delta off the cut plane, so
    the score probes the stable core of the claimed inclusion.
    """
    from scipy.spatial import cKDTree

    if delta is None:
        delta = 5.0 * mesh.h
    if delta <= 0:
        raise ValidationError("delta must be positive")
    v = np.asarray(v, dtype=float)
    tri_mask = contact_triangle_mask(mesh, contact)
    if not tri_mask.any():
        raise NumericError("empty contact set: discretization too coarse")
    cloud = field.tri_gradients[tri_mask]

    R = body.bounding_radius()
    step = delta / 2.0
    if (2 * R / step + 1) ** 2 > 2e7:
        raise ResourceError("coverage grid would exceed the sample budget")
    ax = np.arange(-R, R + step, step)
    gx, gy = np.meshgrid(ax, ax)
    samples = np.column_stack([gx.ravel(), gy.ravel()])
    keep = (gauge_many(body, samples) <= 1.0 - delta) & (samples @ v >= delta)
    samples = samples[keep]
    if len(samples) == 0:
        raise ValidationError("delta leaves no sample points in the halfspace cut")
    d, _ = cKDTree(cloud).query(samples)
    return float(np.mean(d <= delta))
