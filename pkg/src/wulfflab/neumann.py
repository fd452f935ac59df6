"""P1 finite elements for the pure-flux Poisson problem on an obstacle domain.

Laplacian(u) = c on the domain, normal derivative equal to the support
function of W on the free boundary, zero flux on the obstacle arcs. The
system is singular (constants); it is solved by conjugate gradients with the
constant mode projected out every iteration, then normalized to area-weighted
mean zero.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .bodies import ConvexBody, cross2, support_many
from .domains import SIGMA, measures
from .errors import NumericError, ValidationError
from .meshing import TriMesh

COMPAT_TOL = 1e-10
MEAN_TOL = 1e-10


def grad_basis(mesh: TriMesh):
    """Gradients of the barycentric basis per triangle: (T,3,2), plus areas."""
    p = mesh.vertices[mesh.triangles]
    e = np.stack([p[:, 2] - p[:, 1], p[:, 0] - p[:, 2], p[:, 1] - p[:, 0]], axis=1)
    twice_area = cross2(p[:, 1] - p[:, 0], p[:, 2] - p[:, 0])
    g = np.stack([-e[..., 1], e[..., 0]], axis=-1) / twice_area[:, None, None]
    return g, 0.5 * twice_area


def stiffness_matrix(mesh: TriMesh):
    import scipy.sparse as sp

    g, areas = grad_basis(mesh)
    k_local = np.einsum("t,tad,tbd->tab", areas, g, g)
    tri = mesh.triangles
    rows = np.repeat(tri, 3, axis=1).ravel()
    cols = np.tile(tri, (1, 3)).ravel()
    mat = sp.coo_matrix((k_local.ravel(), (rows, cols)),
                        shape=(len(mesh.vertices),) * 2)
    return mat.tocsr()


def lumped_mass(mesh: TriMesh) -> np.ndarray:
    m = np.zeros(len(mesh.vertices))
    np.add.at(m, mesh.triangles.ravel(),
              np.repeat(mesh.tri_areas() / 3.0, 3))
    return m


@dataclass
class ScalarField:
    """Vertex values plus piecewise-constant and vertex-recovered gradients."""

    mesh: TriMesh
    values: np.ndarray
    tri_gradients: np.ndarray      # (T, 2)
    vertex_gradients: np.ndarray   # (N, 2), area-weighted recovery
    _mass: np.ndarray = field(default=None, repr=False, compare=False)

    @classmethod
    def from_vertex_values(cls, mesh: TriMesh, values: np.ndarray) -> "ScalarField":
        values = np.asarray(values, dtype=float)
        m = lumped_mass(mesh)
        values = values - float(m @ values) / float(m.sum())
        g, areas = grad_basis(mesh)
        tri_g = np.einsum("ti,tid->td", values[mesh.triangles], g)
        vg = np.zeros((len(mesh.vertices), 2))
        w = np.zeros(len(mesh.vertices))
        np.add.at(vg, mesh.triangles.ravel(),
                  np.repeat(areas[:, None] * tri_g, 3, axis=0).reshape(-1, 2))
        np.add.at(w, mesh.triangles.ravel(), np.repeat(areas, 3))
        vg /= w[:, None]
        f = cls(mesh, values, tri_g, vg, m)
        assert abs(f.weighted_mean()) <= MEAN_TOL * max(1.0, np.abs(values).max())
        return f

    def weighted_mean(self) -> float:
        return float(self._mass @ self.values) / float(self._mass.sum())

    def max_gradient(self) -> float:
        if len(self.tri_gradients) == 0:
            return 0.0
        return float(np.max(np.linalg.norm(self.tri_gradients, axis=1)))


def solve_neumann(mesh: TriMesh, body: ConvexBody, c: float,
                  flux: str = "anisotropic", rel_tol: float = 1e-10,
                  max_iter: int | None = None) -> ScalarField:
    """Solve the flux problem for the given source constant c.

    The compatibility identity c * area = integral of the flux is asserted at
    the exact (domain) level; it holds identically when c comes from measures().
    """
    if mesh.domain is None:
        raise ValidationError("mesh lacks domain provenance; solve needs measures")
    if flux not in ("anisotropic", "zero"):
        raise ValidationError(f"unknown flux mode {flux!r}")
    area, perim_sigma, _ = measures(mesh.domain, body)
    flux_total = perim_sigma if flux == "anisotropic" else 0.0
    denom = max(abs(c) * area, flux_total, 1e-300)
    if abs(c * area - flux_total) / denom > COMPAT_TOL:
        raise ValidationError(
            f"incompatible data: c*area={c * area:.15g} vs flux={flux_total:.15g}")

    K = stiffness_matrix(mesh)
    m = lumped_mass(mesh)
    if flux == "anisotropic":
        edge_phi = support_many(body, mesh.boundary_normals)
        b = mesh.sigma_flux_vector(edge_phi)
    else:
        b = np.zeros(len(m))
    b -= c * m

    x = _cg_projected(K, b, rel_tol, max_iter)
    return ScalarField.from_vertex_values(mesh, x)


def _cg_projected(K, b, rel_tol, max_iter):
    """Jacobi-preconditioned CG on the mean-zero complement of the constants."""
    n = len(b)
    if max_iter is None:
        max_iter = max(3000, 100 * int(np.sqrt(n)))
    b = b - b.mean()
    nb = float(np.linalg.norm(b))
    if nb == 0.0:
        return np.zeros(n)
    dinv = 1.0 / K.diagonal()
    x = np.zeros(n)
    r = b.copy()
    z = dinv * r
    z -= z.mean()
    p = z.copy()
    rz = float(r @ z)
    for _ in range(max_iter):
        Kp = K @ p
        alpha = rz / float(p @ Kp)
        x += alpha * p
        r -= alpha * Kp
        r -= r.mean()
        if np.linalg.norm(r) <= rel_tol * nb:
            return x - x.mean()
        z = dinv * r
        z -= z.mean()
        rz_new = float(r @ z)
        p = z + (rz_new / rz) * p
        rz = rz_new
    raise NumericError(f"conjugate gradients stalled after {max_iter} iterations")
