"""End-to-end verification of the contact-set volume chain (n = 2).

Assembles, on one solved field: the halfspace-cut volume of W, the estimated
area of the gradient image over the contact set, the source-term bound
(c/2)^2 * |contact region|, and the free-boundary bound P^2/(4*area). Each
consecutive inequality is reported with its relative discrete margin.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .bodies import ConvexBody, cross2, halfspace_cut, volume
from .contact import (ContactSet, contact_triangle_mask, gamma_argmin,
                      gradient_image_coverage, lower_contact_set, sphere_normal)
from .domains import ObstacleDomain, measures
from .errors import ValidationError
from .meshing import TriMesh, mesh_domain
from .neumann import ScalarField, solve_neumann

HESSIAN_PSD_SLACK = 0.05


def _fmt(x) -> str:
    return f"{x:.15g}"


def fit_contact_hessians(mesh: TriMesh, field: ScalarField, tri_mask: np.ndarray):
    """Least-squares symmetric Hessian per contact triangle from the recovered
    corner gradients; returns (lambda_min, lambda_max_abs) arrays."""
    tri = mesh.triangles[tri_mask]
    if len(tri) == 0:
        return np.empty(0), np.empty(0)
    X = mesh.vertices[tri]
    G = field.vertex_gradients[tri]
    Xc = X - X.mean(axis=1, keepdims=True)
    Gc = G - G.mean(axis=1, keepdims=True)
    M = np.einsum("tia,tib->tab", Xc, Xc)
    B = np.einsum("tia,tib->tab", Gc, Xc)
    H = np.linalg.solve(M, B.transpose(0, 2, 1)).transpose(0, 2, 1)
    a = H[:, 0, 0]
    c = H[:, 1, 1]
    b = 0.5 * (H[:, 0, 1] + H[:, 1, 0])
    mean = 0.5 * (a + c)
    dev = np.sqrt(0.25 * (a - c) ** 2 + b * b)
    return mean - dev, np.abs(mean) + dev


def gradient_image_area(mesh: TriMesh, field: ScalarField, tri_mask: np.ndarray) -> float:
    """Sum of |det| of the gradient-space images of contact triangles
    (corners carry the vertex-recovered gradients)."""
    tri = mesh.triangles[tri_mask]
    g = field.vertex_gradients[tri]
    d1 = g[:, 1] - g[:, 0]
    d2 = g[:, 2] - g[:, 0]
    return float(0.5 * np.sum(np.abs(cross2(d1, d2))))


def gradient_cloud_csv(field: ScalarField, tri_mask: np.ndarray) -> str:
    lines = ["gx,gy"]
    for gx, gy in field.tri_gradients[tri_mask]:
        lines.append(f"{gx:.15g},{gy:.15g}")
    return "\n".join(lines) + "\n"


@dataclass
class ChainReport:
    halfspace_cut_volume: float      # |W cut by the halfspace at sigma(p0)|
    gradient_image_estimate: float
    source_bound: float              # (c/2)^2 * contact area
    sigma_bound: float               # perim^2 / (4 * area)
    margins: tuple                   # relative margins of the three inequalities
    hessian_psd_fraction: float
    coverage: float
    contact_area: float
    contact_count: int
    c_value: float
    direction: np.ndarray
    tangential_junctions: bool
    rel_tol: float
    passed: bool

    def to_text(self) -> str:
        m1, m2, m3 = self.margins
        return "\n".join([
            f"w_cut={_fmt(self.halfspace_cut_volume)}",
            f"grad_image={_fmt(self.gradient_image_estimate)}",
            f"source_bound={_fmt(self.source_bound)}",
            f"sigma_bound={_fmt(self.sigma_bound)}",
            f"margin1={_fmt(m1)}",
            f"margin2={_fmt(m2)}",
            f"margin3={_fmt(m3)}",
            f"hessian_psd_fraction={_fmt(self.hessian_psd_fraction)}",
            f"coverage={_fmt(self.coverage)}",
            f"contact_area={_fmt(self.contact_area)}",
            f"contact_count={self.contact_count}",
            f"c={_fmt(self.c_value)}",
            f"v_x={_fmt(self.direction[0])}",
            f"v_y={_fmt(self.direction[1])}",
            f"tangential_junctions={'true' if self.tangential_junctions else 'false'}",
            f"pass={'true' if self.passed else 'false'}",
        ]) + "\n"


def abp_chain_report(body: ConvexBody, domain: ObstacleDomain, h: float,
                     epsilon: float | None = None, delta: float | None = None,
                     rel_tol: float = HESSIAN_PSD_SLACK,
                     mesh: TriMesh | None = None,
                     field: ScalarField | None = None,
                     contact: ContactSet | None = None) -> ChainReport:
    """Run the full pipeline on the domain and report the chain margins.

    Precomputed mesh/field/contact may be passed to reuse an existing solve.
    """
    if body.dimension != 2:
        raise ValidationError("chain verification is 2D")
    area, perim_sigma, _ = measures(domain, body)
    c = perim_sigma / area
    if mesh is None:
        mesh = mesh_domain(domain, h)
    if field is None:
        field = solve_neumann(mesh, body, c)
    if contact is None:
        contact = lower_contact_set(mesh, field, epsilon)

    p0 = gamma_argmin(mesh, field)
    v = sphere_normal(mesh, p0)

    q1 = volume(halfspace_cut(body, v))
    tri_mask = contact_triangle_mask(mesh, contact)
    q2 = gradient_image_area(mesh, field, tri_mask)
    contact_area = float(mesh.tri_areas()[tri_mask].sum())
    q3 = (c / 2.0) ** 2 * contact_area
    q4 = perim_sigma ** 2 / (4.0 * area)

    margins = ((q2 - q1) / q2 if q2 > 0 else -np.inf,
               (q3 - q2) / q3 if q3 > 0 else -np.inf,
               (q4 - q3) / q4)
    lam_min, lam_scale = fit_contact_hessians(mesh, field, tri_mask)
    if len(lam_min):
        psd_fraction = float(np.mean(
            lam_min >= -HESSIAN_PSD_SLACK * (1.0 + lam_scale)))
    else:
        psd_fraction = 0.0
    coverage = gradient_image_coverage(mesh, field, contact, body, v, delta)
    passed = bool(min(margins) >= -rel_tol)
    return ChainReport(q1, q2, q3, q4, margins, psd_fraction, coverage,
                       contact_area, len(contact), c, v,
                       domain.tangential_junctions, rel_tol, passed)
