import math

import numpy as np
import pytest

import wulfflab as wl
from wulfflab.domains import measures
from wulfflab.errors import ValidationError
from wulfflab.meshing import mesh_domain
from wulfflab.neumann import ScalarField, lumped_mass, solve_neumann

from helpers import radial_solution, structured_square_mesh


def test_radial_closed_form_satisfies_boundary_conditions():
    R, r = 2.0, 1.0
    c = 2 * R / (R * R - r * r)
    _, du = radial_solution(c, r)
    assert du(r) == pytest.approx(0.0, abs=1e-14)
    assert du(R) == pytest.approx(1.0, abs=1e-14)


def test_radial_accuracy_and_convergence(annulus):
    body = wl.ball(1.0)
    area, perim, _ = measures(annulus, body)
    c = perim / area
    u_exact, _ = radial_solution(c, 1.0)
    errs = {}
    for h in (0.08, 0.04):
        mesh = mesh_domain(annulus, h)
        f = solve_neumann(mesh, body, c)
        s = np.linalg.norm(mesh.vertices - annulus.obstacle_center, axis=1)
        ue = u_exact(s)
        m = lumped_mass(mesh)
        ue -= (m @ ue) / m.sum()
        errs[h] = np.max(np.abs(f.values - ue)) / np.max(np.abs(ue))
    assert errs[0.04] < 1e-2
    assert errs[0.08] / errs[0.04] >= 3.0


def test_compatibility_mismatch_rejected(annulus):
    body = wl.ball(1.0)
    mesh = mesh_domain(annulus, 0.1)
    area, perim, _ = measures(annulus, body)
    with pytest.raises(ValidationError):
        solve_neumann(mesh, body, perim / area * 1.001)


def test_zero_data_gives_zero_field(annulus):
    mesh = mesh_domain(annulus, 0.1)
    f = solve_neumann(mesh, wl.ball(1.0), 0.0, flux="zero")
    assert np.max(np.abs(f.values)) == 0.0


def test_mean_zero_normalization(annulus_solve):
    _, mesh, field = annulus_solve
    scale = np.max(np.abs(field.values))
    assert abs(field.weighted_mean()) <= 1e-10 * scale


def test_solver_rejects_bad_flux_mode(annulus):
    mesh = mesh_domain(annulus, 0.1)
    with pytest.raises(ValidationError):
        solve_neumann(mesh, wl.ball(1.0), 1.0, flux="dirichlet")


def test_solver_needs_domain_provenance():
    mesh = structured_square_mesh(4)
    with pytest.raises(ValidationError):
        solve_neumann(mesh, wl.square(), 1.0)


def test_gradients_exact_for_affine_field():
    mesh = structured_square_mesh(6)
    vals = 2.0 * mesh.vertices[:, 0] - 0.5 * mesh.vertices[:, 1]
    f = ScalarField.from_vertex_values(mesh, vals)
    assert np.allclose(f.tri_gradients, [2.0, -0.5], atol=1e-12)
    assert np.allclose(f.vertex_gradients, [2.0, -0.5], atol=1e-12)


def test_lumped_mass_total_is_area(annulus_solve):
    _, mesh, _ = annulus_solve
    assert lumped_mass(mesh).sum() == pytest.approx(mesh.total_area, rel=1e-12)


def test_radial_solution_is_radially_increasing(annulus_solve):
    _, mesh, field = annulus_solve
    s = np.linalg.norm(mesh.vertices, axis=1)
    inner = field.values[s < 1.2]
    outer = field.values[s > 1.8]
    assert inner.max() < outer.min()
