import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

import wulfflab as wl
from wulfflab.domains import measures
from wulfflab.meshing import mesh_domain
from wulfflab.neumann import solve_neumann


@pytest.fixture(scope="session")
def square():
    return wl.square()


@pytest.fixture(scope="session")
def skew_triangle():
    return wl.polytope([[-1, -1], [3, -1], [-1, 3]])


@pytest.fixture(scope="session")
def annulus():
    return wl.concentric_annulus(2.0, 1.0)


@pytest.fixture(scope="session")
def annulus_solve(annulus):
    """Annulus mesh + field at h = 0.04 (R/50), shared across modules."""
    body = wl.ball(1.0)
    area, perim, _ = measures(annulus, body)
    mesh = mesh_domain(annulus, 0.04)
    field = solve_neumann(mesh, body, perim / area)
    return body, mesh, field


@pytest.fixture(scope="session")
def bitten_square():
    """Square minus the radius-2 ball tangent to its horizontal midline at 0."""
    return wl.build_sharpness_domain(wl.square(), (0.0, 1.0), 2.0)


@pytest.fixture(scope="session")
def bitten_square_solve(bitten_square, square):
    """Coarse (h = 0.04) solve on the bitten square for module-level tests."""
    area, perim, _ = measures(bitten_square, square)
    mesh = mesh_domain(bitten_square, 0.04)
    field = solve_neumann(mesh, square, perim / area)
    return square, mesh, field
