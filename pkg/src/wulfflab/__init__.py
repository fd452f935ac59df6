"""Numerical laboratory for the anisotropic isoperimetric inequality outside a ball."""

from .bodies import (ConvexBody, UnitDirection, ball, centrally_symmetrized,
                     ellipse, gauge, halfspace_cut, load_body, polytope,
                     random_convex_polygon, regular_polygon, save_body, square,
                     support, volume)
from .chain import ChainReport, abp_chain_report
from .contact import (ContactSet, NormalConeQuery, gamma_argmin,
                      gradient_image_coverage, lower_contact_set,
                      minimizer_location, normal_cone_membership, sphere_normal)
from .domains import (ObstacleDomain, build_sharpness_domain, concentric_annulus,
                      load_domain, measures, random_domain, save_domain,
                      subtract_ball)
from .errors import NumericError, ResourceError, ValidationError
from .isoperimetry import (BetaResult, InequalityReport, Surface,
                           anisotropic_perimeter, beta, boundary_surface,
                           cut_fraction, inequality_report, sharpness_sweep)
from .meshing import Region, TriMesh, mesh_domain, save_mesh
from .neumann import ScalarField, solve_neumann

__all__ = [name for name in dir() if not name.startswith("_")]
