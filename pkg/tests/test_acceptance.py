"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run with `pytest tests/test_acceptance.py -v -s` to see the per-criterion
lines and timings. Tolerances are fixed here, not configurable.
"""

import math
import time

import numpy as np
import pytest

import wulfflab as wl
from wulfflab.contact import (NormalConeQuery, gamma_argmin, gamma_vertices,
                              gradient_image_coverage, lower_contact_set,
                              minimizer_location, normal_cone_membership,
                              sphere_normal)
from wulfflab.domains import measures
from wulfflab.meshing import Region, mesh_domain
from wulfflab.neumann import lumped_mass, solve_neumann

from helpers import PolarCutArea, radial_solution

_cache = {}


def bitten_setup(h):
    """Mesh + field + contact set on the square-minus-ball domain, cached."""
    if h not in _cache:
        body = wl.square()
        domain = wl.build_sharpness_domain(body, (0.0, 1.0), 2.0)
        area, perim, _ = measures(domain, body)
        mesh = mesh_domain(domain, h)
        field = solve_neumann(mesh, body, perim / area)
        contact = lower_contact_set(mesh, field)
        _cache[h] = (body, domain, mesh, field, contact)
    return _cache[h]


def report(num, ok, budget, elapsed, detail):
    line = (f"ACCEPTANCE {num}: {'PASS' if ok else 'FAIL'} "
            f"[{elapsed:.1f}s of {budget:.0f}s] {detail}")
    print(line)
    assert ok, line
    assert elapsed < budget, line


def test_criterion_1_wulff_identity():
    t0 = time.time()
    rng = np.random.default_rng(101)
    worst = 0.0
    for seed in range(20):
        n = int(rng.integers(8, 41))
        W = wl.random_convex_polygon(1000 + seed, n)
        p = wl.anisotropic_perimeter(W, wl.boundary_surface(W))
        nv = 2 * wl.volume(W)
        worst = max(worst, abs(p - nv) / nv)
    report(1, worst < 1e-9, 1.0, time.time() - t0,
           f"identity residual over 20 polygons: max {worst:.2e} < 1e-9")


def test_criterion_2_beta_properties():
    t0 = time.time()
    named = [wl.square(), wl.regular_polygon(6), wl.ball(1.0),
             wl.centrally_symmetrized(wl.random_convex_polygon(7, 11))]
    sym_dev = max(abs(wl.beta(b).value - 0.5) for b in named)
    ok = sym_dev < 1e-6
    worst_gap = 0.0
    for seed in range(20):
        W = wl.random_convex_polygon(2000 + seed, 6 + seed)
        b = wl.beta(W, 2 * math.pi / 8192)
        ok &= 0.0 < b.value <= 0.5 + 1e-12
        brute, _ = PolarCutArea(W.vertices).brute_beta(1_000_000)
        worst_gap = max(worst_gap, abs(b.value - brute))
    ok &= worst_gap < 1e-6
    report(2, ok, 30.0, time.time() - t0,
           f"symmetric dev {sym_dev:.1e}; brute-scan gap {worst_gap:.1e} < 1e-6")


def test_criterion_3_inequality_suite():
    t0 = time.time()
    margins = []
    ok = True
    for seed in range(100):
        if seed % 3 == 0:
            W = wl.square()
        elif seed % 3 == 1:
            W = wl.regular_polygon(6)
        else:
            W = wl.random_convex_polygon(seed, 8 + seed % 25)
        dom = wl.random_domain(seed, 1.0, 3 + seed % 9)
        rep = wl.inequality_report(W, dom)
        margins.append(rep.margin)
        ok &= rep.passed
    min_margin = min(margins)
    report(3, ok and min_margin > 0, 120.0, time.time() - t0,
           f"100/100 domains pass; min margin {min_margin:.6g} > 0")


def test_criterion_4_sharpness():
    t0 = time.time()
    table = wl.sharpness_sweep(wl.square(), (0.0, 1.0), [10.0, 100.0, 1000.0])
    r = table.ratios()
    decreasing = bool(np.all(np.diff(r) < 0))
    tail = r[-1] - 1.0
    head = r[0] - 1.0
    ok = decreasing and tail < 0.01 and tail < head / 10.0
    report(4, ok, 10.0, time.time() - t0,
           f"ratios {r.round(6).tolist()} decreasing; "
           f"tail excess {tail:.2e} < 0.01 and < head/10 = {head / 10:.2e}")


def test_criterion_5_pde_correctness():
    t0 = time.time()
    body = wl.ball(1.0)
    annulus = wl.concentric_annulus(2.0, 1.0)
    area, perim, _ = measures(annulus, body)
    c = perim / area
    residual = abs(c * area - perim) / (c * area)
    u_exact, _ = radial_solution(c, 1.0)
    errs = {}
    for h in (0.04, 0.02):
        mesh = mesh_domain(annulus, h)
        f = solve_neumann(mesh, body, c)
        s = np.linalg.norm(mesh.vertices - annulus.obstacle_center, axis=1)
        ue = u_exact(s)
        m = lumped_mass(mesh)
        ue -= (m @ ue) / m.sum()
        errs[h] = float(np.max(np.abs(f.values - ue)) / np.max(np.abs(ue)))
    factor = errs[0.04] / errs[0.02]
    ok = errs[0.04] < 1e-2 and factor >= 3.0 and residual < 1e-10
    report(5, ok, 60.0, time.time() - t0,
           f"Linf {errs[0.04]:.2e} < 1e-2; halving factor {factor:.2f} >= 3; "
           f"compatibility residual {residual:.1e} < 1e-10")


def test_criterion_6_gradient_image_coverage():
    t0 = time.time()
    covs = {}
    for h in (0.02, 0.01):
        body, domain, mesh, field, contact = bitten_setup(h)
        v = sphere_normal(mesh, gamma_argmin(mesh, field))
        covs[h] = gradient_image_coverage(mesh, field, contact, body, v,
                                          delta=5 * h)
    ok = covs[0.02] >= 0.95 and covs[0.01] >= covs[0.02] - 0.02
    report(6, ok, 180.0, time.time() - t0,
           f"coverage {covs[0.02]:.4f} >= 0.95 at h=0.02; "
           f"{covs[0.01]:.4f} at h=0.01 (nondecreasing within 0.02)")


def test_criterion_7_restricted_cone_suite():
    t0 = time.time()
    body, domain, mesh, field, contact = bitten_setup(0.02)
    p0 = gamma_argmin(mesh, field)
    v0 = sphere_normal(mesh, p0)
    gam = gamma_vertices(mesh)
    rng = np.random.default_rng(77)
    interior_ok = cone_ok = tried = 0
    while tried < 100:
        v = rng.uniform(-0.95, 0.95, size=2)
        if wl.gauge(body, v) > 0.95 or v @ v0 < 0.05:
            continue
        tried += 1
        loc = minimizer_location(mesh, field, body, v)
        interior_ok += loc.region == Region.INTERIOR
        vals = field.values[gam] - mesh.vertices[gam] @ v
        p = int(gam[np.argmin(vals)])
        q = NormalConeQuery(mesh.vertices[p], v, +1)
        cone_ok += normal_cone_membership(mesh, field, q)
    ok = interior_ok == 100 and cone_ok == 100
    report(7, ok, 120.0, time.time() - t0,
           f"minimizer interior {interior_ok}/100; cone membership {cone_ok}/100")


def test_criterion_8_chain_monotonicity():
    t0 = time.time()
    body, domain, mesh, field, contact = bitten_setup(0.02)
    rep = wl.abp_chain_report(body, domain, 0.02,
                              mesh=mesh, field=field, contact=contact)
    ok = rep.passed and min(rep.margins) >= -0.05
    report(8, ok, 60.0, time.time() - t0,
           f"chain {rep.halfspace_cut_volume:.4f} <= "
           f"{rep.gradient_image_estimate:.4f} <= {rep.source_bound:.4f} <= "
           f"{rep.sigma_bound:.4f}; min margin {min(rep.margins):+.4f} >= -0.05")
