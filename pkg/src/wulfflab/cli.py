"""Command-line front-end: every pipeline as a reproducible, scriptable run.

Exit codes: 0 all checks passed, 1 a mathematical check failed, 2 input or
validation error, 3 numeric/resource error. Data goes to stdout (fixed 15
significant digits, no timestamps); progress and diagnostics go to stderr.
"""

from __future__ import annotations

import argparse
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import bodies
from .bodies import load_body, volume
from .chain import abp_chain_report, gradient_cloud_csv
from .contact import contact_triangle_mask, lower_contact_set
from .domains import load_domain, random_domain
from .errors import NumericError, ValidationError
from .isoperimetry import (anisotropic_perimeter, beta, boundary_surface,
                           inequality_report, sharpness_sweep)

IDENTITY_TOL = 1e-9


@dataclass
class RunConfig:
    command: str
    body_path: str | None = None
    domain_path: str | None = None
    h: float = 0.05
    epsilon: float | None = None
    delta: float | None = None
    angres: float = 2 * math.pi / 4096
    radii: list = field(default_factory=list)
    seeds: int = 20
    out: str | None = None

    def validate(self):
        for name in ("h", "angres"):
            if getattr(self, name) <= 0:
                raise ValidationError(f"option {name} must be positive")
        for name in ("epsilon", "delta"):
            val = getattr(self, name)
            if val is not None and val <= 0:
                raise ValidationError(f"option {name} must be positive")
        if self.seeds <= 0:
            raise ValidationError("seed count must be positive")
        if self.out is not None:
            Path(self.out).mkdir(parents=True, exist_ok=True)


def _fmt(x) -> str:
    return f"{x:.15g}"


def _progress(msg: str):
    print(msg, file=sys.stderr, flush=True)


def _write(cfg: RunConfig, name: str, text: str):
    if cfg.out is not None:
        (Path(cfg.out) / name).write_text(text, encoding="ascii")


def _require(cfg: RunConfig, attr: str):
    if getattr(cfg, attr) is None:
        raise ValidationError(f"command {cfg.command!r} needs --{attr.replace('_path', '')}")


def cmd_body(cfg: RunConfig) -> int:
    _require(cfg, "body_path")
    w = load_body(cfg.body_path)
    vol = volume(w)
    perim = anisotropic_perimeter(w, boundary_surface(w))
    n_vol = w.dimension * vol
    residual = abs(perim - n_vol) / n_vol
    print(f"volume={_fmt(vol)} P={_fmt(perim)} nV={_fmt(n_vol)} residual={_fmt(residual)}")
    return 0 if residual < IDENTITY_TOL else 1


def cmd_beta(cfg: RunConfig) -> int:
    _require(cfg, "body_path")
    w = load_body(cfg.body_path)
    b = beta(w, cfg.angres)
    d = b.direction.components
    ds = " ".join(f"v_{'xyz'[i]}={_fmt(d[i])}" for i in range(len(d)))
    print(f"beta={_fmt(b.value)} {ds} approximate={'true' if b.approximate else 'false'}")
    return 0 if 0 < b.value <= 0.5 + 1e-9 else 1


def cmd_check(cfg: RunConfig) -> int:
    _require(cfg, "body_path")
    _require(cfg, "domain_path")
    w = load_body(cfg.body_path)
    dom = load_domain(cfg.domain_path)
    rep = inequality_report(w, dom, cfg.angres)
    text = rep.to_text() + \
        f"tangential_junctions={'true' if dom.tangential_junctions else 'false'}\n"
    print(text, end="")
    _write(cfg, "check_report.txt", text)
    return 0 if rep.passed else 1


def cmd_sharpness(cfg: RunConfig) -> int:
    _require(cfg, "body_path")
    if not cfg.radii:
        raise ValidationError("sharpness needs --radii r1,r2,...")
    w = load_body(cfg.body_path)
    b = beta(w, cfg.angres)
    table = sharpness_sweep(w, b.direction, cfg.radii, cfg.angres)
    csv = table.to_csv()
    print(csv, end="")
    _write(cfg, "sharpness.csv", csv)
    return 0 if np.all(table.ratios() > 1.0) else 1


def cmd_abp(cfg: RunConfig) -> int:
    _require(cfg, "body_path")
    _require(cfg, "domain_path")
    w = load_body(cfg.body_path)
    dom = load_domain(cfg.domain_path)
    _progress(f"meshing and solving at h={cfg.h:g} ...")
    report = abp_chain_report(w, dom, cfg.h, epsilon=cfg.epsilon, delta=cfg.delta)
    print(report.to_text(), end="")
    if cfg.out is not None:
        from .meshing import mesh_domain
        from .neumann import solve_neumann
        from .domains import measures

        mesh = mesh_domain(dom, cfg.h)
        area, perim, _ = measures(dom, w)
        fld = solve_neumann(mesh, w, perim / area)
        contact = lower_contact_set(mesh, fld, cfg.epsilon)
        _write(cfg, "contact.csv", contact.to_csv())
        _write(cfg, "gradient_image.csv",
               gradient_cloud_csv(fld, contact_triangle_mask(mesh, contact)))
    return 0 if report.passed else 1


def cmd_random_suite(cfg: RunConfig) -> int:
    fixed = load_body(cfg.body_path) if cfg.body_path else None
    margins = []
    all_pass = True
    for seed in range(cfg.seeds):
        if fixed is not None:
            w = fixed
        elif seed % 3 == 0:
            w = bodies.square()
        elif seed % 3 == 1:
            w = bodies.regular_polygon(6)
        else:
            w = bodies.random_convex_polygon(seed, 8 + seed % 25)
        dom = random_domain(seed, r=1.0, complexity=8)
        rep = inequality_report(w, dom, cfg.angres)
        margins.append(rep.margin)
        all_pass &= rep.passed
        print(f"seed={seed} margin={_fmt(rep.margin)} "
              f"pass={'true' if rep.passed else 'false'}")
        _write(cfg, f"report_seed{seed}.txt", rep.to_text())
        if (seed + 1) % 10 == 0:
            _progress(f"{seed + 1}/{cfg.seeds} domains checked")
    print(f"min_margin={_fmt(min(margins))} all_pass={'true' if all_pass else 'false'}")
    return 0 if all_pass else 1


_COMMANDS = {
    "body": cmd_body,
    "beta": cmd_beta,
    "check": cmd_check,
    "sharpness": cmd_sharpness,
    "abp": cmd_abp,
    "random-suite": cmd_random_suite,
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="wulfflab",
        description="verification runs for the anisotropic isoperimetric "
                    "inequality outside a ball")
    p.add_argument("command", choices=sorted(_COMMANDS))
    p.add_argument("--body", dest="body_path", metavar="FILE")
    p.add_argument("--domain", dest="domain_path", metavar="FILE")
    p.add_argument("--h", type=float, default=0.05)
    p.add_argument("--epsilon", type=float, default=None)
    p.add_argument("--delta", type=float, default=None)
    p.add_argument("--angres", type=float, default=2 * math.pi / 4096)
    p.add_argument("--radii", type=str, default="",
                   help="comma-separated increasing radii for the sharpness sweep")
    p.add_argument("--seeds", type=int, default=20)
    p.add_argument("--out", type=str, default=None, metavar="DIR")
    return p


def parse_config(argv) -> RunConfig:
    ns = build_parser().parse_args(argv)
    try:
        radii = [float(t) for t in ns.radii.split(",") if t.strip()]
    except ValueError as exc:
        raise ValidationError(f"malformed radii list {ns.radii!r}") from exc
    cfg = RunConfig(command=ns.command, body_path=ns.body_path,
                    domain_path=ns.domain_path, h=ns.h, epsilon=ns.epsilon,
                    delta=ns.delta, angres=ns.angres, radii=radii,
                    seeds=ns.seeds, out=ns.out)
    cfg.validate()
    return cfg


def main(argv=None) -> int:
    try:
        cfg = parse_config(argv)
        return _COMMANDS[cfg.command](cfg)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except NumericError as exc:
        print(f"numeric error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
