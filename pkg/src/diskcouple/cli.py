"""Command-line front end: ``diskcouple {modes,evaluate,sweep,optimize}``.

Exit codes: 0 success, 2 config error, 3 mode-solver failure, 4 invalid or
infeasible design.
"""

from __future__ import annotations

import argparse
import csv
import datetime as dt
import hashlib
import json
import logging
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, replace
from pathlib import Path

import numpy as np

from . import __version__
from .config import ConfigError, RunConfig, load_config
from .efficiency import cone_fraction, total_efficiency
from .farfield import AngularGrid, DesignInvalid, GratingDesign, GratingRing, far_field_sum, polarizability_from_hole
from .modes import NoGuidedMode, enumerate_resonant_designs, resonant_mode
from .optimize import (REFERENCE_VECTOR, DesignContext, build_design, optimize_over_P, parameter_sweep)

log = logging.getLogger("diskcouple")

EXIT_CONFIG, EXIT_MODE, EXIT_DESIGN = 2, 3, 4
NA_SAMPLES = np.arange(1, 101) / 100


def fmt(x) -> str:
    return f"{float(x):.12g}"


def write_csv(path: Path, header, rows):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([v if isinstance(v, (int, np.integer)) else fmt(v) for v in row])


def _json_safe(obj):
    if isinstance(obj, float) and not math.isfinite(obj):
        return None
    if isinstance(obj, dict):
        return {k: _json_safe(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_json_safe(v) for v in obj]
    return obj


def write_json(path: Path, obj):
    path.write_text(json.dumps(_json_safe(obj), indent=2, sort_keys=True) + "\n")


def sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def write_manifest(out: Path, command: str, cfg: RunConfig, derived: dict, files: list[str]):
    manifest = {
        "command": command,
        "tool_version": __version__,
        "timestamp": dt.datetime.now(dt.timezone.utc).isoformat(),
        "config": {**cfg.raw, "run.seed": cfg.seed, "run.na": cfg.na,
                   "run.grid": f"{cfg.grid.n_theta}x{cfg.grid.n_psi}"},
        "derived": derived,
        "files": {name: sha256(out / name) for name in files},
    }
    write_json(out / "manifest.json", manifest)


def validate_manifest(out) -> list[str]:
    """Problems found in ``out/manifest.json``; empty when every checksum matches."""
    out = Path(out)
    manifest = json.loads((out / "manifest.json").read_text())
    problems = []
    for name, digest in manifest["files"].items():
        path = out / name
        if not path.exists():
            problems.append(f"missing {name}")
        elif sha256(path) != digest:
            problems.append(f"checksum mismatch {name}")
    return problems


def _context(cfg: RunConfig) -> DesignContext:
    return DesignContext(lambda_target=cfg.emitter.lambda_zpl, n_disk=cfg.n_disk, n_clad=cfg.n_clad,
                         polarization=cfg.polarization, emitter=cfg.emitter, Q_intrinsic=cfg.q_intrinsic,
                         na=cfg.na, grid=cfg.grid, L=cfg.L)


def _single_P(cfg: RunConfig) -> int:
    Ps = cfg.P_values()
    if len(Ps) != 1:
        raise ConfigError("this command needs a single 'mode.P'")
    return Ps[0]


def _mode_and_design(cfg: RunConfig):
    ctx = _context(cfg)
    P = _single_P(cfg)
    u = ctx.unit
    if cfg.design is not None:
        resonant_mode(P, ctx.lambda_target, cfg.design.h * u, cfg.n_disk, cfg.n_clad, cfg.polarization)
        return build_design(cfg.design, P, ctx)
    if cfg.h is None:
        raise ConfigError("evaluate needs a design vector ('design.*') or explicit geometry ('disk.h')")
    mode = resonant_mode(P, ctx.lambda_target, cfg.h * u, cfg.n_disk, cfg.n_clad, cfg.polarization)
    rings = []
    for spec in cfg.rings:
        if spec.t > cfg.h:
            raise DesignInvalid("etch depth exceeds disk thickness")
        G = spec.G if spec.G is not None else P - cfg.L
        A = polarizability_from_hole(spec.r * u, spec.t * u, cfg.n_disk)
        rings.append(GratingRing(G=G, r_s=spec.s * u, A=A, z_s=(cfg.h - spec.t) * u / 2, phi_0=spec.phi0))
    design = GratingDesign(tuple(rings))
    design.validate(mode)
    return mode, design


def _derived(mode, design) -> dict:
    return {"P": mode.P, "R_m": mode.geometry.R, "h_m": mode.geometry.h, "n_eff": mode.n_eff,
            "n_slab": mode.n_slab, "r_peak_m": mode.r_peak, "L_per_ring": design.L(mode.P)}


def _out_dir(args, cfg: RunConfig) -> Path:
    out = Path(args.out or cfg.out or ".")
    out.mkdir(parents=True, exist_ok=True)
    return out


def cmd_modes(cfg: RunConfig, out: Path) -> int:
    Ps = cfg.P_values()
    u = cfg.emitter.lambda_zpl / cfg.n_disk
    rows = enumerate_resonant_designs(cfg.emitter.lambda_zpl, Ps[0], Ps[-1], cfg.thickness * u,
                                      cfg.n_disk, cfg.n_clad, cfg.polarization)
    print(f"{'P':>4} {'R (nm)':>12} {'R/lambda_p':>11} {'n_eff':>10}")
    for r in rows:
        print(f"{r.P:>4} {r.R * 1e9:>12.3f} {r.R / u:>11.4f} {r.n_eff:>10.6f}")
    write_csv(out / "modes.csv", ["P", "R_m", "n_eff"], [(r.P, r.R, r.n_eff) for r in rows])
    write_manifest(out, "modes", cfg, {"lambda_prime_m": u}, ["modes.csv"])
    return 0


def cmd_evaluate(cfg: RunConfig, out: Path) -> int:
    mode, design = _mode_and_design(cfg)
    files = ["report.json"]
    if design.is_bare:
        report = total_efficiency(mode, design, cfg.emitter, cfg.q_intrinsic, cfg.na, cfg.grid)
        write_json(out / "report.json", asdict(report))
    else:
        ff = far_field_sum(mode, design, cfg.grid)
        report = total_efficiency(mode, design, cfg.emitter, cfg.q_intrinsic, cfg.na, ff=ff)
        write_json(out / "report.json", asdict(report))
        th, ps = np.meshgrid(ff.theta_grid, ff.psi_grid, indexing="ij")
        write_csv(out / "farfield.csv", ["theta_rad", "psi_rad", "intensity"],
                  zip(th.ravel(), ps.ravel(), ff.intensity.ravel()))
        curve = [(na, report.grating_fraction * cone_fraction(ff, math.asin(na))) for na in NA_SAMPLES]
        write_csv(out / "eta2_vs_na.csv", ["na", "eta2"], curve)
        files += ["farfield.csv", "eta2_vs_na.csv"]
    write_manifest(out, "evaluate", cfg, _derived(mode, design), files)
    log.info("eta=%.4f eta1=%.4f eta2=%.4f F=%.1f", report.eta, report.eta1, report.eta2_at_na, report.F)
    print(json.dumps(_json_safe(asdict(report)), indent=2))
    return 0


def _parse_range(text: str):
    try:
        start, stop, num = text.split(":")
        return float(start), float(stop), int(num)
    except ValueError:
        raise ConfigError(f"--range expects start:stop:num, got {text!r}") from None


def cmd_sweep(cfg: RunConfig, out: Path, param=None, span=None) -> int:
    param = param or cfg.sweep_param
    span = span or cfg.sweep_range
    if param is None or span is None:
        raise ConfigError("sweep needs a parameter and range ('sweep.*' keys or --param/--range)")
    if cfg.design is None:
        raise ConfigError("sweep needs a design vector ('design.*')")
    start, stop, num = span
    if num < 1:
        raise ConfigError("sweep needs at least one sample")
    P = _single_P(cfg)
    ctx = _context(cfg)
    resonant_mode(P, ctx.lambda_target, cfg.design.h * ctx.unit, cfg.n_disk, cfg.n_clad, cfg.polarization)
    try:
        rows = parameter_sweep(cfg.design, param, np.linspace(start, stop, num), P, ctx)
    except ValueError as exc:
        if isinstance(exc, DesignInvalid):
            raise
        raise ConfigError(str(exc)) from exc
    if all(math.isnan(r[3]) for r in rows):
        raise DesignInvalid(f"every sample of {param} is infeasible")
    write_csv(out / "sweep.csv", ["value", "eta1", "eta2", "eta"], rows)
    write_manifest(out, "sweep", cfg, {"P": P, "param": param}, ["sweep.csv"])
    return 0


def cmd_optimize(cfg: RunConfig, out: Path, workers: int = 1) -> int:
    ctx = _context(cfg)
    Ps = cfg.P_values()
    for P in Ps:
        resonant_mode(P, ctx.lambda_target, 0.8 * ctx.unit, cfg.n_disk, cfg.n_clad, cfg.polarization)
    seed_vector = cfg.design or REFERENCE_VECTOR
    if workers > 1:
        with ProcessPoolExecutor(workers) as pool:
            results, best_P = optimize_over_P(Ps, None, cfg.pso, ctx, [seed_vector],
                                              map_fn=lambda f, xs: pool.map(f, xs, chunksize=4))
    else:
        results, best_P = optimize_over_P(Ps, None, cfg.pso, ctx, [seed_vector])
    files = []
    for res in results:
        name = f"trace_P{res.P}.csv"
        write_csv(out / name, ["iteration", "best_eta"], enumerate(res.trace))
        files.append(name)
    write_csv(out / "per_P.csv", ["P", "best_eta"], [(r.P, r.best_eta) for r in results])
    best = next(r for r in results if r.P == best_P)
    write_json(out / "best.json", {"P": best.P, "eta": best.best_eta, "vector": asdict(best.best_vector),
                                   "evaluations": best.evaluations})
    files += ["per_P.csv", "best.json"]
    mode, design = build_design(best.best_vector, best.P, ctx)
    write_manifest(out, "optimize", cfg, _derived(mode, design), files)
    print(f"best P={best.P} eta={best.best_eta:.6f}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="diskcouple", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in ("modes", "evaluate", "sweep", "optimize"):
        p = sub.add_parser(name)
        p.add_argument("--config", required=True, help="run configuration file")
        p.add_argument("--out", help="output directory (default: run.out or .)")
        p.add_argument("--seed", type=int, help="PSO seed (u64)")
        p.add_argument("--na", type=float, help="collection numerical aperture")
        p.add_argument("--grid", help="angular grid as <theta_n>x<psi_n>")
        if name == "sweep":
            p.add_argument("--param", help="design component to sweep")
            p.add_argument("--range", dest="span", help="start:stop:num")
        if name == "optimize":
            p.add_argument("--workers", type=int, default=1)
    return parser


def _apply_overrides(cfg: RunConfig, args) -> RunConfig:
    if args.seed is not None:
        if not 0 <= args.seed < 2**64:
            raise ConfigError("--seed must be an unsigned 64-bit integer")
        cfg = replace(cfg, seed=args.seed, pso=replace(cfg.pso, seed=args.seed))
    if args.na is not None:
        if not 0 < args.na <= 1:
            raise ConfigError("--na must lie in (0, 1]")
        cfg = replace(cfg, na=args.na)
    if args.grid is not None:
        try:
            cfg = replace(cfg, grid=AngularGrid.parse(args.grid))
        except ValueError:
            raise ConfigError(f"--grid expects <theta_n>x<psi_n>, got {args.grid!r}") from None
    return cfg


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = _apply_overrides(load_config(args.config), args)
        out = _out_dir(args, cfg)
        if args.command == "modes":
            return cmd_modes(cfg, out)
        if args.command == "evaluate":
            return cmd_evaluate(cfg, out)
        if args.command == "sweep":
            span = _parse_range(args.span) if args.span else None
            return cmd_sweep(cfg, out, args.param, span)
        return cmd_optimize(cfg, out, args.workers)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NoGuidedMode as exc:
        print(f"mode solver failed: {exc}", file=sys.stderr)
        return EXIT_MODE
    except DesignInvalid as exc:
        print(f"invalid design: {exc}", file=sys.stderr)
        return EXIT_DESIGN


if __name__ == "__main__":
    sys.exit(main())
