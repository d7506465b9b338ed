"""Run configuration: a flat file of dotted ``key = value`` lines (TOML syntax).

Geometry keys are in units of ``lambda' = lambda / n_disk``, wavelengths in nm.
"""

from __future__ import annotations

import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .efficiency import EmitterSpectrum
from .farfield import AngularGrid
from .modes import N_DIAMOND, Polarization
from .optimize import DesignVector, PsoConfig


class ConfigError(ValueError):
    pass


_RING_KEYS = {"G": int, "s": float, "r": float, "t": float, "phi0": float}

KEYS: dict[str, type] = {
    "emitter.preset": str,
    "emitter.beta": float,
    "emitter.lambda_zpl_nm": float,
    "emitter.zpl_fraction": float,
    "disk.n": float,
    "disk.n_clad": float,
    "disk.h": float,
    "mode.P": int,
    "mode.P_min": int,
    "mode.P_max": int,
    "mode.polarization": str,
    "mode.L": int,
    **{f"design.{name}": float for name in DesignVector.names()},
    **{f"grating.{ring}.{key}": typ for ring in ("outer", "inner") for key, typ in _RING_KEYS.items()},
    "run.q_intrinsic": float,
    "run.na": float,
    "run.grid": str,
    "run.seed": int,
    "run.out": str,
    "pso.swarm_size": int,
    "pso.iterations": int,
    "pso.w": float,
    "pso.c1": float,
    "pso.c2": float,
    "sweep.param": str,
    "sweep.start": float,
    "sweep.stop": float,
    "sweep.num": int,
}


def _flatten(tree, prefix=""):
    for key, value in tree.items():
        name = f"{prefix}{key}"
        if isinstance(value, dict):
            yield from _flatten(value, name + ".")
        else:
            yield name, value


def _coerce(key, value):
    typ = KEYS[key]
    if typ is float and isinstance(value, (int, float)) and not isinstance(value, bool):
        return float(value)
    if typ is int and isinstance(value, int) and not isinstance(value, bool):
        return value
    if typ is str and isinstance(value, str):
        return value
    raise ConfigError(f"key {key!r}: expected {typ.__name__}, got {value!r}")


@dataclass(frozen=True)
class RingSpec:
    G: int | None
    s: float
    r: float
    t: float
    phi0: float = 0.0


@dataclass(frozen=True)
class RunConfig:
    emitter: EmitterSpectrum
    n_disk: float = N_DIAMOND
    n_clad: float = 1.0
    polarization: Polarization = Polarization.TE_RADIAL
    P: int | None = None
    P_min: int | None = None
    P_max: int | None = None
    L: int = 1
    h: float | None = None  # explicit geometry thickness
    rings: tuple[RingSpec, ...] = ()
    design: DesignVector | None = None
    q_intrinsic: float = 1e6
    na: float = 0.6
    grid: AngularGrid = field(default_factory=AngularGrid)
    seed: int = 0
    out: str | None = None
    pso: PsoConfig = field(default_factory=PsoConfig)
    sweep_param: str | None = None
    sweep_range: tuple[float, float, int] | None = None
    raw: dict[str, Any] = field(default_factory=dict)

    @property
    def explicit_geometry(self) -> bool:
        return self.h is not None or bool(self.rings)

    @property
    def thickness(self) -> float:
        """Disk thickness in ``lambda'`` from whichever geometry source is present."""
        if self.design is not None:
            return self.design.h
        if self.h is not None:
            return self.h
        raise ConfigError("no disk thickness: set 'design.h' or 'disk.h'")

    def P_values(self) -> list[int]:
        if self.P_min is not None or self.P_max is not None:
            if self.P_min is None or self.P_max is None:
                raise ConfigError("'mode.P_min' and 'mode.P_max' must be given together")
            if self.P_min > self.P_max:
                raise ConfigError("'mode.P_min' exceeds 'mode.P_max'")
            return list(range(self.P_min, self.P_max + 1))
        if self.P is not None:
            return [self.P]
        raise ConfigError("no resonant order: set 'mode.P' or 'mode.P_min'/'mode.P_max'")


def parse_config(text: str) -> RunConfig:
    try:
        tree = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"config syntax error: {exc}") from exc
    flat = {}
    for key, value in _flatten(tree):
        if key not in KEYS:
            raise ConfigError(f"unknown config key {key!r}")
        flat[key] = _coerce(key, value)
    return build_config(flat)


def load_config(path) -> RunConfig:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    return parse_config(text)


def _emitter(flat) -> EmitterSpectrum:
    preset = flat.get("emitter.preset", "NV").upper()
    if preset == "NV":
        em = EmitterSpectrum.nv()
    elif preset == "SIV":
        em = EmitterSpectrum.siv(flat.get("emitter.zpl_fraction", 0.7))
    elif preset == "CUSTOM":
        if "emitter.beta" not in flat and "emitter.zpl_fraction" not in flat:
            raise ConfigError("custom emitter needs 'emitter.beta' or 'emitter.zpl_fraction'")
        em = EmitterSpectrum.nv()
        if "emitter.zpl_fraction" in flat:
            em = EmitterSpectrum.from_zpl_fraction(flat["emitter.zpl_fraction"], em.lambda_zpl)
    else:
        raise ConfigError(f"key 'emitter.preset': unknown preset {preset!r}")
    beta = flat.get("emitter.beta", em.beta)
    lam = flat.get("emitter.lambda_zpl_nm", em.lambda_zpl * 1e9) * 1e-9
    try:
        return EmitterSpectrum(beta=beta, lambda_zpl=lam)
    except ValueError as exc:
        raise ConfigError(f"emitter: {exc}") from exc


def build_config(flat: dict[str, Any]) -> RunConfig:
    design_keys = [k for k in flat if k.startswith("design.")]
    geometry_keys = [k for k in flat if k.startswith("grating.") or k == "disk.h"]
    if design_keys and geometry_keys:
        raise ConfigError(f"both design vector and explicit geometry given ({design_keys[0]!r}, {geometry_keys[0]!r})")

    design = None
    if design_keys:
        missing = [n for n in DesignVector.names() if f"design.{n}" not in flat]
        if missing:
            raise ConfigError(f"design vector incomplete: missing 'design.{missing[0]}'")
        design = DesignVector(**{n: flat[f"design.{n}"] for n in DesignVector.names()})

    rings = []
    for name in ("outer", "inner"):
        keys = {k.rsplit(".", 1)[1]: v for k, v in flat.items() if k.startswith(f"grating.{name}.")}
        if not keys:
            continue
        for req in ("s", "r", "t"):
            if req not in keys:
                raise ConfigError(f"missing 'grating.{name}.{req}'")
        rings.append(RingSpec(G=keys.get("G"), s=keys["s"], r=keys["r"], t=keys["t"], phi0=keys.get("phi0", 0.0)))
    if rings and "disk.h" not in flat:
        raise ConfigError("explicit grating needs 'disk.h'")

    try:
        pol = Polarization(flat.get("mode.polarization", "TE_RADIAL").upper())
    except ValueError:
        raise ConfigError(f"key 'mode.polarization': unknown value {flat['mode.polarization']!r}") from None

    na = flat.get("run.na", 0.6)
    if not 0 < na <= 1:
        raise ConfigError(f"key 'run.na': NA must lie in (0, 1], got {na}")
    try:
        grid = AngularGrid.parse(flat["run.grid"]) if "run.grid" in flat else AngularGrid()
    except ValueError:
        raise ConfigError(f"key 'run.grid': expected '<theta_n>x<psi_n>', got {flat['run.grid']!r}") from None

    seed = flat.get("run.seed", 0)
    try:
        pso = PsoConfig(swarm_size=flat.get("pso.swarm_size", 40), iterations=flat.get("pso.iterations", 200),
                        w=flat.get("pso.w", 0.7), c1=flat.get("pso.c1", 1.5), c2=flat.get("pso.c2", 1.5), seed=seed)
    except ValueError as exc:
        raise ConfigError(f"pso: {exc}") from exc

    sweep_range = None
    if any(k.startswith("sweep.") and k != "sweep.param" for k in flat):
        try:
            sweep_range = (flat["sweep.start"], flat["sweep.stop"], flat.get("sweep.num", 21))
        except KeyError as exc:
            raise ConfigError(f"missing {exc.args[0]!r}") from None

    n_disk = flat.get("disk.n", N_DIAMOND)
    n_clad = flat.get("disk.n_clad", 1.0)
    if not n_disk > n_clad >= 1:
        raise ConfigError("key 'disk.n': need disk.n > disk.n_clad >= 1")

    return RunConfig(
        emitter=_emitter(flat), n_disk=n_disk, n_clad=n_clad, polarization=pol,
        P=flat.get("mode.P"), P_min=flat.get("mode.P_min"), P_max=flat.get("mode.P_max"), L=flat.get("mode.L", 1),
        h=flat.get("disk.h"), rings=tuple(rings), design=design, q_intrinsic=flat.get("run.q_intrinsic", 1e6),
        na=na, grid=grid, seed=seed, out=flat.get("run.out"), pso=pso,
        sweep_param=flat.get("sweep.param"), sweep_range=sweep_range, raw=dict(flat),
    )
