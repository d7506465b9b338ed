"""Particle-swarm search over two-ring grating designs, one resonant order at a time."""

from __future__ import annotations

import math
from dataclasses import astuple, dataclass, field, fields, replace
from functools import partial

import numpy as np

from .efficiency import EfficiencyReport, EmitterSpectrum, total_efficiency
from .farfield import AngularGrid, DesignInvalid, GratingDesign, GratingRing, polarizability_from_hole
from .modes import N_DIAMOND, NoGuidedMode, Polarization, WgmMode, resonant_mode

INFEASIBLE = -math.inf


@dataclass(frozen=True)
class DesignVector:
    """Grating geometry in units of the in-material wavelength ``lambda / n_disk``.

    ``r*`` are hole radii, ``s*`` ring radii and ``t*`` etch depths; ring 1 is
    the outer ring.
    """

    h: float
    r1: float
    s1: float
    t1: float
    r2: float
    s2: float
    t2: float

    @classmethod
    def names(cls) -> tuple[str, ...]:
        return tuple(f.name for f in fields(cls))

    @classmethod
    def from_array(cls, x) -> "DesignVector":
        return cls(*(float(v) for v in x))

    def to_array(self):
        return np.array(astuple(self), dtype=float)

    def with_value(self, name, value) -> "DesignVector":
        return replace(self, **{name: float(value)})


# published optimum for P = 13, used as the seed particle and sweep centre
REFERENCE_VECTOR = DesignVector(h=0.57, r1=0.11, s1=2.83, t1=0.15, r2=0.19, s2=0.95, t2=0.15)


@dataclass(frozen=True)
class Bounds:
    lower: tuple[float, ...]
    upper: tuple[float, ...]

    def __post_init__(self):
        if len(self.lower) != len(self.upper) or any(lo > hi for lo, hi in zip(self.lower, self.upper)):
            raise ValueError("malformed bounds")

    def contains(self, x, atol=0.0) -> bool:
        x = np.asarray(x)
        return bool(np.all(x >= np.asarray(self.lower) - atol) and np.all(x <= np.asarray(self.upper) + atol))

    def clip(self, x):
        return np.clip(x, self.lower, self.upper)


@dataclass(frozen=True)
class PsoConfig:
    swarm_size: int = 40
    iterations: int = 200
    w: float = 0.7
    c1: float = 1.5
    c2: float = 1.5
    seed: int = 0
    bounds_handling: str = "REFLECT"

    def __post_init__(self):
        if self.swarm_size < 2:
            raise ValueError("swarm_size must be >= 2")
        if not 0 < self.w < 1:
            raise ValueError("inertia must lie in (0, 1)")
        if self.bounds_handling != "REFLECT":
            raise ValueError("only REFLECT bounds handling is supported")


@dataclass(frozen=True)
class DesignContext:
    """Everything an objective evaluation needs besides the vector and ``P``."""

    lambda_target: float = 637e-9
    n_disk: float = N_DIAMOND
    n_clad: float = 1.0
    polarization: Polarization = Polarization.TE_RADIAL
    emitter: EmitterSpectrum = field(default_factory=EmitterSpectrum.nv)
    Q_intrinsic: float = 1e6
    na: float = 0.6
    grid: AngularGrid = field(default_factory=AngularGrid)
    L: int = 1

    @property
    def unit(self) -> float:
        return self.lambda_target / self.n_disk


@dataclass(frozen=True)
class OptimizationResult:
    P: int
    best_vector: DesignVector
    best_eta: float
    trace: tuple[float, ...]
    evaluations: int


@dataclass
class SwarmResult:
    best_x: np.ndarray
    best_f: float
    trace: list[float]
    evaluations: int


def particle_swarm(func, lower, upper, config: PsoConfig, initial=None, map_fn=map, callback=None) -> SwarmResult:
    """Synchronous global-best PSO maximising ``func`` on a box.

    Positions leaving the box are reflected back in and their velocity
    component reversed. ``initial`` rows seed the first particles. Objective
    calls for one iteration go through ``map_fn`` so they may run in
    parallel; the swarm update itself is sequential and seeded, so results
    depend only on the inputs.
    """
    lower = np.asarray(lower, dtype=float)
    upper = np.asarray(upper, dtype=float)
    span = upper - lower
    rng = np.random.default_rng(config.seed)
    n, d = config.swarm_size, len(lower)

    x = lower + rng.random((n, d)) * span
    v = (2 * rng.random((n, d)) - 1) * 0.1 * span
    if initial is not None:
        init = np.atleast_2d(np.asarray(initial, dtype=float))[:n]
        x[: len(init)] = np.clip(init, lower, upper)

    def evaluate(pos):
        vals = np.array(list(map_fn(func, [row.copy() for row in pos])), dtype=float)
        vals[np.isnan(vals)] = -np.inf
        return vals

    f = evaluate(x)
    evaluations = n
    pbest, pbest_f = x.copy(), f.copy()
    g = int(np.argmax(pbest_f))
    trace = [float(pbest_f[g])]
    if callback is not None:
        callback(0, x)

    for it in range(1, config.iterations + 1):
        r1 = rng.random((n, d))
        r2 = rng.random((n, d))
        v = config.w * v + config.c1 * r1 * (pbest - x) + config.c2 * r2 * (pbest[g] - x)
        v = np.clip(v, -span, span)
        x = x + v
        hi, lo = x > upper, x < lower
        x = np.where(hi, 2 * upper - x, x)
        x = np.where(lo, 2 * lower - x, x)
        v = np.where(hi | lo, -v, v)
        x = np.clip(x, lower, upper)

        f = evaluate(x)
        evaluations += n
        improved = f > pbest_f
        pbest[improved] = x[improved]
        pbest_f[improved] = f[improved]
        g = int(np.argmax(pbest_f))
        trace.append(float(pbest_f[g]))
        if callback is not None:
            callback(it, x)

    return SwarmResult(pbest[g].copy(), float(pbest_f[g]), trace, evaluations)


def build_design(vector: DesignVector, P: int, context: DesignContext) -> tuple[WgmMode, GratingDesign]:
    """Disk resonant at order ``P`` with two rings of ``P - L`` holes each.

    Raises ``DesignInvalid`` for geometry the model cannot represent.
    """
    u = context.unit
    if not vector.h > 0:
        raise DesignInvalid("disk thickness must be positive")
    if vector.t1 > vector.h or vector.t2 > vector.h:
        raise DesignInvalid("etch depth exceeds disk thickness")
    if min(vector.r1, vector.r2, vector.t1, vector.t2) < 0 or min(vector.s1, vector.s2) <= 0:
        raise DesignInvalid("negative hole dimensions or ring radius")
    if vector.s1 == vector.s2:
        raise DesignInvalid("ring radii coincide")
    G = P - context.L
    if G < 1:
        raise DesignInvalid(f"P={P} too small for L={context.L}")
    try:
        mode = resonant_mode(P, context.lambda_target, vector.h * u, context.n_disk, context.n_clad,
                             context.polarization)
    except NoGuidedMode as exc:
        raise DesignInvalid(str(exc)) from exc
    h = vector.h * u
    rings = []
    for r, s, t in ((vector.r1, vector.s1, vector.t1), (vector.r2, vector.s2, vector.t2)):
        A = polarizability_from_hole(r * u, t * u, context.n_disk)
        # partial etch from the top face: hole centroid sits above mid-plane
        rings.append(GratingRing(G=G, r_s=s * u, A=A, z_s=(h - t * u) / 2))
    design = GratingDesign(tuple(rings))
    design.validate(mode)
    return mode, design


def evaluate_vector(vector: DesignVector, P: int, context: DesignContext) -> EfficiencyReport:
    mode, design = build_design(vector, P, context)
    return total_efficiency(mode, design, context.emitter, context.Q_intrinsic, context.na, context.grid)


def objective(vector, P: int, context: DesignContext) -> float:
    """Collection efficiency ``eta`` of a design vector, or ``-inf`` if infeasible."""
    if not isinstance(vector, DesignVector):
        vector = DesignVector.from_array(vector)
    try:
        return evaluate_vector(vector, P, context).eta
    except DesignInvalid:
        return INFEASIBLE


def default_bounds(P: int, context: DesignContext) -> Bounds:
    """Box in ``lambda'`` units; the outer-ring limit uses the thickest disk."""
    h_lo, h_hi = 0.3, 0.8
    R = resonant_mode(P, context.lambda_target, h_hi * context.unit, context.n_disk, context.n_clad,
                      context.polarization).geometry.R / context.unit
    s1_hi = max(R - 0.1, 2.0)
    lower = (h_lo, 0.02, 2.0, 0.02, 0.02, 0.3, 0.02)
    upper = (h_hi, 0.3, s1_hi, h_hi, 0.3, 2.0, h_hi)
    return Bounds(lower, upper)


def optimize_for_P(P: int, bounds: Bounds | None, config: PsoConfig, context: DesignContext,
                   initial=None, map_fn=map) -> OptimizationResult:
    bounds = bounds or default_bounds(P, context)
    if initial is not None:
        initial = [v.to_array() if isinstance(v, DesignVector) else v for v in initial]
    # seed per order so results do not depend on the order P values are visited
    seed = int(np.random.SeedSequence([config.seed, P]).generate_state(1)[0])
    res = particle_swarm(partial(objective, P=P, context=context), bounds.lower, bounds.upper,
                         replace(config, seed=seed), initial=initial, map_fn=map_fn)
    return OptimizationResult(P=P, best_vector=DesignVector.from_array(res.best_x), best_eta=res.best_f,
                              trace=tuple(res.trace), evaluations=res.evaluations)


def optimize_over_P(P_values, bounds: Bounds | None, config: PsoConfig, context: DesignContext,
                    initial=None, map_fn=map) -> tuple[list[OptimizationResult], int]:
    """Optimise every order in ``P_values``; return results sorted by ``P`` and the winning ``P``."""
    P_values = sorted(set(P_values))
    if not P_values:
        raise ValueError("empty P range")
    results = [optimize_for_P(P, bounds, config, context, initial, map_fn) for P in P_values]
    best = max(results, key=lambda r: r.best_eta)
    return results, best.P


def parameter_sweep(vector: DesignVector, component: str, samples, P: int, context: DesignContext):
    """Vary one component with the others fixed.

    Returns rows ``(value, eta1, eta2, eta)`` in ascending ``value``;
    infeasible samples carry NaN.
    """
    if component not in DesignVector.names():
        raise ValueError(f"unknown design component {component!r}")
    rows = []
    for value in sorted(float(s) for s in samples):
        try:
            rep = evaluate_vector(vector.with_value(component, value), P, context)
            rows.append((value, rep.eta1, rep.eta2_at_na, rep.eta))
        except DesignInvalid:
            rows.append((value, math.nan, math.nan, math.nan))
    return rows
