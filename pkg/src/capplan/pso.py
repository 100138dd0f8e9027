"""Bounded-box particle swarm minimizer.

Gbest topology with velocity clamping and linearly decreasing inertia.
Runs are deterministic for a given seed: the two uniform draws per step
happen in a fixed order before any fitness evaluation, so evaluation order
(or future parallelism) cannot change the result.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class PsoParams:
    swarm_size: int = 30
    max_iterations: int = 40
    c1: float = 2.0
    c2: float = 2.0
    w_start: float = 0.9
    w_end: float = 0.4
    v_max_fraction: float = 0.2
    seed: int = 0

    def __post_init__(self) -> None:
        if self.swarm_size < 2:
            raise ValueError(f"swarm_size must be at least 2, got {self.swarm_size}")
        if self.max_iterations < 1:
            raise ValueError(
                f"max_iterations must be at least 1, got {self.max_iterations}")
        if self.c1 < 0 or self.c2 < 0:
            raise ValueError(f"c1 and c2 must be non-negative, got {self.c1}, {self.c2}")
        if not 0 < self.v_max_fraction <= 1:
            raise ValueError(
                f"v_max_fraction must be in (0, 1], got {self.v_max_fraction}")
        if not self.w_start >= self.w_end >= 0:
            raise ValueError(
                f"need w_start >= w_end >= 0, got {self.w_start}, {self.w_end}")

    def inertia(self, iteration: int) -> float:
        if self.max_iterations == 1:
            return self.w_start
        frac = iteration / (self.max_iterations - 1)
        return self.w_start - (self.w_start - self.w_end) * frac


@dataclass(frozen=True)
class Particle:
    """Read-only view of one swarm member."""

    position: np.ndarray
    velocity: np.ndarray
    pbest_position: np.ndarray
    pbest_fitness: float


@dataclass
class Swarm:
    positions: np.ndarray      # (n, d)
    velocities: np.ndarray     # (n, d)
    pbest_positions: np.ndarray
    pbest_fitness: np.ndarray  # (n,)
    gbest_position: np.ndarray
    gbest_fitness: float
    lo: np.ndarray             # per-dimension bounds and velocity cap
    hi: np.ndarray
    v_max: np.ndarray
    evaluations: int = 0

    def particle(self, i: int) -> Particle:
        return Particle(position=self.positions[i].copy(),
                        velocity=self.velocities[i].copy(),
                        pbest_position=self.pbest_positions[i].copy(),
                        pbest_fitness=float(self.pbest_fitness[i]))

    def __len__(self) -> int:
        return self.positions.shape[0]


@dataclass(frozen=True)
class OptimizationResult:
    gbest_position: np.ndarray
    gbest_fitness: float
    history: tuple[float, ...]
    evaluations: int


def _check_bounds(bounds) -> tuple[np.ndarray, np.ndarray]:
    arr = np.asarray(bounds, dtype=float)
    if arr.ndim != 2 or arr.shape[0] == 0 or arr.shape[1] != 2:
        raise ValueError("bounds must be a non-empty sequence of (lo, hi) pairs")
    lo, hi = arr[:, 0], arr[:, 1]
    if not np.all(lo < hi):
        raise ValueError(f"every lower bound must be below its upper bound: {bounds}")
    return lo, hi


def initialize(bounds, params: PsoParams, rng: np.random.Generator) -> Swarm:
    """Uniform positions in the box, velocities in [-v_max, v_max]."""
    lo, hi = _check_bounds(bounds)
    d = lo.size
    n = params.swarm_size
    v_max = params.v_max_fraction * (hi - lo)
    positions = rng.uniform(lo, hi, size=(n, d))
    velocities = rng.uniform(-v_max, v_max, size=(n, d))
    return Swarm(
        positions=positions,
        velocities=velocities,
        pbest_positions=positions.copy(),
        pbest_fitness=np.full(n, math.inf),
        gbest_position=positions[0].copy(),
        gbest_fitness=math.inf,
        lo=lo,
        hi=hi,
        v_max=v_max,
    )


def evaluate_swarm(swarm: Swarm, fitness) -> None:
    """Score current positions; tighten pbest/gbest on strict improvement.

    Non-finite fitness values are treated as +inf so they can never become
    a best.
    """
    scores = np.empty(len(swarm))
    for i in range(len(swarm)):
        value = float(fitness(swarm.positions[i].copy()))
        scores[i] = value if math.isfinite(value) else math.inf
    swarm.evaluations += len(swarm)

    improved = scores < swarm.pbest_fitness
    swarm.pbest_positions[improved] = swarm.positions[improved]
    swarm.pbest_fitness[improved] = scores[improved]
    best = int(np.argmin(swarm.pbest_fitness))
    if swarm.pbest_fitness[best] < swarm.gbest_fitness:
        swarm.gbest_fitness = float(swarm.pbest_fitness[best])
        swarm.gbest_position = swarm.pbest_positions[best].copy()


def step(swarm: Swarm, fitness, params: PsoParams, iteration: int,
         rng: np.random.Generator) -> Swarm:
    """One velocity/position update followed by evaluation, in place."""
    if iteration >= params.max_iterations:
        raise ValueError(f"iteration {iteration} is past the schedule "
                         f"({params.max_iterations} iterations)")
    n, d = swarm.positions.shape
    r1 = rng.uniform(size=(n, d))
    r2 = rng.uniform(size=(n, d))

    w = params.inertia(iteration)
    swarm.velocities = (w * swarm.velocities
                        + params.c1 * r1 * (swarm.pbest_positions - swarm.positions)
                        + params.c2 * r2 * (swarm.gbest_position - swarm.positions))
    np.clip(swarm.velocities, -swarm.v_max, swarm.v_max, out=swarm.velocities)

    swarm.positions = swarm.positions + swarm.velocities
    clamped = (swarm.positions < swarm.lo) | (swarm.positions > swarm.hi)
    np.clip(swarm.positions, swarm.lo, swarm.hi, out=swarm.positions)
    swarm.velocities[clamped] = 0.0

    evaluate_swarm(swarm, fitness)
    return swarm


def optimize(fitness, bounds, params: PsoParams | None = None) -> OptimizationResult:
    """Minimize ``fitness`` over the box; deterministic per seed."""
    if params is None:
        params = PsoParams()
    rng = np.random.default_rng(params.seed)
    swarm = initialize(bounds, params, rng)
    evaluate_swarm(swarm, fitness)

    history = []
    for iteration in range(params.max_iterations):
        step(swarm, fitness, params, iteration, rng)
        history.append(swarm.gbest_fitness)

    return OptimizationResult(
        gbest_position=swarm.gbest_position.copy(),
        gbest_fitness=swarm.gbest_fitness,
        history=tuple(history),
        evaluations=swarm.evaluations,
    )
