"""Exercise the particle swarm optimizer on toy functions.

    python demos/03_swarm_basics.py
"""

import numpy as np

from capplan import PsoParams
from capplan.pso import optimize


def sphere(x):
    return float(np.sum(x * x))


def rastrigin(x):
    return float(10 * x.size + np.sum(x * x - 10 * np.cos(2 * np.pi * x)))


# A smooth bowl is easy: the swarm contracts onto the minimum.
result = optimize(sphere, [(-5.0, 5.0)] * 2, PsoParams(max_iterations=200))
print(f"sphere: best {result.gbest_fitness:.3e} at {result.gbest_position}")
print(f"  evaluations: {result.evaluations}")

# The best-so-far trace never increases; every tenth value:
trace = result.history[::10]
print("  trace:", "  ".join(f"{v:.1e}" for v in trace))

# Same seed, same everything. The engine draws all randomness from one
# seeded generator in a fixed order, so runs are exactly repeatable.
again = optimize(sphere, [(-5.0, 5.0)] * 2, PsoParams(max_iterations=200))
print(f"  rerun identical: {again.history == result.history}")

# A multimodal surface shows why seeds matter: each one explores
# differently and some land in better basins than others.
print("\nrastrigin (4-D), ten seeds:")
for seed in range(10):
    params = PsoParams(max_iterations=150, seed=seed)
    r = optimize(rastrigin, [(-5.12, 5.12)] * 4, params)
    print(f"  seed {seed}: {r.gbest_fitness:8.4f}")
