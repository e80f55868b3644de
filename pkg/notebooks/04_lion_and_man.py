"""
Playing the game
================

The lion steps min(D, D_n) along the geodesic toward the man; the man then
sees the new lion position and moves at most D inside the domain.  Captures
come after a handful of steps in practice, far below the worst-case bound.
"""

# %%
import io
import math

import numpy as np

from lionman import Ball, Euclidean, GameConfig, Sphere2, SphericalCap, run_game
from lionman.game import STRATEGIES, make_strategy, random_start, trace_to_csv

plane = Euclidean(2)
disk = Ball(plane, (0, 0), 1)

# %% one Flee game in the unit disk
L0, M0 = random_start(disk, 7)
trace = run_game(GameConfig(plane, disk, 0.1, L0, M0, 0.01, seed=7), make_strategy("flee"))
print("capture at step", trace.capture_step)
print(trace_to_csv(trace).splitlines()[:4])

# %% D_n never increases while it stays above D, and gap_n = max(0, D_n - D)
print(np.round(trace.D_n, 4))
print("max gap error:", np.max(np.abs(trace.gap_n - np.maximum(0, trace.D_n - 0.1))))

# %% every built-in man, ten seeds each
for name in sorted(STRATEGIES):
    steps = []
    for seed in range(10):
        L0, M0 = random_start(disk, seed)
        steps.append(run_game(GameConfig(plane, disk, 0.1, L0, M0, 0.01, seed=seed), make_strategy(name)).capture_step)
    print(f"{name:15s} {steps}")

# %% the same game on a spherical cap
sphere = Sphere2()
cap = SphericalCap(sphere, (0, 0, 1), math.pi / 8)
L0, M0 = random_start(cap, 1)
trace = run_game(GameConfig(sphere, cap, 0.02, L0, M0, 1e-3, seed=1), make_strategy("boundary-orbit"))
print("sphere cap capture at step", trace.capture_step)
