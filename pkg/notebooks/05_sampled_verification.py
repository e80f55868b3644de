"""
Checking the definitions by sampling
====================================

Each check draws admissible configurations for one definition or lemma and
records how far the conclusion held.  A deliberately inflated modulus makes
the uniqueness check fail, so the suite is not vacuous.
"""

# %%
import math

import numpy as np

from lionman import Euclidean, ModuliBundle, Sphere2, SphericalCap
from lionman.verify import (
    applicable_checks,
    check_goebel_kirk,
    check_uniform_uniqueness,
    empirical_convexity_modulus,
    run_check,
)

plane = Euclidean(2)
sphere = Sphere2()
cap = SphericalCap(sphere, (0, 0, 1), math.pi / 8)

# %% every applicable check on the plane and on a cap
for space, domain in [(plane, None), (sphere, cap)]:
    for name in applicable_checks(space):
        r = run_check(name, space, domain, n_samples=5000, seed=0)
        print(f"{space!r:14s} {name:22s} violations={r.violations} yield={r.admissible_yield:.2f} "
              f"worst_slack={r.worst_slack:.3e}")

# %% sabotage: Phi scaled by 10 is no longer a valid modulus
bad = ModuliBundle.from_family("lp:2", 2 * math.sqrt(2)).with_phi_scaled(10)
r = check_uniform_uniqueness(plane, bad, 20_000, 0)
print("violations with Phi x 10:", r.violations)
print("first counterexample:", r.violation_dumps[0])

# %% the modulus of convexity of the plane, measured
for eps in (0.5, 1.0, 1.5, 2.0):
    print(f"delta({eps}) = {empirical_convexity_modulus(plane, eps):.8f}  exact {1 - math.sqrt(1 - eps**2 / 4):.8f}")

# %% the Goebel-Kirk inequality on a grid
grid = np.round(np.arange(0.1, 2.0, 0.2), 10)
r = check_goebel_kirk(lambda e: empirical_convexity_modulus(plane, e, grid=2000), grid)
print("Goebel-Kirk violations:", r.violations, "worst slack:", r.worst_slack)
