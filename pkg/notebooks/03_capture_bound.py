"""
The capture-time bound
======================

For a jump bound D, domain diameter b and tolerance alpha the lion is within
D + alpha of the man after at most Omega steps, whatever the man does.  The
smallest admissible N and the largest admissible eps give the tightest Omega.
"""

# %%
import numpy as np

from lionman import ModuliBundle, choose_eps, choose_N, compute_omega

# %% parameter selection
N = choose_N(0.1, 2)
print("N   =", N)
print("eps =", choose_eps(N, 0.1, 0.01))

# %% Omega for the Euclidean plane: an astronomically large but explicit number
result = compute_omega(ModuliBundle.from_family("lp:2", 2.0), 0.1, 2, 0.01)
print(result.to_dict())

# %% a smaller tolerance never gives a smaller bound
bundle = ModuliBundle.from_family("lp:2", 2.0)
for alpha in np.geomspace(1, 1e-4, 5):
    r = compute_omega(bundle, 0.5, 2.0, alpha)
    print(f"alpha = {alpha:.0e}: N = {r.N}, log10 Omega = {r.log10_omega:.6e}")

# %% families side by side
for family in ("lp:1.5", "lp:2", "lp:3", "hilbert"):
    r = compute_omega(ModuliBundle.from_family(family, 2.0), 0.5, 2.0, 0.1)
    print(f"{family:8s} log10 Omega = {r.log10_omega:.6e}")
