"""
From convexity to betweenness
=============================

A modulus of uniform convexity eta yields a modulus of uniform uniqueness
Phi, which yields a modulus of uniform betweenness Theta, and from those the
functions Delta and Psi that drive the capture bound.  Values shrink fast,
so anything nested is evaluated in log space.
"""

# %%
import numpy as np

from lionman import LogReal, ModuliBundle, eta_lp, lp_phi_closed_form
from lionman.moduli import evaluate_safe

# %% eta for l_p: quadratic below p = 2, power p above
for p in (1.5, 2, 3, 4.5):
    print(f"p = {p:>3}: eta(0.5) = {eta_lp(p, 0.5):.3e}")

# %% Phi from eta matches the closed form
bundle = ModuliBundle.from_family("lp:2", 2.0)
for eps in (1.0, 0.1, 0.01):
    print(f"Phi({eps}, 2) = {bundle.Phi(eps):.6e}  closed form {lp_phi_closed_form(2, eps, 2.0):.6e}")

# %% the chain Phi > Theta > Psi at one eps
eps = 0.1
print("Phi   =", bundle.Phi(eps))
print("Theta =", bundle.Theta(eps, eps))
print("Psi   =", bundle.psi(eps))

# %% iterating Psi leaves the double range almost at once
x = LogReal.from_real(1 / 300)
for n in range(1, 8):
    x = bundle.psi(x)
    print(f"Psi^{n}(1/300) = 10^{x.log10():.6g}")

# %% for l_4.5 floats underflow even for a single Psi; evaluate_safe switches to log space
steep = ModuliBundle.from_family("lp:4.5", 2.0)
value = evaluate_safe(steep.psi, 1e-3)
print(type(value).__name__, value.log10() if isinstance(value, LogReal) else value)
eps_grid = np.geomspace(1e-3, 1, 4)
print(LogReal.from_real(evaluate_safe(steep.psi, eps_grid)).log10())
