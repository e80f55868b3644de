"""
Geodesic spaces
===============

Three kinds of uniquely geodesic space ship with the library: Euclidean
space, finite-dimensional l_p and the unit sphere S^2 with the great-circle
metric.  This script walks through distances, geodesics and the octant of
the sphere, which is uniquely geodesic but not strictly convex.
"""

# %%
import math

import numpy as np

from lionman import Euclidean, Lp, Sphere2, SphericalCap
from lionman.verify import octant_counterexample

plane = Euclidean(2)
l3 = Lp(2, 3)
sphere = Sphere2()

# %% distances in the three metrics
x, y = np.array([1.0, 0.0]), np.array([0.0, 1.0])
print("euclidean d(x, y) =", plane.distance(x, y))
print("l_3       d(x, y) =", l3.distance(x, y))
print("sphere    d(e1, e2) =", sphere.distance([1, 0, 0], [0, 1, 0]), "(pi/2 =", math.pi / 2, ")")

# %% geodesics are straight lines in normed spaces and great-circle arcs on the sphere
ts = np.linspace(0, 1, 5)
print(plane.interpolate(x, y, ts))
arc = sphere.interpolate([1, 0, 0], [0, 1, 0], ts)
print(arc)
print("arc points stay on the sphere:", np.allclose(np.linalg.norm(arc, axis=1), 1))

# %% distance from a point to a segment
z = np.array([0.5, 0.5])
print("dist(z, [x, y]) in the plane:", plane.dist_to_segment(z, x, y))
print("dist(z, [x, y]) in l_3:      ", l3.dist_to_segment(z, x, y))

# %% a spherical cap of angular radius pi/8 is a convex playing field
cap = SphericalCap(sphere, (0, 0, 1), math.pi / 8)
pts = cap.sample(np.random.default_rng(0), 5)
print("cap diameter bound:", cap.diameter_bound)
print("samples inside:", cap.contains(pts))

# %% the octant: midpoint of two vertices is as far from the third as the vertices are
report = octant_counterexample()
for key in ("d_zx", "d_zy", "d_zm"):
    print(f"{key} = {report[key]:.15f}")
print("strict convexity fails:", report["strict_convexity_fails"])
