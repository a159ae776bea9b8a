"""
Distance to a rotated ellipse
=============================

The exact boundary distance of an ellipse comes from the smallest root of a
quartic.  For nearly circular ellipses a first-order formula in
eps = a^2 - b^2 avoids the root finder.  This script compares the two.
"""

import math

import numpy as np

from reachplan import geometry as G

# The projection of q onto the axis-aligned ellipse with semi-axes a >= b.
a, b = 0.18, 0.08
q = (0.25, 0.1)
proj = G.ellipse_distance_exact(q, a, b)
print("lambda* =", proj.lambda_star)
print("foot point", proj.foot_point, "distance", proj.distance)

# lambda* is a root of the projection quartic (rescaled to be O(1)).
print("quartic residual", G.ellipse_quartic(proj.lambda_star, q, a, b) / G.quartic_scale(proj.lambda_star, q, a, b))

# Brute force over boundary samples agrees.
t = np.linspace(0, 2 * math.pi, 200_000, endpoint=False)
print("brute force      ", np.min(np.hypot(a * np.cos(t) - q[0], b * np.sin(t) - q[1])))

# The approximation error shrinks faster than eps.
b = 1.0
q = (1.3, 0.7)
print("\n   eps      |d2 - d2_eps| / eps")
for k in range(7):
    eps = 0.1 * 2.0 ** -k
    a = math.sqrt(b * b + eps)
    err = abs(G.ellipse_distance_exact(q, a, b).distance ** 2 - G.ellipse_distance_sq_approx(q, a, b))
    print(f"{eps:9.5f}   {err / eps:.3e}")

# In a scene, obstacles carry a centre and a rotation.  Penetration is zero
# outside and the depth below the boundary inside.
ell = G.Ellipse((0.2, -0.35), 0.18, 0.08, G.clockwise_degrees(25))
pts = np.array([[0.2, -0.35], [0.3, -0.4], [0.6, 0.0]])
print("\npenetration", G.penetration(pts, ell))
