"""
The soft arm and its discrete relatives
=======================================

A soft arm is controlled by its curvature profile, which stays inside a
band fixed by the material weights.  A discrete arm with matched parameters
approaches the soft arm as the number of links grows.
"""

import os
import warnings

import numpy as np

from reachplan import discrete as D, optimize as P, output, scenario as S, soft

params = soft.table_params(100)

# Curvature is the control times the effective bound, so |kappa| <= bound.
u = np.clip(np.linspace(-1.5, 1.5, params.N + 1), -1, 1)
curve = soft.forward_curve(params, u)
kappa, upper, lower = soft.curvature_profile(curve, params)
print("inside the band:", bool(np.all((lower <= kappa) & (kappa <= upper))))

# Matched discrete arms: one link per block of the soft grid.  With eight
# links the matched angle bound omega / N sits just above pi/2.
warnings.simplefilter("ignore", D.AngleBoundWarning)

def tips(N, u_links, nodes_per_link=64):
    s = np.arange(N) / N
    eps, mu = 0.1 * (1 - 0.9 * s), 1 - 0.9 * s
    omega = 2 * np.pi * (2 + s ** 2)
    arm = D.DiscreteArmParams(np.full(N, 1 / N), omega / N, eps, mu)
    fine = soft.SoftArmParams.from_profiles(N * nodes_per_link, lambda t: 0.1 * (1 - 0.9 * t),
                                            lambda t: 1 - 0.9 * t, lambda t: 2 * np.pi * (2 + t ** 2))
    us = np.append(np.repeat(u_links, nodes_per_link), u_links[-1])
    return D.forward_joints(arm, u_links).tip, soft.forward_curve(fine, us).tip

print("\n  N   N * |tip_discrete - tip_soft|")
for N in (8, 32, 128):
    d, s = tips(N, np.where(np.arange(N) < N // 2, 0.5, -0.5))
    print(f"{N:4d}   {N * np.hypot(*(d - s)):.3f}")

# Test 1: no obstacle, reach the target.
sf = S.bundled_scenario("test1-soft")
report = P.descend(sf.scenario, sf.settings)
print(f"\ntest1-soft: tip error {report.tip_error:.2e}")
os.makedirs("demo_out", exist_ok=True)
output.emit_svg("demo_out/test1-soft.svg", sf.scenario, report.u_star)
print("wrote demo_out/test1-soft.svg")
