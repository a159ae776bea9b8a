"""
Reaching around a disc with an eight-link arm
=============================================

The joint chain of the hyper-redundant arm is a closed-form function of the
controls.  We solve the penalised reaching problem with a disc in the way
and draw the result.
"""

import os

import numpy as np

from reachplan import discrete as D, objective as O, optimize as P, output, scenario as S

# Zero control leaves the arm hanging straight down.
arm = D.table_params(8, alpha_mode="curvature")
print("straight tip", D.forward_joints(arm, np.zeros(8)).tip)

# The closed form is an equilibrium of the arm's potential.
u = np.linspace(-0.8, 0.8, 8)
chain = D.forward_joints(arm, u)
print("equilibrium residual", D.equilibrium_residual(arm, u, chain, relative=True))

# The bundled Test 2 scenario: target (0.368, -0.085), disc of radius 0.08.
sf = S.bundled_scenario("test2-discrete")
sc = sf.scenario
print("gradient check", O.check_gradient(sc, trials=20).max_error)

report = P.descend(sc, sf.settings)
print(f"tip error {report.tip_error:.2e}, max penetration {report.max_penetration:.2e}")
for row in P.continuation_trace(report)[-3:]:
    print("  tau {:.2e}  iterations {:4d}  J {:.4e}  penetration {:.2e}".format(*row[1:5]))

os.makedirs("demo_out", exist_ok=True)
output.emit_svg("demo_out/test2-discrete.svg", sc, report.u_star)
print("wrote demo_out/test2-discrete.svg")
