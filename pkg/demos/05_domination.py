"""Damped flow on forms along Brownian paths of S^4.

Along each path the flow solves dW/dt = -R^p W / 2; its norm never exceeds
the scalar decay driven by the smallest eigenvalue.
"""

from bochner import stochastic as sto

rep = sto.domination_check("sphere4", 2, T=1.0, dt=1e-3, n_paths=20, seed=3)
print(rep)
path = sto.simulate_bm("sphere4", None, 0.5, 1e-3, (3, 0))
flow = sto.solve_W("sphere4", sto.constant_curvature_field("sphere4"), 2, path)
print("final ratio range:", flow.ratios.min(), flow.ratios.max())
