"""Curvature term of the Hodge Laplacian on a few model tensors.

Builds the operator on p-forms for a round sphere, a product and a random
tensor, and compares its quadratic form on decomposable forms with sums
of sectional curvatures.
"""

import numpy as np

from bochner import curvature as cv
from bochner import weitzenbock as wz

# %% Round sphere: the operator is the scalar p(n - p)
S = cv.constant_curvature(5, 1.0)
for p in range(6):
    w = wz.eigenvalues(wz.assemble(S, p))
    print(f"S^5, p={p}: eigenvalues in [{w[0]:.3f}, {w[-1]:.3f}]")

# %% Degree one recovers Ricci
R = cv.random_tensor(4, seed=1)
print("max |R^1 - Ric| =", np.abs(wz.assemble(R, 1).matrix - cv.ricci(R)).max())

# %% Decomposable forms see only sectional curvatures
rng = np.random.default_rng(0)
Q = cv.random_frame(4, rng)
omega = wz.decomposable(Q[:2])
K = cv.sectional_matrix(R, Q)
print("quadratic form:", wz.quadratic_form(wz.assemble(R, 2), omega))
print("sum of K(q_i, q_j), i<=2<j:", K[:2, 2:].sum())

# %% Off-diagonal structure
rep = wz.check_lemma31(cv.random_tensor(6, seed=2), 3)
print(rep)
