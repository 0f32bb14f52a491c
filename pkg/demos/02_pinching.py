"""How much pinching forces a positive curvature term.

Extremizes the partial sectional-curvature sum over orthonormal frames,
compares the ratio with the pinching constant, and checks the implied
lower bound against the true smallest eigenvalue.
"""

from bochner import pinching as pc
from bochner import weitzenbock as wz

for n, p in [(4, 2), (6, 2), (6, 3)]:
    print(f"C({n},{p}) = {pc.pinch_constant(n, p, exact=True)}")

R, t = pc.pinched_family(6, 3, seed=5)
rep = pc.is_pinched(R, 3)
lam = wz.min_eigenvalue(wz.assemble(R, 3))
print(f"mixing weight t={t:.3f}: m={rep.m:.4f} M={rep.M:.4f} ratio={rep.m / rep.M:.4f}, pinched={rep.pinched}")
print(f"corollary bound {rep.corollary_bound():.4f} <= smallest eigenvalue {lam:.4f}")
