"""A hyperbolic surface times the round 4-sphere.

The operator on 3-forms is diagonal with entries 3 and 4 - a, so it stays
positive exactly when the surface curvature -a exceeds -4, while degree 2
is never pinched.
"""

from bochner import pinching as pc

for a in (0.5, 1.0, 3.9, 4.5):
    rep = pc.product_example(a, samples=100, restarts=16)
    print(f"a={a}: diagonal {rep.diagonal}, min eigenvalue {rep.min_eigenvalue:+.3f}, "
          f"pinched p=3 {rep.pinch[3].pinched}, p=2 {rep.pinch[2].pinched}")
    failed = [k for k, v in rep.checks.items() if not v]
    if failed:
        print("   failed checks:", failed)
