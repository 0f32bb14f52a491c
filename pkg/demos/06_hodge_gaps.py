"""Spectral gaps of combinatorial Hodge Laplacians.

The gap in each degree is at least the smaller of its neighbours' gaps;
random clique complexes give varied Betti profiles to test this against.
"""

from bochner import hodge as hg

cycle = hg.SimplicialComplex([(1, 2), (2, 3), (1, 3)])
print("3-cycle:", hg.check_interlacing(cycle).to_dict())
print("filled triangle L1:\n", hg.hodge_laplacian(hg.SimplicialComplex([(1, 2, 3)]), 1))

for seed in range(5):
    K = hg.random_clique_complex(8, 0.5, seed)
    rep = hg.check_interlacing(K)
    gaps = ", ".join(f"{g:.3f}" for g in rep.lambda1)
    print(f"{K}: gaps [{gaps}], betti {rep.betti}, ok={rep.ok}")
