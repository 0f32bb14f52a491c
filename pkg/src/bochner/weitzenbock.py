"""The Weitzenböck curvature term on p-forms as an explicit matrix.

With ``e_i`` exterior and ``i_j`` interior multiplication on the
lexicographic basis of Λ^p,

    ℛ^p = Σ R_ijkl · e_i i_j e_k i_l .

This ordering gives ``ℛ^1 = Ric`` and the diagonal identity
``<ℛ^p w, w> = Σ_{i<=p<j} K(w_i, w_j)`` for ``w = w_1 ∧ ... ∧ w_p`` built from
any orthonormal frame; both are enforced in the test suite.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from itertools import combinations, permutations

import numpy as np

from .curvature import RiemannTensor, require_valid
from .errors import DomainError, NumericError
from .linalg import jacobi_eigvalsh
from .multiindex import (
    basis_position,
    enumerate_indices,
    number_preserving_pairs,
    overlap,
    wedge,
)

ASYMMETRY_TOL = 1e-12


@dataclass(frozen=True)
class FormOperator:
    """Symmetric operator on Λ^p in the lexicographic wedge basis."""

    n: int
    p: int
    matrix: np.ndarray

    @property
    def basis(self):
        return enumerate_indices(self.n, self.p)

    def __add__(self, other):
        if (self.n, self.p) != (other.n, other.p):
            raise DomainError("operators act on different spaces")
        return FormOperator(self.n, self.p, self.matrix + other.matrix)

    def to_json_dict(self):
        return {
            "n": self.n,
            "p": self.p,
            "basis": [list(I) for I in self.basis],
            "matrix": self.matrix.tolist(),
        }

    def dumps(self):
        return json.dumps(self.to_json_dict())


def _raw_operator(T, n, p):
    B = number_preserving_pairs(n, p)  # B[k, l] = e_k i_l
    # ℛ = Σ_ij B_ij (Σ_kl R_ijkl B_kl)
    inner = np.tensordot(T, B, axes=([2, 3], [0, 1]))
    return np.einsum("ijab,ijbc->ac", B, inner)


def assemble(R: RiemannTensor, p: int) -> FormOperator:
    n = R.n
    if not 0 <= p <= n:
        raise DomainError(f"degree p={p} outside [0, {n}]")
    require_valid(R)
    M = _raw_operator(R.entries, n, p)
    defect = np.max(np.abs(M - M.T), initial=0.0)
    if defect > ASYMMETRY_TOL * max(1.0, np.max(np.abs(M), initial=0.0)):
        raise NumericError("assembled operator is not symmetric", defect=float(defect))
    M = 0.5 * (M + M.T)
    M.setflags(write=False)
    return FormOperator(n, p, M)


def derivation_extend(S, p: int) -> FormOperator:
    """Extend a symmetric endomorphism of Λ^1 to Λ^p as a derivation."""
    S = np.asarray(S, dtype=float)
    n = S.shape[0]
    if S.shape != (n, n) or np.max(np.abs(S - S.T), initial=0.0) > ASYMMETRY_TOL:
        raise DomainError("derivation_extend needs a symmetric square matrix")
    if not 0 <= p <= n:
        raise DomainError(f"degree p={p} outside [0, {n}]")
    M = np.tensordot(S, number_preserving_pairs(n, p), axes=([0, 1], [0, 1]))
    M = 0.5 * (M + M.T)
    return FormOperator(n, p, M)


def assemble_h(R: RiemannTensor, hess_h, p: int) -> FormOperator:
    """Weitzenböck term of the weighted (Bismut-Witten) Laplacian.

    Exact at p = 1 (``Ric - 2 Hess h``).  For p > 1 the Hessian correction is
    extended as a derivation, which is an extrapolation rather than a derived
    formula.
    """
    hess_h = np.asarray(hess_h, dtype=float)
    if hess_h.shape != (R.n, R.n) or np.max(np.abs(hess_h - hess_h.T), initial=0.0) > ASYMMETRY_TOL:
        raise DomainError("hess_h must be a symmetric n x n matrix")
    return assemble(R, p) + derivation_extend(-2.0 * hess_h, p)


def eigenvalues(op: FormOperator) -> np.ndarray:
    return jacobi_eigvalsh(op.matrix)


def min_eigenvalue(op: FormOperator) -> float:
    """Infimum of the quadratic form over unit p-covectors."""
    if op.matrix.size == 0:
        raise DomainError("operator on a zero-dimensional space")
    return float(eigenvalues(op)[0])


def quadratic_form(op: FormOperator, omega) -> float:
    omega = np.asarray(omega, dtype=float)
    if omega.shape != (op.matrix.shape[0],):
        raise DomainError(f"expected {op.matrix.shape[0]} coefficients, got {omega.shape}")
    return float(omega @ op.matrix @ omega)


def decomposable(vectors) -> np.ndarray:
    """Coefficients of ``w_1 ∧ ... ∧ w_p`` in the lexicographic basis (p x p minors)."""
    W = np.atleast_2d(np.asarray(vectors, dtype=float))
    p, n = W.shape
    cols = enumerate_indices(n, p)
    if p == 0:
        return np.ones(1)
    return np.array([np.linalg.det(W[:, [i - 1 for i in I]]) for I in cols])


def hodge_star(n: int, p: int) -> np.ndarray:
    """Matrix of ∗: Λ^p → Λ^{n-p}; column I holds sign(I, I^c) in row I^c."""
    if not 0 <= p <= n:
        raise DomainError(f"degree p={p} outside [0, {n}]")
    src = enumerate_indices(n, p)
    rows = basis_position(n, n - p)
    S = np.zeros((len(rows), len(src)))
    full = set(range(1, n + 1))
    for col, I in enumerate(src):
        Ic = tuple(sorted(full - set(I)))
        sign, _ = wedge(I + Ic, n)
        S[rows[Ic], col] = sign
    return S


@dataclass
class Lemma31Report:
    n: int
    p: int
    sparsity_max: float
    sparsity_ok: bool
    identity_max_defect: float
    identity_ok: bool
    identity_cases: int

    @property
    def ok(self):
        return self.sparsity_ok and self.identity_ok


def check_lemma31(R: RiemannTensor, p: int, op: FormOperator | None = None, tol=1e-12) -> Lemma31Report:
    """Structure of ℛ^p: overlap sparsity and the ``2 R_ijkl`` cross terms.

    (i) entries with ``|J ∩ K| < p - 2`` vanish;
    (ii) ``<ℛ^p (v_i ∧ v_j ∧ v_I), v_k ∧ v_l ∧ v_I> = 2 R_ijkl`` for every
    multi-index I of length p - 2 and distinct i, j, k, l outside I.
    """
    n = R.n
    op = op if op is not None else assemble(R, p)
    M = op.matrix
    basis = enumerate_indices(n, p)
    sparse = 0.0
    for a, J in enumerate(basis):
        for b, K in enumerate(basis):
            if overlap(J, K) < p - 2:
                sparse = max(sparse, abs(M[a, b]))
    pos = basis_position(n, p)
    worst, cases = 0.0, 0
    if p >= 2:
        for I in combinations(range(1, n + 1), p - 2):
            rest = [x for x in range(1, n + 1) if x not in I]
            for quad in combinations(rest, 4):
                for i, j, k, l in permutations(quad):
                    s1, A = wedge((i, j) + I, n)
                    s2, B = wedge((k, l) + I, n)
                    val = s1 * s2 * M[pos[B], pos[A]]
                    target = 2.0 * R.entries[i - 1, j - 1, k - 1, l - 1]
                    worst = max(worst, abs(val - target))
                    cases += 1
    return Lemma31Report(
        n, p, float(sparse), bool(sparse <= tol), float(worst), bool(worst <= tol), cases
    )
