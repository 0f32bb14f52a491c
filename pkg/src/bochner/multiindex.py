"""Exterior-algebra combinatorics on the wedge basis of Λ^p(R^n).

Multi-indices are plain tuples of strictly increasing 1-based integers.
The lexicographic order produced by :func:`enumerate_indices` is the basis
order used by every matrix in the package.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations
from math import comb

import numpy as np

from .errors import DomainError, NumericError

CREATE = "create"
ANNIHILATE = "annihilate"


def enumerate_indices(n: int, p: int) -> list[tuple[int, ...]]:
    """All C(n, p) multi-indices of length `p` in lexicographic order."""
    if p < 0 or p > n:
        raise DomainError(f"degree p={p} outside [0, {n}]")
    return list(_enumerate(n, p))


@lru_cache(maxsize=None)
def _enumerate(n, p):
    return tuple(combinations(range(1, n + 1), p))


@lru_cache(maxsize=None)
def basis_position(n: int, p: int) -> dict[tuple[int, ...], int]:
    """Map from multi-index to its row in the lexicographic basis."""
    return {I: r for r, I in enumerate(_enumerate(n, p))}


def validate_index(I, n=None):
    I = tuple(int(i) for i in I)
    if any(a >= b for a, b in zip(I, I[1:])):
        raise DomainError(f"multi-index {I} is not strictly increasing")
    if I and (I[0] < 1 or (n is not None and I[-1] > n)):
        raise DomainError(f"multi-index {I} has entries outside [1, {n}]")
    return I


def overlap(I, J) -> int:
    """Size of the set intersection of two multi-indices of equal length."""
    if len(I) != len(J):
        raise DomainError(f"length mismatch: {len(I)} != {len(J)}")
    return len(set(I) & set(J))


def apply_elementary(kind: str, i: int, I, n: int | None = None):
    """Act with exterior (create) or interior (annihilate) multiplication by v^i.

    Returns ``(sign, J)`` with ``sign`` in {-1, 0, +1}; ``J`` is None when the
    result vanishes.  The sign is (-1) to the number of entries of `I` that
    precede `i`, which makes the two actions adjoint on the orthonormal
    wedge basis.
    """
    if i < 1 or (n is not None and i > n):
        raise DomainError(f"index {i} outside [1, {n}]")
    before = sum(1 for a in I if a < i)
    sign = -1 if before % 2 else 1
    if kind == ANNIHILATE:
        if i not in I:
            return 0, None
        return sign, tuple(a for a in I if a != i)
    if kind == CREATE:
        if i in I:
            return 0, None
        return sign, I[:before] + (i,) + I[before:]
    raise DomainError(f"unknown operator kind {kind!r}")


def wedge(indices, n=None):
    """Reorder ``v^{i_1} ∧ ... ∧ v^{i_m}`` into the basis: ``(sign, I)``."""
    sign, I = 1, ()
    for i in reversed(tuple(indices)):
        s, I = apply_elementary(CREATE, i, I, n)
        if s == 0:
            return 0, None
        sign *= s
    return sign, I


@lru_cache(maxsize=None)
def elementary_matrices(n: int, p: int, kind: str) -> np.ndarray:
    """Stack of matrices of the elementary operators v^i, i = 1..n.

    For ``kind='create'`` the result has shape (n, C(n,p+1), C(n,p)); for
    ``'annihilate'`` it is (n, C(n,p-1), C(n,p)).  Out-of-range target
    degrees give zero-sized axes.
    """
    q = p + 1 if kind == CREATE else p - 1
    src = _enumerate(n, p)
    rows = basis_position(n, q) if 0 <= q <= n else {}
    out = np.zeros((n, len(rows), len(src)))
    for col, I in enumerate(src):
        for i in range(1, n + 1):
            s, J = apply_elementary(kind, i, I, n)
            if s:
                out[i - 1, rows[J], col] = s
    out.setflags(write=False)
    return out


@lru_cache(maxsize=None)
def number_preserving_pairs(n: int, p: int) -> np.ndarray:
    """Matrices of ``create(k) ∘ annihilate(l)`` on Λ^p, shape (n, n, N, N)."""
    if p == 0:
        N = 1
        return np.zeros((n, n, N, N))
    cre = elementary_matrices(n, p - 1, CREATE)
    ann = elementary_matrices(n, p, ANNIHILATE)
    out = np.einsum("kab,lbc->klac", cre, ann)
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class OverlapMatrix:
    """0/1 matrix on the Λ^p basis marking pairs whose overlap is exactly k."""

    n: int
    p: int
    k: int
    entries: np.ndarray

    @property
    def closed_form(self) -> int:
        return comb(self.p, self.p - self.k) * comb(self.n - self.p, self.p - self.k)


def overlap_matrix(n: int, p: int, k: int) -> OverlapMatrix:
    if not (0 <= k <= p <= n):
        raise DomainError(f"need 0 <= k <= p <= n, got n={n}, p={p}, k={k}")
    basis = [frozenset(I) for I in _enumerate(n, p)]
    A = np.array([[1.0 if len(I & J) == k else 0.0 for J in basis] for I in basis])
    A.setflags(write=False)
    return OverlapMatrix(n, p, k, A)


def perron_eigenvalue(A, rtol=1e-10, max_iter=100_000) -> float:
    """Largest eigenvalue of a nonnegative matrix by power iteration.

    Iteration starts from the all-ones vector and stops once successive
    Rayleigh quotients agree to `rtol`.
    """
    M = A.entries if isinstance(A, OverlapMatrix) else np.asarray(A, dtype=float)
    x = np.ones(M.shape[0]) / np.sqrt(M.shape[0])
    lam = None
    for it in range(1, max_iter + 1):
        y = M @ x
        norm = np.linalg.norm(y)
        if norm == 0.0:
            return 0.0
        new = float(x @ y)
        x = y / norm
        if lam is not None and abs(new - lam) <= rtol * max(abs(new), 1.0):
            return new
        lam = new
    raise NumericError(
        "power iteration did not converge",
        iterations=max_iter,
        last_estimate=lam,
        residual=float(np.linalg.norm(M @ x - lam * x)),
    )
