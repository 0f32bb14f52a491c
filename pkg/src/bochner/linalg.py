"""Symmetric eigensolver by cyclic Jacobi rotations.

Sweeps use the round-robin (Brent-Luk) ordering: each round applies
floor(N/2) disjoint plane rotations at once, so one sweep is N-1 (or N)
matrix products instead of N(N-1)/2 scalar updates.
"""

from __future__ import annotations

import numpy as np

from .errors import NumericError

MAX_DIM = 70  # C(8, 4)


def _round_robin(N):
    """Pairings for one sweep; every unordered pair appears exactly once."""
    m = N + (N % 2)
    players = list(range(m))
    rounds = []
    for _ in range(m - 1):
        pairs = []
        for a in range(m // 2):
            p, q = players[a], players[m - 1 - a]
            if p < N and q < N:
                pairs.append((min(p, q), max(p, q)))
        rounds.append(pairs)
        players = [players[0]] + [players[-1]] + players[1:-1]
    return rounds


def _off(A):
    return np.linalg.norm(A - np.diag(np.diag(A)))


def jacobi_eigh(A, tol=1e-12, max_sweeps=60):
    """Eigenvalues (ascending) and orthonormal eigenvectors of a symmetric matrix.

    Parameters
    ----------
    A : (N, N) array_like
        Symmetric matrix, N <= 70.
    tol : float
        Stop once the off-diagonal Frobenius norm is at most
        ``tol * ||A||_F``.

    Returns
    -------
    w : (N,) ndarray
    V : (N, N) ndarray
        Columns are eigenvectors, ``A @ V = V @ diag(w)``.
    """
    A = np.array(A, dtype=float)
    N = A.shape[0]
    if A.shape != (N, N):
        raise ValueError(f"expected a square matrix, got shape {A.shape}")
    if N > MAX_DIM:
        raise ValueError(f"dimension {N} exceeds cap {MAX_DIM}")
    V = np.eye(N)
    if N <= 1:
        return np.diag(A).copy(), V
    A = 0.5 * (A + A.T)
    scale = np.linalg.norm(A)
    if scale == 0.0:
        return np.zeros(N), V
    rounds = _round_robin(N)
    for sweep in range(max_sweeps):
        if _off(A) <= tol * scale:
            break
        for pairs in rounds:
            P = np.array([pq[0] for pq in pairs])
            Q = np.array([pq[1] for pq in pairs])
            apq = A[P, Q]
            active = np.abs(apq) > 1e-300
            if not active.any():
                continue
            P, Q, apq = P[active], Q[active], apq[active]
            theta = (A[Q, Q] - A[P, P]) / (2.0 * apq)
            t = np.sign(theta) / (np.abs(theta) + np.sqrt(1.0 + theta * theta))
            t[theta == 0.0] = 1.0
            c = 1.0 / np.sqrt(1.0 + t * t)
            s = t * c
            J = np.eye(N)
            J[P, P] = c
            J[Q, Q] = c
            J[P, Q] = s
            J[Q, P] = -s
            A = J.T @ A @ J
            A = 0.5 * (A + A.T)
            V = V @ J
    else:
        if _off(A) > tol * scale:
            raise NumericError(
                "Jacobi sweeps did not converge",
                sweeps=max_sweeps,
                off_norm=float(_off(A)),
                scale=float(scale),
            )
    w = np.diag(A).copy()
    order = np.argsort(w, kind="stable")
    return w[order], V[:, order]


def jacobi_eigvalsh(A, tol=1e-12):
    return jacobi_eigh(A, tol=tol)[0]


def sym_expm(A, t=1.0):
    """``exp(t A)`` for symmetric `A` through its eigendecomposition."""
    w, V = jacobi_eigh(A)
    return (V * np.exp(t * w)) @ V.T


def random_orthogonal(n, rng):
    """Haar-distributed orthogonal matrix from a numpy Generator."""
    Z = rng.standard_normal((n, n))
    Q, R = np.linalg.qr(Z)
    return Q * np.sign(np.diag(R))
