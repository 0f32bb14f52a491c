"""Combinatorial Hodge Laplacians and spectral-gap interlacing.

Degree-q Laplacian ``L_q = ∂_q^T ∂_q + ∂_{q+1} ∂_{q+1}^T`` on a finite
simplicial complex.  On this finite-dimensional model the gap inequality
``λ1(q) >= min(λ1(q-1), λ1(q+1))`` is an exact consequence of ∂ conjugating
the nonzero spectra of neighbouring degrees.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .errors import DomainError
from .linalg import jacobi_eigvalsh

KERNEL_CUTOFF = 1e-9
INTERLACE_TOL = 1e-9


class SimplicialComplex:
    """Downward-closed family of sorted vertex tuples on vertices 1..V."""

    def __init__(self, maximal_simplices, vertices=None):
        faces = set()
        for s in maximal_simplices:
            s = tuple(sorted(int(v) for v in s))
            if len(set(s)) != len(s):
                raise DomainError(f"simplex {s} repeats a vertex")
            for k in range(1, len(s) + 1):
                faces.update(combinations(s, k))
        if vertices is None:
            vertices = max((v for f in faces for v in f), default=0)
        for v in range(1, int(vertices) + 1):
            faces.add((v,))
        if any(v < 1 or v > vertices for f in faces for v in f):
            raise DomainError("simplex vertex outside 1..V")
        self.vertices = int(vertices)
        self._by_degree = {}
        for f in faces:
            self._by_degree.setdefault(len(f) - 1, []).append(f)
        for q in self._by_degree:
            self._by_degree[q].sort()

    @property
    def dimension(self):
        return max(self._by_degree, default=-1)

    def simplices(self, q):
        return list(self._by_degree.get(q, []))

    def __repr__(self):
        counts = [len(self._by_degree.get(q, [])) for q in range(self.dimension + 1)]
        return f"SimplicialComplex(V={self.vertices}, f-vector={counts})"

    @classmethod
    def from_json_dict(cls, data):
        try:
            return cls(data["maximal_simplices"], vertices=int(data["vertices"]))
        except (KeyError, TypeError, ValueError) as exc:
            raise DomainError(f"malformed complex JSON: {exc}") from exc

    @classmethod
    def load(cls, path):
        with open(path) as fh:
            try:
                data = json.load(fh)
            except json.JSONDecodeError as exc:
                raise DomainError(f"invalid JSON in {path}: {exc}") from exc
        return cls.from_json_dict(data)


def clique_complex(edges, vertices):
    """Flag complex of a graph: every clique spans a simplex."""
    adj = {v: set() for v in range(1, vertices + 1)}
    for a, b in edges:
        adj[a].add(b)
        adj[b].add(a)
    cliques = []

    def grow(clique, cand):
        extended = False
        for v in sorted(cand):
            if v > clique[-1]:
                extended = True
                grow(clique + [v], cand & adj[v])
        if not extended:
            cliques.append(tuple(clique))

    for v in range(1, vertices + 1):
        grow([v], adj[v])
    return SimplicialComplex(cliques, vertices=vertices)


def random_clique_complex(vertices, edge_prob, seed):
    rng = np.random.default_rng(seed)
    edges = [e for e in combinations(range(1, vertices + 1), 2) if rng.random() < edge_prob]
    return clique_complex(edges, vertices)


def boundary_matrix(K: SimplicialComplex, q: int) -> np.ndarray:
    """Integer matrix of ∂_q from q-chains to (q-1)-chains.

    The face omitting position i of a sorted simplex carries sign (-1)^i.
    """
    if q < 1:
        raise DomainError(f"boundary is defined for q >= 1, got {q}")
    cols = K.simplices(q)
    rows = K.simplices(q - 1)
    pos = {s: r for r, s in enumerate(rows)}
    D = np.zeros((len(rows), len(cols)), dtype=np.int64)
    for c, s in enumerate(cols):
        for i in range(len(s)):
            D[pos[s[:i] + s[i + 1:]], c] = -1 if i % 2 else 1
    return D


def hodge_laplacian(K: SimplicialComplex, q: int) -> np.ndarray:
    n_q = len(K.simplices(q))
    if q < 0 or n_q == 0:
        raise DomainError(f"complex has no simplices in degree {q}")
    L = np.zeros((n_q, n_q), dtype=np.int64)
    if q >= 1:
        D = boundary_matrix(K, q)
        L += D.T @ D
    up = boundary_matrix(K, q + 1)
    if up.size:
        L += up @ up.T
    return L.astype(float)


def spectrum(K, q):
    return jacobi_eigvalsh(hodge_laplacian(K, q))


def spectral_gap(K: SimplicialComplex, q: int) -> float:
    """Smallest eigenvalue of L_q above the kernel cutoff (inf if none)."""
    w = spectrum(K, q)
    nonzero = w[w > KERNEL_CUTOFF]
    return float(nonzero[0]) if nonzero.size else float("inf")


def betti(K, q):
    return int(np.sum(spectrum(K, q) <= KERNEL_CUTOFF))


@dataclass
class GapReport:
    lambda1: list
    betti: list
    interlacing_ok: list

    @property
    def ok(self):
        return all(self.interlacing_ok)

    def to_dict(self):
        return {
            "degrees": list(range(len(self.lambda1))),
            "lambda1": self.lambda1,
            "betti": self.betti,
            "interlacing_ok": self.interlacing_ok,
            "ok": self.ok,
        }


def check_interlacing(K: SimplicialComplex) -> GapReport:
    gaps, bettis = [], []
    for q in range(K.dimension + 1):
        w = spectrum(K, q)
        nonzero = w[w > KERNEL_CUTOFF]
        gaps.append(float(nonzero[0]) if nonzero.size else float("inf"))
        bettis.append(int(w.size - nonzero.size))
    inf = float("inf")
    ok = []
    for q, g in enumerate(gaps):
        left = gaps[q - 1] if q > 0 else inf
        right = gaps[q + 1] if q + 1 < len(gaps) else inf
        ok.append(bool(g >= min(left, right) - INTERLACE_TOL))
    return GapReport(gaps, bettis, ok)
