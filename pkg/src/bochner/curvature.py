"""Algebraic curvature tensors at a point, in an orthonormal frame.

Sign convention: ``R[i, j, k, l] = <R(v_i, v_j) v_k, v_l>`` with the unit
2-sphere having ``R_1212 = -1``, so the sectional curvature of an
orthonormal pair is ``K(u, v) = -R(u, v, u, v)``.

Indices are 0-based in arrays and 1-based in every public call that takes
index labels (``reconstruct_*``, the JSON format).
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from itertools import product as iproduct
from math import sqrt

import numpy as np

from .errors import DomainError, SymmetryError
from .linalg import random_orthogonal

SYMMETRY_TOL = 1e-12
ORTHO_TOL = 1e-10


@dataclass(frozen=True)
class SymmetryReport:
    antisymmetry: float
    pair: float
    bianchi: float

    @property
    def ok(self):
        return max(self.antisymmetry, self.pair, self.bianchi) <= SYMMETRY_TOL


class RiemannTensor:
    """Dense rank-4 curvature tensor; immutable after construction."""

    __slots__ = ("entries",)

    def __init__(self, entries):
        arr = np.array(entries, dtype=float)
        if arr.ndim != 4 or len(set(arr.shape)) != 1:
            raise DomainError(f"expected an (n, n, n, n) array, got {arr.shape}")
        arr.setflags(write=False)
        self.entries = arr

    @property
    def n(self):
        return self.entries.shape[0]

    def __getitem__(self, key):
        return self.entries[key]

    def __add__(self, other):
        return RiemannTensor(self.entries + other.entries)

    def __sub__(self, other):
        return RiemannTensor(self.entries - other.entries)

    def __mul__(self, c):
        return RiemannTensor(c * self.entries)

    __rmul__ = __mul__

    def __repr__(self):
        return f"RiemannTensor(n={self.n})"


def validate(R: RiemannTensor) -> SymmetryReport:
    """Maximum defects of the three algebraic symmetries."""
    T = R.entries
    anti = max(
        np.max(np.abs(T + T.transpose(1, 0, 2, 3)), initial=0.0),
        np.max(np.abs(T + T.transpose(0, 1, 3, 2)), initial=0.0),
    )
    pair = np.max(np.abs(T - T.transpose(2, 3, 0, 1)), initial=0.0)
    # R_ijkl + R_jkil + R_kijl
    bianchi = np.max(
        np.abs(T + T.transpose(2, 0, 1, 3) + T.transpose(1, 2, 0, 3)), initial=0.0
    )
    return SymmetryReport(float(anti), float(pair), float(bianchi))


def require_valid(R):
    rep = validate(R)
    if not rep.ok:
        raise SymmetryError(f"curvature tensor fails symmetry checks: {rep}")
    return R


def from_symmetric_pair(h, k=None):
    """``R_ijkl = h_il k_jk + k_il h_jk - h_ik k_jl - k_ik h_jl`` (halved when k is None).

    With ``k = None`` this is ``h_il h_jk - h_ik h_jl``, the Gauss-equation
    form of a rank-one second fundamental form.
    """
    h = np.asarray(h, dtype=float)
    if k is None:
        T = np.einsum("il,jk->ijkl", h, h) - np.einsum("ik,jl->ijkl", h, h)
    else:
        k = np.asarray(k, dtype=float)
        T = (
            np.einsum("il,jk->ijkl", h, k)
            + np.einsum("il,jk->ijkl", k, h)
            - np.einsum("ik,jl->ijkl", h, k)
            - np.einsum("ik,jl->ijkl", k, h)
        ) / 2.0
    return RiemannTensor(T)


def constant_curvature(n: int, kappa: float) -> RiemannTensor:
    """Space form: ``R_ijkl = -kappa (d_ik d_jl - d_il d_jk)``."""
    if n < 2:
        raise DomainError(f"dimension must be >= 2, got {n}")
    d = np.eye(n)
    T = -kappa * (np.einsum("ik,jl->ijkl", d, d) - np.einsum("il,jk->ijkl", d, d))
    return RiemannTensor(T)


def zero(n: int) -> RiemannTensor:
    return RiemannTensor(np.zeros((n, n, n, n)))


def product(R1: RiemannTensor, R2: RiemannTensor) -> RiemannTensor:
    """Riemannian product: block-diagonal placement, mixed components zero."""
    n1, n2 = R1.n, R2.n
    T = np.zeros((n1 + n2,) * 4)
    T[:n1, :n1, :n1, :n1] = R1.entries
    T[n1:, n1:, n1:, n1:] = R2.entries
    return RiemannTensor(T)


def random_tensor(n: int, seed, terms: int | None = None) -> RiemannTensor:
    """Random algebraic curvature tensor, reproducible from `seed`.

    Sum of ``c_a * R_{h_a}`` over ``n(n+1)/2`` random symmetric ``h_a`` with
    ``c_a`` uniform in [-1, 1]; every symmetry holds by construction.
    """
    if n < 2:
        raise DomainError(f"dimension must be >= 2, got {n}")
    rng = np.random.default_rng(seed)
    m = terms if terms is not None else n * (n + 1) // 2
    T = np.zeros((n,) * 4)
    for _ in range(m):
        B = rng.standard_normal((n, n))
        h = (B + B.T) / 2.0
        c = rng.uniform(-1.0, 1.0)
        T += c * from_symmetric_pair(h).entries
    return RiemannTensor(T)


def check_frame(Q, tol=ORTHO_TOL):
    Q = np.asarray(Q, dtype=float)
    if Q.ndim != 2 or Q.shape[0] != Q.shape[1]:
        raise DomainError(f"frame must be square, got shape {Q.shape}")
    defect = np.max(np.abs(Q.T @ Q - np.eye(Q.shape[0])), initial=0.0)
    if defect > tol:
        raise DomainError(f"frame is not orthogonal (defect {defect:.3g})")
    return Q


def random_frame(n, seed_or_rng):
    rng = (
        seed_or_rng
        if isinstance(seed_or_rng, np.random.Generator)
        else np.random.default_rng(seed_or_rng)
    )
    return random_orthogonal(n, rng)


def _rotate_entries(T, Q):
    # R'_abcd = Q_ai Q_bj Q_ck Q_dl R_ijkl, one index at a time
    T = np.tensordot(Q, T, axes=(1, 0))
    T = np.tensordot(Q, T, axes=(1, 1)).transpose(1, 0, 2, 3)
    T = np.tensordot(Q, T, axes=(1, 2)).transpose(1, 2, 0, 3)
    T = np.tensordot(Q, T, axes=(1, 3)).transpose(1, 2, 3, 0)
    return T


def rotate(R: RiemannTensor, Q) -> RiemannTensor:
    """Express `R` in the frame whose vectors are the rows of `Q`."""
    Q = check_frame(Q)
    return RiemannTensor(_rotate_entries(R.entries, Q))


def curvature_form(R: RiemannTensor, u, v, w, z) -> float:
    """``R(u, v, w, z)`` for arbitrary vectors."""
    return float(np.einsum("ijkl,i,j,k,l->", R.entries, u, v, w, z))


def sectional(R: RiemannTensor, u, v) -> float:
    """Sectional curvature of the plane spanned by an orthonormal pair."""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    if (
        abs(u @ u - 1.0) > ORTHO_TOL
        or abs(v @ v - 1.0) > ORTHO_TOL
        or abs(u @ v) > ORTHO_TOL
    ):
        raise DomainError("sectional curvature needs an orthonormal pair")
    return -curvature_form(R, u, v, u, v)


def sectional_matrix(R: RiemannTensor, Q) -> np.ndarray:
    """``K[i, j]`` = sectional curvature of rows i, j of the frame `Q`."""
    Rq = _rotate_entries(R.entries, np.asarray(Q, dtype=float))
    return -np.einsum("ijij->ij", Rq)


def ricci(R: RiemannTensor) -> np.ndarray:
    """Ricci form ``Ric(u, u) = sum_j K(u, e_j)``, i.e. ``Ric_il = sum_j R_ijjl``."""
    return np.einsum("ijjl->il", R.entries)


# ---------------------------------------------------------------------------
# reconstruction from sectional curvatures
# ---------------------------------------------------------------------------


def sectional_oracle(R: RiemannTensor):
    """Sectional curvature as a function of an orthonormal pair, hiding `R`."""

    def K(u, v):
        return sectional(R, u, v)

    K.n = R.n
    return K


def _unit(n, i):
    e = np.zeros(n)
    e[i - 1] = 1.0
    return e


def _mixed(K, n, i, j, l, frame=None):
    """``R(e_i, e_j, e_i, e_l)`` from sectional curvatures, for a frame `frame`."""
    E = np.eye(n) if frame is None else frame
    ei, ej, el = E[i - 1], E[j - 1], E[l - 1]
    if j == l:
        return -K(ei, ej)
    return 0.5 * K(ei, el) + 0.5 * K(ei, ej) - K(ei, (el + ej) / sqrt(2.0))


def reconstruct_mixed(K, i: int, j: int, l: int, n: int | None = None) -> float:
    """Entry ``R_ijil`` from sectional curvatures alone.

    ``-K(i, j)`` when ``j == l``; otherwise
    ``K(i,l)/2 + K(i,j)/2 - K(i, (v_l + v_j)/sqrt 2)``.
    """
    n = n if n is not None else K.n
    if i in (j, l):
        raise DomainError(f"reconstruct_mixed needs i distinct from j, l; got {(i, j, l)}")
    return _mixed(K, n, i, j, l)


def _diff_term(K, n, a, b, x, y):
    """``R((e_a - e_b)/√2, e_x, (e_a - e_b)/√2, e_y)`` for x != y."""
    # expand by bilinearity: (R_axay - R_axby - R_bxay + R_bxby)/2
    # the cross terms are what the mixed identity cannot see directly, so
    # rotate into the frame where (e_a - e_b)/√2 is a basis vector.
    E = np.eye(n)
    w = (E[a - 1] - E[b - 1]) / sqrt(2.0)
    w2 = (E[a - 1] + E[b - 1]) / sqrt(2.0)
    frame = E.copy()
    frame[a - 1] = w
    frame[b - 1] = w2
    return _mixed(K, n, a, x, y, frame=frame)


def reconstruct_full(K, i: int, j: int, k: int, l: int, n: int | None = None) -> float:
    """Entry ``R_ijkl`` (four distinct indices) from sectional curvatures.

    Evaluates ``3 R_ijkl = -2 R_(i-k)j(i-k)l + 2 R_(j-k)i(j-k)l + R_ijil
    + R_kjkl - R_jijl - R_kikl`` with every term obtained from the mixed
    identity, the difference terms in a frame containing ``(v_i - v_k)/√2``.
    """
    n = n if n is not None else K.n
    if len({i, j, k, l}) != 4:
        raise DomainError(f"reconstruct_full needs distinct indices, got {(i, j, k, l)}")
    t1 = _diff_term(K, n, i, k, j, l)
    t2 = _diff_term(K, n, j, k, i, l)
    return (
        -2.0 * t1
        + 2.0 * t2
        + _mixed(K, n, i, j, l)
        + _mixed(K, n, k, j, l)
        - _mixed(K, n, j, i, l)
        - _mixed(K, n, k, i, l)
    ) / 3.0


def reconstruct_tensor(K, n: int) -> RiemannTensor:
    """Rebuild every entry of a tensor from its sectional curvatures."""
    T = np.zeros((n,) * 4)
    for i, j, k, l in iproduct(range(1, n + 1), repeat=4):
        if i == j or k == l:
            continue
        if i == k:
            v = reconstruct_mixed(K, i, j, l, n)
        elif i == l:
            v = -reconstruct_mixed(K, i, j, k, n)
        elif j == k:
            v = -reconstruct_mixed(K, j, i, l, n)
        elif j == l:
            v = reconstruct_mixed(K, j, i, k, n)
        else:
            v = reconstruct_full(K, i, j, k, l, n)
        T[i - 1, j - 1, k - 1, l - 1] = v
    return RiemannTensor(T)


# ---------------------------------------------------------------------------
# JSON
# ---------------------------------------------------------------------------


def _images(i, j, k, l, v):
    for (a, b, c, d), s in (((i, j, k, l), 1), ((j, i, k, l), -1), ((i, j, l, k), -1), ((j, i, l, k), 1)):
        yield (a, b, c, d), s * v
        yield (c, d, a, b), s * v


def from_json_dict(data) -> RiemannTensor:
    """Complete a generating set of entries by symmetry and validate the result."""
    try:
        n = int(data["n"])
        raw = [(int(e["i"]), int(e["j"]), int(e["k"]), int(e["l"]), float(e["v"])) for e in data["entries"]]
    except (KeyError, TypeError, ValueError) as exc:
        raise DomainError(f"malformed tensor JSON: {exc}") from exc
    if n < 1:
        raise DomainError(f"malformed tensor JSON: n={n}")
    T = np.zeros((n,) * 4)
    seen = np.zeros((n,) * 4, dtype=bool)
    for i, j, k, l, v in raw:
        if not all(1 <= x <= n for x in (i, j, k, l)):
            raise DomainError(f"index out of range in entry {(i, j, k, l)}")
        for (a, b, c, d), val in _images(i, j, k, l, v):
            idx = (a - 1, b - 1, c - 1, d - 1)
            if seen[idx] and abs(T[idx] - val) > SYMMETRY_TOL:
                raise SymmetryError(f"inconsistent entries at {(a, b, c, d)}")
            T[idx] = val
            seen[idx] = True
    return RiemannTensor(T)


def to_json_dict(R: RiemannTensor, atol=0.0) -> dict:
    """Canonical representatives: i<j, k<l, (i,j) <= (k,l); zeros omitted."""
    n = R.n
    entries = []
    for i in range(n):
        for j in range(i + 1, n):
            for k in range(i, n):
                for l in range(k + 1, n):
                    if (i, j) > (k, l):
                        continue
                    v = float(R.entries[i, j, k, l])
                    if abs(v) > atol:
                        entries.append({"i": i + 1, "j": j + 1, "k": k + 1, "l": l + 1, "v": v})
    return {"n": n, "entries": entries}


def load(path) -> RiemannTensor:
    with open(path) as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise DomainError(f"invalid JSON in {path}: {exc}") from exc
    return from_json_dict(data)


def dump(R: RiemannTensor, path):
    with open(path, "w") as fh:
        json.dump(to_json_dict(R), fh, indent=1)
