"""Sectional-curvature sums over frames and the pinching criterion for ℛ^p > 0."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import permutations
from math import comb

import numpy as np

from .curvature import (
    RiemannTensor,
    check_frame,
    constant_curvature,
    product,
    random_frame,
    sectional_matrix,
)
from .errors import DomainError
from .linalg import random_orthogonal
from .multiindex import enumerate_indices, overlap
from .weitzenbock import assemble, min_eigenvalue

PINCH_MARGIN = 1e-9
DEFAULT_RESTARTS = 32


def sum_p(R: RiemannTensor, Q, p: int) -> float:
    """``Σ_{i<=p<j} K(w_i, w_j)`` for the rows ``w`` of an orthogonal `Q`."""
    Q = check_frame(Q)
    n = Q.shape[0]
    if not 1 <= p <= n - 1:
        raise DomainError(f"need 1 <= p <= n-1, got p={p}, n={n}")
    return float(sectional_matrix(R, Q)[:p, p:].sum())


def _partial_ricci(Rmat, P):
    """``Ric_P(x, y) = -Σ_bd R(x, b, y, d) P_bd`` for a batch of projectors P."""
    B, n, _ = P.shape
    return -(P.reshape(B, n * n) @ Rmat.T).reshape(B, n, n)


def _projector(W, rows):
    if not rows:
        return np.zeros(W.shape[:1] + W.shape[1:])
    V = W[:, rows]
    return np.einsum("zjb,zjd->zbd", V, V)


def _batch_sum(Rmat, W, p):
    n = W.shape[1]
    ric = _partial_ricci(Rmat, _projector(W, list(range(p, n))))
    return np.einsum("zib,zbd,zid->z", W[:, :p], ric, W[:, :p])


def _form(ric, u, v):
    return np.einsum("zb,zbd,zd->z", u, ric, v)


@dataclass
class Extremum:
    m: float
    M: float
    witness_min_frame: np.ndarray
    witness_max_frame: np.ndarray
    restart_minima: np.ndarray
    restart_maxima: np.ndarray
    sweeps: int

    @property
    def spread(self):
        """(best - worst) across restarts for the min and the max searches."""
        return (
            float(self.restart_minima.max() - self.restart_minima.min()),
            float(self.restart_maxima.max() - self.restart_maxima.min()),
        )


def extremize_sum(R: RiemannTensor, p: int, restarts: int = DEFAULT_RESTARTS, seed=0,
                  tol=1e-12, max_sweeps=500) -> Extremum:
    """Local minimum and maximum of ``Σ_p`` over the orthogonal group.

    Cyclic coordinate search over Givens rotations in the planes (a, b),
    a < p <= b, from `restarts` random frames.  Rotations inside either
    block leave ``Σ_p`` unchanged, and along a mixed plane ``Σ_p`` is exactly
    ``α + β cos 2θ + γ sin 2θ``, so each coordinate step jumps to the optimal
    angle.  Sweeps stop when no restart gains more than ``tol`` (relative).
    """
    n = R.n
    if not 1 <= p <= n - 1:
        raise DomainError(f"need 1 <= p <= n-1, got p={p}, n={n}")
    if restarts < 1:
        raise DomainError("restarts must be >= 1")
    rng = np.random.default_rng(seed)
    starts = np.stack([random_orthogonal(n, rng) for _ in range(restarts)])
    W = np.concatenate([starts, starts.copy()])
    sign = np.concatenate([-np.ones(restarts), np.ones(restarts)])  # maximise sign * Σ_p
    Rmat = R.entries.transpose(0, 2, 1, 3).reshape(n * n, n * n)
    scale = max(np.max(np.abs(R.entries), initial=0.0), 1e-300)
    planes = [(a, b) for a in range(p) for b in range(p, n)]
    sweeps = 0
    for sweeps in range(1, max_sweeps + 1):
        gained = np.zeros(len(W))
        for a, b in planes:
            # partial Ricci forms of span{w_a, w_b} against the rest of each block
            hi = _partial_ricci(Rmat, _projector(W, [j for j in range(p, n) if j != b]))
            lo = _partial_ricci(Rmat, _projector(W, [i for i in range(p) if i != a]))
            wa, wb = W[:, a], W[:, b]
            beta = sign * 0.5 * (
                _form(hi, wa, wa) + _form(lo, wb, wb) - _form(hi, wb, wb) - _form(lo, wa, wa)
            )
            gamma = sign * (_form(hi, wa, wb) - _form(lo, wa, wb))
            gain = np.hypot(beta, gamma) - beta
            move = gain > tol * scale
            if not move.any():
                continue
            half = np.where(move, np.arctan2(gamma, beta), 0.0) / 2.0
            c, s = np.cos(half)[:, None], np.sin(half)[:, None]
            W[:, a], W[:, b] = c * wa + s * wb, -s * wa + c * wb
            gained = np.maximum(gained, np.where(move, gain, 0.0))
        if gained.max() <= tol * scale:
            break
    values = _batch_sum(Rmat, W, p)
    lo, hi = values[:restarts], values[restarts:]
    i_lo, i_hi = int(np.argmin(lo)), int(np.argmax(hi))
    return Extremum(
        m=float(lo[i_lo]),
        M=float(hi[i_hi]),
        witness_min_frame=W[i_lo].copy(),
        witness_max_frame=W[restarts + i_hi].copy(),
        restart_minima=lo.copy(),
        restart_maxima=hi.copy(),
        sweeps=sweeps,
    )


def _penalty(n, p):
    return Fraction(p * (n - p), 2) + Fraction(4, 3) * comb(p, 2) * comb(n - p, 2)


def pinch_constant(n: int, p: int, exact: bool = False):
    """Pinching threshold C(n, p) below which ℛ^p > 0 is not guaranteed."""
    if not 2 <= p <= n - 2:
        raise DomainError(f"C(n, p) is defined for 2 <= p <= n-2, got n={n}, p={p}")
    x = _penalty(n, p)
    c = x / (1 + x)
    return c if exact else float(c)


def cor_lower_bound(A: float, C: float, n: int, p: int) -> float:
    """Lower bound on ℛ^p given ``C A < Σ_p < A``."""
    if A <= 0 or not 0 < C <= 1:
        raise DomainError(f"need A > 0 and 0 < C <= 1, got A={A}, C={C}")
    x = float(_penalty(n, p))
    return C * A - x * (A - C * A)


@dataclass
class PinchReport:
    n: int
    p: int
    m: float
    M: float
    C: float
    pinched: bool
    A_interval: tuple | None
    witness_min_frame: np.ndarray
    witness_max_frame: np.ndarray
    spread: tuple
    restarts: int
    seed: object

    @property
    def A_mid(self):
        if self.A_interval is None:
            return None
        return 0.5 * (self.A_interval[0] + self.A_interval[1])

    def corollary_bound(self, A=None):
        """``B - X (A - B)`` with ``B = m`` and A the admissible midpoint by default."""
        A = self.A_mid if A is None else A
        if A is None:
            return None
        return cor_lower_bound(A, self.m / A, self.n, self.p)

    def to_dict(self):
        return {
            "n": self.n,
            "p": self.p,
            "m": self.m,
            "M": self.M,
            "C": self.C,
            "pinched": self.pinched,
            "A_interval": list(self.A_interval) if self.A_interval else None,
            "A_mid": self.A_mid,
            "corollary_bound": self.corollary_bound(),
            "restart_spread": list(self.spread),
            "restarts": self.restarts,
            "seed": self.seed,
            "witness_min_frame": self.witness_min_frame.tolist(),
            "witness_max_frame": self.witness_max_frame.tolist(),
        }


def pinch_verdict(m, M, C):
    pinched = bool(M > 0 and m > C * M + PINCH_MARGIN * abs(M))
    return pinched, ((M, m / C) if pinched else None)


def is_pinched(R: RiemannTensor, p: int, restarts: int = DEFAULT_RESTARTS, seed=0) -> PinchReport:
    n = R.n
    C = pinch_constant(n, p)
    ext = extremize_sum(R, p, restarts=restarts, seed=seed)
    pinched, interval = pinch_verdict(ext.m, ext.M, C)
    return PinchReport(
        n=n, p=p, m=ext.m, M=ext.M, C=C, pinched=pinched, A_interval=interval,
        witness_min_frame=ext.witness_min_frame, witness_max_frame=ext.witness_max_frame,
        spread=ext.spread, restarts=restarts, seed=seed,
    )


@dataclass
class TBoundsReport:
    bound_single: float
    bound_double: float
    worst_single: float
    worst_double: float
    worst_far: float

    @property
    def ratio_single(self):
        return _ratio(self.worst_single, self.bound_single)

    @property
    def ratio_double(self):
        return _ratio(self.worst_double, self.bound_double)

    @property
    def holds(self):
        return self.ratio_single <= 1.0 + 1e-12 and self.ratio_double <= 1.0 + 1e-12 and self.worst_far <= 1e-12


def _ratio(x, bound):
    if bound > 0:
        return x / bound
    return 0.0 if x <= 1e-12 else float("inf")


def t_bounds_check(R: RiemannTensor, p: int, A: float, B: float, op=None) -> TBoundsReport:
    """Off-diagonal entries of ℛ^p against the bounds implied by ``B < Σ_p < A``.

    Entries with ``|J ∩ K| = p-1`` are compared with ``(A-B)/2``, those with
    ``|J ∩ K| = p-2`` with ``4(A-B)/3``, and all farther entries with zero.
    """
    op = op if op is not None else assemble(R, p)
    basis = enumerate_indices(R.n, p)
    worst = {1: 0.0, 2: 0.0, 3: 0.0}
    for a, J in enumerate(basis):
        for b in range(a + 1, len(basis)):
            d = min(p - overlap(J, basis[b]), 3)
            worst[d] = max(worst[d], abs(op.matrix[a, b]))
    return TBoundsReport(0.5 * (A - B), 4.0 / 3.0 * (A - B), worst[1], worst[2], worst[3])


def lawson_simons_rhs(alpha_norm_sq: float, mean_curv_norm_sq: float, n: int) -> float:
    """``|α|²/2 - n|H|²/2`` for an isometric immersion with second fundamental form α."""
    if alpha_norm_sq < 0 or mean_curv_norm_sq < 0:
        raise DomainError("norms must be nonnegative")
    return alpha_norm_sq / 2.0 - n * mean_curv_norm_sq / 2.0


# ---------------------------------------------------------------------------
# surface x 4-sphere
# ---------------------------------------------------------------------------


def surface_times_sphere(a: float) -> RiemannTensor:
    """Product of a surface of curvature ``-a`` with the unit 4-sphere."""
    return product(constant_curvature(2, -a), constant_curvature(4, 1.0))


@dataclass
class ProductExampleReport:
    a: float
    diagonal: dict
    diagonal_by_surface_count: dict
    offdiag_max: float
    min_eigenvalue: float
    positive: bool
    coordinate_sums: dict
    frame_samples: np.ndarray
    pinch: dict
    checks: dict = field(default_factory=dict)
    positivity_threshold: float = 4.0

    @property
    def ok(self):
        return all(self.checks.values())

    def to_dict(self):
        return {
            "a": self.a,
            "diagonal_multiplicities": {repr(k): v for k, v in self.diagonal.items()},
            "diagonal_by_surface_count": {str(k): v for k, v in self.diagonal_by_surface_count.items()},
            "offdiag_max": self.offdiag_max,
            "min_eigenvalue": self.min_eigenvalue,
            "positive": self.positive,
            "positivity_threshold": self.positivity_threshold,
            "coordinate_sums": {str(k): sorted(v) for k, v in self.coordinate_sums.items()},
            "frame_samples": {
                "count": int(len(self.frame_samples)),
                "min": float(self.frame_samples.min()),
                "max": float(self.frame_samples.max()),
            },
            "pinch": {str(k): v.to_dict() for k, v in self.pinch.items()},
            "checks": self.checks,
            "ok": self.ok,
        }


def product_example(a: float, samples: int = 200, restarts: int = DEFAULT_RESTARTS, seed=0) -> ProductExampleReport:
    """Full check of ℛ^3 and the pinching behaviour on surface x S^4."""
    if a <= 0:
        raise DomainError(f"a must be positive, got {a}")
    R = surface_times_sphere(a)
    op = assemble(R, 3)
    M = op.matrix
    diag = np.diag(M)
    basis = op.basis
    by_count = {}
    for I, v in zip(basis, diag):
        by_count.setdefault(sum(1 for i in I if i <= 2), set()).add(round(float(v), 12))
    off = float(np.max(np.abs(M - np.diag(diag))))
    lam = min_eigenvalue(op)

    coord = {}
    for p in (2, 3):
        vals = set()
        for perm in permutations(range(6)):
            Q = np.eye(6)[list(perm)]
            vals.add(round(sum_p(R, Q, p), 12))
        coord[p] = vals

    rng = np.random.default_rng(seed)
    samples_arr = np.array([sum_p(R, random_frame(6, rng), 3) for _ in range(samples)])
    pinch = {p: is_pinched(R, p, restarts=restarts, seed=seed) for p in (2, 3)}

    lo, hi = min(3.0, 4.0 - a), max(3.0, 4.0 - a)
    checks = {
        "diagonal_values": set(np.round(diag, 12)) <= {round(3.0, 12), round(4.0 - a, 12)},
        "one_surface_index_gives_4_minus_a": by_count.get(1) == {round(4.0 - a, 12)},
        "offdiag_zero": off <= 1e-12,
        "coordinate_sums_p3": coord[3] == {round(3.0, 12), round(4.0 - a, 12)},
        "frame_samples_in_range": bool(
            samples_arr.min() >= lo - 1e-9 and samples_arr.max() <= hi + 1e-9
        ),
        "extremes_match_diagonal": bool(
            abs(pinch[3].m - lo) <= 1e-8 and abs(pinch[3].M - hi) <= 1e-8
        ),
        "min_eigenvalue_matches": abs(lam - lo) <= 1e-10,
        "not_pinched_p2": not pinch[2].pinched,
    }
    return ProductExampleReport(
        a=a,
        diagonal=dict(Counter(np.round(diag, 12).tolist())),
        diagonal_by_surface_count={k: sorted(v) for k, v in sorted(by_count.items())},
        offdiag_max=off,
        min_eigenvalue=lam,
        positive=lam > 0,
        coordinate_sums=coord,
        frame_samples=samples_arr,
        pinch=pinch,
        checks=checks,
    )


def pinched_family(n: int, p: int, seed, restarts: int = 8, shrink: float | None = None):
    """Tensor ``(1-t) S^n + t R0`` with t inside the pinched range, plus t.

    ``Σ_p`` is affine in t, so the extremes found once for ``R0`` give the
    extremes along the whole segment; t is then located by bisection on the
    pinching verdict.  The returned t is ``shrink * t*`` with ``shrink``
    drawn uniformly from (0.5, 1) unless given.
    """
    from .curvature import random_tensor

    rng = np.random.default_rng(seed)
    R0 = random_tensor(n, rng.integers(2**63))
    ext = extremize_sum(R0, p, restarts=restarts, seed=int(rng.integers(2**63)))
    base = p * (n - p)
    C = pinch_constant(n, p)

    def ok(t):
        m = (1 - t) * base + t * ext.m
        M = (1 - t) * base + t * ext.M
        return pinch_verdict(m, M, C)[0]

    lo, hi = 0.0, 1.0
    if ok(hi):
        lo = hi
    else:
        for _ in range(60):
            mid = 0.5 * (lo + hi)
            if ok(mid):
                lo = mid
            else:
                hi = mid
    u = shrink if shrink is not None else rng.uniform(0.5, 1.0)
    t = u * lo
    S = constant_curvature(n, 1.0)
    return (1 - t) * S + t * R0, t
