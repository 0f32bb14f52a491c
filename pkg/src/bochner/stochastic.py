"""Brownian motion on model manifolds and Feynman-Kac functionals.

Time is normalised to the semigroup ``exp(-t Δ / 2)``: increments have
variance ``dt`` per tangent direction.  Halving that variance silently
doubles every decay rate below.

Path ``i`` of a run with seed ``s`` draws all of its noise from its own
Philox stream keyed by ``(s, i)``.  Paths are simulated in fixed blocks of
``BLOCK`` and reduced in index order, so results do not depend on the
number of worker threads.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from math import exp

import numpy as np

from . import curvature
from .errors import DomainError, NumericError
from .linalg import jacobi_eigh
from .weitzenbock import assemble

BLOCK = 512
CHUNK = 1024  # time steps of noise drawn per refill

DEFAULT_DT = 1e-3
DEFAULT_N = 10_000
DEFAULT_T = 10.0


def path_stream(seed: int, index: int) -> np.random.Generator:
    """Independent generator for path `index` of a run seeded with `seed`."""
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=(int(index),))
    return np.random.Generator(np.random.Philox(ss))


# ---------------------------------------------------------------------------
# models
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Torus:
    n: int
    L: float = 1.0

    @property
    def dim(self):
        return self.n

    @property
    def ambient_dim(self):
        return self.n

    noise_dim = ambient_dim

    def default_point(self):
        return np.zeros(self.n)

    def step(self, X, Z, dt):
        return np.mod(X + np.sqrt(dt) * Z, self.L)

    def midpoint(self, x0, x1):
        d = x1 - x0
        d = d - self.L * np.round(d / self.L)
        return np.mod(x0 + 0.5 * d, self.L)

    def curvature_tensor(self):
        return curvature.zero(self.n)

    def project(self, X, V):
        return V

    def to_dict(self):
        return {"kind": "torus", "n": self.n, "L": self.L}


@dataclass(frozen=True)
class Sphere:
    """Unit n-sphere embedded in R^{n+1}."""

    n: int

    @property
    def dim(self):
        return self.n

    @property
    def ambient_dim(self):
        return self.n + 1

    noise_dim = ambient_dim

    def default_point(self):
        x = np.zeros(self.n + 1)
        x[-1] = 1.0
        return x

    def project(self, X, V):
        return V - np.sum(V * X, axis=-1, keepdims=True) * X

    def step(self, X, Z, dt):
        # tangential Gaussian step, then the exact great-circle exponential map
        V = self.project(X, np.sqrt(dt) * Z)
        r = np.linalg.norm(V, axis=-1, keepdims=True)
        safe = np.where(r > 0, r, 1.0)
        Y = np.cos(r) * X + np.sin(r) * (V / safe)
        return Y / np.linalg.norm(Y, axis=-1, keepdims=True)

    def midpoint(self, x0, x1):
        m = x0 + x1
        return m / np.linalg.norm(m)

    def curvature_tensor(self):
        return curvature.constant_curvature(self.n, 1.0)

    def to_dict(self):
        return {"kind": "sphere", "n": self.n}


@dataclass(frozen=True)
class Product:
    factors: tuple

    def __post_init__(self):
        object.__setattr__(self, "factors", tuple(self.factors))

    @property
    def dim(self):
        return sum(f.dim for f in self.factors)

    @property
    def ambient_dim(self):
        return sum(f.ambient_dim for f in self.factors)

    @property
    def noise_dim(self):
        return sum(f.noise_dim for f in self.factors)

    def _slices(self):
        out, start = [], 0
        for f in self.factors:
            out.append(slice(start, start + f.ambient_dim))
            start += f.ambient_dim
        return out

    def default_point(self):
        return np.concatenate([f.default_point() for f in self.factors])

    def step(self, X, Z, dt):
        return np.concatenate(
            [f.step(X[..., s], Z[..., s], dt) for f, s in zip(self.factors, self._slices())],
            axis=-1,
        )

    def project(self, X, V):
        return np.concatenate(
            [f.project(X[..., s], V[..., s]) for f, s in zip(self.factors, self._slices())],
            axis=-1,
        )

    def midpoint(self, x0, x1):
        return np.concatenate(
            [f.midpoint(x0[s], x1[s]) for f, s in zip(self.factors, self._slices())]
        )

    def curvature_tensor(self):
        R = self.factors[0].curvature_tensor()
        for f in self.factors[1:]:
            R = curvature.product(R, f.curvature_tensor())
        return R

    def to_dict(self):
        return {"kind": "product", "factors": [f.to_dict() for f in self.factors]}


def model_from_spec(spec):
    """Build a model from ``"sphere2"``, ``"torus3"`` or a dict description."""
    if isinstance(spec, (Torus, Sphere, Product)):
        return spec
    if isinstance(spec, str):
        for kind, cls in (("sphere", Sphere), ("torus", Torus)):
            if spec.startswith(kind) and spec[len(kind):].isdigit():
                return cls(int(spec[len(kind):]))
        raise DomainError(f"unknown model {spec!r}")
    if isinstance(spec, dict):
        kind = spec.get("kind")
        try:
            if kind == "torus":
                return Torus(int(spec["n"]), float(spec.get("L", 1.0)))
            if kind == "sphere":
                return Sphere(int(spec["n"]))
            if kind == "product":
                return Product(tuple(model_from_spec(f) for f in spec["factors"]))
        except (KeyError, TypeError, ValueError) as exc:
            raise DomainError(f"malformed model spec {spec!r}: {exc}") from exc
    raise DomainError(f"unknown model spec {spec!r}")


# ---------------------------------------------------------------------------
# functions on the model
# ---------------------------------------------------------------------------


class Field:
    """Vectorised scalar function of position, optionally known to be constant."""

    def __init__(self, fn, constant=None, bounds=None, spec=None):
        self.fn = fn
        self.constant = constant
        self.bounds = bounds
        self.spec = spec

    def __call__(self, X):
        X = np.asarray(X, dtype=float)
        if self.constant is not None:
            return np.full(X.shape[:-1], float(self.constant))
        return np.asarray(self.fn(X), dtype=float)


def constant_field(c):
    c = float(c)
    return Field(None, constant=c, bounds=(c, c), spec={"constant": c})


def affine_field(const, coef):
    coef = np.asarray(coef, dtype=float)
    return Field(lambda X: const + X[..., : len(coef)] @ coef, spec={"affine": {"const": const, "coef": coef.tolist()}})


def weitzenbock_min_field(model, p):
    """Constant field ``min spec ℛ^p`` of a model with constant curvature."""
    from .weitzenbock import min_eigenvalue

    c = min_eigenvalue(assemble(model.curvature_tensor(), p))
    f = constant_field(c)
    f.spec = {"weitzenbock_min": p, "value": c}
    return f


def field_from_spec(spec, model=None):
    if isinstance(spec, Field):
        return spec
    if callable(spec):
        return Field(spec)
    if isinstance(spec, (int, float)):
        return constant_field(spec)
    if isinstance(spec, dict):
        try:
            if "constant" in spec:
                return constant_field(spec["constant"])
            if "affine" in spec:
                a = spec["affine"]
                return affine_field(float(a.get("const", 0.0)), a["coef"])
            if "weitzenbock_min" in spec:
                if model is None:
                    raise DomainError("weitzenbock_min field needs a model")
                return weitzenbock_min_field(model, int(spec["weitzenbock_min"]))
        except (KeyError, TypeError, ValueError) as exc:
            raise DomainError(f"malformed field spec {spec!r}: {exc}") from exc
    raise DomainError(f"unknown field spec {spec!r}")


def _as_field(f):
    return f if isinstance(f, Field) else field_from_spec(f)


# ---------------------------------------------------------------------------
# simulation
# ---------------------------------------------------------------------------


@dataclass
class PathSample:
    times: np.ndarray
    points: np.ndarray
    dt: float


def _grid(T, dt):
    if dt <= 0:
        raise DomainError(f"dt must be positive, got {dt}")
    if T < dt:
        raise DomainError(f"T={T} shorter than dt={dt}")
    K = int(round(T / dt))
    return K


def _start(model, x0):
    x = model.default_point() if x0 is None else np.asarray(x0, dtype=float)
    if x.shape != (model.ambient_dim,):
        raise DomainError(f"start point must have {model.ambient_dim} coordinates")
    return x


def _stream(stream):
    if isinstance(stream, np.random.Generator):
        return stream
    if isinstance(stream, tuple):
        return path_stream(*stream)
    return path_stream(int(stream), 0)


def simulate_bm(model, x0, T, dt, stream, drift=None) -> PathSample:
    """One Brownian path on `model` sampled on a uniform grid.

    `drift` (experimental) adds ``drift(x) dt`` before each step, e.g. the
    gradient of h for the weighted Laplacian.
    """
    model = model_from_spec(model)
    K = _grid(T, dt)
    g = _stream(stream)
    x = _start(model, x0)
    pts = np.empty((K + 1, model.ambient_dim))
    pts[0] = x
    Z = g.standard_normal((K, model.noise_dim))
    for k in range(K):
        X = pts[k][None]
        if drift is not None:
            X = X + dt * model.project(X, drift(X))
        pts[k + 1] = model.step(X, Z[k][None], dt)[0]
    return PathSample(np.arange(K + 1) * dt, pts, dt)


def _run_block(model, f, x0, K, dt, seed, first, count, record, want_integral, drift):
    gens = [path_stream(seed, first + i) for i in range(count)]
    X = np.broadcast_to(x0, (count, model.ambient_dim)).copy()
    fx = f(X)
    I = np.zeros(count)
    out = np.empty((count, len(record)))
    rec_pos = {k: j for j, k in enumerate(record)}
    if 0 in rec_pos:
        out[:, rec_pos[0]] = 1.0
    J = np.zeros(count)
    g_prev = np.ones(count)
    k = 0
    while k < K:
        ch = min(CHUNK, K - k)
        Z = np.stack([g.standard_normal((ch, model.noise_dim)) for g in gens], axis=1)
        for c in range(ch):
            if drift is not None:
                X = X + dt * model.project(X, drift(X))
            X = model.step(X, Z[c], dt)
            fn = f(X)
            I += 0.5 * dt * (fx + fn)
            fx = fn
            k += 1
            if want_integral or k in rec_pos:
                g_now = np.exp(-0.5 * I)
                if want_integral:
                    J += 0.5 * dt * (g_prev + g_now)
                    g_prev = g_now
                if k in rec_pos:
                    out[:, rec_pos[k]] = g_now
    return out, J


def _mean_stderr(V, axis=0):
    """Shifted mean and standard error; exact for identical samples."""
    V = np.asarray(V, dtype=float)
    ref = np.take(V, [0], axis=axis)
    D = V - ref
    mean = np.squeeze(ref, axis=axis) + D.mean(axis=axis)
    N = V.shape[axis]
    if N < 2:
        return mean, np.zeros_like(mean)
    var = np.sum((D - D.mean(axis=axis, keepdims=True)) ** 2, axis=axis) / (N - 1)
    return mean, np.sqrt(var / N)


def _simulate(model, f, x0, K, dt, N, seed, record, want_integral=False, workers=1, drift=None):
    if N < 2:
        raise DomainError("need at least two paths")
    blocks = [(s, min(BLOCK, N - s)) for s in range(0, N, BLOCK)]

    def run(b):
        return _run_block(model, f, x0, K, dt, seed, b[0], b[1], record, want_integral, drift)

    if workers and workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as ex:
            parts = list(ex.map(run, blocks))
    else:
        parts = [run(b) for b in blocks]
    vals = np.concatenate([p[0] for p in parts])
    J = np.concatenate([p[1] for p in parts])
    return vals, J


@dataclass
class FKResult:
    mean: float
    stderr: float
    T: float
    dt: float
    N: int
    seed: int
    times: np.ndarray
    curve_mean: np.ndarray
    curve_stderr: np.ndarray

    def to_dict(self):
        return {"mean": self.mean, "stderr": self.stderr, "T": self.T, "dt": self.dt, "N": self.N, "seed": self.seed}

    def curve_csv(self):
        return _curve_csv(self.times, self.curve_mean, self.curve_stderr)


def _curve_csv(times, mean, stderr):
    lines = ["t,mean,stderr"]
    for t, m, s in zip(times, mean, stderr):
        lines.append(f"{t:.17g},{m:.17g},{s:.17g}")
    return "\n".join(lines) + "\n"


def _record_steps(K, points):
    steps = np.unique(np.round(np.linspace(0, K, min(points, K) + 1)).astype(int))
    return [int(s) for s in steps]


def feynman_kac(model, f, x0=None, T=DEFAULT_T, dt=DEFAULT_DT, N=DEFAULT_N, seed=0,
                curve_points=200, workers=1, drift=None) -> FKResult:
    """Monte Carlo estimate of ``E exp(-1/2 ∫_0^T f(x_s) ds)``.

    The time integral is the trapezoid rule on the ``dt`` grid.  The decay
    curve is recorded at ``curve_points`` evenly spaced times.
    """
    model = model_from_spec(model)
    f = _as_field(f)
    K = _grid(T, dt)
    x = _start(model, x0)
    record = _record_steps(K, curve_points)
    vals, _ = _simulate(model, f, x, K, dt, N, seed, record, workers=workers, drift=drift)
    mean, se = _mean_stderr(vals)
    return FKResult(
        mean=float(mean[-1]), stderr=float(se[-1]), T=K * dt, dt=dt, N=N, seed=seed,
        times=np.array(record) * dt, curve_mean=mean, curve_stderr=se,
    )


@dataclass
class RateEstimate:
    rate: float
    stderr: float
    n_paths: int
    T: float
    dt: float
    ssp_verdict: str
    per_start: list = field(default_factory=list)
    checkpoints: list = field(default_factory=list)
    log_means: list = field(default_factory=list)
    curve: tuple | None = None

    def curve_csv(self):
        return _curve_csv(*self.curve) if self.curve is not None else None

    def to_dict(self):
        return {
            "rate": self.rate,
            "stderr": self.stderr,
            "n_paths": self.n_paths,
            "T": self.T,
            "dt": self.dt,
            "ssp_verdict": self.ssp_verdict,
            "per_start": self.per_start,
            "checkpoints": self.checkpoints,
            "log_means": self.log_means,
        }


def verdict(rate, stderr):
    if rate + 2.0 * stderr < 0:
        return "positive"
    if rate - 2.0 * stderr > 0:
        return "negative"
    return "inconclusive"


CHECKPOINT_FRACTIONS = (4 / 8, 5 / 8, 6 / 8, 7 / 8, 1.0)


def _fit_rate(vals, times):
    """Least-squares slope of log-means and its delta-method standard error."""
    mean, _ = _mean_stderr(vals)
    if np.any(mean <= 0.0):
        raise NumericError(
            "Feynman-Kac mean underflowed at a checkpoint; use a shorter horizon T",
            means=mean.tolist(),
        )
    t = np.asarray(times)
    w = (t - t.mean()) / np.sum((t - t.mean()) ** 2)
    logs = np.log(mean)
    rate = float(w @ logs)
    per_path = vals @ (w / mean)
    _, se = _mean_stderr(per_path)
    return rate, float(se), logs


def _rate_one(model, f, x, K, dt, N, seed, workers, drift, want_integral=False, curve_points=0):
    steps = sorted({int(round(fr * K)) for fr in CHECKPOINT_FRACTIONS})
    record = sorted(set(steps) | set(_record_steps(K, curve_points) if curve_points else ()))
    vals, J = _simulate(model, f, x, K, dt, N, seed, record, want_integral=want_integral,
                        workers=workers, drift=drift)
    cols = [record.index(k) for k in steps]
    rate, se, logs = _fit_rate(vals[:, cols], np.array(steps) * dt)
    curve = None
    if curve_points:
        mean, err = _mean_stderr(vals)
        curve = (np.array(record) * dt, mean, err)
    return rate, se, logs, steps, vals[:, cols], J, curve


def ssp_rate(model, f, x0=None, T=DEFAULT_T, dt=DEFAULT_DT, N=DEFAULT_N, seed=0,
             workers=1, drift=None, curve_points=0) -> RateEstimate:
    """Finite-horizon proxy for the strong stochastic positivity exponent.

    Fits the slope of ``log E exp(-1/2 ∫_0^t f)`` over checkpoints in the
    second half of ``[0, T]``.  `x0` may be a list of start points; the
    largest (worst) rate is reported, standing in for the supremum over a
    compact set.  With ``curve_points > 0`` the decay curve of the worst
    start point is kept in ``curve``.
    """
    model = model_from_spec(model)
    f = _as_field(f)
    K = _grid(T, dt)
    starts = [None] if x0 is None else (
        [x0] if np.ndim(x0) == 1 else list(x0)
    )
    per, curves, logs_all = [], [], []
    for x in starts:
        rate, se, logs, steps, _, _, curve = _rate_one(
            model, f, _start(model, x), K, dt, N, seed, workers, drift, curve_points=curve_points
        )
        per.append({"x0": _start(model, x).tolist(), "rate": rate, "stderr": se})
        curves.append(curve)
        logs_all.append(logs)
    worst = max(range(len(per)), key=lambda i: per[i]["rate"])
    r, s = per[worst]["rate"], per[worst]["stderr"]
    return RateEstimate(
        rate=r, stderr=s, n_paths=N, T=K * dt, dt=dt, ssp_verdict=verdict(r, s),
        per_start=per, checkpoints=[k * dt for k in steps], log_means=logs_all[worst].tolist(),
        curve=curves[worst],
    )


def lambda0_lower_bound(rate: RateEstimate):
    """Lower bound ``-2 * rate`` for the bottom of the spectrum of ``Δ + f``."""
    return -2.0 * rate.rate, 2.0 * rate.stderr


@dataclass
class RUnderline:
    value: float
    stderr: float
    T: float
    tail: float
    rate: float


def r_underline_q(model, f, x0=None, dt=DEFAULT_DT, N=DEFAULT_N, seed=0, tol=1e-4,
                  T0=DEFAULT_T, max_doublings=8, workers=1) -> RUnderline:
    """Estimate ``∫_0^∞ E exp(-1/2 ∫_0^t f(x_s) ds) dt``.

    The mean curve is integrated by the trapezoid rule; the horizon doubles
    until the exponential tail fitted past it is below `tol`, and that tail
    is added in closed form.
    """
    model = model_from_spec(model)
    f = _as_field(f)
    x = _start(model, x0)
    T = T0
    for _ in range(max_doublings + 1):
        K = _grid(T, dt)
        rate, _, _, _, vals, J, _ = _rate_one(model, f, x, K, dt, N, seed, workers, None, want_integral=True)
        if rate >= 0:
            raise NumericError("decay rate is not negative; the time integral diverges", rate=rate)
        end_mean, _ = _mean_stderr(vals[:, -1])
        tail = float(end_mean) / (-rate)
        if tail < tol:
            per_path = J + vals[:, -1] / (-rate)
            value, se = _mean_stderr(per_path)
            return RUnderline(float(value), float(se), K * dt, tail, rate)
        T *= 2
    raise NumericError("tail did not fall below tolerance", tail=tail, T=T)


# ---------------------------------------------------------------------------
# damped parallel flow on forms
# ---------------------------------------------------------------------------


@dataclass
class WFlow:
    times: np.ndarray
    W: np.ndarray
    lower_integral: np.ndarray
    max_ratio: float
    min_ratio: float
    ratios: np.ndarray


def constant_curvature_field(model):
    R = model_from_spec(model).curvature_tensor()

    def field(x):
        return R

    return field


def solve_W(model, R_field, p: int, path: PathSample, v0=None, samples=16, seed=0) -> WFlow:
    """Integrate ``dW/dt = -1/2 ℛ^p(x_t) W`` along `path`.

    One exponential-midpoint step per grid interval.  Reports the ratio of
    ``|W_t v0| / |v0|`` to ``exp(-1/2 ∫_0^t min spec ℛ^p)`` over sampled
    start covectors.
    """
    model = model_from_spec(model)
    pts = path.points
    dt = path.dt
    K = len(pts) - 1
    last_R, E, lam = None, None, None
    W = None
    Ws, integral = [], [0.0]
    for k in range(K):
        x_mid = model.midpoint(pts[k], pts[k + 1])
        Rm = R_field(x_mid)
        if Rm is not last_R:
            op = assemble(Rm, p)
            try:
                w, V = jacobi_eigh(op.matrix)
            except NumericError as exc:
                raise NumericError(f"step exponential failed at step {k}: {exc}") from exc
            E = (V * np.exp(-0.5 * dt * w)) @ V.T
            lam = float(w[0])
            last_R = Rm
        if W is None:
            W = np.eye(E.shape[0])
            Ws.append(W)
        W = E @ W
        Ws.append(W)
        integral.append(integral[-1] + dt * lam)
    Ws = np.array(Ws)
    N = Ws.shape[1]
    if v0 is None:
        rng = np.random.default_rng(seed)
        v0 = np.vstack([np.eye(N), rng.standard_normal((samples, N))])
    v0 = np.atleast_2d(np.asarray(v0, dtype=float))
    norms0 = np.linalg.norm(v0, axis=1)
    moved = np.linalg.norm(np.einsum("kab,vb->kva", Ws, v0), axis=2) / norms0
    bound = np.exp(-0.5 * np.array(integral))
    ratios = (moved / bound[:, None]).max(axis=1)
    return WFlow(
        times=np.arange(K + 1) * dt, W=Ws, lower_integral=np.array(integral),
        max_ratio=float(ratios.max()), min_ratio=float(ratios.min()), ratios=ratios,
    )


def domination_check(model, p, T=1.0, dt=DEFAULT_DT, n_paths=100, seed=0, R_field=None, x0=None):
    """Worst domination ratio over `n_paths` simulated paths."""
    model = model_from_spec(model)
    field_ = R_field if R_field is not None else constant_curvature_field(model)
    worst, best = 0.0, np.inf
    for i in range(n_paths):
        path = simulate_bm(model, x0, T, dt, (seed, i))
        res = solve_W(model, field_, p, path, seed=seed + i)
        worst, best = max(worst, res.max_ratio), min(best, res.min_ratio)
    return {"max_ratio": worst, "min_ratio": best, "n_paths": n_paths, "T": T, "dt": dt, "p": p}


def closed_form_fk_constant(c, T):
    return exp(-0.5 * c * T)


def sandwich_bounds(fmin, fmax, T):
    """``exp(-fmax T/2) <= E exp(-1/2 ∫ f) <= exp(-fmin T/2)``."""
    return exp(-0.5 * fmax * T), exp(-0.5 * fmin * T)


__all__ = [
    "Torus", "Sphere", "Product", "model_from_spec", "Field", "constant_field",
    "affine_field", "field_from_spec", "PathSample", "simulate_bm", "feynman_kac",
    "ssp_rate", "r_underline_q", "lambda0_lower_bound", "solve_W", "domination_check",
    "RateEstimate", "FKResult", "path_stream", "verdict",
]
