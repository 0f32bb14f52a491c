from math import exp, pi

import numpy as np
import pytest

from bochner import stochastic as sto
from bochner.errors import DomainError, NumericError


def test_streams_are_independent_and_reproducible():
    a = sto.path_stream(7, 0).standard_normal(5)
    b = sto.path_stream(7, 0).standard_normal(5)
    c = sto.path_stream(7, 1).standard_normal(5)
    np.testing.assert_array_equal(a, b)
    assert not np.allclose(a, c)


def test_model_parsing():
    assert sto.model_from_spec("sphere2") == sto.Sphere(2)
    assert sto.model_from_spec("torus3") == sto.Torus(3)
    prod = sto.model_from_spec({"kind": "product", "factors": ["sphere2", {"kind": "torus", "n": 1}]})
    assert prod.dim == 3 and prod.ambient_dim == 4
    for bad in ("cube2", {"kind": "torus"}, 5):
        with pytest.raises(DomainError):
            sto.model_from_spec(bad)


def test_field_parsing():
    X = np.array([[0.2, 0.4, 0.9]])
    assert sto.field_from_spec(2.0)(X)[0] == 2.0
    assert sto.field_from_spec({"affine": {"const": 1.0, "coef": [0.5]}})(X)[0] == pytest.approx(1.1)
    wf = sto.field_from_spec({"weitzenbock_min": 2}, sto.Sphere(4))
    assert wf.constant == pytest.approx(4.0)
    with pytest.raises(DomainError):
        sto.field_from_spec({"nope": 1})


def test_sphere_path_stays_on_sphere():
    path = sto.simulate_bm("sphere3", None, 1.0, 0.01, (1, 0))
    np.testing.assert_allclose(np.linalg.norm(path.points, axis=1), 1.0, atol=1e-12)


def _endpoints(model, T, dt, n_paths, seed):
    return np.array([sto.simulate_bm(model, None, T, dt, (seed, i)).points[-1] for i in range(n_paths)])


def test_sphere_heat_kernel_first_mode():
    # height is an eigenfunction of Δ with eigenvalue n, so E[x_last] = exp(-n t / 2)
    ends = _endpoints(sto.Sphere(2), 1.0, 0.01, 3000, 11)
    h = ends[:, -1]
    se = h.std(ddof=1) / np.sqrt(len(h))
    assert abs(h.mean() - exp(-1.0)) < 4 * se + 0.01


def test_torus_heat_kernel_first_mode():
    ends = _endpoints(sto.Torus(1, 1.0), 0.02, 0.001, 3000, 5)
    c = np.cos(2 * pi * ends[:, 0])
    se = c.std(ddof=1) / np.sqrt(len(c))
    assert abs(c.mean() - exp(-2 * pi**2 * 0.02)) < 4 * se


def test_constant_field_is_exact():
    res = sto.feynman_kac("torus2", 1.0, T=2.0, dt=0.01, N=50, seed=1)
    assert res.mean == pytest.approx(exp(-1.0), rel=1e-12)
    assert res.stderr == 0.0
    assert res.curve_csv().startswith("t,mean,stderr\n0,1,0\n")


def test_worker_count_does_not_change_results():
    kw = dict(T=0.5, dt=0.01, N=1100, seed=9)
    f = {"affine": {"const": 1.0, "coef": [0.5]}}
    a = sto.feynman_kac("sphere2", f, workers=1, **kw)
    b = sto.feynman_kac("sphere2", f, workers=4, **kw)
    assert (a.mean, a.stderr) == (b.mean, b.stderr)
    np.testing.assert_array_equal(a.curve_mean, b.curve_mean)


def test_sandwich_holds():
    T = 2.0
    res = sto.feynman_kac("sphere2", {"affine": {"const": 1.0, "coef": [0.5]}}, T=T, dt=0.01, N=2000, seed=3)
    lo, hi = sto.sandwich_bounds(0.5, 1.5, T)
    assert lo - 3 * res.stderr <= res.mean <= hi + 3 * res.stderr


def test_rate_and_verdicts():
    pos = sto.ssp_rate("torus2", 1.0, T=4.0, dt=0.01, N=10, seed=0, curve_points=8)
    assert pos.rate == pytest.approx(-0.5, abs=1e-9)
    assert pos.ssp_verdict == "positive"
    assert pos.curve_csv().count("\n") == 10
    neg = sto.ssp_rate("torus2", -1.0, T=4.0, dt=0.01, N=10, seed=0)
    assert neg.ssp_verdict == "negative"
    assert sto.verdict(0.0, 0.1) == "inconclusive"
    assert sto.lambda0_lower_bound(pos)[0] == pytest.approx(1.0, abs=1e-9)


def test_rate_reports_worst_start_point():
    starts = [[0.0, 0.0, 1.0], [0.0, 0.0, -1.0]]
    est = sto.ssp_rate("sphere2", {"affine": {"const": 1.0, "coef": [0.0, 0.0, 0.5]}}, x0=starts,
                       T=2.0, dt=0.01, N=200, seed=2)
    assert len(est.per_start) == 2
    assert est.rate == max(p["rate"] for p in est.per_start)


def test_underflow_raises():
    with pytest.raises(NumericError):
        sto.ssp_rate("torus1", 1.0, T=3000.0, dt=1.0, N=4, seed=0)


def test_r_underline_constant():
    res = sto.r_underline_q("torus1", 1.0, dt=0.01, N=4, seed=0, T0=5.0)
    assert res.value == pytest.approx(2.0, abs=1e-3)
    assert res.stderr == 0.0


def test_r_underline_diverges_for_negative_potential():
    with pytest.raises(NumericError):
        sto.r_underline_q("torus1", -1.0, dt=0.01, N=4, seed=0, T0=2.0)


def test_grid_validation():
    with pytest.raises(DomainError):
        sto.feynman_kac("torus1", 1.0, T=1.0, dt=0.0, N=4)
    with pytest.raises(DomainError):
        sto.feynman_kac("torus1", 1.0, T=1.0, dt=0.1, N=1)
    with pytest.raises(DomainError):
        sto.feynman_kac("torus1", 1.0, x0=[0.0, 0.0], T=1.0, dt=0.1, N=4)


def test_domination_on_space_form_and_torus():
    rep = sto.domination_check("sphere4", 2, T=0.5, dt=0.01, n_paths=5, seed=1)
    assert 1 - 1e-6 <= rep["max_ratio"] <= 1 + 1e-2
    flat = sto.domination_check("torus3", 1, T=0.5, dt=0.01, n_paths=3, seed=1)
    assert flat["max_ratio"] == 1.0 and flat["min_ratio"] == 1.0


def test_solve_w_on_space_form_is_scalar_decay():
    path = sto.simulate_bm("sphere4", None, 0.3, 0.01, (0, 0))
    flow = sto.solve_W("sphere4", sto.constant_curvature_field("sphere4"), 2, path)
    K = len(path.points) - 1
    np.testing.assert_allclose(flow.W[-1], exp(-0.5 * 4 * K * 0.01) * np.eye(6), atol=1e-12)
