"""Acceptance gate: one PASS/FAIL line per criterion.

Run with ``pytest tests/test_acceptance.py -v`` (lines appear in the
terminal summary) or ``python tests/test_acceptance.py``.
"""

from __future__ import annotations

import json
import os
import subprocess
import sys
import time
from math import comb, exp
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).parent))

from bochner import curvature as cv  # noqa: E402
from bochner import hodge as hg  # noqa: E402
from bochner import pinching as pc  # noqa: E402
from bochner import stochastic as sto  # noqa: E402
from bochner import weitzenbock as wz  # noqa: E402
from bochner.multiindex import overlap_matrix, perron_eigenvalue  # noqa: E402

from conftest import record_acceptance  # noqa: E402

PINCH_CASES = [(4, 2), (5, 2), (5, 3), (6, 2), (6, 3), (6, 4)]


def _seeded_tensors(count, dims, base):
    rng = np.random.default_rng(base)
    for _ in range(count):
        n = int(rng.choice(dims))
        yield n, cv.random_tensor(n, int(rng.integers(2**63))), rng


def test_criterion_01_space_form():
    t0 = time.perf_counter()
    worst = 0.0
    for n in (4, 5, 6):
        R = cv.constant_curvature(n, 1.0)
        for p in range(n + 1):
            M = wz.assemble(R, p).matrix
            worst = max(worst, np.max(np.abs(M - p * (n - p) * np.eye(comb(n, p)))))
    elapsed = time.perf_counter() - t0
    ok = worst <= 1e-10 and elapsed < 1.0
    record_acceptance(1, ok, f"space-form operator = p(n-p) I, max defect {worst:.2e} (tol 1e-10), {elapsed:.2f}s (< 1s)")
    assert ok


def test_criterion_02_ricci_pinning():
    worst = 0.0
    for n, R, _ in _seeded_tensors(100, [2, 3, 4, 5, 6], 2):
        worst = max(worst, np.max(np.abs(wz.assemble(R, 1).matrix - cv.ricci(R))))
    ok = worst <= 1e-12
    record_acceptance(2, ok, f"degree-1 operator = Ricci on 100 tensors, max defect {worst:.2e} (tol 1e-12)")
    assert ok


def test_criterion_03_frame_quadratic_form():
    worst = 0.0
    for n, R, rng in _seeded_tensors(200, [3, 4, 5, 6], 3):
        p = int(rng.integers(1, n))
        Q = cv.random_frame(n, rng)
        value = wz.quadratic_form(wz.assemble(R, p), wz.decomposable(Q[:p]))
        worst = max(worst, abs(value - pc.sum_p(R, Q, p)))
    ok = worst <= 1e-10
    record_acceptance(3, ok, f"<R^p w, w> = Sigma_p on 200 (tensor, frame, p) triples, max defect {worst:.2e} (tol 1e-10)")
    assert ok


def test_criterion_04_sparsity_and_cross_terms():
    rng = np.random.default_rng(4)
    sparse = ident = 0.0
    cases = 0
    for _ in range(100):
        p = int(rng.choice([2, 3]))
        n = int(rng.integers(p + 2, 7))
        rep = wz.check_lemma31(cv.random_tensor(n, int(rng.integers(2**63))), p)
        sparse = max(sparse, rep.sparsity_max)
        ident = max(ident, rep.identity_max_defect)
        cases += rep.identity_cases
    ok = sparse <= 1e-12 and ident <= 1e-12
    record_acceptance(4, ok, f"overlap sparsity max {sparse:.2e}, 2R_ijkl identity max defect {ident:.2e} over {cases} entries (tol 1e-12)")
    assert ok


def test_criterion_05_star_duality():
    worst = 0.0
    for n, R, rng in _seeded_tensors(100, [3, 4, 5, 6], 5):
        p = int(rng.integers(0, n + 1))
        a = np.sort(wz.eigenvalues(wz.assemble(R, p)))
        b = np.sort(wz.eigenvalues(wz.assemble(R, n - p)))
        worst = max(worst, np.max(np.abs(a - b)))
    ok = worst <= 1e-10
    record_acceptance(5, ok, f"spectra of degrees p and n-p agree on 100 tensors, max defect {worst:.2e} (tol 1e-10)")
    assert ok


def test_criterion_06_perron_overlap():
    t0 = time.perf_counter()
    worst, count = 0.0, 0
    for n in range(1, 9):
        for p in range(n + 1):
            for k in range(p + 1):
                A = overlap_matrix(n, p, k)
                expected = comb(p, p - k) * comb(n - p, p - k)
                worst = max(worst, abs(perron_eigenvalue(A) - expected))
                count += 1
    elapsed = time.perf_counter() - t0
    ok = worst <= 1e-8 and elapsed < 30
    record_acceptance(6, ok, f"Perron eigenvalue = C(p,p-k) C(n-p,p-k) on {count} (n,p,k), max defect {worst:.2e} (tol 1e-8), {elapsed:.2f}s (< 30s)")
    assert ok


def test_criterion_07_pinching_implies_positivity():
    n_pinched = violations = 0
    margin = np.inf
    for seed in range(1000):
        n, p = PINCH_CASES[seed % len(PINCH_CASES)]
        R, _ = pc.pinched_family(n, p, seed=seed)
        rep = pc.is_pinched(R, p, restarts=8, seed=seed)
        if not rep.pinched:
            continue
        n_pinched += 1
        lam = wz.min_eigenvalue(wz.assemble(R, p))
        bound = rep.corollary_bound()
        margin = min(margin, lam - bound)
        if lam <= 0 or lam < bound - 1e-8:
            violations += 1
    ok = violations == 0 and n_pinched > 0
    record_acceptance(
        7, ok,
        f"{n_pinched}/1000 pinched tensors, {violations} violations of lambda_min > 0 and >= corollary bound "
        f"(smallest margin {margin:.3g})",
    )
    assert ok


def test_criterion_08_worked_example():
    rep1 = pc.product_example(1.0)
    exact = np.max(np.abs(wz.assemble(pc.surface_times_sphere(1.0), 3).matrix - 3 * np.eye(20)))
    samples = np.max(np.abs(rep1.frame_samples - 3.0))
    diag_ok = {}
    for a in (0.5, 1.0, 2.0, 3.9):
        d = np.diag(wz.assemble(pc.surface_times_sphere(a), 3).matrix)
        diag_ok[a] = bool(np.all(np.isclose(d, 4 - a, atol=1e-12) | np.isclose(d, 3.0, atol=1e-12)))
    lam45 = wz.min_eigenvalue(wz.assemble(pc.surface_times_sphere(4.5), 3))
    ok = (
        exact <= 1e-12
        and samples <= 1e-9
        and rep1.pinch[3].pinched
        and not rep1.pinch[2].pinched
        and all(diag_ok.values())
        and lam45 < 0
    )
    record_acceptance(
        8, ok,
        f"a=1: |R^3 - 3I| {exact:.1e}, frame samples within {samples:.1e} of 3, pinched p=3 {rep1.pinch[3].pinched}, "
        f"p=2 {rep1.pinch[2].pinched}; diagonal in {{4-a, 3}} for all a: {all(diag_ok.values())}; "
        f"a=4.5 min eigenvalue {lam45:.3g}",
    )
    assert ok


def test_criterion_09_reconstruction():
    worst = 0.0
    for n, R, _ in _seeded_tensors(100, [3, 4, 5], 9):
        rebuilt = cv.reconstruct_tensor(cv.sectional_oracle(R), n)
        worst = max(worst, np.max(np.abs(rebuilt.entries - R.entries)))
    ok = worst <= 1e-10
    record_acceptance(9, ok, f"tensor rebuilt from sectional curvatures on 100 tensors, max defect {worst:.2e} (tol 1e-10)")
    assert ok


def test_criterion_10_constant_field():
    t0 = time.perf_counter()
    fk = sto.feynman_kac("torus2", 1.0, T=10.0, N=1000, seed=10)
    rate = sto.ssp_rate("torus2", 1.0, T=10.0, N=1000, seed=10)
    r_q = sto.r_underline_q("torus2", 1.0, N=1000, seed=10)
    elapsed = time.perf_counter() - t0
    ok = (
        abs(fk.mean - exp(-5.0)) <= 1e-12 * exp(-5.0)
        and fk.stderr == 0.0
        and abs(rate.rate + 0.5) <= 1e-6
        and abs(r_q.value - 2.0) <= 1e-3
        and elapsed < 30
    )
    record_acceptance(
        10, ok,
        f"torus f=1: mean {fk.mean:.15g} vs e^-5, stderr {fk.stderr}; rate {rate.rate:.12f} (tol 1e-6); "
        f"integral {r_q.value:.8f} (tol 1e-3); {elapsed:.1f}s (< 30s)",
    )
    assert ok


def test_criterion_11_domination():
    sphere = sto.domination_check("sphere4", 2, T=1.0, dt=1e-3, n_paths=100, seed=11)
    torus = sto.domination_check("torus4", 2, T=1.0, dt=1e-3, n_paths=10, seed=11)
    ok = (
        1 - 1e-6 <= sphere["max_ratio"] <= 1 + 1e-2
        and torus["max_ratio"] == 1.0
        and torus["min_ratio"] == 1.0
    )
    record_acceptance(
        11, ok,
        f"S^4 p=2 max ratio {sphere['max_ratio']:.15g} in [1-1e-6, 1+1e-2]; torus ratios "
        f"[{torus['min_ratio']}, {torus['max_ratio']}] (exactly 1)",
    )
    assert ok


def test_criterion_12_sandwich():
    t0 = time.perf_counter()
    T = 4.0
    res = sto.feynman_kac("sphere2", {"affine": {"const": 1.0, "coef": [0.5]}}, T=T, N=10_000, seed=12,
                          workers=os.cpu_count() or 1)
    elapsed = time.perf_counter() - t0
    lo, hi = exp(-0.75 * T) - 3 * res.stderr, exp(-0.25 * T) + 3 * res.stderr
    ok = lo <= res.mean <= hi and elapsed < 60
    record_acceptance(12, ok, f"S^2 estimate {res.mean:.6f} +/- {res.stderr:.1e} in [{lo:.6f}, {hi:.6f}], {elapsed:.1f}s (< 60s)")
    assert ok


def test_criterion_13_hodge():
    t0 = time.perf_counter()
    failures = 0
    rng = np.random.default_rng(13)
    for _ in range(200):
        V = int(rng.integers(3, 9))
        K = hg.random_clique_complex(V, 0.5, int(rng.integers(2**63)))
        failures += not hg.check_interlacing(K).ok
    cycle = hg.SimplicialComplex([(1, 2), (2, 3), (1, 3)])
    gaps = (hg.spectral_gap(cycle, 0), hg.spectral_gap(cycle, 1))
    filled = hg.hodge_laplacian(hg.SimplicialComplex([(1, 2, 3)]), 1)
    elapsed = time.perf_counter() - t0
    ok = (
        failures == 0
        and abs(gaps[0] - 3) <= 1e-9 and abs(gaps[1] - 3) <= 1e-9
        and np.array_equal(filled, 3 * np.eye(3))
        and elapsed < 30
    )
    record_acceptance(
        13, ok,
        f"{failures} interlacing failures on 200 clique complexes; 3-cycle gaps {gaps[0]:.12g}, {gaps[1]:.12g}; "
        f"filled triangle L1 = 3I {np.array_equal(filled, 3 * np.eye(3))}; {elapsed:.1f}s (< 30s)",
    )
    assert ok


def _cli(args, threads, workers):
    env = dict(os.environ, OMP_NUM_THREADS=str(threads), OPENBLAS_NUM_THREADS=str(threads), MKL_NUM_THREADS=str(threads))
    proc = subprocess.run(
        [sys.executable, "-m", "bochner", *args, "--workers", str(workers)],
        capture_output=True, env=env, check=False,
    )
    return proc.returncode, proc.stdout


def test_criterion_14_determinism(tmp_path):
    tensor = tmp_path / "product.json"
    cv.dump(pc.surface_times_sphere(2.0), tensor)
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"model": "sphere2", "f": {"affine": {"const": 1.0, "coef": [0.5]}},
                               "T": 1.0, "dt": 0.01, "N": 1200, "seed": 14}))
    wcfg = tmp_path / "w.json"
    wcfg.write_text(json.dumps({"model": "sphere4", "p": 2, "T": 0.2, "dt": 0.01, "N": 4, "seed": 14}))
    commands = {
        "pinch": ["pinch", "--input", str(tensor), "--p", "3", "--restarts", "8", "--seed", "14"],
        "example": ["example", "--a", "2", "--restarts", "8", "--seed", "14"],
        "ssp": ["ssp", "--input", str(cfg)],
        "fk": ["fk", "--input", str(cfg)],
        "wflow": ["wflow", "--input", str(wcfg)],
        "hodge": ["hodge", "--vertices", "8", "--seed", "14"],
    }
    mismatched = []
    for name, args in commands.items():
        runs = [_cli(args, 1, 1), _cli(args, 1, 1), _cli(args, 4, 3)]
        if any(code != 0 for code, _ in runs) or len({out for _, out in runs}) != 1:
            mismatched.append(name)
    ok = not mismatched
    record_acceptance(
        14, ok,
        f"{len(commands)} randomized subcommands byte-identical across repeat runs and 1 vs 4 threads / 1 vs 3 workers"
        + (f"; mismatched: {mismatched}" if mismatched else ""),
    )
    assert ok


if __name__ == "__main__":
    import inspect
    import tempfile

    failed = 0
    for name, fn in sorted(globals().items()):
        if name.startswith("test_criterion_"):
            try:
                if "tmp_path" in inspect.signature(fn).parameters:
                    with tempfile.TemporaryDirectory() as d:
                        fn(Path(d))
                else:
                    fn()
            except AssertionError:
                failed += 1
    sys.exit(1 if failed else 0)
