"""Acceptance criteria, one test each, at the stated tolerances.

Each test records a ``CRITERION n PASS|FAIL`` line that is echoed in the
pytest terminal summary. Run alone with ``pytest tests/test_acceptance.py -v``.
"""
import time

import numpy as np
import pytest
from scipy import sparse

from conftest import ACCEPTANCE_LINES
from mmbspline import (
    CURRIE_DURBAN,
    MMB,
    assemble,
    build_D,
    build_G,
    build_Q,
    build_spec,
    check_second_derivative_identity,
    coefficients,
    direct_pspline_solve,
    eval_basis,
    fit,
    profile_loglik,
)
from mmbspline.bench import loglog_slope, run_bench
from mmbspline.data import grid, simulate, true_curve
from mmbspline.optimize import INV_PHI, golden_section_max
from mmbspline.penalty import SQUARED_GRAM


def report(number, ok, detail):
    line = f"CRITERION {number} {'PASS' if ok else 'FAIL'}: {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    return ok


def rel_maxnorm(a, b):
    return np.max(np.abs(a - b)) / max(np.max(np.abs(a)), np.max(np.abs(b)))


def test_criterion_1_oracle_equivalence():
    rng = np.random.default_rng(2024)
    start = time.perf_counter()
    worst = 0.0
    for _ in range(20):
        degree = int(rng.choice([2, 3]))
        nseg = int(rng.integers(3, 51 - degree))
        n = int(rng.integers(max(20, nseg), 501))
        spec = build_spec(0.0, float(rng.uniform(0.5, 20.0)), nseg, degree)
        x = rng.uniform(spec.x_min, spec.x_max, n)
        y = np.cos(3.0 * x / spec.x_max) + rng.normal(scale=0.2, size=n)
        basis = eval_basis(spec, x)
        blocks = {kind: assemble(basis, y, spec, kind) for kind in (MMB, CURRIE_DURBAN)}
        for lam in (0.01, 1.0, 100.0):
            fm = basis.dot(coefficients(profile_loglik(blocks[MMB], lam)))
            fc = basis.dot(coefficients(profile_loglik(blocks[CURRIE_DURBAN], lam)))
            fd = basis.dot(direct_pspline_solve(basis, y, build_D(spec.m), lam))
            worst = max(worst, rel_maxnorm(fm, fc), rel_maxnorm(fm, fd), rel_maxnorm(fc, fd))
    elapsed = time.perf_counter() - start
    ok = worst <= 1e-8 and elapsed < 10.0
    report(1, ok, f"max pairwise relative deviation {worst:.2e} (tol 1e-8), {elapsed:.2f} s (limit 10 s)")
    assert ok


def test_criterion_2_determinant_and_likelihood_identities():
    rng = np.random.default_rng(7)
    worst_det = 0.0
    worst_spread = 0.0
    for nseg in (5, 12, 25, 38):
        spec = build_spec(0.0, 1.0, nseg, 2)
        x = rng.uniform(0, 1, 200)
        y = np.sin(5 * x) + rng.normal(scale=0.3, size=200)
        basis = eval_basis(spec, x)
        bm = assemble(basis, y, spec, MMB)
        bc = assemble(basis, y, spec, CURRIE_DURBAN)
        diffs = []
        for lam in np.logspace(-3, 3, 13):
            pm = profile_loglik(bm, lam)
            dense = np.linalg.slogdet(bm.coefficient_matrix(lam))
            assert dense[0] > 0
            worst_det = max(worst_det, abs(pm.log_det_C - dense[1]))
            diffs.append(pm.loglik - profile_loglik(bc, lam).loglik)
        worst_spread = max(worst_spread, float(np.ptp(diffs)))
    ok = worst_det <= 1e-8 and worst_spread <= 1e-6
    report(2, ok, f"|2 log|U| - log|C|| max {worst_det:.2e} (tol 1e-8); "
                  f"spread of L_mmb - L_cd over lambda {worst_spread:.2e} (tol 1e-6)")
    assert ok


def test_criterion_3_second_derivative_identity():
    rng = np.random.default_rng(3)
    worst = 0.0
    for x_min, x_max, nseg in ((0.0, 10.0, 10), (0.0, 10.0, 100)):
        spec = build_spec(x_min, x_max, nseg, 2)
        x = rng.uniform(x_min, x_max, 100)
        worst = max(worst, check_second_derivative_identity(spec, x, step=1e-4))
    ok = worst < 1e-6
    report(3, ok, f"max |h^2 B4'' - diff2 B2| = {worst:.2e} over 100 interior points (tol 1e-6)")
    assert ok


def _sparse_design(spec, x):
    # independent construction: scipy sparse products, no band code involved
    b = eval_basis(spec, x).tocsr()
    d = sparse.csr_matrix(build_D(spec.m).toarray().astype(float))
    z = b @ d.T
    dd = d @ d.T
    return z, dd @ dd


def test_criterion_4_bandwidth():
    rng = np.random.default_rng(4)
    widest = 0
    mismatch = 0.0
    sizes = (10, 100, 1000, 10000)
    for m in sizes:
        spec = build_spec(0.0, 1.0, m - 2, 2)
        x = rng.uniform(0, 1, 5 * m)
        y = rng.normal(size=x.size)
        z, q = _sparse_design(spec, x)
        c = (z.T @ z + 3.7 * q).tocoo()
        c.eliminate_zeros()
        widest = max(widest, int(np.max(np.abs(c.row - c.col))))
        blocks = assemble(eval_basis(spec, x), y, spec, MMB)
        band = blocks.ztz + 3.7 * blocks.q_band
        csr = c.tocsr()
        for k in range(band.shape[0]):
            ref = csr.diagonal(-k)
            mismatch = max(mismatch, np.max(np.abs(band[k, : m - 2 - k] - ref)) / np.max(np.abs(ref)))
        assert build_Q(m, SQUARED_GRAM).bandwidth == 4
    ok = widest <= 4 and mismatch < 1e-12
    report(4, ok, f"widest nonzero off-diagonal {widest} (limit 4) for m in {sizes}; "
                  f"band storage vs sparse products {mismatch:.1e}")
    assert ok


def test_criterion_5_simulation():
    start = time.perf_counter()
    spec = build_spec(0.0, 10.0, 100, 2)
    x0 = grid(0.0, 10.0, 0.01)
    truth = true_curve(x0)
    lams, rmses = [], []
    for seed in range(20):
        x, y = simulate(1000, 0.0, 10.0, 0.5, seed)
        res = fit(x, y, spec, MMB)
        lams.append(res.lam)
        rmses.append(float(np.sqrt(np.mean((res.predict(x0) - truth) ** 2))))
    elapsed = time.perf_counter() - start
    lams, rmses = np.array(lams), np.array(rmses)
    lam_ok = bool(np.all((lams >= 0.1) & (lams <= 20.0)))
    rmse_ok = bool(np.all(rmses < 0.1))
    ok = lam_ok and rmse_ok and elapsed < 30.0
    bad = [s for s, r in enumerate(rmses) if r >= 0.1]
    report(5, ok, f"lambda* in [{lams.min():.3g}, {lams.max():.3g}] (need [0.1, 20]); "
                  f"RMSE in [{rmses.min():.3f}, {rmses.max():.3f}] (need < 0.1, seeds over: {bad}); "
                  f"{elapsed:.1f} s (limit 30 s)")
    assert lam_ok
    assert rmse_ok
    assert elapsed < 30.0


@pytest.mark.slow
def test_criterion_6_scaling():
    start = time.perf_counter()
    mmb_m = [1000, 2000, 4000, 8000, 16000]
    cd_m = [250, 500, 1000, 2000]
    mmb = run_bench(mmb_m, [MMB], repeats=3)
    cd = run_bench(cd_m, [CURRIE_DURBAN], repeats=3)
    elapsed = time.perf_counter() - start
    slope_mmb = loglog_slope(mmb_m, [r.seconds for r in mmb])
    slope_cd = loglog_slope(cd_m, [r.seconds for r in cd])
    speedup = cd[-1].seconds / mmb[1].seconds
    ok = 0.8 <= slope_mmb <= 1.3 and 2.5 <= slope_cd <= 3.4 and speedup >= 10 and elapsed < 300
    report(6, ok, f"slope mmb {slope_mmb:.2f} (need [0.8, 1.3]), cd {slope_cd:.2f} (need [2.5, 3.4]); "
                  f"mmb/cd speedup at m=2000 {speedup:.0f}x (need >= 10); {elapsed:.0f} s (limit 300 s)")
    assert ok


def test_criterion_7_property_suites():
    checks = {}
    rng = np.random.default_rng(77)

    worst = 0.0
    for degree in (2, 3):
        for nseg in (3, 10, 57, 400):
            spec = build_spec(-2.0, 5.0, nseg, degree)
            x = np.concatenate(([spec.x_min, spec.x_max], rng.uniform(spec.x_min, spec.x_max, 500)))
            worst = max(worst, np.max(np.abs(eval_basis(spec, x).values.sum(axis=1) - 1.0)))
    checks["partition of unity"] = (worst <= 1e-12, f"{worst:.1e}")

    exact = all(not np.any(build_D(m).toarray() @ build_G(m).toarray().astype(np.int64)) for m in range(3, 201))
    checks["D G = 0"] = (exact, "exact" if exact else "nonzero")

    worst = 0.0
    for m in range(3, 51):
        d = build_D(m).toarray().astype(float)
        worst = max(worst, np.max(np.abs(build_Q(m, SQUARED_GRAM).toarray() - (d @ d.T) @ (d @ d.T))))
    checks["Q vs dense"] = (worst <= 1e-12, f"{worst:.1e}")

    # each step must shrink the bracket by INV_PHI; the only slack allowed is the
    # rounding in forming the new endpoint and the two widths, a few ulps of max(|a|, |b|)
    worst = 0.0
    drift = 0.0
    for lo, hi, center in ((-8, 8, 0.3), (-3, 1, 5.0), (0, 2, 1.234), (-8, 8, -9.0)):
        trace = [(lo, hi)]
        golden_section_max(lambda t: -(t - center) ** 2, lo, hi, 1e-6, trace)
        for (a0, b0), (a1, b1) in zip(trace, trace[1:]):
            ulp = np.spacing(max(abs(a0), abs(b0), abs(a1), abs(b1)))
            worst = max(worst, abs((b1 - a1) - INV_PHI * (b0 - a0)) / ulp)
        k = len(trace) - 1
        a, b = trace[-1]
        drift = max(drift, abs((b - a) - (hi - lo) * INV_PHI**k) / np.spacing(max(abs(lo), abs(hi))))
    checks["golden ratio shrinkage"] = (
        worst <= 8.0 and drift <= 16.0, f"per-step deviation {worst:.0f} ulp, final width {drift:.0f} ulp"
    )

    worst = 0.0
    for kind in (MMB, CURRIE_DURBAN):
        spec = build_spec(0.0, 3.0, 20, 2)
        x = rng.uniform(0, 3, 150)
        y = -1.5 + 0.8 * x
        res = fit(x, y, spec, kind, lam=1e8)
        x0 = np.linspace(0, 3, 301)
        worst = max(worst, np.max(np.abs(res.predict(x0) - (-1.5 + 0.8 * x0))))
    checks["null space at lambda=1e8"] = (worst <= 1e-8, f"{worst:.1e}")

    ok = all(v[0] for v in checks.values())
    report(7, ok, "; ".join(f"{k} {'ok' if v[0] else 'FAILED'} ({v[1]})" for k, v in checks.items()))
    assert ok


if __name__ == "__main__":
    import sys

    sys.exit(pytest.main([__file__, "-v"]))
