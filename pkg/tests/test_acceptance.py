"""Acceptance criteria.  Each test prints one ``criterion N: PASS/FAIL`` line."""
import time

import numpy as np
import pytest
from scipy import stats

from ctgranger.ctvar_numeric import (kernel_from_minimal, smallDt_expansion_check,
                                     vou_subsample)
from ctgranger.inference import (detectability_curve, estimate_gc, fit_var,
                                 order_heuristic, select_order_aic, default_p_max,
                                 validate_sweep)
from ctgranger.minimal import (MinimalCtvarParams, ct_cpsd, gc_horizon, rate_numeric,
                               subsampled_cpsd_scaled, subsampled_factorize_numeric,
                               subsampled_gc, subsampled_gc_numeric, subsampled_spectral_gc)
from ctgranger.models import VarModel, frequency_grid
from ctgranger.sim import SimConfig, simulate_ctvar, simulate_var, subsample_path
from ctgranger.specfac import (filtered_var_ss, minimum_phase_check, reduce_model,
                               reduce_state_space)
from ctgranger.var_core import (appendix_c_closed_forms, band_integral, gc_multistep,
                                gc_spectral)

REF = MinimalCtvarParams.reference()
DT_GRID = np.arange(1, 61, dtype=float)


def _rel(a, b):
    return abs(a - b) / max(abs(b), 1e-300)


def test_c1_oracle_triangle(record_criterion):
    t0 = time.perf_counter()
    worst = 0.0
    for dt in DT_GRID:
        closed = subsampled_gc(REF, dt)[0]
        full, rx, _ = subsampled_factorize_numeric(REF, dt)
        whittle = float(np.log(rx.sigma[0, 0] / full.sigma[0, 0]))
        dare = gc_multistep(full, reduce_model(full, [0]), [0]).value
        worst = max(worst, _rel(whittle, closed), _rel(dare, closed), _rel(dare, whittle))
    elapsed = time.perf_counter() - t0
    ok = worst < 1e-6 and elapsed < 60
    record_criterion(1, ok, f"max pairwise rel diff {worst:.2e}, {elapsed:.1f} s")
    assert worst < 1e-6
    assert elapsed < 60


def test_c2_no_spurious_causality(record_criterion):
    closed = max(abs(subsampled_gc(REF, dt)[1]) for dt in DT_GRID)
    numeric = 0.0
    for rho in (0.25, 0.5):
        p = REF.replace(rho=rho)
        for dt in DT_GRID:
            full, _, ry = subsampled_factorize_numeric(p, dt)
            numeric = max(numeric, abs(np.log(ry.sigma[0, 0] / full.sigma[1, 1])))
            numeric = max(numeric, abs(gc_multistep(full, reduce_model(full, [1]), [1]).value))
    ok = closed < 1e-10 and numeric < 1e-6
    record_criterion(2, ok, f"closed max {closed:.1e}, numeric max {numeric:.1e}")
    assert closed < 1e-10
    assert numeric < 1e-6


def test_c3_zero_horizon_rate(record_criterion):
    h = 1e-3
    target = 1 / 24
    slope = gc_horizon(REF, h) / h
    quad = rate_numeric(REF)
    e1, e2 = _rel(slope, target), _rel(quad, target)
    ok = e1 < 1e-3 and e2 < 1e-4
    record_criterion(3, ok, f"slope rel err {e1:.1e}, quadrature rel err {e2:.1e}")
    assert e1 < 1e-3
    assert e2 < 1e-4


def _random_bivariate_var(rng):
    p = int(rng.integers(1, 4))
    coeffs = rng.normal(size=(p, 2, 2)) / (p + 1)
    model = VarModel(coeffs, np.eye(2))
    r = model.spectral_radius()
    if r >= 0.95:
        coeffs = coeffs * np.array([(0.9 / r) ** (k + 1) for k in range(p)])[:, None, None]
    l = np.array([[1.0, 0.0], [rng.uniform(-0.8, 0.8), rng.uniform(0.5, 1.5)]])
    return VarModel(coeffs, l @ l.T)


def _integral_identity_holds(model):
    # H̃_xx ∝ A_yy(z) − (Σ_yx/Σ_xx) A_xy(z) must have no zeros in the closed disc
    s = model.sigma
    poly = np.concatenate([[1.0], -model.coeffs[:, 1, 1] + s[1, 0] / s[0, 0] * model.coeffs[:, 0, 1]])
    return minimum_phase_check(poly)[0]


def test_c4_spectral_identities(record_criterion):
    worst_sub = 0.0
    for dt in (10.0, 30.0):
        lam = frequency_grid(dt, 2049)
        z = np.exp(-2j * np.pi * dt * lam)
        integral = band_integral(subsampled_spectral_gc(REF, dt, z), lam, dt)
        worst_sub = max(worst_sub, abs(integral - subsampled_gc(REF, dt)[0]))
    rng = np.random.default_rng(2025)
    worst_var, used = 0.0, 0
    while used < 20:
        model = _random_bivariate_var(rng)
        if not model.is_stable() or not _integral_identity_holds(model):
            continue
        lam = frequency_grid(1.0, 4097)
        integral = band_integral(gc_spectral(model, [0], lam), lam, 1.0)
        gc = gc_multistep(model, reduce_model(model, [0]), [0]).value
        worst_var = max(worst_var, abs(integral - gc))
        used += 1
    ok = worst_sub < 1e-6 and worst_var < 1e-6
    record_criterion(4, ok, f"subsampled {worst_sub:.1e}, random VARs {worst_var:.1e}")
    assert worst_sub < 1e-6
    assert worst_var < 1e-6


def _random_block_filter(rng, nx, ny, order):
    n = nx + ny
    while True:
        g = np.zeros((order + 1, n, n))
        g[0] = np.eye(n)
        for k in range(1, order + 1):
            g[k, :nx, :nx] = rng.normal(scale=0.4, size=(nx, nx))
            g[k, nx:, nx:] = rng.normal(scale=0.4, size=(ny, ny))
        if minimum_phase_check(g)[0]:
            return g


def test_c5_filter_invariance(record_criterion):
    rng = np.random.default_rng(11)
    x = [0, 1]
    worst = 0.0
    for _ in range(50):
        while True:
            coeffs = rng.normal(scale=0.3, size=(2, 3, 3))
            l = np.tril(rng.normal(scale=0.3, size=(3, 3)), -1) + np.eye(3)
            model = VarModel(coeffs, l @ l.T)
            if model.spectral_radius() < 0.95:
                break
        base = gc_multistep(model, reduce_model(model, x), x).value
        g = _random_block_filter(rng, 2, 1, int(rng.integers(1, 4)))
        red = reduce_state_space(filtered_var_ss(model, g), x)
        filt = float(np.linalg.slogdet(red.sigma)[1] - np.linalg.slogdet(model.sigma[:2, :2])[1])
        worst = max(worst, abs(filt - base))

    def two_step(a, b, c):
        m = VarModel(np.array([[a, c], [0.0, b]]), np.eye(2))
        red = reduce_model(m, [0])
        return gc_multistep(m, red, [0], 1).value, gc_multistep(m, red, [0], 2).value

    a, b, c, g = 0.3, 0.5, 1.0, 0.5
    before, after = two_step(a, b, c), two_step(g, b, c)
    shift = abs(after[1] - before[1])
    closed_err = max(abs(before[1] - appendix_c_closed_forms(a, b, c)[1]),
                     abs(after[1] - appendix_c_closed_forms(g, b, c)[1]))
    one_step_shift = abs(after[0] - before[0])
    null1, null2 = two_step(0.5, -0.5, 1.0)
    ok = (worst < 1e-8 and shift > 1e-6 and closed_err < 1e-10 and one_step_shift < 1e-10
          and abs(null2) < 1e-12 and null1 > 0.1)
    record_criterion(5, ok, f"FIR max 1-step change {worst:.1e}; 2-step shift {shift:.3e}; "
                            f"a+b=0: 2-step {null2:.1e}, 1-step {null1:.3f}")
    assert worst < 1e-8
    assert shift > 1e-6 and closed_err < 1e-10 and one_step_shift < 1e-10
    assert abs(null2) < 1e-12 and null1 > 0.1


def test_c6_small_dt_expansion(record_criterion):
    dts = [0.01, 0.02, 0.05]
    s_ct = ct_cpsd(REF, 0.0).real
    s_sub = [subsampled_cpsd_scaled(REF, dt, 0.0).real for dt in dts]
    coef = smallDt_expansion_check(s_ct, s_sub, REF.sigma, dts).sigma_coef
    target = REF.sigma / 12
    err = np.max(np.abs(coef - target)) / np.max(np.abs(target))
    record_criterion(6, err < 0.01, f"max rel deviation from Σ/12 {err:.1e}")
    assert err < 0.01


@pytest.fixture(scope="module")
def sweep():
    t0 = time.perf_counter()
    rows = validate_sweep(REF, [5, 10, 15, 20, 30, 45], 8000, 100, 0.05, seed=2024)
    return rows, time.perf_counter() - t0


def test_c7_monte_carlo(sweep, record_criterion):
    rows, elapsed = sweep
    lo, hi = stats.binom.interval(0.99, 100, 0.05)
    zs, type1 = {}, {}
    for r in rows:
        if r.dt in (5, 20, 30, 45):
            zs[r.dt] = (r.mean_debiased - subsampled_gc(REF, r.dt)[0]) / r.se_debiased
        if r.dt <= 15:
            type1[r.dt] = r.type1
    ok_z = all(abs(z) <= 3 for z in zs.values())
    ok_t1 = all(lo / 100 <= t <= hi / 100 for t in type1.values())
    ok = ok_z and ok_t1 and elapsed < 600
    zs_txt = ", ".join(f"{d:g}:{z:+.2f}" for d, z in zs.items())
    t1_txt = ", ".join(f"{d:g}:{t:.2f}" for d, t in type1.items())
    record_criterion(7, ok, f"z [{zs_txt}]; type I [{t1_txt}] in [{lo / 100:.2f}, {hi / 100:.2f}]; "
                            f"{elapsed:.0f} s")
    assert ok_z
    assert ok_t1
    assert elapsed < 600


def test_c8_detectability_structure(record_criterion):
    def pii(duration, dts):
        return np.array([pt.p_ii for pt in detectability_curve(REF, duration, 0.05, dts)])

    tau = REF.tau
    grid = np.arange(15.5, 30.0, 0.5)
    inner = pii(2000, grid)
    ends = pii(2000, [15.0, 35.0])
    k = int(np.argmax(inner))
    black = (0 < k < len(grid) - 1 and tau / 2 < grid[k] < tau
             and inner[k] > max(ends) and inner[k] >= inner[k - 1] and inner[k] >= inner[k + 1])

    small = pii(2000, [1.0, 0.1, 0.01, 0.001])
    rising = bool(np.all(np.diff(small) > 0)) and 0.9 < small[-1] <= 0.95
    large = pii(2000, [90.0, 120.0])
    ceiling = abs(large[-1] - 0.95) < 1e-3 and large[-1] <= 0.95

    sweet = {}
    coarse = np.arange(0.5, 90.5, 0.5)
    for duration in (1000, 2000, 4000, 8000):
        sweet[duration] = float(coarse[int(np.argmin(pii(duration, coarse)))])
    ok_sweet = all(v < tau for v in sweet.values())

    ok = black and rising and ceiling and ok_sweet
    record_criterion(8, ok, f"black spot dt={grid[k]:g} P_II={inner[k]:.3f} (15: {ends[0]:.3f}, "
                            f"35: {ends[1]:.3f}); P_II(1e-3)={small[-1]:.3f}; "
                            f"P_II(120)={large[-1]:.4f}; sweet spots {sweet}")
    assert black
    assert rising
    assert ceiling
    assert ok_sweet


def test_c9_aic_order(record_criterion):
    kernel = kernel_from_minimal(REF)
    dts = [5.0, 10.0, 15.0, 30.0]
    orders = {d: [] for d in dts}
    for trial in range(200):
        path = simulate_ctvar(kernel, SimConfig(8000, seed=77, trial=trial))
        for d in dts:
            data = subsample_path(path, 0.01, d)
            orders[d].append(select_order_aic(data, default_p_max(REF.tau, d)))
    med = {d: float(np.median(orders[d])) for d in dts}
    heur = {d: order_heuristic(REF.tau, d) for d in dts}
    ok = all(abs(med[d] - heur[d]) <= 1 for d in dts)
    txt = ", ".join(f"{d:g}: {med[d]:g} vs {heur[d]}" for d in dts)
    record_criterion(9, ok, f"median AIC order vs heuristic [{txt}]")
    assert ok


def test_c10_null_calibration(record_criterion):
    null = vou_subsample(np.diag([-REF.a, -REF.b]), np.eye(2), 5.0)
    p, trials = 6, 1000
    stat, pvals = [], []
    for trial in range(trials):
        data = simulate_var(null, 1600, seed=99, trial=trial)
        model, _ = fit_var(data, p)
        est = estimate_gc(data, [0], [1], model=model)
        stat.append(est.nobs * est.value)
        pvals.append(est.pvalue)
    q_emp = float(np.quantile(stat, 0.95))
    q_ref = float(stats.chi2.ppf(0.95, p))
    rel = abs(q_emp - q_ref) / q_ref
    ks = stats.kstest(pvals, "uniform").pvalue
    ok = rel < 0.10 and ks > 0.01
    record_criterion(10, ok, f"q95 {q_emp:.2f} vs {q_ref:.2f} ({rel:.1%}), KS p {ks:.2f}")
    assert rel < 0.10
    assert ks > 0.01
