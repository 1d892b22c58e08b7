import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import integrate, special

from ctgranger.errors import InputError
from ctgranger.minimal import (MinimalCtvarParams, continuous_filter_noninvariance_probe,
                               ct_autocov, ct_cpsd, ct_ma_kernel, ct_transfer, gc_horizon,
                               lags_to_decay, minphase_ok, mse_full_xx, mse_reduced_xx,
                               rate_closed_rho0, rate_numeric, reduced_kernel_numeric,
                               reduced_kernel_rho0, reduced_transfer_rho_general,
                               sampled_autocov, spectral_gc_zero_horizon, subsample_quantities,
                               subsampled_cpsd_scaled, subsampled_gc, subsampled_gc_numeric)
from ctgranger.var_core import cpsd_from_autocov

from strategies import minimal_params

REF = MinimalCtvarParams.reference()


def test_param_validation():
    with pytest.raises(InputError):
        MinimalCtvarParams(0.2, 0.2, 0.1)
    with pytest.raises(InputError):
        MinimalCtvarParams(-0.2, 0.1, 0.1)
    with pytest.raises(InputError):
        MinimalCtvarParams(0.2, 0.1, 0.1, rho=1.0)
    with pytest.raises(InputError):
        MinimalCtvarParams(0.2, 0.1, 0.1, tau=-1.0)
    with pytest.raises(InputError):
        MinimalCtvarParams(0.2, 0.1, float("nan"))
    assert REF.replace(rho=0.5).rho == 0.5


@pytest.mark.parametrize("t, key", [(0.0, "gamma0_ref"), (15.0, "gamma_ref_t15"), (45.0, "gamma_ref_t45")])
def test_autocov_oracle(oracle, t, key):
    np.testing.assert_allclose(ct_autocov(REF, t), oracle[key], rtol=1e-12, atol=1e-15)


def test_autocov_symmetry_and_continuity():
    g = ct_autocov(REF, np.array([-15.0, 15.0]))
    np.testing.assert_allclose(g[0], g[1].T)
    near = ct_autocov(REF.replace(rho=0.4), np.array([30 - 1e-9, 30.0, 30 + 1e-9]))
    np.testing.assert_allclose(near[0], near[1], atol=1e-9)
    np.testing.assert_allclose(near[2], near[1], atol=1e-9)


@given(minimal_params(), st.floats(-3.0, 3.0))
def test_cpsd_is_h_sigma_hstar(p, lam):
    h = ct_transfer(p, 2 * np.pi * lam)
    np.testing.assert_allclose(ct_cpsd(p, lam), h @ p.sigma @ h.conj().T, rtol=1e-10, atol=1e-13)


@pytest.mark.parametrize("rho", [0.0, 0.5])
@pytest.mark.parametrize("t", [0.0, 15.0, 40.0])
def test_autocov_is_fourier_of_cpsd(rho, t):
    p = REF.replace(rho=rho)
    lam = np.linspace(-20.0, 20.0, 400001)
    s = ct_cpsd(p, lam) * np.exp(2j * np.pi * lam * t)[:, None, None]
    g = integrate.trapezoid(s, lam, axis=0).real
    # tails beyond |λ| = 20 behave like Σ/(2πλ)²
    v = 2 * np.pi * t
    tail = np.cos(20 * v) / 20 - v * (np.pi / 2 - special.sici(20 * v)[0])
    g += p.sigma * tail / (2 * np.pi ** 2)
    np.testing.assert_allclose(g, ct_autocov(p, t), atol=5e-5)


def test_kernel_transfer_pair():
    u = np.linspace(0, 400, 400001)
    b = ct_ma_kernel(REF, u)
    w = 0.07
    h = integrate.trapezoid(b * np.exp(-1j * w * u)[:, None, None], u, axis=0)
    np.testing.assert_allclose(h, ct_transfer(REF, w), atol=1e-6)
    assert np.all(ct_ma_kernel(REF, -1.0) == 0)


@pytest.mark.parametrize("h", ["5", "30", "45"])
def test_mse_oracles(oracle, h):
    assert mse_full_xx(REF, float(h)) == pytest.approx(oracle["mse_full_xx"][h], rel=1e-12)
    assert mse_reduced_xx(REF, float(h)) == pytest.approx(oracle["mse_reduced_xx"][h], rel=1e-12)


def test_rate_oracle(oracle):
    assert rate_closed_rho0(REF) == pytest.approx(oracle["rate"], rel=1e-14)
    assert rate_numeric(REF) == pytest.approx(oracle["rate"], rel=1e-6)
    with pytest.raises(InputError):
        rate_closed_rho0(REF.replace(rho=0.2))


@given(minimal_params(rho=0.0))
def test_mse_limits_rho0(p):
    g0 = ct_autocov(p, 0.0)[0, 0]
    assert mse_full_xx(p, 0.0) == 0.0
    assert mse_full_xx(p, 1e4) == pytest.approx(g0, rel=1e-10)
    assert mse_reduced_xx(p, 1e4) == pytest.approx(g0, rel=1e-10)
    h = np.linspace(0.0, 200.0, 401)
    full, red = mse_full_xx(p, h), mse_reduced_xx(p, h)
    assert np.all(np.diff(full) >= -1e-12 * g0)
    assert np.all(red >= full - 1e-12 * g0)


@given(minimal_params(rho=0.0))
def test_closed_reduced_kernel_reproduces_variance(p):
    u = np.linspace(0, 60 / min(p.a, p.b), 200001)
    var = integrate.simpson(reduced_kernel_rho0(p, u) ** 2, x=u)
    assert var == pytest.approx(ct_autocov(p, 0.0)[0, 0], rel=1e-6)


def test_numeric_reduced_kernel_matches_closed_rho0():
    u = np.linspace(0.0, 80.0, 801)
    np.testing.assert_allclose(reduced_kernel_numeric(REF, u), reduced_kernel_rho0(REF, u), atol=2e-5)


@pytest.mark.parametrize("rho", [0.5, -0.5, 0.25])
def test_numeric_reduced_kernel_rho_nonzero(rho):
    p = REF.replace(rho=rho)
    du = 0.01
    u = du * np.arange(int(300 / du) + 1)
    b = reduced_kernel_numeric(p, u)
    assert b[0] == pytest.approx(1.0, abs=1e-4)
    var = integrate.simpson(b ** 2, dx=du)
    assert var == pytest.approx(ct_autocov(p, 0.0)[0, 0], rel=1e-4)
    # causal, minimum phase factor: reduced MSPE never below full MSPE
    h = np.linspace(0.0, 300.0, 601)
    assert np.all(mse_reduced_xx(p, h) - mse_full_xx(p, h) > -1e-5)
    assert np.all(gc_horizon(p, np.array([5.0, 30.0, 45.0, 60.0])) > 1e-4)


def test_reduced_transfer_modulus_matches_spectrum():
    p = REF.replace(rho=0.4)
    w = np.linspace(0.0, 3.0, 301)
    hr = reduced_transfer_rho_general(p, w)
    np.testing.assert_allclose(np.abs(hr) ** 2, ct_cpsd(p, w / (2 * np.pi))[:, 0, 0].real, rtol=1e-12)


def test_gc_horizon_shape():
    assert gc_horizon(REF, 0.0) == 0.0
    h = np.arange(0.0, 60.0, 0.05)
    g = gc_horizon(REF, h)
    assert h[int(np.argmax(g))] == pytest.approx(30.05, abs=0.1)
    assert gc_horizon(REF, 2000.0) < 1e-10


def test_zero_horizon_spectral_gc_integrates_to_rate():
    # the integrand is independent of a and decays like c²/ω²
    f = spectral_gc_zero_horizon(REF, np.array([0.0, 1e3]))
    assert f[0] == pytest.approx(np.log1p(REF.c ** 2 / REF.b ** 2))
    assert f[1] == pytest.approx(REF.c ** 2 / 1e6, rel=1e-6)
    p = REF.replace(rho=0.3)
    assert rate_numeric(p) == pytest.approx(rate_numeric(p, W=4000.0), rel=1e-6)


def test_continuous_filter_noninvariance():
    before, after = continuous_filter_noninvariance_probe(REF, 0.5, np.array([1e-3, 40.0]))
    assert abs(before[1] - after[1]) > 1e-3
    assert before[0] / 1e-3 == pytest.approx(after[0] / 1e-3, rel=1e-3)
    with pytest.raises(InputError):
        continuous_filter_noninvariance_probe(REF, 0.0, 1.0)


def test_subsample_quantities_kappa():
    s = subsample_quantities(REF, 7.0)
    assert s.q == 5 and s.kappa == pytest.approx(5 - 30 / 7)
    s = subsample_quantities(REF, 10.0)
    assert s.q == 3 and s.kappa == 0.0
    s = subsample_quantities(REF.replace(tau=0.0), 3.0)
    assert s.q == 1 and s.kappa == 1.0
    with pytest.raises(InputError):
        subsample_quantities(REF, 0.0)


@given(st.floats(0.5, 60.0), st.floats(-0.5, 0.5))
def test_subsampled_cpsd_matches_autocov_sum(dt, frac):
    lam = frac / dt
    acov = sampled_autocov(REF, dt, lags_to_decay(REF, dt, 1e-15))
    direct = cpsd_from_autocov(acov, [lam]).values[0]
    np.testing.assert_allclose(subsampled_cpsd_scaled(REF, dt, lam), direct, rtol=1e-9, atol=1e-12)


def test_strong_gc_oracle(oracle):
    for dt, val in oracle["strong_gc_sub"].items():
        yx, xy, inst = subsampled_gc(REF, float(dt))
        assert yx + inst == pytest.approx(val, rel=1e-9)
        assert xy == 0.0


def test_subsampled_gc_decays():
    vals = [subsampled_gc(REF, dt)[0] for dt in (60.0, 90.0, 120.0)]
    assert vals[0] > vals[1] > vals[2]
    assert vals[2] < 1e-4


@pytest.mark.parametrize("dt", [2.0, 13.0, 30.0, 47.0])
def test_numeric_route_matches_closed(dt):
    closed = subsampled_gc(REF, dt)
    numeric = subsampled_gc_numeric(REF, dt)
    np.testing.assert_allclose(numeric, closed, rtol=1e-8, atol=1e-10)
    assert minphase_ok(REF, dt)


def test_closed_routes_reject_rho():
    with pytest.raises(InputError):
        subsampled_gc(REF.replace(rho=0.2), 5.0)


def test_rate_not_above_uncorrelated_case():
    base = rate_closed_rho0(REF)
    assert rate_numeric(REF.replace(rho=0.5)) <= base
    assert rate_numeric(REF.replace(c=0.0, rho=0.5)) == pytest.approx(0.0, abs=1e-12)
