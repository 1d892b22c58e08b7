import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from ctgranger.errors import FilterError, InputError, NumericalError, StabilityError, TruncationError
from ctgranger.models import AutocovSequence, MaSequence, VarModel, frequency_grid
from ctgranger.specfac import reduce_model, var_to_innovations_ss
from ctgranger.var_core import (apply_causal_filter, appendix_c_closed_forms, autocov_from_var,
                                band_integral, cpsd_from_autocov, gc_instantaneous,
                                gc_multistep, gc_spectral, gc_strong, ma_from_var,
                                mspe_multistep, var_spectrum, var_transfer)

from strategies import stable_vars


def var1(a, sigma=None, dt=1.0):
    a = np.asarray(a, dtype=float)
    return VarModel(a[None], np.eye(len(a)) if sigma is None else sigma, dt)


def test_var1_ma_terms_are_powers():
    a = np.array([[0.5, 0.2], [-0.1, 0.3]])
    terms = ma_from_var(var1(a), 6).terms
    for k in range(6):
        np.testing.assert_allclose(terms[k], np.linalg.matrix_power(a, k), atol=1e-15)


def test_ma_auto_length_decays():
    terms = ma_from_var(var1([[0.9, 0.0], [0.0, 0.2]])).terms
    assert np.max(np.abs(terms[-1])) < 1e-14


def test_unstable_var_rejected():
    with pytest.raises(StabilityError):
        ma_from_var(var1([[1.1, 0.0], [0.0, 0.1]]))
    with pytest.raises(StabilityError):
        autocov_from_var(var1([[1.0, 0.0], [0.0, 0.1]]), 3)


def test_var_model_validation():
    with pytest.raises(InputError):
        VarModel(np.zeros((1, 2, 2)), np.array([[1.0, 2.0], [2.0, 1.0]]))
    with pytest.raises(InputError):
        VarModel(np.zeros((1, 2, 2)), np.eye(2), dt=0.0)
    with pytest.raises(InputError):
        VarModel(np.zeros((1, 3, 3)), np.eye(2))


def test_scalar_ar1_autocov():
    a, dt = 0.6, 0.5
    acov = autocov_from_var(VarModel([[[a]]], [[2.0]], dt), 4).lags[:, 0, 0]
    g0 = dt * 2.0 / (1 - a * a)
    np.testing.assert_allclose(acov, g0 * a ** np.arange(5), rtol=1e-13)


@given(stable_vars())
def test_autocov_satisfies_yule_walker(model):
    g = autocov_from_var(model, model.order + 3).lags
    p = model.order
    for k in range(1, p + 4):
        pred = sum(model.coeffs[l - 1] @ (g[k - l] if k >= l else g[l - k].T) for l in range(1, p + 1))
        np.testing.assert_allclose(g[k], pred, atol=1e-10 * np.abs(g[0]).max())
    g0 = model.covariance + sum(model.coeffs[l - 1] @ g[l].T for l in range(1, p + 1))
    np.testing.assert_allclose(g[0], g0, atol=1e-10 * np.abs(g[0]).max())


@given(stable_vars())
def test_state_space_autocov_matches(model):
    g = autocov_from_var(model, 5).lags
    np.testing.assert_allclose(var_to_innovations_ss(model).autocov(5), g,
                               atol=1e-10 * np.abs(g[0]).max())


@given(stable_vars(max_order=2, radius=0.8))
def test_cpsd_from_autocov_matches_transfer(model):
    freqs = np.linspace(-0.5 / model.dt, 0.5 / model.dt, 9)
    _, s = var_spectrum(model, freqs)
    acov = autocov_from_var(model, 400)
    s2 = cpsd_from_autocov(acov, freqs)
    np.testing.assert_allclose(s2.values, s.values, atol=1e-9 * np.abs(s.values).max())


@given(stable_vars())
def test_mspe_increases_to_gamma0(model):
    g0 = autocov_from_var(model, 0).lags[0]
    prev = mspe_multistep(model, 1).matrix
    np.testing.assert_allclose(prev, model.covariance)
    for m in (2, 5, 20):
        cur = mspe_multistep(model, m).matrix
        assert np.linalg.eigvalsh(cur - prev).min() > -1e-12
        prev = cur
    far = mspe_multistep(model, 2000).matrix
    np.testing.assert_allclose(far, g0, atol=1e-9 * np.abs(g0).max())


@given(stable_vars(n=3))
def test_gc_nonnegative_and_strong_decomposes(model):
    red = reduce_model(model, [0])
    gc = gc_multistep(model, red, [0]).value
    assert gc >= 0
    inst = gc_instantaneous(model.sigma, [0]).value
    strong = gc_strong(model.sigma, red.sigma, [0]).value
    assert strong == pytest.approx(gc + inst, abs=1e-10)


def test_zero_coupling_gives_zero_gc():
    model = var1([[0.5, 0.0], [0.3, 0.4]])  # x does not depend on y
    assert gc_multistep(model, reduce_model(model, [0]), [0]).value < 1e-12
    assert gc_multistep(model, reduce_model(model, [1]), [1]).value > 0.01


def test_instantaneous_gc_formula():
    sig = np.array([[1.0, 0.6], [0.6, 1.0]])
    assert gc_instantaneous(sig, [0]).value == pytest.approx(-np.log(1 - 0.36), rel=1e-14)
    assert gc_instantaneous(np.eye(2), [0]).value == 0.0


def test_negative_gc_raises():
    model = var1([[0.5, 0.3], [0.0, 0.4]])
    bogus = VarModel(np.zeros((1, 1, 1)), [[0.5]])
    with pytest.raises(NumericalError):
        gc_multistep(model, bogus, [0])


def test_reduced_dimension_mismatch():
    model = var1([[0.5, 0.3], [0.0, 0.4]])
    with pytest.raises(InputError):
        gc_multistep(model, reduce_model(model, [0, 1]), [0])


@given(st.floats(-0.9, 0.9), st.floats(-0.9, 0.9), st.floats(-2.0, 2.0))
def test_two_step_closed_forms_match_numeric(a, b, c):
    model = var1([[a, c], [0.0, b]])
    red = reduce_model(model, [0])
    gc1, gc2 = appendix_c_closed_forms(a, b, c)
    assert gc_multistep(model, red, [0], 1).value == pytest.approx(gc1, abs=1e-10)
    assert gc_multistep(model, red, [0], 2).value == pytest.approx(gc2, abs=1e-10)


def test_two_step_closed_form_checks():
    with pytest.raises(InputError):
        appendix_c_closed_forms(1.0, 0.5, 1.0)


def test_spectral_gc_integrates_to_gc_for_var1():
    model = var1([[0.5, 0.4], [0.0, 0.3]], dt=2.0)
    lam = frequency_grid(2.0, 2049)
    f = gc_spectral(model, [0], lam)
    assert np.all(f >= 0)
    gc = gc_multistep(model, reduce_model(model, [0]), [0]).value
    assert band_integral(f, lam, 2.0) == pytest.approx(gc, abs=1e-12)


def test_spectrum_band_checks():
    model = var1([[0.5, 0.0], [0.0, 0.3]], dt=2.0)
    with pytest.raises(InputError):
        var_spectrum(model, [0.3])
    with pytest.raises(NumericalError):
        var_transfer(var1([[1.0, 0.0], [0.0, 0.3]]), [0.0])


def test_cpsd_needs_decayed_autocov():
    acov = autocov_from_var(var1([[0.9, 0.0], [0.0, 0.9]]), 10)
    with pytest.raises(TruncationError):
        cpsd_from_autocov(acov, [0.0])


def test_transfer_scaling_with_dt():
    model = VarModel(np.zeros((1, 1, 1)), [[1.0]], 0.25)
    np.testing.assert_allclose(var_transfer(model, [0.0, 1.0]), 0.25)


def test_causal_filter_application():
    ma = ma_from_var(var1([[0.5, 0.2], [0.0, 0.3]]), 5)
    g = np.array([np.eye(2), np.diag([0.4, -0.2])])
    out = apply_causal_filter(ma, g).terms
    np.testing.assert_allclose(out[1], ma.terms[1] + g[1], atol=1e-15)
    with pytest.raises(FilterError):
        apply_causal_filter(ma, np.array([np.eye(2), np.diag([2.0, 0.0])]))
    with pytest.raises(FilterError):
        apply_causal_filter(ma, np.array([2 * np.eye(2)]))


def test_sequence_containers_validate():
    with pytest.raises(InputError):
        MaSequence(np.zeros((2, 2, 2)))
    sub = AutocovSequence(np.arange(12.0).reshape(3, 2, 2)).sub([1])
    np.testing.assert_array_equal(sub.lags[:, 0, 0], [3.0, 7.0, 11.0])
    with pytest.raises(ValueError):
        sub.lags[0, 0, 0] = 1.0
