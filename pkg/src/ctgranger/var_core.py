"""Exact computations on known discrete-time VAR models.

Conventions: a VAR with step ``dt`` has innovations covariance
``dt * sigma``; spectra are scaled by ``dt`` so that they approach the
continuous-time spectrum as ``dt -> 0``:

    S(λ) = dt Σ_k Γ_k exp(-2πi dt λ k),   H(λ) = dt (I - Σ_l A_l z^l)⁻¹.
"""
import numpy as np
from scipy import linalg

from ._linalg import log_det_ratio, logdet_psd, partial_cov, spd_solve, sym, companion
from .errors import FilterError, InputError, NumericalError, TruncationError
from .models import (DECAY_TOL, MAX_TERMS, AutocovSequence, GcValue, MaSequence,
                     MsPredictionError, SpectralGrid, VarModel, as_partition)

GC_FLOOR = 1e-9


def _clamp_gc(value, what="GC"):
    if value < 0:
        if value < -GC_FLOOR:
            raise NumericalError(f"{what} is negative ({value:.3e})")
        return 0.0
    return float(value)


def _ma_recursion(coeffs, n_terms=None):
    """B_k = Σ_l A_l B_{k-l}; stop after ``n_terms`` or once decayed.

    With ``n_terms=None`` the sequence is extended until ``p`` consecutive
    terms fall below DECAY_TOL in max-norm (B_0 = I has max-norm 1).
    """
    p, n, _ = coeffs.shape
    cap = MAX_TERMS if n_terms is None else n_terms
    terms = [np.eye(n)]
    small = 0
    k = 1
    while k < cap:
        lo = max(0, k - p)
        # A_1 B_{k-1} + ... + A_min(k,p) B_{k-min(k,p)}
        prev = np.array(terms[lo:k][::-1])
        bk = np.einsum("lij,ljk->ik", coeffs[:k - lo], prev)
        terms.append(bk)
        k += 1
        if n_terms is None:
            small = small + 1 if np.max(np.abs(bk)) < DECAY_TOL else 0
            if small >= p:
                return np.array(terms)
    if n_terms is None:
        raise TruncationError(f"MA sequence did not decay within {MAX_TERMS} terms")
    return np.array(terms)


def ma_from_var(model, n_terms=None):
    """Moving-average coefficients of a stable VAR.

    Parameters
    ----------
    model : VarModel
    n_terms : int, optional
        Number of terms B_0..B_{n_terms-1}.  If omitted the sequence is
        extended until it has decayed to double precision.
    """
    model.check_stable()
    if n_terms is not None and n_terms < 1:
        raise InputError("n_terms must be positive")
    return MaSequence(_ma_recursion(model.coeffs, n_terms), model.dt)


def autocov_from_var(model, n_lags):
    """Autocovariances Γ_0..Γ_{n_lags} of a stable VAR.

    Γ_0..Γ_{p-1} come from the companion-form discrete Lyapunov equation;
    the rest follow from the Yule-Walker recursion.
    """
    model.check_stable()
    p, n = model.order, model.n
    a = companion(model.coeffs)
    q = np.zeros_like(a)
    q[:n, :n] = model.covariance
    big = sym(linalg.solve_discrete_lyapunov(a, q))
    lags = np.empty((n_lags + 1, n, n))
    head = min(p, n_lags + 1)
    for k in range(head):
        lags[k] = big[:n, k * n:(k + 1) * n]
    lags[0] = sym(lags[0])
    for k in range(head, n_lags + 1):
        lags[k] = np.einsum("lij,ljk->ik", model.coeffs, lags[k - p:k][::-1])
    return AutocovSequence(lags, model.dt)


def _z(freqs, dt):
    return np.exp(-2j * np.pi * dt * np.asarray(freqs, dtype=float))


def var_transfer(model, freqs):
    """H(λ) = dt (I - Σ A_l z^l)⁻¹ as an array of shape (F, n, n)."""
    z = _z(freqs, model.dt)
    p, n = model.order, model.n
    powers = z[:, None] ** np.arange(1, p + 1)[None, :]
    phi = np.eye(n)[None] - np.einsum("fl,lij->fij", powers, model.coeffs)
    cond = np.linalg.cond(phi)
    if not np.all(np.isfinite(cond)) or np.max(cond) > 1e14:
        raise NumericalError("I - A(z) is singular on the frequency grid")
    return model.dt * np.linalg.inv(phi)


def var_spectrum(model, freqs):
    """Transfer function and CPSD of a VAR on ``freqs`` (kHz)."""
    freqs = np.asarray(freqs, dtype=float)
    if np.any(np.abs(freqs) > 0.5 / model.dt * (1 + 1e-12)):
        raise InputError("frequencies outside the Nyquist band")
    h = var_transfer(model, freqs)
    s = sym(h @ model.sigma @ np.conj(np.swapaxes(h, 1, 2)))
    return SpectralGrid(freqs, h, "transfer"), SpectralGrid(freqs, s, "cpsd")


def cpsd_from_autocov(acov, freqs):
    """Scaled two-sided Fourier sum of an autocovariance sequence."""
    g = acov.lags
    scale = np.max(np.abs(g[0]))
    if np.max(np.abs(g[-1])) >= 1e-14 * scale and len(g) > 1:
        raise TruncationError("autocovariance has not decayed at the final lag")
    freqs = np.asarray(freqs, dtype=float)
    z = _z(freqs, acov.dt)
    k = np.arange(1, len(g))
    zk = z[:, None] ** k[None, :]
    pos = np.einsum("fk,kij->fij", zk, g[1:])
    s = g[0][None] + pos + np.conj(np.swapaxes(pos, 1, 2))
    return SpectralGrid(freqs, acov.dt * sym(s), "cpsd")


def _mspe(terms, sigma, dt, m):
    b = terms[:m]
    return dt * sym(np.einsum("lij,jk,lmk->im", b, sigma, b))


def _ma_terms_of(model, m):
    if hasattr(model, "ma_terms"):
        return model.ma_terms(m)
    return ma_from_var(model, m).terms


def mspe_multistep(model, m):
    """m-step mean-square prediction error dt Σ_{l<m} B_l Σ B_lᵀ."""
    if m < 1:
        raise InputError("horizon m must be at least 1")
    if m == 1:
        return MsPredictionError(1, model.covariance.copy())
    terms = _ma_terms_of(model, m)
    if len(terms) < m:
        terms = np.concatenate([terms, np.zeros((m - len(terms),) + terms.shape[1:])])
    return MsPredictionError(m, _mspe(terms, model.sigma, model.dt, m))


def gc_multistep(full, reduced, target, m=1, source=None):
    """m-step GC from ``source`` to ``target``.

    ``reduced`` describes the target subprocess on its own: either a
    ``VarModel`` (e.g. from Whittle factorization of the sub-autocovariance)
    or the ``ReducedModel`` returned by ``specfac.reduce_model``.
    """
    x, y = as_partition(full.n, target, source)
    if reduced.n != len(x):
        raise InputError("reduced model dimension does not match target")
    full_m = mspe_multistep(full, m).matrix[np.ix_(x, x)]
    red_m = mspe_multistep(reduced, m).matrix
    value = _clamp_gc(log_det_ratio(red_m, full_m), f"{m}-step GC")
    return GcValue(value, tuple(y.tolist()), tuple(x.tolist()), m)


def gc_instantaneous(sigma, target, source=None):
    """log(det Σ_xx det Σ_yy / det Σ)."""
    sigma = np.atleast_2d(np.asarray(sigma, dtype=float))
    x, y = as_partition(sigma.shape[0], target, source)
    idx = np.concatenate([x, y])
    value = (logdet_psd(sigma[np.ix_(x, x)]) + logdet_psd(sigma[np.ix_(y, y)])
             - logdet_psd(sigma[np.ix_(idx, idx)]))
    if not np.isfinite(value):
        raise NumericalError("singular residual covariance")
    return GcValue(_clamp_gc(value, "instantaneous GC"), tuple(y.tolist()), tuple(x.tolist()), 0)


def gc_strong(sigma, reduced_sigma_xx, target, source=None):
    """log(det Σ'_xx / det Σ_xx|y): directional plus instantaneous GC."""
    sigma = np.atleast_2d(np.asarray(sigma, dtype=float))
    x, y = as_partition(sigma.shape[0], target, source)
    cond = partial_cov(sigma, x, y)
    value = log_det_ratio(np.atleast_2d(reduced_sigma_xx), cond, "partial")
    return GcValue(_clamp_gc(value, "strong GC"), tuple(y.tolist()), tuple(x.tolist()), 1)


def spectral_gc_from_transfer(h, sigma, target, source=None):
    """Spectral GC from a transfer function array (F, n, n) and intensity."""
    sigma = np.atleast_2d(np.asarray(sigma, dtype=float))
    x, y = as_partition(sigma.shape[0], target, source)
    s = h @ sigma @ np.conj(np.swapaxes(h, 1, 2))
    sxx = sym(s[:, x][:, :, x])
    hxy = h[:, x][:, :, y]
    syy_x = partial_cov(sigma, y, x)
    inner = sym(sxx - hxy @ syy_x @ np.conj(np.swapaxes(hxy, 1, 2)))
    _, ld_s = np.linalg.slogdet(sxx)
    sign, ld_i = np.linalg.slogdet(inner)
    if np.any(np.real(np.linalg.det(sxx)) <= 0) or np.any(sign.real <= 0):
        raise NumericalError("singular spectral matrix in spectral GC")
    f = np.real(ld_s - ld_i)
    if np.min(f) < -1e-10:
        raise NumericalError(f"spectral GC negative ({np.min(f):.3e})")
    return np.maximum(f, 0.0)


def gc_spectral(full, target, freqs, source=None):
    """Per-frequency GC from ``source`` to ``target`` on ``freqs`` (kHz)."""
    h, _ = var_spectrum(full, freqs)
    return spectral_gc_from_transfer(h.values, full.sigma, target, source)


def band_integral(values, freqs, dt):
    """dt times the trapezoid integral over the frequency grid."""
    return dt * float(np.trapezoid(values, freqs))


def apply_causal_filter(ma, filter_terms):
    """Convolve MA coefficients with a causal filter G_0 = I, G_1, ..., G_L."""
    from .specfac import minimum_phase_check

    g = np.asarray(filter_terms, dtype=float)
    if g.ndim == 2:
        g = g[None]
    if g.shape[1:] != (ma.n, ma.n) or not np.allclose(g[0], np.eye(ma.n), atol=0):
        raise FilterError("filter must have G_0 = I and match the process dimension")
    ok, roots = minimum_phase_check(g)
    if not ok:
        raise FilterError(f"filter is not minimum-phase (roots {roots})")
    b = ma.terms
    out = np.zeros((len(b) + len(g) - 1, ma.n, ma.n))
    for k, gk in enumerate(g):
        out[k:k + len(b)] += np.einsum("ij,ljk->lik", gk, b)
    out[0] = np.eye(ma.n)
    return MaSequence(out, ma.dt)


def appendix_c_closed_forms(a, b, c):
    """Closed-form 1- and 2-step GC for the bivariate VAR(1)
    ``A = [[a, c], [0, b]]`` with unit noise.
    """
    if not (abs(a) < 1 and abs(b) < 1):
        raise InputError("need |a| < 1 and |b| < 1")
    d = 0.5 * (1 + b * b + c * c)
    ups = d + np.sqrt(d * d - b * b)
    h = b / ups
    gc1 = np.log(ups)
    gc2 = np.log(ups * (1 + (a + b - h) ** 2) / (1 + a * a + c * c))
    return float(gc1), float(gc2)
