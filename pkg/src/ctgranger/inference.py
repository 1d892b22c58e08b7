"""VAR estimation, Granger causality sampling theory and detectability.

Sample GC is the log-likelihood ratio statistic of nested VAR(p) models.
Asymptotically m·F̂ ~ χ²(d; m·F) with d = p·n_x·n_y, which gives p-values,
the d/m bias correction and the Type II error rate.
"""
import math
from dataclasses import dataclass

import numpy as np
from scipy import optimize, special

from ._linalg import logdet_psd, sym
from .errors import InputError, NumericalError, StabilityError
from .models import TimeSeriesData, VarModel, as_partition
from .specfac import reduce_model


@dataclass(frozen=True)
class GcEstimate:
    value: float
    dof: int
    nobs: int
    pvalue: float
    debiased: float
    source: tuple = ()
    target: tuple = ()


@dataclass(frozen=True)
class DetectabilityPoint:
    dt: float
    duration: float
    m: int
    order: int
    gc_true: float
    p_ii: float


# ---------------------------------------------------------------- fitting

def _lagged(x, p, start):
    """Targets x[start:] and stacked regressors [x_{k-1}, ..., x_{k-p}]."""
    m = x.shape[0]
    y = x[start:]
    reg = np.hstack([x[start - l:m - l] for l in range(1, p + 1)])
    return y, reg


def _ols(x, p, start):
    y, reg = _lagged(x, p, start)
    if reg.shape[0] <= reg.shape[1]:
        raise InputError(f"too few observations ({x.shape[0]}) for order {p}")
    q, r = np.linalg.qr(reg)
    diag = np.abs(np.diag(r))
    if diag.min() <= 1e-10 * max(diag.max(), np.finfo(float).tiny):
        raise NumericalError("regressor matrix is rank deficient")
    beta = np.linalg.solve(r, q.T @ y)
    resid = y - reg @ beta
    cov = sym(resid.T @ resid / len(y))
    n = x.shape[1]
    coeffs = beta.T.reshape(n, p, n).transpose(1, 0, 2)
    return coeffs, cov


def _as_data(data):
    return data if isinstance(data, TimeSeriesData) else TimeSeriesData(data)


def fit_var(data, p):
    """OLS VAR(p) fit.  Returns (model, log det residual covariance).

    The residual intensity is the sample residual covariance divided by Δt.
    """
    data = _as_data(data)
    p = int(p)
    if p < 1:
        raise InputError("model order must be at least 1")
    coeffs, cov = _ols(data.observations, p, p)
    if np.linalg.eigvalsh(cov).min() <= 0:
        raise NumericalError("residual covariance is singular")
    return VarModel(coeffs, cov / data.dt, data.dt), logdet_psd(cov, "residual covariance")


def select_order_aic(data, p_max):
    """AIC-minimizing order in 1..p_max (0 is floored to 1).

    All orders are fitted on the same sample, x[p_max:], so their
    likelihoods are comparable.  AIC = M log det Ξ̂ + 2 p n².
    """
    data = _as_data(data)
    p_max = int(p_max)
    if p_max < 1:
        raise InputError("p_max must be at least 1")
    x = data.observations
    m, n = x.shape
    if m - p_max <= n * (p_max + 1):
        raise InputError(f"too few observations ({m}) for p_max={p_max}")
    big = x[p_max:]
    rows = len(big)
    aic = [rows * logdet_psd(sym(big.T @ big / rows), "sample covariance")]
    for p in range(1, p_max + 1):
        _, cov = _ols(x, p, p_max)
        aic.append(rows * logdet_psd(cov, "residual covariance") + 2 * p * n * n)
    return max(int(np.argmin(aic)), 1)


def order_heuristic(tau, dt):
    """max(round(τ/Δt), 1) with ties rounded up."""
    if not dt > 0 or tau < 0:
        raise InputError("need dt > 0 and tau >= 0")
    return max(int(math.floor(tau / dt + 0.5 + 1e-12)), 1)


# ---------------------------------------------------------------- GC

def _gc_from_model(model, x, y, nobs):
    red = reduce_model(model, x)
    value = max(logdet_psd(red.sigma) - logdet_psd(model.sigma[np.ix_(x, x)]), 0.0)
    d = model.order * len(x) * len(y)
    return GcEstimate(value, d, nobs, float(special.chdtrc(d, nobs * value)),
                      value - d / nobs, tuple(y.tolist()), tuple(x.tolist()))


def estimate_gc(data, target, source=None, p=1, model=None):
    """Sample GC source → target from a VAR(p) fit and DARE reduction.

    ``target`` and ``source`` must split the variables.  Pass a fitted
    ``model`` to reuse it.
    """
    data = _as_data(data)
    x, y = as_partition(data.n, target, source)
    if model is None:
        model, _ = fit_var(data, p)
    if not model.is_stable():
        raise StabilityError("fitted VAR is unstable")
    return _gc_from_model(model, x, y, data.m - model.order)


def debias(estimate):
    """value − d/m (may come out slightly negative)."""
    return estimate.value - estimate.dof / estimate.nobs


# ---------------------------------------------------------------- χ²

class NoncentralChi2:
    """χ²(d; δ) as a Poisson(δ/2) mixture of central χ²(d + 2j).

    Central χ² uses the regularized incomplete gamma function.  The mixture
    is summed outward from the Poisson mode and stops once terms fall below
    1e-14 of the running sum.
    """

    def __init__(self, d, noncentrality=0.0):
        if not (np.isfinite(d) and d > 0):
            raise InputError("degrees of freedom must be positive")
        if not (np.isfinite(noncentrality) and noncentrality >= 0):
            raise InputError("noncentrality must be finite and nonnegative")
        self.d = float(d)
        self.nc = float(noncentrality)

    def cdf(self, u):
        u = float(u)
        if u <= 0:
            return 0.0
        if u == np.inf:
            return 1.0
        if self.nc == 0:
            return float(special.gammainc(self.d / 2, u / 2))
        lam = self.nc / 2
        mode = int(lam)
        total = 0.0
        for step in (1, -1):
            j = mode if step == 1 else mode - 1
            while j >= 0:
                w = math.exp(-lam + j * math.log(lam) - math.lgamma(j + 1)) if lam > 0 else float(j == 0)
                term = w * special.gammainc(self.d / 2 + j, u / 2)
                total += term
                if w < 1e-14 * max(total, 1e-300) and (step == -1 or j > lam):
                    break
                j += step
        return float(min(total, 1.0))

    def quantile(self, q):
        if not 0 <= q <= 1:
            raise InputError("quantile level must lie in [0, 1]")
        if q == 0:
            return 0.0
        if q == 1:
            return np.inf
        if self.nc == 0:
            return float(2 * special.gammaincinv(self.d / 2, q))
        hi = self.d + self.nc + 10 * math.sqrt(2 * (self.d + 2 * self.nc)) + 10
        while self.cdf(hi) < q:
            hi *= 2
        return float(optimize.brentq(lambda u: self.cdf(u) - q, 0.0, hi, xtol=1e-14, rtol=1e-15))


def noncentral_chi2(d, noncentrality=0.0):
    return NoncentralChi2(d, noncentrality)


def type2_error_rate(x, alpha, d, m):
    """P_II = F_x(F_0⁻¹(1 − α)) where F_x is the law of m·F̂ ~ χ²(d; m x)."""
    if not 0 < alpha < 1:
        raise InputError("alpha must lie in (0, 1)")
    crit = NoncentralChi2(d).quantile(1 - alpha)
    return NoncentralChi2(d, m * max(float(x), 0.0)).cdf(crit)


# ---------------------------------------------------------------- detectability

def true_subsampled_gc(params, dt):
    """Subsampled GC Y→X: closed form for ρ = 0, Whittle route otherwise."""
    from .minimal import subsampled_gc, subsampled_gc_numeric
    if params.rho == 0:
        return subsampled_gc(params, dt)[0]
    return subsampled_gc_numeric(params, dt)[0]


def detectability_curve(params, duration, alpha, dts):
    """Theoretical Type II error rate along a grid of sample intervals."""
    out = []
    for dt in dts:
        dt = float(dt)
        if not dt > 0:
            raise InputError("sample intervals must be positive")
        m = int(math.floor(duration / dt + 1e-9))
        if m < 1:
            raise InputError(f"duration {duration:g} shorter than dt {dt:g}")
        p = order_heuristic(params.tau, dt)
        x = true_subsampled_gc(params, dt)
        out.append(DetectabilityPoint(dt, float(duration), m, p, x, type2_error_rate(x, alpha, p, m)))
    return out


# ---------------------------------------------------------------- Monte Carlo

@dataclass(frozen=True)
class ErrorRates:
    dt: float
    type1: float
    type2: float
    mean_debiased: float
    se_debiased: float
    ci_lo: float
    ci_hi: float
    type2_theory: float
    median_order: float
    n_trials: int


def default_p_max(tau, dt):
    return max(2 * order_heuristic(tau, dt) + 2, 4)


def _trial_stats(data, alpha, p_max, x_true):
    p = select_order_aic(data, p_max)
    model, _ = fit_var(data, p)
    yx = estimate_gc(data, [0], [1], model=model)
    xy = estimate_gc(data, [1], [0], model=model)
    theory = type2_error_rate(x_true, alpha, yx.dof, yx.nobs)
    return p, yx, xy, theory


def validate_sweep(params, dts, duration, n_trials, alpha, seed, sim_dt=0.01,
                   p_max=None, bonferroni=False):
    """Monte Carlo error rates at several sample intervals.

    Each trial simulates one continuous path and subsamples it at every Δt,
    so rows share realizations.  Y→X is the causal direction, X→Y the null.
    """
    from .ctvar_numeric import kernel_from_minimal
    from .sim import SimConfig, simulate_ctvar, subsample_path
    if n_trials < 1:
        raise InputError("need at least one trial")
    level = alpha / 2 if bonferroni else alpha
    dts = [float(d) for d in dts]
    kernel = kernel_from_minimal(params)
    truth = [true_subsampled_gc(params, dt) for dt in dts]
    rec = [[] for _ in dts]
    for trial in range(int(n_trials)):
        path = simulate_ctvar(kernel, SimConfig(duration, sim_dt, seed=seed, trial=trial))
        for i, dt in enumerate(dts):
            data = subsample_path(path, sim_dt, dt)
            pm = p_max if p_max is not None else default_p_max(params.tau, dt)
            rec[i].append(_trial_stats(data, level, pm, truth[i]))
    out = []
    for dt, rows in zip(dts, rec):
        deb = np.array([r[1].debiased for r in rows])
        out.append(ErrorRates(
            dt=dt,
            type1=float(np.mean([r[2].pvalue < level for r in rows])),
            type2=float(np.mean([r[1].pvalue >= level for r in rows])),
            mean_debiased=float(deb.mean()),
            se_debiased=float(deb.std(ddof=1) / math.sqrt(len(deb))) if len(deb) > 1 else float("nan"),
            ci_lo=float(np.quantile(deb, alpha / 2)),
            ci_hi=float(np.quantile(deb, 1 - alpha / 2)),
            type2_theory=float(np.mean([r[3] for r in rows])),
            median_order=float(np.median([r[0] for r in rows])),
            n_trials=len(rows),
        ))
    return out


def empirical_error_rates(params, dt, duration, n_trials, alpha, seed, **kw):
    """Single-interval version of ``validate_sweep``."""
    return validate_sweep(params, [dt], duration, n_trials, alpha, seed, **kw)[0]
