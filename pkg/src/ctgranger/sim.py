"""Seeded simulation of point-delay CTVAR processes and discrete VARs.

The continuous-time process is integrated with the lagged Euler recursion

    x_k = x_{k-1} + δt Σ_ℓ A_ℓ[δt] x_{k-ℓ} + η_k,    η_k ~ N(0, δt Σ),

where A_ℓ[δt] collects the kernel mass in ((ℓ−1)δt, ℓδt].  The inner loop
runs in a compiled extension when it is available and in NumPy/SciPy
otherwise; ``BACKEND`` says which one was picked at import time.  Setting
``CTGRANGER_PURE_PYTHON=1`` forces the fallback.

Random streams: trial ``i`` under master seed ``s`` uses NumPy's Philox
counter-based generator keyed by ``SeedSequence([s, i])`` and draws
standard normals (ziggurat) row by row, so a given (seed, trial) pair
reproduces across platforms and is independent of how trials are
scheduled.
"""
import math
import os
from dataclasses import dataclass

import numpy as np

from . import _simkernel_py
from .errors import InputError, StabilityError
from .models import TimeSeriesData, _frozen

if os.environ.get("CTGRANGER_PURE_PYTHON") == "1":
    _recursion = _simkernel_py.recursion
    BACKEND = "python"
else:
    try:
        from ._simkernel import recursion as _recursion
        BACKEND = "cython"
    except ImportError:  # extension not built
        _recursion = _simkernel_py.recursion
        BACKEND = "python"

DIVERGENCE = 1e8
_SNAP = 1e-9


def rng_for(seed, trial=0):
    """Philox generator for trial ``trial`` of master seed ``seed``."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([int(seed), int(trial)])))


def relaxation_time(kernel):
    """Slowest relaxation time 1/min|Re λ| of the zero-frequency drift ΣA_j (ms)."""
    total = kernel.matrices.sum(axis=0)
    rates = np.abs(np.linalg.eigvals(total).real)
    slow = rates.min()
    if slow <= 0:
        raise StabilityError("kernel has a zero relaxation rate")
    return 1.0 / slow


@dataclass(frozen=True)
class SimConfig:
    """Integration step ``dt`` and ``duration`` (ms); burn-in defaults from the kernel."""

    duration: float
    dt: float = 0.01
    burn_in: float = None
    seed: int = 0
    trial: int = 0

    def __post_init__(self):
        if not self.duration > 0 or not self.dt > 0:
            raise InputError("duration and dt must be positive")
        if self.burn_in is not None and self.burn_in < 0:
            raise InputError("burn_in must be nonnegative")
        if not 0 <= int(self.seed) < 2 ** 64:
            raise InputError("seed must fit in 64 bits")

    def resolve_burn_in(self, kernel):
        slow = relaxation_time(kernel)
        tau_max = float(kernel.delays.max())
        if self.burn_in is None:
            return 10 * slow + tau_max
        if self.burn_in < 5 * slow:
            raise InputError(f"burn_in {self.burn_in:g} ms is below 5 relaxation times ({5 * slow:g} ms)")
        return float(self.burn_in)


@dataclass(frozen=True)
class Path:
    """Simulated samples (m × n) every ``dt`` ms."""

    samples: np.ndarray
    dt: float


def _bin(tau, dt):
    return max(1, math.ceil(tau / dt - _SNAP))


def discretize_kernel(kernel, dt):
    """Lag bins and coefficients A_k[δt] for a point-delay kernel.

    A term at delay τ lands in bin ⌈τ/δt⌉ (τ = 0 goes to bin 1); terms in
    the same bin are summed.  Returns ``(lags, mats)`` sorted by lag.
    """
    if not dt > 0:
        raise InputError("dt must be positive")
    acc = {}
    for tau, a in zip(kernel.delays, kernel.matrices):
        k = _bin(tau, dt)
        acc[k] = acc.get(k, 0.0) + a
    lags = sorted(acc)
    return np.array(lags, dtype=np.intp), np.array([acc[k] for k in lags])


def _run(x, lags, mats, noise, start):
    bad = _recursion(x, np.ascontiguousarray(lags, dtype=np.intp),
                     np.ascontiguousarray(mats, dtype=float), noise, int(start), DIVERGENCE)
    if bad >= 0:
        raise StabilityError(f"simulation diverged (|x| > {DIVERGENCE:g}) at step {bad}")


def simulate_ctvar(kernel, config):
    """Simulate a stationary path of a point-delay CTVAR.

    History before the burn-in is zero; the burn-in rows are discarded.
    """
    kernel.check_stable()
    dt = config.dt
    pos = kernel.delays[kernel.delays > 0]
    if len(pos) and dt > pos.min() / 100 * (1 + 1e-12):
        raise InputError("integration step must be at most min positive delay / 100")
    burn = config.resolve_burn_in(kernel)
    lags, mats = discretize_kernel(kernel, dt)
    mats = dt * mats
    if lags[0] == 1:
        mats[0] = mats[0] + np.eye(kernel.n)
    else:
        lags = np.concatenate([[1], lags]).astype(np.intp)
        mats = np.concatenate([np.eye(kernel.n)[None], mats])
    hist = int(lags.max())
    n_keep = int(round(config.duration / dt)) + 1
    n_burn = int(math.ceil(burn / dt))
    rows = hist + n_burn + n_keep
    chol = np.linalg.cholesky(dt * kernel.sigma)
    noise = rng_for(config.seed, config.trial).standard_normal((rows, kernel.n)) @ chol.T
    x = np.zeros((rows, kernel.n))
    _run(x, lags, mats, noise, hist)
    return Path(_frozen(x[hist + n_burn:]), dt)


def subsample_path(path, dt_int, dt_out, demean=True):
    """Every (dt_out/dt_int)-th row of ``path`` starting from the first."""
    ratio = dt_out / dt_int
    stride = int(round(ratio))
    if stride < 1 or abs(ratio - stride) > _SNAP * max(ratio, 1.0):
        raise InputError(f"dt_out={dt_out:g} is not an integer multiple of {dt_int:g}")
    samples = path.samples if isinstance(path, Path) else np.asarray(path)
    return TimeSeriesData(samples[::stride], dt_out, demean)


def simulate_var(model, m, seed, trial=0, demean=False):
    """m observations of a stable VAR; innovations N(0, Δt Σ), 1000·p burn-in."""
    model.check_stable()
    if int(m) < 2:
        raise InputError("need at least two observations")
    p, n = model.order, model.n
    burn = 1000 * p
    rows = p + burn + int(m)
    chol = np.linalg.cholesky(model.covariance)
    noise = rng_for(seed, trial).standard_normal((rows, n)) @ chol.T
    x = np.zeros((rows, n))
    lags = np.arange(1, p + 1, dtype=np.intp)
    _run(x, lags, np.array(model.coeffs), noise, p)
    return TimeSeriesData(x[p + burn:], model.dt, demean)
