"""Value types shared by the discrete-time modules.

All arrays are stored as read-only copies so instances can be shared
freely between threads.
"""
from dataclasses import dataclass

import numpy as np

from ._linalg import companion, spectral_radius
from .errors import InputError, StabilityError

MAX_TERMS = 10**6
DECAY_TOL = 1e-15


def _frozen(a, dtype=float):
    a = np.array(a, dtype=dtype)
    a.setflags(write=False)
    return a


def as_partition(n, target, source=None):
    """Validate a (target, source) split of ``range(n)``.

    ``source`` defaults to the complement of ``target``.  The two sets must
    be disjoint, nonempty and together cover every variable.
    """
    x = np.atleast_1d(np.asarray(target, dtype=int))
    if source is None:
        y = np.setdiff1d(np.arange(n), x)
    else:
        y = np.atleast_1d(np.asarray(source, dtype=int))
    allidx = np.concatenate([x, y])
    if len(x) == 0 or len(y) == 0:
        raise InputError("target and source must both be nonempty")
    if np.any(allidx < 0) or np.any(allidx >= n):
        raise InputError(f"partition indices out of range for n={n}")
    if len(np.unique(allidx)) != len(allidx) or len(allidx) != n:
        raise InputError("target and source must be disjoint and exhaustive")
    return x, y


@dataclass(frozen=True)
class VarModel:
    """Discrete-time VAR(p) with noise intensity ``sigma`` and step ``dt``.

    ``x_k = sum_l A_l x_{k-l} + e_k`` with ``cov(e_k) = dt * sigma``.
    """

    coeffs: np.ndarray
    sigma: np.ndarray
    dt: float = 1.0

    def __post_init__(self):
        coeffs = np.asarray(self.coeffs, dtype=float)
        if coeffs.ndim == 2:
            coeffs = coeffs[None]
        sigma = np.atleast_2d(np.asarray(self.sigma, dtype=float))
        n = sigma.shape[0]
        if coeffs.ndim != 3 or coeffs.shape[1:] != (n, n) or coeffs.shape[0] < 1:
            raise InputError(f"coefficients must have shape (p, {n}, {n})")
        if sigma.shape != (n, n):
            raise InputError("sigma must be square")
        if not (np.all(np.isfinite(coeffs)) and np.all(np.isfinite(sigma))):
            raise InputError("non-finite model parameters")
        scale = max(np.max(np.abs(sigma)), np.finfo(float).tiny)
        if np.max(np.abs(sigma - sigma.T)) > 1e-12 * scale:
            raise InputError("sigma is not symmetric")
        sigma = 0.5 * (sigma + sigma.T)
        if np.min(np.linalg.eigvalsh(sigma)) <= 0:
            raise InputError("sigma is not positive definite")
        if not self.dt > 0:
            raise InputError("dt must be positive")
        object.__setattr__(self, "coeffs", _frozen(coeffs))
        object.__setattr__(self, "sigma", _frozen(sigma))
        object.__setattr__(self, "dt", float(self.dt))

    @property
    def order(self):
        return self.coeffs.shape[0]

    @property
    def n(self):
        return self.sigma.shape[0]

    @property
    def covariance(self):
        """Innovations covariance ``dt * sigma`` (units x²)."""
        return self.dt * self.sigma

    def spectral_radius(self):
        return spectral_radius(companion(self.coeffs))

    def is_stable(self):
        return self.spectral_radius() < 1.0

    def check_stable(self):
        rho = self.spectral_radius()
        if not rho < 1.0:
            raise StabilityError(f"VAR is unstable (companion spectral radius {rho:.6g})")
        return self


@dataclass(frozen=True)
class TimeSeriesData:
    """Observations (m × n) sampled every ``dt`` ms; demeaned on request."""

    observations: np.ndarray
    dt: float = 1.0
    demean: bool = True

    def __post_init__(self):
        x = np.asarray(self.observations, dtype=float)
        if x.ndim == 1:
            x = x[:, None]
        if x.ndim != 2 or x.shape[0] < 2 or x.shape[1] < 1:
            raise InputError("observations must be an m x n matrix with m >= 2")
        if not np.all(np.isfinite(x)):
            raise InputError("observations contain non-finite values")
        if not self.dt > 0:
            raise InputError("dt must be positive")
        if self.demean:
            x = x - x.mean(axis=0)
        object.__setattr__(self, "observations", _frozen(x))
        object.__setattr__(self, "dt", float(self.dt))

    @property
    def m(self):
        return self.observations.shape[0]

    @property
    def n(self):
        return self.observations.shape[1]


@dataclass(frozen=True)
class MaSequence:
    """Moving-average coefficients ``B_0 = I, B_1, ...``."""

    terms: np.ndarray
    dt: float = 1.0

    def __post_init__(self):
        terms = np.asarray(self.terms, dtype=float)
        if terms.ndim != 3 or terms.shape[1] != terms.shape[2]:
            raise InputError("MA terms must have shape (K+1, n, n)")
        if not np.array_equal(terms[0], np.eye(terms.shape[1])):
            raise InputError("B_0 must be the identity")
        object.__setattr__(self, "terms", _frozen(terms))
        object.__setattr__(self, "dt", float(self.dt))

    @property
    def n(self):
        return self.terms.shape[1]


@dataclass(frozen=True)
class AutocovSequence:
    """Autocovariances ``Γ_0..Γ_K`` (``Γ_{-k} = Γ_kᵀ`` implicit)."""

    lags: np.ndarray
    dt: float = 1.0

    def __post_init__(self):
        lags = np.asarray(self.lags, dtype=float)
        if lags.ndim == 1:
            lags = lags[:, None, None]
        if lags.ndim != 3 or lags.shape[1] != lags.shape[2]:
            raise InputError("autocovariance lags must have shape (K+1, n, n)")
        object.__setattr__(self, "lags", _frozen(lags))
        object.__setattr__(self, "dt", float(self.dt))

    @property
    def n(self):
        return self.lags.shape[1]

    def sub(self, idx):
        """Autocovariance of the subprocess on variables ``idx``."""
        idx = np.atleast_1d(idx)
        return AutocovSequence(self.lags[:, idx][:, :, idx], self.dt)


@dataclass(frozen=True)
class SpectralGrid:
    """Per-frequency matrices on an ascending grid of ordinary frequencies."""

    freqs: np.ndarray
    values: np.ndarray
    kind: str = "cpsd"

    def __post_init__(self):
        if self.kind not in ("cpsd", "transfer"):
            raise InputError("kind must be 'cpsd' or 'transfer'")
        object.__setattr__(self, "freqs", _frozen(self.freqs))
        object.__setattr__(self, "values", _frozen(self.values, complex))


@dataclass(frozen=True)
class MsPredictionError:
    horizon: int
    matrix: np.ndarray


@dataclass(frozen=True)
class GcValue:
    """A causality value in nats from ``source`` to ``target``."""

    value: float
    source: tuple = ()
    target: tuple = ()
    horizon: int = 1

    def __float__(self):
        return float(self.value)


def frequency_grid(dt, n_points=1024):
    """Uniform grid over the closed Nyquist band ``[-1/(2dt), 1/(2dt)]``.

    Including both end points makes the trapezoid rule coincide with the
    periodic rectangle rule, which converges geometrically for the smooth
    periodic integrands that arise here.
    """
    if n_points < 2:
        raise InputError("need at least two frequency points")
    f = 0.5 / dt
    return np.linspace(-f, f, n_points)
