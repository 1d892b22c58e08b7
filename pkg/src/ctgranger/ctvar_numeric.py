"""Continuous-time machinery for point-delay CTVAR processes.

Kernels are finite sums of point delays, ``A(u) = Σ_j A_j δ(u − τ_j)``, so the
process obeys

    dX(t) = Σ_j A_j X(t − τ_j) dt + dW(t),     cov dW = Σ dt.

The MA kernel solves ``Ḃ(u) = Σ_j A_j B(u − τ_j)`` with ``B(0) = I`` and
``B(u) = 0`` for ``u < 0``.  Everything here works on kernel samples on a
uniform grid, so the same routines serve the minimal model and any other
point-delay kernel.
"""
from dataclasses import dataclass

import numpy as np
from scipy import integrate, interpolate, linalg

from ._linalg import logdet_psd, sym
from .errors import (InputError, NumericalError, SingularityError,
                     StabilityError, TruncationError)
from .models import VarModel, _frozen, as_partition

GROWTH_LIMIT = 1e6


@dataclass(frozen=True)
class DelayKernel:
    """Point-delay kernel: ``terms`` is a sequence of ``(tau, A)`` pairs."""

    delays: np.ndarray
    matrices: np.ndarray
    sigma: np.ndarray

    def __init__(self, terms, sigma):
        terms = list(terms)
        if not terms:
            raise InputError("kernel needs at least one term")
        delays = np.array([float(t) for t, _ in terms])
        mats = np.array([np.atleast_2d(np.asarray(m, dtype=float)) for _, m in terms])
        sigma = np.atleast_2d(np.asarray(sigma, dtype=float))
        n = sigma.shape[0]
        if mats.shape[1:] != (n, n) or sigma.shape != (n, n):
            raise InputError("kernel matrices and sigma must all be n x n")
        if np.any(delays < 0) or np.any(np.diff(delays) <= 0):
            raise InputError("delays must be nonnegative and strictly increasing")
        if not (np.all(np.isfinite(mats)) and np.all(np.isfinite(sigma))):
            raise InputError("kernel contains non-finite values")
        if not np.allclose(sigma, sigma.T, rtol=0, atol=1e-12 * max(1.0, np.abs(sigma).max())):
            raise InputError("sigma must be symmetric")
        if np.linalg.eigvalsh(sigma).min() <= 0:
            raise InputError("sigma must be positive definite")
        object.__setattr__(self, "delays", _frozen(delays))
        object.__setattr__(self, "matrices", _frozen(mats))
        object.__setattr__(self, "sigma", _frozen(sigma))

    @property
    def n(self):
        return self.sigma.shape[0]

    @property
    def terms(self):
        return list(zip(self.delays.tolist(), self.matrices))

    @property
    def max_rate(self):
        """Sum of the spectral norms of the coefficient matrices (1/ms)."""
        return float(sum(np.linalg.norm(m, 2) for m in self.matrices))

    def characteristic(self, zeta):
        """Φ(ζ) = ζI − Σ_j A_j e^{−ζτ_j}, broadcast over ``zeta``."""
        zeta = np.asarray(zeta, dtype=complex)
        out = zeta[..., None, None] * np.eye(self.n)
        for tau, a in zip(self.delays, self.matrices):
            out = out - np.exp(-zeta * tau)[..., None, None] * a
        return out

    def transfer(self, lam):
        """H(λ) = Φ(2πiλ)⁻¹ at frequencies ``lam`` (kHz)."""
        return np.linalg.inv(self.characteristic(2j * np.pi * np.asarray(lam, dtype=float)))

    def is_stable(self, n_points=10_000):
        """Heuristic stability screen on the closed right half-plane.

        det Φ is sampled on the boundary of [0, R] × [−R, R] with R above the
        Rouché bound, so no root can lie outside the rectangle; stability
        means det Φ stays away from zero there and has winding number zero.
        """
        r = 10 * max(self.max_rate, 1e-3)
        if np.any(self.delays > 0):
            r = max(r, 2 * self.max_rate + 1.0)
        per = n_points // 4
        s = np.linspace(0.0, 1.0, per, endpoint=False)
        path = np.concatenate([
            1j * r * (1 - 2 * s),        # down the imaginary axis
            r * s - 1j * r,              # along the bottom
            r - 1j * r + 2j * r * s,     # up the right edge
            r * (1 - s) + 1j * r,        # back along the top
        ])
        det = np.linalg.det(self.characteristic(path))
        mag = np.abs(det)
        scale = r ** self.n
        if mag.min() < 1e-10 * scale:
            return False
        phase = np.unwrap(np.angle(np.append(det, det[0])))
        winding = (phase[-1] - phase[0]) / (2 * np.pi)
        return abs(winding) < 0.5

    def check_stable(self):
        if not self.is_stable():
            raise StabilityError("delay kernel failed the right half-plane stability screen")


@dataclass(frozen=True)
class KernelSamples:
    """MA kernel samples B(0), B(du), ... on a uniform grid."""

    du: float
    samples: np.ndarray

    def __post_init__(self):
        b = _frozen(self.samples)
        if b.ndim != 3 or b.shape[1] != b.shape[2]:
            raise InputError("samples must have shape (N, n, n)")
        if not np.array_equal(b[0], np.eye(b.shape[1])):
            raise InputError("B(0) must be the identity")
        if not self.du > 0:
            raise InputError("du must be positive")
        object.__setattr__(self, "samples", b)

    @property
    def grid(self):
        return self.du * np.arange(len(self.samples))

    @property
    def u_max(self):
        return self.du * (len(self.samples) - 1)

    def derivative_at_zero(self):
        """One-sided second-order forward difference Ḃ(0)."""
        b = self.samples
        if len(b) < 3:
            raise InputError("need at least three samples for the derivative")
        return (-3 * b[0] + 4 * b[1] - b[2]) / (2 * self.du)


@dataclass(frozen=True)
class AutocovFunction:
    """Γ(0), Γ(dt), ... of a stationary continuous-time process."""

    dt: float
    lags: np.ndarray

    def __call__(self, t):
        """Γ(t) at grid points (negative t via transpose)."""
        k = np.rint(np.asarray(t, dtype=float) / self.dt).astype(int)
        g = self.lags[np.abs(k)]
        return np.where((k < 0)[..., None, None], np.swapaxes(g, -1, -2), g)


@dataclass(frozen=True)
class AsymptoticExpansion:
    """Small-Δt expansion of the scaled CPSD: S(λ;Δt) ≈ S(λ) + Δt²C + Δt⁴E."""

    sigma_coef: np.ndarray
    quartic_coef: np.ndarray = None
    omega: np.ndarray = None


def kernel_from_minimal(params):
    """The minimal model written as a two-term point-delay kernel."""
    p = params
    a0 = np.diag([-p.a, -p.b])
    if p.tau == 0:
        return DelayKernel([(0.0, a0 + np.array([[0.0, p.c], [0.0, 0.0]]))], p.sigma)
    return DelayKernel([(0.0, a0), (p.tau, np.array([[0.0, p.c], [0.0, 0.0]]))], p.sigma)


# ---------------------------------------------------------------- MA kernel

def ma_kernel_solve(kernel, u_max, du):
    """Integrate the MA-kernel ODE with a fixed-step RK4 scheme.

    Positive delays must be integer multiples of ``du``, so that every
    derivative discontinuity (at multiples of the delays) falls on a step
    boundary.  Delayed values at half steps come from cubic Hermite
    interpolation of the already computed samples and their derivatives,
    which keeps the scheme fourth order.
    """
    if not du > 0 or not u_max >= 0:
        raise InputError("need du > 0 and u_max >= 0")
    pos = kernel.delays[kernel.delays > 0]
    if len(pos):
        if du > pos.min() / 50 * (1 + 1e-12):
            raise InputError("du must not exceed min positive delay / 50")
        ratio = pos / du
        if np.any(np.abs(ratio - np.rint(ratio)) > 1e-9 * np.maximum(ratio, 1)):
            raise InputError("positive delays must be integer multiples of du")
    elif u_max > 0 and du > u_max / 1000 * (1 + 1e-12):
        raise InputError("du must not exceed u_max / 1000 for zero-delay kernels")
    n = kernel.n
    n_steps = int(np.ceil(u_max / du - 1e-9))
    zero = kernel.delays == 0
    a_now = kernel.matrices[zero].sum(axis=0) if zero.any() else np.zeros((n, n))
    lagged = [(int(round(t / du)), m) for t, m in zip(kernel.delays, kernel.matrices) if t > 0]

    b = np.zeros((n_steps + 1, n, n))
    # Ḃ jumps where u − τ_j crosses a breakpoint, so keep both one-sided limits
    d_right = np.zeros_like(b)
    d_left = np.zeros_like(b)
    b[0] = np.eye(n)

    def delayed(k, half):
        # Σ_j A_j B(u_k + half·du/2 − τ_j), taking B ≡ 0 on u < 0
        out = np.zeros((n, n))
        for lag, m in lagged:
            j = k - lag
            if half == 2:
                j += 1
                if j <= 0:      # left limit at the breakpoint itself
                    continue
                out += m @ b[j]
            elif j < 0:
                continue
            elif half == 0:
                out += m @ b[j]
            else:
                mid = 0.5 * (b[j] + b[j + 1]) + du / 8 * (d_right[j] - d_left[j + 1])
                out += m @ mid
        return out

    for k in range(n_steps):
        d_right[k] = a_now @ b[k] + delayed(k, 0)
        d1, d2 = delayed(k, 1), delayed(k, 2)
        k1 = d_right[k]
        k2 = a_now @ (b[k] + 0.5 * du * k1) + d1
        k3 = a_now @ (b[k] + 0.5 * du * k2) + d1
        k4 = a_now @ (b[k] + du * k3) + d2
        b[k + 1] = b[k] + du / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        d_left[k + 1] = a_now @ b[k + 1] + d2
        nrm = np.abs(b[k + 1]).max()
        if not np.isfinite(nrm) or nrm > GROWTH_LIMIT:
            raise StabilityError(f"MA kernel grew beyond {GROWTH_LIMIT:g} by u = {(k + 1) * du:g}")
    return KernelSamples(du, b)


# ------------------------------------------------------- second-order moments

def autocov_quadrature(samples, sigma, t_max):
    """Γ(t) = ∫₀^∞ B(t+u) Σ B(u)ᵀ du on the sample grid, by the trapezoid rule.

    The correlation over u is done with FFTs, one per matrix entry triple.
    """
    b = samples.samples
    du = samples.du
    sigma = np.atleast_2d(np.asarray(sigma, dtype=float))
    head = np.abs(b).max()
    if np.abs(b[-1]).max() > 1e-10 * head:
        raise TruncationError("kernel samples have not decayed below 1e-10 at the tail")
    n_t = int(round(t_max / du))
    if n_t < 0 or n_t >= len(b):
        raise InputError("t_max outside the sampled range")
    w = np.ones(len(b))
    w[0] = 0.5
    w[-1] = 0.5
    d = np.einsum("lm,ujm->ulj", sigma, b) * w[:, None, None]   # Σ B(u)ᵀ, weighted
    size = 1 << int(np.ceil(np.log2(2 * len(b))))
    fb = np.fft.rfft(b, size, axis=0)
    fd = np.fft.rfft(d, size, axis=0)
    # Σ_u B(k+u) D(u): correlation, i.e. B ⋆ D
    corr = np.fft.irfft(np.einsum("fil,flj->fij", fb, np.conj(fd)), size, axis=0)
    lags = du * corr[: n_t + 1]
    lags[0] = sym(lags[0])
    return AutocovFunction(du, _frozen(lags))


def ct_mspe(samples, sigma, h):
    """MSE(h) = ∫₀ʰ B(u) Σ B(u)ᵀ du (Simpson, Hermite interpolation off-grid)."""
    h = float(h)
    if h < 0 or h > samples.u_max * (1 + 1e-12):
        raise InputError("horizon outside the sampled range")
    if h == 0:
        n = samples.samples.shape[1]
        return np.zeros((n, n))
    return _mspe_interpolant(samples, sigma)(h)


def _mspe_interpolant(samples, sigma):
    b = samples.samples
    sigma = np.atleast_2d(np.asarray(sigma, dtype=float))
    f = np.einsum("uil,lm,ujm->uij", b, sigma, b)
    cum = np.concatenate([np.zeros((1,) + f.shape[1:]),
                          integrate.cumulative_simpson(f, dx=samples.du, axis=0)])
    return interpolate.CubicHermiteSpline(samples.grid, cum, f, axis=0)


# ---------------------------------------------------------------- VOU sampling

def matrix_exponential(m):
    return linalg.expm(np.asarray(m, dtype=float))


def lyapunov_continuous_solve(a, sigma):
    """Γ solving AΓ + ΓAᵀ + Σ = 0."""
    a = np.atleast_2d(np.asarray(a, dtype=float))
    sigma = np.atleast_2d(np.asarray(sigma, dtype=float))
    ev = np.linalg.eigvals(a)
    pair = np.abs(ev[:, None] + ev[None, :]).min()
    if pair <= 1e-12 * max(1.0, np.abs(ev).max()):
        raise SingularityError("eigenvalue pair sums to zero; Lyapunov operator singular")
    g = sym(linalg.solve_continuous_lyapunov(a, -sigma))
    res = np.abs(a @ g + g @ a.T + sigma).max()
    if not np.isfinite(res) or res > 1e-8 * max(1.0, np.abs(sigma).max()):
        raise NumericalError(f"Lyapunov residual {res:.3g} too large")
    return g


def vou_subsample(a, sigma, dt):
    """Exact VAR(1) of a vector OU process dX = AX dt + dW sampled at ``dt``."""
    a = np.atleast_2d(np.asarray(a, dtype=float))
    if not dt > 0:
        raise InputError("dt must be positive")
    if np.linalg.eigvals(a).real.max() >= 0:
        raise StabilityError("OU drift matrix must have eigenvalues with negative real part")
    g0 = lyapunov_continuous_solve(a, sigma)
    e = matrix_exponential(dt * a)
    sig = sym(g0 - e @ g0 @ e.T) / dt
    return VarModel(e[None], sig, dt)


# ---------------------------------------------------------------- rates

def zero_horizon_rate(full, reduced, sigma, target, source=None):
    """Zero-horizon GC rate tr(Σ_xx⁻¹[Π'_xx − Π_xx]) from kernel samples.

    ``reduced`` holds the target subprocess kernel; its innovations intensity
    equals Σ_xx in continuous time.
    """
    sigma = np.atleast_2d(np.asarray(sigma, dtype=float))
    x, _ = as_partition(sigma.shape[0], target, source)
    sxx = sigma[np.ix_(x, x)]
    try:
        np.linalg.cholesky(sxx)
    except np.linalg.LinAlgError:
        raise NumericalError("Σ_xx is singular") from None
    if reduced.samples.shape[1] != len(x):
        raise InputError("reduced kernel dimension does not match the target")
    d_full = full.derivative_at_zero()
    pi = 0.5 * (d_full @ sigma + sigma @ d_full.T)
    d_red = reduced.derivative_at_zero()
    pi_red = 0.5 * (d_red @ sxx + sxx @ d_red.T)
    return float(np.trace(np.linalg.solve(sxx, pi_red - pi[np.ix_(x, x)])))


# ---------------------------------------------------------------- small-Δt

def smallDt_expansion_check(s_ct, s_sub, sigma, dts, lam=0.0):
    """Fit the even small-Δt expansion of the scaled CPSD defect.

    ``s_sub[i]`` is S(λ;Δt_i).  Least squares over the positive Δt values of
    S(λ;Δt) − S(λ) = Δt²C + Δt⁴E (E dropped when only one Δt is given).
    Returns C, which should approach Σ/12.
    """
    s_ct = np.atleast_2d(np.asarray(s_ct))
    s_sub = np.asarray(s_sub)
    dts = np.asarray(dts, dtype=float)
    if s_sub.shape != (len(dts),) + s_ct.shape:
        raise InputError("need one CPSD matrix per dt")
    keep = dts > 0
    if np.any(dts < 0):
        raise InputError("dt values must be nonnegative")
    defect = (s_sub - s_ct)[keep]
    dts = dts[keep]
    if len(dts) == 0:
        raise NumericalError("no positive dt values to fit")
    cols = [dts ** 2] + ([dts ** 4] if len(np.unique(dts)) >= 2 else [])
    design = np.stack(cols, axis=1)
    if np.linalg.cond(design / design.max(axis=0)) > 1e8:
        raise NumericalError("ill-conditioned small-dt fit")
    coef, *_ = np.linalg.lstsq(design, defect.reshape(len(dts), -1), rcond=None)
    shape = s_ct.shape
    c2 = coef[0].reshape(shape)
    if len(cols) == 1:
        return AsymptoticExpansion(c2)
    c4 = coef[1].reshape(shape)
    sigma = np.atleast_2d(np.asarray(sigma, dtype=float))
    omega = 720 * c4 - 12 * np.pi ** 2 * lam ** 2 * sigma
    return AsymptoticExpansion(c2, c4, omega)


def gc_from_mspe(full, reduced, target, h, sigma, source=None):
    """GC(h) = log det MSE'_xx(h) / det MSE_xx(h) from kernel samples."""
    sigma = np.atleast_2d(np.asarray(sigma, dtype=float))
    x, _ = as_partition(sigma.shape[0], target, source)
    mf = ct_mspe(full, sigma, h)[np.ix_(x, x)]
    mr = ct_mspe(reduced, sigma[np.ix_(x, x)], h)
    return max(logdet_psd(mr) - logdet_psd(mf), 0.0)
