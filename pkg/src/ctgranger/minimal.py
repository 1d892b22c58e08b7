"""Closed forms for the minimal two-variable CTVAR

    dX = (-a X + c Y(t - τ)) dt + dW_x,    dY = -b Y dt + dW_y,

with unit noise intensities and correlation ρ, in continuous time and
under regular subsampling with interval Δt.  Times are in ms.
"""
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import integrate, interpolate, signal, special

from .errors import InputError, NumericalError

DISC_FLOOR = 1e-12


def _sqrt_disc(x, what):
    if x < 0:
        if x < -DISC_FLOOR * max(1.0, abs(x)):
            raise NumericalError(f"negative discriminant in {what}: {x:.3e}")
        return 0.0
    return float(np.sqrt(x))


@dataclass(frozen=True)
class MinimalCtvarParams:
    """Rates ``a, b, c`` (1/ms), noise correlation ``rho`` and delay ``tau`` (ms)."""

    a: float
    b: float
    c: float
    rho: float = 0.0
    tau: float = 0.0

    def __post_init__(self):
        for name in ("a", "b", "c", "rho", "tau"):
            v = float(getattr(self, name))
            if not np.isfinite(v):
                raise InputError(f"{name} must be finite")
            object.__setattr__(self, name, v)
        if not (self.a > 0 and self.b > 0):
            raise InputError("a and b must be positive")
        if self.a == self.b:
            raise InputError("a == b is not supported")
        if not -1 < self.rho < 1:
            raise InputError("rho must lie in (-1, 1)")
        if self.tau < 0:
            raise InputError("tau must be nonnegative")

    @classmethod
    def reference(cls, rho=0.0):
        """Relaxation times 1/a = 5, 1/b = 6 ms, coupling 1/c = 8 ms, τ = 30 ms."""
        return cls(1 / 5, 1 / 6, 1 / 8, rho, 30.0)

    @property
    def theta(self):
        return self.c / (self.b - self.a)

    @property
    def eta(self):
        return self.c / (self.a + self.b)

    @property
    def sigma(self):
        return np.array([[1.0, self.rho], [self.rho, 1.0]])

    def replace(self, **kw):
        d = dict(a=self.a, b=self.b, c=self.c, rho=self.rho, tau=self.tau)
        d.update(kw)
        return MinimalCtvarParams(**d)


def _q(p, u):
    return (np.exp(-p.a * u) - np.exp(-p.b * u)) / (p.b - p.a)


# ---------------------------------------------------------------- continuous time

def ct_ma_kernel(params, u):
    """MA kernel B(u); ``u`` scalar or array, result shape ``u.shape + (2, 2)``."""
    p = params
    u = np.asarray(u, dtype=float)
    out = np.zeros(u.shape + (2, 2))
    out[..., 0, 0] = np.exp(-p.a * u)
    out[..., 1, 1] = np.exp(-p.b * u)
    s = u - p.tau
    on = s >= 0
    out[..., 0, 1] = np.where(on, p.c * _q(p, np.where(on, s, 0.0)), 0.0)
    return out * (u >= 0)[..., None, None]


def ct_transfer(params, omega):
    """Transfer function H(ω), ω = 2πλ."""
    p = params
    w = np.asarray(omega, dtype=float)
    iw = 1j * w
    out = np.zeros(w.shape + (2, 2), dtype=complex)
    out[..., 0, 0] = 1 / (p.a + iw)
    out[..., 0, 1] = p.c * np.exp(-1j * p.tau * w) / ((p.a + iw) * (p.b + iw))
    out[..., 1, 1] = 1 / (p.b + iw)
    return out


def _upsilon(p, w):
    return p.b * np.cos(p.tau * w) - w * np.sin(p.tau * w)


def ct_cpsd(params, lam):
    """Continuous-time CPSD at ordinary frequency ``lam`` (kHz)."""
    p = params
    w = 2 * np.pi * np.asarray(lam, dtype=float)
    den = (p.a ** 2 + w ** 2) * (p.b ** 2 + w ** 2)
    out = np.zeros(w.shape + (2, 2), dtype=complex)
    out[..., 0, 0] = (p.b ** 2 + 2 * p.rho * p.c * _upsilon(p, w) + p.c ** 2 + w ** 2) / den
    sxy = (p.a - 1j * w) * (p.c * np.exp(-1j * p.tau * w) + p.rho * (p.b + 1j * w)) / den
    out[..., 0, 1] = sxy
    out[..., 1, 0] = np.conj(sxy)
    out[..., 1, 1] = 1 / (p.b ** 2 + w ** 2)
    return out


def _autocov_nonneg(p, t):
    a, b, th, et, r, tau = p.a, p.b, p.theta, p.eta, p.rho, p.tau
    g = np.zeros(t.shape + (2, 2))
    ea, eb = np.exp(-a * t), np.exp(-b * t)
    g[..., 0, 0] = ((1 + th * et) / (2 * a) * ea - th * et / (2 * b) * eb
                    + r * et / (2 * a) * np.exp(-a * (t + tau)))
    g[..., 0, 1] = r / (a + b) * ea
    g[..., 1, 0] = r / (a + b) * eb + et / (2 * b) * np.exp(-b * (t + tau))
    g[..., 1, 1] = eb / (2 * b)
    before = t < tau
    s1 = np.where(before, tau - t, 0.0)
    g[..., 0, 0] += np.where(before, r * et / (2 * a) * np.exp(-a * s1), 0.0)
    g[..., 0, 1] += np.where(before, et / (2 * b) * np.exp(-b * s1), 0.0)
    s2 = np.where(before, 0.0, t - tau)
    e2a, e2b = np.exp(-a * s2), np.exp(-b * s2)
    g[..., 0, 0] += np.where(before, 0.0, r * th * (e2a / (2 * a) - e2b / (a + b)))
    g[..., 0, 1] += np.where(before, 0.0, th * (e2a / (a + b) - e2b / (2 * b)))
    return g


def ct_autocov(params, t):
    """Autocovariance Γ(t) = E[X(t) X(0)ᵀ]; negative ``t`` via Γ(−t)ᵀ.

    The delayed branches are complementary: the pre-delay branch applies
    for ``t < τ`` and the post-delay branch for ``t >= τ`` (they agree at
    ``t = τ``, so counting both there would double the value).
    """
    t = np.asarray(t, dtype=float)
    g = _autocov_nonneg(params, np.abs(t))
    neg = t < 0
    if np.any(neg):
        g[neg] = np.swapaxes(g[neg], -1, -2)
    return g


def sampled_autocov(params, dt, n_lags):
    """Γ(kΔt) for k = 0..n_lags as an AutocovSequence."""
    from .models import AutocovSequence
    return AutocovSequence(ct_autocov(params, dt * np.arange(n_lags + 1)), dt)


def lags_to_decay(params, dt, rel=1e-17):
    """Number of lags after which Γ(kΔt) is below ``rel`` of Γ(0)."""
    rate = min(params.a, params.b)
    t = params.tau + np.log(1 / rel) / rate + 10 / rate
    return int(np.ceil(t / dt)) + 1


def mse_full_xx(params, h):
    """Full-regression MSPE of X at horizon ``h``."""
    p = params
    h = np.asarray(h, dtype=float)
    a, b = p.a, p.b
    out = -np.expm1(-2 * a * h) / (2 * a)
    s = np.maximum(h - p.tau, 0.0)
    ea = -np.expm1(-2 * a * s) / (2 * a)
    eab = -np.expm1(-(a + b) * s) / (a + b)
    eb = -np.expm1(-2 * b * s) / (2 * b)
    r = (2 * p.rho * p.theta * np.exp(-a * p.tau) * (ea - eab)
         + p.theta ** 2 * (ea - 2 * eab + eb))
    out = out + np.where(h >= p.tau, r, 0.0)
    return out if out.ndim else float(out)


def reduced_transfer_rho_general(params, omega):
    """Reduced (X-only) transfer function H'_xx(ω) with unit innovations."""
    p = params
    w = np.asarray(omega, dtype=float)
    re = np.sqrt((1 - p.rho ** 2) * p.c ** 2 + (p.b + p.rho * p.c * np.cos(p.tau * w)) ** 2)
    num = re + 1j * (w - p.rho * p.c * np.sin(p.tau * w))
    return num / ((p.a + 1j * w) * (p.b + 1j * w))


def _k(p):
    return np.hypot(p.b, p.c)


def reduced_kernel_rho0(params, u):
    """Closed-form reduced MA kernel B'_xx(u) for ρ = 0."""
    p = params
    k = _k(p)
    u = np.asarray(u, dtype=float)
    out = ((k - p.a) * np.exp(-p.a * u) - (k - p.b) * np.exp(-p.b * u)) / (p.b - p.a)
    return np.where(u >= 0, out, 0.0)


def _transfer_exact(p):
    """Whether the displayed reduced transfer function is itself causal.

    For ρ = 0 or τ = 0 its numerator is a constant plus iω, hence outer.
    Otherwise it matches S_xx in modulus only, and the minimum-phase factor
    is obtained numerically (see ``reduced_transfer_minphase``).
    """
    return p.rho == 0 or p.tau == 0


def reduced_transfer_minphase(params, W, dw):
    """Minimum-phase reduced transfer function on ω = 0, dw, ..., ≥ W.

    The numerator's outer part is built by the cepstral method: with a known
    outer function N₀ (``b + iω + ρc e^{-iτω}`` when |ρc| < b, else
    ``k + iω``), log|N/N₀| is Fourier inverted, folded onto t ≥ 0 and
    transformed back, which yields the analytic log of the correction.
    """
    p = params
    n_pos = int(np.ceil(W / dw)) + 1
    if _transfer_exact(p):
        w = dw * np.arange(n_pos)
        return w, reduced_transfer_rho_general(p, w)
    big = 1 << int(np.ceil(np.log2(4 * n_pos)))
    w = dw * np.fft.fftfreq(big, 1.0 / big)
    iw = 1j * w
    if p.b > abs(p.rho * p.c):
        base = p.b + iw + p.rho * p.c * np.exp(-1j * p.tau * w)
        ell = 0.5 * np.log1p((1 - p.rho ** 2) * p.c ** 2 / np.abs(base) ** 2)
    else:
        base = _k(p) + iw
        n2 = p.b ** 2 + p.c ** 2 + w ** 2 + 2 * p.rho * p.c * _upsilon(p, w)
        ell = 0.5 * np.log(n2 / (_k(p) ** 2 + w ** 2))
    cep = np.fft.ifft(ell).real
    fold = np.zeros(big)
    fold[0] = cep[0]
    fold[1:big // 2] = 2 * cep[1:big // 2]
    fold[big // 2] = cep[big // 2]
    h = base * np.exp(np.fft.fft(fold)) / ((p.a + iw) * (p.b + iw))
    return w[:n_pos], h[:n_pos]


def _tail_cos(v, W):
    """∫_W^∞ cos(vω)/ω² dω."""
    v = np.abs(v)
    si, _ = special.sici(W * v)
    return np.cos(W * v) / W - v * (0.5 * np.pi - si)


def reduced_kernel_numeric(params, u, W=None, dw=None):
    """Reduced MA kernel B'_xx(u) by inverse Fourier quadrature.

    The truncated integral (1/π)∫₀^W Re[H'(ω)e^{iωu}]dω is evaluated with
    the trapezoid rule (via a chirp-z transform when ``u`` is uniform).  The
    tail beyond W is added analytically from the large-ω expansion

        H' ≈ 1/(iω) + (ṙ − a)/(iω)² + ρc e^{-iτω}/(iω)²,

    where ṙ is the zero-horizon GC rate: the first term gives the
    sine-integral correction, the others a second-order correction.
    """
    p = params
    u = np.atleast_1d(np.asarray(u, dtype=float))
    if np.any(u < 0):
        raise InputError("u must be nonnegative")
    scale = max(p.a, p.b, abs(p.rho * p.c))
    if W is None:
        W = max(50 * scale, 400.0)
    if W < 50 * scale:
        raise InputError(f"cutoff W={W} is below 50*max(a, b, |rho c|)")
    umax = float(np.max(u)) if len(u) else 0.0
    if dw is None:
        period = 4 * umax + 10 / min(p.a, p.b) + 4 * p.tau + 200.0
        dw = 2 * np.pi / period
    if dw > 2 * np.pi / max(umax, 1e-12):
        raise InputError("dw too coarse for the requested u range (aliasing)")
    w, f = reduced_transfer_minphase(p, W, dw)
    W = w[-1]
    f = f.copy()
    f[0] *= 0.5
    f[-1] *= 0.5
    if len(u) > 2 and np.allclose(np.diff(u), u[1] - u[0], rtol=1e-9, atol=0.0):
        du = u[1] - u[0]
        vals = signal.czt(f, m=len(u), w=np.exp(1j * dw * du), a=np.exp(-1j * dw * u[0]))
    else:
        vals = np.array([np.sum(f * np.exp(1j * w * uu)) for uu in u])
    body = dw * np.real(vals) / np.pi
    si, _ = special.sici(W * u)
    lead = 0.5 - si / np.pi
    rate = _k(p) - p.b if p.rho == 0 else _rate_cached(p)
    second = -(rate - p.a) * _tail_cos(u, W)
    if p.rho != 0 and p.tau > 0:
        second = second - p.rho * p.c * _tail_cos(u - p.tau, W)
    return body + lead + second / np.pi


@lru_cache(maxsize=32)
def _rate_cached(params):
    return rate_numeric(params)


def _simpson_cumulative(y, dx):
    return np.concatenate([[0.0], integrate.cumulative_simpson(y, dx=dx)])


@lru_cache(maxsize=32)
def _reduced_mse_table(params, hmax, du, W):
    n = int(np.ceil(hmax / du))
    u = du * np.arange(n + 1)
    b2 = reduced_kernel_numeric(params, u, W) ** 2
    return interpolate.CubicHermiteSpline(u, _simpson_cumulative(b2, du), b2)


def mse_reduced_xx(params, h, du=0.01, W=None):
    """Reduced-regression MSPE of X at horizon ``h``.

    Closed form for ρ = 0; otherwise the numerically inverted reduced kernel
    is squared and integrated (Simpson) on a grid of step ``du``, with
    cubic Hermite interpolation in between.
    """
    p = params
    h = np.asarray(h, dtype=float)
    if np.any(h < 0):
        raise InputError("horizon must be nonnegative")
    if p.rho == 0:
        a, b, k = p.a, p.b, _k(p)
        ea = -np.expm1(-2 * a * h) / (2 * a)
        eab = -np.expm1(-(a + b) * h) / (a + b)
        eb = -np.expm1(-2 * b * h) / (2 * b)
        out = ((k - a) ** 2 * ea - 2 * (k - a) * (k - b) * eab + (k - b) ** 2 * eb) / (b - a) ** 2
        return out if out.ndim else float(out)
    hmax = float(np.max(h)) if h.size else 0.0
    hmax = du * np.ceil(max(hmax, du) / du * 1.0000001) + 2 * du
    out = _reduced_mse_table(p, hmax, du, W)(h)
    return out if out.ndim else float(out)


def gc_horizon(params, h, **kw):
    """Continuous-time GC Y→X at prediction horizon ``h`` (nats)."""
    h = np.asarray(h, dtype=float)
    full = np.asarray(mse_full_xx(params, h))
    red = np.asarray(mse_reduced_xx(params, h, **kw))
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.where(h > 0, np.log(np.where(h > 0, red, 1.0) / np.where(h > 0, full, 1.0)), 0.0)
    out = np.maximum(out, 0.0)
    return out if out.ndim else float(out)


def rate_closed_rho0(params):
    """Zero-horizon GC rate √(b² + c²) − b (ρ = 0 only)."""
    if params.rho != 0:
        raise InputError("closed-form rate requires rho = 0")
    return float(_k(params) - params.b)


def spectral_gc_zero_horizon(params, omega):
    """Zero-horizon spectral GC Y→X at angular frequency ω."""
    p = params
    w = np.asarray(omega, dtype=float)
    den = p.b ** 2 + 2 * p.rho * p.c * _upsilon(p, w) + p.rho ** 2 * p.c ** 2 + w ** 2
    return np.log1p((1 - p.rho ** 2) * p.c ** 2 / den)


def rate_numeric(params, W=1000.0, dw=None):
    """Zero-horizon GC rate by quadrature of the spectral decomposition.

    (1/π)∫₀^W f(ω)dω + (1 − ρ²)c²/(πW), Simpson's rule on a grid fine
    enough to resolve the period 2π/τ of the ρ ≠ 0 oscillation.
    """
    p = params
    if W < 50 * max(p.b, abs(p.rho * p.c)):
        raise InputError("cutoff W is below 50*max(b, |rho c|)")
    if dw is None:
        dw = min(0.01, 2 * np.pi / max(p.tau, 1e-12) / 200)
    n = int(np.ceil(W / dw))
    n += n % 2
    w = np.linspace(0.0, W, n + 1)
    val = integrate.simpson(spectral_gc_zero_horizon(p, w), x=w)
    return float(val / np.pi + (1 - p.rho ** 2) * p.c ** 2 / (np.pi * W))


def continuous_filter_noninvariance_probe(params, g, h):
    """GC(h) curves before and after the filter that replaces ``a`` by ``g``."""
    if not g > 0:
        raise InputError("filter pole g must be positive")
    before = gc_horizon(params, h)
    after = gc_horizon(params.replace(a=g), h)
    return before, after


# ---------------------------------------------------------------- subsampling

@dataclass(frozen=True)
class SubsampleQuantities:
    dt: float
    alpha: float
    beta: float
    gamma: float
    q: int
    kappa: float
    u1: float
    u2: float
    w: float
    v1: float
    v2: float
    v3: float


def _ceil_ratio(tau, dt):
    r = tau / dt
    rr = round(r)
    if abs(r - rr) <= 1e-9 * max(1.0, r):
        r = float(rr)
    q = max(int(np.ceil(r)), 1)
    return q, q - r


def subsample_quantities(params, dt):
    """Constants of the Δt-subsampled minimal model.

    ``q = ⌈τ/Δt⌉`` with the ceiling taken over positive integers, so
    ``q >= 1``; ``κ = q − τ/Δt``.  For τ > 0, κ lies in [0, 1); at τ = 0
    the definition gives q = 1 and κ = 1.
    """
    if not dt > 0:
        raise InputError("dt must be positive")
    p = params
    a, b = p.a, p.b
    q, kappa = _ceil_ratio(p.tau, dt)
    alpha, beta, gamma = np.exp(-a * dt), np.exp(-b * dt), np.exp(b * dt)
    one_a2 = -np.expm1(-2 * a * dt)
    one_b2 = -np.expm1(-2 * b * dt)
    th, et = p.theta, p.eta
    return SubsampleQuantities(
        dt=float(dt), alpha=alpha, beta=beta, gamma=gamma, q=q, kappa=kappa,
        u1=(1 + th * et) / (2 * a) * one_a2,
        u2=-th * et / (2 * b) * one_b2,
        w=one_b2 / (2 * b),
        v1=(th + et) / (2 * b) * alpha ** kappa,
        v2=-th / (2 * b) * beta ** kappa,
        v3=-et / (2 * b) * gamma ** kappa,
    )


def _require_rho0(params):
    if params.rho != 0:
        raise InputError("closed-form subsampled results require rho = 0")


def subsampled_cpsd(params, dt, z):
    """Subsampled CPSD Σ_k Γ(kΔt) z^k at points ``z`` on the unit circle.

    This is the unscaled form; multiply by Δt for the scaled spectrum that
    tends to the continuous-time CPSD (see ``subsampled_cpsd_scaled``).
    """
    _require_rho0(params)
    s = subsample_quantities(params, dt)
    z = np.asarray(z, dtype=complex)
    ma = 1 - s.alpha * z
    mb = 1 - s.beta * z
    out = np.zeros(z.shape + (2, 2), dtype=complex)
    # |1 - αz|² written to avoid cancellation when α → 1
    aa = np.abs(ma) ** 2
    bb = np.abs(mb) ** 2
    out[..., 0, 0] = s.u1 / aa + s.u2 / bb
    sxy = (s.v1 / ma + s.v2 / mb + s.v3 / (1 - s.gamma * z)) * z ** s.q
    out[..., 0, 1] = sxy
    out[..., 1, 0] = np.conj(sxy)
    out[..., 1, 1] = s.w / bb
    return out


def subsampled_cpsd_scaled(params, dt, lam):
    """Δt-scaled subsampled CPSD at ordinary frequency ``lam`` (kHz)."""
    z = np.exp(-2j * np.pi * dt * np.asarray(lam, dtype=float))
    return dt * subsampled_cpsd(params, dt, z)


@dataclass(frozen=True)
class ClosedFactorization:
    quantities: SubsampleQuantities
    P: float
    Q: float
    R: float
    phi: float
    psi: float
    fa: float
    fb: float
    fc: float
    fd: float
    D: float
    U: float
    V: float
    sigma_xx: float
    sigma_xy: float
    sigma_yy: float
    sigma_r_xx: float
    p_ma: float

    def bxx(self, z):
        return 1 - self.U * z + self.V * z * z

    def lz(self, z):
        return self.quantities.beta * (self.P - self.Q * z + self.R * z * z)

    def m2(self, z):
        """|M(z)|² = 2w(φ − ψ cos ω) on the unit circle."""
        return 2 * self.quantities.w * (self.phi - self.psi * np.real(z))

    @property
    def sigma(self):
        """Innovations covariance matrix of the joint subsampled process (x²)."""
        return np.array([[self.sigma_xx, self.sigma_xy], [self.sigma_xy, self.sigma_yy]])


def subsampled_factorize_closed(params, dt):
    """Closed-form spectral factorization of the subsampled process (ρ = 0).

    The ``sigma_*`` fields are innovations (co)variances in x², i.e. Δt
    times the corresponding noise intensities.
    """
    _require_rho0(params)
    s = subsample_quantities(params, dt)
    al, be, ga = s.alpha, s.beta, s.gamma
    P = s.v1 + s.v2 + s.v3
    Q = s.v1 * (be + ga) + s.v2 * (ga + al) + s.v3 * (al + be)
    R = s.v1 * be * ga + s.v2 * ga * al + s.v3 * al * be
    phi = 0.5 * (s.u2 * (1 + al ** 2) + s.u1 * (1 + be ** 2))
    psi = s.u2 * al + s.u1 * be
    fa = s.w * phi - 0.5 * be ** 2 * (P ** 2 + Q ** 2 + R ** 2)
    fb = s.w * psi - be ** 2 * Q * (P + R)
    fc = -be ** 2 * P * R
    fd = 0.5 * (fa - fc + _sqrt_disc((fa + fc) ** 2 - fb ** 2, "fd"))
    D = fd + _sqrt_disc(fd ** 2 - fc ** 2, "D")
    if not D > 0:
        raise NumericalError("nonpositive residual determinant")
    U = fb / (D + fc)
    V = fc / D
    syy = s.w
    sxy = -be * P if s.q == 1 else 0.0
    sxx = (D + sxy ** 2) / syy
    root = _sqrt_disc(phi ** 2 - psi ** 2, "sigma'_xx")
    srxx = phi + root
    return ClosedFactorization(s, P, Q, R, phi, psi, fa, fb, fc, fd, D, U, V,
                               sxx, sxy, syy, srxx, psi / srxx)


def subsampled_gc(params, dt):
    """Closed-form subsampled GC: (Y→X, X→Y, instantaneous)."""
    f = subsampled_factorize_closed(params, dt)
    gc_yx = float(np.log(f.sigma_r_xx / f.sigma_xx))
    rho2 = f.sigma_xy ** 2 / (f.sigma_xx * f.sigma_yy)
    return max(gc_yx, 0.0), 0.0, float(-np.log1p(-rho2))


def subsampled_spectral_gc(params, dt, z):
    """Closed-form subsampled spectral GC Y→X at unit-circle points ``z``.

    The correlation factor is that of the subsampled innovations,
    1 − ρ̃² = D / (σ_xx σ_yy).
    """
    f = subsampled_factorize_closed(params, dt)
    z = np.asarray(z, dtype=complex)
    q = f.quantities.q
    num = np.abs(f.sigma_xy * f.bxx(z) + f.lz(z) * z ** (q - 1)) ** 2
    den = f.D * np.abs(f.bxx(z)) ** 2 + np.abs(f.lz(z)) ** 2
    frac = f.D / (f.sigma_xx * f.sigma_yy) * num / den
    return -np.log1p(-frac)


def minphase_ok(params, dt):
    """Whether the subsampled joint process is minimum-phase (B_xx roots)."""
    from .specfac import minimum_phase_check
    f = subsampled_factorize_closed(params, dt)
    return minimum_phase_check([1.0, -f.U, f.V])[0]


def subsampled_factorize_numeric(params, dt, tol=1e-13, max_iter=2000):
    """Whittle VAR models of the subsampled joint process and of x and y alone."""
    from .specfac import whittle_factorize
    acov = sampled_autocov(params, dt, lags_to_decay(params, dt) + max_iter)
    full = whittle_factorize(acov, None, tol, max_iter).model
    rx = whittle_factorize(acov.sub([0]), None, tol, max_iter).model
    ry = whittle_factorize(acov.sub([1]), None, tol, max_iter).model
    return full, rx, ry


def subsampled_gc_numeric(params, dt, tol=1e-13, max_iter=2000):
    """Subsampled GC by Whittle factorization of the sampled autocovariance.

    Works for any ρ.  Returns (Y→X, X→Y, instantaneous).
    """
    from .var_core import gc_instantaneous
    full, rx, ry = subsampled_factorize_numeric(params, dt, tol, max_iter)
    sig = full.sigma
    gc_yx = float(np.log(rx.sigma[0, 0] / sig[0, 0]))
    gc_xy = float(np.log(ry.sigma[0, 0] / sig[1, 1]))
    return gc_yx, gc_xy, gc_instantaneous(sig, [0]).value
