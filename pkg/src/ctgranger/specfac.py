"""Spectral factorization, model reduction and minimum-phase checks."""
from dataclasses import dataclass

import numpy as np
from scipy import linalg

from ._linalg import companion, spd_solve, spectral_radius, sym
from .errors import ConvergenceError, InputError, NumericalError, TruncationError
from .models import DECAY_TOL, MAX_TERMS, VarModel, _frozen, as_partition

MIN_PHASE_MARGIN = 1e-9


@dataclass(frozen=True)
class FactorizationReport:
    model: VarModel
    iterations: int
    residual: float


@dataclass(frozen=True)
class InnovationsStateSpace:
    """``z_{t+1} = A z_t + K e_t``, ``x_t = C z_t + e_t``, cov(e) = dt·sigma."""

    transition: np.ndarray
    observation: np.ndarray
    gain: np.ndarray
    sigma: np.ndarray
    dt: float

    @property
    def covariance(self):
        return self.dt * self.sigma

    def autocov(self, n_lags):
        """Output autocovariances Γ_0..Γ_{n_lags}."""
        a, c, k, v = self.transition, self.observation, self.gain, self.covariance
        p = sym(linalg.solve_discrete_lyapunov(a, k @ v @ k.T))
        out = np.empty((n_lags + 1, c.shape[0], c.shape[0]))
        out[0] = sym(c @ p @ c.T + v)
        g = a @ p @ c.T + k @ v
        for lag in range(1, n_lags + 1):
            out[lag] = c @ g
            g = a @ g
        return out


@dataclass(frozen=True)
class ReducedModel:
    """Innovations form of a target subprocess obtained from a joint VAR.

    The subprocess MA coefficients are ``B'_0 = I`` and
    ``B'_k = C A^{k-1} K`` for ``k >= 1``.
    """

    transition: np.ndarray
    observation: np.ndarray
    gain: np.ndarray
    sigma: np.ndarray
    dt: float
    target: tuple

    @property
    def n(self):
        return self.sigma.shape[0]

    @property
    def covariance(self):
        return self.dt * self.sigma

    def ma_terms(self, n_terms=None):
        n = self.n
        a, c, k = self.transition, self.observation, self.gain
        cap = MAX_TERMS if n_terms is None else n_terms
        terms = [np.eye(n)]
        g = k
        while len(terms) < cap:
            bk = c @ g
            terms.append(bk)
            if n_terms is None and np.max(np.abs(bk)) < DECAY_TOL \
                    and np.max(np.abs(g)) < DECAY_TOL * max(1.0, np.max(np.abs(k))):
                return np.array(terms)
            g = a @ g
        if n_terms is None:
            raise TruncationError("reduced MA sequence did not decay")
        return np.array(terms)


def _yw_defect(coeffs, sigma_cov, lags):
    """Max-norm Yule-Walker defect over lags 0..p, relative to Γ_0."""
    p = coeffs.shape[0]
    ext = np.concatenate([np.swapaxes(lags[p:0:-1], 1, 2), lags[:p + 1]])  # Γ_{-p}..Γ_p
    worst = 0.0
    for k in range(1, p + 1):
        pred = np.einsum("lij,ljk->ik", coeffs, ext[p + k - np.arange(1, p + 1)])
        worst = max(worst, np.max(np.abs(lags[k] - pred)))
    g0 = lags[0] - np.einsum("lij,lkj->ik", coeffs, lags[1:p + 1]) - sigma_cov
    worst = max(worst, np.max(np.abs(g0)))
    return worst / np.max(np.abs(lags[0]))


def whittle_factorize(acov, p=None, tol=1e-12, max_iter=200):
    """Whittle's multivariate Levinson recursion.

    With ``p`` given the recursion runs to exactly that order.  With
    ``p=None`` the order grows until the relative change in the innovations
    covariance drops below ``tol``; ``max_iter`` bounds the order.

    Returns a FactorizationReport whose residual is the relative max-norm
    Yule-Walker defect of the recovered model over lags 0..p.
    """
    g = acov.lags
    n = acov.n
    if not np.all(np.linalg.eigvalsh(sym(g[0])) > 0):
        raise NumericalError("Γ_0 is not positive definite")
    if p is not None:
        if p < 1:
            raise InputError("order must be at least 1")
        if p >= len(g):
            raise InputError(f"order {p} needs at least {p + 1} autocovariance lags")
        kmax = p
    else:
        kmax = min(max_iter, len(g) - 1)
    af = np.zeros((0, n, n))
    ab = np.zeros((0, n, n))
    sf = sym(g[0].copy())
    sb = sf.copy()
    converged = p is not None
    k = 0
    for k in range(1, kmax + 1):
        if k > 1:
            delta = g[k] - np.einsum("jab,jbc->ac", af, g[k - 1:0:-1])
        else:
            delta = g[1].copy()
        kf = spd_solve(sb, delta.T).T
        kb = spd_solve(sf, delta).T
        af, ab = (np.concatenate([af - np.einsum("ab,jbc->jac", kf, ab[::-1]), kf[None]]),
                  np.concatenate([ab - np.einsum("ab,jbc->jac", kb, af[::-1]), kb[None]]))
        sf_new = sym(sf - kf @ delta.T)
        sb = sym(sb - kb @ delta)
        if np.min(np.linalg.eigvalsh(sf_new)) <= 0 or np.min(np.linalg.eigvalsh(sb)) <= 0:
            raise NumericalError(f"prediction error covariance became indefinite at order {k}")
        change = np.max(np.abs(sf_new - sf)) / np.max(np.abs(sf_new))
        sf = sf_new
        if p is None and change < tol:
            converged = True
            break
    if not converged:
        raise ConvergenceError(f"Whittle recursion did not converge within order {kmax}")
    model = VarModel(af, sf / acov.dt, acov.dt)
    resid = _yw_defect(af, sf, g)
    return FactorizationReport(model, k, float(resid))


def var_to_innovations_ss(model):
    """Companion-form innovations state space of a stable VAR."""
    model.check_stable()
    p, n = model.order, model.n
    a = companion(model.coeffs)
    c = a[:n].copy()
    k = np.zeros((n * p, n))
    k[:n] = np.eye(n)
    return InnovationsStateSpace(_frozen(a), _frozen(c), _frozen(k),
                                 _frozen(model.sigma), model.dt)


def solve_dare(a, c, q, r, s=None, tol=1e-10, max_iter=100):
    """Stabilizing solution of the filter Riccati equation

        P = A P Aᵀ + Q − (A P Cᵀ + S)(C P Cᵀ + R)⁻¹(A P Cᵀ + S)ᵀ

    by structure-preserving doubling.  The cross term S is removed first so
    the doubling runs on ``P = Ã P (I + G P)⁻¹ Ãᵀ + Q̃``.
    """
    a = np.atleast_2d(np.asarray(a, dtype=float))
    c = np.atleast_2d(np.asarray(c, dtype=float))
    q = np.atleast_2d(np.asarray(q, dtype=float))
    r = np.atleast_2d(np.asarray(r, dtype=float))
    ns = a.shape[0]
    s = np.zeros((ns, c.shape[0])) if s is None else np.atleast_2d(np.asarray(s, dtype=float))
    rinv_c = spd_solve(r, c)
    rinv_st = spd_solve(r, s.T)
    at = a - s @ rinv_c
    qt = sym(q - s @ rinv_st)
    ak, gk, hk = at.T.copy(), sym(c.T @ rinv_c), qt
    eye = np.eye(ns)
    for _ in range(max_iter):
        w = eye + gk @ hk
        wa = np.linalg.solve(w, ak)
        wg = np.linalg.solve(w, gk)
        h_new = sym(hk + ak.T @ hk @ wa)
        gk = sym(gk + ak @ wg @ ak.T)
        ak = ak @ wa
        done = np.max(np.abs(h_new - hk)) <= 1e-15 * max(1.0, np.max(np.abs(h_new)))
        hk = h_new
        if done:
            break
    p = hk
    apc = a @ p @ c.T + s
    resid = a @ p @ a.T + q - apc @ np.linalg.solve(c @ p @ c.T + r, apc.T) - p
    scale = max(1.0, np.max(np.abs(p)))
    if not np.all(np.isfinite(p)) or np.max(np.abs(resid)) > tol * scale:
        raise ConvergenceError("Riccati doubling failed to converge")
    return p


def reduce_state_space(ss, target):
    """Innovations model of the ``target`` subprocess of an innovations model.

    Assumes ``ss`` is itself in innovations form (A − KC stable).
    """
    n = ss.observation.shape[0]
    x, _ = as_partition(n, target)
    v = ss.covariance
    a, c, k = ss.transition, ss.observation, ss.gain
    cr = c[x]
    q = k @ v @ k.T
    s = k @ v[:, x]
    r = v[np.ix_(x, x)]
    p = solve_dare(a, cr, q, r, s)
    vr = sym(cr @ p @ cr.T + r)
    kr = spd_solve(vr, (a @ p @ cr.T + s).T).T
    return ReducedModel(_frozen(a), _frozen(cr), _frozen(kr), _frozen(vr / ss.dt),
                        ss.dt, tuple(x.tolist()))


def reduce_model(model, target):
    """Innovations model of the ``target`` subprocess of a stable VAR."""
    return reduce_state_space(var_to_innovations_ss(model), target)


def filtered_var_ss(model, filter_terms):
    """Innovations state space of a VAR passed through the FIR filter G(z).

    ``filter_terms`` holds G_0 = I, G_1, ..., G_L.  With state
    (x_{t-1}, ..., x_{t-M}), the filtered output is
    G_0 x_t + Σ_j G_j x_{t-j} = C z_t + e_t, so the innovations are
    unchanged.  The result is a valid innovations model only when G is
    minimum phase.
    """
    g = np.asarray(filter_terms, dtype=float)
    if g.ndim == 2:
        g = g[None]
    n, p = model.n, model.order
    if g.shape[1:] != (n, n) or not np.array_equal(g[0], np.eye(n)):
        raise InputError("filter must have G_0 = I and match the process dimension")
    model.check_stable()
    lags = max(p, len(g) - 1)
    coeffs = np.zeros((lags, n, n))
    coeffs[:p] = model.coeffs
    a = companion(coeffs)
    c = a[:n].copy()
    for j in range(1, len(g)):
        c[:, (j - 1) * n:j * n] += g[j]
    k = np.zeros((n * lags, n))
    k[:n] = np.eye(n)
    return InnovationsStateSpace(_frozen(a), _frozen(c), _frozen(k), _frozen(model.sigma), model.dt)


def minimum_phase_check(coeffs):
    """Whether det B(z) has all roots strictly outside the closed unit disc.

    ``coeffs`` holds B_0..B_K, either as scalars or as n×n matrices.  The
    roots are the reciprocals of the nonzero eigenvalues of the block
    companion matrix of the reversed polynomial.

    Returns
    -------
    ok : bool
    offending : ndarray
        Roots with ``|z| <= 1 + 1e-9``.
    """
    b = np.asarray(coeffs, dtype=float)
    if b.ndim == 1:
        b = b[:, None, None]
    if b.ndim != 3 or b.shape[1] != b.shape[2]:
        raise InputError("coefficients must be scalars or square matrices")
    if not np.any(b):
        raise InputError("zero polynomial has no well-defined roots")
    nz = np.flatnonzero(np.any(b != 0, axis=(1, 2)))
    b = b[:nz[-1] + 1]
    n = b.shape[1]
    if abs(np.linalg.det(b[0])) <= 1e-14 * max(1.0, np.max(np.abs(b[0]))) ** n:
        return False, np.zeros(1)
    if len(b) == 1:
        return True, np.zeros(0, dtype=complex)
    cs = np.array([np.linalg.solve(b[0], bk) for bk in b[1:]])
    w = np.linalg.eigvals(companion(-cs))
    w = w[np.abs(w) > 0]
    roots = 1.0 / w
    bad = roots[np.abs(roots) <= 1.0 + MIN_PHASE_MARGIN]
    return bool(len(bad) == 0), bad
