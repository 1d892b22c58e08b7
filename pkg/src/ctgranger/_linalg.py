"""Small dense linear-algebra helpers shared across modules."""
import numpy as np
from scipy import linalg

from .errors import NumericalError

DET_FLOOR = 1e-12


def sym(m):
    return 0.5 * (m + np.swapaxes(m, -1, -2).conj())


def logdet_psd(m, what="matrix"):
    """Log-determinant of a symmetric positive (semi)definite matrix.

    Uses an LDL-free route: Cholesky when possible, otherwise LU on the
    symmetrized matrix.  A determinant in (-1e-12, 0] is clamped to zero
    (giving ``-inf``); anything more negative raises NumericalError.
    """
    m = sym(np.atleast_2d(np.asarray(m, dtype=float)))
    if m.size == 0:
        return 0.0
    try:
        c = np.linalg.cholesky(m)
        return 2.0 * float(np.sum(np.log(np.diag(c))))
    except np.linalg.LinAlgError:
        pass
    sign, ld = np.linalg.slogdet(m)
    det = sign * np.exp(ld)
    if sign > 0:
        return float(ld)
    if det > -DET_FLOOR:
        return -np.inf
    raise NumericalError(f"{what} has negative determinant {det:.3e}")


def log_det_ratio(num, den, what="prediction error"):
    """``log(det num / det den)`` with both factors checked."""
    ln = logdet_psd(num, what)
    ld = logdet_psd(den, what)
    if not np.isfinite(ld):
        raise NumericalError(f"singular {what} covariance")
    return ln - ld


def chol_or_raise(m, what="covariance"):
    try:
        return np.linalg.cholesky(sym(m))
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"{what} is not positive definite") from exc


def spd_solve(a, b):
    """Solve ``a x = b`` for symmetric positive definite ``a``."""
    try:
        return linalg.cho_solve(linalg.cho_factor(sym(a)), b)
    except linalg.LinAlgError as exc:
        raise NumericalError("matrix is not positive definite") from exc


def partial_cov(sigma, x, y):
    """Schur complement ``Σ_xx − Σ_xy Σ_yy⁻¹ Σ_yx``."""
    sxx = sigma[np.ix_(x, x)]
    if len(y) == 0:
        return sxx
    syy = sigma[np.ix_(y, y)]
    sxy = sigma[np.ix_(x, y)]
    return sym(sxx - sxy @ spd_solve(syy, sxy.T))


def companion(coeffs):
    """Block companion matrix of ``A_1..A_p`` (shape ``(p, n, n)``)."""
    p, n, _ = coeffs.shape
    a = np.zeros((n * p, n * p))
    a[:n, :] = np.concatenate(list(coeffs), axis=1)
    if p > 1:
        a[n:, :-n] = np.eye(n * (p - 1))
    return a


def spectral_radius(a):
    if a.size == 0:
        return 0.0
    return float(np.max(np.abs(np.linalg.eigvals(a))))
