"""Pure-Python fallback for the compiled simulation recursion.

Same contract as ``ctgranger._simkernel.recursion``.  When the lag-1 matrix
is diagonal and every other lag is long (at least 16 steps), rows are filled in blocks no
longer than the shortest such lag: inside a block the delayed terms are
already known, and the remaining first-order recursion is a per-component
IIR filter.  Otherwise a plain row loop is used.
"""
import numpy as np
from scipy import signal


def recursion(x, lags, mats, noise, start, limit):
    lags = np.asarray(lags)
    one = np.flatnonzero(lags == 1)
    rest = np.flatnonzero(lags != 1)
    if len(one) == 1 and np.all(lags[rest] >= 16):
        d1 = mats[one[0]]
        if np.count_nonzero(d1 - np.diag(np.diag(d1))) == 0:
            return _blocked(x, np.diag(d1), lags[rest], mats[rest], noise, start, limit)
    return _loop(x, lags, mats, noise, start, limit)


def _loop(x, lags, mats, noise, start, limit):
    for k in range(start, x.shape[0]):
        acc = noise[k].copy()
        for lag, m in zip(lags, mats):
            acc += m @ x[k - lag]
        x[k] = acc
        if not np.all(np.abs(acc) <= limit):
            return k
    return -1


def _blocked(x, diag, lags, mats, noise, start, limit):
    n_rows, n = x.shape
    block = int(lags.min()) if len(lags) else n_rows
    k = start
    while k < n_rows:
        stop = min(k + block, n_rows)
        drive = noise[k:stop].copy()
        for lag, m in zip(lags, mats):
            drive += x[k - lag:stop - lag] @ m.T
        for i in range(n):
            out, _ = signal.lfilter([1.0], [1.0, -diag[i]], drive[:, i], zi=[diag[i] * x[k - 1, i]])
            x[k:stop, i] = out
        bad = np.flatnonzero(~np.all(np.abs(x[k:stop]) <= limit, axis=1))
        if len(bad):
            return k + int(bad[0])
        k = stop
    return -1
