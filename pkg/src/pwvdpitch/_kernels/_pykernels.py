"""numpy implementations of the hot loops (fallback for the compiled core)."""
import numpy as np


def lag_products(z, lag_weights):
    """``out[n, m] = w[m] * z[n+m] * conj(z[n-m])`` for ``m = 0..M``, zero off the ends."""
    z = np.ascontiguousarray(z, dtype=np.complex128)
    w = np.ascontiguousarray(lag_weights, dtype=np.float64)
    n, big_m = len(z), len(w) - 1
    zp = np.concatenate([np.zeros(big_m, complex), z, np.zeros(big_m, complex)])
    idx = np.arange(n)[:, None] + big_m
    m = np.arange(big_m + 1)[None, :]
    return zp[idx + m] * np.conj(zp[idx - m]) * w[None, :]


def first_prominent_peaks(values, k_lo, k_hi, ratio):
    """Per row, fractional bin of the lowest local maximum in ``[k_lo, k_hi]``
    reaching ``ratio`` of the in-band maximum; NaN when there is none."""
    v = np.ascontiguousarray(values, dtype=np.float64)
    rows, width = v.shape
    k_lo = max(int(k_lo), 0)
    k_hi = min(int(k_hi), width - 1)
    out = np.full(rows, np.nan)
    if k_hi < k_lo or rows == 0:
        return out
    band = v[:, k_lo:k_hi + 1]
    bmax = band.max(axis=1)
    left = np.concatenate([np.full((rows, 1), -np.inf), v[:, :-1]], axis=1)[:, k_lo:k_hi + 1]
    right = np.concatenate([v[:, 1:], np.full((rows, 1), -np.inf)], axis=1)[:, k_lo:k_hi + 1]
    ok = (band >= left) & (band > right) & (band > 0) & (band >= ratio * bmax[:, None])
    has = ok.any(axis=1)
    first = np.argmax(ok, axis=1) + k_lo
    r = np.flatnonzero(has)
    k = first[r]
    b = v[r, k]
    a = np.where(k > 0, v[r, np.maximum(k - 1, 0)], b)
    c = np.where(k < width - 1, v[r, np.minimum(k + 1, width - 1)], b)
    den = a - 2 * b + c
    with np.errstate(divide="ignore", invalid="ignore"):
        delta = np.where(den < 0, 0.5 * (a - c) / den, 0.0)
    out[r] = k + np.clip(delta, -0.5, 0.5)
    return out
