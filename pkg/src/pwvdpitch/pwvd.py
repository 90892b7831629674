"""Discrete (pseudo) Wigner-Ville distribution.

The fast path works on the analytic signal with integer lags only:

    W[n, k] = sum_{m=-M}^{M} w[m] z[n+m] conj(z[n-m]) exp(-2j*pi*k*m/nfft)
            = 2 Re FFT(w R)[k] - w[0] |z[n]|^2,     R[n, m] = z[n+m] conj(z[n-m])

Because the lag advances both samples at once, bin ``k`` corresponds to
``k * fs / (2 * nfft)`` Hz, so the axis covers ``[0, fs/2)``.

``wvd_direct`` is a brute-force summation used as an oracle.
"""
from __future__ import annotations

import math
import struct
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import _kernels
from .dsp import ComplexBuffer, Window, next_pow2
from .signal_io import InputFormatError

REAL_RESIDUE_TOL = 1e-9
RIDGE_PROMINENCE = 0.5
DIRECT_MAX_LEN = 512


@dataclass
class TFDistribution:
    """Real time-frequency matrix, rows are time instants."""

    values: np.ndarray
    time_step: float
    freq_step: float
    time_offset: float = 0.0
    nfft: int = 0
    imag_residue: float = 0.0

    @property
    def n_times(self) -> int:
        return self.values.shape[0]

    @property
    def n_freqs(self) -> int:
        return self.values.shape[1]

    @property
    def time_axis(self) -> np.ndarray:
        return self.time_offset + np.arange(self.n_times) * self.time_step

    @property
    def freq_axis(self) -> np.ndarray:
        return np.arange(self.n_freqs) * self.freq_step


def default_nfft(half_len: int, sample_rate: float, max_bin_hz: float = 1.0) -> int:
    """Power of two >= 4 * half_len, and fine enough for ``max_bin_hz`` bins."""
    need = max(4 * half_len, int(math.ceil(sample_rate / (2.0 * max_bin_hz))), 2)
    return next_pow2(need)


def _lag_weights(window: Optional[Window], n: int) -> np.ndarray:
    if window is None:
        return np.ones(n)
    if len(window) % 2 == 0:
        raise ValueError("PWVD window length must be odd")
    if len(window) > 2 * n - 1:
        raise ValueError("window longer than 2*len(x)-1")
    return window.lag_weights()


def pwvd(z: ComplexBuffer, window: Optional[Window] = None,
         nfft: Optional[int] = None, kernels=None) -> TFDistribution:
    """(Pseudo) WVD of an analytic signal via one FFT per time instant.

    ``window=None`` is the plain WVD (all lags up to ``len(z) - 1``).
    The time marginal is ``sum_k W[n, k] = nfft * |z[n]|^2`` for the plain WVD.
    """
    samples = np.asarray(z.samples, dtype=np.complex128)
    n = len(samples)
    if n == 0:
        raise ValueError("pwvd: empty input")
    kern = kernels if kernels is not None else _kernels
    lagw = _lag_weights(window, n)
    half = len(lagw) - 1
    if nfft is None:
        nfft = default_nfft(half, z.sample_rate)
    if nfft <= half:
        raise ValueError("nfft must exceed the largest lag")

    spec = np.fft.fft(kern.lag_products(samples, lagw), nfft, axis=1)
    power = (lagw[0] * np.abs(samples) ** 2)[:, None]
    assembled = spec + np.conj(spec) - power
    re = assembled.real
    scale = float(np.max(np.abs(re))) if re.size else 0.0
    residue = float(np.max(np.abs(assembled.imag))) / scale if scale > 0 else 0.0
    if residue > REAL_RESIDUE_TOL:
        raise ArithmeticError(f"PWVD imaginary residue {residue:.3g} exceeds tolerance")
    return TFDistribution(np.ascontiguousarray(re), 1.0 / z.sample_rate,
                          z.sample_rate / (2.0 * nfft), nfft=nfft, imag_residue=residue)


def pwvd_two_sided(z: ComplexBuffer, window: Optional[Window] = None,
                   nfft: Optional[int] = None) -> np.ndarray:
    """Same distribution summed over negative and positive lags explicitly.

    Returns the complex result so the imaginary residue left by the
    conjugate symmetry of the lag products can be inspected.
    """
    samples = np.asarray(z.samples, dtype=np.complex128)
    n = len(samples)
    lagw = _lag_weights(window, n)
    half = len(lagw) - 1
    if nfft is None:
        nfft = default_nfft(half, z.sample_rate)
    r = _kernels.python_backend.lag_products(samples, lagw)
    buf = np.zeros((n, nfft), dtype=np.complex128)
    buf[:, :half + 1] = r
    if half:
        buf[:, nfft - half:] = np.conj(r[:, half:0:-1])
    return np.fft.fft(buf, axis=1)


def _half_sample(x: np.ndarray, twice_pos: np.ndarray) -> np.ndarray:
    """``x`` at positions ``twice_pos / 2`` with linear interpolation, 0 outside."""
    n = len(x)
    lo = np.floor_divide(twice_pos, 2)
    hi = lo + (twice_pos % 2)
    xp = np.concatenate([x, [0]])
    lo_v = xp[np.where((lo >= 0) & (lo < n), lo, n)]
    hi_v = xp[np.where((hi >= 0) & (hi < n), hi, n)]
    return 0.5 * (lo_v + hi_v)


def wvd_direct(x, sample_rate: float = 1.0, interpolate: bool = True,
               window: Optional[Window] = None, nfft: Optional[int] = None) -> TFDistribution:
    """Brute-force WVD by explicit summation over every lag (oracle only).

    ``interpolate=True`` sums ``x[n+m/2] conj(x[n-m/2]) exp(-2j*pi*k*m/N)``
    with half-integer samples linearly interpolated; bins then span
    ``[0, fs)`` with step ``fs/N`` (upper half = negative frequencies).

    ``interpolate=False`` sums ``x[n+m] conj(x[n-m]) exp(-2j*pi*k*m/nfft)``
    over integer lags, the convention of the analytic fast path, on the same
    frequency grid as :func:`pwvd`.
    """
    x = np.asarray(x)
    n = len(x)
    if n == 0:
        raise ValueError("wvd_direct: empty input")
    if n > DIRECT_MAX_LEN:
        raise ValueError(f"wvd_direct is an oracle; input longer than {DIRECT_MAX_LEN}")
    x = x.astype(np.complex128)
    lagw = _lag_weights(window, n)
    half = len(lagw) - 1
    lags = np.arange(-half, half + 1)
    weights = lagw[np.abs(lags)]
    t = np.arange(n)[:, None]
    if interpolate:
        bins = n
        fwd = _half_sample(x, 2 * t + lags[None, :])
        bwd = _half_sample(x, 2 * t - lags[None, :])
        freq_step = sample_rate / n
    else:
        bins = nfft if nfft is not None else default_nfft(half, sample_rate)
        xp = np.concatenate([x, [0]])
        fi, bi = t + lags[None, :], t - lags[None, :]
        fwd = xp[np.where((fi >= 0) & (fi < n), fi, n)]
        bwd = xp[np.where((bi >= 0) & (bi < n), bi, n)]
        freq_step = sample_rate / (2.0 * bins)
    prod = fwd * np.conj(bwd) * weights[None, :]
    kernel = np.exp(-2j * np.pi * np.outer(lags, np.arange(bins)) / bins)
    full = prod @ kernel
    mag = float(np.max(np.abs(full))) if full.size else 0.0
    if mag > 0 and float(np.max(np.abs(full.imag))) > 1e-6 * mag:
        raise ArithmeticError("direct WVD has a non-negligible imaginary part")
    return TFDistribution(np.ascontiguousarray(full.real), 1.0 / sample_rate, freq_step,
                          nfft=bins)


def band_bins(tf: TFDistribution, band: tuple[float, float]) -> tuple[int, int]:
    lo, hi = band
    k_lo = max(0, int(math.ceil(lo / tf.freq_step - 1e-9)))
    k_hi = min(tf.n_freqs - 1, int(math.floor(hi / tf.freq_step + 1e-9)))
    if k_hi < k_lo:
        raise ValueError(f"band [{lo:g}, {hi:g}] Hz holds no frequency bins")
    return k_lo, k_hi


def pick_f0_ridge(tf: TFDistribution, band: tuple[float, float],
                  prominence: float = RIDGE_PROMINENCE, kernels=None):
    """First prominent peak per time instant inside ``band``.

    Returns ``(times, f0)``; ``f0`` is NaN where a column has no qualifying
    peak. Peaks are refined by 3-point parabolic interpolation.
    """
    kern = kernels if kernels is not None else _kernels
    k_lo, k_hi = band_bins(tf, band)
    bins = kern.first_prominent_peaks(tf.values, k_lo, k_hi, prominence)
    return tf.time_axis, bins * tf.freq_step


# --------------------------------------------------------------------------
# binary dump: <u4 n_times, <u4 n_freqs, <f8 time_step, <f8 freq_step, then
# n_times*n_freqs <f4 values, row-major (time-major)

_HEADER = struct.Struct("<IIdd")


def write_tf(tf: TFDistribution, path) -> None:
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(tf.n_times, tf.n_freqs, tf.time_step, tf.freq_step))
        fh.write(np.ascontiguousarray(tf.values, dtype="<f4").tobytes())


def read_tf(path) -> TFDistribution:
    with open(path, "rb") as fh:
        raw = fh.read()
    if len(raw) < _HEADER.size:
        raise InputFormatError(f"{path}: truncated TF dump")
    rows, cols, dt, df = _HEADER.unpack_from(raw)
    body = np.frombuffer(raw, dtype="<f4", offset=_HEADER.size)
    if body.size != rows * cols:
        raise InputFormatError(f"{path}: expected {rows * cols} values, found {body.size}")
    return TFDistribution(body.reshape(rows, cols).astype(np.float64), dt, df)
