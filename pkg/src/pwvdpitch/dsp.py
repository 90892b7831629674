"""Shared numerical kernels: analytic signal, zero-phase filtering,
resampling, real cepstrum and windows.

DFT convention everywhere: forward ``exp(-2j*pi*k*n/N)`` unnormalized,
``1/N`` on the inverse (numpy's default).
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy import signal as sps

from .signal_io import AudioBuffer

CEPSTRUM_EPS = 1e-12
# relative width of the raised-cosine transition outside each band edge
DEFAULT_TRANSITION = 0.25


@dataclass(frozen=True)
class ComplexBuffer:
    samples: np.ndarray
    sample_rate: float

    def __post_init__(self):
        s = np.asarray(self.samples, dtype=np.complex128)
        if not np.all(np.isfinite(s)):
            raise ValueError("complex samples must be finite")
        object.__setattr__(self, "samples", s)

    def __len__(self):
        return len(self.samples)


@dataclass(frozen=True)
class Window:
    """Symmetric window with coefficients in [0, 1]."""

    coefficients: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.coefficients, dtype=np.float64)
        if c.ndim != 1 or len(c) == 0:
            raise ValueError("window must be a non-empty 1-D sequence")
        if np.any(c < 0) or np.any(c > 1):
            raise ValueError("window coefficients must lie in [0, 1]")
        if not np.array_equal(c, c[::-1]):
            raise ValueError("window must be symmetric")
        object.__setattr__(self, "coefficients", c)

    def __len__(self):
        return len(self.coefficients)

    @property
    def half_length(self) -> int:
        return (len(self.coefficients) - 1) // 2

    def lag_weights(self) -> np.ndarray:
        """Weights for lags ``m = 0 .. half_length`` (centre tap first)."""
        return self.coefficients[self.half_length:].copy()


def hann(n: int) -> Window:
    """Symmetric Hann window of ``n`` points, exactly mirror-symmetric."""
    if n < 1:
        raise ValueError("window length must be >= 1")
    if n == 1:
        return Window(np.ones(1))
    w = sps.windows.hann(n, sym=True)
    w = 0.5 * (w + w[::-1])
    return Window(np.clip(w, 0.0, 1.0))


def hann_for_duration(seconds: float, sample_rate: float) -> Window:
    """Hann window spanning ``seconds``, length forced odd."""
    n = int(round(seconds * sample_rate))
    if n % 2 == 0:
        n += 1
    return hann(max(n, 1))


def next_pow2(n: int) -> int:
    return 1 << max(0, int(n - 1).bit_length())


def analytic_signal(x: AudioBuffer) -> ComplexBuffer:
    """Analytic signal by zeroing negative-frequency DFT bins.

    DC (and Nyquist for even lengths) keep unit gain, positive bins are
    doubled. The transform length equals the input length, so the real part
    reproduces the input exactly up to rounding.
    """
    samples = np.asarray(x.samples, dtype=np.float64)
    n = len(samples)
    if n == 0:
        raise ValueError("analytic_signal: empty input")
    if n < 2:
        raise ValueError("analytic_signal: need at least 2 samples")
    spec = np.fft.fft(samples)
    gain = np.zeros(n)
    gain[0] = 1.0
    if n % 2 == 0:
        gain[n // 2] = 1.0
        gain[1:n // 2] = 2.0
    else:
        gain[1:(n + 1) // 2] = 2.0
    return ComplexBuffer(np.fft.ifft(spec * gain), x.sample_rate)


def _band_mask(freqs: np.ndarray, lo: float, hi: float, nyquist: float,
               transition: float) -> np.ndarray:
    mask = np.zeros_like(freqs)
    mask[(freqs >= lo) & (freqs <= hi)] = 1.0
    if lo > 0:
        lo_stop = lo / (1.0 + transition)
        sel = (freqs > lo_stop) & (freqs < lo)
        mask[sel] = 0.5 - 0.5 * np.cos(np.pi * (freqs[sel] - lo_stop) / (lo - lo_stop))
    if hi < nyquist:
        hi_stop = hi * (1.0 + transition)
        sel = (freqs > hi) & (freqs < hi_stop)
        mask[sel] = 0.5 + 0.5 * np.cos(np.pi * (freqs[sel] - hi) / (hi_stop - hi))
    return mask


def bandpass_array(samples: np.ndarray, sample_rate: float, lo: float, hi: float,
                   transition: float = DEFAULT_TRANSITION) -> np.ndarray:
    """Zero-phase band-pass of a raw array by frequency-domain masking.

    The mask is exactly 1 on ``[lo, hi]`` and rolls off with a raised cosine
    over ``transition`` (relative) outside each edge, so the passband has no
    ripple. ``lo == 0`` gives a pure low-pass. The signal is extended by mirror
    reflection and zero padded to a power of two so the circular convolution
    does not wrap into the output.
    """
    nyquist = sample_rate / 2.0
    if not (0 <= lo < hi <= nyquist):
        raise ValueError(f"invalid band [{lo}, {hi}] for sample rate {sample_rate}")
    x = np.asarray(samples, dtype=np.float64)
    n = len(x)
    if n == 0:
        return x.copy()
    if n == 1:
        return x.copy() if lo == 0 else np.zeros(1)

    # reflection long enough for the slowest edge to settle
    edge = lo if lo > 0 else hi
    settle = int(np.ceil(8.0 * sample_rate / max(edge * transition, 1e-9)))
    pad = min(n - 1, settle)
    if pad > 0:
        left = x[pad:0:-1]
        right = x[-2:-pad - 2:-1]
        ext = np.concatenate([left, x, right])
    else:
        ext = x
    nfft = next_pow2(len(ext) + settle)
    spec = np.fft.rfft(ext, nfft)
    freqs = np.fft.rfftfreq(nfft, 1.0 / sample_rate)
    spec *= _band_mask(freqs, lo, hi, nyquist, transition)
    y = np.fft.irfft(spec, nfft)
    return y[pad:pad + n]


def bandpass(x: AudioBuffer, lo: float, hi: float,
             transition: float = DEFAULT_TRANSITION) -> AudioBuffer:
    return AudioBuffer(bandpass_array(x.samples, x.sample_rate, lo, hi, transition),
                       x.sample_rate)


def lowpass_stopband(x: AudioBuffer, stop_edge: float,
                     transition: float = DEFAULT_TRANSITION) -> AudioBuffer:
    """Low-pass whose stopband begins at ``stop_edge``."""
    hi = min(stop_edge / (1.0 + transition), x.sample_rate / 2.0)
    return bandpass(x, 0.0, hi, transition)


def _resample_ratio(sample_rate: float, target_fs: float) -> tuple[int, int]:
    ratio = Fraction(target_fs / sample_rate).limit_denominator(10000)
    if ratio.numerator == 0:
        raise ValueError("target rate too small relative to input rate")
    return ratio.numerator, ratio.denominator


def resample(x: AudioBuffer, target_fs: float, beta: float = 8.0,
             cutoff: float = 0.9) -> AudioBuffer:
    """Polyphase decimation with a Kaiser-windowed sinc anti-alias filter.

    ``cutoff`` is the filter's -6 dB point as a fraction of the target
    Nyquist frequency.
    """
    if target_fs <= 0:
        raise ValueError("target sample rate must be positive")
    if target_fs >= x.sample_rate:
        raise ValueError("resample only decimates (target_fs < sample_rate)")
    up, down = _resample_ratio(x.sample_rate, target_fs)
    n_out = int(round(len(x.samples) * target_fs / x.sample_rate))
    half = 20 * max(up, down)
    taps = sps.firwin(2 * half + 1, cutoff / max(up, down), window=("kaiser", beta))
    y = sps.resample_poly(np.asarray(x.samples, dtype=np.float64), up, down,
                          window=taps * up)
    if len(y) < n_out:
        y = np.concatenate([y, np.zeros(n_out - len(y))])
    return AudioBuffer(y[:n_out], target_fs)


def real_cepstrum(x, floor_db: float | None = None) -> np.ndarray:
    """Inverse DFT of ``log(|DFT(x)| + eps)``; same length as ``x``.

    With ``floor_db`` the magnitude is first clipped from below at that level
    relative to its maximum, so deep stopbands do not dominate the log.
    """
    x = np.asarray(x, dtype=np.float64)
    if len(x) < 2:
        raise ValueError("real_cepstrum: need at least 2 samples")
    if not np.any(x):
        warnings.warn("real_cepstrum: all-zero input, returning zeros", RuntimeWarning,
                      stacklevel=2)
        return np.zeros(len(x))
    mag = np.abs(np.fft.fft(x))
    if floor_db is not None:
        mag = np.maximum(mag, mag.max() * 10.0 ** (floor_db / 20.0))
    return np.fft.ifft(np.log(mag + CEPSTRUM_EPS)).real
