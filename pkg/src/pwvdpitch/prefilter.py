"""Per-segment average-F0 estimation (cepstrum + spectrum) and band isolation."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dsp import bandpass_array, lowpass_stopband, next_pow2, real_cepstrum
from .segmenter import VoicedSegment
from .signal_io import AudioBuffer

F0_LO = 80.0
F0_HI = 320.0
LPF_STOP = 1000.0
# log-spectrum floor relative to the peak; keeps the low-pass stopband from
# swamping the cepstrum
CEPSTRUM_FLOOR_DB = -60.0
# a candidate needs a local spectral maximum within +-10 % of it whose height
# is at least this fraction of the spectrum maximum over [80, 400] Hz
PEAK_PROMINENCE = 0.25
PEAK_NEIGHBORHOOD = 0.10
SPECTRUM_BAND = (80.0, 400.0)
PREFILTER_RATIO = (0.7, 1.4)
NYQUIST_MARGIN = 0.98


class SegmentTooShort(ValueError):
    pass


@dataclass(frozen=True)
class FaEstimate:
    f_raw: float
    candidates: tuple
    fa: float
    confidence: str  # "cepstrum_clear" or "fallback"


def fa_candidates(f_raw: float, lo: float = F0_LO, hi: float = F0_HI) -> list[float]:
    """Integer multiples and divisors of ``f_raw`` inside ``[lo, hi]``."""
    out = set()
    i = 1
    while f_raw * i <= hi:
        if f_raw * i >= lo:
            out.add(f_raw * i)
        i += 1
    i = 2
    while f_raw / i >= lo:
        if f_raw / i <= hi:
            out.add(f_raw / i)
        i += 1
    return sorted(out)


def quefrency_bounds(fs: float, lo: float = F0_LO, hi: float = F0_HI) -> tuple[int, int]:
    # rounded inward so both bounds map into [lo, hi]
    return int(math.ceil(fs / hi)), int(math.floor(fs / lo))


def magnitude_spectrum(x: np.ndarray, fs: float) -> tuple[np.ndarray, np.ndarray]:
    """Hann-windowed magnitude spectrum with bins no wider than 1 Hz."""
    nfft = next_pow2(max(len(x), int(math.ceil(fs))))
    mag = np.abs(np.fft.rfft(x * np.hanning(len(x)), nfft))
    return np.fft.rfftfreq(nfft, 1.0 / fs), mag


def has_prominent_peak(freqs: np.ndarray, mag: np.ndarray, f: float, floor: float,
                       neighborhood: float = PEAK_NEIGHBORHOOD) -> bool:
    sel = np.flatnonzero((freqs >= f * (1 - neighborhood)) & (freqs <= f * (1 + neighborhood)))
    sel = sel[(sel > 0) & (sel < len(mag) - 1)]
    if len(sel) == 0:
        return False
    v = mag[sel]
    is_peak = (v >= mag[sel - 1]) & (v > mag[sel + 1]) & (v >= floor)
    return bool(np.any(is_peak))


def estimate_fa(segment_hi, fs: float, prominence: float = PEAK_PROMINENCE,
                f_lo: float = F0_LO, f_hi: float = F0_HI) -> FaEstimate:
    """Average F0 of a voiced segment sampled at the original rate ``fs``.

    Low-pass at 1 kHz, take the cepstral peak inside the [f_lo, f_hi]
    quefrency range, then return the smallest multiple/divisor of that raw
    estimate that sits on a prominent spectral peak.
    """
    x = np.asarray(segment_hi, dtype=np.float64)
    if len(x) < 2 * fs / f_lo:
        raise SegmentTooShort(
            f"segment too short for cepstrum: {len(x)} samples < {2 * fs / f_lo:g}")
    if not np.any(x):
        raise SegmentTooShort("segment is silent")
    # unit peak so the cepstrum's log floor does not depend on input level
    x = x / np.max(np.abs(x))
    x = lowpass_stopband(AudioBuffer(x, fs), min(LPF_STOP, 0.999 * fs / 2)).samples

    ceps = real_cepstrum(x * np.hanning(len(x)), CEPSTRUM_FLOOR_DB)
    q_lo, q_hi = quefrency_bounds(fs, f_lo, f_hi)
    tau = q_lo + int(np.argmax(ceps[q_lo:q_hi + 1]))
    f_raw = fs / tau
    cands = fa_candidates(f_raw, f_lo, f_hi)

    freqs, mag = magnitude_spectrum(x, fs)
    band = (freqs >= SPECTRUM_BAND[0]) & (freqs <= SPECTRUM_BAND[1])
    floor = prominence * float(np.max(mag[band])) if np.any(band) else 0.0
    for c in cands:
        if has_prominent_peak(freqs, mag, c, floor):
            return FaEstimate(f_raw, tuple(cands), c, "cepstrum_clear")
    return FaEstimate(f_raw, tuple(cands), f_raw, "fallback")


def prefilter_band(fa: float, sample_rate: float,
                   ratio: tuple[float, float] = PREFILTER_RATIO) -> tuple[float, float]:
    lo = ratio[0] * fa
    hi = min(ratio[1] * fa, NYQUIST_MARGIN * sample_rate / 2.0)
    if not lo < hi:
        raise ValueError(f"prefilter band empty for fa={fa:g} Hz")
    return lo, hi


def apply_prefilter(segment: VoicedSegment, fa: float,
                    ratio: tuple[float, float] = PREFILTER_RATIO) -> VoicedSegment:
    """Keep only ``[0.7 fa, 1.4 fa]`` of the padded segment."""
    lo, hi = prefilter_band(fa, segment.sample_rate, ratio)
    filtered = bandpass_array(segment.padded, segment.sample_rate, lo, hi)
    return segment.with_samples(filtered, fa)
