"""Chop voiced regions into short segments with real-signal context."""
from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from .signal_io import AudioBuffer
from .vuv import VoicingMask


@dataclass(frozen=True)
class VoicedSegment:
    """A voiced core ``[core_start, core_end)`` on the downsampled clock.

    ``padded`` holds the core plus ``pad_left``/``pad_right`` context
    samples (zeros where the context would fall outside the utterance).
    ``hi_start``/``hi_end`` give the same span at the original rate.
    """

    core_start: int
    core_end: int
    padded: np.ndarray
    pad_left: int
    pad_right: int
    sample_rate: float
    hi_start: int
    hi_end: int
    hi_rate: float
    fa: Optional[float] = None

    @property
    def core_length(self) -> int:
        return self.core_end - self.core_start

    @property
    def core(self) -> np.ndarray:
        return self.padded[self.pad_left:self.pad_left + self.core_length]

    def with_samples(self, padded: np.ndarray, fa: Optional[float]) -> "VoicedSegment":
        return replace(self, padded=np.asarray(padded, dtype=np.float64), fa=fa)

    def hi_slice(self, x_hi: np.ndarray, pad: int) -> np.ndarray:
        """High-rate samples of the core with ``pad`` samples of context each side."""
        a, b = self.hi_start - pad, self.hi_end + pad
        out = np.zeros(b - a)
        lo, hi = max(a, 0), min(b, len(x_hi))
        if hi > lo:
            out[lo - a:hi - a] = x_hi[lo:hi]
        return out


def split_run(length: int, seg_samples: int) -> list[int]:
    """Segment lengths for one voiced run; a short remainder joins the last piece."""
    if length <= 0:
        return []
    n_full, rem = divmod(length, seg_samples)
    if n_full == 0:
        return [rem]
    sizes = [seg_samples] * n_full
    if rem:
        if rem < seg_samples / 2:
            sizes[-1] += rem
        else:
            sizes.append(rem)
    return sizes


def _context(x: np.ndarray, start: int, end: int) -> np.ndarray:
    out = np.zeros(end - start)
    lo, hi = max(start, 0), min(end, len(x))
    if hi > lo:
        out[lo - start:hi - start] = x[lo:hi]
    return out


def segment_voiced(mask: VoicingMask, x_d: AudioBuffer, x_hi: AudioBuffer,
                   seg_samples: int = 120, pad: float = 0.020) -> list[VoicedSegment]:
    if len(mask) != len(x_d.samples):
        raise ValueError("voicing mask and signal length differ")
    if seg_samples < 2:
        raise ValueError("seg_samples must be >= 2")
    pad_n = int(round(pad * x_d.sample_rate))
    ratio = x_hi.sample_rate / x_d.sample_rate
    segments = []
    for run_start, run_end in mask.regions():
        start = run_start
        for size in split_run(run_end - run_start, seg_samples):
            end = start + size
            segments.append(VoicedSegment(
                core_start=start,
                core_end=end,
                padded=_context(x_d.samples, start - pad_n, end + pad_n),
                pad_left=pad_n,
                pad_right=pad_n,
                sample_rate=x_d.sample_rate,
                hi_start=int(round(start * ratio)),
                hi_end=int(round(end * ratio)),
                hi_rate=x_hi.sample_rate,
            ))
            start = end
    return segments
