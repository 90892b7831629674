"""Energy-threshold voiced/unvoiced classification."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .signal_io import AudioBuffer


@dataclass(frozen=True)
class VoicingMask:
    sample_rate: float
    flags: np.ndarray

    def __len__(self):
        return len(self.flags)

    def regions(self) -> list[tuple[int, int]]:
        """Maximal voiced runs as half-open ``(start, end)`` sample ranges."""
        f = np.concatenate([[False], np.asarray(self.flags, dtype=bool), [False]])
        edges = np.flatnonzero(np.diff(f.astype(np.int8)))
        return [(int(a), int(b)) for a, b in zip(edges[::2], edges[1::2])]


def _block_energy(x2: np.ndarray, size: int) -> np.ndarray:
    """Mean of ``x2`` over consecutive blocks; the last block may be short."""
    starts = np.arange(0, len(x2), size)
    sums = np.add.reduceat(x2, starts)
    lengths = np.minimum(size, len(x2) - starts)
    return sums / lengths


def classify_vuv(x_d: AudioBuffer, frame: float = 0.025, threshold_ratio: float = 0.2,
                 subframe: float = 0.005) -> VoicingMask:
    """Mark samples voiced when their frame energy exceeds ``threshold_ratio * E``.

    ``E`` is the mean energy of the whole signal. Voiced frames bordering an
    unvoiced frame are re-decided subframe by subframe against the same
    threshold.
    """
    x = x_d.samples
    n = len(x)
    if n == 0:
        raise ValueError("classify_vuv: empty input")
    flen = int(round(frame * x_d.sample_rate))
    slen = max(1, int(round(subframe * x_d.sample_rate)))
    if flen < 2:
        raise ValueError("classify_vuv: frame shorter than 2 samples")
    slen = min(slen, flen)

    x2 = x * x
    mean_energy = float(np.mean(x2))
    thresh = threshold_ratio * mean_energy

    frame_voiced = _block_energy(x2, flen) > thresh
    flags = np.repeat(frame_voiced, flen)[:n]

    n_frames = len(frame_voiced)
    for i in np.flatnonzero(frame_voiced):
        left_uv = i > 0 and not frame_voiced[i - 1]
        right_uv = i < n_frames - 1 and not frame_voiced[i + 1]
        if not (left_uv or right_uv):
            continue
        a, b = i * flen, min((i + 1) * flen, n)
        sub = _block_energy(x2[a:b], slen) > thresh
        flags[a:b] = np.repeat(sub, slen)[:b - a]
    return VoicingMask(x_d.sample_rate, flags)
