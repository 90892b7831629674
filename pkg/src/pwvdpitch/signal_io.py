"""Audio and pitch-track I/O, synthetic test signals, EGG ground truth."""
from __future__ import annotations

import csv
import logging
import math
import os
import warnings
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy import signal as sps
from scipy.io import wavfile

logger = logging.getLogger(__name__)

TRACK_HEADER = ("time_s", "f0_hz", "voiced")


class InputFormatError(ValueError):
    """An input file exists but cannot be decoded."""


@dataclass(frozen=True)
class AudioBuffer:
    """Uniformly sampled real signal."""

    samples: np.ndarray
    sample_rate: float

    def __post_init__(self):
        s = np.asarray(self.samples, dtype=np.float64)
        if s.ndim != 1:
            raise ValueError("samples must be one-dimensional")
        if not self.sample_rate > 0:
            raise ValueError("sample_rate must be positive")
        if not np.all(np.isfinite(s)):
            raise ValueError("samples must be finite")
        object.__setattr__(self, "samples", s)

    def __len__(self):
        return len(self.samples)

    @property
    def duration(self) -> float:
        return len(self.samples) / self.sample_rate

    def scaled(self, factor: float) -> "AudioBuffer":
        return AudioBuffer(self.samples * factor, self.sample_rate)


@dataclass
class PitchTrack:
    """Per-frame F0 with voicing flags on a uniform time grid.

    ``f0`` holds NaN for unvoiced frames.
    """

    hop: float
    times: np.ndarray
    f0: np.ndarray
    voiced: np.ndarray

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=np.float64)
        self.f0 = np.asarray(self.f0, dtype=np.float64)
        self.voiced = np.asarray(self.voiced, dtype=bool)
        n = len(self.times)
        if len(self.f0) != n or len(self.voiced) != n:
            raise ValueError("times, f0 and voiced must have equal length")
        if self.hop <= 0:
            raise ValueError("hop must be positive")
        if n > 1 and np.any(np.diff(self.times) <= 0):
            raise ValueError("times must be strictly increasing")
        if np.any(np.isfinite(self.f0) != self.voiced):
            raise ValueError("f0 must be present exactly on voiced frames")
        if np.any(self.f0[self.voiced] <= 0):
            raise ValueError("f0 values must be positive")

    def __len__(self):
        return len(self.times)

    @classmethod
    def unvoiced(cls, n_frames: int, hop: float) -> "PitchTrack":
        return cls(hop, np.arange(n_frames) * hop, np.full(n_frames, np.nan),
                   np.zeros(n_frames, dtype=bool))

    def equals(self, other: "PitchTrack", rtol: float = 1e-6) -> bool:
        if len(self) != len(other):
            return False
        if not np.array_equal(self.voiced, other.voiced):
            return False
        if not np.allclose(self.times, other.times, rtol=0, atol=1e-6):
            return False
        v = self.voiced
        return bool(np.allclose(self.f0[v], other.f0[v], rtol=rtol, atol=0))


def frame_times(n_samples: int, sample_rate: float, hop: float) -> np.ndarray:
    """Frame centres ``0, hop, 2*hop, ...`` strictly inside the signal."""
    duration = n_samples / sample_rate
    n_frames = int(math.floor(duration / hop - 1e-9)) + 1 if n_samples else 0
    return np.arange(n_frames) * hop


# --------------------------------------------------------------------------
# WAV


def read_wav(path) -> AudioBuffer:
    """Read a PCM16 / PCM32 / float WAV file, normalized to [-1, 1].

    Multi-channel files keep channel 0 only.
    """
    if not os.path.exists(path):
        raise FileNotFoundError(f"no such file: {path}")
    try:
        rate, data = wavfile.read(path)
    except ValueError as exc:
        raise InputFormatError(f"unsupported WAV encoding in {path}: {exc}") from exc
    if data.ndim == 2:
        warnings.warn(f"{path}: {data.shape[1]} channels, keeping channel 0 only",
                      stacklevel=2)
        data = data[:, 0]
    if len(data) == 0:
        raise InputFormatError(f"{path}: zero-length audio")
    if data.dtype == np.int16:
        samples = data.astype(np.float64) / 32768.0
    elif data.dtype == np.int32:
        samples = data.astype(np.float64) / 2147483648.0
    elif data.dtype == np.uint8:
        samples = (data.astype(np.float64) - 128.0) / 128.0
    elif np.issubdtype(data.dtype, np.floating):
        samples = data.astype(np.float64)
    else:
        raise InputFormatError(f"unsupported WAV sample type {data.dtype} in {path}")
    return AudioBuffer(samples, float(rate))


def write_wav(buf: AudioBuffer, path, pcm16: bool = False) -> None:
    """Write float32 (default) or 16-bit PCM WAV."""
    rate = int(round(buf.sample_rate))
    if pcm16:
        data = np.clip(np.round(buf.samples * 32767.0), -32768, 32767).astype(np.int16)
    else:
        data = buf.samples.astype(np.float32)
    wavfile.write(path, rate, data)


# --------------------------------------------------------------------------
# synthesis


@dataclass(frozen=True)
class SynthSpec:
    kind: str
    f0: float
    duration: float
    sample_rate: float
    chirp_rate: float = 0.0

    KINDS = ("chirp_pair", "pulse_train", "tone")

    def validate(self) -> None:
        if self.kind not in self.KINDS:
            raise ValueError(f"unknown synth kind {self.kind!r}")
        if self.duration <= 0:
            raise ValueError("duration must be positive")
        if self.sample_rate <= 0:
            raise ValueError("sample_rate must be positive")
        nyq = self.sample_rate / 2.0
        end = self.chirp_rate * self.duration
        if self.kind == "chirp_pair":
            top = max(abs(end + self.f0), abs(self.f0), abs(end))
        else:
            top = max(abs(self.f0), abs(self.f0 + end))
        if top >= nyq:
            raise ValueError(
                f"instantaneous frequency {top:g} Hz reaches Nyquist {nyq:g} Hz")
        if self.kind == "pulse_train" and min(self.f0, self.f0 + end) <= 0:
            raise ValueError("pulse_train needs a positive fundamental throughout")


def decay_kernel(sample_rate: float, tau: float = 0.001, length: float = 0.005) -> np.ndarray:
    n = max(1, int(round(length * sample_rate)))
    return np.exp(-np.arange(n) / (tau * sample_rate))


def _chirp(t: np.ndarray, k: float, f0: float) -> np.ndarray:
    return np.cos(np.pi * k * t ** 2 + 2 * np.pi * f0 * t)


def pulse_positions(spec: SynthSpec) -> np.ndarray:
    """Sample indices of the impulses of a (possibly sweeping) pulse train."""
    fs = spec.sample_rate
    n = int(round(spec.duration * fs))
    if spec.chirp_rate == 0:
        period = int(round(fs / spec.f0))
        return np.arange(0, n, period)
    # pulse i sits where the phase f0*t + k*t^2/2 reaches i
    total = spec.f0 * spec.duration + 0.5 * spec.chirp_rate * spec.duration ** 2
    i = np.arange(0, int(math.floor(total)) + 1, dtype=np.float64)
    k, f0 = spec.chirp_rate, spec.f0
    t = (-f0 + np.sqrt(f0 * f0 + 2 * k * i)) / k
    pos = np.round(t * fs).astype(int)
    return pos[pos < n]


def synth(spec: SynthSpec) -> AudioBuffer:
    """Synthesize a test signal.

    ``chirp_pair``: cos(pi k t^2 + 2 pi f0 t) + cos(pi k t^2).
    ``pulse_train``: impulses every round(fs/f0) samples (or following the
    instantaneous F0 ``f0 + k t`` when ``chirp_rate`` is set) convolved with
    a short exponential decay.
    ``tone``: cos(2 pi f0 t).
    """
    spec.validate()
    fs = spec.sample_rate
    n = int(round(spec.duration * fs))
    t = np.arange(n) / fs
    if spec.kind == "chirp_pair":
        y = _chirp(t, spec.chirp_rate, spec.f0) + _chirp(t, spec.chirp_rate, 0.0)
    elif spec.kind == "tone":
        y = np.cos(2 * np.pi * spec.f0 * t + np.pi * spec.chirp_rate * t ** 2)
    else:
        train = np.zeros(n)
        train[pulse_positions(spec)] = 1.0
        y = np.convolve(train, decay_kernel(fs))[:n]
    return AudioBuffer(y, fs)


def pulse_train_f0(spec: SynthSpec, times: np.ndarray) -> np.ndarray:
    """Analytic instantaneous F0 of a sweeping pulse train."""
    return spec.f0 + spec.chirp_rate * np.asarray(times)


# --------------------------------------------------------------------------
# EGG ground truth

PLAUSIBLE_PERIODS = 2.5
MIN_F0 = 60.0
MAX_F0 = 500.0


def detect_gcis(egg: AudioBuffer, prominence_factor: float = 3.0,
                polarity: int = -1) -> np.ndarray:
    """Glottal closure instants (sample indices) as prominent dEGG peaks.

    Peaks of ``polarity * dEGG`` are kept when their prominence is at least
    ``prominence_factor`` times the median absolute dEGG value.
    """
    x = egg.samples
    if len(x) < 3:
        return np.zeros(0, dtype=int)
    degg = np.diff(x, prepend=x[0]) * egg.sample_rate
    med = float(np.median(np.abs(degg)))
    target = polarity * degg
    # strictly positive floor so a flat or all-zero dEGG yields nothing
    floor = max(prominence_factor * med, np.finfo(float).tiny)
    peaks, _ = sps.find_peaks(target, prominence=floor,
                              distance=max(1, int(egg.sample_rate / MAX_F0)))
    return peaks


def extract_egg_ground_truth(egg: AudioBuffer, hop: float = 0.010,
                             prominence_factor: float = 3.0,
                             polarity: int = -1) -> PitchTrack:
    """F0 / voicing ground truth from an EGG recording.

    Each frame takes the GCI pair bracketing its time; the frame is voiced
    with F0 = 1 / interval when the interval is no longer than 2.5 periods
    of 60 Hz.
    """
    if len(egg.samples) == 0:
        raise ValueError("empty EGG signal")
    if hop <= 0:
        raise ValueError("hop must be positive")
    times = frame_times(len(egg.samples), egg.sample_rate, hop)
    f0 = np.full(len(times), np.nan)
    gcis = detect_gcis(egg, prominence_factor, polarity)
    if len(gcis) >= 2:
        gci_t = gcis / egg.sample_rate
        max_gap = PLAUSIBLE_PERIODS / MIN_F0
        idx = np.searchsorted(gci_t, times, side="right") - 1
        ok = (idx >= 0) & (idx < len(gci_t) - 1)
        left = gci_t[idx[ok]]
        right = gci_t[idx[ok] + 1]
        gap = right - left
        vals = np.where(gap <= max_gap, 1.0 / gap, np.nan)
        f0[ok] = vals
    return PitchTrack(hop, times, f0, np.isfinite(f0))


# --------------------------------------------------------------------------
# track CSV


def write_track(track: PitchTrack, path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(",".join(TRACK_HEADER) + "\n")
        for t, f, v in zip(track.times, track.f0, track.voiced):
            f_txt = f"{f:.6f}" if v else ""
            fh.write(f"{t:.6f},{f_txt},{int(v)}\n")


def read_track(path, hop: Optional[float] = None) -> PitchTrack:
    """Read a track CSV. The hop is inferred from the time column unless given."""
    times, f0, voiced = [], [], []
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or tuple(h.strip() for h in header) != TRACK_HEADER:
            raise InputFormatError(f"{path}: expected header {','.join(TRACK_HEADER)}")
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 3:
                raise InputFormatError(f"{path}:{lineno}: expected 3 columns")
            try:
                t = float(row[0])
                v = int(row[2])
                f = float(row[1]) if row[1].strip() else math.nan
            except ValueError as exc:
                raise InputFormatError(f"{path}:{lineno}: {exc}") from exc
            if v not in (0, 1) or (v == 1) != math.isfinite(f):
                raise InputFormatError(f"{path}:{lineno}: inconsistent f0/voiced columns")
            times.append(t)
            f0.append(f)
            voiced.append(bool(v))
    if hop is None:
        if len(times) >= 2:
            hop = float(np.median(np.diff(times)))
        else:
            hop = 0.010
    try:
        return PitchTrack(hop, times, f0, voiced)
    except ValueError as exc:
        raise InputFormatError(f"{path}: {exc}") from exc


def synth_speechlike(duration: float, sample_rate: float = 16000.0,
                     seed: int = 0) -> tuple[AudioBuffer, PitchTrack]:
    """Alternating voiced/unvoiced test audio with a known F0 track.

    Voiced stretches are sweeping pulse trains (80-250 Hz); unvoiced
    stretches are low-level noise. Returns the audio and its reference
    track on a 10 ms hop.
    """
    rng = np.random.default_rng(seed)
    fs = sample_rate
    n = int(round(duration * fs))
    y = np.zeros(n)
    ref = np.full(n, np.nan)
    pos = 0
    while pos < n:
        seg = int(rng.uniform(0.25, 0.6) * fs)
        gap = int(rng.uniform(0.08, 0.25) * fs)
        seg = min(seg, n - pos)
        if seg > int(0.05 * fs):
            dur = seg / fs
            f_start = rng.uniform(90, 220)
            f_end = float(np.clip(f_start * rng.uniform(0.8, 1.25), 80, 250))
            spec = SynthSpec("pulse_train", f_start, dur, fs, (f_end - f_start) / dur)
            y[pos:pos + seg] = synth(spec).samples[:seg]
            ref[pos:pos + seg] = pulse_train_f0(spec, np.arange(seg) / fs)
        pos += seg
        g = min(gap, n - pos)
        y[pos:pos + g] = 0.01 * rng.standard_normal(g)
        pos += g
    times = frame_times(n, fs, 0.010)
    idx = np.minimum(np.round(times * fs).astype(int), n - 1)
    f0 = ref[idx]
    return AudioBuffer(y, fs), PitchTrack(0.010, times, f0, np.isfinite(f0))


def read_wav_channels(path) -> tuple[np.ndarray, float]:
    """All channels of a WAV as float64 ``(n_samples, n_channels)``."""
    if not os.path.exists(path):
        raise FileNotFoundError(f"no such file: {path}")
    try:
        rate, data = wavfile.read(path)
    except ValueError as exc:
        raise InputFormatError(f"unsupported WAV encoding in {path}: {exc}") from exc
    if data.ndim == 1:
        data = data[:, None]
    if data.dtype == np.int16:
        out = data.astype(np.float64) / 32768.0
    elif data.dtype == np.int32:
        out = data.astype(np.float64) / 2147483648.0
    else:
        out = data.astype(np.float64)
    return out, float(rate)
