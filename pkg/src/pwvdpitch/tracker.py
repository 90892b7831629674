"""End-to-end pitch tracking: band-pass, downsample, V/UV, segment,
pre-filter, PWVD ridge, hop aggregation."""
from __future__ import annotations

import dataclasses
import logging
import os
import time
from collections import defaultdict
from concurrent.futures import ThreadPoolExecutor
from contextlib import contextmanager
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import prefilter as pf
from .dsp import analytic_signal, bandpass, hann_for_duration, resample
from .pwvd import RIDGE_PROMINENCE, pick_f0_ridge, pwvd
from .segmenter import VoicedSegment, segment_voiced
from .signal_io import AudioBuffer, PitchTrack, frame_times
from .vuv import classify_vuv

logger = logging.getLogger(__name__)

THREADS_ENV = "PWVDPITCH_THREADS"


class ConfigError(ValueError):
    pass


@dataclass
class TrackerConfig:
    band_lo: float = 60.0
    band_hi: float = 400.0
    f_d: float = 800.0
    vuv_frame: float = 0.025
    vuv_subframe: float = 0.005
    vuv_threshold: float = 0.2
    seg_samples: int = 120
    pad: float = 0.020
    cepstrum_band: tuple = (80.0, 320.0)
    prefilter_ratio: tuple = (0.7, 1.4)
    fa_prominence: float = pf.PEAK_PROMINENCE
    window: str = "hann"
    window_length: float = 0.040
    ridge_prominence: float = RIDGE_PROMINENCE
    hop: float = 0.010
    aggregate: str = "mean"

    def validate(self) -> None:
        positive = ("band_lo", "band_hi", "f_d", "vuv_frame", "vuv_subframe",
                    "vuv_threshold", "seg_samples", "pad", "window_length", "hop")
        for name in positive:
            if not getattr(self, name) > 0:
                raise ConfigError(f"config: {name} must be positive")
        if not self.band_lo < self.band_hi <= self.f_d / 2:
            raise ConfigError("config: need band_lo < band_hi <= f_d/2")
        lo, hi = self.prefilter_ratio
        if not 0 < lo < 1 < hi:
            raise ConfigError("config: prefilter_ratio must straddle 1")
        c_lo, c_hi = self.cepstrum_band
        if not 0 < c_lo < c_hi:
            raise ConfigError("config: cepstrum_band must be increasing")
        if self.window not in ("hann", "none"):
            raise ConfigError("config: window must be 'hann' or 'none'")
        if self.aggregate not in ("mean", "median"):
            raise ConfigError("config: aggregate must be 'mean' or 'median'")


def _parse_value(kind, text: str):
    if kind is tuple:
        parts = [p for p in text.replace(",", " ").split() if p]
        if len(parts) != 2:
            raise ValueError(f"expected two numbers, got {text!r}")
        return (float(parts[0]), float(parts[1]))
    if kind is int:
        return int(text)
    if kind is float:
        return float(text)
    return text.strip()


def load_config(path) -> TrackerConfig:
    """Read ``key = value`` lines (``#`` comments) into a :class:`TrackerConfig`."""
    defaults = TrackerConfig()
    kinds = {f.name: type(getattr(defaults, f.name)) for f in dataclasses.fields(TrackerConfig)}
    values = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"{path}:{lineno}: expected key=value")
            key, val = (s.strip() for s in line.split("=", 1))
            if key not in kinds:
                raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
            try:
                values[key] = _parse_value(kinds[key], val)
            except ValueError as exc:
                raise ConfigError(f"{path}:{lineno}: {exc}") from exc
    cfg = TrackerConfig(**values)
    cfg.validate()
    return cfg


@dataclass
class StageTimes:
    seconds: dict = field(default_factory=lambda: defaultdict(float))

    @contextmanager
    def stage(self, name: str):
        t0 = time.perf_counter()
        try:
            yield
        finally:
            self.seconds[name] += time.perf_counter() - t0

    def merge(self, other: "StageTimes") -> None:
        for k, v in other.seconds.items():
            self.seconds[k] += v


@dataclass
class SegmentResult:
    segment: VoicedSegment
    f0: Optional[np.ndarray]  # per core sample, NaN where no ridge
    band: Optional[tuple]


def _track_segment(seg: VoicedSegment, x_hi: np.ndarray, cfg: TrackerConfig,
                   window) -> tuple[SegmentResult, StageTimes]:
    times = StageTimes()
    hi_pad = int(round(cfg.pad * seg.hi_rate))
    with times.stage("estimate_fa"):
        try:
            est = pf.estimate_fa(seg.hi_slice(x_hi, hi_pad), seg.hi_rate,
                                 prominence=cfg.fa_prominence,
                                 f_lo=cfg.cepstrum_band[0], f_hi=cfg.cepstrum_band[1])
        except pf.SegmentTooShort as exc:
            logger.debug("segment %d-%d unvoiced: %s", seg.core_start, seg.core_end, exc)
            return SegmentResult(seg, None, None), times
    with times.stage("prefilter"):
        filtered = pf.apply_prefilter(seg, est.fa, cfg.prefilter_ratio)
        band = pf.prefilter_band(est.fa, seg.sample_rate, cfg.prefilter_ratio)
    with times.stage("pwvd"):
        z = analytic_signal(AudioBuffer(filtered.padded, seg.sample_rate))
        w = window if window is None or len(window) <= 2 * len(z) - 1 else None
        tf = pwvd(z, w)
    with times.stage("ridge"):
        _, f0 = pick_f0_ridge(tf, band, cfg.ridge_prominence)
    core = f0[seg.pad_left:seg.pad_left + seg.core_length]
    return SegmentResult(filtered, core, band), times


def _aggregate(per_sample: np.ndarray, fs: float, n_samples: int, hop: float,
               how: str) -> tuple[np.ndarray, np.ndarray]:
    times = frame_times(n_samples, fs, hop)
    f0 = np.full(len(times), np.nan)
    half = hop / 2.0
    for i, t in enumerate(times):
        a = max(0, int(np.ceil((t - half) * fs - 1e-9)))
        b = min(n_samples, int(np.ceil((t + half) * fs - 1e-9)))
        vals = per_sample[a:b]
        vals = vals[np.isfinite(vals)]
        if len(vals):
            f0[i] = np.mean(vals) if how == "mean" else np.median(vals)
    return times, f0


def resolve_threads(threads: Optional[int]) -> int:
    if threads is None:
        threads = int(os.environ.get(THREADS_ENV, "1") or 1)
    return max(1, int(threads))


def track_pitch(x: AudioBuffer, cfg: Optional[TrackerConfig] = None,
                threads: Optional[int] = None,
                timings: Optional[StageTimes] = None,
                return_segments: bool = False):
    """Track F0 of ``x``; returns a :class:`PitchTrack` on ``cfg.hop``.

    Segments are processed on ``threads`` worker threads; results are merged
    in temporal order so the output does not depend on the thread count.
    """
    cfg = cfg or TrackerConfig()
    cfg.validate()
    if len(x.samples) == 0:
        raise ValueError("track_pitch: empty input")
    if x.sample_rate < 2 * cfg.band_hi:
        raise ValueError("track_pitch: sample rate below 2 * band_hi")
    timings = timings if timings is not None else StageTimes()

    with timings.stage("bandpass"):
        x_bp = bandpass(x, cfg.band_lo, cfg.band_hi)
    with timings.stage("resample"):
        x_d = resample(x_bp, cfg.f_d) if x.sample_rate > cfg.f_d else x_bp
    with timings.stage("vuv"):
        mask = classify_vuv(x_d, cfg.vuv_frame, cfg.vuv_threshold, cfg.vuv_subframe)
    with timings.stage("segment"):
        segments = segment_voiced(mask, x_d, x, cfg.seg_samples, cfg.pad)

    window = hann_for_duration(cfg.window_length, x_d.sample_rate) if cfg.window == "hann" else None
    n_threads = resolve_threads(threads)
    if n_threads > 1 and len(segments) > 1:
        with ThreadPoolExecutor(max_workers=n_threads) as pool:
            outs = list(pool.map(lambda s: _track_segment(s, x.samples, cfg, window), segments))
    else:
        outs = [_track_segment(s, x.samples, cfg, window) for s in segments]

    with timings.stage("assemble"):
        per_sample = np.full(len(x_d.samples), np.nan)
        results = []
        for res, seg_times in outs:
            timings.merge(seg_times)
            results.append(res)
            if res.f0 is not None:
                per_sample[res.segment.core_start:res.segment.core_end] = res.f0
        times, f0 = _aggregate(per_sample, x_d.sample_rate, len(x_d.samples), cfg.hop,
                               cfg.aggregate)
        track = PitchTrack(cfg.hop, times, f0, np.isfinite(f0))
    if return_segments:
        return track, results
    return track


def runtime_benchmark(corpus, cfg: Optional[TrackerConfig] = None,
                      threads: Optional[int] = None) -> dict:
    """Real-time factor (processing seconds per audio second) over a corpus."""
    corpus = list(corpus)
    if not corpus:
        raise ValueError("runtime_benchmark: empty corpus")
    timings = StageTimes()
    audio_seconds = 0.0
    t0 = time.perf_counter()
    for buf in corpus:
        track_pitch(buf, cfg, threads=threads, timings=timings)
        audio_seconds += buf.duration
    wall = time.perf_counter() - t0
    return {
        "rt_factor": wall / audio_seconds,
        "wall_seconds": wall,
        "audio_seconds": audio_seconds,
        "stages": {k: v for k, v in sorted(timings.seconds.items())},
    }
