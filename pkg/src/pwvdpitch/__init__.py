"""Pitch tracking with the pseudo Wigner-Ville distribution."""

__version__ = "0.1.0"

from .dsp import analytic_signal, bandpass, hann, real_cepstrum, resample
from .evaluation import EvalReport, align, evaluate, ffe, mae_pve
from .prefilter import apply_prefilter, estimate_fa
from .pwvd import TFDistribution, pick_f0_ridge, pwvd, wvd_direct
from .segmenter import VoicedSegment, segment_voiced
from .signal_io import (AudioBuffer, PitchTrack, SynthSpec, extract_egg_ground_truth,
                        read_track, read_wav, synth, write_track, write_wav)
from .tracker import TrackerConfig, load_config, runtime_benchmark, track_pitch
from .vuv import VoicingMask, classify_vuv
