"""Command-line front end.

Exit codes: 0 success, 1 usage error, 2 I/O error, 3 processing error.
"""
from __future__ import annotations

import argparse
import glob
import json
import logging
import math
import os
import sys
import warnings

import numpy as np

from . import __version__
from .dsp import analytic_signal, hann_for_duration, resample
from .evaluation import evaluate
from .pwvd import pwvd, write_tf
from .signal_io import (AudioBuffer, InputFormatError, SynthSpec, extract_egg_ground_truth, read_track,
                        read_wav, read_wav_channels, synth, synth_speechlike, write_track,
                        write_wav)
from .tracker import THREADS_ENV, ConfigError, TrackerConfig, load_config, runtime_benchmark, track_pitch

EXIT_OK, EXIT_USAGE, EXIT_IO, EXIT_PROCESSING = 0, 1, 2, 3

# published per-speaker MAE / FFE for the CMU ARCTIC integration run
ARCTIC_TARGETS = {
    "bdl": {"mae": 3.12, "ffe": 9.80},
    "jmk": {"mae": 3.88, "ffe": 9.83},
    "slt": {"mae": 6.36, "ffe": 7.82},
}
ARCTIC_MAE_TOL = 1.5


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _jsonable(obj):
    if isinstance(obj, float) and not math.isfinite(obj):
        return None
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.generic):
        return _jsonable(obj.item())
    return obj


def _emit(payload, pretty: bool) -> None:
    print(json.dumps(_jsonable(payload), indent=2 if pretty else None, allow_nan=False))


def _config(path):
    return load_config(path) if path else TrackerConfig()


def cmd_track(args) -> int:
    cfg = _config(args.config)
    x = read_wav(args.input)
    track = track_pitch(x, cfg, threads=args.threads)
    write_track(track, args.output)
    return EXIT_OK


def cmd_synth(args) -> int:
    spec = SynthSpec(args.kind, args.f0, args.dur, args.fs, args.k)
    try:
        spec.validate()
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    write_wav(synth(spec), args.output, pcm16=args.pcm16)
    return EXIT_OK


def cmd_eval(args) -> int:
    if (args.gt is None) == (args.egg is None):
        raise UsageError("eval needs exactly one of --gt or --egg")
    est = read_track(args.est)
    if args.gt is not None:
        gt = read_track(args.gt)
    else:
        gt = extract_egg_ground_truth(read_wav(args.egg), hop=args.hop)
    _emit(evaluate(gt, est).to_dict(), args.pretty)
    return EXIT_OK


def _bench_corpus(args):
    if args.directory:
        if not os.path.isdir(args.directory):
            raise FileNotFoundError(f"no such directory: {args.directory}")
        paths = sorted(glob.glob(os.path.join(args.directory, "*.wav")))
        if not paths:
            raise FileNotFoundError(f"no .wav files in {args.directory}")
        return [read_wav(p) for p in paths]
    audio, _ = synth_speechlike(args.synthetic, 16000.0, seed=args.seed)
    return [audio]


def cmd_bench(args) -> int:
    report = runtime_benchmark(_bench_corpus(args), _config(args.config), threads=args.threads)
    from ._kernels import BACKEND_NAME
    report["kernels"] = BACKEND_NAME
    _emit(report, args.pretty)
    return EXIT_OK


def cmd_dump_tf(args) -> int:
    x = read_wav(args.input)
    if args.fd and args.fd < x.sample_rate:
        x = resample(x, args.fd)
    z = analytic_signal(x)
    window = hann_for_duration(args.window_len, x.sample_rate) if args.window_len > 0 else None
    write_tf(pwvd(z, window, nfft=args.nfft or None), args.output)
    return EXIT_OK


def _arctic_pairs(root, speaker, limit):
    pattern = os.path.join(root, f"cmu_us_{speaker}_arctic", "orig", "*.wav")
    paths = sorted(glob.glob(pattern))
    return paths[:limit] if limit else paths


def cmd_arctic(args) -> int:
    """Per-speaker MAE/FFE on local CMU ARCTIC recordings (speech ch 0, EGG ch 1)."""
    cfg = _config(args.config)
    out = {}
    for spk in args.speakers:
        paths = _arctic_pairs(args.root, spk, args.limit)
        if not paths:
            out[spk] = {"status": "missing"}
            continue
        maes, ffes = [], []
        for p in paths:
            data, fs = read_wav_channels(p)
            if data.shape[1] < 2:
                raise ValueError(f"{p}: expected speech + EGG channels")
            est = track_pitch(AudioBuffer(data[:, 0], fs), cfg, threads=args.threads)
            gt = extract_egg_ground_truth(AudioBuffer(data[:, 1], fs), hop=cfg.hop)
            rep = evaluate(gt, est)
            if math.isfinite(rep.mae):
                maes.append(rep.mae)
            ffes.append(rep.ffe)
        mae = float(np.mean(maes)) if maes else float("nan")
        target = ARCTIC_TARGETS.get(spk)
        entry = {"utterances": len(paths), "mae": mae, "ffe": float(np.mean(ffes))}
        if target:
            entry["target"] = target
            entry["mae_within_tolerance"] = bool(abs(mae - target["mae"]) <= ARCTIC_MAE_TOL)
        out[spk] = entry
    _emit(out, args.pretty)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="pwvdpitch", description="PWVD pitch tracker")
    p.add_argument("--version", action="version", version=__version__)
    p.add_argument("-v", "--verbose", action="store_true")
    default_threads = int(os.environ.get(THREADS_ENV, "1") or 1)
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("track", help="track F0 of a WAV file")
    s.add_argument("input")
    s.add_argument("-o", "--output", required=True)
    s.add_argument("--config")
    s.add_argument("--threads", type=int, default=default_threads)
    s.set_defaults(func=cmd_track)

    s = sub.add_parser("synth", help="write a synthetic test signal")
    s.add_argument("--kind", required=True, choices=SynthSpec.KINDS)
    s.add_argument("--fs", type=float, default=16000.0)
    s.add_argument("--k", type=float, default=0.0, help="chirp rate, Hz/s")
    s.add_argument("--f0", type=float, required=True)
    s.add_argument("--dur", type=float, required=True)
    s.add_argument("--pcm16", action="store_true")
    s.add_argument("-o", "--output", required=True)
    s.set_defaults(func=cmd_synth)

    s = sub.add_parser("eval", help="compare an estimated track with ground truth")
    s.add_argument("--gt")
    s.add_argument("--egg")
    s.add_argument("--est", required=True)
    s.add_argument("--hop", type=float, default=0.010)
    s.add_argument("--pretty", action="store_true")
    s.set_defaults(func=cmd_eval)

    s = sub.add_parser("bench", help="real-time factor with per-stage breakdown")
    s.add_argument("directory", nargs="?")
    s.add_argument("--synthetic", type=float, default=60.0,
                   help="seconds of synthetic audio when no directory is given")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--config")
    s.add_argument("--threads", type=int, default=default_threads)
    s.add_argument("--pretty", action="store_true")
    s.set_defaults(func=cmd_bench)

    s = sub.add_parser("dump-tf", help="write the (pseudo) WVD as a binary matrix")
    s.add_argument("input")
    s.add_argument("-o", "--output", required=True)
    s.add_argument("--window-len", type=float, default=0.0,
                   help="Hann lag window in seconds; 0 = plain WVD")
    s.add_argument("--fd", type=float, default=0.0, help="downsample first to this rate")
    s.add_argument("--nfft", type=int, default=0,
                   help="FFT length over lags; 0 = automatic (bins of 1 Hz or finer)")
    s.set_defaults(func=cmd_dump_tf)

    s = sub.add_parser("arctic", help="evaluate on local CMU ARCTIC speech+EGG files")
    s.add_argument("root")
    s.add_argument("--speakers", nargs="+", default=list(ARCTIC_TARGETS))
    s.add_argument("--limit", type=int, default=0)
    s.add_argument("--config")
    s.add_argument("--threads", type=int, default=default_threads)
    s.add_argument("--pretty", action="store_true")
    s.set_defaults(func=cmd_arctic)
    return p


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except UsageError as exc:
        print(f"pwvdpitch: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if getattr(args, "threads", 1) is not None and getattr(args, "threads", 1) < 1:
        print("pwvdpitch: usage error: --threads must be >= 1", file=sys.stderr)
        return EXIT_USAGE
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("default")
            return args.func(args)
    except (UsageError, ConfigError) as exc:
        print(f"pwvdpitch: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (OSError, EOFError, InputFormatError) as exc:
        print(f"pwvdpitch: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except Exception as exc:  # noqa: BLE001
        print(f"pwvdpitch: processing error: {exc}", file=sys.stderr)
        return EXIT_PROCESSING


if __name__ == "__main__":
    sys.exit(main())
