import numpy as np
import pytest

from pwvdpitch.prefilter import prefilter_band
from pwvdpitch.signal_io import AudioBuffer, SynthSpec, synth, synth_speechlike
from pwvdpitch.tracker import (ConfigError, StageTimes, TrackerConfig, load_config,
                               runtime_benchmark, track_pitch)

HI = 16000.0


def test_pure_tone_150():
    x = synth(SynthSpec("tone", 150.0, 0.5, HI))
    tr = track_pitch(x)
    assert len(tr) == 50
    assert tr.voiced.sum() >= 48
    assert np.mean(np.abs(tr.f0[tr.voiced] - 150)) <= 1.0


def test_silence_all_unvoiced():
    tr = track_pitch(AudioBuffer(np.zeros(16000), HI))
    assert len(tr) == 100
    assert not tr.voiced.any()


def test_harmonic_chirp():
    x = synth(SynthSpec("pulse_train", 120.0, 1.0, HI, chirp_rate=120.0))
    tr = track_pitch(x)
    truth = 120.0 + 120.0 * tr.times
    v = tr.voiced
    assert v.sum() >= 95
    err = np.abs(tr.f0[v] - truth[v])
    assert err.mean() <= 3.0
    assert np.all(err / truth[v] <= 0.2)


@pytest.mark.parametrize("scale", [1e-3, 20.0])
def test_amplitude_invariance(scale):
    x, _ = synth_speechlike(2.0, HI, seed=11)
    a = track_pitch(x)
    b = track_pitch(x.scaled(scale))
    assert np.array_equal(a.voiced, b.voiced)
    np.testing.assert_allclose(a.f0[a.voiced], b.f0[b.voiced], rtol=1e-6)


def test_f0_inside_segment_band():
    x, _ = synth_speechlike(2.0, HI, seed=2)
    _, results = track_pitch(x, return_segments=True)
    checked = 0
    for res in results:
        if res.f0 is None:
            continue
        lo, hi = prefilter_band(res.segment.fa, 800.0)
        assert res.band == (lo, hi)
        vals = res.f0[np.isfinite(res.f0)]
        assert np.all((vals >= lo) & (vals <= hi))
        checked += 1
    assert checked > 0


def test_thread_count_does_not_change_output():
    x, _ = synth_speechlike(3.0, HI, seed=4)
    a = track_pitch(x, threads=1)
    b = track_pitch(x, threads=8)
    assert np.array_equal(a.voiced, b.voiced)
    assert np.array_equal(a.f0[a.voiced], b.f0[b.voiced])


def test_config_file(tmp_path):
    p = tmp_path / "c.conf"
    p.write_text("# tuned\nhop = 0.005\nprefilter_ratio = 0.75, 1.3  # tighter\nseg_samples=100\n")
    cfg = load_config(p)
    assert cfg.hop == 0.005
    assert cfg.prefilter_ratio == (0.75, 1.3)
    assert cfg.seg_samples == 100
    for body in ("bogus = 1\n", "hop 0.01\n", "hop = -1\n", "prefilter_ratio = 1.1, 1.4\n",
                 "band_hi = 500\n", "seg_samples = x\n"):
        p.write_text(body)
        with pytest.raises(ConfigError):
            load_config(p)


def test_input_checks():
    with pytest.raises(ValueError):
        track_pitch(AudioBuffer(np.zeros(0), HI))
    with pytest.raises(ValueError):
        track_pitch(AudioBuffer(np.zeros(100), 600.0))


def test_stage_timings_collected():
    t = StageTimes()
    track_pitch(synth(SynthSpec("tone", 150.0, 0.3, HI)), timings=t)
    assert {"bandpass", "resample", "vuv", "segment", "estimate_fa", "pwvd",
            "ridge"} <= set(t.seconds)


def test_runtime_roughly_linear():
    short, _ = synth_speechlike(2.0, HI, seed=1)
    long_, _ = synth_speechlike(8.0, HI, seed=1)
    runtime_benchmark([short])  # warm-up
    a = min(runtime_benchmark([short])["wall_seconds"] for _ in range(3))
    b = min(runtime_benchmark([long_])["wall_seconds"] for _ in range(3))
    assert b / a < 4 * 2.5


def test_runtime_benchmark_report():
    rep = runtime_benchmark([synth(SynthSpec("tone", 150.0, 0.5, HI))])
    assert rep["audio_seconds"] == pytest.approx(0.5)
    assert rep["rt_factor"] > 0
    with pytest.raises(ValueError):
        runtime_benchmark([])
