import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pwvdpitch.dsp import (Window, analytic_signal, bandpass, hann, hann_for_duration,
                           lowpass_stopband, real_cepstrum, resample)
from pwvdpitch.signal_io import AudioBuffer, SynthSpec, synth

from conftest import dft_matrix, rms


def tone(f, fs, dur=1.0, amp=1.0):
    t = np.arange(int(round(dur * fs))) / fs
    return AudioBuffer(amp * np.cos(2 * np.pi * f * t), fs)


# --------------------------------------------------------------------- analytic


def test_analytic_of_cosine_is_complex_exponential():
    fs, f0 = 800.0, 100.0
    n = np.arange(800)
    z = analytic_signal(AudioBuffer(np.cos(2 * np.pi * f0 * n / fs), fs)).samples
    np.testing.assert_allclose(z, np.exp(2j * np.pi * f0 * n / fs), atol=1e-9)
    np.testing.assert_allclose(np.abs(z[50:-50]), 1.0, atol=1e-9)


def test_analytic_of_constant_is_real():
    z = analytic_signal(AudioBuffer(np.full(37, 0.3), 100.0)).samples
    np.testing.assert_allclose(z, 0.3, atol=1e-12)


@pytest.mark.parametrize("n", [64, 65])
def test_analytic_has_no_negative_frequencies(rng, n):
    x = rng.standard_normal(n)
    z = analytic_signal(AudioBuffer(x, 1.0)).samples
    spec = dft_matrix(n) @ z
    neg = np.arange(n) > n // 2 if n % 2 == 0 else np.arange(n) > (n - 1) // 2
    assert np.sum(np.abs(spec[neg]) ** 2) <= 1e-9 * np.sum(np.abs(spec) ** 2)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.floats(-1e3, 1e3), min_size=2, max_size=300))
def test_analytic_real_part_recovers_input(values):
    x = np.array(values)
    z = analytic_signal(AudioBuffer(x, 1.0)).samples
    scale = max(np.max(np.abs(x)), 1e-300)
    assert np.max(np.abs(z.real - x)) <= 1e-9 * scale


def test_analytic_rejects_short_input():
    with pytest.raises(ValueError):
        analytic_signal(AudioBuffer(np.ones(1), 1.0))
    with pytest.raises(ValueError):
        analytic_signal(AudioBuffer(np.zeros(0), 1.0))


def test_fft_round_trip_large(rng):
    x = rng.standard_normal(2 ** 16)
    y = np.fft.ifft(np.fft.fft(x)).real
    assert np.max(np.abs(y - x)) <= 1e-9 * np.max(np.abs(x))


# --------------------------------------------------------------------- bandpass


def test_bandpass_keeps_inband_tone():
    x = tone(200, 16000)
    y = bandpass(x, 60, 400)
    assert abs(rms(y.samples) / rms(x.samples) - 1) <= 0.06


@pytest.mark.parametrize("phase", [0.0, 0.7, 1.5])
@pytest.mark.parametrize("f", [30, 800])
def test_bandpass_rejects_tone_an_octave_outside(f, phase):
    t = np.arange(16000) / 16000
    x = np.cos(2 * np.pi * f * t + phase)
    y = bandpass(AudioBuffer(x, 16000), 60, 400).samples
    settled = slice(1600, -1600)  # attenuation is a steady-state property
    assert 20 * np.log10(rms(y[settled]) / rms(x[settled])) <= -40


@pytest.mark.parametrize("f", [65, 100, 250, 390])
def test_bandpass_passband_ripple_under_half_db(f):
    x = tone(f, 16000)
    y = bandpass(x, 60, 400)
    mid = slice(2000, -2000)
    gain_db = 20 * np.log10(rms(y.samples[mid]) / rms(x.samples[mid]))
    assert abs(gain_db) <= 0.5


def test_lo_zero_is_lowpass():
    fs = 16000
    x = AudioBuffer(np.full(4000, 0.5), fs)
    y = bandpass(x, 0, 1000)
    np.testing.assert_allclose(y.samples, 0.5, atol=1e-4)
    z = lowpass_stopband(tone(1500, fs), 1000)
    assert rms(z.samples[1600:-1600]) < 1e-3


@pytest.mark.parametrize("lo,hi", [(400, 60), (-1, 100), (10, 9000), (100, 100)])
def test_bandpass_rejects_invalid_band(lo, hi):
    with pytest.raises(ValueError):
        bandpass(tone(100, 16000, 0.1), lo, hi)


def test_bandpass_is_zero_phase():
    fs = 800
    x = tone(120, fs)
    y = bandpass(x, 80, 170)
    mid = slice(100, -100)
    lag = np.argmax(np.correlate(y.samples[mid], x.samples[mid], "full")) - (len(x.samples[mid]) - 1)
    assert lag == 0


# --------------------------------------------------------------------- resample


def test_resample_length():
    y = resample(AudioBuffer(np.zeros(16000), 16000), 800)
    assert len(y.samples) == 800
    assert y.sample_rate == 800
    assert len(resample(AudioBuffer(np.zeros(16010), 16000), 800).samples) == round(16010 / 20)


def test_resample_preserves_100hz_tone():
    y = resample(tone(100, 16000), 800)
    spec = np.abs(np.fft.rfft(y.samples * np.hanning(len(y.samples))))
    freqs = np.fft.rfftfreq(len(y.samples), 1 / 800)
    assert freqs[np.argmax(spec)] == pytest.approx(100, abs=1)
    mid = slice(50, -50)
    assert abs(rms(y.samples[mid]) / rms(tone(100, 16000).samples) - 1) <= 0.06


def test_resample_suppresses_tone_above_new_nyquist():
    x = tone(500, 16000)
    y = resample(x, 800)
    assert 20 * np.log10(rms(y.samples) / rms(x.samples)) <= -40
    spec = np.abs(np.fft.rfft(y.samples * np.hanning(len(y.samples))))
    ref = np.abs(np.fft.rfft(tone(100, 800).samples * np.hanning(800))).max()
    assert 20 * np.log10(spec.max() / ref) <= -40


@pytest.mark.parametrize("target", [0, -5, 16000, 32000])
def test_resample_rejects_bad_rates(target):
    with pytest.raises(ValueError):
        resample(tone(100, 16000, 0.1), target)


def test_resample_and_bandpass_commute_for_inband_tone():
    x = AudioBuffer(tone(150, 16000).samples + 0.5 * tone(230, 16000).samples, 16000)
    a = resample(bandpass(x, 60, 350), 800).samples
    b = bandpass(resample(x, 800), 60, 350).samples
    mid = slice(80, -80)
    assert rms(a[mid] - b[mid]) <= 1e-3 * rms(a[mid])


# --------------------------------------------------------------------- cepstrum


def brute_cepstrum(x):
    n = len(x)
    f = dft_matrix(n)
    logmag = np.log(np.abs(f @ x) + 1e-12)
    return (np.conj(f) @ logmag).real / n


def test_cepstrum_matches_brute_force(rng):
    x = rng.standard_normal(200)
    np.testing.assert_allclose(real_cepstrum(x), brute_cepstrum(x), atol=1e-9)


def test_cepstrum_peak_at_pulse_period():
    x = synth(SynthSpec("pulse_train", 200.0, 0.1, 16000.0)).samples
    c = brute_cepstrum(x)
    assert 50 + np.argmax(c[50:201]) == 80
    assert 50 + np.argmax(real_cepstrum(x)[50:201]) == 80


def test_cepstrum_of_impulse_is_delta_at_zero():
    x = np.zeros(64)
    x[0] = 1.0
    c = real_cepstrum(x)
    np.testing.assert_allclose(c, 0.0, atol=1e-9)  # log(1) = 0 everywhere
    x[0] = 2.0
    c = real_cepstrum(x)
    assert c[0] == pytest.approx(np.log(2.0))
    np.testing.assert_allclose(c[1:], 0.0, atol=1e-9)


def test_cepstrum_of_noise_has_no_stable_peak():
    picks = []
    for seed in range(20):
        x = np.random.default_rng(seed).standard_normal(3200)
        picks.append(50 + int(np.argmax(real_cepstrum(x)[50:201])))
    # the argmax wanders: no quefrency wins more than a quarter of the seeds
    assert max(np.bincount(picks)) <= 5


def test_cepstrum_relative_floor():
    x = np.cos(2 * np.pi * 8 * np.arange(64) / 64)
    c = real_cepstrum(x, floor_db=-60)
    mag = np.maximum(np.abs(np.fft.fft(x)), 64 / 2 * 1e-3)
    np.testing.assert_allclose(c, np.fft.ifft(np.log(mag + 1e-12)).real, atol=1e-12)


def test_cepstrum_all_zero_returns_zeros_with_warning():
    with pytest.warns(RuntimeWarning):
        c = real_cepstrum(np.zeros(10))
    np.testing.assert_array_equal(c, 0.0)
    assert len(c) == 10


# ---------------------------------------------------------------------- windows


@pytest.mark.parametrize("n", [1, 2, 3, 32, 33, 101])
def test_hann_is_exactly_symmetric(n):
    w = hann(n).coefficients
    assert np.array_equal(w, w[::-1])
    assert np.all((w >= 0) & (w <= 1))


def test_hann_for_40ms_at_800hz_is_33_points():
    w = hann_for_duration(0.040, 800)
    assert len(w) == 33
    assert w.half_length == 16
    assert w.lag_weights()[0] == 1.0


def test_window_validation():
    with pytest.raises(ValueError):
        Window(np.array([0.1, 0.5, 0.2]))
    with pytest.raises(ValueError):
        Window(np.array([1.5, 1.5]))
