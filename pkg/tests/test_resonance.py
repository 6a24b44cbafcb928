import math

import numpy as np
import pytest

from billiardlab.errors import InvalidArgumentError
from billiardlab.resonance import (
    ComplexTrace,
    Resonance,
    ResonanceGuess,
    breit_wigner_model,
    detect_peaks,
    fit_resonances,
)


def synth_resonances(rng, n, f_start=3.0e9, width_lo=0.8e6, width_hi=1.2e6):
    """Resonances with spacings of 3-10 widths, reproducible via rng."""
    widths = rng.uniform(width_lo, width_hi, n)
    spacings = rng.uniform(3.0, 10.0, n) * widths
    centers = f_start + np.cumsum(spacings)
    amps = rng.uniform(0.05e6, 0.3e6, n)
    return [Resonance(c, w, a) for c, w, a in zip(centers, widths, amps)]


class TestModel:
    def test_on_resonance_modulus(self):
        r = Resonance(center=1e9, width=2e6, amplitude=0.5e6)
        trace = breit_wigner_model([r], diagonal=False, frequencies=[1e9])
        assert abs(trace.values[0]) == pytest.approx(r.amplitude / (r.width / 2.0), rel=1e-14)

    def test_zero_amplitude_gives_identity(self):
        f = np.linspace(0.9e9, 1.1e9, 101)
        r = Resonance(1e9, 1e6, 0.0)
        off = breit_wigner_model([r], diagonal=False, frequencies=f)
        np.testing.assert_array_equal(off.values, 0.0)
        diag = breit_wigner_model([r], diagonal=True, frequencies=f)
        np.testing.assert_array_equal(diag.values, 1.0)

    def test_two_separated_resonances_peak_positions(self):
        f = np.linspace(0.99e9, 1.06e9, 7001)
        rs = [Resonance(1.00e9, 1e6, 0.3e6), Resonance(1.05e9, 1e6, 0.3e6)]
        trace = breit_wigner_model(rs, diagonal=False, frequencies=f)
        mag = np.abs(trace.values)
        step = f[1] - f[0]
        for r in rs:
            i = np.argmin(np.abs(f - r.center))
            window = mag[max(0, i - 50) : i + 51]
            assert mag.max() * 0.5 < window.max()
            assert abs(f[max(0, i - 50) + np.argmax(window)] - r.center) <= step


class TestDetectPeaks:
    def test_single_resonance(self):
        r = Resonance(1e9, 1e6, 0.2e6)
        f = np.linspace(0.98e9, 1.02e9, 2001)
        trace = breit_wigner_model([r], diagonal=False, frequencies=f)
        guesses = detect_peaks(trace, prominence=0.05)
        assert len(guesses) == 1
        assert abs(guesses[0].center - r.center) < r.width
        assert guesses[0].width == pytest.approx(r.width, rel=0.5)

    def test_flat_trace_empty(self):
        f = np.linspace(1e9, 2e9, 500)
        trace = ComplexTrace(f, np.full(f.size, 0.3 + 0.1j))
        assert detect_peaks(trace, prominence=0.01) == []

    def test_two_resonances_five_widths_apart(self):
        w = 1e6
        rs = [Resonance(1e9, w, 0.3e6), Resonance(1e9 + 5 * w, w, 0.3e6)]
        f = np.linspace(1e9 - 10 * w, 1e9 + 15 * w, 4001)
        trace = breit_wigner_model(rs, diagonal=False, frequencies=f)
        guesses = detect_peaks(trace, prominence=0.05)
        assert len(guesses) == 2

    def test_diagonal_dips(self):
        rs = [Resonance(1e9, 1e6, 0.2e6)]
        f = np.linspace(0.98e9, 1.02e9, 2001)
        trace = breit_wigner_model(rs, diagonal=True, frequencies=f, channel=(1, 1))
        guesses = detect_peaks(trace, prominence=0.05)
        assert len(guesses) == 1
        assert abs(guesses[0].center - 1e9) < 1e6

    def test_short_trace_rejected(self):
        f = np.linspace(1e9, 1.01e9, 10)
        trace = ComplexTrace(f, np.zeros(10, complex))
        with pytest.raises(InvalidArgumentError):
            detect_peaks(trace, prominence=0.1)


class TestFit:
    def test_noiseless_round_trip(self):
        rng = np.random.default_rng(42)
        truth = synth_resonances(rng, 10)
        f0 = truth[0].center - 2e7
        f1 = truth[-1].center + 2e7
        f = np.linspace(f0, f1, 8000)
        trace = breit_wigner_model(truth, diagonal=False, frequencies=f)
        guesses = detect_peaks(trace, prominence=0.02)
        assert len(guesses) == 10
        fitted = fit_resonances(trace, guesses)
        assert len(fitted) == 10
        true_centers = np.sort([r.center for r in truth])
        true_widths = np.array([r.width for r in truth])[np.argsort([r.center for r in truth])]
        np.testing.assert_allclose(fitted.centers, true_centers, rtol=1e-6)
        np.testing.assert_allclose(fitted.widths, true_widths, rtol=1e-4)
        assert all(r.converged for r in fitted.resonances)

    def test_cost_monotone_over_accepted_steps(self):
        rng = np.random.default_rng(3)
        truth = synth_resonances(rng, 4)
        f = np.linspace(truth[0].center - 2e7, truth[-1].center + 2e7, 4000)
        trace = breit_wigner_model(truth, diagonal=False, frequencies=f)
        noise = 0.002 * (rng.standard_normal(f.size) + 1j * rng.standard_normal(f.size))
        noisy = ComplexTrace(f, trace.values + noise, trace.channel)
        fitted = fit_resonances(noisy, detect_peaks(noisy, prominence=0.02))
        for report in fitted.reports:
            h = report.cost_history
            assert all(h[i + 1] <= h[i] for i in range(len(h) - 1))

    def test_noisy_centers_within_gamma_over_fifty(self):
        rng = np.random.default_rng(7)
        truth = synth_resonances(rng, 10)
        f = np.linspace(truth[0].center - 2e7, truth[-1].center + 2e7, 6000)
        clean = breit_wigner_model(truth, diagonal=False, frequencies=f)
        peak = np.abs(clean.values).max()
        guesses = detect_peaks(clean, prominence=0.02)
        true_centers = np.sort([r.center for r in truth])
        order = np.argsort([r.center for r in truth])
        true_widths = np.array([r.width for r in truth])[order]
        worst = 0.0
        for _ in range(100):
            noise = (
                0.01
                * peak
                / math.sqrt(2.0)
                * (rng.standard_normal(f.size) + 1j * rng.standard_normal(f.size))
            )
            noisy = ComplexTrace(f, clean.values + noise, clean.channel)
            fitted = fit_resonances(noisy, guesses)
            err = np.max(np.abs(fitted.centers - true_centers) / true_widths)
            worst = max(worst, err)
        assert worst < 1.0 / 50.0

    def test_weakly_overlapping_pair(self):
        # two resonances spaced by one width: the joint fit resolves both
        w = 1e6
        truth = [Resonance(1.0e9, w, 0.25e6), Resonance(1.0e9 + w, w, 0.20e6)]
        f = np.linspace(1.0e9 - 15 * w, 1.0e9 + 16 * w, 4000)
        trace = breit_wigner_model(truth, diagonal=False, frequencies=f)
        guesses = [
            ResonanceGuess(1.0e9 - 0.2 * w, 0.8 * w, 0.2e6),
            ResonanceGuess(1.0e9 + 1.3 * w, 1.2 * w, 0.2e6),
        ]
        fitted = fit_resonances(trace, guesses)
        assert len(fitted) == 2
        assert abs(fitted.centers[0] - 1.0e9) < w / 10.0
        assert abs(fitted.centers[1] - (1.0e9 + w)) < w / 10.0

    def test_background_recovered(self):
        truth = [Resonance(1e9, 1e6, 0.2e6)]
        f = np.linspace(0.99e9, 1.01e9, 2000)
        bg = 0.05 - 0.02j
        trace = breit_wigner_model(truth, diagonal=False, frequencies=f, background=bg)
        fitted = fit_resonances(trace, detect_peaks(trace, prominence=0.05))
        assert fitted.reports[0].background == pytest.approx(bg, abs=1e-6)

    def test_uncertainties_reported_on_noisy_fit(self):
        rng = np.random.default_rng(11)
        truth = [Resonance(1e9, 1e6, 0.2e6)]
        f = np.linspace(0.99e9, 1.01e9, 2000)
        clean = breit_wigner_model(truth, diagonal=False, frequencies=f)
        noise = 0.01 * (rng.standard_normal(f.size) + 1j * rng.standard_normal(f.size))
        noisy = ComplexTrace(f, clean.values + noise)
        fitted = fit_resonances(noisy, detect_peaks(noisy, prominence=0.05))
        r = fitted.resonances[0]
        assert math.isfinite(r.center_error) and r.center_error > 0.0
        assert math.isfinite(r.width_error) and r.width_error > 0.0

    def test_no_guesses_rejected(self):
        f = np.linspace(1e9, 1.1e9, 200)
        trace = ComplexTrace(f, np.zeros(f.size, complex))
        with pytest.raises(InvalidArgumentError):
            fit_resonances(trace, [])

    def test_sparse_window_rejected(self):
        truth = [Resonance(1e9, 1e6, 0.2e6)]
        f = np.linspace(0.9e9, 1.1e9, 60)  # ~3 samples across the window
        trace = breit_wigner_model(truth, diagonal=False, frequencies=f)
        with pytest.raises(InvalidArgumentError):
            fit_resonances(trace, [ResonanceGuess(1e9, 1e6, 0.2e6)])
