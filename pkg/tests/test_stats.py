import math

import numpy as np
import pytest

from gbsm import stats
from gbsm.realization import ChannelRealization


def make_real(per_t_taps, delta_t=1e-3, fc=2.6e9):
    """per_t_taps: list over t of (delays, amps) for a 1x1 link."""
    cells = [[[[(np.asarray(d, dtype=float), np.asarray(a, dtype=complex))]]]
             for d, a in per_t_taps]
    return ChannelRealization(fc_hz=fc, delta_t_s=delta_t, seed=0,
                              dims=(len(cells), 1, 1, 1), cells=cells)


def two_ray(T=8, p1=0.5, tau2=100e-9):
    taps = [([0.0, tau2], [math.sqrt(p1), math.sqrt(1 - p1)]) for _ in range(T)]
    return make_real(taps)


class TestStfcf:
    def test_zero_lag_normalized(self):
        real = two_ray()
        acf = stats.temporal_acf(real)
        assert abs(acf.values[0]) == pytest.approx(1.0, abs=1e-9)

    def test_single_path_unimodular(self):
        T, dt, fc = 64, 1e-3, 2.6e9
        tau = lambda t: (100.0 - 10.0 * t * dt) / 299792458.0
        taps = [([tau(t)], [np.exp(1j * 2 * math.pi * fc * tau(t))]) for t in range(T)]
        acf = stats.temporal_acf(make_real(taps))
        assert np.all(np.abs(np.abs(acf.values) - 1.0) < 1e-9)

    def test_two_ray_fcf_closed_form(self):
        real = two_ray(p1=0.3, tau2=80e-9)
        series = stats.fcf(real, df_step_hz=5e4, n_steps=400, normalized=False)
        oracle = 0.3 + 0.7 * np.exp(-1j * 2 * math.pi * series.lags * 80e-9)
        assert np.max(np.abs(series.values - oracle)) < 1e-9

    def test_lag_bounds_checked(self):
        real = two_ray(T=4)
        with pytest.raises(ValueError):
            stats.stfcf(real, dt_steps=10)
        with pytest.raises(ValueError):
            stats.stfcf(real, dq=1)

    def test_cauchy_schwarz(self):
        rng = np.random.default_rng(0)
        taps = [(np.sort(rng.uniform(0, 1e-6, 5)),
                 rng.normal(size=5) + 1j * rng.normal(size=5)) for _ in range(32)]
        acf = stats.temporal_acf(make_real(taps))
        assert np.all(np.abs(acf.values) <= abs(acf.values[0]) + 1e-12)


class TestDelayPsd:
    def test_single_ray_mass(self):
        real = make_real([([50e-9], [1.0])])
        grid, psd = stats.delay_psd(real, resolution_s=10e-9)
        assert psd.sum() == pytest.approx(1.0, abs=1e-12)
        assert psd[0, np.argmax(psd[0])] == pytest.approx(1.0)
        assert abs(grid[np.argmax(psd[0])] - 50e-9) <= 10e-9

    def test_total_mass_equals_tap_power(self):
        rng = np.random.default_rng(1)
        amps = rng.normal(size=20) + 1j * rng.normal(size=20)
        real = make_real([(np.sort(rng.uniform(0, 1e-6, 20)), amps)])
        _, psd = stats.delay_psd(real, resolution_s=5e-9)
        assert psd.sum() == pytest.approx(float((np.abs(amps) ** 2).sum()), rel=1e-12)

    def test_transform_pair_oracle(self):
        # on-grid delays: a full-period frequency grid inverts exactly
        res = 10e-9
        n = 64
        delays = np.array([3, 10, 17]) * res
        powers = np.array([0.5, 0.3, 0.2])
        real = make_real([(delays, np.sqrt(powers))])
        series = stats.fcf(real, df_step_hz=1.0 / (n * res), n_steps=n, normalized=False)
        # independent inverse transform of the frequency correlation,
        # evaluated at the bin edges the taps sit on
        recovered = np.array([
            (series.values * np.exp(1j * 2 * math.pi * series.lags * m * res)).sum().real / n
            for m in range(n)
        ])
        grid, psd = stats.delay_psd(real, resolution_s=res)
        binned = np.zeros(n)
        binned[: psd.shape[1]] = psd[0]
        assert np.abs(recovered - binned).sum() < 0.02

    def test_needs_resolution(self):
        with pytest.raises(ValueError):
            stats.delay_psd(two_ray())


class TestDopplerPsd:
    def test_static_mass_at_zero(self):
        real = make_real([([0.0], [1.0]) for _ in range(16)])
        freqs, psd = stats.doppler_psd(stats.temporal_acf(real), window="rect")
        zero_bin = int(np.argmin(np.abs(freqs)))
        assert psd[zero_bin] / psd.sum() > 1.0 - 1e-9

    def test_los_radial_peak(self):
        T, dt, fc = 256, 1e-3, 2.6e9
        nu0 = fc * 10.0 / 299792458.0
        tau = lambda t: (100.0 - 10.0 * t * dt) / 299792458.0
        taps = [([tau(t)], [np.exp(1j * 2 * math.pi * fc * tau(t))]) for t in range(T)]
        freqs, psd = stats.doppler_psd(stats.temporal_acf(make_real(taps)))
        peak = freqs[int(np.argmax(psd))]
        bin_w = freqs[1] - freqs[0]
        assert abs(peak - nu0) <= bin_w

    def test_nonnegative(self):
        rng = np.random.default_rng(2)
        taps = [(np.sort(rng.uniform(0, 1e-6, 8)),
                 rng.normal(size=8) + 1j * rng.normal(size=8)) for _ in range(64)]
        _, psd = stats.doppler_psd(stats.temporal_acf(make_real(taps)))
        assert np.all(psd >= 0.0)

    def test_first_moment_matches_mean_doppler(self):
        T, dt, fc = 512, 1e-3, 2.6e9
        nu0 = fc * 5.0 / 299792458.0
        tau = lambda t: (100.0 - 5.0 * t * dt) / 299792458.0
        taps = [([tau(t)], [np.exp(1j * 2 * math.pi * fc * tau(t))]) for t in range(T)]
        freqs, psd = stats.doppler_psd(stats.temporal_acf(make_real(taps)))
        mean = float((freqs * psd).sum() / psd.sum())
        assert abs(mean - nu0) <= (freqs[1] - freqs[0])

    def test_rejects_frequency_series(self):
        series = stats.fcf(two_ray(), 1e5, 16)
        with pytest.raises(ValueError):
            stats.doppler_psd(series)


class TestStationaryInterval:
    def test_time_invariant_full_window(self):
        psd = np.tile(np.array([0.2, 0.5, 0.3]), (20, 1))
        out = stats.stationary_interval(psd, 1e-3, 0.8)
        assert out[0, 1] == pytest.approx(19e-3)

    def test_impossible_threshold(self):
        psd = np.tile(np.array([1.0, 0.0]), (5, 1))
        out = stats.stationary_interval(psd, 1e-3, 1.0 + 1e-9)
        assert np.all(out[:, 1] == 0.0)

    def test_two_regime_switch(self):
        t_star = 12
        psd = np.zeros((24, 4))
        psd[:t_star, 0] = 1.0
        psd[t_star:, 3] = 1.0
        out = stats.stationary_interval(psd, 1e-3, 0.8)
        assert abs(out[0, 1] - t_star * 1e-3) <= 1e-3 + 1e-12

    def test_monotone_in_threshold(self):
        rng = np.random.default_rng(3)
        psd = rng.random((16, 8))
        best = None
        for c in (0.2, 0.5, 0.8, 0.95):
            out = stats.stationary_interval(psd, 1e-3, c)
            med = np.median(out[:, 1])
            if best is not None:
                assert med <= best + 1e-12
            best = med


class TestSvs:
    def test_identity(self):
        assert stats.svs(np.eye(4)) == 1.0

    def test_diag(self):
        assert stats.svs(np.diag([2.0, 1.0])) == pytest.approx(2.0)

    def test_eigen_oracle(self):
        rng = np.random.default_rng(4)
        h = rng.normal(size=(4, 8)) + 1j * rng.normal(size=(4, 8))
        ev = np.linalg.eigvalsh(h @ h.conj().T)
        want = math.sqrt(ev.max() / ev.min())
        assert stats.svs(h) == pytest.approx(want, rel=1e-9)

    def test_scale_invariance(self):
        rng = np.random.default_rng(5)
        h = rng.normal(size=(3, 5)) + 1j * rng.normal(size=(3, 5))
        c = 2.7 - 1.3j
        assert stats.svs(c * h) == pytest.approx(stats.svs(h), rel=1e-9)

    def test_singular_matrix(self):
        h = np.zeros((2, 2))
        h[0, 0] = 1.0
        assert stats.svs(h) == math.inf


class TestCoherence:
    def test_never_reached(self):
        T, dt, fc = 32, 1e-3, 2.6e9
        taps = [([1e-7], [np.exp(1j * 0.3)]) for _ in range(T)]
        acf = stats.temporal_acf(make_real(taps))
        res = stats.coherence(acf, 0.5)
        assert res.exceeds_window and res.lag == pytest.approx((T - 1) * dt)

    def test_threshold_one(self):
        acf = stats.temporal_acf(two_ray())
        assert stats.coherence(acf, 1.0).lag == 0.0

    def test_two_ray_bandwidth(self):
        series = stats.fcf(two_ray(tau2=100e-9), df_step_hz=1e4, n_steps=1024)
        res = stats.coherence(series, 0.5)
        assert abs(res.lag - 1e7 / 3.0) <= 1e4

    def test_threshold_domain(self):
        with pytest.raises(ValueError):
            stats.coherence(stats.temporal_acf(two_ray()), 1.5)


class TestRmsSpreads:
    def test_static_zero(self):
        assert stats.rms_doppler(np.zeros(5), np.ones(5)) == 0.0

    def test_symmetric_two_point(self):
        assert stats.rms_doppler(np.array([-100.0, 100.0]), np.array([0.5, 0.5])) == 100.0

    def test_two_point_delay(self):
        assert stats.rms_delay(np.array([0.0, 100e-9]), np.array([0.5, 0.5])) == pytest.approx(50e-9)

    def test_single_ray(self):
        assert stats.rms_delay(np.array([1e-7]), np.array([1.0])) == 0.0

    def test_moment_oracle_exact(self):
        rng = np.random.default_rng(6)
        tau = rng.uniform(0, 1e-6, 100)
        p = rng.random(100)
        w = p / p.sum()
        want = math.sqrt(float(w @ tau**2) - float(w @ tau) ** 2)
        assert stats.rms_delay(tau, p) == pytest.approx(want, rel=1e-15, abs=1e-30)

    def test_monte_carlo_resampling_oracle(self):
        rng = np.random.default_rng(7)
        nu = rng.normal(scale=120.0, size=400)
        p = rng.random(400)
        draws = rng.choice(nu, size=100_000, p=p / p.sum())
        assert stats.rms_doppler(nu, p) == pytest.approx(draws.std(), rel=5e-3)
