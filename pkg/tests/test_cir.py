import math

import numpy as np
import pytest

from gbsm.cir import (
    CosinePattern,
    IsotropicPattern,
    LargeScaleGains,
    PolarizationDraw,
    apply_large_scale,
    assemble_multilink,
    faraday_angle,
    iiot_mix,
    los_term,
    maritime_mix,
    maritime_power_factors,
    mix_k_factor,
    nlos_term,
    ris_cascade,
    steering_vector,
    vlc_gain,
)
from gbsm.geometry import SPEED_OF_LIGHT


class TestFaraday:
    def test_disabled(self):
        assert faraday_angle(2.0, enabled=False) == 0.0

    def test_unit_angle(self):
        assert faraday_angle(math.sqrt(108.0)) == pytest.approx(1.0, rel=1e-12)

    def test_2ghz(self):
        assert faraday_angle(2.0) == pytest.approx(27.0, rel=1e-12)

    def test_invalid(self):
        with pytest.raises(ValueError):
            faraday_angle(0.0)


class TestLosTerm:
    def test_unit_pattern_magnitude(self):
        amp, tau = los_term((1.0, 0.0), (1.0, 0.0), 0.0, 0.0, fc_hz=2.6e9, tau_s=1e-7)
        assert abs(abs(amp) - 1.0) < 1e-12
        assert tau == 1e-7

    def test_full_rotation_kills_vertical(self):
        amp, _ = los_term((1.0, 0.0), (1.0, 0.0), 0.0, 0.0, fc_hz=2.6e9, tau_s=1e-7,
                          psi_deg=90.0)
        assert abs(amp) < 1e-12

    def test_phase_consistency(self):
        d = 100.0
        fc = 2.6e9
        tau = d / SPEED_OF_LIGHT
        amp, _ = los_term((1.0, 0.0), (1.0, 0.0), 0.0, 0.0, fc_hz=fc, tau_s=tau)
        want = math.fmod(2.0 * math.pi * fc * tau, 2.0 * math.pi)
        got = math.fmod(np.angle(amp) + 2.0 * math.pi, 2.0 * math.pi)
        assert abs(got - want) < 1e-9 or abs(abs(got - want) - 2 * math.pi) < 1e-9


class TestNlosTerm:
    def test_pure_copolar(self):
        pol = PolarizationDraw(kappa=1e12, mu=1.0, theta_vv=0.3)
        amp, _ = nlos_term((1.0, 0.0), (1.0, 0.0), pol, power=0.25, fc_hz=1e9, tau_s=0.0)
        assert abs(abs(amp) - 0.5) < 1e-6

    def test_zero_power(self):
        pol = PolarizationDraw(kappa=2.0)
        amp, _ = nlos_term((1.0, 0.0), (1.0, 0.0), pol, power=0.0, fc_hz=1e9, tau_s=0.0)
        assert amp == 0.0

    def test_matrix_product_oracle(self):
        # brute-force 2x2 products, including the rotation, per draw
        rng = np.random.default_rng(5)
        frv, frh = 0.8, 0.6
        ftv, fth = 0.6, 0.8
        kappa, mu, power, fc, tau = 2.0, 1.5, 0.7, 2.6e9, 3e-8
        psi = 25.0
        cs, sn = math.cos(math.radians(psi)), math.sin(math.radians(psi))
        f_r = np.array([[cs, -sn], [sn, cs]])
        acc_brute = []
        acc_fast = []
        for _ in range(10_000):
            th = rng.uniform(0, 2 * math.pi, 4)
            m = np.array([
                [np.exp(1j * th[0]), math.sqrt(mu / kappa) * np.exp(1j * th[1])],
                [math.sqrt(1 / kappa) * np.exp(1j * th[2]), math.sqrt(mu) * np.exp(1j * th[3])],
            ])
            brute = (np.array([frv, frh]) @ m @ f_r @ np.array([ftv, fth])
                     * math.sqrt(power) * np.exp(1j * 2 * math.pi * fc * tau))
            pol = PolarizationDraw(kappa=kappa, mu=mu, theta_vv=th[0], theta_vh=th[1],
                                   theta_hv=th[2], theta_hh=th[3])
            fast, _ = nlos_term((frv, frh), (ftv, fth), pol, power, fc, tau, psi_deg=psi)
            assert abs(fast - brute) < 1e-12
            acc_brute.append(abs(brute) ** 2)
            acc_fast.append(abs(fast) ** 2)
        assert np.mean(acc_fast) == pytest.approx(np.mean(acc_brute), rel=1e-12)


class TestMixing:
    def test_k_zero(self):
        assert mix_k_factor(3.0 + 0j, 5.0 + 0j, 0.0) == 5.0

    def test_k_large_limit(self):
        got = mix_k_factor(1.0, 0.0, 1e12)
        assert got == pytest.approx(1.0, rel=1e-9)

    def test_k_one_weights(self):
        got = mix_k_factor(1.0, 1.0, 1.0)
        assert got == pytest.approx(2.0 / math.sqrt(2.0))

    def test_maritime_duct_absent(self):
        got = maritime_mix(0.0, 7.0, 99.0, k_r=0.0, s1=1.0, s2=0.0)
        assert got == 7.0

    def test_maritime_power_preserved(self):
        # unit-power components at K=0 and an even split keep total power 1
        s = maritime_mix(0.0, 1.0, 1.0, k_r=0.0, s1=0.5, s2=0.5)
        assert s == pytest.approx(2.0 / math.sqrt(2.0))
        assert (math.sqrt(0.5) ** 2 + math.sqrt(0.5) ** 2) == pytest.approx(1.0)

    def test_maritime_sum_enforced(self):
        with pytest.raises(ValueError):
            maritime_mix(0.0, 1.0, 1.0, k_r=0.0, s1=0.5, s2=0.4)

    def test_maritime_factors_logistic(self):
        s1, s2 = maritime_power_factors(500.0, mid_m=500.0, width_m=100.0)
        assert s1 + s2 == pytest.approx(1.0)
        assert s2 == pytest.approx(0.5)
        _, far = maritime_power_factors(5000.0, 500.0, 100.0)
        assert far > 0.99

    def test_iiot_reduces_without_dmc(self):
        assert iiot_mix(0.0, 4.0, 0.0, k_r=0.0) == mix_k_factor(0.0, 4.0, 0.0)


class TestLargeScale:
    def test_all_unity(self):
        h = np.array([1.0 + 2.0j])
        assert np.array_equal(apply_large_scale(h, LargeScaleGains()), h)

    def test_quarter_pathloss_halves(self):
        got = apply_large_scale(np.array([2.0 + 0j]), LargeScaleGains(pl=0.25))
        assert got[0] == pytest.approx(1.0)

    def test_micro_product(self):
        g = LargeScaleGains(pl=1e-2, sh=1.0, bl=1e-2, we=1e-1, al=1e-1)
        got = apply_large_scale(np.array([1.0 + 0j]), g)
        assert abs(got[0]) == pytest.approx(1e-3, rel=1e-12)

    def test_bounds(self):
        with pytest.raises(ValueError):
            LargeScaleGains(pl=1.5)
        with pytest.raises(ValueError):
            LargeScaleGains(bl=0.0)
        # zero-mean dB shadowing legitimately exceeds unit gain
        assert LargeScaleGains(sh=1.8).sh == 1.8


class TestVlc:
    def test_outside_fov(self):
        gain, _ = vlc_gain([0, 0, 3], (0.0, -math.pi / 2), 1.0,
                           [2.9, 0, 0], (0.0, math.pi / 2), 1e-4, fov_deg=30.0)
        assert gain == 0.0

    def test_on_axis_printed_value(self):
        gain, delay = vlc_gain([0, 0, 2], (0.0, -math.pi / 2), 1.0,
                               [0, 0, 0], (0.0, math.pi / 2), 1e-4, fov_deg=60.0)
        assert gain == pytest.approx(1e-4 / (math.pi * 4.0), rel=1e-12)
        assert gain == pytest.approx(7.96e-6, rel=1e-3)
        assert delay == pytest.approx(2.0 / SPEED_OF_LIGHT)

    def test_inverse_square(self):
        g1, _ = vlc_gain([0, 0, 2], (0.0, -math.pi / 2), 1.0,
                         [0, 0, 0], (0.0, math.pi / 2), 1e-4, 60.0)
        g2, _ = vlc_gain([0, 0, 4], (0.0, -math.pi / 2), 1.0,
                         [0, 0, 0], (0.0, math.pi / 2), 1e-4, 60.0)
        assert g2 / g1 == pytest.approx(0.25, rel=1e-12)


class TestMultilink:
    def test_single_is_identity(self):
        h = np.arange(6).reshape(2, 3).astype(complex)
        assert np.array_equal(assemble_multilink({(1, 1): h}, 1, 1), h)

    def test_block_grid_shape(self):
        blocks = {(i, j): np.full((4, 2), i * 10 + j, dtype=complex)
                  for i in range(1, 3) for j in range(1, 4)}
        big = assemble_multilink(blocks, 2, 3)
        assert big.shape == (8, 6)
        assert big[4, 2] == 22  # second block row (i=2), second block column (j=2)

    def test_missing_block(self):
        with pytest.raises(KeyError):
            assemble_multilink({(1, 1): np.eye(2)}, 1, 2)


class TestRisCascade:
    def test_identity_phi_oracle(self):
        rng = np.random.default_rng(1)
        h_ir = rng.normal(size=(4, 8)) + 1j * rng.normal(size=(4, 8))
        h_ti = rng.normal(size=(8, 2)) + 1j * rng.normal(size=(8, 2))
        f = rng.normal(size=2) + 1j * rng.normal(size=2)
        got = ris_cascade(h_ir, np.ones(8, dtype=complex), h_ti, np.zeros((4, 2)), f)
        brute = np.zeros(4, dtype=complex)
        for q in range(4):
            for p in range(2):
                s = 0.0 + 0.0j
                for k in range(8):
                    s += h_ir[q, k] * h_ti[k, p] * f[p]
                brute[q] += s
        assert np.allclose(got, brute, atol=1e-9)

    def test_zero_phi(self):
        rng = np.random.default_rng(2)
        h_tr = rng.normal(size=(4, 2)) + 1j * rng.normal(size=(4, 2))
        f = rng.normal(size=2)
        got = ris_cascade(np.zeros((4, 8)), np.zeros(8), np.zeros((8, 2)), h_tr, f)
        assert np.allclose(got, h_tr @ f)

    def test_unit_modulus_preserves_norm(self):
        rng = np.random.default_rng(3)
        phi = np.exp(1j * rng.uniform(0, 2 * math.pi, 16))
        x = rng.normal(size=16) + 1j * rng.normal(size=16)
        assert np.linalg.norm(phi * x) == pytest.approx(np.linalg.norm(x), rel=1e-12)

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            ris_cascade(np.zeros((4, 8)), np.zeros(7), np.zeros((8, 2)),
                        np.zeros((4, 2)), np.zeros(2))

    def test_steering_unit_norm(self):
        offs = np.arange(8)[:, None] * np.array([[0.05, 0.0, 0.0]])
        v = steering_vector(offs, 0.3, 0.1, 5.3e9)
        assert np.linalg.norm(v) == pytest.approx(1.0, rel=1e-12)


class TestPatterns:
    def test_isotropic(self):
        fv, fh = IsotropicPattern()(np.zeros(3), np.ones(3), 2.6)
        assert np.all(fv == 1.0) and np.all(fh == 0.0)

    def test_cosine_rolloff(self):
        pat = CosinePattern(exponent=2.0)
        on, _ = pat(0.0, 0.0, 2.6)
        off, _ = pat(math.pi / 3, 0.0, 2.6)
        assert on == 1.0 and abs(off - 0.25) < 1e-12
        behind, _ = pat(math.pi, 0.0, 2.6)
        assert behind == 0.0
