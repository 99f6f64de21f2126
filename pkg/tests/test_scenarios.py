import json
import math

import pytest

from gbsm import scenarios as sc


def test_minimal_file_fills_defaults(tmp_path):
    path = tmp_path / "mini.cfg"
    path.write_text(json.dumps({"carrier_ghz": 2.6}))
    cfg = sc.load_config(path)
    assert cfg.carrier_ghz == 2.6
    assert cfg.snapshots == 100
    assert cfg.birth_death.lambda_g_per_m == 80.0
    assert sc.validate(cfg) == []


def test_parse_error_carries_location(tmp_path):
    path = tmp_path / "broken.cfg"
    path.write_text("{ nope }")
    with pytest.raises(sc.ConfigError) as err:
        sc.load_config(path)
    assert "1" in str(err.value)


def test_unknown_key_rejected():
    with pytest.raises(sc.ConfigError) as err:
        sc.loads({"carrier_ghz": 2.6, "clusters": {"raycount": 3}})
    assert "raycount" in str(err.value)


def test_maritime_factor_sum_checked():
    with pytest.raises(sc.ConfigError) as err:
        sc.loads({"carrier_ghz": 2.6, "maritime": {"enabled": True, "s1": 0.6, "s2": 0.5}})
    assert "sum to one" in str(err.value)


def test_umimo_preset_prints_table_values():
    cfg = sc.load_preset("ultra_massive_mimo")
    arr = cfg.rx_array_runtime()
    assert arr.elements == 128
    assert arr.spacing == pytest.approx(0.59 * cfg.wavelength_m)
    assert arr.boresight_elevation == pytest.approx(7.0 * math.pi / 18.0)
    assert cfg.tx_array_runtime().spacing == pytest.approx(0.88 * cfg.wavelength_m)


def test_all_shipped_presets_validate():
    for name in ("thz_indoor", "uav_to_ground", "ultra_massive_mimo"):
        cfg = sc.load_preset(name)
        assert sc.validate(cfg) == [], name


def test_round_trip_semantic_equality():
    for name in ("thz_indoor", "uav_to_ground", "ultra_massive_mimo"):
        cfg = sc.load_preset(name)
        again = sc.loads(cfg.to_dict())
        assert again == cfg


def test_every_simplification_applies_and_validates():
    base = sc.loads({"carrier_ghz": 2.6, "clusters": {"initial_count": 5}})
    for name in sc.SIMPLIFICATIONS:
        got = sc.apply_preset(base, name)
        assert sc.validate(got) == [], name


def test_single_link_forces_counts():
    base = sc.loads({"carrier_ghz": 2.6})
    base.n_tx = 2
    base.n_rx = 3
    base.tx_positions_m = [[0, 0, 0], [1, 0, 0]]
    base.rx_positions_m = [[10, 0, 0], [11, 0, 0], [12, 0, 0]]
    got = sc.apply_preset(base, "single_link")
    assert got.n_tx == 1 and got.n_rx == 1


def test_sub6_preset_forces_printed_list():
    got = sc.apply_preset(sc.loads({"carrier_ghz": 2.6}), "sub6ghz_small_bw")
    assert got.clusters.mean_rays == 1
    assert got.clusters.rays_fixed is True
    assert got.birth_death.freq_bins == 0
    assert got.clusters.gamma == 0.0
    assert got.large_scale.absorption_db_per_km == 0.0
    assert got.large_scale.blockage_db == 0.0


def test_b5gcm_preset_drops_spatial_consistency():
    got = sc.apply_preset(sc.loads({"carrier_ghz": 2.6}), "b5gcm")
    assert got.lsp.spatial_consistency is False
    assert got.large_scale.weather_db == 0.0
    assert got.birth_death.freq_bins == 0
    assert got.clusters.rays_fixed is True


def test_v2v_preset_full_row():
    got = sc.apply_preset(sc.loads({"carrier_ghz": 5.9}), "v2v")
    assert got.n_tx == got.n_rx == 1
    assert got.frequency_bins == 1
    assert got.polarization.mu == 1.0
    assert got.faraday.enabled is False
    assert got.clusters.gamma == 0.0
    assert got.clusters.xi_std_db == 0.0


def test_preset_application_idempotent():
    base = sc.loads({"carrier_ghz": 2.6})
    once = sc.apply_preset(base, "leo")
    twice = sc.apply_preset(once, "leo")
    assert once.to_dict() == twice.to_dict()


def test_preset_conflict_lists_keys():
    with pytest.raises(sc.ConfigError) as err:
        sc.loads({"carrier_ghz": 2.6, "simplifications": ["v2v"],
                  "faraday": {"enabled": True}})
    assert "faraday.enabled" in str(err.value)


def test_explicit_equal_value_is_not_conflict():
    cfg = sc.loads({"carrier_ghz": 2.6, "simplifications": ["v2v"],
                    "clusters": {"gamma": 0.0}})
    assert cfg.clusters.gamma == 0.0


def test_lambda_r_zero_with_bd_enabled_rejected():
    with pytest.raises(sc.ConfigError) as err:
        sc.loads({"carrier_ghz": 2.6,
                  "birth_death": {"lambda_r_per_m": 0.0, "lambda_g_per_m": 10.0},
                  "clusters": {"initial_count": 5}})
    assert "lambda_R" in str(err.value)


def test_vlc_excludes_polarization():
    with pytest.raises(sc.ConfigError) as err:
        sc.loads({"carrier_ghz": 0.4, "vlc": {"enabled": True},
                  "polarization": {"enabled": True}})
    assert "polarization" in str(err.value)
    ok = sc.loads({"carrier_ghz": 0.4, "vlc": {"enabled": True},
                   "polarization": {"enabled": False}})
    assert ok.vlc.enabled


def test_validation_aggregates_errors():
    errs = sc.validate(sc.ScenarioConfig(carrier_ghz=-1.0, snapshots=0, delta_t_ms=-2.0))
    assert len(errs) >= 3


def test_serialize_round_trip_via_file(tmp_path):
    cfg = sc.load_preset("uav_to_ground")
    path = tmp_path / "out.cfg"
    sc.serialize(cfg, path)
    again = sc.load_config(path)
    assert again == cfg


def test_initial_count_default_is_rate_ratio():
    cfg = sc.loads({"carrier_ghz": 2.6,
                    "birth_death": {"lambda_g_per_m": 80.0, "lambda_r_per_m": 4.0}})
    assert cfg.initial_cluster_count() == 20


def test_unknown_simplification():
    with pytest.raises(sc.ConfigError):
        sc.loads({"carrier_ghz": 2.6, "simplifications": ["nope"]})


def test_unknown_scenario_preset():
    with pytest.raises(sc.ConfigError) as err:
        sc.load_preset("missing")
    assert "thz_indoor" in str(err.value)
