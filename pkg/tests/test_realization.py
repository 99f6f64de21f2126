import numpy as np
import pytest

from gbsm import scenarios as sc
from gbsm import simulate as sim
from gbsm.realization import (
    ChannelRealization,
    read_binary,
    write_binary,
    write_csv,
    write_ray_log_csv,
)


@pytest.fixture(scope="module")
def small_real():
    cfg = sc.loads({"carrier_ghz": 2.6, "snapshots": 4,
                    "rx_array": {"elements": 2, "spacing_wl": 0.5},
                    "clusters": {"initial_count": 4, "mean_rays": 5},
                    "los": {"enabled": True}})
    return sim.simulate_realization(cfg, seed=3, ray_log=True)


def test_round_trip_equal(tmp_path, small_real):
    path = tmp_path / "r.6gpc"
    write_binary(small_real, path)
    back = read_binary(path)
    assert back.dims == small_real.dims
    assert back.fc_hz == small_real.fc_hz
    assert back.delta_t_s == small_real.delta_t_s
    assert back.seed == small_real.seed
    for t in range(small_real.dims[0]):
        for q in range(small_real.dims[1]):
            d0, a0 = small_real.taps(t, q, 0)
            d1, a1 = back.taps(t, q, 0)
            assert np.array_equal(d0, d1)
            assert np.array_equal(a0, a1)


def test_round_trip_bytes_stable(tmp_path, small_real):
    p1 = tmp_path / "a.6gpc"
    p2 = tmp_path / "b.6gpc"
    write_binary(small_real, p1)
    write_binary(read_binary(p1), p2)
    assert p1.read_bytes() == p2.read_bytes()


def test_magic_checked(tmp_path):
    path = tmp_path / "bogus.6gpc"
    path.write_bytes(b"NOPE" + b"\x00" * 64)
    with pytest.raises(ValueError):
        read_binary(path)


def test_header_magic_literal(tmp_path, small_real):
    path = tmp_path / "m.6gpc"
    write_binary(small_real, path)
    assert path.read_bytes()[:4] == b"6GPC"


def test_delays_sorted(small_real):
    for t in range(small_real.dims[0]):
        d, _ = small_real.taps(t, 0, 0)
        assert np.all(np.diff(d) >= 0)


def test_csv_mirror(tmp_path, small_real):
    path = tmp_path / "taps.csv"
    write_csv(small_real, path)
    lines = path.read_text().strip().splitlines()
    assert lines[0] == "t,q,p,f,delay_s,re,im"
    total_taps = sum(len(small_real.taps(t, q, 0)[0])
                     for t in range(small_real.dims[0])
                     for q in range(small_real.dims[1]))
    assert len(lines) - 1 == total_taps
    first = lines[1].split(",")
    d, a = small_real.taps(0, 0, 0)
    assert float(first[4]) == d[0]
    assert float(first[5]) == a[0].real


def test_ray_log_csv(tmp_path, small_real):
    path = tmp_path / "rays.csv"
    write_ray_log_csv(small_real, path)
    lines = path.read_text().strip().splitlines()
    assert lines[0] == "t,cluster,delay_s,power,doppler_hz"
    assert len(lines) > 1


def test_narrowband_matches_tap_sum(small_real):
    h = small_real.narrowband(0)
    _, amps = small_real.taps(0, 1, 0)
    assert h[1, 0] == amps.sum()
