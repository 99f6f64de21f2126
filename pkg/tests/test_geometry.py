import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gbsm.geometry import (
    AntennaArray,
    MotionState,
    Spherical,
    Vec3,
    advance,
    element_position,
    relative_spherical,
)

finite = st.floats(min_value=-1e6, max_value=1e6, allow_nan=False, allow_infinity=False)


class TestVecSpherical:
    def test_axis_aligned(self):
        s = relative_spherical(Vec3(0, 0, 0), Vec3(1, 0, 0))
        assert (s.r, s.azimuth, s.elevation) == (1.0, 0.0, 0.0)

    def test_vertical(self):
        s = relative_spherical(Vec3(0, 0, 0), Vec3(0, 0, 2))
        assert s.r == 2.0
        assert s.elevation == pytest.approx(math.pi / 2)

    def test_coincident_convention(self):
        s = relative_spherical(Vec3(1, 2, 3), Vec3(1, 2, 3))
        assert (s.r, s.azimuth, s.elevation) == (0.0, 0.0, 0.0)

    def test_nonfinite_rejected(self):
        with pytest.raises(ValueError):
            Vec3(float("nan"), 0, 0)

    @given(finite, finite, finite)
    @settings(max_examples=200, deadline=None)
    def test_round_trip(self, x, y, z):
        v = Vec3(x, y, z)
        s = relative_spherical(Vec3(0, 0, 0), v)
        back = s.to_vec3()
        tol = 1e-12 * max(1.0, v.norm())
        assert abs(back.x - x) < tol and abs(back.y - y) < tol and abs(back.z - z) < tol

    def test_round_trip_bulk(self):
        rng = np.random.default_rng(0)
        pts = rng.normal(scale=100.0, size=(10_000, 3))
        for p in pts[:200]:
            v = Vec3.from_array(p)
            s = relative_spherical(Vec3(0, 0, 0), v)
            err = (s.to_vec3() - v).norm() / max(v.norm(), 1e-30)
            assert err < 1e-12


class TestAntennaArray:
    def test_reference_element_identity(self):
        arr = AntennaArray(elements=4, spacing=0.3, boresight_azimuth=0.7, boresight_elevation=0.2)
        assert element_position(arr, 1) == Vec3(0, 0, 0)

    def test_axis_aligned_third_element(self):
        lam = 0.5
        arr = AntennaArray(elements=3, spacing=0.5 * lam)
        p = element_position(arr, 3)
        assert p.x == pytest.approx(1.0 * lam, abs=1e-15)
        assert p.y == 0 and p.z == 0

    def test_rotated(self):
        arr = AntennaArray(elements=2, spacing=1.0, boresight_azimuth=math.pi / 2)
        p = element_position(arr, 2)
        assert abs(p.x) < 1e-12 and p.y == pytest.approx(1.0, abs=1e-12) and abs(p.z) < 1e-12

    def test_index_out_of_range(self):
        arr = AntennaArray(elements=2, spacing=1.0)
        with pytest.raises(IndexError):
            element_position(arr, 3)
        with pytest.raises(IndexError):
            element_position(arr, 0)

    def test_uniform_spacing(self):
        arr = AntennaArray(elements=16, spacing=0.37, boresight_azimuth=1.1, boresight_elevation=-0.4)
        pos = arr.element_positions()
        gaps = np.linalg.norm(np.diff(pos, axis=0), axis=1)
        assert np.allclose(gaps, 0.37, atol=1e-12)

    def test_upa_row_major(self):
        arr = AntennaArray(kind="upa", elements_hv=(2, 3), spacing=0.1, spacing_v=0.2)
        assert arr.elements == 6
        # p_V varies fastest: element 2 is one vertical step from element 1
        p2 = element_position(arr, 2).as_array()
        p4 = element_position(arr, 4).as_array()
        assert np.linalg.norm(p2) == pytest.approx(0.2, abs=1e-12)
        assert np.linalg.norm(p4) == pytest.approx(0.1, abs=1e-12)

    def test_invalid_spacing(self):
        with pytest.raises(ValueError):
            AntennaArray(elements=2, spacing=0.0)


class TestMotion:
    def test_axis_aligned_advance(self):
        m = MotionState(speed=5.0, azimuth=math.pi / 2)
        p = advance(Vec3(0, 0, 0), m, 1.0)
        assert abs(p.x) < 1e-12 and p.y == pytest.approx(5.0) and p.z == 0

    def test_zero_speed(self):
        p = advance(Vec3(1, 2, 3), MotionState(speed=0.0), 10.0)
        assert p == Vec3(1, 2, 3)

    def test_vertical(self):
        m = MotionState(speed=3.0, elevation=math.pi / 2)
        p = advance(Vec3(0, 0, 0), m, 2.0)
        assert p.z == pytest.approx(6.0)

    def test_additive_constant_speed(self):
        m = MotionState(speed=2.5, azimuth=0.3, elevation=-0.2)
        a = advance(advance(Vec3(0, 0, 0), m, 0.7), m, 1.3, t0=0.7)
        b = advance(Vec3(0, 0, 0), m, 2.0)
        assert (a - b).norm() < 1e-12

    def test_acceleration_integrates(self):
        m = MotionState(speed=1.0, accel=2.0)
        p = advance(Vec3(0, 0, 0), m, 3.0)
        # x = v*t + a*t^2/2
        assert p.x == pytest.approx(1.0 * 3 + 0.5 * 2 * 9)

    def test_segments(self):
        m = MotionState(segments=[
            __import__("gbsm.geometry", fromlist=["MotionSegment"]).MotionSegment(0.0, 1.0),
            __import__("gbsm.geometry", fromlist=["MotionSegment"]).MotionSegment(1.0, 2.0, azimuth=math.pi / 2),
        ])
        p = advance(Vec3(0, 0, 0), m, 2.0)
        assert p.x == pytest.approx(1.0) and p.y == pytest.approx(2.0)

    def test_negative_dt_rejected(self):
        with pytest.raises(ValueError):
            advance(Vec3(0, 0, 0), MotionState(), -1.0)
