"""Coordinates, antenna arrays, motion, and position bookkeeping.

Everything is flat 3D Cartesian in meters. Long-range links (e.g. satellite)
are represented by large distances and elevation-dependent statistics, not
geodetic coordinates. Time is snapshot index times the channel sampling
interval; motion changes at snapshot boundaries only.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

SPEED_OF_LIGHT = 299_792_458.0  # m/s


def unit_vector(azimuth: float, elevation: float) -> np.ndarray:
    """Unit direction for (azimuth, elevation) in radians."""
    ce = math.cos(elevation)
    return np.array([math.cos(azimuth) * ce, math.sin(azimuth) * ce, math.sin(elevation)])


@dataclass(frozen=True)
class Vec3:
    """3D position in meters. Components must be finite."""

    x: float
    y: float
    z: float

    def __post_init__(self):
        for c in (self.x, self.y, self.z):
            if not math.isfinite(c):
                raise ValueError("Vec3 components must be finite")

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z], dtype=float)

    @staticmethod
    def from_array(a) -> "Vec3":
        return Vec3(float(a[0]), float(a[1]), float(a[2]))

    def __add__(self, other: "Vec3") -> "Vec3":
        return Vec3(self.x + other.x, self.y + other.y, self.z + other.z)

    def __sub__(self, other: "Vec3") -> "Vec3":
        return Vec3(self.x - other.x, self.y - other.y, self.z - other.z)

    def norm(self) -> float:
        return math.sqrt(self.x * self.x + self.y * self.y + self.z * self.z)


@dataclass(frozen=True)
class Spherical:
    """(range, azimuth, elevation): r >= 0, azimuth in (-pi, pi], elevation in [-pi/2, pi/2]."""

    r: float
    azimuth: float
    elevation: float

    def __post_init__(self):
        if self.r < 0:
            raise ValueError("range must be nonnegative")
        if not (-math.pi < self.azimuth <= math.pi + 1e-15):
            raise ValueError("azimuth out of (-pi, pi]")
        if not (-math.pi / 2 - 1e-15 <= self.elevation <= math.pi / 2 + 1e-15):
            raise ValueError("elevation out of [-pi/2, pi/2]")

    def to_vec3(self) -> Vec3:
        return Vec3.from_array(self.r * unit_vector(self.azimuth, self.elevation))


def relative_spherical(origin: Vec3, target: Vec3) -> Spherical:
    """Spherical coordinates of target as seen from origin.

    Coincident points return (0, 0, 0) by convention.
    """
    d = target - origin
    r = d.norm()
    if r == 0.0:
        return Spherical(0.0, 0.0, 0.0)
    azimuth = math.atan2(d.y, d.x)
    if azimuth <= -math.pi:
        azimuth = math.pi
    elevation = math.atan2(d.z, math.hypot(d.x, d.y))
    return Spherical(r, azimuth, elevation)


def cartesian_to_spherical(arr: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Vectorized (..., 3) -> (r, azimuth, elevation). r=0 rows get zero angles."""
    r = np.linalg.norm(arr, axis=-1)
    azimuth = np.arctan2(arr[..., 1], arr[..., 0])
    elevation = np.arctan2(arr[..., 2], np.hypot(arr[..., 0], arr[..., 1]))
    azimuth = np.where(r > 0, azimuth, 0.0)
    elevation = np.where(r > 0, elevation, 0.0)
    return r, azimuth, elevation


@dataclass
class MotionSegment:
    """Piecewise-constant motion: active from start_s until the next segment."""

    start_s: float
    speed: float  # m/s at segment start
    accel: float = 0.0  # m/s^2, speed integrates linearly within the segment
    azimuth: float = 0.0  # radians
    elevation: float = 0.0  # radians


@dataclass
class MotionState:
    """Speed/acceleration/travel-angle state, optionally piecewise over time.

    Segments must be sorted by start time with the first at t <= 0 so the
    simulated window is covered without gaps.
    """

    speed: float = 0.0
    accel: float = 0.0
    azimuth: float = 0.0
    elevation: float = 0.0
    segments: list[MotionSegment] = field(default_factory=list)

    def __post_init__(self):
        if self.speed < 0:
            raise ValueError("speed must be nonnegative")
        if not self.segments:
            self.segments = [MotionSegment(0.0, self.speed, self.accel, self.azimuth, self.elevation)]
        starts = [s.start_s for s in self.segments]
        if starts != sorted(starts):
            raise ValueError("motion segments must be sorted by start time")
        if starts[0] > 0:
            raise ValueError("first motion segment must start at or before t=0")

    def segment_at(self, t: float) -> MotionSegment:
        current = self.segments[0]
        for seg in self.segments:
            if seg.start_s <= t:
                current = seg
            else:
                break
        return current

    def velocity_at(self, t: float) -> np.ndarray:
        seg = self.segment_at(t)
        v = seg.speed + seg.accel * (t - seg.start_s)
        return v * unit_vector(seg.azimuth, seg.elevation)

    def displacement(self, t0: float, t1: float) -> np.ndarray:
        """Integrated displacement over [t0, t1], honoring segment boundaries."""
        if t1 < t0:
            raise ValueError("time must not run backwards")
        total = np.zeros(3)
        t = t0
        while t < t1 - 1e-15:
            seg = self.segment_at(t)
            nxt = [s.start_s for s in self.segments if s.start_s > t]
            t_end = min(t1, nxt[0]) if nxt else t1
            dt = t_end - t
            tau0 = t - seg.start_s
            dist = seg.speed * dt + seg.accel * (tau0 * dt + 0.5 * dt * dt)
            total += dist * unit_vector(seg.azimuth, seg.elevation)
            t = t_end
        return total


def advance(pos: Vec3, motion: MotionState, dt: float, t0: float = 0.0) -> Vec3:
    """Move pos along the motion state for dt seconds starting at t0."""
    if dt < 0:
        raise ValueError("dt must be nonnegative")
    return Vec3.from_array(pos.as_array() + motion.displacement(t0, t0 + dt))


@dataclass
class AntennaArray:
    """Uniform linear or planar array.

    ULA elements lie along the boresight unit vector (cos bA cos bE,
    sin bA cos bE, sin bE) at multiples of the spacing. A UPA indexes
    elements row-major over (p_H, p_V) with p_V fastest; its horizontal axis
    is the boresight vector and its vertical axis the elevation-orthogonal
    direction (boresight elevation + pi/2).
    """

    kind: str = "ula"  # "ula" | "upa"
    elements: int = 1  # total count; for UPA use elements_hv
    spacing: float = 0.0  # meters (ULA, or UPA horizontal)
    boresight_azimuth: float = 0.0  # radians
    boresight_elevation: float = 0.0  # radians
    reference: Vec3 = field(default_factory=lambda: Vec3(0.0, 0.0, 0.0))
    elements_hv: tuple[int, int] | None = None  # UPA (M_H, M_V)
    spacing_v: float | None = None  # meters, UPA vertical

    def __post_init__(self):
        if self.kind not in ("ula", "upa"):
            raise ValueError(f"unknown array kind {self.kind!r}")
        if self.kind == "upa":
            if self.elements_hv is None:
                raise ValueError("UPA requires elements_hv")
            self.elements = self.elements_hv[0] * self.elements_hv[1]
            if self.spacing_v is None:
                self.spacing_v = self.spacing
        if self.elements < 1:
            raise ValueError("element count must be >= 1")
        if self.elements > 1 and self.spacing <= 0:
            raise ValueError("spacing must be positive")

    def _axis_h(self) -> np.ndarray:
        return unit_vector(self.boresight_azimuth, self.boresight_elevation)

    def _axis_v(self) -> np.ndarray:
        return unit_vector(self.boresight_azimuth, self.boresight_elevation + math.pi / 2)

    def element_offsets(self) -> np.ndarray:
        """(M, 3) offsets of every element relative to the reference element."""
        if self.kind == "ula":
            idx = np.arange(self.elements)[:, None]
            return idx * self.spacing * self._axis_h()[None, :]
        m_h, m_v = self.elements_hv
        ih, iv = np.divmod(np.arange(self.elements), m_v)
        return (ih[:, None] * self.spacing * self._axis_h()[None, :]
                + iv[:, None] * self.spacing_v * self._axis_v()[None, :])

    def element_position(self, p: int, reference: Vec3 | None = None) -> Vec3:
        """Position of the 1-based element p."""
        if not (1 <= p <= self.elements):
            raise IndexError(f"element index {p} out of range 1..{self.elements}")
        ref = reference if reference is not None else self.reference
        return Vec3.from_array(ref.as_array() + self.element_offsets()[p - 1])

    def element_positions(self, reference: Vec3 | None = None) -> np.ndarray:
        ref = reference if reference is not None else self.reference
        return ref.as_array()[None, :] + self.element_offsets()


def element_position(array: AntennaArray, p: int, reference: Vec3 | None = None) -> Vec3:
    """Module-level alias, 1-based element index."""
    return array.element_position(p, reference)
