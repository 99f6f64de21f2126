"""Scenario configuration schema, named simplification presets, and the
built-in parameter-set files.

Config files are JSON with angles in degrees; every field carries a
default so a minimal file (carrier + preset) loads to a complete,
validated configuration. Unknown keys are rejected. Simplification presets
force printed parameter lists onto a configuration and refuse to silently
override values the user set explicitly.
"""

from __future__ import annotations

import copy
import json
import math
from dataclasses import dataclass, field, fields
from pathlib import Path

from .clusters import BirthDeathConfig, ClusterGenConfig
from .geometry import SPEED_OF_LIGHT, AntennaArray, MotionSegment, MotionState, Vec3
from .lsp import BUILTIN_TABLES, LspParam, LspStatTable

PRESET_DIR = Path(__file__).parent / "presets"


class ConfigError(ValueError):
    pass


# --- nested blocks ----------------------------------------------------------

@dataclass
class ArrayConfig:
    kind: str = "ula"
    elements: int = 1
    elements_h: int = 1  # UPA only
    elements_v: int = 1
    spacing_wl: float | None = 0.5
    spacing_m: float | None = None
    spacing_v_wl: float | None = None
    spacing_v_m: float | None = None
    boresight_azimuth_deg: float = 0.0
    boresight_elevation_deg: float = 0.0


@dataclass
class SegmentConfig:
    start_s: float = 0.0
    speed_mps: float = 0.0
    accel_mps2: float = 0.0
    azimuth_deg: float = 0.0
    elevation_deg: float = 0.0


@dataclass
class MotionConfig:
    speed_mps: float = 0.0
    accel_mps2: float = 0.0
    azimuth_deg: float = 0.0
    elevation_deg: float = 0.0
    segments: list[SegmentConfig] = field(default_factory=list)


@dataclass
class LosConfig:
    enabled: bool = True


@dataclass
class LspConfig:
    table_preset: str | None = "thz_indoor"
    table: dict | None = None
    spatial_consistency: bool = True
    n_sinusoids: int = 100
    height_m: float | None = None
    link_elevation_deg: float | None = None


@dataclass
class BdFileConfig:
    enabled: bool = True
    lambda_g_per_m: float = 80.0
    lambda_r_per_m: float = 4.0
    dc_s_m: float = 30.0
    dc_a_m: float = 2.0
    dc_f_ghz: float = 0.0
    time_steps: int = 1
    freq_bins: int = 0
    array_axis: bool = True
    f_exponent: float = 1.0
    death_ramp: bool = False


@dataclass
class ClusterMotionConfig:
    speed_tx_side_mps: float = 0.0
    speed_rx_side_mps: float = 0.0
    elevation_deg: float = 0.0


@dataclass
class ClustersConfig:
    initial_count: int | None = None
    mean_rays: float = 20.0
    rays_fixed: bool = False
    sigma_xyz_tx_m: list[float] = field(default_factory=lambda: [3.0, 5.0, 4.0])
    sigma_xyz_rx_m: list[float] = field(default_factory=lambda: [3.0, 5.0, 4.0])
    mean_distance_tx_m: float = 20.0
    min_distance_tx_m: float = 10.0
    mean_distance_rx_m: float = 15.0
    min_distance_rx_m: float = 10.0
    tau_link_mean_ns: float = 44.1
    tau_link_min_ns: float = 27.3
    r_tau: float = 3.0
    gamma: float = 0.0
    shadowing_std_db: float = 3.0
    xi_std_db: float = 0.0
    xi_corr_elements: float = 10.0
    min_live: int = 1
    motion: ClusterMotionConfig = field(default_factory=ClusterMotionConfig)


@dataclass
class PolarizationConfig:
    enabled: bool = True
    mu: float = 1.0
    xpr_per_ray_std_db: float = 0.0


@dataclass
class FaradayConfig:
    enabled: bool = False


@dataclass
class LargeScaleConfig:
    pathloss_model: str = "none"  # none | fspl | logdist
    pathloss_exponent: float = 2.0
    pathloss_ref_db: float | None = None
    blockage_db: float = 0.0
    weather_db: float = 0.0
    absorption_db_per_km: float = 0.0
    shadowing: bool = False


@dataclass
class MaritimeConfig:
    enabled: bool = False
    s1: float | None = None  # fixed factors; None = distance-driven logistic
    s2: float | None = None
    switch_mid_m: float = 500.0
    switch_width_m: float = 100.0
    duct_height_m: float = 20.0
    pm_enabled: bool = False
    pm_wind_speed_mps: float = 10.0
    pm_components: int = 12


@dataclass
class IiotConfig:
    enabled: bool = False
    dmc_power_share: float = 0.3
    dmc_sigma_m: float = 1.0


@dataclass
class VlcConfig:
    enabled: bool = False
    lambertian_order: float = 1.0
    pd_area_m2: float = 1e-4
    fov_deg: float = 60.0
    pd_normal_azimuth_deg: float = 0.0
    pd_normal_elevation_deg: float = 90.0
    rot_azimuth_dps: float = 0.0
    rot_elevation_dps: float = 0.0
    nlos_power_share: float = 0.3


@dataclass
class UhstConfig:
    enabled: bool = False
    sigma_h_m: float = 0.0
    guideway_length_m: float = 900.0
    grazing_deg: float = 80.0


@dataclass
class RisConfig:
    enabled: bool = False
    elements: int = 64
    position_m: list[float] = field(default_factory=lambda: [50.0, 10.0, 5.0])
    spacing_wl: float = 0.5
    phi: str = "focus"  # focus | random | identity
    sublink_k_db: float = 10.0


@dataclass
class PatternConfig:
    kind: str = "isotropic"  # isotropic | cosine
    exponent: float = 1.0


@dataclass
class ScenarioConfig:
    carrier_ghz: float = 2.6
    schema_version: int = 1
    name: str = "custom"
    simplifications: list[str] = field(default_factory=list)
    bandwidth_mhz: float = 100.0
    frequency_bins: int = 1
    bin_spacing_mhz: float = 0.0
    snapshots: int = 100
    delta_t_ms: float = 1.0
    seed: int = 0
    n_tx: int = 1
    n_rx: int = 1
    tx_positions_m: list[list[float]] = field(default_factory=lambda: [[0.0, 0.0, 0.0]])
    rx_positions_m: list[list[float]] = field(default_factory=lambda: [[100.0, 0.0, 0.0]])
    tx_array: ArrayConfig = field(default_factory=ArrayConfig)
    rx_array: ArrayConfig = field(default_factory=ArrayConfig)
    tx_motion: MotionConfig = field(default_factory=MotionConfig)
    rx_motion: MotionConfig = field(default_factory=MotionConfig)
    los: LosConfig = field(default_factory=LosConfig)
    lsp: LspConfig = field(default_factory=LspConfig)
    birth_death: BdFileConfig = field(default_factory=BdFileConfig)
    clusters: ClustersConfig = field(default_factory=ClustersConfig)
    polarization: PolarizationConfig = field(default_factory=PolarizationConfig)
    faraday: FaradayConfig = field(default_factory=FaradayConfig)
    large_scale: LargeScaleConfig = field(default_factory=LargeScaleConfig)
    maritime: MaritimeConfig = field(default_factory=MaritimeConfig)
    iiot: IiotConfig = field(default_factory=IiotConfig)
    vlc: VlcConfig = field(default_factory=VlcConfig)
    uhst: UhstConfig = field(default_factory=UhstConfig)
    ris: RisConfig = field(default_factory=RisConfig)
    pattern: PatternConfig = field(default_factory=PatternConfig)
    explicit_keys: frozenset = field(default_factory=frozenset, compare=False, repr=False)

    # -- derived quantities --------------------------------------------------

    @property
    def fc_hz(self) -> float:
        return self.carrier_ghz * 1e9

    @property
    def wavelength_m(self) -> float:
        return SPEED_OF_LIGHT / self.fc_hz

    @property
    def delta_t_s(self) -> float:
        return self.delta_t_ms * 1e-3

    def bin_frequencies_ghz(self):
        """Frequency-bin carriers centered on the nominal carrier."""
        import numpy as np
        n = self.frequency_bins
        if n <= 1:
            return np.array([self.carrier_ghz])
        step = self.bin_spacing_mhz * 1e-3
        return self.carrier_ghz + step * (np.arange(n) - (n - 1) / 2.0)

    def _array_runtime(self, ac: ArrayConfig, ref: list[float]) -> AntennaArray:
        lam = self.wavelength_m
        spacing = ac.spacing_m if ac.spacing_m is not None else (ac.spacing_wl or 0.0) * lam
        if ac.kind == "upa":
            sp_v = ac.spacing_v_m if ac.spacing_v_m is not None else \
                (ac.spacing_v_wl * lam if ac.spacing_v_wl is not None else spacing)
            return AntennaArray(kind="upa", elements_hv=(ac.elements_h, ac.elements_v),
                                spacing=spacing, spacing_v=sp_v,
                                boresight_azimuth=math.radians(ac.boresight_azimuth_deg),
                                boresight_elevation=math.radians(ac.boresight_elevation_deg),
                                reference=Vec3(*ref))
        return AntennaArray(kind="ula", elements=ac.elements, spacing=spacing,
                            boresight_azimuth=math.radians(ac.boresight_azimuth_deg),
                            boresight_elevation=math.radians(ac.boresight_elevation_deg),
                            reference=Vec3(*ref))

    def tx_array_runtime(self, link_tx: int = 0) -> AntennaArray:
        return self._array_runtime(self.tx_array, self.tx_positions_m[link_tx])

    def rx_array_runtime(self, link_rx: int = 0) -> AntennaArray:
        return self._array_runtime(self.rx_array, self.rx_positions_m[link_rx])

    @staticmethod
    def _motion_runtime(mc: MotionConfig) -> MotionState:
        if mc.segments:
            segs = [MotionSegment(s.start_s, s.speed_mps, s.accel_mps2,
                                  math.radians(s.azimuth_deg), math.radians(s.elevation_deg))
                    for s in mc.segments]
            return MotionState(segments=segs)
        return MotionState(speed=mc.speed_mps, accel=mc.accel_mps2,
                           azimuth=math.radians(mc.azimuth_deg),
                           elevation=math.radians(mc.elevation_deg))

    def tx_motion_runtime(self) -> MotionState:
        return self._motion_runtime(self.tx_motion)

    def rx_motion_runtime(self) -> MotionState:
        return self._motion_runtime(self.rx_motion)

    def bd_runtime(self) -> BirthDeathConfig:
        b = self.birth_death
        return BirthDeathConfig(lambda_g=b.lambda_g_per_m, lambda_r=b.lambda_r_per_m,
                                dc_s=b.dc_s_m, dc_a=b.dc_a_m, dc_f=b.dc_f_ghz,
                                f_exponent=b.f_exponent, time_steps=b.time_steps,
                                freq_bins=b.freq_bins, array_axis=b.array_axis,
                                enabled=b.enabled, death_ramp=b.death_ramp)

    def cluster_gen_runtime(self) -> ClusterGenConfig:
        c = self.clusters
        return ClusterGenConfig(
            mean_rays=c.mean_rays, rays_fixed=c.rays_fixed,
            sigma_xyz_tx=tuple(c.sigma_xyz_tx_m), sigma_xyz_rx=tuple(c.sigma_xyz_rx_m),
            mean_dist_tx=c.mean_distance_tx_m, min_dist_tx=c.min_distance_tx_m,
            mean_dist_rx=c.mean_distance_rx_m, min_dist_rx=c.min_distance_rx_m,
            tau_link_mean_s=c.tau_link_mean_ns * 1e-9, tau_link_min_s=c.tau_link_min_ns * 1e-9,
            r_tau=c.r_tau, gamma=c.gamma, shadow_std_db=c.shadowing_std_db,
            xi_std_db=c.xi_std_db, xi_corr_elements=c.xi_corr_elements,
            speed_tx_side=c.motion.speed_tx_side_mps, speed_rx_side=c.motion.speed_rx_side_mps,
            motion_elevation=math.radians(c.motion.elevation_deg))

    def lsp_table_runtime(self) -> LspStatTable:
        if self.lsp.table is not None:
            params = {name: LspParam(**spec) for name, spec in self.lsp.table.items()}
            return LspStatTable(params=params)
        name = self.lsp.table_preset
        if name not in BUILTIN_TABLES:
            raise ConfigError(f"unknown statistic-table preset {name!r}")
        return BUILTIN_TABLES[name]

    def initial_cluster_count(self) -> int:
        if self.clusters.initial_count is not None:
            return self.clusters.initial_count
        b = self.birth_death
        if b.lambda_r_per_m > 0:
            return max(1, int(round(b.lambda_g_per_m / b.lambda_r_per_m)))
        raise ConfigError("initial cluster count required when lambda_R = 0")

    def large_scale_gains_db(self, distance_m: float) -> dict:
        ls = self.large_scale
        out = {"bl": ls.blockage_db, "we": ls.weather_db,
               "al": ls.absorption_db_per_km * distance_m / 1000.0}
        if ls.pathloss_model == "none":
            out["pl"] = 0.0
        elif ls.pathloss_model == "fspl":
            out["pl"] = 20.0 * math.log10(4.0 * math.pi * max(distance_m, 1.0) / self.wavelength_m)
        elif ls.pathloss_model == "logdist":
            ref = ls.pathloss_ref_db
            if ref is None:
                ref = 20.0 * math.log10(4.0 * math.pi / self.wavelength_m)
            out["pl"] = ref + 10.0 * ls.pathloss_exponent * math.log10(max(distance_m, 1.0))
        else:
            raise ConfigError(f"unknown path loss model {ls.pathloss_model!r}")
        return out

    def large_scale_gains(self, distance_m: float, sh_db: float = 0.0):
        """Linear power gains for the configured hooks at a link distance.

        Shadowing comes from the sampled large-scale parameters; pass its dB
        value when the shadowing switch is on.
        """
        from .cir import LargeScaleGains
        db = self.large_scale_gains_db(distance_m)
        sh = 10.0 ** (sh_db / 10.0) if self.large_scale.shadowing else 1.0
        return LargeScaleGains(pl=10.0 ** (-db["pl"] / 10.0), sh=sh,
                               bl=10.0 ** (-db["bl"] / 10.0),
                               we=10.0 ** (-db["we"] / 10.0),
                               al=10.0 ** (-db["al"] / 10.0))

    def to_dict(self) -> dict:
        return _to_dict(self)


def _to_dict(obj):
    if isinstance(obj, (int, float, str, bool)) or obj is None:
        return obj
    if isinstance(obj, (list, tuple)):
        return [_to_dict(v) for v in obj]
    if isinstance(obj, dict):
        return {k: _to_dict(v) for k, v in obj.items()}
    out = {}
    for f in fields(obj):
        if f.name == "explicit_keys":
            continue
        out[f.name] = _to_dict(getattr(obj, f.name))
    return out


# --- loading ----------------------------------------------------------------

_BLOCK_TYPES = {
    "tx_array": ArrayConfig, "rx_array": ArrayConfig,
    "tx_motion": MotionConfig, "rx_motion": MotionConfig,
    "los": LosConfig, "lsp": LspConfig, "birth_death": BdFileConfig,
    "clusters": ClustersConfig, "polarization": PolarizationConfig,
    "faraday": FaradayConfig, "large_scale": LargeScaleConfig,
    "maritime": MaritimeConfig, "iiot": IiotConfig, "vlc": VlcConfig,
    "uhst": UhstConfig, "ris": RisConfig, "pattern": PatternConfig,
}
_NESTED = {"motion": ClusterMotionConfig}


def _build(cls, data: dict, context: str, errors: list):
    allowed = {f.name for f in fields(cls)} - {"explicit_keys"}
    kwargs = {}
    for key, value in data.items():
        if key not in allowed:
            errors.append(f"{context}: unknown key {key!r}")
            continue
        if key in _BLOCK_TYPES and isinstance(value, dict):
            kwargs[key] = _build(_BLOCK_TYPES[key], value, f"{context}.{key}", errors)
        elif key in _NESTED and isinstance(value, dict):
            kwargs[key] = _build(_NESTED[key], value, f"{context}.{key}", errors)
        elif key == "segments" and isinstance(value, list):
            kwargs[key] = [_build(SegmentConfig, s, f"{context}.segments[{i}]", errors)
                           for i, s in enumerate(value)]
        else:
            kwargs[key] = value
    try:
        return cls(**kwargs)
    except (TypeError, ValueError) as exc:
        errors.append(f"{context}: {exc}")
        return cls()


def _flatten_keys(data: dict, prefix: str = "") -> set:
    keys = set()
    for k, v in data.items():
        path = f"{prefix}{k}"
        keys.add(path)
        if isinstance(v, dict):
            keys |= _flatten_keys(v, path + ".")
    return keys


def _get_path(data: dict, path: str):
    node = data
    for part in path.split("."):
        if not isinstance(node, dict) or part not in node:
            return None
        node = node[part]
    return node


def _set_path(data: dict, path: str, value) -> None:
    parts = path.split(".")
    node = data
    for part in parts[:-1]:
        node = node.setdefault(part, {})
    node[parts[-1]] = value


def loads(data: dict) -> ScenarioConfig:
    """Build a validated ScenarioConfig from a raw (already parsed) dict."""
    raw = copy.deepcopy(data)
    explicit = _flatten_keys(raw)
    simplifications = raw.get("simplifications", [])
    if isinstance(simplifications, str):
        simplifications = [simplifications]
        raw["simplifications"] = simplifications
    for preset in simplifications:
        _force_preset(raw, preset, explicit)
    errors: list[str] = []
    cfg = _build(ScenarioConfig, raw, "config", errors)
    cfg.explicit_keys = frozenset(explicit)
    errors += validate(cfg)
    if errors:
        raise ConfigError("; ".join(errors))
    return cfg


def load_config(path) -> ScenarioConfig:
    """Parse and validate a scenario file; unknown keys are errors."""
    try:
        with open(path) as fh:
            raw = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}:{exc.lineno}: {exc.msg}") from exc
    return loads(raw)


def serialize(cfg: ScenarioConfig, path=None) -> str:
    text = json.dumps(cfg.to_dict(), indent=2, sort_keys=True)
    if path is not None:
        Path(path).write_text(text + "\n")
    return text


# --- validation -------------------------------------------------------------

def validate(cfg: ScenarioConfig) -> list[str]:
    """All invariant checks, aggregated (not first-failure)."""
    errs: list[str] = []
    if cfg.carrier_ghz <= 0:
        errs.append("carrier frequency must be positive")
    if cfg.bandwidth_mhz <= 0:
        errs.append("bandwidth must be positive")
    if cfg.snapshots < 1:
        errs.append("need at least one snapshot")
    if cfg.delta_t_ms <= 0:
        errs.append("sampling interval must be positive")
    if cfg.frequency_bins < 1:
        errs.append("need at least one frequency bin")
    if cfg.frequency_bins > 1 and cfg.bin_spacing_mhz <= 0:
        errs.append("multi-bin runs need a positive bin spacing")
    if cfg.n_tx < 1 or cfg.n_rx < 1:
        errs.append("link counts must be >= 1")
    if len(cfg.tx_positions_m) != cfg.n_tx:
        errs.append(f"tx_positions_m must list {cfg.n_tx} positions")
    if len(cfg.rx_positions_m) != cfg.n_rx:
        errs.append(f"rx_positions_m must list {cfg.n_rx} positions")
    for label, ac in (("tx_array", cfg.tx_array), ("rx_array", cfg.rx_array)):
        if ac.kind not in ("ula", "upa"):
            errs.append(f"{label}: unknown kind {ac.kind!r}")
        n = ac.elements_h * ac.elements_v if ac.kind == "upa" else ac.elements
        if n < 1:
            errs.append(f"{label}: element count must be >= 1")
        spacing = ac.spacing_m if ac.spacing_m is not None else ac.spacing_wl
        if n > 1 and (spacing is None or spacing <= 0):
            errs.append(f"{label}: spacing must be positive")
    for label, mc in (("tx_motion", cfg.tx_motion), ("rx_motion", cfg.rx_motion)):
        if mc.speed_mps < 0:
            errs.append(f"{label}: speed must be nonnegative")

    b = cfg.birth_death
    if b.lambda_g_per_m < 0 or b.lambda_r_per_m < 0:
        errs.append("birth-death rates must be nonnegative")
    if b.enabled and b.lambda_r_per_m == 0 and (b.time_steps > 0 or b.freq_bins > 0):
        errs.append("mean birth count is undefined at lambda_R = 0; disable birth_death")
    speeds = [cfg.tx_motion.speed_mps, cfg.rx_motion.speed_mps] + \
        [s.speed_mps for s in cfg.tx_motion.segments + cfg.rx_motion.segments]
    if b.enabled and b.time_steps > 0 and max(speeds) > 0 and b.dc_s_m <= 0:
        errs.append("moving endpoints with time-axis birth-death need a positive dc_s_m")
    m_t = cfg.tx_array.elements_h * cfg.tx_array.elements_v if cfg.tx_array.kind == "upa" \
        else cfg.tx_array.elements
    m_r = cfg.rx_array.elements_h * cfg.rx_array.elements_v if cfg.rx_array.kind == "upa" \
        else cfg.rx_array.elements
    if b.enabled and b.array_axis and max(m_t, m_r) > 1 and b.dc_a_m <= 0 \
            and b.lambda_r_per_m > 0:
        errs.append("multi-element arrays with array-axis birth-death need a positive dc_a_m")
    if b.enabled and b.freq_bins > 0 and cfg.frequency_bins > 1 and b.dc_f_ghz <= 0:
        errs.append("frequency-axis birth-death needs a positive dc_f_ghz")

    c = cfg.clusters
    if c.mean_rays < 1:
        errs.append("mean ray count must be >= 1")
    if c.r_tau < 1:
        errs.append("delay proportionality factor must be >= 1")
    if c.tau_link_min_ns < 0 or c.tau_link_mean_ns < c.tau_link_min_ns:
        errs.append("virtual-link delay needs 0 <= min <= mean")
    if any(s < 0 for s in c.sigma_xyz_tx_m + c.sigma_xyz_rx_m):
        errs.append("ellipsoid stds must be nonnegative")
    if c.shadowing_std_db < 0 or c.xi_std_db < 0:
        errs.append("shadowing and power-variation stds must be nonnegative")
    if c.initial_count is None and b.lambda_r_per_m == 0:
        errs.append("initial cluster count required when lambda_R = 0")

    if cfg.polarization.enabled and cfg.polarization.mu <= 0:
        errs.append("co-polar imbalance must be positive")
    if cfg.maritime.enabled:
        s1, s2 = cfg.maritime.s1, cfg.maritime.s2
        if (s1 is None) != (s2 is None):
            errs.append("maritime: set both power control factors or neither")
        elif s1 is not None and abs(s1 + s2 - 1.0) > 1e-9:
            errs.append("maritime: power control factors must sum to one")
        if cfg.maritime.switch_width_m <= 0:
            errs.append("maritime: switch width must be positive")
    if cfg.iiot.enabled and not (0.0 <= cfg.iiot.dmc_power_share <= 1.0):
        errs.append("dense-multipath power share must lie in [0, 1]")
    if cfg.iiot.enabled and cfg.iiot.dmc_sigma_m <= 0:
        errs.append("dense-multipath spread must be positive")
    if cfg.vlc.enabled:
        if cfg.polarization.enabled:
            errs.append("optical runs exclude the polarization block")
        if cfg.faraday.enabled:
            errs.append("optical runs exclude polarization-plane rotation")
        if cfg.vlc.pd_area_m2 <= 0 or not (0 < cfg.vlc.fov_deg <= 180):
            errs.append("photodetector area and field of view must be valid")
    if cfg.uhst.enabled and cfg.uhst.guideway_length_m <= 0:
        errs.append("guideway length must be positive")
    if cfg.uhst.enabled and cfg.uhst.sigma_h_m < 0:
        errs.append("wall roughness must be nonnegative")
    if cfg.ris.enabled:
        if cfg.ris.elements < 1:
            errs.append("surface element count must be >= 1")
        if cfg.ris.phi not in ("focus", "random", "identity"):
            errs.append(f"unknown reflection-phase spec {cfg.ris.phi!r}")
        if len(cfg.ris.position_m) != 3:
            errs.append("surface position must be an [x, y, z] triple")
    if cfg.pattern.kind not in ("isotropic", "cosine"):
        errs.append(f"unknown antenna pattern kind {cfg.pattern.kind!r}")
    if cfg.lsp.table is None and cfg.lsp.table_preset not in BUILTIN_TABLES:
        errs.append(f"unknown statistic-table preset {cfg.lsp.table_preset!r}")
    if cfg.lsp.table is not None:
        try:
            cfg.lsp_table_runtime()
        except (TypeError, ValueError) as exc:
            errs.append(f"lsp.table: {exc}")
    return errs


# --- simplification presets (printed parameter lists) ------------------------

_SINGLE_LINK = [("n_tx", 1), ("n_rx", 1)]
_SINGLE_FREQ = [("frequency_bins", 1)]

SIMPLIFICATIONS: dict[str, list[tuple[str, object]]] = {
    "single_link": list(_SINGLE_LINK),
    "single_frequency": list(_SINGLE_FREQ),
    "sub6ghz_small_bw": [
        ("large_scale.absorption_db_per_km", 0.0),
        ("large_scale.blockage_db", 0.0),
        ("clusters.rays_fixed", True),
        ("clusters.mean_rays", 1),
        ("birth_death.freq_bins", 0),
        ("clusters.gamma", 0.0),
    ],
    "mmwave_thz_ultra_massive_mimo": _SINGLE_LINK + _SINGLE_FREQ + [
        ("large_scale.weather_db", 0.0),
        ("polarization.mu", 1.0),
        ("faraday.enabled", False),
        ("clusters.rays_fixed", True),
        ("lsp.spatial_consistency", False),
    ],
    "indoor_vlc": _SINGLE_LINK + _SINGLE_FREQ + [
        ("tx_array.kind", "upa"),
        ("tx_motion.speed_mps", 0.0),
        ("large_scale.weather_db", 0.0),
        ("large_scale.absorption_db_per_km", 0.0),
        ("vlc.enabled", True),
        ("polarization.enabled", False),
        ("faraday.enabled", False),
        ("clusters.rays_fixed", True),
        ("birth_death.freq_bins", 0),
        ("birth_death.time_steps", 0),
    ],
    "leo": _SINGLE_LINK + _SINGLE_FREQ + [
        ("large_scale.absorption_db_per_km", 0.0),
        ("large_scale.blockage_db", 0.0),
        ("polarization.mu", 1.0),
        ("clusters.rays_fixed", True),
        ("birth_death.freq_bins", 0),
        ("clusters.gamma", 0.0),
        ("clusters.xi_std_db", 0.0),
    ],
    "uav_to_ground": _SINGLE_LINK + _SINGLE_FREQ + [
        ("large_scale.absorption_db_per_km", 0.0),
        ("large_scale.blockage_db", 0.0),
        ("large_scale.weather_db", 0.0),
        ("polarization.mu", 1.0),
        ("faraday.enabled", False),
        ("clusters.rays_fixed", True),
        ("birth_death.freq_bins", 0),
        ("clusters.gamma", 0.0),
        ("clusters.xi_std_db", 0.0),
    ],
    "maritime_ship_to_ship": _SINGLE_LINK + _SINGLE_FREQ + [
        ("large_scale.absorption_db_per_km", 0.0),
        ("large_scale.blockage_db", 0.0),
        ("large_scale.weather_db", 0.0),
        ("polarization.mu", 1.0),
        ("faraday.enabled", False),
        ("clusters.rays_fixed", True),
        ("maritime.enabled", True),
        ("birth_death.freq_bins", 0),
        ("clusters.gamma", 0.0),
        ("clusters.xi_std_db", 0.0),
    ],
    "v2v": _SINGLE_LINK + _SINGLE_FREQ + [
        ("large_scale.absorption_db_per_km", 0.0),
        ("large_scale.blockage_db", 0.0),
        ("large_scale.weather_db", 0.0),
        ("polarization.mu", 1.0),
        ("faraday.enabled", False),
        ("clusters.rays_fixed", True),
        ("birth_death.freq_bins", 0),
        ("clusters.gamma", 0.0),
        ("clusters.xi_std_db", 0.0),
    ],
    "mmwave_uhst": _SINGLE_LINK + _SINGLE_FREQ + [
        ("uhst.enabled", True),
        ("large_scale.absorption_db_per_km", 0.0),
        ("large_scale.blockage_db", 0.0),
        ("large_scale.weather_db", 0.0),
        ("polarization.mu", 1.0),
        ("faraday.enabled", False),
        ("clusters.rays_fixed", True),
        ("clusters.motion.speed_tx_side_mps", 0.0),
        ("clusters.motion.speed_rx_side_mps", 0.0),
        ("tx_motion.speed_mps", 0.0),
        ("birth_death.freq_bins", 0),
        ("clusters.gamma", 0.0),
        ("clusters.xi_std_db", 0.0),
    ],
    "ultra_massive_mimo": _SINGLE_FREQ + [
        ("large_scale.weather_db", 0.0),
        ("polarization.mu", 1.0),
        ("faraday.enabled", False),
        ("clusters.rays_fixed", True),
    ],
    "ris": _SINGLE_LINK + _SINGLE_FREQ + [
        ("ris.enabled", True),
        ("large_scale.absorption_db_per_km", 0.0),
        ("large_scale.blockage_db", 0.0),
        ("large_scale.weather_db", 0.0),
        ("polarization.mu", 1.0),
        ("faraday.enabled", False),
        ("clusters.rays_fixed", True),
        ("birth_death.freq_bins", 0),
        ("birth_death.time_steps", 0),
        ("clusters.gamma", 0.0),
    ],
    "iiot": _SINGLE_LINK + _SINGLE_FREQ + [
        ("iiot.enabled", True),
        ("large_scale.weather_db", 0.0),
        ("polarization.mu", 1.0),
        ("faraday.enabled", False),
        ("birth_death.freq_bins", 0),
        ("clusters.gamma", 0.0),
    ],
    "b5gcm": _SINGLE_LINK + _SINGLE_FREQ + [
        ("large_scale.weather_db", 0.0),
        ("faraday.enabled", False),
        ("clusters.rays_fixed", True),
        ("birth_death.freq_bins", 0),
        ("lsp.spatial_consistency", False),
    ],
}


def _force_preset(raw: dict, name: str, explicit: set) -> None:
    if name not in SIMPLIFICATIONS:
        raise ConfigError(f"unknown simplification preset {name!r}")
    conflicts = []
    for path, value in SIMPLIFICATIONS[name]:
        if path in explicit and _get_path(raw, path) != value:
            conflicts.append(f"{path}={_get_path(raw, path)!r} (preset forces {value!r})")
    if conflicts:
        raise ConfigError(f"simplification {name!r} conflicts with explicit settings: "
                          + ", ".join(conflicts))
    for path, value in SIMPLIFICATIONS[name]:
        _set_path(raw, path, value)
        # the single-link reduction keeps the first link's endpoints
        if path == "n_tx" and value == 1 and len(raw.get("tx_positions_m", [])) > 1:
            raw["tx_positions_m"] = raw["tx_positions_m"][:1]
        if path == "n_rx" and value == 1 and len(raw.get("rx_positions_m", [])) > 1:
            raw["rx_positions_m"] = raw["rx_positions_m"][:1]


def apply_preset(cfg: ScenarioConfig, name: str) -> ScenarioConfig:
    """Force one simplification's printed parameter list onto a config."""
    raw = cfg.to_dict()
    explicit = set(cfg.explicit_keys)
    _force_preset(raw, name, explicit)
    if name not in raw.get("simplifications", []):
        raw.setdefault("simplifications", []).append(name)
    # forced values are no longer user-explicit
    fresh = loads({k: v for k, v in raw.items() if k != "simplifications"}
                  | {"simplifications": []})
    fresh.simplifications = raw["simplifications"]
    fresh.explicit_keys = cfg.explicit_keys
    return fresh


def preset_path(name: str) -> Path:
    return PRESET_DIR / f"{name}.cfg"


def load_preset(name: str) -> ScenarioConfig:
    """Load one of the shipped full parameter-set files."""
    path = preset_path(name)
    if not path.exists():
        known = sorted(p.stem for p in PRESET_DIR.glob("*.cfg"))
        raise ConfigError(f"unknown scenario preset {name!r}; shipped presets: {known}")
    return load_config(path)
