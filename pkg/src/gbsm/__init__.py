"""Geometry-based stochastic channel simulator and statistics toolkit."""

from .geometry import (
    SPEED_OF_LIGHT,
    AntennaArray,
    MotionSegment,
    MotionState,
    Spherical,
    Vec3,
    advance,
    element_position,
    relative_spherical,
)
from .lsp import (
    BUILTIN_TABLES,
    FrozenGaussian,
    LspParam,
    LspSet,
    LspStatTable,
    SosField,
    lgds_mu,
    make_fields,
    sample_lsps,
    sos_field_eval,
)
from .clusters import (
    BirthDeathConfig,
    Cluster,
    ClusterGenConfig,
    ClusterSet,
    evolve_snapshot,
    expected_new,
    expected_new_uhst,
    normalize_powers,
    ray_delay,
    ray_power_unnormalized,
    spawn_cluster,
    survival_prob,
)
from .cir import (
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
    mix_k_factor,
    nlos_term,
    ris_cascade,
    vlc_gain,
)
from .realization import ChannelRealization, read_binary, write_binary, write_csv
from .scenarios import ScenarioConfig, apply_preset, load_config, load_preset, validate
from .simulate import LinkSimulator, simulate_multilink, simulate_realization, simulate_ris

__version__ = "0.1.0"
