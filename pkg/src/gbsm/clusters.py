"""Cluster population lifecycle.

Birth-death along the space (array), time, and frequency axes; ellipsoid
Gaussian ray placement around exponentially drawn cluster centers; virtual
link delays; space-time-frequency varying ray powers; per-snapshot geometric
evolution of every scatterer.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .geometry import SPEED_OF_LIGHT, unit_vector
from .lsp import LspSet, SosField
from .rng import substream


class ConfigurationError(ValueError):
    pass


# --- birth-death process ----------------------------------------------------

@dataclass
class BirthDeathConfig:
    """Rates, coherence scales, and grid strides of the birth-death process.

    time_steps / freq_bins are strides in channel samples / frequency bins
    (integer multiples of the channel sampling grid); 0 disables that axis.
    The frequency displacement F is monotone with F(0) = 0; the default is
    linear, the exponent is configurable.
    """

    lambda_g: float = 80.0  # generation rate, 1/m
    lambda_r: float = 4.0  # recombination rate, 1/m
    dc_s: float = 30.0  # coherence scale on the time axis, m
    dc_a: float = 2.0  # coherence scale on the array axis, m
    dc_f: float = 0.0  # coherence scale on the frequency axis, GHz
    f_exponent: float = 1.0
    time_steps: int = 1
    freq_bins: int = 0
    array_axis: bool = True
    enabled: bool = True
    death_ramp: bool = False  # dying clusters fade linearly over one stride

    def __post_init__(self):
        if self.lambda_g < 0 or self.lambda_r < 0:
            raise ConfigurationError("birth-death rates must be nonnegative")
        if self.f_exponent <= 0:
            raise ConfigurationError("frequency displacement exponent must be positive")
        if self.time_steps < 0 or self.freq_bins < 0:
            raise ConfigurationError("grid strides must be nonnegative")

    def freq_displacement(self, df_ghz: float) -> float:
        if df_ghz < 0:
            raise ValueError("frequency displacement must be nonnegative")
        if df_ghz == 0.0:
            return 0.0
        return df_ghz ** self.f_exponent


def _combined_eps(eps1: float, eps2: float, alpha_a: float, beta_a: float) -> float:
    return math.sqrt(max(0.0, eps1 * eps1 + eps2 * eps2
                         + 2.0 * eps1 * eps2 * math.cos(alpha_a - beta_a)))


def _ratio(displacement: float, scale: float, what: str) -> float:
    if displacement == 0.0:
        return 0.0
    if scale <= 0.0:
        raise ConfigurationError(f"{what} displacement is nonzero but its coherence scale is not positive")
    return displacement / scale


def survival_prob(cfg: BirthDeathConfig, delta_p: float = 0.0, delta_q: float = 0.0,
                  dt_bd: float = 0.0, df_bd_ghz: float = 0.0,
                  v_t: float = 0.0, alpha_a_t: float = 0.0, beta_a_t: float = 0.0,
                  beta_e_t: float = 0.0,
                  v_r: float = 0.0, alpha_a_r: float = 0.0, beta_a_r: float = 0.0,
                  beta_e_r: float = 0.0) -> float:
    """Cluster survival probability over one birth-death step.

    Product of the Tx-side, Rx-side, and frequency-axis terms. Each side
    combines the array displacement eps1 = delta * cos(beta_E) / Dc_A with
    the motion displacement eps2 = v * dt_BD / Dc_S under the angle between
    travel and array boresight.
    """
    eps1_t = _ratio(delta_p * math.cos(beta_e_t), cfg.dc_a, "Tx array")
    eps2_t = _ratio(v_t * dt_bd, cfg.dc_s, "Tx time")
    eps1_r = _ratio(delta_q * math.cos(beta_e_r), cfg.dc_a, "Rx array")
    eps2_r = _ratio(v_r * dt_bd, cfg.dc_s, "Rx time")
    p_t = math.exp(-cfg.lambda_r * _combined_eps(eps1_t, eps2_t, alpha_a_t, beta_a_t))
    p_r = math.exp(-cfg.lambda_r * _combined_eps(eps1_r, eps2_r, alpha_a_r, beta_a_r))
    f_disp = cfg.freq_displacement(df_bd_ghz)
    p_f = math.exp(-cfg.lambda_r * _ratio(f_disp, cfg.dc_f, "frequency"))
    return p_t * p_r * p_f


def expected_new(cfg: BirthDeathConfig, p_surv: float) -> float:
    """Mean count of newly generated clusters, (lambda_G/lambda_R)(1 - P_surv)."""
    if cfg.lambda_r == 0.0:
        raise ConfigurationError("expected new-cluster count is undefined at lambda_R = 0")
    return (cfg.lambda_g / cfg.lambda_r) * (1.0 - p_surv)


def rayleigh_roughness_fn(wavelength_m: float, grazing_deg: float = 80.0):
    """Scattering-coefficient hook: rho_s(sigma_h) = exp(-8 (pi sigma_h cos(theta_i) / lambda)^2)."""
    cos_i = math.cos(math.radians(grazing_deg))

    def rho_s(sigma_h: float) -> float:
        return math.exp(-8.0 * (math.pi * sigma_h * cos_i / wavelength_m) ** 2)

    return rho_s


def expected_new_uhst(base: float, d_qp: float, d_total: float, sigma_h: float,
                      rho_s_fn) -> float:
    """Waveguide-scaled mean birth count for enclosed-track scenarios.

    base * (1 - D_qp/D) * rho_s(sigma_h)/rho_s(0), clamped at zero.
    """
    if d_total <= 0.0:
        raise ConfigurationError("total guideway length D must be positive")
    if not (0.0 <= d_qp <= d_total):
        raise ValueError("link distance must lie in [0, D]")
    rho0 = rho_s_fn(0.0)
    if rho0 <= 0.0:
        raise ValueError("rho_s(0) must be positive")
    ratio = rho_s_fn(sigma_h) / rho0
    return max(0.0, base * (1.0 - d_qp / d_total) * ratio)


# --- cluster generation -----------------------------------------------------

@dataclass
class ClusterGenConfig:
    """Knobs for drawing a fresh cluster pair."""

    mean_rays: float = 20.0
    rays_fixed: bool = False
    sigma_xyz_tx: tuple[float, float, float] = (3.0, 5.0, 4.0)
    sigma_xyz_rx: tuple[float, float, float] = (3.0, 5.0, 4.0)
    mean_dist_tx: float = 20.0
    min_dist_tx: float = 10.0
    mean_dist_rx: float = 15.0
    min_dist_rx: float = 10.0
    tau_link_mean_s: float = 44.1e-9
    tau_link_min_s: float = 27.3e-9
    r_tau: float = 3.0
    gamma: float = 0.0
    shadow_std_db: float = 3.0
    xi_std_db: float = 0.0
    xi_corr_elements: float = 10.0
    speed_tx_side: float = 0.0  # v^{A_n}, m/s
    speed_rx_side: float = 0.0  # v^{Z_n}, m/s
    motion_elevation: float = 0.0  # radians; travel azimuth is drawn per cluster
    reflectance_range: tuple[float, float] = (0.4, 0.9)  # optical-band NLoS hook

    def __post_init__(self):
        if self.mean_rays < 1:
            raise ConfigurationError("mean ray count must be >= 1")
        if self.r_tau < 1.0:
            raise ConfigurationError("delay proportionality factor must be >= 1")
        if self.tau_link_mean_s < self.tau_link_min_s or self.tau_link_min_s < 0:
            raise ConfigurationError("virtual-link delay needs 0 <= min <= mean")
        for s in (*self.sigma_xyz_tx, *self.sigma_xyz_rx):
            if s < 0:
                raise ConfigurationError("ellipsoid stds must be nonnegative")
        if self.min_dist_tx < 0 or self.min_dist_rx < 0:
            raise ConfigurationError("minimum center distances must be nonnegative")


@dataclass
class Cluster:
    """One cluster pair with per-ray scatterers at both bounces.

    The virtual-link delay components are frozen at birth; evolution moves
    the scatterers and recomputes bounce distances only.
    """

    id: int
    birth_snapshot: int
    pos_a: np.ndarray  # (m, 3) first-bounce scatterers
    pos_z: np.ndarray  # (m, 3) last-bounce scatterers
    vel_a: np.ndarray  # (3,)
    vel_z: np.ndarray  # (3,)
    center_a: np.ndarray  # (3,)
    center_z: np.ndarray  # (3,)
    tau_tilde: np.ndarray  # (m,) virtual-link delay, seconds
    tau_link: float  # seconds, the non-geometric part of tau_tilde
    z_shadow_db: float
    gamma: np.ndarray  # (m,)
    kappa: np.ndarray  # (m,) linear XPR per ray
    pol_phases: np.ndarray  # (m, 4) theta VV/VH/HV/HH in (0, 2pi]
    vis_tx: np.ndarray  # (M_T,) bool
    vis_rx: np.ndarray  # (M_R,) bool
    vis_freq: np.ndarray  # (F,) bool
    xi_gain: np.ndarray | None  # (M_R, M_T) linear, None when disabled
    reflectance: float = 1.0
    ray_group: np.ndarray | None = None  # 0 = specular, 1 = dense companion
    ramp_start: int | None = None  # snapshot index where the death fade began

    def ramp_weight(self, t_index: int, stride: int) -> float:
        """Linear fade toward removal; 1.0 for clusters not dying."""
        if self.ramp_start is None:
            return 1.0
        if stride <= 0:
            return 0.0
        return max(0.0, 1.0 - (t_index - self.ramp_start) / stride)

    def __post_init__(self):
        if self.ray_group is None:
            self.ray_group = np.zeros(self.pos_a.shape[0], dtype=int)

    @property
    def n_rays(self) -> int:
        return self.pos_a.shape[0]

    def advance(self, dt: float) -> None:
        self.pos_a = self.pos_a + self.vel_a * dt
        self.pos_z = self.pos_z + self.vel_z * dt
        self.center_a = self.center_a + self.vel_a * dt
        self.center_z = self.center_z + self.vel_z * dt


def _draw_min_exponential(rng: np.random.Generator, mean: float, minimum: float,
                          size: int | None = None) -> np.ndarray | float:
    """Exponential(mean) rejection-resampled until >= minimum."""
    if mean <= 0:
        return np.full(size, minimum) if size is not None else minimum
    n = size if size is not None else 1
    out = np.empty(n)
    need = np.ones(n, dtype=bool)
    while need.any():
        draw = rng.exponential(mean, int(need.sum()))
        out[need] = draw
        need = out < minimum
    return out if size is not None else float(out[0])


def _axis_visibility(rng: np.random.Generator, n: int, step_prob: float) -> np.ndarray:
    """Contiguous visibility interval grown from a uniform anchor element.

    Death chains run outward with the per-step survival probability, so the
    visible region is always one contiguous run.
    """
    vis = np.zeros(n, dtype=bool)
    if n == 0:
        return vis
    anchor = int(rng.integers(n))
    vis[anchor] = True
    if step_prob >= 1.0:
        vis[:] = True
        return vis
    for i in range(anchor + 1, n):
        if rng.random() < step_prob:
            vis[i] = True
        else:
            break
    for i in range(anchor - 1, -1, -1):
        if rng.random() < step_prob:
            vis[i] = True
        else:
            break
    return vis


@dataclass
class SpawnContext:
    """Everything a fresh cluster needs besides its RNG stream."""

    gen: ClusterGenConfig
    bd: BirthDeathConfig
    tx_ref: np.ndarray  # (3,) reference element position
    rx_ref: np.ndarray
    tx_boresight: tuple[float, float]  # (azimuth, elevation) radians
    rx_boresight: tuple[float, float]
    m_t: int = 1
    m_r: int = 1
    n_freq: int = 1
    spacing_t: float = 0.0
    spacing_r: float = 0.0
    bin_spacing_ghz: float = 0.0
    xpr_per_ray_std_db: float = 0.0
    dmc_share: float = 0.0  # dense-multipath power share; 0 spawns no companions
    dmc_sigma: float = 1.0  # companion scatterer spread around each parent ray, m


def _array_step_prob(bd: BirthDeathConfig, spacing: float, beta_e: float) -> float:
    if not (bd.enabled and bd.array_axis) or spacing <= 0.0:
        return 1.0
    disp = spacing * abs(math.cos(beta_e))
    if disp == 0.0:
        return 1.0
    if bd.dc_a <= 0.0:
        raise ConfigurationError("array-axis birth-death needs a positive Dc_A")
    return math.exp(-bd.lambda_r * disp / bd.dc_a)


def _freq_group_prob(bd: BirthDeathConfig, bin_spacing_ghz: float) -> tuple[float, int]:
    if not bd.enabled or bd.freq_bins <= 0 or bin_spacing_ghz <= 0.0:
        return 1.0, 0
    df_bd = bd.freq_bins * bin_spacing_ghz
    disp = bd.freq_displacement(df_bd)
    if disp == 0.0:
        return 1.0, bd.freq_bins
    if bd.dc_f <= 0.0:
        raise ConfigurationError("frequency-axis birth-death needs a positive Dc_F")
    return math.exp(-bd.lambda_r * disp / bd.dc_f), bd.freq_bins


def spawn_cluster(lsps: LspSet, ctx: SpawnContext, seed: int, cluster_id: int,
                  birth_snapshot: int = 0) -> Cluster:
    """Draw one cluster pair: centers, rays, delays, shadowing, visibility."""
    gen = ctx.gen
    rng = substream(seed, "cluster", cluster_id)

    d_t = _draw_min_exponential(rng, gen.mean_dist_tx, gen.min_dist_tx)
    d_r = _draw_min_exponential(rng, gen.mean_dist_rx, gen.min_dist_rx)
    az_t = math.radians(lsps.asd_deg * rng.normal()) + ctx.tx_boresight[0]
    el_t = math.radians(lsps.esd_deg * rng.normal()) + ctx.tx_boresight[1]
    az_r = math.radians(lsps.asa_deg * rng.normal()) + ctx.rx_boresight[0]
    el_r = math.radians(lsps.esa_deg * rng.normal()) + ctx.rx_boresight[1]
    center_a = ctx.tx_ref + d_t * unit_vector(az_t, el_t)
    center_z = ctx.rx_ref + d_r * unit_vector(az_r, el_r)

    if gen.rays_fixed:
        m = max(1, int(round(gen.mean_rays)))
    else:
        m = max(1, int(rng.poisson(gen.mean_rays)))
    pos_a = center_a + rng.normal(size=(m, 3)) * np.asarray(gen.sigma_xyz_tx)
    pos_z = center_z + rng.normal(size=(m, 3)) * np.asarray(gen.sigma_xyz_rx)

    ray_group = np.zeros(m, dtype=int)
    if ctx.dmc_share > 0.0:
        # dense companions scatter tightly around each specular-ray scatterer
        pos_a = np.concatenate([pos_a, pos_a + rng.normal(size=(m, 3)) * ctx.dmc_sigma])
        pos_z = np.concatenate([pos_z, pos_z + rng.normal(size=(m, 3)) * ctx.dmc_sigma])
        ray_group = np.concatenate([ray_group, np.ones(m, dtype=int)])
        m *= 2

    tau_link = gen.tau_link_min_s + rng.exponential(max(gen.tau_link_mean_s - gen.tau_link_min_s, 0.0))
    d_link = np.linalg.norm(pos_a - pos_z, axis=1)
    tau_tilde = d_link / SPEED_OF_LIGHT + tau_link

    z_db = rng.normal() * gen.shadow_std_db
    kappa_db = lsps.xpr_db + rng.normal(size=m) * ctx.xpr_per_ray_std_db
    kappa = 10.0 ** (kappa_db / 10.0)
    # initial phases uniform over (0, 2pi]
    pol_phases = 2.0 * math.pi - rng.uniform(0.0, 2.0 * math.pi, size=(m, 4))

    vel_a = gen.speed_tx_side * unit_vector(rng.uniform(-math.pi, math.pi), gen.motion_elevation)
    vel_z = gen.speed_rx_side * unit_vector(rng.uniform(-math.pi, math.pi), gen.motion_elevation)

    step_t = 1.0 if ctx.m_t <= 1 else _array_step_prob(ctx.bd, ctx.spacing_t, ctx.tx_boresight[1])
    step_r = 1.0 if ctx.m_r <= 1 else _array_step_prob(ctx.bd, ctx.spacing_r, ctx.rx_boresight[1])
    vis_tx = _axis_visibility(rng, ctx.m_t, step_t)
    vis_rx = _axis_visibility(rng, ctx.m_r, step_r)
    group_prob, stride = _freq_group_prob(ctx.bd, ctx.bin_spacing_ghz)
    if ctx.n_freq <= 1 or group_prob >= 1.0:
        vis_freq = np.ones(ctx.n_freq, dtype=bool)
    else:
        groups = (ctx.n_freq + stride - 1) // stride
        gvis = _axis_visibility(rng, groups, group_prob)
        vis_freq = np.repeat(gvis, stride)[:ctx.n_freq]

    xi = None
    if gen.xi_std_db > 0.0:
        xi = spatial_lognormal_xi(seed, cluster_id, ctx.m_r, ctx.m_t,
                                  gen.xi_std_db, gen.xi_corr_elements)

    lo, hi = gen.reflectance_range
    reflectance = float(rng.uniform(lo, hi))

    return Cluster(
        id=cluster_id, birth_snapshot=birth_snapshot,
        pos_a=pos_a, pos_z=pos_z, vel_a=vel_a, vel_z=vel_z,
        center_a=center_a, center_z=center_z,
        tau_tilde=tau_tilde, tau_link=tau_link, z_shadow_db=z_db,
        gamma=np.full(m, gen.gamma), kappa=kappa, pol_phases=pol_phases,
        vis_tx=vis_tx, vis_rx=vis_rx, vis_freq=vis_freq, xi_gain=xi,
        reflectance=reflectance, ray_group=ray_group,
    )


# --- delays, powers, Doppler ------------------------------------------------

def ray_delay(d_t, d_r, tau_tilde):
    """(d^T + d^R)/c + virtual-link delay. Accepts scalars or arrays."""
    return (np.asarray(d_t) + np.asarray(d_r)) / SPEED_OF_LIGHT + np.asarray(tau_tilde)


def ray_power_unnormalized(tau, ds_s: float, r_tau: float, z_db, xi=1.0,
                           f_ghz: float | None = None, fc_ghz: float | None = None,
                           gamma=0.0):
    """STF-varying unnormalized ray power.

    exp(-tau (r_tau - 1)/(r_tau DS)) * 10^(-Z/10) * xi(p,q) * (f/f_c)^gamma.
    """
    if ds_s <= 0:
        raise ValueError("delay spread must be positive")
    if r_tau < 1.0:
        raise ValueError("delay proportionality factor must be >= 1")
    p = np.exp(-np.asarray(tau) * (r_tau - 1.0) / (r_tau * ds_s))
    p = p * 10.0 ** (-np.asarray(z_db) / 10.0) * xi
    return p * frequency_power_factor(f_ghz, fc_ghz, gamma)


def frequency_power_factor(f_ghz, fc_ghz, gamma):
    """(f/f_c)^gamma; exactly 1 when gamma is 0 or no bin frequency is given."""
    if f_ghz is None or fc_ghz is None:
        return 1.0
    return (np.asarray(f_ghz) / fc_ghz) ** np.asarray(gamma)


def normalize_powers(powers: np.ndarray, axis: int = -1) -> np.ndarray:
    """Scale so powers sum to one along axis; rejects all-zero slices."""
    p = np.asarray(powers, dtype=float)
    total = p.sum(axis=axis, keepdims=True)
    if np.any(total <= 0.0):
        raise ValueError("cannot normalize: some slice has no positive power")
    return p / total


def spatial_lognormal_xi(seed: int, cluster_id: int, m_r: int, m_t: int,
                         std_db: float, corr_elements: float = 10.0) -> np.ndarray:
    """Smooth positive power factor over the (q, p) element grid."""
    if std_db == 0.0:
        return np.ones((m_r, m_t))
    fld = SosField(seed, d_corr=corr_elements, n_sinusoids=64, tag=f"xi-{cluster_id}")
    qq, pp = np.meshgrid(np.arange(m_r), np.arange(m_t), indexing="ij")
    pts = np.stack([pp.ravel(), qq.ravel(), np.zeros(qq.size)], axis=1).astype(float)
    return 10.0 ** (std_db * fld.eval(pts).reshape(m_r, m_t) / 10.0)


def element_distances(el_pos: np.ndarray, ray_pos: np.ndarray) -> np.ndarray:
    """(M, 3) x (R, 3) -> (M, R) Euclidean distances."""
    diff = el_pos[:, None, :] - ray_pos[None, :, :]
    return np.sqrt((diff * diff).sum(axis=2))


def ray_doppler(pos_a, vel_a, pos_z, vel_z, tx_pos, tx_vel, rx_pos, rx_vel,
                fc_hz: float) -> np.ndarray:
    """Doppler shift of each ray, -(f_c/c) d/dt (d^T + d^R), in Hz.

    Movements of Tx, Rx, and both bounce scatterers all contribute through
    the radial components at the two bounce points.
    """
    pos_a = np.atleast_2d(pos_a)
    pos_z = np.atleast_2d(pos_z)
    vel_a = np.broadcast_to(np.atleast_2d(vel_a), pos_a.shape)
    vel_z = np.broadcast_to(np.atleast_2d(vel_z), pos_z.shape)
    dt_vec = pos_a - tx_pos
    dr_vec = pos_z - rx_pos
    d_t = np.linalg.norm(dt_vec, axis=1)
    d_r = np.linalg.norm(dr_vec, axis=1)
    d_t = np.where(d_t > 0, d_t, 1.0)
    d_r = np.where(d_r > 0, d_r, 1.0)
    rate = ((dt_vec * (vel_a - tx_vel)).sum(axis=1) / d_t
            + (dr_vec * (vel_z - rx_vel)).sum(axis=1) / d_r)
    return -(fc_hz / SPEED_OF_LIGHT) * rate


def los_doppler(tx_pos, tx_vel, rx_pos, rx_vel, fc_hz: float) -> float:
    """Line-of-sight Doppler shift, -(f_c/c) dD/dt, in Hz."""
    d_vec = np.asarray(rx_pos, dtype=float) - np.asarray(tx_pos, dtype=float)
    d = np.linalg.norm(d_vec)
    if d == 0.0:
        return 0.0
    rate = float(d_vec @ (np.asarray(rx_vel, dtype=float) - np.asarray(tx_vel, dtype=float))) / d
    return -(fc_hz / SPEED_OF_LIGHT) * rate


# --- population container ---------------------------------------------------

@dataclass
class ClusterSet:
    """Live cluster population plus birth-death bookkeeping."""

    clusters: list[Cluster] = field(default_factory=list)
    n_surv: int = 0
    n_new: int = 0
    next_id: int = 0

    def __len__(self) -> int:
        return len(self.clusters)

    @property
    def count(self) -> int:
        return len(self.clusters)

    def total_rays(self) -> int:
        return sum(c.n_rays for c in self.clusters)

    def advance(self, dt: float) -> None:
        for c in self.clusters:
            c.advance(dt)

    def ensure_coverage(self, m_t: int, m_r: int, n_freq: int) -> None:
        """Guarantee every (q, p, bin) cell sees at least one cluster.

        Rare fallback that keeps per-pair power normalization well defined;
        it widens the nearest cluster's visibility instead of spawning.
        """
        if not self.clusters:
            return
        vis = np.zeros((m_r, m_t, n_freq), dtype=bool)
        for c in self.clusters:
            vis |= (c.vis_rx[:, None, None] & c.vis_tx[None, :, None]
                    & c.vis_freq[None, None, :])
        if vis.all():
            return
        for q, p, k in zip(*np.nonzero(~vis)):
            best = max(self.clusters,
                       key=lambda c: int(c.vis_rx[q]) + int(c.vis_tx[p]) + int(c.vis_freq[k]))
            best.vis_rx[q] = True
            best.vis_tx[p] = True
            best.vis_freq[k] = True


def initial_population(lsps: LspSet, ctx: SpawnContext, seed: int, count: int) -> ClusterSet:
    cs = ClusterSet()
    for _ in range(count):
        cs.clusters.append(spawn_cluster(lsps, ctx, seed, cs.next_id, birth_snapshot=0))
        cs.next_id += 1
    cs.n_surv = 0
    cs.n_new = count
    cs.ensure_coverage(ctx.m_t, ctx.m_r, ctx.n_freq)
    return cs


def birth_death_step(cs: ClusterSet, lsps: LspSet, ctx: SpawnContext, seed: int,
                     t_index: int, dt_bd: float,
                     v_t: float = 0.0, alpha_a_t: float = 0.0,
                     v_r: float = 0.0, alpha_a_r: float = 0.0,
                     uhst_scale: float | None = None,
                     min_live: int = 1) -> float:
    """One time-axis birth-death event; returns the survival probability used.

    Survivors keep their identity; the birth count is Poisson with mean
    (lambda_G/lambda_R)(1 - P_surv), optionally scaled by the waveguide
    factor. lambda_R = 0 keeps every cluster and spawns nothing.
    """
    bd = ctx.bd
    if bd.lambda_r == 0.0:
        cs.n_surv = len(cs.clusters)
        cs.n_new = 0
        return 1.0
    p = survival_prob(bd, dt_bd=dt_bd,
                      v_t=v_t, alpha_a_t=alpha_a_t, beta_a_t=ctx.tx_boresight[0],
                      beta_e_t=ctx.tx_boresight[1],
                      v_r=v_r, alpha_a_r=alpha_a_r, beta_a_r=ctx.rx_boresight[0],
                      beta_e_r=ctx.rx_boresight[1])
    survivors = []
    for c in cs.clusters:
        if c.ramp_start is not None:
            continue  # faded out over the previous stride
        if substream(seed, "surv", t_index, c.id).random() < p:
            survivors.append(c)
        elif bd.death_ramp:
            c.ramp_start = t_index
            survivors.append(c)  # keeps contributing while fading
    mean_new = expected_new(bd, p)
    if uhst_scale is not None:
        mean_new *= uhst_scale
    rng = substream(seed, "births", t_index)
    n_new = int(rng.poisson(mean_new)) if mean_new > 0.0 else 0
    if len(survivors) + n_new < min_live:
        n_new = min_live - len(survivors)
    fresh = []
    for _ in range(n_new):
        fresh.append(spawn_cluster(lsps, ctx, seed, cs.next_id, birth_snapshot=t_index))
        cs.next_id += 1
    cs.clusters = survivors + fresh
    cs.n_surv = len(survivors)
    cs.n_new = len(fresh)
    cs.ensure_coverage(ctx.m_t, ctx.m_r, ctx.n_freq)
    return p


def evolve_snapshot(cs: ClusterSet, lsps: LspSet, ctx: SpawnContext, seed: int,
                    t_index: int, dt: float,
                    v_t: float = 0.0, alpha_a_t: float = 0.0,
                    v_r: float = 0.0, alpha_a_r: float = 0.0,
                    uhst_scale: float | None = None, min_live: int = 1) -> ClusterSet:
    """Advance the population one channel sample: geometric drift plus a
    birth-death event at the configured grid boundaries.

    Scatterer positions move by their velocities; at multiples of the
    birth-death stride each cluster survives independently and fresh
    clusters arrive with the Poisson birth law. Per-ray delays, angles,
    powers, and Doppler shifts are recomputed downstream from the moved
    geometry (see simulate).
    """
    if t_index < 1:
        raise ValueError("evolution starts at the second snapshot (t_index >= 1)")
    cs.advance(dt)
    bd = ctx.bd
    if bd.enabled and bd.time_steps > 0 and bd.lambda_r > 0.0 \
            and t_index % bd.time_steps == 0:
        birth_death_step(cs, lsps, ctx, seed, t_index, bd.time_steps * dt,
                         v_t=v_t, alpha_a_t=alpha_a_t, v_r=v_r, alpha_a_r=alpha_a_r,
                         uhst_scale=uhst_scale, min_live=min_live)
    else:
        cs.n_surv = len(cs.clusters)
        cs.n_new = 0
    return cs
