"""End-to-end channel generation.

A LinkSimulator owns one Tx-Rx link: it samples spatially consistent
large-scale parameters along the trajectory, evolves the cluster population
(birth-death plus geometric drift), and assembles per-snapshot polarized tap
sets. Multi-link and surface-cascaded compositions build on it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import cir
from .clusters import (
    ClusterSet,
    SpawnContext,
    birth_death_step,
    element_distances,
    expected_new_uhst,
    frequency_power_factor,
    initial_population,
    los_doppler,
    ray_doppler,
    rayleigh_roughness_fn,
)
from .geometry import SPEED_OF_LIGHT, cartesian_to_spherical
from .lsp import make_fields, sample_lsps
from .realization import ChannelRealization, build_cells
from .rng import substream
from .scenarios import ScenarioConfig


@dataclass
class SnapshotData:
    """Dense per-snapshot tap data for one link."""

    t_index: int
    time_s: float
    k_r: float
    delays: np.ndarray  # (M_R, M_T, R)
    powers: np.ndarray  # (M_R, M_T, F, R), sums to 1 over R where masked
    amps: np.ndarray  # (M_R, M_T, F, R) complex, mixing weights applied
    mask: np.ndarray  # (M_R, M_T, F, R) bool
    los_delay: np.ndarray | None  # (M_R, M_T)
    los_amp: np.ndarray | None  # (M_R, M_T, F) complex
    ray_cluster: np.ndarray  # (R,)
    ray_doppler_hz: np.ndarray  # (R,) at the reference antenna pair

    def pair_taps(self, q: int, p: int, f: int = 0):
        vis = self.mask[q, p, f]
        delays = self.delays[q, p, vis]
        amps = self.amps[q, p, f, vis]
        if self.los_amp is not None:
            delays = np.concatenate([[self.los_delay[q, p]], delays])
            amps = np.concatenate([[self.los_amp[q, p, f]], amps])
        return delays, amps

    def narrowband(self, f: int = 0) -> np.ndarray:
        h = (self.amps[:, :, f, :] * self.mask[:, :, f, :]).sum(axis=-1)
        if self.los_amp is not None:
            h = h + self.los_amp[:, :, f]
        return h


def _pattern_runtime(cfg: ScenarioConfig):
    if cfg.pattern.kind == "cosine":
        return cir.CosinePattern(cfg.pattern.exponent)
    return cir.IsotropicPattern()


class _PmSurface:
    """Pierson-Moskowitz vertical bobbing for sea-surface scatterers."""

    ALPHA = 8.1e-3
    BETA = 0.74
    G = 9.81

    def __init__(self, wind_speed: float, components: int, rng):
        w_p = 0.877 * self.G / max(wind_speed, 0.1)
        w = np.linspace(0.5 * w_p, 3.0 * w_p, components)
        dw = w[1] - w[0] if components > 1 else w_p
        s = self.ALPHA * self.G**2 / w**5 * np.exp(-self.BETA * (self.G / (max(wind_speed, 0.1) * w)) ** 4)
        self.amp = np.sqrt(2.0 * s * dw)
        self.omega = w
        self.phase = rng.uniform(0.0, 2.0 * math.pi, components)

    def displacement(self, t: float) -> float:
        return float(np.sum(self.amp * np.cos(self.omega * t + self.phase)))

    def velocity(self, t: float) -> float:
        return float(-np.sum(self.amp * self.omega * np.sin(self.omega * t + self.phase)))


class _Component:
    """One cluster population plus its scattered-power share."""

    def __init__(self, name: str, ctx: SpawnContext, cs: ClusterSet):
        self.name = name
        self.ctx = ctx
        self.set = cs
        self.pm: dict[int, _PmSurface] = {}


class LinkSimulator:
    """Drives one link snapshot by snapshot."""

    def __init__(self, cfg: ScenarioConfig, seed: int, tx_index: int = 0, rx_index: int = 0,
                 *, tag: tuple = (), tx_array=None, rx_array=None,
                 tx_motion=None, rx_motion=None, k_db_override: float | None = None,
                 los_override: bool | None = None, shared_fields: dict | None = None):
        self.cfg = cfg
        self.seed = seed
        self.tag = tag
        self.link_seed_tags = ("link",) + tag + (tx_index, rx_index)
        self.tx_array = tx_array if tx_array is not None else cfg.tx_array_runtime(tx_index)
        self.rx_array = rx_array if rx_array is not None else cfg.rx_array_runtime(rx_index)
        self.tx_motion = tx_motion if tx_motion is not None else cfg.tx_motion_runtime()
        self.rx_motion = rx_motion if rx_motion is not None else cfg.rx_motion_runtime()
        self.k_db_override = k_db_override
        self.los_enabled = cfg.los.enabled if los_override is None else los_override
        if cfg.vlc.enabled:
            self.los_enabled = False  # optical path handled separately

        self.m_t = self.tx_array.elements
        self.m_r = self.rx_array.elements
        self.n_f = cfg.frequency_bins
        self.bins_ghz = cfg.bin_frequencies_ghz()
        self.fc_hz = cfg.fc_hz
        self.dt = cfg.delta_t_s
        self.pattern = _pattern_runtime(cfg)
        self.psi_deg = cir.faraday_angle(cfg.carrier_ghz, enabled=cfg.faraday.enabled)
        self.mu = cfg.polarization.mu if cfg.polarization.enabled else 1.0

        self.table = cfg.lsp_table_runtime()
        if shared_fields is not None:
            self.fields = shared_fields
        else:
            self.fields = make_fields(seed, self.table, cfg.lsp.n_sinusoids,
                                      cfg.lsp.spatial_consistency)
        self.bd = cfg.bd_runtime()
        self.gen = cfg.cluster_gen_runtime()

        self.tx_ref = self.tx_array.reference.as_array().astype(float)
        self.rx_ref = self.rx_array.reference.as_array().astype(float)
        self.tx_offsets = self.tx_array.element_offsets()
        self.rx_offsets = self.rx_array.element_offsets()
        self._d2d0 = float(np.linalg.norm((self.rx_ref - self.tx_ref)[:2]))

        self._uhst_rho = None
        if cfg.uhst.enabled:
            self._uhst_rho = rayleigh_roughness_fn(cfg.wavelength_m, cfg.uhst.grazing_deg)

        # LoS phases are drawn once per link and held
        rng = substream(seed, *self.link_seed_tags, "los-phase")
        self.theta_l_vv = 2.0 * math.pi - rng.uniform(0.0, 2.0 * math.pi)
        self.theta_l_hh = 2.0 * math.pi - rng.uniform(0.0, 2.0 * math.pi)

        self.components = self._init_components()
        self.t_index = 0

    # -- population setup ----------------------------------------------------

    def _spawn_ctx(self, gen) -> SpawnContext:
        cfg = self.cfg
        return SpawnContext(
            gen=gen, bd=self.bd, tx_ref=self.tx_ref, rx_ref=self.rx_ref,
            tx_boresight=(self.tx_array.boresight_azimuth, self.tx_array.boresight_elevation),
            rx_boresight=(self.rx_array.boresight_azimuth, self.rx_array.boresight_elevation),
            m_t=self.m_t, m_r=self.m_r, n_freq=self.n_f,
            spacing_t=self.tx_array.spacing, spacing_r=self.rx_array.spacing,
            bin_spacing_ghz=cfg.bin_spacing_mhz * 1e-3,
            xpr_per_ray_std_db=cfg.polarization.xpr_per_ray_std_db if cfg.polarization.enabled else 0.0,
            dmc_share=cfg.iiot.dmc_power_share if cfg.iiot.enabled else 0.0,
            dmc_sigma=cfg.iiot.dmc_sigma_m,
        )

    def _component_seed(self, name: str) -> int:
        g = substream(self.seed, *self.link_seed_tags, "component", name)
        return int(g.integers(0, 2**63 - 1))

    def _init_components(self) -> list[_Component]:
        cfg = self.cfg
        lsps = self._lsps_at(0.0)
        count = cfg.initial_cluster_count()
        comps = []
        if cfg.maritime.enabled:
            duct_gen = self.cfg.cluster_gen_runtime()
            duct_gen.mean_dist_tx *= 3.0
            duct_gen.mean_dist_rx *= 3.0
            duct_gen.motion_elevation = 0.0
            for name, gen in (("surface", self.gen), ("duct", duct_gen)):
                ctx = self._spawn_ctx(gen)
                cs = initial_population(lsps, ctx, self._component_seed(name), count)
                comps.append(_Component(name, ctx, cs))
            if cfg.maritime.pm_enabled:
                self._attach_pm(comps[0])
        else:
            ctx = self._spawn_ctx(self.gen)
            cs = initial_population(lsps, ctx, self._component_seed("nlos"), count)
            comps.append(_Component("nlos", ctx, cs))
        return comps

    def _attach_pm(self, comp: _Component) -> None:
        wind = self.cfg.maritime.pm_wind_speed_mps
        n = self.cfg.maritime.pm_components
        for c in comp.set.clusters:
            if c.id not in comp.pm:
                rng = substream(self.seed, *self.link_seed_tags, "pm", c.id)
                comp.pm[c.id] = _PmSurface(wind, n, rng)

    # -- per-snapshot state --------------------------------------------------

    def _lsps_at(self, time_s: float):
        cfg = self.cfg
        tx = self.tx_ref
        rx = self.rx_ref
        d2d = float(np.linalg.norm((rx - tx)[:2])) or self._d2d0 or 1.0
        h = cfg.lsp.height_m
        return sample_lsps(self.table, self.fields, (tx, rx), cfg.carrier_ghz,
                           h_ut_m=h, d_2d_m=d2d,
                           elevation_deg=cfg.lsp.link_elevation_deg)

    def _advance(self) -> None:
        t0 = (self.t_index - 1) * self.dt
        self.tx_ref = self.tx_ref + self.tx_motion.displacement(t0, t0 + self.dt)
        self.rx_ref = self.rx_ref + self.rx_motion.displacement(t0, t0 + self.dt)
        for comp in self.components:
            comp.set.advance(self.dt)
            comp.ctx.tx_ref = self.tx_ref
            comp.ctx.rx_ref = self.rx_ref
        if self.cfg.maritime.enabled and self.cfg.maritime.pm_enabled:
            self._apply_pm(self.t_index * self.dt)

    def _apply_pm(self, t: float) -> None:
        comp = self.components[0]
        for c in comp.set.clusters:
            pm = comp.pm.get(c.id)
            if pm is None:
                continue
            dz = pm.displacement(t) - pm.displacement(max(t - self.dt, 0.0))
            c.pos_z[:, 2] += dz
            c.vel_z = c.vel_z.copy()
            c.vel_z[2] = pm.velocity(t)

    def _bd_boundary(self, lsps) -> None:
        bd = self.bd
        if not bd.enabled or bd.time_steps <= 0 or bd.lambda_r == 0.0:
            return
        if self.t_index % bd.time_steps != 0:
            return
        t = self.t_index * self.dt
        dt_bd = bd.time_steps * self.dt
        v_t = float(np.linalg.norm(self.tx_motion.velocity_at(t)))
        v_r = float(np.linalg.norm(self.rx_motion.velocity_at(t)))
        seg_t = self.tx_motion.segment_at(t)
        seg_r = self.rx_motion.segment_at(t)
        scale = None
        if self.cfg.uhst.enabled:
            d_qp = float(np.linalg.norm(self.rx_ref - self.tx_ref))
            d_total = self.cfg.uhst.guideway_length_m
            base_scale = expected_new_uhst(1.0, min(d_qp, d_total), d_total,
                                           self.cfg.uhst.sigma_h_m, self._uhst_rho)
            scale = base_scale
        for comp in self.components:
            birth_death_step(comp.set, lsps, comp.ctx, self._component_seed(comp.name),
                             self.t_index, dt_bd,
                             v_t=v_t, alpha_a_t=seg_t.azimuth,
                             v_r=v_r, alpha_a_r=seg_r.azimuth,
                             uhst_scale=scale, min_live=self.cfg.clusters.min_live)
            if self.cfg.maritime.enabled and self.cfg.maritime.pm_enabled and comp.name == "surface":
                self._attach_pm(comp)

    # -- snapshot assembly -----------------------------------------------------

    def _flatten(self, comp: _Component, t_index: int):
        cs = comp.set
        if not cs.clusters:
            return None
        ramp = None
        if any(c.ramp_start is not None for c in cs.clusters):
            stride = self.bd.time_steps
            ramp = np.concatenate([np.full(c.n_rays, c.ramp_weight(t_index, stride))
                                   for c in cs.clusters])
        pos_a = np.concatenate([c.pos_a for c in cs.clusters])
        pos_z = np.concatenate([c.pos_z for c in cs.clusters])
        vel_a = np.concatenate([np.broadcast_to(c.vel_a, c.pos_a.shape) for c in cs.clusters])
        vel_z = np.concatenate([np.broadcast_to(c.vel_z, c.pos_z.shape) for c in cs.clusters])
        tau_tilde = np.concatenate([c.tau_tilde for c in cs.clusters])
        gamma = np.concatenate([c.gamma for c in cs.clusters])
        kappa = np.concatenate([c.kappa for c in cs.clusters])
        phases = np.concatenate([c.pol_phases for c in cs.clusters])
        group = np.concatenate([c.ray_group for c in cs.clusters])
        z_db = np.concatenate([np.full(c.n_rays, c.z_shadow_db) for c in cs.clusters])
        cluster_id = np.concatenate([np.full(c.n_rays, c.id) for c in cs.clusters])
        refl = np.concatenate([np.full(c.n_rays, c.reflectance) for c in cs.clusters])
        vis_pair = np.stack([c.vis_rx[:, None] & c.vis_tx[None, :] for c in cs.clusters])
        vis_f = np.stack([c.vis_freq for c in cs.clusters])
        cluster_index = np.concatenate([np.full(c.n_rays, i) for i, c in enumerate(cs.clusters)])
        xi = None
        if any(c.xi_gain is not None for c in cs.clusters):
            xi = np.stack([c.xi_gain if c.xi_gain is not None else np.ones((self.m_r, self.m_t))
                           for c in cs.clusters])
        return dict(pos_a=pos_a, pos_z=pos_z, vel_a=vel_a, vel_z=vel_z,
                    tau_tilde=tau_tilde, gamma=gamma, kappa=kappa, phases=phases,
                    group=group, z_db=z_db, cluster_id=cluster_id, refl=refl,
                    vis_pair=vis_pair, vis_f=vis_f, cluster_index=cluster_index,
                    xi=xi, ramp=ramp)

    def _component_weights(self) -> dict[str, float]:
        cfg = self.cfg
        if cfg.maritime.enabled:
            if cfg.maritime.s1 is not None:
                s1, s2 = cfg.maritime.s1, cfg.maritime.s2
            else:
                d = float(np.linalg.norm(self.rx_ref - self.tx_ref))
                s1, s2 = cir.maritime_power_factors(d, cfg.maritime.switch_mid_m,
                                                    cfg.maritime.switch_width_m)
            return {"surface": s1, "duct": s2}
        return {"nlos": 1.0}

    def _pattern_gains(self, el_pos, ray_pos, boresight):
        """(F_V, F_H) per (element, ray) for a non-isotropic pattern."""
        diff = ray_pos[None, :, :] - el_pos[:, None, :]
        _, az, el = cartesian_to_spherical(diff)
        return self.pattern(el, az, self.cfg.carrier_ghz)

    def snapshot(self) -> SnapshotData:
        cfg = self.cfg
        t = self.t_index
        time_s = t * self.dt
        if t > 0:
            self._advance()
        lsps = self._lsps_at(time_s)
        if t > 0:
            self._bd_boundary(lsps)

        if self.los_enabled:
            if self.k_db_override is not None:
                k_r = 10.0 ** (self.k_db_override / 10.0)
            else:
                k_r = lsps.kf_linear
        else:
            k_r = 0.0
        w_nlos = math.sqrt(1.0 / (k_r + 1.0))
        w_los = math.sqrt(k_r / (k_r + 1.0))

        a_t = self.tx_ref[None, :] + self.tx_offsets  # (M_T, 3)
        a_r = self.rx_ref[None, :] + self.rx_offsets  # (M_R, 3)

        weights = self._component_weights()
        parts = []
        for comp in self.components:
            flat = self._flatten(comp, t)
            if flat is None:
                continue
            parts.append(self._component_snapshot(comp, flat, weights[comp.name],
                                                  lsps, a_t, a_r, w_nlos))

        if parts:
            delays = np.concatenate([p["delays"] for p in parts], axis=-1)
            powers = np.concatenate([p["powers"] for p in parts], axis=-1)
            amps = np.concatenate([p["amps"] for p in parts], axis=-1)
            mask = np.concatenate([p["mask"] for p in parts], axis=-1)
            ray_cluster = np.concatenate([p["cluster_id"] for p in parts])
            ray_dop = np.concatenate([p["doppler"] for p in parts])
        else:
            shape = (self.m_r, self.m_t, 0)
            delays = np.zeros(shape)
            powers = np.zeros((self.m_r, self.m_t, self.n_f, 0))
            amps = np.zeros((self.m_r, self.m_t, self.n_f, 0), dtype=complex)
            mask = np.zeros((self.m_r, self.m_t, self.n_f, 0), dtype=bool)
            ray_cluster = np.zeros(0, dtype=int)
            ray_dop = np.zeros(0)

        los_delay = los_amp = None
        if cfg.vlc.enabled:
            los_delay, los_amp = self._vlc_los_taps(a_t, a_r, time_s)
        elif self.los_enabled and k_r > 0.0:
            los_delay, los_amp = self._los_taps(a_t, a_r, w_los)

        self.t_index += 1
        return SnapshotData(t_index=t, time_s=time_s, k_r=k_r, delays=delays,
                            powers=powers, amps=amps, mask=mask,
                            los_delay=los_delay, los_amp=los_amp,
                            ray_cluster=ray_cluster, ray_doppler_hz=ray_dop)

    def _component_snapshot(self, comp, flat, share, lsps, a_t, a_r, w_nlos):
        cfg = self.cfg
        gen = comp.ctx.gen
        d_t = element_distances(a_t, flat["pos_a"])  # (M_T, R)
        d_r = element_distances(a_r, flat["pos_z"])  # (M_R, R)
        tau = (d_t[None, :, :] + d_r[:, None, :]) / SPEED_OF_LIGHT + flat["tau_tilde"]

        # unnormalized power, time/space terms
        p_base = np.exp(-tau * (gen.r_tau - 1.0) / (gen.r_tau * lsps.ds_s))
        p_base = p_base * 10.0 ** (-flat["z_db"] / 10.0)
        if flat["xi"] is not None:
            p_base = p_base * flat["xi"][flat["cluster_index"]].transpose(1, 2, 0)
        if flat["ramp"] is not None:
            p_base = p_base * flat["ramp"]

        vis_pair = flat["vis_pair"][flat["cluster_index"]].transpose(1, 2, 0)  # (M_R, M_T, R)
        vis_f = flat["vis_f"][flat["cluster_index"]].T  # (F, R)
        mask = vis_pair[:, :, None, :] & vis_f[None, None, :, :]

        powers = np.empty((self.m_r, self.m_t, self.n_f, tau.shape[-1]))
        for k, f_ghz in enumerate(self.bins_ghz):
            pk = p_base * frequency_power_factor(f_ghz, cfg.carrier_ghz, flat["gamma"])
            pk = np.where(mask[:, :, k, :], pk, 0.0)
            groups = flat["group"]
            if groups.any():
                dmc_share = cfg.iiot.dmc_power_share
                out = np.zeros_like(pk)
                for g, w in ((0, 1.0 - dmc_share), (1, dmc_share)):
                    sel = groups == g
                    if not sel.any():
                        continue
                    tot = pk[..., sel].sum(axis=-1, keepdims=True)
                    out[..., sel] = np.where(tot > 0, pk[..., sel] / np.where(tot > 0, tot, 1.0) * w, 0.0)
                pk = out
            else:
                tot = pk.sum(axis=-1, keepdims=True)
                pk = np.where(tot > 0, pk / np.where(tot > 0, tot, 1.0), 0.0)
            powers[:, :, k, :] = pk * share

        # polarized coupling coefficient
        kappa = flat["kappa"]
        ph = flat["phases"]
        if isinstance(self.pattern, cir.IsotropicPattern):
            coeff = cir.polarization_coefficient(
                1.0, 0.0, 1.0, 0.0, kappa, self.mu,
                ph[:, 0], ph[:, 1], ph[:, 2], ph[:, 3], self.psi_deg)
            coeff = coeff[None, None, :]
        else:
            ftv, fth = self._pattern_gains(a_t, flat["pos_a"],
                                           (self.tx_array.boresight_azimuth,
                                            self.tx_array.boresight_elevation))
            frv, frh = self._pattern_gains(a_r, flat["pos_z"],
                                           (self.rx_array.boresight_azimuth,
                                            self.rx_array.boresight_elevation))
            coeff = cir.polarization_coefficient(
                frv[:, None, :], frh[:, None, :], ftv[None, :, :], fth[None, :, :],
                kappa, self.mu, ph[:, 0], ph[:, 1], ph[:, 2], ph[:, 3], self.psi_deg)

        amps = np.empty((self.m_r, self.m_t, self.n_f, tau.shape[-1]), dtype=complex)
        for k, f_ghz in enumerate(self.bins_ghz):
            phase = np.exp(1j * (2.0 * math.pi * f_ghz * 1e9) * tau)
            amps[:, :, k, :] = w_nlos * coeff * np.sqrt(powers[:, :, k, :]) * phase
        if cfg.vlc.enabled:
            amps = self._vlc_ray_gains(powers, tau, flat)

        dop = ray_doppler(flat["pos_a"], flat["vel_a"], flat["pos_z"], flat["vel_z"],
                          a_t[0], self.tx_motion.velocity_at(self.t_index * self.dt),
                          a_r[0], self.rx_motion.velocity_at(self.t_index * self.dt),
                          self.fc_hz)
        if cfg.vlc.enabled:
            dop = np.zeros_like(dop)

        return dict(delays=tau, powers=powers, amps=amps, mask=mask,
                    cluster_id=flat["cluster_id"], doppler=dop)

    def _vlc_ray_gains(self, powers, tau, flat):
        """Real nonnegative scattered-power taps for the optical band."""
        cfg = self.cfg.vlc
        area = cfg.pd_area_m2
        path = np.clip(tau * SPEED_OF_LIGHT, 1e-3, None)
        g = (cfg.nlos_power_share * powers[:, :, :, :] * flat["refl"]
             * (area / (math.pi * path[:, :, None, :] ** 2)))
        return g.astype(complex)

    def _vlc_los_taps(self, a_t, a_r, time_s: float):
        """Generalized-Lambertian direct-path power taps, detector may rotate."""
        v = self.cfg.vlc
        normal = (math.radians(v.pd_normal_azimuth_deg + v.rot_azimuth_dps * time_s),
                  math.radians(v.pd_normal_elevation_deg + v.rot_elevation_dps * time_s))
        boresight = (self.tx_array.boresight_azimuth, self.tx_array.boresight_elevation)
        tau_l = np.zeros((self.m_r, self.m_t))
        amp = np.zeros((self.m_r, self.m_t, self.n_f), dtype=complex)
        for q in range(self.m_r):
            for p in range(self.m_t):
                gain, delay = cir.vlc_gain(a_t[p], boresight, v.lambertian_order,
                                           a_r[q], normal, v.pd_area_m2, v.fov_deg)
                tau_l[q, p] = delay
                amp[q, p, :] = gain
        return tau_l, amp

    def _los_taps(self, a_t, a_r, w_los):
        d = element_distances(a_r, a_t)  # (M_R, M_T)
        tau_l = d / SPEED_OF_LIGHT
        if isinstance(self.pattern, cir.IsotropicPattern):
            coeff = cir.los_coefficient(1.0, 0.0, 1.0, 0.0,
                                        self.theta_l_vv, self.theta_l_hh, self.psi_deg)
        else:
            diff = a_r[:, None, :] - a_t[None, :, :]
            _, az_dep, el_dep = cartesian_to_spherical(diff)
            _, az_arr, el_arr = cartesian_to_spherical(-diff)
            ftv, fth = self.pattern(el_dep, az_dep, self.cfg.carrier_ghz)
            frv, frh = self.pattern(el_arr, az_arr, self.cfg.carrier_ghz)
            coeff = cir.los_coefficient(frv, frh, ftv, fth,
                                        self.theta_l_vv, self.theta_l_hh, self.psi_deg)
        amp = np.empty((self.m_r, self.m_t, self.n_f), dtype=complex)
        for k, f_ghz in enumerate(self.bins_ghz):
            amp[:, :, k] = w_los * coeff * np.exp(1j * (2.0 * math.pi * f_ghz * 1e9) * tau_l)
        return tau_l, amp

    # -- drivers ---------------------------------------------------------------

    def snapshots(self):
        for _ in range(self.cfg.snapshots):
            yield self.snapshot()

    def los_reference(self):
        """(delay, doppler) of the direct path at the reference pair, now."""
        t = self.t_index * self.dt
        d = float(np.linalg.norm(self.rx_ref - self.tx_ref))
        nu = los_doppler(self.tx_ref, self.tx_motion.velocity_at(t),
                         self.rx_ref, self.rx_motion.velocity_at(t), self.fc_hz)
        return d / SPEED_OF_LIGHT, nu

    def cluster_count(self) -> int:
        return sum(len(comp.set.clusters) for comp in self.components)


def simulate_realization(cfg: ScenarioConfig, seed: int, tx_index: int = 0,
                         rx_index: int = 0, ray_log: bool = False,
                         shared_fields: dict | None = None) -> ChannelRealization:
    """Generate and materialize one link's realization."""
    sim = LinkSimulator(cfg, seed, tx_index, rx_index, shared_fields=shared_fields)
    snaps = []
    k_series = []
    log = []
    for snap in sim.snapshots():
        snaps.append(snap)
        k_series.append(snap.k_r)
        if ray_log:
            entries = list(zip(snap.ray_cluster.tolist(),
                               snap.delays[0, 0].tolist(),
                               snap.powers[0, 0, 0].tolist(),
                               snap.ray_doppler_hz.tolist()))
            log.append(entries)
    cells = build_cells(snaps, sim.m_r, sim.m_t, sim.n_f)
    return ChannelRealization(fc_hz=cfg.fc_hz, delta_t_s=cfg.delta_t_s, seed=seed,
                              dims=(cfg.snapshots, sim.m_r, sim.m_t, sim.n_f),
                              cells=cells, k_series=np.asarray(k_series),
                              scenario=cfg.name, bin_spacing_hz=cfg.bin_spacing_mhz * 1e6,
                              ray_log=log)


def simulate_multilink(cfg: ScenarioConfig, seed: int) -> dict:
    """All N_T x N_R links with shared spatial-consistency fields."""
    table = cfg.lsp_table_runtime()
    fields = make_fields(seed, table, cfg.lsp.n_sinusoids, cfg.lsp.spatial_consistency)
    out = {}
    for i in range(cfg.n_tx):
        for j in range(cfg.n_rx):
            out[(i + 1, j + 1)] = simulate_realization(cfg, seed, i, j,
                                                       shared_fields=fields)
    return out


def multilink_matrix(reals: dict, cfg: ScenarioConfig, t: int, f: int = 0) -> np.ndarray:
    blocks = {k: r.narrowband(t, f) for k, r in reals.items()}
    return cir.assemble_multilink(blocks, cfg.n_tx, cfg.n_rx)


def simulate_ris(cfg: ScenarioConfig, seed: int):
    """Cascaded channel via three sub-links; returns per-snapshot series.

    The direct link follows the scenario's own line-of-sight setting; the
    two surface sub-links are line-of-sight dominated with the configured
    K-factor. Output: (h_total (T, M_R), h_direct (T, M_R)).
    """
    from .geometry import AntennaArray, MotionState, Vec3

    if not cfg.ris.enabled:
        raise ValueError("surface cascade requested but ris.enabled is false")
    ris_pos = np.asarray(cfg.ris.position_m, dtype=float)
    lam = cfg.wavelength_m
    ris_array = AntennaArray(kind="ula", elements=cfg.ris.elements,
                             spacing=cfg.ris.spacing_wl * lam,
                             reference=Vec3(*ris_pos))
    static = MotionState(speed=0.0)
    k_db = cfg.ris.sublink_k_db
    sims = {
        "tr": LinkSimulator(cfg, seed, tag=("tr",)),
        "ti": LinkSimulator(cfg, seed, tag=("ti",), rx_array=ris_array, rx_motion=static,
                            k_db_override=k_db, los_override=True),
        "ir": LinkSimulator(cfg, seed, tag=("ir",), tx_array=ris_array, tx_motion=static,
                            k_db_override=k_db, los_override=True),
    }
    tx_pos = np.asarray(cfg.tx_positions_m[0], dtype=float)
    d = ris_pos - tx_pos
    az = math.atan2(d[1], d[0])
    el = math.atan2(d[2], math.hypot(d[0], d[1]))
    f_vec = cir.steering_vector(sims["tr"].tx_offsets, az, el, cfg.fc_hz)

    phi = None
    if cfg.ris.phi == "identity":
        phi = np.ones(cfg.ris.elements, dtype=complex)
    elif cfg.ris.phi == "random":
        rng = substream(seed, "ris-phi")
        phi = np.exp(1j * rng.uniform(0.0, 2.0 * math.pi, cfg.ris.elements))

    h_total = np.zeros((cfg.snapshots, sims["tr"].m_r), dtype=complex)
    h_direct = np.zeros_like(h_total)
    for t in range(cfg.snapshots):
        h_tr = sims["tr"].snapshot().narrowband()  # (M_R, M_T)
        h_ti = sims["ti"].snapshot().narrowband()  # (N_ris, M_T)
        h_ir = sims["ir"].snapshot().narrowband()  # (M_R, N_ris)
        if phi is None:
            # phase-align every surface path for the reference receive element
            cascade = h_ir[0, :] * (h_ti @ f_vec)
            phi = np.exp(-1j * np.angle(cascade))
        h_total[t] = cir.ris_cascade(h_ir, phi, h_ti, h_tr, f_vec)
        h_direct[t] = h_tr @ f_vec
    return h_total, h_direct
