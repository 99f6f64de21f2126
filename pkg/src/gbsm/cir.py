"""Channel impulse response assembly.

Polarized LoS/NLoS ray terms with optional ionospheric polarization-plane
rotation, K-factor mixing, large-scale gain application, and the composition
rules for maritime (three components), industrial (specular plus dense
multipath), optical (real power taps), multi-link, and surface-assisted
cascaded channels.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .geometry import SPEED_OF_LIGHT


# --- antenna patterns -------------------------------------------------------

class IsotropicPattern:
    """Unit vertical response, no horizontal component: (1, 0) everywhere."""

    def __call__(self, elevation, azimuth, fc_ghz):
        el = np.asarray(elevation, dtype=float)
        return np.ones_like(el, dtype=complex), np.zeros_like(el, dtype=complex)


class CosinePattern:
    """cos^m rolloff around a boresight, vertical polarization only."""

    def __init__(self, exponent: float = 1.0, boresight_azimuth: float = 0.0,
                 boresight_elevation: float = 0.0):
        self.exponent = exponent
        self.boresight_azimuth = boresight_azimuth
        self.boresight_elevation = boresight_elevation

    def __call__(self, elevation, azimuth, fc_ghz):
        el = np.asarray(elevation, dtype=float)
        az = np.asarray(azimuth, dtype=float)
        g = (np.clip(np.cos(el - self.boresight_elevation), 0.0, None) ** self.exponent
             * np.clip(np.cos(az - self.boresight_azimuth), 0.0, None) ** self.exponent)
        return g.astype(complex), np.zeros_like(g, dtype=complex)


# --- polarization -----------------------------------------------------------

@dataclass
class PolarizationDraw:
    """Per-ray polarization state: linear XPR, co-polar imbalance, phases."""

    kappa: float
    mu: float = 1.0
    theta_vv: float = 0.0
    theta_vh: float = 0.0
    theta_hv: float = 0.0
    theta_hh: float = 0.0

    def __post_init__(self):
        if self.kappa <= 0:
            raise ValueError("cross-polarization ratio must be positive")


def faraday_angle(fc_ghz: float, enabled: bool = True) -> float:
    """Polarization-plane rotation angle in degrees: 108 / f_c^2 (f_c in GHz)."""
    if not enabled:
        return 0.0
    if fc_ghz <= 0:
        raise ValueError("carrier frequency must be positive")
    return 108.0 / (fc_ghz * fc_ghz)


def polarization_coefficient(f_rx_v, f_rx_h, f_tx_v, f_tx_h,
                             kappa, mu, theta_vv, theta_vh, theta_hv, theta_hh,
                             psi_deg: float = 0.0):
    """Scalar polarized coupling: rx-row x (XPR matrix x rotation) x tx-column.

    All ray-indexed inputs broadcast; the rotation matrix applies on the
    transmit side. psi_deg = 0 skips the rotation exactly.
    """
    a = np.exp(1j * np.asarray(theta_vv))
    b = np.sqrt(mu / np.asarray(kappa)) * np.exp(1j * np.asarray(theta_vh))
    c = np.sqrt(1.0 / np.asarray(kappa)) * np.exp(1j * np.asarray(theta_hv))
    d = np.sqrt(mu) * np.exp(1j * np.asarray(theta_hh))
    if psi_deg != 0.0:
        cs = math.cos(math.radians(psi_deg))
        sn = math.sin(math.radians(psi_deg))
        a, b = a * cs + b * sn, -a * sn + b * cs
        c, d = c * cs + d * sn, -c * sn + d * cs
    return f_rx_v * (a * f_tx_v + b * f_tx_h) + f_rx_h * (c * f_tx_v + d * f_tx_h)


def los_coefficient(f_rx_v, f_rx_h, f_tx_v, f_tx_h, theta_vv, theta_hh,
                    psi_deg: float = 0.0):
    """LoS coupling: rx-row x diag(e^{j th_VV}, e^{j th_HH}) x rotation x tx-column."""
    a = np.exp(1j * np.asarray(theta_vv))
    d = np.exp(1j * np.asarray(theta_hh))
    b = np.zeros_like(a)
    c = np.zeros_like(d)
    if psi_deg != 0.0:
        cs = math.cos(math.radians(psi_deg))
        sn = math.sin(math.radians(psi_deg))
        a, b = a * cs, -a * sn
        c, d = d * sn, d * cs
    return f_rx_v * (a * f_tx_v + b * f_tx_h) + f_rx_h * (c * f_tx_v + d * f_tx_h)


def los_term(f_rx: tuple, f_tx: tuple, theta_vv: float, theta_hh: float,
             fc_hz: float, tau_s: float, psi_deg: float = 0.0):
    """One LoS tap: (complex amplitude, delay)."""
    amp = los_coefficient(f_rx[0], f_rx[1], f_tx[0], f_tx[1], theta_vv, theta_hh, psi_deg)
    return amp * np.exp(1j * 2.0 * math.pi * fc_hz * tau_s), tau_s


def nlos_term(f_rx: tuple, f_tx: tuple, pol: PolarizationDraw, power: float,
              fc_hz: float, tau_s: float, psi_deg: float = 0.0):
    """One scattered-ray tap: (complex amplitude, delay)."""
    if power < 0:
        raise ValueError("ray power must be nonnegative")
    coeff = polarization_coefficient(f_rx[0], f_rx[1], f_tx[0], f_tx[1],
                                     pol.kappa, pol.mu, pol.theta_vv, pol.theta_vh,
                                     pol.theta_hv, pol.theta_hh, psi_deg)
    return coeff * math.sqrt(power) * np.exp(1j * 2.0 * math.pi * fc_hz * tau_s), tau_s


# --- mixing and large-scale -------------------------------------------------

def mix_k_factor(los, nlos, k_r: float):
    """sqrt(K/(K+1)) LoS + sqrt(1/(K+1)) NLoS."""
    if k_r < 0:
        raise ValueError("K-factor must be nonnegative")
    return math.sqrt(k_r / (k_r + 1.0)) * los + math.sqrt(1.0 / (k_r + 1.0)) * nlos


def maritime_mix(los, nlos_surface, nlos_duct, k_r: float, s1: float, s2: float):
    """Three-component mixing with power control factors S1 + S2 = 1."""
    if s1 < 0 or s2 < 0:
        raise ValueError("power control factors must be nonnegative")
    if abs(s1 + s2 - 1.0) > 1e-9:
        raise ValueError("power control factors must sum to one")
    w = 1.0 / (k_r + 1.0)
    return (math.sqrt(k_r * w) * los + math.sqrt(s1 * w) * nlos_surface
            + math.sqrt(s2 * w) * nlos_duct)


def maritime_power_factors(distance_m: float, mid_m: float, width_m: float) -> tuple[float, float]:
    """Distance-driven duct switching: logistic S2, S1 = 1 - S2."""
    if width_m <= 0:
        raise ValueError("switch width must be positive")
    s2 = 1.0 / (1.0 + math.exp(-(distance_m - mid_m) / width_m))
    return 1.0 - s2, s2


def iiot_mix(los, smc, dmc, k_r: float):
    """Specular plus dense multipath under one scattered-power budget."""
    return mix_k_factor(los, smc + dmc, k_r)


@dataclass
class LargeScaleGains:
    """Linear power gains. Path loss, blockage, weather, and absorption lie
    in (0, 1] (1 = disabled); shadowing is a zero-mean dB process so its
    linear gain may exceed one."""

    pl: float = 1.0
    sh: float = 1.0
    bl: float = 1.0
    we: float = 1.0
    al: float = 1.0

    def __post_init__(self):
        for name in ("pl", "bl", "we", "al"):
            v = getattr(self, name)
            if not (0.0 < v <= 1.0):
                raise ValueError(f"{name} must lie in (0, 1]")
        if self.sh <= 0.0:
            raise ValueError("shadowing gain must be positive")

    def product(self) -> float:
        return self.pl * self.sh * self.bl * self.we * self.al


def apply_large_scale(h_s, gains: LargeScaleGains):
    """H = (PL SH BL WE AL)^(1/2) H_s; gains are power-level, applied in amplitude."""
    return math.sqrt(gains.product()) * np.asarray(h_s)


# --- optical line-of-sight --------------------------------------------------

def vlc_gain(led_pos, led_boresight: tuple[float, float], lambertian_order: float,
             pd_pos, pd_normal: tuple[float, float], pd_area_m2: float,
             fov_deg: float) -> tuple[float, float]:
    """Generalized-Lambertian LoS power gain and propagation delay.

    (m+1) A cos^m(phi) cos(theta) / (2 pi d^2) with a hard field-of-view
    cutoff at the detector; no phase and no Doppler (incoherent light).
    """
    from .geometry import unit_vector

    led = np.asarray(led_pos, dtype=float)
    pd = np.asarray(pd_pos, dtype=float)
    d_vec = pd - led
    d = float(np.linalg.norm(d_vec))
    if d == 0.0:
        raise ValueError("emitter and detector are co-located")
    u = d_vec / d
    cos_emit = float(u @ unit_vector(*led_boresight))
    cos_inc = float((-u) @ unit_vector(*pd_normal))
    delay = d / SPEED_OF_LIGHT
    if cos_emit <= 0.0 or cos_inc <= 0.0:
        return 0.0, delay
    if math.degrees(math.acos(min(1.0, cos_inc))) > fov_deg:
        return 0.0, delay
    m = lambertian_order
    gain = (m + 1.0) * pd_area_m2 * (cos_emit ** m) * cos_inc / (2.0 * math.pi * d * d)
    return gain, delay


# --- multi-link and cascaded compositions -----------------------------------

def assemble_multilink(blocks, n_t: int, n_r: int) -> np.ndarray:
    """Block matrix [[H_11 ... H_1NR], ..., [H_NT1 ... H_NTNR]].

    blocks maps (i, j) with 1-based link indices to per-link channel
    matrices of one common shape.
    """
    rows = []
    shape = None
    for i in range(1, n_t + 1):
        row = []
        for j in range(1, n_r + 1):
            if (i, j) not in blocks:
                raise KeyError(f"missing link block ({i}, {j})")
            h = np.asarray(blocks[(i, j)])
            if shape is None:
                shape = h.shape
            elif h.shape != shape:
                raise ValueError(f"link block ({i}, {j}) has shape {h.shape}, expected {shape}")
            row.append(h)
        rows.append(row)
    return np.block(rows)


def ris_cascade(h_ir: np.ndarray, phi: np.ndarray, h_ti: np.ndarray,
                h_tr: np.ndarray, f: np.ndarray) -> np.ndarray:
    """(H_IR Phi H_TI + H_TR) f with a diagonal reflection matrix Phi."""
    h_ir = np.asarray(h_ir)
    h_ti = np.asarray(h_ti)
    h_tr = np.asarray(h_tr)
    f = np.asarray(f).reshape(-1)
    phi = np.asarray(phi)
    if phi.ndim == 2:
        if phi.shape[0] != phi.shape[1] or not np.allclose(phi, np.diag(np.diag(phi))):
            raise ValueError("reflection matrix must be diagonal")
        phi = np.diag(phi)
    n_ris = phi.shape[0]
    m_r, m_t = h_tr.shape
    if h_ir.shape != (m_r, n_ris) or h_ti.shape != (n_ris, m_t) or f.shape != (m_t,):
        raise ValueError("cascade dimensions do not conform")
    return (h_ir * phi[None, :]) @ h_ti @ f + h_tr @ f


def steering_vector(offsets_m: np.ndarray, azimuth: float, elevation: float,
                    fc_hz: float) -> np.ndarray:
    """Unit-norm array response toward (azimuth, elevation)."""
    from .geometry import unit_vector

    u = unit_vector(azimuth, elevation)
    lam = SPEED_OF_LIGHT / fc_hz
    phase = 2.0 * math.pi / lam * (np.asarray(offsets_m) @ u)
    v = np.exp(1j * phase)
    return v / math.sqrt(len(v))
