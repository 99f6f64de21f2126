"""Spatially correlated large-scale parameters.

Eight parameters (delay spread, K-factor, shadowing, the four angle spreads,
XPR) are generated as mu + X(P) * sigma in their log/dB domains, where X(P)
is a unit-Gaussian random field over placement realized with a sum of
sinusoids. Statistic tables carry height- and elevation-dependent branches.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from .rng import substream

# (1 + x) * exp(-x) = 1/e, so the field autocorrelation equals 1/e at the
# configured correlation distance.
_MATERN_X = brentq(lambda x: (1.0 + x) * math.exp(-x) - math.exp(-1.0), 1.0, 4.0)


def _sample_wavenumbers(rng: np.random.Generator, n: int, d_corr: float) -> np.ndarray:
    """Draw radial wave numbers from a Matern-3/2 spectral density.

    The resulting field is differentiable (a pure exponential ACF is not)
    while its autocorrelation still decays to 1/e at d_corr and is
    negligible at large lags. Stratified inverse-CDF sampling via the closed
    form F(k) = (2/pi) * (theta - sin(4 theta)/4), theta = arctan(k/kappa);
    stratification keeps each realization's spectrum close to the target.
    """
    kappa = _MATERN_X / d_corr
    theta_grid = np.linspace(0.0, math.pi / 2 - 1e-9, 4097)
    cdf = (2.0 / math.pi) * (theta_grid - np.sin(4.0 * theta_grid) / 4.0)
    u = (np.arange(n) + rng.random(n)) / n
    theta = np.interp(u, cdf, theta_grid)
    return rng.permutation(kappa * np.tan(theta))


def _sample_directions(rng: np.random.Generator, n: int) -> np.ndarray:
    """Evenly spread unit directions under a uniformly random rotation."""
    i = np.arange(n) + 0.5
    golden = math.pi * (1.0 + math.sqrt(5.0))
    z = 1.0 - 2.0 * i / n
    rho = np.sqrt(1.0 - z * z)
    dirs = np.stack([rho * np.cos(golden * i), rho * np.sin(golden * i), z], axis=1)
    a = rng.normal(size=(3, 3))
    q, r = np.linalg.qr(a)
    q *= np.sign(np.diag(r))
    if np.linalg.det(q) < 0:
        q[:, 0] *= -1.0
    return dirs @ q.T


@dataclass
class SosField:
    """Sum-of-sinusoids unit-Gaussian random field over 3D positions.

    Deterministic given (seed, tag): evaluation at the same point always
    returns the same value. Spatial autocorrelation approximates
    exp(-d/d_corr) with the smooth spectrum above.
    """

    seed: int
    d_corr: float
    n_sinusoids: int = 100
    tag: str = "sos"

    def __post_init__(self):
        if self.d_corr <= 0:
            raise ValueError("correlation distance must be positive")
        rng = substream(self.seed, "lsp-field", self.tag)
        k = _sample_wavenumbers(rng, self.n_sinusoids, self.d_corr)
        u = _sample_directions(rng, self.n_sinusoids)
        self._wave = k[:, None] * u  # (N, 3)
        self._phase = rng.uniform(0.0, 2.0 * math.pi, self.n_sinusoids)

    def eval(self, points: np.ndarray) -> np.ndarray:
        """Evaluate at (..., 3) positions; returns (...) values."""
        pts = np.asarray(points, dtype=float)
        args = pts @ self._wave.T + self._phase  # (..., N)
        return math.sqrt(2.0 / self.n_sinusoids) * np.cos(args).sum(axis=-1)

    def __call__(self, point: np.ndarray) -> float:
        return float(self.eval(np.asarray(point, dtype=float)))


@dataclass
class FrozenGaussian:
    """Spatial-consistency-off stand-in: one N(0,1) draw, constant over space."""

    seed: int
    tag: str = "frozen"

    def __post_init__(self):
        self._value = float(substream(self.seed, "lsp-frozen", self.tag).normal())

    def eval(self, points: np.ndarray) -> np.ndarray:
        pts = np.asarray(points, dtype=float)
        return np.full(pts.shape[:-1], self._value)

    def __call__(self, point) -> float:
        return self._value


def sos_field_eval(fld, placement) -> float:
    """Field value at a Tx/Rx placement.

    The placement is (tx_pos, rx_pos) arrays or a single point; a pair is
    reduced to the Tx/Rx midpoint (the field's documented domain reduction).
    """
    p = np.asarray(placement, dtype=float)
    if p.shape == (2, 3):
        p = 0.5 * (p[0] + p[1])
    return float(fld(p))


# --- statistic tables -------------------------------------------------------

_DOMAINS = ("log10", "db")


@dataclass
class LspParam:
    """Distribution of one large-scale parameter in its log/dB domain.

    kind:
      const       -- mu, sigma fixed
      fc_log      -- mu = a*log10(f_c/GHz) + b
      h_log       -- mu = a*log10(h_ut) + b; sigma = sig_c*exp(sig_d*h_ut)
      dist_cap    -- mu = max(cap, slope*(d_2d/1000)); sigma fixed
      branch_lgds -- mu from the printed terrestrial/aerial/satellite
                     branches (see lgds_mu), selected by link elevation
                     when given, otherwise by terminal height
    domain "log10": value = 10**x (seconds or degrees); "db": value = x dB.
    """

    kind: str = "const"
    mu: float = 0.0
    sigma: float = 0.0
    d_corr: float = 50.0
    domain: str = "log10"
    a: float = 0.0
    b: float = 0.0
    sig_c: float = 0.0
    sig_d: float = 0.0
    cap: float = 0.0
    slope: float = 0.0

    def __post_init__(self):
        if self.sigma < 0 or self.sig_c < 0:
            raise ValueError("sigma must be nonnegative")
        if self.d_corr <= 0:
            raise ValueError("correlation distance must be positive")
        if self.domain not in _DOMAINS:
            raise ValueError(f"unknown domain {self.domain!r}")

    def moments(self, fc_ghz: float, h_ut_m: float | None, d_2d_m: float | None,
                elevation_deg: float | None = None) -> tuple[float, float]:
        if self.kind == "const":
            return self.mu, self.sigma
        if self.kind == "fc_log":
            return self.a * math.log10(fc_ghz) + self.b, self.sigma
        if self.kind == "h_log":
            if h_ut_m is None or h_ut_m <= 0:
                raise ValueError("height-dependent parameter needs h_ut_m > 0")
            return (self.a * math.log10(h_ut_m) + self.b,
                    self.sig_c * math.exp(self.sig_d * h_ut_m))
        if self.kind == "dist_cap":
            if d_2d_m is None:
                raise ValueError("distance-dependent parameter needs d_2d_m")
            return max(self.cap, self.slope * d_2d_m / 1000.0), self.sigma
        if self.kind == "branch_lgds":
            if elevation_deg is not None:
                return lgds_mu(fc_ghz, "leo", elevation_deg=elevation_deg), self.sigma
            if h_ut_m is not None and h_ut_m > 22.5:
                return lgds_mu(fc_ghz, "uav", h_ut_m=h_ut_m), self.sigma
            return lgds_mu(fc_ghz, "terrestrial", h_ut_m=h_ut_m), self.sigma
        raise ValueError(f"unknown parameter kind {self.kind!r}")


PARAM_NAMES = ("ds", "kf", "sh", "asd", "asa", "esd", "esa", "xpr")


@dataclass
class LspStatTable:
    """Per-parameter statistics (mean, std, correlation distance)."""

    params: dict[str, LspParam] = field(default_factory=dict)

    def __post_init__(self):
        missing = [n for n in PARAM_NAMES if n not in self.params]
        if missing:
            raise ValueError(f"statistic table missing parameters: {missing}")

    def __getitem__(self, name: str) -> LspParam:
        return self.params[name]


@dataclass
class LspSet:
    """Sampled large-scale parameters at one placement."""

    ds_s: float  # delay spread, seconds
    kf_linear: float  # K-factor, linear power ratio
    sh_db: float  # shadowing, dB
    asd_deg: float
    asa_deg: float
    esd_deg: float
    esa_deg: float
    xpr_db: float

    def __post_init__(self):
        if self.ds_s <= 0:
            raise ValueError("delay spread must be positive")
        for s in (self.asd_deg, self.asa_deg, self.esd_deg, self.esa_deg):
            if s <= 0:
                raise ValueError("angle spreads must be positive")


def make_fields(seed: int, table: LspStatTable, n_sinusoids: int = 100,
                spatial_consistency: bool = True) -> dict:
    """One independent field per parameter (cross-parameter coupling is not modeled)."""
    if spatial_consistency:
        return {name: SosField(seed, table[name].d_corr, n_sinusoids, tag=name)
                for name in PARAM_NAMES}
    return {name: FrozenGaussian(seed, tag=name) for name in PARAM_NAMES}


def sample_lsps(table: LspStatTable, fields: dict, placement, fc_ghz: float,
                h_ut_m: float | None = None, d_2d_m: float | None = None,
                elevation_deg: float | None = None) -> LspSet:
    """mu + X(P)*sigma per parameter, mapped out of its log/dB domain."""
    draws = {}
    for name in PARAM_NAMES:
        par = table[name]
        mu, sigma = par.moments(fc_ghz, h_ut_m, d_2d_m, elevation_deg)
        draws[name] = mu + sos_field_eval(fields[name], placement) * sigma

    def lin(name):
        return 10.0 ** draws[name]

    return LspSet(
        ds_s=lin("ds"),
        kf_linear=10.0 ** (draws["kf"] / 10.0),
        sh_db=draws["sh"],
        asd_deg=lin("asd"),
        asa_deg=lin("asa"),
        esd_deg=lin("esd"),
        esa_deg=lin("esa"),
        xpr_db=draws["xpr"],
    )


def lgds_mu(fc_ghz: float, branch: str, h_ut_m: float | None = None,
            elevation_deg: float | None = None) -> float:
    """Mean log10 delay spread, urban macro NLoS around the 2-4 GHz band.

    Three branches by terminal height / link elevation:
      terrestrial (1.5 m < h <= 22.5 m): -0.204*log10(f_c) - 6.28
      aerial      (22.5 m < h <= 300 m): 0.0965*log10(h) - 7.503
      satellite   (link elevation 10 deg): -7.21
    """
    if branch == "terrestrial":
        if h_ut_m is not None and not (1.5 < h_ut_m <= 22.5):
            raise ValueError("terrestrial branch valid for 1.5 m < h_ut <= 22.5 m")
        return -0.204 * math.log10(fc_ghz) - 6.28
    if branch == "uav":
        if h_ut_m is None or not (22.5 < h_ut_m <= 300.0):
            raise ValueError("aerial branch valid for 22.5 m < h_ut <= 300 m")
        return 0.0965 * math.log10(h_ut_m) - 7.503
    if branch == "leo":
        if elevation_deg is None or abs(elevation_deg - 10.0) > 1e-9:
            raise ValueError("satellite branch tabulated at 10 deg link elevation only")
        return -7.21
    raise ValueError(f"unknown branch {branch!r}")


# --- built-in tables --------------------------------------------------------

_KF_DEFAULT = LspParam(kind="const", mu=9.0, sigma=3.5, d_corr=12.0, domain="db")
_XPR_DEFAULT = LspParam(kind="const", mu=8.0, sigma=4.0, d_corr=15.0, domain="db")


def _table(**kw) -> LspStatTable:
    params = {"kf": _KF_DEFAULT, "xpr": _XPR_DEFAULT}
    params.update(kw)
    return LspStatTable(params=params)


BUILTIN_TABLES = {
    "thz_indoor": _table(
        ds=LspParam(mu=-7.72, sigma=0.18, d_corr=6.0),
        asa=LspParam(mu=1.31, sigma=0.855, d_corr=8.0),
        asd=LspParam(mu=1.6, sigma=0.18, d_corr=7.0),
        esa=LspParam(mu=0.8, sigma=0.165, d_corr=4.0),
        esd=LspParam(mu=-1.31, sigma=0.62, d_corr=5.0),
        sh=LspParam(mu=0.0, sigma=3.0, d_corr=50.0, domain="db"),
    ),
    "uav_to_ground": _table(
        ds=LspParam(kind="h_log", a=-0.31, b=-6.845, sig_c=0.7294, sig_d=0.0014, d_corr=30.0),
        asa=LspParam(kind="h_log", a=-2.498, b=-1.602, sig_c=1.0389, sig_d=0.0085, d_corr=20.0),
        asd=LspParam(kind="h_log", a=-0.0135, b=1.345, sig_c=1.0188, sig_d=0.0001, d_corr=50.0),
        esa=LspParam(kind="h_log", a=-0.289, b=0.225, sig_c=0.9576, sig_d=0.0018, d_corr=50.0),
        esd=LspParam(kind="h_log", a=-0.2975, b=-0.5798, sig_c=1.0757, sig_d=0.0059, d_corr=50.0),
        sh=LspParam(mu=0.0, sigma=6.0, d_corr=50.0, domain="db"),
    ),
    "ultra_massive_mimo": _table(
        ds=LspParam(mu=-7.395, sigma=0.1665, d_corr=30.0),
        asa=LspParam(mu=1.1392, sigma=0.1069, d_corr=20.0),
        asd=LspParam(mu=1.8699, sigma=0.11, d_corr=50.0),
        esa=LspParam(mu=1.2602, sigma=0.16, d_corr=50.0),
        esd=LspParam(kind="dist_cap", cap=-0.5, slope=-2.1, sigma=0.49, d_corr=50.0),
        sh=LspParam(mu=0.0, sigma=6.0, d_corr=50.0, domain="db"),
    ),
}
