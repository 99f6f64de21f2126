"""Channel statistics estimators over generated realizations.

Conventions (documented once, used everywhere): tap amplitudes carry the
phasor e^{+j 2 pi f_c tau}, the transfer function extends it with
e^{+j 2 pi (f - f_c) tau}, correlations conjugate the shifted sample,
R = E[H(t, f) H*(t + dt, f + df)], the delay spectrum is the inverse
transform of the frequency correlation and the Doppler spectrum the forward
transform of the temporal one. Under these pairings an approaching receiver
peaks at positive Doppler and the frequency correlation of discrete taps is
sum_i P_i e^{-j 2 pi df tau_i}.

The expectation is taken over everything that varies per seed; pooling
several realizations estimates the ensemble average, a single realization
falls back to lag products along the grid (an ergodic surrogate).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .realization import ChannelRealization


@dataclass
class Ctf:
    """Transfer-function grid H(t, f) for one antenna pair."""

    values: np.ndarray  # (T, K) complex
    delta_t_s: float
    freq_offsets_hz: np.ndarray  # (K,)


@dataclass
class CorrelationSeries:
    lags: np.ndarray
    values: np.ndarray  # complex
    axis: str  # "time_s" | "freq_hz" | "space_elems"
    normalized: bool
    delta: float = 0.0  # grid step of the lag axis

    def magnitude(self) -> np.ndarray:
        return np.abs(self.values)


@dataclass
class CoherenceResult:
    threshold: float
    lag: float
    exceeds_window: bool
    window: float


@dataclass
class StatReport:
    """Estimator outputs with axis metadata, JSON-serializable."""

    entries: dict = field(default_factory=dict)

    def add(self, name: str, **payload):
        self.entries[name] = payload

    def to_json_dict(self) -> dict:
        def conv(v):
            if isinstance(v, np.ndarray):
                if np.iscomplexobj(v):
                    return {"re": v.real.tolist(), "im": v.imag.tolist()}
                return v.tolist()
            if isinstance(v, (np.floating, np.integer)):
                return v.item()
            if isinstance(v, dict):
                return {k: conv(x) for k, x in v.items()}
            if isinstance(v, (list, tuple)):
                return [conv(x) for x in v]
            return v
        return {k: conv(v) for k, v in self.entries.items()}


def pair_series(real: ChannelRealization, q: int = 0, p: int = 0, f: int = 0) -> np.ndarray:
    """Narrowband H(t) for one antenna pair: tap-amplitude sums."""
    t_n = real.dims[0]
    return np.array([real.cells[t][q][p][f][1].sum() for t in range(t_n)])


def build_ctf(real: ChannelRealization, q: int = 0, p: int = 0,
              freq_offsets_hz=None, f: int = 0) -> Ctf:
    """H(t, f) = sum_taps amp * e^{+j 2 pi (f - f_c) tau} on an offset grid."""
    if freq_offsets_hz is None:
        freq_offsets_hz = np.array([0.0])
    offs = np.asarray(freq_offsets_hz, dtype=float)
    t_n = real.dims[0]
    out = np.zeros((t_n, len(offs)), dtype=complex)
    for t in range(t_n):
        delays, amps = real.cells[t][q][p][f]
        if len(delays):
            out[t] = (amps[None, :] * np.exp(1j * 2.0 * math.pi * offs[:, None] * delays[None, :])).sum(axis=1)
    return Ctf(values=out, delta_t_s=real.delta_t_s, freq_offsets_hz=offs)


def _as_list(reals):
    return reals if isinstance(reals, (list, tuple)) else [reals]


def stfcf(reals, dq: int = 0, dp: int = 0, dt_steps: int = 0, df_hz: float = 0.0,
          q: int = 0, p: int = 0, f: int = 0) -> complex:
    """Space-time-frequency correlation at one lag tuple.

    E[H_{qp}(t, f) H*_{q~p~}(t + dt, f + df)], averaged over valid grid
    anchors and over the pooled realizations.
    """
    reals = _as_list(reals)
    t_n, m_r, m_t, _ = reals[0].dims
    if not (0 <= q + dq < m_r and 0 <= p + dp < m_t):
        raise ValueError("spatial lag exceeds the array")
    if not (0 <= dt_steps < t_n):
        raise ValueError("time lag exceeds the window")
    acc = 0.0 + 0.0j
    count = 0
    for real in reals:
        h0 = build_ctf(real, q, p, np.array([0.0]), f).values[:, 0]
        h1 = build_ctf(real, q + dq, p + dp, np.array([df_hz]), f).values[:, 0]
        a = h0[: t_n - dt_steps] * np.conj(h1[dt_steps:])
        acc += a.sum()
        count += len(a)
    return acc / count


def temporal_acf(reals, q: int = 0, p: int = 0, f: int = 0,
                 max_lag_steps: int | None = None, normalized: bool = True) -> CorrelationSeries:
    """R(dt) = E[H(t) H*(t + dt)] over the snapshot grid."""
    reals = _as_list(reals)
    t_n = reals[0].dims[0]
    lags = t_n - 1 if max_lag_steps is None else min(max_lag_steps, t_n - 1)
    acc = np.zeros(lags + 1, dtype=complex)
    cnt = np.zeros(lags + 1)
    for real in reals:
        h = pair_series(real, q, p, f)
        for k in range(lags + 1):
            prod = h[: t_n - k] * np.conj(h[k:])
            acc[k] += prod.sum()
            cnt[k] += len(prod)
    values = acc / cnt
    if normalized:
        values = values / values[0].real
    dt = reals[0].delta_t_s
    return CorrelationSeries(lags=np.arange(lags + 1) * dt, values=values,
                             axis="time_s", normalized=normalized, delta=dt)


def fcf(reals, df_step_hz: float, n_steps: int, q: int = 0, p: int = 0, f: int = 0,
        normalized: bool = True, mode: str = "taps") -> CorrelationSeries:
    """Frequency correlation R(df) = E[H(t, f) H*(t, f + df)].

    mode "taps" evaluates the expectation over the uniform initial ray
    phases in closed form, sum_i P_i e^{-j 2 pi df tau_i} per snapshot
    (cross terms vanish exactly); mode "ctf" estimates the same quantity
    from transfer-function lag products and carries their sampling noise.
    """
    reals = _as_list(reals)
    offs = np.arange(n_steps) * df_step_hz
    acc = np.zeros(n_steps, dtype=complex)
    cnt = 0
    if mode == "taps":
        for real in reals:
            for t in range(real.dims[0]):
                delays, amps = real.cells[t][q][p][f]
                if len(delays):
                    powers = np.abs(amps) ** 2
                    acc += (powers[None, :]
                            * np.exp(-1j * 2.0 * math.pi * offs[:, None] * delays[None, :])).sum(axis=1)
                cnt += 1
        values = acc / cnt
    elif mode == "ctf":
        for real in reals:
            grid = build_ctf(real, q, p, offs, f).values  # (T, K)
            for k in range(n_steps):
                prod = grid[:, : n_steps - k] * np.conj(grid[:, k: n_steps])
                acc[k] += prod.sum()
            cnt += grid.shape[0]
        values = acc / (cnt * np.arange(n_steps, 0, -1))
    else:
        raise ValueError(f"unknown mode {mode!r}")
    if normalized:
        values = values / values[0].real
    return CorrelationSeries(lags=offs, values=values, axis="freq_hz",
                             normalized=normalized, delta=df_step_hz)


def spatial_ccf(reals, side: str = "rx", other_index: int = 0, f: int = 0,
                spacing_m: float = 1.0, normalized: bool = True) -> CorrelationSeries:
    """Spatial correlation over element offsets on one array side."""
    reals = _as_list(reals)
    _, m_r, m_t, _ = reals[0].dims
    n = m_r if side == "rx" else m_t
    acc = np.zeros(n, dtype=complex)
    cnt = np.zeros(n)
    for real in reals:
        if side == "rx":
            series = np.stack([pair_series(real, e, other_index, f) for e in range(n)])
        else:
            series = np.stack([pair_series(real, other_index, e, f) for e in range(n)])
        for k in range(n):
            prod = series[: n - k] * np.conj(series[k:])
            acc[k] += prod.sum()
            cnt[k] += prod.size
    values = acc / cnt
    if normalized:
        values = values / values[0].real
    return CorrelationSeries(lags=np.arange(n) * spacing_m, values=values,
                             axis="space_m", normalized=normalized, delta=spacing_m)


def delay_psd(real: ChannelRealization, q: int = 0, p: int = 0, f: int = 0,
              resolution_s: float | None = None, bandwidth_hz: float | None = None):
    """Tap powers binned on a delay grid, per snapshot.

    The pre-binning content is exactly the discrete sum of ray powers at
    their delays; the default bin width is 1/(4 * bandwidth).
    """
    if resolution_s is None:
        if bandwidth_hz is None:
            raise ValueError("need a resolution or a bandwidth")
        resolution_s = 1.0 / (4.0 * bandwidth_hz)
    t_n = real.dims[0]
    max_delay = 0.0
    for t in range(t_n):
        delays, _ = real.cells[t][q][p][f]
        if len(delays):
            max_delay = max(max_delay, float(delays.max()))
    n_bins = int(math.floor(max_delay / resolution_s)) + 1
    grid = (np.arange(n_bins) + 0.5) * resolution_s
    psd = np.zeros((t_n, n_bins))
    for t in range(t_n):
        delays, amps = real.cells[t][q][p][f]
        if len(delays):
            idx = np.minimum((delays / resolution_s).astype(int), n_bins - 1)
            np.add.at(psd[t], idx, np.abs(amps) ** 2)
    return grid, psd


def doppler_psd(acf: CorrelationSeries, window: str = "hann"):
    """Forward transform of the temporal correlation onto a Doppler axis.

    The series is extended Hermitian-symmetrically, optionally windowed to
    tame finite-window leakage, and transformed; tiny negative excursions
    from windowing are clipped to zero.
    """
    if acf.axis != "time_s":
        raise ValueError("Doppler spectrum needs a temporal correlation series")
    dt = acf.delta
    if dt <= 0:
        raise ValueError("non-uniform or empty time axis")
    r = acf.values
    full = np.concatenate([np.conj(r[:0:-1]), r])  # lags -(L-1)..(L-1)
    n = len(full)
    if window == "hann":
        w = np.hanning(n)
    elif window in ("rect", "rectangular", "none"):
        w = np.ones(n)
    else:
        raise ValueError(f"unknown window {window!r}")
    spec = np.fft.fftshift(np.fft.fft(np.fft.ifftshift(full * w))) * dt
    freqs = np.fft.fftshift(np.fft.fftfreq(n, dt))
    psd = np.clip(spec.real, 0.0, None)
    return freqs, psd


def stationary_interval(psd_over_t: np.ndarray, delta_t_s: float,
                        c_thresh: float = 0.8, anchors=None):
    """Largest interval with delay-spectrum correlation above the threshold.

    R(t, dt) = int S(t) S(t+dt) / max(int S(t)^2, int S(t+dt)^2); the
    interval at anchor t is the largest dt on the grid keeping R >= thresh
    (0 when even the zero lag fails, i.e. thresh > 1).
    """
    s = np.asarray(psd_over_t, dtype=float)
    t_n = s.shape[0]
    energy = (s * s).sum(axis=1)
    if anchors is None:
        anchors = range(t_n)
    out = []
    for t in anchors:
        best = -1
        for k in range(t_n - t):
            cross = float((s[t] * s[t + k]).sum())
            denom = max(energy[t], energy[t + k])
            r = cross / denom if denom > 0 else 0.0
            if r >= c_thresh:
                best = max(best, k)
        out.append((t * delta_t_s, 0.0 if best < 0 else best * delta_t_s))
    return np.asarray(out)


def svs(h: np.ndarray) -> float:
    """Ratio of the largest to the smallest singular value."""
    h = np.asarray(h)
    if h.ndim != 2 or min(h.shape) < 1:
        raise ValueError("need a 2D matrix")
    if not np.isfinite(h).all():
        raise ValueError("matrix must be finite")
    sv = np.linalg.svd(h, compute_uv=False)
    smin = sv.min()
    if smin == 0.0:
        return math.inf
    return float(sv.max() / smin)


def coherence(series: CorrelationSeries, threshold: float) -> CoherenceResult:
    """Smallest lag where |R| first falls to the threshold (interpolated)."""
    if not (0.0 <= threshold <= 1.0):
        raise ValueError("threshold must lie in [0, 1]")
    if not series.normalized:
        raise ValueError("coherence needs a normalized correlation series")
    mag = series.magnitude()
    lags = series.lags
    window = float(lags[-1]) if len(lags) else 0.0
    if threshold >= mag[0]:
        return CoherenceResult(threshold, 0.0, False, window)
    for i in range(1, len(mag)):
        if mag[i] <= threshold:
            m0, m1 = mag[i - 1], mag[i]
            frac = 0.0 if m0 == m1 else (m0 - threshold) / (m0 - m1)
            lag = lags[i - 1] + frac * (lags[i] - lags[i - 1])
            return CoherenceResult(threshold, float(lag), False, window)
    return CoherenceResult(threshold, window, True, window)


def _weighted_std(x: np.ndarray, powers: np.ndarray) -> float:
    x = np.asarray(x, dtype=float)
    p = np.asarray(powers, dtype=float)
    total = p.sum()
    if total <= 0:
        raise ValueError("need positive total power")
    w = p / total
    mean = float(w @ x)
    second = float(w @ (x * x))
    return math.sqrt(max(second - mean * mean, 0.0))


def rms_doppler(doppler_hz: np.ndarray, powers: np.ndarray) -> float:
    """Power-weighted Doppler-frequency dispersion, Hz."""
    return _weighted_std(doppler_hz, powers)


def rms_delay(delays_s: np.ndarray, powers: np.ndarray) -> float:
    """Power-weighted delay dispersion, seconds."""
    return _weighted_std(delays_s, powers)
