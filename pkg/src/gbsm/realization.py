"""Channel realization container and its on-disk formats.

Binary layout (little-endian):
  magic "6GPC", version u32, dims u32 x 4 (snapshots, M_R, M_T, F),
  f_c f64 (Hz), delta_t f64 (s), seed u64,
  then per (t, q, p) and per frequency bin: tap count u32 followed by
  (delay f64 s, re f64, im f64) per tap. With one frequency bin this is one
  record per (t, q, p); more bins repeat the record bin-fastest.

A CSV export mirrors the tap stream for the plotting component.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field

import numpy as np

MAGIC = b"6GPC"
VERSION = 1
_HEADER = struct.Struct("<4sIIIIIddQ")


@dataclass
class ChannelRealization:
    """Per-snapshot, per-antenna-pair, per-bin tap lists plus metadata.

    cells[t][q][p][f] is (delays, amps) with delays sorted ascending.
    """

    fc_hz: float
    delta_t_s: float
    seed: int
    dims: tuple[int, int, int, int]  # (snapshots, M_R, M_T, F)
    cells: list
    k_series: np.ndarray | None = None
    scenario: str = ""
    bin_spacing_hz: float = 0.0  # in-memory metadata; not part of the binary header
    ray_log: list = field(default_factory=list)  # per-snapshot reference-pair ray states

    def taps(self, t: int, q: int, p: int, f: int = 0):
        return self.cells[t][q][p][f]

    def narrowband(self, t: int, f: int = 0) -> np.ndarray:
        """(M_R, M_T) matrix of tap-amplitude sums at snapshot t, bin f."""
        _, m_r, m_t, _ = self.dims
        h = np.zeros((m_r, m_t), dtype=complex)
        for q in range(m_r):
            for p in range(m_t):
                _, amps = self.cells[t][q][p][f]
                h[q, p] = amps.sum()
        return h

    def matrix_series(self, f: int = 0) -> np.ndarray:
        return np.stack([self.narrowband(t, f) for t in range(self.dims[0])])


def _sorted_cell(delays: np.ndarray, amps: np.ndarray):
    order = np.argsort(delays, kind="stable")
    return delays[order], amps[order]


def build_cells(snapshot_iter, m_r: int, m_t: int, n_f: int):
    """Collect per-pair tap lists from dense snapshot data (see simulate)."""
    cells = []
    for snap in snapshot_iter:
        grid = [[[None] * n_f for _ in range(m_t)] for _ in range(m_r)]
        for q in range(m_r):
            for p in range(m_t):
                for f in range(n_f):
                    delays, amps = snap.pair_taps(q, p, f)
                    grid[q][p][f] = _sorted_cell(delays, amps)
        cells.append(grid)
    return cells


def write_binary(real: ChannelRealization, path) -> None:
    t_n, m_r, m_t, n_f = real.dims
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(MAGIC, VERSION, t_n, m_r, m_t, n_f,
                              real.fc_hz, real.delta_t_s, real.seed))
        for t in range(t_n):
            for q in range(m_r):
                for p in range(m_t):
                    for f in range(n_f):
                        delays, amps = real.cells[t][q][p][f]
                        fh.write(struct.pack("<I", len(delays)))
                        if len(delays):
                            rec = np.empty((len(delays), 3))
                            rec[:, 0] = delays
                            rec[:, 1] = amps.real
                            rec[:, 2] = amps.imag
                            fh.write(rec.astype("<f8").tobytes())


def read_binary(path) -> ChannelRealization:
    with open(path, "rb") as fh:
        head = fh.read(_HEADER.size)
        magic, version, t_n, m_r, m_t, n_f, fc, dt, seed = _HEADER.unpack(head)
        if magic != MAGIC:
            raise ValueError(f"{path}: not a channel realization file")
        if version != VERSION:
            raise ValueError(f"{path}: unsupported version {version}")
        cells = []
        for _ in range(t_n):
            grid = [[[None] * n_f for _ in range(m_t)] for _ in range(m_r)]
            for q in range(m_r):
                for p in range(m_t):
                    for f in range(n_f):
                        (count,) = struct.unpack("<I", fh.read(4))
                        if count:
                            rec = np.frombuffer(fh.read(24 * count), dtype="<f8").reshape(count, 3)
                            grid[q][p][f] = (rec[:, 0].copy(), (rec[:, 1] + 1j * rec[:, 2]))
                        else:
                            grid[q][p][f] = (np.empty(0), np.empty(0, dtype=complex))
            cells.append(grid)
    return ChannelRealization(fc_hz=fc, delta_t_s=dt, seed=seed,
                              dims=(t_n, m_r, m_t, n_f), cells=cells)


def write_csv(real: ChannelRealization, path) -> None:
    t_n, m_r, m_t, n_f = real.dims
    with open(path, "w") as fh:
        fh.write("t,q,p,f,delay_s,re,im\n")
        for t in range(t_n):
            for q in range(m_r):
                for p in range(m_t):
                    for f in range(n_f):
                        delays, amps = real.cells[t][q][p][f]
                        for d, a in zip(delays.tolist(), amps.tolist()):
                            fh.write(f"{t},{q},{p},{f},{d!r},{a.real!r},{a.imag!r}\n")


def write_ray_log_csv(real: ChannelRealization, path) -> None:
    """Reference-pair ray state dump: delay, power, Doppler per snapshot."""
    with open(path, "w") as fh:
        fh.write("t,cluster,delay_s,power,doppler_hz\n")
        for t, entries in enumerate(real.ray_log):
            for cluster_id, delay, power, doppler in entries:
                fh.write(f"{t},{cluster_id},{delay!r},{power!r},{doppler!r}\n")
