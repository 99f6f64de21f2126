"""Batch entry points.

  gbsm run    --config c.cfg --seeds 10 --out dir
  gbsm stats  --in 'dir/real_*.6gpc' --estimators acf,doppler-psd --out sdir
  gbsm sweep  --config c.cfg --param clusters.gamma --values 0,0.5 \
              --metric median-svs --out dir

All randomness flows from the seed list; worker count is capped by the
GBSM_THREADS environment variable; outputs land under --out only. Exit code
0 means every requested output was written; failures emit a JSON error
record on stderr and a nonzero code.
"""

from __future__ import annotations

import argparse
import glob
import hashlib
import json
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import scenarios, stats
from .realization import read_binary, write_binary, write_csv, write_ray_log_csv
from .simulate import simulate_realization

ESTIMATORS = ("acf", "fcf", "ccf", "delay-psd", "doppler-psd", "stationary-interval",
               "svs", "coherence-time", "coherence-bandwidth", "coherence-distance",
               "rms-delay", "rms-doppler")

METRICS = ("median-svs", "mean-rms-doppler", "median-stationary-interval")


def _fail(message: str, code: int = 1):
    sys.stderr.write(json.dumps({"error": message}) + "\n")
    return code


def _parse_seeds(spec: str) -> list[int]:
    if "," in spec:
        seeds = [int(s) for s in spec.split(",") if s.strip() != ""]
    else:
        n = int(spec)
        seeds = list(range(n)) if n >= 0 else []
    if not seeds:
        raise ValueError("need at least one seed")
    if len(set(seeds)) != len(seeds):
        raise ValueError("seeds must be distinct")
    return seeds


def _workers() -> int:
    try:
        return max(1, int(os.environ.get("GBSM_THREADS", "1")))
    except ValueError:
        return 1


def _config_hash(cfg) -> str:
    return hashlib.sha256(scenarios.serialize(cfg).encode()).hexdigest()


# --- run ---------------------------------------------------------------------

def cmd_run(args) -> int:
    try:
        cfg = scenarios.load_config(args.config)
    except scenarios.ConfigError as exc:
        return _fail(f"config: {exc}")
    try:
        seeds = _parse_seeds(args.seeds)
    except ValueError as exc:
        return _fail(str(exc))
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    t0 = time.perf_counter()
    links = [(i, j) for i in range(cfg.n_tx) for j in range(cfg.n_rx)]

    def one(seed: int) -> list[str]:
        files = []
        for (i, j) in links:
            real = simulate_realization(cfg, seed, i, j, ray_log=args.dump_rays)
            suffix = f"_link{i + 1}_{j + 1}" if len(links) > 1 else ""
            path = out / f"real_{seed}{suffix}.6gpc"
            write_binary(real, path)
            files.append(path.name)
            if args.csv:
                write_csv(real, out / f"taps_{seed}{suffix}.csv")
                files.append(f"taps_{seed}{suffix}.csv")
            if args.dump_rays:
                write_ray_log_csv(real, out / f"rays_{seed}{suffix}.csv")
                files.append(f"rays_{seed}{suffix}.csv")
        return files

    try:
        workers = _workers()
        if workers > 1:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                produced = list(pool.map(one, seeds))
        else:
            produced = [one(s) for s in seeds]
    except Exception as exc:  # surface validation/IO failures verbatim
        return _fail(f"run: {exc}")
    summary = {
        "config": str(args.config),
        "config_hash": _config_hash(cfg),
        "scenario": cfg.name,
        "seeds": seeds,
        "dims": [cfg.snapshots,
                 cfg.rx_array_runtime().elements, cfg.tx_array_runtime().elements,
                 cfg.frequency_bins],
        "files": [f for group in produced for f in group],
        "elapsed_s": time.perf_counter() - t0,
    }
    (out / "run_summary.json").write_text(json.dumps(summary, indent=2) + "\n")
    return 0


# --- stats -------------------------------------------------------------------

def _write_series_csv(path, header: str, rows) -> None:
    with open(path, "w") as fh:
        fh.write(header + "\n")
        for row in rows:
            fh.write(",".join(repr(float(v)) if isinstance(v, float) else str(v) for v in row) + "\n")


def _series_rows(series):
    return [(float(l), float(v.real), float(v.imag), float(abs(v)))
            for l, v in zip(series.lags, series.values)]


def _ray_log_path(real_path: str) -> Path:
    p = Path(real_path)
    return p.with_name(p.name.replace("real_", "rays_")).with_suffix(".csv")


def _load_ray_log(real_path: str):
    path = _ray_log_path(real_path)
    if not path.exists():
        raise FileNotFoundError(f"{path} not found; rerun `gbsm run` with ray dumps enabled")
    per_t: dict[int, list] = {}
    with open(path) as fh:
        header = fh.readline()
        if header.strip() != "t,cluster,delay_s,power,doppler_hz":
            raise ValueError(f"{path}: unexpected ray-log layout")
        for line in fh:
            t, _cl, d, pw, nu = line.split(",")
            per_t.setdefault(int(t), []).append((float(d), float(pw), float(nu)))
    return per_t


def cmd_stats(args) -> int:
    paths = sorted(glob.glob(args.inputs))
    if not paths:
        return _fail(f"no inputs match {args.inputs!r}")
    wanted = [e.strip() for e in args.estimators.split(",") if e.strip()]
    unknown = [e for e in wanted if e not in ESTIMATORS]
    if unknown:
        return _fail(f"unknown estimators {unknown}; known: {list(ESTIMATORS)}")
    thresholds = {}
    if args.thresholds:
        for part in args.thresholds.split(","):
            key, _, val = part.partition("=")
            if not _:
                return _fail(f"threshold {part!r} is not k=v")
            thresholds[key.strip()] = val.strip()
    q, p = (int(x) for x in args.pair.split(","))
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    try:
        reals = [read_binary(pth) for pth in paths]
    except (OSError, ValueError) as exc:
        return _fail(f"stats: {exc}")
    dt = reals[0].delta_t_s
    c_thresh = float(thresholds.get("c_thresh", 0.8))
    coh_thresh = float(thresholds.get("coherence", 0.5))
    window = thresholds.get("window", "hann")
    bandwidth_hz = float(thresholds.get("bandwidth_mhz", 100.0)) * 1e6
    df_step = float(thresholds.get("df_step_khz", 100.0)) * 1e3
    df_steps = int(thresholds.get("df_steps", 256))
    spacing_m = float(thresholds.get("spacing_m", 0.0))

    report = stats.StatReport()
    report.add("meta", inputs=paths, pair=[q, p], thresholds=thresholds)
    try:
        acf_series = None
        if {"acf", "doppler-psd", "coherence-time"} & set(wanted):
            acf_series = stats.temporal_acf(reals, q, p)
        if "acf" in wanted:
            _write_series_csv(out / "acf.csv", "lag_s,re,im,abs", _series_rows(acf_series))
            report.add("acf", lag_s=acf_series.lags, values=acf_series.values)
        fcf_series = None
        if {"fcf", "coherence-bandwidth"} & set(wanted):
            fcf_series = stats.fcf(reals, df_step, df_steps, q, p)
        if "fcf" in wanted:
            _write_series_csv(out / "fcf.csv", "lag_hz,re,im,abs", _series_rows(fcf_series))
            report.add("fcf", lag_hz=fcf_series.lags, values=fcf_series.values)
        ccf_series = None
        if {"ccf", "coherence-distance"} & set(wanted):
            ccf_series = stats.spatial_ccf(reals, side="rx", other_index=p,
                                           spacing_m=spacing_m or 1.0)
        if "ccf" in wanted:
            _write_series_csv(out / "ccf.csv", "lag_m,re,im,abs", _series_rows(ccf_series))
            report.add("ccf", lag_m=ccf_series.lags, values=ccf_series.values)
        if {"delay-psd", "stationary-interval"} & set(wanted):
            grids = [stats.delay_psd(r, q, p, bandwidth_hz=bandwidth_hz) for r in reals]
        if "delay-psd" in wanted:
            longest = max(range(len(grids)), key=lambda i: len(grids[i][0]))
            grid = grids[longest][0]
            avg = np.zeros(len(grid))
            for g, ps in grids:
                avg[: ps.shape[1]] += ps.mean(axis=0)
            avg /= len(grids)
            _write_series_csv(out / "delay_psd.csv", "delay_s,power",
                              [(float(d), float(v)) for d, v in zip(grid, avg)])
            report.add("delay_psd", delay_s=grid, power=avg, total=float(avg.sum()))
        if "doppler-psd" in wanted:
            freqs, psd = stats.doppler_psd(acf_series, window=window)
            _write_series_csv(out / "doppler_psd.csv", "freq_hz,power",
                              [(float(a), float(b)) for a, b in zip(freqs, psd)])
            report.add("doppler_psd", freq_hz=freqs, power=psd,
                       peak_hz=float(freqs[int(np.argmax(psd))]))
        if "stationary-interval" in wanted:
            rows = []
            for (grid, psd) in grids:
                for t_s, interval in stats.stationary_interval(psd, dt, c_thresh):
                    rows.append((float(t_s), float(interval)))
            _write_series_csv(out / "stationary_interval.csv", "t_s,interval_s", rows)
            report.add("stationary_interval", samples=rows, c_thresh=c_thresh,
                       median=float(np.median([r[1] for r in rows])))
        if "svs" in wanted:
            rows = []
            for path, real in zip(paths, reals):
                for t in range(real.dims[0]):
                    rows.append((Path(path).name, t, float(stats.svs(real.narrowband(t)))))
            _write_series_csv(out / "svs.csv", "file,snapshot,svs", rows)
            report.add("svs", median=float(np.median([r[2] for r in rows])), count=len(rows))
        if "coherence-time" in wanted:
            res = stats.coherence(acf_series, coh_thresh)
            _write_series_csv(out / "coherence_time.csv", "threshold,lag_s,exceeds_window,window_s",
                              [(res.threshold, res.lag, res.exceeds_window, res.window)])
            report.add("coherence_time", **res.__dict__)
        if "coherence-bandwidth" in wanted:
            res = stats.coherence(fcf_series, coh_thresh)
            _write_series_csv(out / "coherence_bandwidth.csv", "threshold,lag_hz,exceeds_window,window_hz",
                              [(res.threshold, res.lag, res.exceeds_window, res.window)])
            report.add("coherence_bandwidth", **res.__dict__)
        if "coherence-distance" in wanted:
            res = stats.coherence(ccf_series, coh_thresh)
            _write_series_csv(out / "coherence_distance.csv", "threshold,lag_m,exceeds_window,window_m",
                              [(res.threshold, res.lag, res.exceeds_window, res.window)])
            report.add("coherence_distance", **res.__dict__)
        if "rms-delay" in wanted:
            rows = []
            for path, real in zip(paths, reals):
                for t in range(real.dims[0]):
                    delays, amps = real.taps(t, q, p)
                    powers = np.abs(amps) ** 2
                    rows.append((Path(path).name, t * dt, stats.rms_delay(delays, powers)))
            _write_series_csv(out / "rms_delay.csv", "file,t_s,rms_s", rows)
            report.add("rms_delay", mean=float(np.mean([r[2] for r in rows])))
        if "rms-doppler" in wanted:
            rows = []
            for path in paths:
                per_t = _load_ray_log(path)
                for t, entries in sorted(per_t.items()):
                    arr = np.asarray(entries)
                    rows.append((Path(path).name, t * dt,
                                 stats.rms_doppler(arr[:, 2], arr[:, 1])))
            _write_series_csv(out / "rms_doppler.csv", "file,t_s,rms_hz", rows)
            report.add("rms_doppler", mean=float(np.mean([r[2] for r in rows])))
    except (ValueError, FileNotFoundError) as exc:
        return _fail(f"stats: {exc}")
    (out / "report.json").write_text(json.dumps(report.to_json_dict(), indent=2) + "\n")
    return 0


# --- sweep -------------------------------------------------------------------

def _metric_value(name: str, cfg, seeds: list[int]) -> float:
    values = []
    for seed in seeds:
        real = simulate_realization(cfg, seed, ray_log=(name == "mean-rms-doppler"))
        if name == "median-svs":
            values += [stats.svs(real.narrowband(t)) for t in range(real.dims[0])]
        elif name == "mean-rms-doppler":
            for entries in real.ray_log:
                arr = np.asarray(entries)
                if len(arr):
                    values.append(stats.rms_doppler(arr[:, 3], arr[:, 2]))
        elif name == "median-stationary-interval":
            _, psd = stats.delay_psd(real, bandwidth_hz=cfg.bandwidth_mhz * 1e6)
            samples = stats.stationary_interval(psd, cfg.delta_t_s, 0.8,
                                                anchors=range(real.dims[0] // 2))
            values += [s for _, s in samples]
        else:
            raise ValueError(f"unknown metric {name!r}; known: {list(METRICS)}")
    if name.startswith("median"):
        return float(np.median(values))
    return float(np.mean(values))


def cmd_sweep(args) -> int:
    try:
        base = scenarios.load_config(args.config)
    except scenarios.ConfigError as exc:
        return _fail(f"config: {exc}")
    if args.metric not in METRICS:
        return _fail(f"unknown metric {args.metric!r}; known: {list(METRICS)}")
    raw_values = [v for v in args.values.split(",") if v.strip() != ""]
    if not raw_values:
        return _fail("empty value list")
    base_dict = base.to_dict()
    probe = base_dict
    for part in args.param.split("."):
        if not isinstance(probe, dict) or part not in probe:
            return _fail(f"parameter path {args.param!r} not in the schema")
        probe = probe[part]
    try:
        seeds = _parse_seeds(args.seeds)
    except ValueError as exc:
        return _fail(str(exc))
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    rows = []
    for rv in raw_values:
        try:
            value = json.loads(rv)
        except json.JSONDecodeError:
            value = rv
        point = json.loads(json.dumps(base_dict))
        node = point
        parts = args.param.split(".")
        for part in parts[:-1]:
            node = node[part]
        node[parts[-1]] = value
        try:
            cfg = scenarios.loads(point)
        except scenarios.ConfigError as exc:
            return _fail(f"value {rv}: {exc}")
        subdir = out / f"{parts[-1]}={rv}"
        subdir.mkdir(parents=True, exist_ok=True)
        metric = _metric_value(args.metric, cfg, seeds)
        (subdir / "metric.json").write_text(json.dumps(
            {"param": args.param, "value": value, "metric": args.metric,
             "result": metric, "seeds": seeds}) + "\n")
        rows.append((value, metric))
    with open(out / "trend.csv", "w") as fh:
        fh.write("value,metric\n")
        for v, m in rows:
            fh.write(f"{v},{m!r}\n")
    return 0


# --- entry point -------------------------------------------------------------

def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="gbsm", description=__doc__,
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="generate channel realizations")
    p_run.add_argument("--config", required=True)
    p_run.add_argument("--seeds", required=True, help="count or comma list")
    p_run.add_argument("--out", required=True)
    p_run.add_argument("--csv", action="store_true", help="also write tap CSV mirrors")
    p_run.add_argument("--dump-rays", action=argparse.BooleanOptionalAction, default=True,
                       help="write reference-pair ray state CSVs")
    p_run.set_defaults(func=cmd_run)

    p_stats = sub.add_parser("stats", help="estimate channel statistics")
    p_stats.add_argument("--in", dest="inputs", required=True, help="glob of realization files")
    p_stats.add_argument("--estimators", required=True,
                         help="comma list from: " + ",".join(ESTIMATORS))
    p_stats.add_argument("--thresholds", default="", help="k=v list, e.g. c_thresh=0.8")
    p_stats.add_argument("--pair", default="0,0", help="receive,transmit element (0-based)")
    p_stats.add_argument("--out", required=True)
    p_stats.set_defaults(func=cmd_stats)

    p_sweep = sub.add_parser("sweep", help="run a parameter sweep")
    p_sweep.add_argument("--config", required=True)
    p_sweep.add_argument("--param", required=True, help="dotted path, e.g. clusters.gamma")
    p_sweep.add_argument("--values", required=True, help="comma list")
    p_sweep.add_argument("--metric", required=True, help="one of: " + ",".join(METRICS))
    p_sweep.add_argument("--seeds", default="3")
    p_sweep.add_argument("--out", required=True)
    p_sweep.set_defaults(func=cmd_sweep)

    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
