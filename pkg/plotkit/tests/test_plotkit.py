import hashlib
import json
import math

import numpy as np
import pytest

from plotkit import FigureSpec, load_spec, plot, render_spec_file
from plotkit.cli import main
from plotkit.figures import FigureInput, SpecError, empirical_cdf, read_csv_columns


def write_svs_csv(path, n=100, seed=0):
    rng = np.random.default_rng(seed)
    with open(path, "w") as fh:
        fh.write("file,snapshot,svs\n")
        for t, v in enumerate(rng.gamma(4.0, 1.0, n).tolist()):
            fh.write(f"real_0.6gpc,{t},{v!r}\n")


def write_acf_csv(path, n=64, rate=40.0):
    with open(path, "w") as fh:
        fh.write("lag_s,re,im,abs\n")
        for k in range(n):
            lag = k * 1e-3
            mag = math.exp(-rate * lag)
            fh.write(f"{lag!r},{mag!r},0.0,{mag!r}\n")


def write_psd_csv(path, n=64):
    with open(path, "w") as fh:
        fh.write("freq_hz,power\n")
        for k in range(n):
            f = (k - n / 2) * 4.0
            fh.write(f"{f!r},{math.exp(-((f - 80) / 30.0) ** 2)!r}\n")


class TestCdf:
    def test_monotone_and_spans_unit_interval(self, tmp_path):
        csv_path = tmp_path / "svs.csv"
        write_svs_csv(csv_path)
        x, y = empirical_cdf(read_csv_columns(csv_path)["svs"])
        assert np.all(np.diff(y) >= 0)
        assert np.all(np.diff(x) >= 0)
        assert y[0] > 0.0 and y[-1] == 1.0
        res = plot(FigureSpec(kind="cdf", inputs=[FigureInput(path="svs.csv", column="svs")],
                              out="svs_cdf.png"), base_dir=tmp_path)
        assert res.out.exists() and res.curves == 1

    def test_empty_samples_rejected(self, tmp_path):
        path = tmp_path / "empty.csv"
        path.write_text("svs\n")
        with pytest.raises(SpecError):
            read_csv_columns(path)


class TestCurves:
    def test_acf_starts_at_one(self, tmp_path):
        path = tmp_path / "acf.csv"
        write_acf_csv(path)
        cols = read_csv_columns(path)
        assert cols["abs"][0] == 1.0
        res = plot(FigureSpec(kind="acf", inputs=[FigureInput(path="acf.csv")],
                              out="acf.png", xlabel="lag (s)"), base_dir=tmp_path)
        assert res.out.exists()

    def test_overlay_two_labeled_curves(self, tmp_path):
        write_acf_csv(tmp_path / "a.csv", rate=20.0)
        write_acf_csv(tmp_path / "b.csv", rate=80.0)
        spec = FigureSpec(kind="acf", out="overlay.png", inputs=[
            FigureInput(path="a.csv", label="with surface"),
            FigureInput(path="b.csv", label="without surface"),
        ])
        res = plot(spec, base_dir=tmp_path)
        assert res.curves == 2
        assert res.labels == ["with surface", "without surface"]

    def test_psd_defaults(self, tmp_path):
        write_psd_csv(tmp_path / "doppler_psd.csv")
        res = plot(FigureSpec(kind="psd", inputs=[FigureInput(path="doppler_psd.csv")],
                              out="psd.png"), base_dir=tmp_path)
        assert res.out.exists()

    def test_missing_column_rejected(self, tmp_path):
        write_psd_csv(tmp_path / "p.csv")
        with pytest.raises(SpecError) as err:
            plot(FigureSpec(kind="acf", inputs=[FigureInput(path="p.csv", x="lag_s", y="abs")],
                            out="x.png"), base_dir=tmp_path)
        assert "lag_s" in str(err.value)


class TestSpecFile:
    def make_spec(self, tmp_path):
        write_svs_csv(tmp_path / "svs.csv")
        write_acf_csv(tmp_path / "acf_a.csv", rate=20.0)
        write_acf_csv(tmp_path / "acf_b.csv", rate=80.0)
        write_psd_csv(tmp_path / "doppler_psd.csv")
        spec = {
            "figures": [
                {"kind": "cdf", "out": "fig/svs_cdf.png", "xlabel": "ratio",
                 "inputs": [{"path": "svs.csv", "column": "svs", "label": "128 elements"}]},
                {"kind": "acf", "out": "fig/acf_overlay.png", "xlabel": "lag (s)",
                 "inputs": [{"path": "acf_a.csv", "label": "with surface"},
                            {"path": "acf_b.csv", "label": "without"}]},
                {"kind": "psd", "out": "fig/doppler.png", "xlabel": "Doppler (Hz)",
                 "inputs": [{"path": "doppler_psd.csv"}]},
            ]
        }
        path = tmp_path / "figures.json"
        path.write_text(json.dumps(spec))
        return path

    def test_render_all(self, tmp_path):
        spec_path = self.make_spec(tmp_path)
        results = render_spec_file(spec_path)
        assert len(results) == 3
        for res in results:
            assert res.out.exists() and res.out.stat().st_size > 0

    def test_byte_stable_across_reruns(self, tmp_path):
        spec_path = self.make_spec(tmp_path)
        first = {res.out: res.out.read_bytes() for res in render_spec_file(spec_path)}
        second = {res.out: res.out.read_bytes() for res in render_spec_file(spec_path)}
        assert first == second

    def test_inputs_never_mutated(self, tmp_path):
        spec_path = self.make_spec(tmp_path)
        digests = {p: hashlib.sha256(p.read_bytes()).hexdigest()
                   for p in tmp_path.glob("*.csv")}
        render_spec_file(spec_path)
        after = {p: hashlib.sha256(p.read_bytes()).hexdigest()
                 for p in tmp_path.glob("*.csv")}
        assert digests == after

    def test_cli_round_trip(self, tmp_path, capsys):
        spec_path = self.make_spec(tmp_path)
        assert main([str(spec_path)]) == 0
        out = capsys.readouterr().out.strip().splitlines()
        assert len(out) == 3

    def test_cli_reports_errors(self, tmp_path, capsys):
        bad = tmp_path / "bad.json"
        bad.write_text(json.dumps({"figures": [{"kind": "nope", "out": "x.png",
                                                "inputs": [{"path": "missing.csv"}]}]}))
        assert main([str(bad)]) == 1
        assert "nope" in capsys.readouterr().err

    def test_unknown_spec_shape(self, tmp_path):
        path = tmp_path / "odd.json"
        path.write_text(json.dumps([1, 2, 3]))
        with pytest.raises(SpecError):
            load_spec(path)
