"""Figure specs and deterministic rendering.

A spec file is JSON: {"figures": [entry, ...]} where each entry names a
figure kind (cdf | acf | psd | trend), its input CSVs, axis labels/scales,
and the output image path. Rendering is batch-only and deterministic: fixed
style, no timestamps, scrubbed image metadata, so reruns are byte-stable.
Input CSVs are never modified.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

KINDS = ("cdf", "acf", "psd", "trend")

# column fallbacks per kind, tried in order when an input does not name its own
_DEFAULT_XY = {
    "acf": (("lag_s", "abs"), ("lag_hz", "abs"), ("lag_m", "abs")),
    "psd": (("freq_hz", "power"), ("delay_s", "power")),
    "trend": (("value", "metric"),),
}

_STYLE = {
    "figure.figsize": (6.0, 4.0),
    "figure.dpi": 110,
    "savefig.dpi": 110,
    "font.size": 10,
    "axes.grid": True,
    "grid.alpha": 0.4,
    "lines.linewidth": 1.4,
    "legend.fontsize": 9,
}


class SpecError(ValueError):
    pass


@dataclass
class FigureInput:
    path: str
    label: str | None = None
    column: str | None = None  # cdf sample column
    x: str | None = None
    y: str | None = None


@dataclass
class FigureSpec:
    kind: str
    inputs: list[FigureInput]
    out: str
    title: str = ""
    xlabel: str = ""
    ylabel: str = ""
    xscale: str = "linear"
    yscale: str = "linear"

    def __post_init__(self):
        if self.kind not in KINDS:
            raise SpecError(f"unknown figure kind {self.kind!r}; known: {list(KINDS)}")
        if not self.inputs:
            raise SpecError("figure needs at least one input")
        if not self.out:
            raise SpecError("figure needs an output path")


def read_csv_columns(path) -> dict[str, np.ndarray]:
    """Load a delimited file into float columns (non-numeric kept as objects)."""
    path = Path(path)
    if not path.exists():
        raise SpecError(f"input file {path} does not exist")
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise SpecError(f"{path}: empty file") from None
        rows = list(reader)
    if not rows:
        raise SpecError(f"{path}: no data rows")
    cols: dict[str, np.ndarray] = {}
    for i, name in enumerate(header):
        raw = [r[i] for r in rows]
        try:
            cols[name] = np.asarray([float(v) for v in raw])
        except ValueError:
            cols[name] = np.asarray(raw, dtype=object)
    return cols


def empirical_cdf(samples: np.ndarray):
    """Sorted samples against their rank fractions; spans (0, 1]."""
    s = np.sort(np.asarray(samples, dtype=float))
    if len(s) == 0:
        raise SpecError("no samples for a distribution curve")
    return s, np.arange(1, len(s) + 1) / len(s)


def _pick_xy(cols: dict, inp: FigureInput, kind: str, path) -> tuple[np.ndarray, np.ndarray]:
    if inp.x and inp.y:
        for name in (inp.x, inp.y):
            if name not in cols:
                raise SpecError(f"{path}: column {name!r} not found (has {list(cols)})")
        return cols[inp.x], cols[inp.y]
    for x_name, y_name in _DEFAULT_XY[kind]:
        if x_name in cols and y_name in cols:
            return cols[x_name], cols[y_name]
    raise SpecError(f"{path}: no usable columns for a {kind} figure "
                    f"(has {list(cols)}); name x/y explicitly")


def _cdf_samples(cols: dict, inp: FigureInput, path) -> np.ndarray:
    if inp.column:
        if inp.column not in cols:
            raise SpecError(f"{path}: column {inp.column!r} not found (has {list(cols)})")
        return cols[inp.column]
    numeric = [n for n, v in cols.items() if v.dtype != object]
    if not numeric:
        raise SpecError(f"{path}: no numeric column for a distribution curve")
    return cols[numeric[-1]]


@dataclass
class RenderResult:
    out: Path
    curves: int
    labels: list


def plot(spec: FigureSpec, base_dir=None) -> RenderResult:
    """Render one figure; returns the output path and curve bookkeeping."""
    base = Path(base_dir) if base_dir is not None else Path(".")

    def resolve(p):
        p = Path(p)
        return p if p.is_absolute() else base / p

    curves = []
    for inp in spec.inputs:
        cols = read_csv_columns(resolve(inp.path))
        if spec.kind == "cdf":
            x, y = empirical_cdf(_cdf_samples(cols, inp, inp.path))
        else:
            x, y = _pick_xy(cols, inp, spec.kind, inp.path)
            if len(x) == 0:
                raise SpecError(f"{inp.path}: empty data")
        curves.append((x, y, inp.label))

    out = resolve(spec.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    with plt.rc_context(_STYLE):
        fig, ax = plt.subplots()
        for x, y, label in curves:
            if spec.kind == "cdf":
                ax.step(x, y, where="post", label=label)
            elif spec.kind == "trend":
                ax.plot(x, y, marker="o", label=label)
            else:
                ax.plot(x, y, label=label)
        if spec.kind == "cdf":
            ax.set_ylim(0.0, 1.0)
            ax.set_ylabel(spec.ylabel or "CDF")
        else:
            ax.set_ylabel(spec.ylabel)
        ax.set_xlabel(spec.xlabel)
        ax.set_xscale(spec.xscale)
        ax.set_yscale(spec.yscale)
        if spec.title:
            ax.set_title(spec.title)
        if any(label for *_unused, label in curves):
            ax.legend()
        fig.savefig(out, format=out.suffix.lstrip(".") or "png",
                    metadata={"Software": None})
        plt.close(fig)
    return RenderResult(out=out, curves=len(curves),
                        labels=[label for *_unused, label in curves])


def load_spec(path) -> list[FigureSpec]:
    path = Path(path)
    try:
        data = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise SpecError(f"{path}:{exc.lineno}: {exc.msg}") from exc
    if not isinstance(data, dict) or "figures" not in data:
        raise SpecError(f"{path}: expected an object with a 'figures' list")
    specs = []
    for i, entry in enumerate(data["figures"]):
        try:
            inputs = [FigureInput(**inp) for inp in entry.pop("inputs", [])]
            specs.append(FigureSpec(inputs=inputs, **entry))
        except (TypeError, SpecError) as exc:
            raise SpecError(f"{path}: figure [{i}]: {exc}") from exc
    return specs


def render_spec_file(path) -> list[RenderResult]:
    """Render every figure in a spec file; paths resolve relative to it."""
    path = Path(path)
    specs = load_spec(path)
    return [plot(spec, base_dir=path.parent) for spec in specs]
