"""CSV, JSON and plot-script writers for run results."""

from __future__ import annotations

import csv
import json
import os
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

from .observables import Histogram

__all__ = [
    "HISTOGRAM_COLUMNS",
    "PER_SITE_COLUMNS",
    "TRACE_COLUMNS",
    "write_histogram_csv",
    "write_per_site_csv",
    "write_trace_csv",
    "write_summary_json",
    "summary_schema",
    "PlotSeries",
    "PlotBlock",
    "emit_plot_script",
]

HISTOGRAM_COLUMNS = ("bin_left", "bin_right", "density")
PER_SITE_COLUMNS = ("site_index", "tau", "mean_x", "stderr", "oracle_exact_mean", "oracle_continuum_alpha")
TRACE_COLUMNS = ("sweep", "mean", "std")


def _num(v):
    # str() of a Python float is its shortest round-trip form
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return str(float(v))


def _write_rows(path, header, rows):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_num(v) for v in row])
    return path


def write_histogram_csv(hist: Histogram, path) -> Path:
    e, d = hist.bin_edges, hist.densities
    return _write_rows(path, HISTOGRAM_COLUMNS, zip(e[:-1], e[1:], d))


def write_per_site_csv(mean_x, stderr, exact_mean, continuum_alpha, path) -> Path:
    n = len(mean_x)
    sites = np.arange(1, n + 1)
    # tau equals the site index in lattice units
    rows = zip(sites, sites.astype(float), mean_x, stderr, exact_mean, continuum_alpha)
    return _write_rows(path, PER_SITE_COLUMNS, rows)


def write_trace_csv(trace, path) -> Path:
    t = np.asarray(trace, dtype=float)
    return _write_rows(path, TRACE_COLUMNS, ((i + 1, m, s) for i, (m, s) in enumerate(t)))


def summary_schema() -> dict:
    text = resources.files("drivenosc").joinpath("schemas/summary.schema.json").read_text("utf-8")
    return json.loads(text)


def write_summary_json(summary: dict, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(summary, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return path


@dataclass
class PlotSeries:
    csv: str
    label: str = ""
    force_scale: float | None = None


@dataclass
class PlotBlock:
    """One axes in the emitted script.

    ``kind`` is ``trace``, ``histogram`` or ``per_site``; a per-site series
    draws both the drive (continuum displacement times ``m w^2``) and the
    measured mean.
    """

    kind: str
    series: list[PlotSeries] = field(default_factory=list)
    title: str = ""
    xlim: tuple[float, float] | None = None

    def __post_init__(self):
        if self.kind not in ("trace", "histogram", "per_site"):
            raise ValueError(f"unknown plot kind {self.kind!r}")


_HEADER = '''\
"""Plots generated by drivenosc. Run with --save to write PNG files."""
import sys
from pathlib import Path

import matplotlib

if "--save" in sys.argv:
    matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

HERE = Path(__file__).resolve().parent


def load(name):
    return np.genfromtxt(HERE / name, delimiter=",", names=True)

'''

_FOOTER = '''
if "--save" in sys.argv:
    for num in plt.get_fignums():
        plt.figure(num).savefig(HERE / f"figure_{num}.png", dpi=120)
else:
    plt.show()
'''


def _block_source(idx, block):
    lines = [f"# {block.kind}: {block.title}", f"fig, ax = plt.subplots(num={idx})"]
    for s in block.series:
        label = repr(s.label)
        if block.kind == "trace":
            lines.append(f"d = load({s.csv!r})")
            lines.append(f"ax.plot(d['sweep'], d['mean'], 'r--', label={label} + ' mean')")
            lines.append(f"ax.plot(d['sweep'], d['std'], 'b-', label={label} + ' std')")
            lines.append("ax.set_xlabel('sweep')")
        elif block.kind == "histogram":
            lines.append(f"d = load({s.csv!r})")
            lines.append(
                f"ax.stairs(d['density'], np.append(d['bin_left'], d['bin_right'][-1]), label={label})"
            )
            lines.append("ax.set_xlabel('x')")
            lines.append("ax.set_ylabel('probability density')")
        elif block.kind == "per_site":
            scale = 1.0 if s.force_scale is None else s.force_scale
            lines.append(f"d = load({s.csv!r})")
            lines.append(f"ax.plot(d['tau'], d['oracle_continuum_alpha'] * {scale!r}, 'g-', label={label} + ' force')")
            lines.append(f"ax.plot(d['tau'], d['mean_x'], 'm-.', label={label} + ' mean x')")
            lines.append("ax.set_xlabel('tau')")
        else:
            raise ValueError(f"unknown plot kind {block.kind!r}")
    if block.xlim is not None:
        lines.append(f"ax.set_xlim{tuple(block.xlim)!r}")
    lines.append(f"ax.set_title({block.title!r})")
    lines.append("ax.legend()")
    return "\n".join(lines) + "\n"


def emit_plot_script(blocks, destination) -> Path:
    """Write a standalone matplotlib script drawing ``blocks``.

    CSV paths are taken relative to the script's directory and must exist.
    """
    destination = Path(destination)
    for block in blocks:
        for s in block.series:
            if not (destination.parent / s.csv).is_file():
                raise FileNotFoundError(destination.parent / s.csv)
    body = "\n".join(_block_source(i + 1, b) for i, b in enumerate(blocks))
    destination.parent.mkdir(parents=True, exist_ok=True)
    destination.write_text(_HEADER + body + _FOOTER, encoding="utf-8")
    return destination


def relpath(target, start) -> str:
    return Path(os.path.relpath(target, start)).as_posix()
