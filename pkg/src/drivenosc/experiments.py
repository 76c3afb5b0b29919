"""Experiment orchestration: single runs, the mean-position table, figures."""

from __future__ import annotations

import logging
import math
import time
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

from .config import ExperimentConfig, parse_config
from .observables import ObservableSet, measure
from .oracle import (
    TheoryPrediction,
    continuum_ground_variance,
    theory_prediction,
)
from .outputs import (
    PlotBlock,
    PlotSeries,
    emit_plot_script,
    relpath,
    write_histogram_csv,
    write_per_site_csv,
    write_summary_json,
    write_trace_csv,
)
from .sampler import ChainOutput, run_chains_parallel

log = logging.getLogger(__name__)

__all__ = [
    "RunResult",
    "builtin_config",
    "builtin_config_names",
    "combine_chains",
    "simulate",
    "run_experiment",
    "table2_check",
    "run_table2",
    "run_figures",
]

TABLE2_ROWS = tuple(f"table2/row{i}" for i in range(1, 8))
FIG3A = TABLE2_ROWS[:4]
FIG3B = TABLE2_ROWS[4:]
FIG4 = tuple(f"fig4/lambda{lam}" for lam in (0, 2, 4, 6))
FIG5 = ("fig5/m0.5_w1", "fig5/m0.5_w2", "fig5/m1_w1")


@dataclass(eq=False)
class RunResult:
    config: ExperimentConfig
    chains: list[ChainOutput]
    observables: ObservableSet
    theory: TheoryPrediction
    summary: dict
    files: dict = field(default_factory=dict)

    @property
    def samples(self) -> np.ndarray:
        return np.concatenate([c.samples for c in self.chains])


def builtin_config_names() -> list[str]:
    root = resources.files("drivenosc").joinpath("configs")
    names = []
    for sub in sorted(p.name for p in root.iterdir() if p.is_dir()):
        for f in sorted(q.name for q in root.joinpath(sub).iterdir() if q.name.endswith(".ini")):
            names.append(f"{sub}/{f[:-4]}")
    return names


def builtin_config(name: str) -> ExperimentConfig:
    """Load one of the shipped experiment files, e.g. ``table2/row3``."""
    path = resources.files("drivenosc").joinpath("configs", f"{name}.ini")
    return parse_config(path.read_text("utf-8"))


def combine_chains(chains: list[ChainOutput], config: ExperimentConfig) -> ObservableSet:
    """Observables of the pooled samples with errors combined across chains."""
    pooled = np.concatenate([c.samples for c in chains])
    binning = dict(bin_width=config.bin_width, n_bins=config.n_bins, range=config.hist_range)
    if len(chains) == 1:
        return measure(pooled, chains[0].trace, **binning)
    per_chain = [measure(c.samples, c.trace, **binning) for c in chains]
    k = len(chains)
    whole = measure(pooled, None, **binning)
    return ObservableSet(
        mean_x=whole.mean_x,
        mean_x_stderr=math.sqrt(sum(o.mean_x_stderr**2 for o in per_chain)) / k,
        std_x=whole.std_x,
        per_site_mean=whole.per_site_mean,
        per_site_stderr=np.sqrt(sum(o.per_site_stderr**2 for o in per_chain)) / k,
        histogram=whole.histogram,
        tau_int=float(np.mean([o.tau_int for o in per_chain])),
        tau_int_retained=float(np.mean([o.tau_int_retained for o in per_chain])),
    )


def _finite_or_none(v):
    return float(v) if v is not None and math.isfinite(v) else None


def simulate(config: ExperimentConfig, max_workers=None) -> RunResult:
    """Run the chains and reduce them, without touching the filesystem."""
    t0 = time.perf_counter()
    chains = run_chains_parallel(
        config.lattice, config.force, config.sampler, config.n_chains, max_workers=max_workers
    )
    obs = combine_chains(chains, config)
    theory = theory_prediction(config.lattice, config.force)
    wall = time.perf_counter() - t0
    summary = {
        "config": config.echo(),
        "n_chains": config.n_chains,
        "n_retained": int(sum(c.n_retained for c in chains)),
        "mean_x": obs.mean_x,
        "mean_x_stderr": _finite_or_none(obs.mean_x_stderr),
        "std_x": obs.std_x,
        "acceptance_rate": float(np.mean([c.acceptance_rate for c in chains])),
        "final_proposal_sigma": float(chains[0].final_sigma),
        "tau_int": _finite_or_none(obs.tau_int),
        "tau_int_retained": _finite_or_none(obs.tau_int_retained),
        "oracle": {
            "coherent_alpha": float(theory.alpha),
            "lattice_exact_mean_avg": float(np.mean(theory.lattice_exact_mean)),
            "lattice_exact_mean_min": float(np.min(theory.lattice_exact_mean)),
            "lattice_exact_mean_max": float(np.max(theory.lattice_exact_mean)),
            "lattice_exact_variance": float(theory.lattice_exact_var[0]),
            "continuum_variance": continuum_ground_variance(config.lattice),
        },
        "wall_time_s": wall,
    }
    return RunResult(config, chains, obs, theory, summary)


def run_experiment(config: ExperimentConfig, out_dir, max_workers=None) -> RunResult:
    """Simulate and write the requested outputs into ``out_dir``."""
    out = Path(out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise OSError(f"cannot create output directory {out}: {exc}") from exc
    result = simulate(config, max_workers=max_workers)
    obs, theory = result.observables, result.theory
    files = {}
    if "histogram" in config.outputs:
        files["histogram"] = write_histogram_csv(obs.histogram, out / "histogram.csv")
    if "per_site_mean" in config.outputs:
        files["per_site_mean"] = write_per_site_csv(
            obs.per_site_mean,
            obs.per_site_stderr,
            theory.lattice_exact_mean,
            theory.alpha_trajectory,
            out / "per_site_mean.csv",
        )
    if "trace" in config.outputs:
        files["trace"] = write_trace_csv(result.chains[0].trace, out / "trace.csv")
    if "summary" in config.outputs:
        files["summary"] = write_summary_json(result.summary, out / "summary.json")
    if config.plot_script:
        blocks = []
        if "trace" in files:
            blocks.append(PlotBlock("trace", [PlotSeries("trace.csv", config.label)], "thermalization"))
        if "histogram" in files:
            blocks.append(PlotBlock("histogram", [PlotSeries("histogram.csv", config.label)], "position density"))
        if "per_site_mean" in files:
            blocks.append(
                PlotBlock(
                    "per_site",
                    [PlotSeries("per_site_mean.csv", config.label, config.lattice.spring)],
                    "mean position per site",
                )
            )
        if blocks:
            files["plot_script"] = emit_plot_script(blocks, out / "plot.py")
    result.files = files
    return result


def table2_check(result: RunResult) -> dict:
    """Compare a constant-force run with the coherent-state displacement."""
    alpha = result.theory.alpha
    exact = float(np.mean(result.theory.lattice_exact_mean))
    obs = result.observables
    tol = max(0.1, 0.01 * abs(alpha))
    dev = abs(obs.mean_x - alpha)
    dev_exact = abs(obs.mean_x - exact)
    return {
        "lambda": result.config.force.describe().get("lambda", 0.0),
        "m_tilde": result.config.lattice.m_tilde,
        "omega_tilde": result.config.lattice.omega_tilde,
        "alpha": alpha,
        "mean_x": obs.mean_x,
        "stderr": obs.mean_x_stderr,
        "deviation": dev,
        "tolerance": tol,
        "within_tolerance": dev <= tol,
        "within_3_stderr": dev_exact <= 3.0 * obs.mean_x_stderr,
        "passed": dev <= tol and dev_exact <= 3.0 * obs.mean_x_stderr,
    }


def run_table2(out_dir=None, seed=None, n_chains=None) -> list[dict]:
    rows = []
    for name in TABLE2_ROWS:
        cfg = builtin_config(name).with_overrides(seed=seed, n_chains=n_chains)
        if out_dir is None:
            result = simulate(cfg)
        else:
            result = run_experiment(cfg, Path(out_dir) / name.replace("/", "_"))
        row = table2_check(result)
        row["wall_time_s"] = result.summary["wall_time_s"]
        rows.append(row)
        log.info("%s: mean_x=%.4f alpha=%.4f", name, row["mean_x"], row["alpha"])
    return rows


def _dirname(name):
    return name.replace("/", "_")


def run_figures(out_dir, seed=None, n_chains=None) -> Path:
    """Write CSVs for the thermalization, histogram and trajectory figures.

    Returns the path of a plotting script drawing all of them.
    """
    out = Path(out_dir)
    results = {}
    for name in ("fig2/thermalization",) + FIG3A + FIG3B + FIG4 + FIG5:
        cfg = builtin_config(name).with_overrides(seed=seed, n_chains=n_chains)
        results[name] = run_experiment(cfg, out / _dirname(name))
        log.info("%s done", name)

    def series(names, csv_name, with_scale=False):
        return [
            PlotSeries(
                relpath(out / _dirname(n) / csv_name, out),
                results[n].config.label,
                results[n].config.lattice.spring if with_scale else None,
            )
            for n in names
        ]

    blocks = [
        PlotBlock("trace", series(["fig2/thermalization"], "trace.csv"), "thermalization"),
        PlotBlock("trace", series(["fig2/thermalization"], "trace.csv"), "burn-in", (0, 200)),
        PlotBlock("histogram", series(FIG3A, "histogram.csv"), "constant force, varying lambda"),
        PlotBlock("histogram", series(FIG3B, "histogram.csv"), "constant force lambda=5, varying m, w"),
        PlotBlock("histogram", series(FIG4, "histogram.csv"), "sinusoidal force, varying lambda"),
        PlotBlock("per_site", series(FIG5, "per_site_mean.csv", True), "sinusoidal force lambda=4"),
    ]
    return emit_plot_script(blocks, out / "figures.py")

