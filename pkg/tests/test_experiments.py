import math

import numpy as np
import pytest

from drivenosc import ConstantForce, SamplerConfig, SinusoidalForce
from drivenosc.config import ExperimentConfig
from drivenosc.experiments import (
    FIG4,
    builtin_config,
    combine_chains,
    run_experiment,
    run_table2,
    simulate,
    table2_check,
)
from drivenosc.observables import Histogram, fit_sinusoid, split_peak_modes
from drivenosc.oracle import exact_lattice_covariance_diag, exact_lattice_mean

QUICK = SamplerConfig(total_sweeps=1200, burn_in_sweeps=100, thinning=4, seed=8)


def exact_binned(edges, lattice, force):
    """Bin probabilities of the site-pooled Gaussian mixture, from its CDF."""
    mu = exact_lattice_mean(lattice, force)
    sd = math.sqrt(exact_lattice_covariance_diag(lattice)[0])
    cdf = np.array([np.mean([0.5 * math.erfc(-(e - m) / (sd * math.sqrt(2))) for m in mu]) for e in edges])
    return Histogram(edges, np.diff(cdf) / np.diff(edges))


def test_run_experiment_files(tmp_path):
    cfg = ExperimentConfig(force=ConstantForce(3.0), sampler=QUICK)
    result = run_experiment(cfg, tmp_path)
    assert set(result.files) == {"histogram", "per_site_mean", "trace", "summary", "plot_script"}
    assert all(p.parent == tmp_path for p in result.files.values())
    assert result.samples.shape == (QUICK.n_retained, 120)


def test_simulate_matches_run_experiment(tmp_path):
    cfg = ExperimentConfig(force=ConstantForce(3.0), sampler=QUICK)
    a = simulate(cfg)
    b = run_experiment(cfg, tmp_path)
    assert a.samples.tobytes() == b.samples.tobytes()
    assert a.observables.mean_x == b.observables.mean_x


def test_multi_chain_pooling():
    cfg = ExperimentConfig(force=ConstantForce(3.0), sampler=QUICK, n_chains=4)
    result = simulate(cfg)
    assert len(result.chains) == 4
    assert result.samples.shape[0] == 4 * QUICK.n_retained
    obs = result.observables
    assert obs.mean_x == pytest.approx(np.mean([c.samples.mean() for c in result.chains]))
    single = combine_chains(result.chains[:1], cfg)
    # four independent chains shrink the error roughly by two
    assert 0.3 < obs.mean_x_stderr / single.mean_x_stderr < 0.8
    assert result.summary["n_retained"] == 4 * QUICK.n_retained


def test_table2_check_fields():
    result = simulate(ExperimentConfig(force=ConstantForce(4.0), sampler=QUICK))
    row = table2_check(result)
    assert row["alpha"] == 4.0 and row["tolerance"] == 0.1
    assert row["passed"] == (row["within_tolerance"] and row["within_3_stderr"])


def test_run_table2_rows():
    rows = run_table2()
    assert [r["alpha"] for r in rows] == [0.0, 2.0, 4.0, 6.0, 5.0, 10.0, 20.0]
    assert all(r["passed"] for r in rows)


def test_sinusoidal_per_site_phase(tmp_path):
    force = SinusoidalForce.with_cycles(4.0, 5, 120)
    result = run_experiment(ExperimentConfig(force=force, sampler=QUICK), tmp_path)
    d = np.genfromtxt(tmp_path / "per_site_mean.csv", delimiter=",", names=True)
    np.testing.assert_array_equal(d["site_index"], np.arange(1, 121))
    np.testing.assert_allclose(d["oracle_continuum_alpha"], 4.0 * np.sin(math.pi / 12 * np.arange(1, 121)), atol=1e-12)
    amp, phase = fit_sinusoid(d["mean_x"], force.omega_d)
    assert abs(phase) < 0.1
    assert amp == pytest.approx(np.max(d["oracle_exact_mean"]), rel=0.05)
    assert result.summary["oracle"]["coherent_alpha"] == 4.0


@pytest.mark.parametrize("name", FIG4)
def test_time_averaged_histogram_matches_exact_mixture(name):
    cfg = builtin_config(name)
    hist = simulate(cfg).observables.histogram
    exact = exact_binned(hist.bin_edges, cfg.lattice, cfg.force)
    assert np.max(np.abs(hist.densities - exact.densities)) <= 0.03
    if name.endswith("0"):
        return
    neg, pos, _ = split_peak_modes(hist)
    eneg, epos, edip = split_peak_modes(exact)
    assert edip < 1.0
    assert abs(neg - eneg) <= 0.3 and abs(pos - epos) <= 0.3
