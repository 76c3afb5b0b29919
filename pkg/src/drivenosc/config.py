"""INI experiment files: parsing, validation and echo.

A file has up to four sections::

    [lattice]   n_sites, m_tilde, omega_tilde
    [force]     kind = zero | constant | sinusoidal | tabulated
                lambda, omega_d_tilde | omega_d_cycles, phi_tilde, values
    [sampler]   total_sweeps, burn_in_sweeps, thinning, proposal_sigma,
                start = hot | cold, seed, tune_proposal, n_chains
    [output]    outputs, bin_width | n_bins + range_lo + range_hi, label,
                plot_script

Missing keys take the defaults of the published runs (120 sites, 12000
sweeps, 100 burn-in, 12 discarded between kept paths).
"""

from __future__ import annotations

import configparser
import io
import math
from dataclasses import dataclass, field, replace

import numpy as np

from .action import (
    ConstantForce,
    ForceModel,
    PeriodicityError,
    SinusoidalForce,
    TabulatedForce,
    ZeroForce,
)
from .lattice import LatticeParams
from .observables import DEFAULT_BIN_WIDTH
from .sampler import SamplerConfig, Start

__all__ = ["ConfigError", "ExperimentConfig", "OUTPUT_KINDS", "parse_config", "load_config", "format_config"]

OUTPUT_KINDS = ("histogram", "per_site_mean", "trace", "summary")

_FORCE_KEYS = {
    "zero": {"kind"},
    "constant": {"kind", "lambda"},
    "sinusoidal": {"kind", "lambda", "omega_d_tilde", "omega_d_cycles", "phi_tilde"},
    "tabulated": {"kind", "values"},
}
_KEYS = {
    "lattice": {"n_sites", "m_tilde", "omega_tilde"},
    "force": set().union(*_FORCE_KEYS.values()),
    "sampler": {
        "total_sweeps",
        "burn_in_sweeps",
        "thinning",
        "proposal_sigma",
        "start",
        "seed",
        "tune_proposal",
        "n_chains",
    },
    "output": {"outputs", "bin_width", "n_bins", "range_lo", "range_hi", "label", "plot_script"},
}


class ConfigError(ValueError):
    """Invalid experiment configuration; ``key`` names the offending entry."""

    def __init__(self, key: str, reason: str):
        self.key = key
        self.reason = reason
        super().__init__(f"{key}: {reason}")


@dataclass(frozen=True)
class ExperimentConfig:
    lattice: LatticeParams = field(default_factory=LatticeParams)
    force: ForceModel = field(default_factory=ZeroForce)
    sampler: SamplerConfig = field(default_factory=SamplerConfig)
    bin_width: float | None = DEFAULT_BIN_WIDTH
    n_bins: int | None = None
    hist_range: tuple[float, float] | None = None
    outputs: frozenset = frozenset(OUTPUT_KINDS)
    n_chains: int = 1
    label: str = "run"
    plot_script: bool = True

    def __post_init__(self):
        try:
            self.force.check(self.lattice)
        except PeriodicityError as exc:
            raise ConfigError("force.omega_d_tilde", str(exc)) from None
        except ValueError as exc:
            raise ConfigError("force", str(exc)) from None
        if self.n_chains < 1:
            raise ConfigError("sampler.n_chains", "must be >= 1")
        unknown = set(self.outputs) - set(OUTPUT_KINDS)
        if unknown:
            raise ConfigError("output.outputs", f"unknown output(s) {sorted(unknown)}")

    def with_overrides(self, seed=None, n_chains=None) -> "ExperimentConfig":
        cfg = self
        if seed is not None:
            cfg = replace(cfg, sampler=replace(cfg.sampler, seed=seed))
        if n_chains is not None:
            cfg = replace(cfg, n_chains=n_chains)
        return cfg

    def echo(self) -> dict:
        return {
            "label": self.label,
            "lattice": {
                "n_sites": self.lattice.n_sites,
                "m_tilde": self.lattice.m_tilde,
                "omega_tilde": self.lattice.omega_tilde,
            },
            "force": self.force.describe(),
            "sampler": self.sampler.to_dict(),
            "n_chains": self.n_chains,
            "binning": (
                {"bin_width": self.bin_width}
                if self.n_bins is None
                else {"n_bins": self.n_bins, "range": list(self.hist_range)}
            ),
            "outputs": sorted(self.outputs),
        }


def _get(section, key, conv, what):
    raw = section[key]
    try:
        value = conv(raw)
    except (TypeError, ValueError):
        raise ConfigError(f"{section.name}.{key}", f"expected {what}, got {raw!r}") from None
    return value


def _int(raw):
    try:
        return int(raw)
    except ValueError:
        value = float(raw)
    if not math.isfinite(value) or value != int(value):
        raise ValueError(raw)
    return int(value)


def _bool(raw):
    low = raw.strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ValueError(raw)


def _floats(raw):
    return [float(v) for v in raw.replace("\n", ",").split(",") if v.strip()]


def parse_config(text: str) -> ExperimentConfig:
    """Parse and validate an experiment file's text."""
    cp = configparser.ConfigParser(interpolation=None, default_section="__none__")
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ConfigError("<file>", str(exc).splitlines()[0]) from None

    for name in cp.sections():
        if name not in _KEYS:
            raise ConfigError(name, "unknown section")
        for key in cp[name]:
            if key not in _KEYS[name]:
                raise ConfigError(f"{name}.{key}", "unknown key")
    for name in _KEYS:
        if not cp.has_section(name):
            cp.add_section(name)

    lat = cp["lattice"]
    lat_kw = {}
    for key, conv, what in (
        ("n_sites", _int, "an integer"),
        ("m_tilde", float, "a real number"),
        ("omega_tilde", float, "a real number"),
    ):
        if key in lat:
            lat_kw[key] = _get(lat, key, conv, what)
    try:
        lattice = LatticeParams(**lat_kw)
    except ValueError as exc:
        key = str(exc).split()[0]
        raise ConfigError(f"lattice.{key}", str(exc)) from None

    force = _parse_force(cp["force"], lattice)

    smp = cp["sampler"]
    smp_kw = {}
    for key, conv, what in (
        ("total_sweeps", _int, "an integer"),
        ("burn_in_sweeps", _int, "an integer"),
        ("thinning", _int, "an integer"),
        ("proposal_sigma", float, "a real number"),
        ("start", lambda r: Start(r.strip().lower()), "'hot' or 'cold'"),
        ("seed", _int, "an integer"),
        ("tune_proposal", _bool, "a boolean"),
    ):
        if key in smp:
            smp_kw[key] = _get(smp, key, conv, what)
    try:
        sampler = SamplerConfig(**smp_kw)
    except ValueError as exc:
        msg = str(exc)
        key = next((k for k in _KEYS["sampler"] if msg.startswith(k)), "sampler")
        raise ConfigError(f"sampler.{key}", msg) from None
    n_chains = _get(smp, "n_chains", _int, "an integer") if "n_chains" in smp else 1

    out = cp["output"]
    outputs = frozenset(OUTPUT_KINDS)
    if "outputs" in out:
        outputs = frozenset(v.strip() for v in out["outputs"].split(",") if v.strip())
    bin_width, n_bins, hist_range = DEFAULT_BIN_WIDTH, None, None
    if "n_bins" in out:
        if "bin_width" in out:
            raise ConfigError("output.n_bins", "give either bin_width or n_bins, not both")
        n_bins = _get(out, "n_bins", _int, "an integer")
        if n_bins < 1:
            raise ConfigError("output.n_bins", "must be positive")
        if "range_lo" not in out or "range_hi" not in out:
            raise ConfigError("output.n_bins", "requires range_lo and range_hi")
        bin_width = None
    elif "bin_width" in out:
        bin_width = _get(out, "bin_width", float, "a real number")
        if not (math.isfinite(bin_width) and bin_width > 0):
            raise ConfigError("output.bin_width", "must be positive")
    if "range_lo" in out or "range_hi" in out:
        lo = _get(out, "range_lo", float, "a real number")
        hi = _get(out, "range_hi", float, "a real number")
        if not hi > lo:
            raise ConfigError("output.range_hi", "must exceed range_lo")
        hist_range = (lo, hi)

    return ExperimentConfig(
        lattice=lattice,
        force=force,
        sampler=sampler,
        bin_width=bin_width,
        n_bins=n_bins,
        hist_range=hist_range,
        outputs=outputs,
        n_chains=n_chains,
        label=out.get("label", "run").strip() or "run",
        plot_script=_get(out, "plot_script", _bool, "a boolean") if "plot_script" in out else True,
    )


def _parse_force(sec, lattice) -> ForceModel:
    kind = sec.get("kind", "zero").strip().lower()
    if kind not in _FORCE_KEYS:
        raise ConfigError("force.kind", f"unknown kind {kind!r}")
    for key in sec:
        if key not in _FORCE_KEYS[kind]:
            raise ConfigError(f"force.{key}", f"not used by kind {kind!r}")
    if kind == "zero":
        return ZeroForce()
    if kind == "tabulated":
        if "values" not in sec:
            raise ConfigError("force.values", "required for kind 'tabulated'")
        values = _get(sec, "values", _floats, "comma-separated reals")
        if len(values) != lattice.n_sites:
            raise ConfigError("force.values", f"has {len(values)} entries, lattice has {lattice.n_sites} sites")
        return TabulatedForce(np.array(values))
    if "lambda" not in sec:
        raise ConfigError("force.lambda", f"required for kind {kind!r}")
    coupling = _get(sec, "lambda", float, "a real number")
    if kind == "constant":
        return ConstantForce(coupling)
    phase = _get(sec, "phi_tilde", float, "a real number") if "phi_tilde" in sec else 0.0
    if ("omega_d_tilde" in sec) == ("omega_d_cycles" in sec):
        raise ConfigError("force.omega_d_tilde", "give exactly one of omega_d_tilde, omega_d_cycles")
    if "omega_d_cycles" in sec:
        cycles = _get(sec, "omega_d_cycles", _int, "an integer")
        model = SinusoidalForce.with_cycles(coupling, cycles, lattice.n_sites, phase)
    else:
        model = SinusoidalForce(coupling, _get(sec, "omega_d_tilde", float, "a real number"), phase)
    try:
        model.check(lattice)
    except PeriodicityError as exc:
        raise ConfigError("force.omega_d_tilde", str(exc)) from None
    return model


def load_config(path) -> ExperimentConfig:
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read())


def format_config(cfg: ExperimentConfig) -> str:
    """Serialise a config so that ``parse_config`` reproduces it exactly."""
    cp = configparser.ConfigParser(interpolation=None)
    cp["lattice"] = {
        "n_sites": str(cfg.lattice.n_sites),
        "m_tilde": repr(cfg.lattice.m_tilde),
        "omega_tilde": repr(cfg.lattice.omega_tilde),
    }
    desc = cfg.force.describe()
    force = {"kind": desc["kind"]}
    for key in ("lambda", "omega_d_tilde", "phi_tilde"):
        if key in desc:
            force[key] = repr(desc[key])
    if "values" in desc:
        force["values"] = ", ".join(repr(v) for v in desc["values"])
    cp["force"] = force
    s = cfg.sampler
    cp["sampler"] = {
        "total_sweeps": str(s.total_sweeps),
        "burn_in_sweeps": str(s.burn_in_sweeps),
        "thinning": str(s.thinning),
        "proposal_sigma": repr(s.proposal_sigma),
        "start": s.start.value,
        "seed": str(s.seed),
        "tune_proposal": str(s.tune_proposal).lower(),
        "n_chains": str(cfg.n_chains),
    }
    out = {"outputs": ", ".join(sorted(cfg.outputs)), "label": cfg.label, "plot_script": str(cfg.plot_script).lower()}
    if cfg.n_bins is not None:
        out["n_bins"] = str(cfg.n_bins)
    else:
        out["bin_width"] = repr(cfg.bin_width)
    if cfg.hist_range is not None:
        out["range_lo"], out["range_hi"] = repr(cfg.hist_range[0]), repr(cfg.hist_range[1])
    cp["output"] = out
    buf = io.StringIO()
    cp.write(buf)
    return buf.getvalue()
