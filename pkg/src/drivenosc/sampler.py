"""Random-site Metropolis sampling of lattice paths.

A sweep is ``N`` single-site updates at sites drawn uniformly with
replacement. Each update proposes ``x + sigma * z`` with ``z ~ N(0, 1)`` and
accepts when ``dS <= 0`` or ``u < exp(-dS)``.

Random numbers come from a numpy ``Generator`` (PCG64) seeded through a
``SeedSequence`` keyed on ``(seed, chain_index)``. Every sweep draws, in
order, ``N`` site indices, ``N`` standard normals and ``N`` uniforms; the
compiled kernel consumes them. Results are therefore bit-reproducible and
independent of how many chains run or in what order.
"""

from __future__ import annotations

import enum
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

import numba
import numpy as np

from .action import ForceModel, action_delta_terms
from .lattice import LatticeParams, PathState

__all__ = [
    "Start",
    "SamplerConfig",
    "ChainOutput",
    "make_rng",
    "init_path",
    "accept",
    "metropolis_step",
    "sweep",
    "run_chain",
    "run_chains_parallel",
    "retained_sweeps",
]

TUNE_WINDOW = 10
TUNE_HIGH, TUNE_LOW = 0.6, 0.4


class Start(str, enum.Enum):
    HOT = "hot"
    COLD = "cold"


@dataclass(frozen=True)
class SamplerConfig:
    """Run length, thinning and proposal settings.

    ``thinning`` counts sweeps discarded between two retained
    configurations, so one configuration is kept every ``thinning + 1``
    sweeps, starting with the first sweep after burn-in.
    """

    total_sweeps: int = 12_000
    burn_in_sweeps: int = 100
    thinning: int = 12
    proposal_sigma: float = 1.0
    start: Start = Start.HOT
    seed: int = 20_240_101
    tune_proposal: bool = False

    def __post_init__(self):
        object.__setattr__(self, "start", Start(self.start))
        for name in ("total_sweeps", "burn_in_sweeps", "thinning", "seed"):
            value = getattr(self, name)
            if isinstance(value, bool) or int(value) != value:
                raise ValueError(f"{name} must be an integer, got {value!r}")
            object.__setattr__(self, name, int(value))
        if self.total_sweeps < 1:
            raise ValueError("total_sweeps must be positive")
        if self.burn_in_sweeps < 0:
            raise ValueError("burn_in_sweeps must be nonnegative")
        if self.burn_in_sweeps >= self.total_sweeps:
            raise ValueError("burn_in_sweeps must be smaller than total_sweeps")
        if self.thinning < 0:
            raise ValueError("thinning must be nonnegative")
        if not (math.isfinite(self.proposal_sigma) and self.proposal_sigma > 0):
            raise ValueError("proposal_sigma must be finite and > 0")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must fit in an unsigned 64-bit integer")

    @property
    def n_retained(self) -> int:
        return len(retained_sweeps(self))

    def to_dict(self) -> dict:
        d = asdict(self)
        d["start"] = self.start.value
        return d


def retained_sweeps(config: SamplerConfig) -> range:
    """1-based sweep numbers whose configurations are kept."""
    return range(config.burn_in_sweeps + 1, config.total_sweeps + 1, config.thinning + 1)


@dataclass(eq=False)
class ChainOutput:
    """Everything one chain produced.

    ``samples`` holds the retained configurations as rows;
    ``trace`` has one ``(mean, std)`` row per sweep (after the sweep),
    burn-in included.
    """

    samples: np.ndarray
    trace: np.ndarray
    acceptance_rate: float
    final_sigma: float
    config_echo: dict = field(default_factory=dict)

    @property
    def retained_paths(self) -> list[PathState]:
        return [PathState(row) for row in self.samples]

    @property
    def n_retained(self) -> int:
        return self.samples.shape[0]


def make_rng(seed: int, chain_index: int = 0) -> np.random.Generator:
    """Independent, reproducible stream for ``(seed, chain_index)``."""
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(chain_index,))))


def init_path(start: Start | str, lattice: LatticeParams, rng: np.random.Generator) -> PathState:
    """Cold start is all zeros; hot start is i.i.d. uniform on [-1, 1]."""
    if Start(start) is Start.COLD:
        return PathState.zeros(lattice)
    return PathState(rng.uniform(-1.0, 1.0, lattice.n_sites))


@numba.njit(cache=True)
def accept(delta, u):
    """Metropolis rule ``min(1, exp(-delta))`` against a uniform draw ``u``."""
    return delta <= 0.0 or u < math.exp(-delta)


_delta_kernel = numba.njit(cache=True)(action_delta_terms)


@numba.njit(cache=True, nogil=True)
def _sweep_kernel(x, sites, z, u, sigma, m, spring, force):
    n = x.shape[0]
    accepted = 0
    for k in range(sites.shape[0]):
        i = sites[k]
        left = x[i - 1] if i > 0 else x[n - 1]
        right = x[i + 1] if i < n - 1 else x[0]
        old = x[i]
        new = old + sigma * z[k]
        if accept(_delta_kernel(old, new, left, right, m, spring, force[i]), u[k]):
            x[i] = new
            accepted += 1
    return accepted


def metropolis_step(path, site, lattice, force, sigma, rng):
    """One single-site update at 1-based ``site``.

    Draws one standard normal then one uniform from ``rng`` and returns
    ``(accepted, path)``; on rejection the input path is returned unchanged.
    """
    x = path.positions if isinstance(path, PathState) else np.asarray(path, dtype=float)
    f = force.values(lattice) if isinstance(force, ForceModel) else np.asarray(force, dtype=float)
    i = site - 1
    if not 0 <= i < lattice.n_sites:
        raise IndexError(f"site {site} outside 1..{lattice.n_sites}")
    old = float(x[i])
    new = old + sigma * float(rng.standard_normal())
    u = float(rng.random())
    n = lattice.n_sites
    delta = action_delta_terms(
        old, new, float(x[i - 1]), float(x[(i + 1) % n]), lattice.m_tilde, lattice.spring, float(f[i])
    )
    if accept(delta, u):
        out = x.copy()
        out[i] = new
        return True, PathState(out) if isinstance(path, PathState) else out
    return False, path


def _draw_sweep(rng, n):
    return rng.integers(0, n, size=n), rng.standard_normal(n), rng.random(n)


def sweep(path, lattice, force, sigma, rng):
    """One sweep of ``N`` random-site updates; returns ``(path, n_accepted)``.

    A :class:`PathState` input yields a new :class:`PathState`; a raw numpy
    array is updated in place.
    """
    f = force.values(lattice) if isinstance(force, ForceModel) else np.ascontiguousarray(force, dtype=float)
    if isinstance(path, PathState):
        x = path.positions.copy()
    else:
        x = path
    sites, z, u = _draw_sweep(rng, lattice.n_sites)
    n_acc = _sweep_kernel(x, sites, z, u, float(sigma), lattice.m_tilde, lattice.spring, f)
    return (PathState(x) if isinstance(path, PathState) else x), int(n_acc)


def _tune(sigma, rate):
    if rate > TUNE_HIGH:
        return sigma * 1.1
    if rate < TUNE_LOW:
        return sigma * 0.9
    return sigma


def run_chain(
    lattice: LatticeParams,
    force: ForceModel,
    config: SamplerConfig,
    chain_index: int = 0,
) -> ChainOutput:
    """Run one chain from initialisation through burn-in and production."""
    f = np.ascontiguousarray(force.values(lattice))
    rng = make_rng(config.seed, chain_index)
    n = lattice.n_sites
    x = np.array(init_path(config.start, lattice, rng).positions)

    keep = retained_sweeps(config)
    samples = np.empty((len(keep), n))
    trace = np.empty((config.total_sweeps, 2))
    sigma = config.proposal_sigma
    window_acc = 0
    post_acc = 0
    row = 0
    for s in range(1, config.total_sweeps + 1):
        x, n_acc = sweep(x, lattice, f, sigma, rng)
        trace[s - 1, 0] = x.mean()
        trace[s - 1, 1] = x.std()
        if s <= config.burn_in_sweeps:
            if config.tune_proposal:
                window_acc += n_acc
                if s % TUNE_WINDOW == 0:
                    sigma = _tune(sigma, window_acc / (TUNE_WINDOW * n))
                    window_acc = 0
            continue
        post_acc += n_acc
        if (s - keep.start) % keep.step == 0:
            samples[row] = x
            row += 1

    n_post = config.total_sweeps - config.burn_in_sweeps
    return ChainOutput(
        samples=samples,
        trace=trace,
        acceptance_rate=post_acc / (n_post * n),
        final_sigma=sigma,
        config_echo={
            "lattice": asdict(lattice),
            "force": force.describe(),
            "sampler": config.to_dict(),
            "chain_index": chain_index,
        },
    )


def run_chains_parallel(
    lattice: LatticeParams,
    force: ForceModel,
    config: SamplerConfig,
    n_chains: int,
    max_workers: int | None = None,
) -> list[ChainOutput]:
    """Run ``n_chains`` independent chains; output is ordered by chain index."""
    if n_chains < 1:
        raise ValueError("n_chains must be >= 1")
    if n_chains == 1 or max_workers == 1:
        return [run_chain(lattice, force, config, i) for i in range(n_chains)]
    with ThreadPoolExecutor(max_workers=max_workers) as pool:
        futures = [pool.submit(run_chain, lattice, force, config, i) for i in range(n_chains)]
        return [fut.result() for fut in futures]
