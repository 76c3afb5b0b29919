"""Driving forces and the discrete Euclidean action on the periodic lattice.

The dimensionless action of a path is

    S = sum_i  m/2 (x_{i+1} - x_i)^2  +  m w^2/2 x_i^2  -  x_i F_i

with x_{N+1} = x_1. The coupling strength lives inside the force model, so
constant and sinusoidal driving are configurations of the same evaluator.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .lattice import LatticeParams, PathState, neighbor_indices

__all__ = [
    "ForceModel",
    "ZeroForce",
    "ConstantForce",
    "SinusoidalForce",
    "TabulatedForce",
    "PeriodicityError",
    "force_from_dict",
    "force_at",
    "total_action",
    "local_action_delta",
    "action_delta_terms",
]

PERIODICITY_ATOL = 1e-9


class PeriodicityError(ValueError):
    """A sinusoidal drive does not close on the periodic lattice."""


class ForceModel:
    """Base class for per-site dimensionless driving forces."""

    kind: str = ""

    def check(self, lattice: LatticeParams) -> None:
        """Raise if the model cannot be placed on ``lattice``."""

    def values(self, lattice: LatticeParams) -> np.ndarray:
        """Force at sites ``1..N`` as a float array of length ``N``."""
        raise NotImplementedError

    def describe(self) -> dict:
        """JSON-friendly descriptor, inverse of :func:`force_from_dict`."""
        raise NotImplementedError


@dataclass(frozen=True)
class ZeroForce(ForceModel):
    kind = "zero"

    def values(self, lattice):
        return np.zeros(lattice.n_sites)

    def describe(self):
        return {"kind": self.kind}


@dataclass(frozen=True)
class ConstantForce(ForceModel):
    """Uniform drive ``F_i = lambda`` at every site."""

    coupling: float
    kind = "constant"

    def values(self, lattice):
        return np.full(lattice.n_sites, float(self.coupling))

    def describe(self):
        return {"kind": self.kind, "lambda": float(self.coupling)}


@dataclass(frozen=True)
class SinusoidalForce(ForceModel):
    """``F_i = lambda * sin(omega_d * i - phi)`` with ``i`` the 1-based site.

    ``omega_d * N`` has to be a whole multiple of ``2 pi`` so that the drive
    is continuous across the periodic boundary; :meth:`check` enforces it.
    """

    coupling: float
    omega_d: float
    phase: float = 0.0
    kind = "sinusoidal"

    @classmethod
    def with_cycles(cls, coupling, cycles, n_sites, phase=0.0):
        """Drive completing ``cycles`` whole periods around the ring."""
        return cls(coupling, 2.0 * math.pi * cycles / n_sites, phase)

    def check(self, lattice):
        turns = self.omega_d * lattice.n_sites / (2.0 * math.pi)
        if abs(self.omega_d * lattice.n_sites - 2.0 * math.pi * round(turns)) > PERIODICITY_ATOL:
            raise PeriodicityError(
                f"omega_d={self.omega_d!r} gives omega_d*N = {turns:.12g} * 2pi "
                f"for N={lattice.n_sites}; must be an integer multiple of 2pi"
            )

    def values(self, lattice):
        self.check(lattice)
        i = lattice.sites()
        return self.coupling * np.sin(self.omega_d * i - self.phase)

    def describe(self):
        return {
            "kind": self.kind,
            "lambda": float(self.coupling),
            "omega_d_tilde": float(self.omega_d),
            "phi_tilde": float(self.phase),
        }


@dataclass(frozen=True, eq=False)
class TabulatedForce(ForceModel):
    """Arbitrary per-site force; ``table[0]`` is the force at site 1."""

    table: np.ndarray = field(default_factory=lambda: np.zeros(0))
    kind = "tabulated"

    def __post_init__(self):
        t = np.array(self.table, dtype=np.float64)
        if t.ndim != 1 or not np.all(np.isfinite(t)):
            raise ValueError("tabulated force must be a finite 1-d array")
        t.setflags(write=False)
        object.__setattr__(self, "table", t)

    def __eq__(self, other):
        return isinstance(other, TabulatedForce) and np.array_equal(self.table, other.table)

    def __hash__(self):
        return hash(self.table.tobytes())

    def check(self, lattice):
        if self.table.shape[0] != lattice.n_sites:
            raise ValueError(
                f"tabulated force has {self.table.shape[0]} values, "
                f"lattice has {lattice.n_sites} sites"
            )

    def values(self, lattice):
        self.check(lattice)
        return self.table.copy()

    def describe(self):
        return {"kind": self.kind, "values": [float(v) for v in self.table]}


def force_from_dict(desc: dict) -> ForceModel:
    kind = desc.get("kind", "zero")
    if kind == "zero":
        return ZeroForce()
    if kind == "constant":
        return ConstantForce(float(desc["lambda"]))
    if kind == "sinusoidal":
        return SinusoidalForce(
            float(desc["lambda"]), float(desc["omega_d_tilde"]), float(desc.get("phi_tilde", 0.0))
        )
    if kind == "tabulated":
        return TabulatedForce(np.asarray(desc["values"], dtype=float))
    raise ValueError(f"unknown force kind {kind!r}")


def force_at(model: ForceModel, site: int, lattice: LatticeParams) -> float:
    """Force at a single 1-based site."""
    if not 1 <= site <= lattice.n_sites:
        raise IndexError(f"site {site} outside 1..{lattice.n_sites}")
    model.check(lattice)
    if isinstance(model, ZeroForce):
        return 0.0
    if isinstance(model, ConstantForce):
        return float(model.coupling)
    if isinstance(model, SinusoidalForce):
        return float(model.coupling * math.sin(model.omega_d * site - model.phase))
    return float(model.values(lattice)[site - 1])


def _positions(path) -> np.ndarray:
    if isinstance(path, PathState):
        return path.positions
    return np.asarray(path, dtype=np.float64)


def total_action(path, lattice: LatticeParams, force: ForceModel | np.ndarray) -> float:
    """Full periodic action of ``path``.

    ``force`` may be a :class:`ForceModel` or a precomputed per-site array.
    """
    x = _positions(path)
    if x.shape != (lattice.n_sites,):
        raise ValueError(f"path shape {x.shape} does not match {lattice.n_sites} sites")
    f = force.values(lattice) if isinstance(force, ForceModel) else np.asarray(force, dtype=float)
    m = lattice.m_tilde
    kinetic = 0.5 * m * np.sum((np.roll(x, -1) - x) ** 2)
    potential = 0.5 * m * lattice.omega_tilde**2 * np.sum(x * x)
    s = float(kinetic + potential - np.dot(x, f))
    if not math.isfinite(s):
        raise OverflowError("action is not finite")
    return s


def action_delta_terms(old, new, left, right, m, spring, f):
    """Action change when one site moves from ``old`` to ``new``.

    ``left``/``right`` are the neighbouring values and ``spring = m w^2``.
    Shared by the Python reference path and the compiled sweep kernel.
    """
    d = new - old
    s = old + new
    return d * (m * (s - left - right) + 0.5 * spring * s - f)


def local_action_delta(
    path, site: int, new_value: float, lattice: LatticeParams, force: ForceModel
) -> float:
    """``S(path with x_site = new_value) - S(path)`` from the local terms only."""
    x = _positions(path)
    prev, nxt = neighbor_indices(site, lattice)
    return float(
        action_delta_terms(
            x[site - 1],
            float(new_value),
            x[prev - 1],
            x[nxt - 1],
            lattice.m_tilde,
            lattice.spring,
            force_at(force, site, lattice),
        )
    )
