"""Periodic imaginary-time lattice and path configurations.

Everything is stored in lattice units (``dtau == 1``): ``m_tilde`` and
``omega_tilde`` are the dimensionless mass and frequency, and path entries
are dimensionless positions. Site indices are 1-based in the public API.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = ["LatticeParams", "PathState", "neighbor_indices"]


@dataclass(frozen=True)
class LatticeParams:
    """Lattice size and dimensionless oscillator parameters.

    Parameters
    ----------
    n_sites : int
        Number of time slices on the ring (at least 3).
    m_tilde : float
        Dimensionless mass ``m * dtau``.
    omega_tilde : float
        Dimensionless natural frequency ``omega * dtau``.
    """

    n_sites: int = 120
    m_tilde: float = 1.0
    omega_tilde: float = 1.0

    def __post_init__(self):
        if isinstance(self.n_sites, bool) or int(self.n_sites) != self.n_sites:
            raise ValueError(f"n_sites must be an integer, got {self.n_sites!r}")
        object.__setattr__(self, "n_sites", int(self.n_sites))
        if self.n_sites < 3:
            raise ValueError(f"n_sites must be >= 3, got {self.n_sites}")
        for name in ("m_tilde", "omega_tilde"):
            value = float(getattr(self, name))
            if not math.isfinite(value) or value <= 0.0:
                raise ValueError(f"{name} must be finite and > 0, got {value!r}")
            object.__setattr__(self, name, value)

    @property
    def spring(self) -> float:
        """Coefficient ``m * omega**2`` of the harmonic potential term."""
        return self.m_tilde * self.omega_tilde**2

    def sites(self) -> np.ndarray:
        """1-based site indices, which double as the imaginary times."""
        return np.arange(1, self.n_sites + 1)


@dataclass(frozen=True, eq=False)
class PathState:
    """One periodic lattice configuration ``(x_1, ..., x_N)``.

    The array is copied and made read-only on construction.
    """

    positions: np.ndarray

    def __post_init__(self):
        x = np.array(self.positions, dtype=np.float64)
        if x.ndim != 1:
            raise ValueError("positions must be one-dimensional")
        if not np.all(np.isfinite(x)):
            raise ValueError("positions must be finite")
        x.setflags(write=False)
        object.__setattr__(self, "positions", x)

    @classmethod
    def zeros(cls, lattice: LatticeParams) -> "PathState":
        return cls(np.zeros(lattice.n_sites))

    @property
    def n_sites(self) -> int:
        return self.positions.shape[0]

    def __len__(self):
        return self.n_sites

    def __getitem__(self, site: int) -> float:
        """Value at 1-based ``site``."""
        if not 1 <= site <= self.n_sites:
            raise IndexError(f"site {site} outside 1..{self.n_sites}")
        return float(self.positions[site - 1])

    def __eq__(self, other):
        if not isinstance(other, PathState):
            return NotImplemented
        return np.array_equal(self.positions, other.positions)

    def replace(self, site: int, value: float) -> "PathState":
        """Return a copy with the 1-based ``site`` set to ``value``."""
        if not 1 <= site <= self.n_sites:
            raise IndexError(f"site {site} outside 1..{self.n_sites}")
        x = self.positions.copy()
        x[site - 1] = value
        return PathState(x)

    def check(self, lattice: LatticeParams) -> None:
        if self.n_sites != lattice.n_sites:
            raise ValueError(
                f"path has {self.n_sites} sites, lattice has {lattice.n_sites}"
            )


def neighbor_indices(site: int, lattice: LatticeParams) -> tuple[int, int]:
    """Return ``(prev, next)`` of a 1-based site on the periodic ring.

    >>> neighbor_indices(1, LatticeParams(120))
    (120, 2)
    """
    n = lattice.n_sites
    if not 1 <= site <= n:
        raise IndexError(f"site {site} outside 1..{n}")
    prev = n if site == 1 else site - 1
    nxt = 1 if site == n else site + 1
    return prev, nxt
