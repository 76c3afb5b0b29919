"""Exact reference values for the sampled distribution.

The weight ``exp(-S)`` is a multivariate Gaussian with precision matrix
``A`` (circulant: ``2m + m w^2`` on the diagonal, ``-m`` on both cyclic
neighbours) and mean ``A^{-1} F``. Its Fourier modes diagonalise it, with
eigenvalues ``m w^2 + 2m (1 - cos(2 pi k / N))``.

Two levels of prediction are offered: the coherent-state displacement
``F / (m w^2)`` of the continuum oscillator, and the finite-lattice mean and
variance that the Markov chain actually targets.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .action import ConstantForce, ForceModel, SinusoidalForce, ZeroForce
from .lattice import LatticeParams

__all__ = [
    "TheoryPrediction",
    "coherent_alpha",
    "coherent_alpha_trajectory",
    "precision_matrix",
    "precision_eigenvalues",
    "apply_precision",
    "exact_lattice_mean",
    "exact_lattice_covariance_diag",
    "continuum_ground_variance",
    "sho_ground_density",
    "pooled_density",
    "theory_prediction",
]


@dataclass(frozen=True, eq=False)
class TheoryPrediction:
    alpha: float
    alpha_trajectory: np.ndarray
    lattice_exact_mean: np.ndarray
    lattice_exact_var: np.ndarray


def _require_confining(lattice) -> None:
    if not lattice.omega_tilde > 0.0:
        raise ValueError("precision matrix is singular for omega_tilde <= 0")


def coherent_alpha(lattice: LatticeParams, coupling: float) -> float:
    """Displacement ``lambda / (m w^2)`` of the driven ground state."""
    return coupling / (lattice.m_tilde * lattice.omega_tilde**2)


def coherent_alpha_trajectory(lattice: LatticeParams, force: ForceModel) -> np.ndarray:
    """Per-site continuum displacement ``F_i / (m w^2)``."""
    return force.values(lattice) / lattice.spring


def precision_matrix(lattice: LatticeParams) -> np.ndarray:
    """Dense ``N x N`` precision matrix; meant for small-lattice cross-checks."""
    n, m = lattice.n_sites, lattice.m_tilde
    a = np.zeros((n, n))
    idx = np.arange(n)
    a[idx, idx] = 2.0 * m + m * lattice.omega_tilde**2
    a[idx, (idx + 1) % n] -= m
    a[idx, (idx - 1) % n] -= m
    return a


def precision_eigenvalues(lattice: LatticeParams) -> np.ndarray:
    k = np.arange(lattice.n_sites)
    m = lattice.m_tilde
    return m * lattice.omega_tilde**2 + 2.0 * m * (1.0 - np.cos(2.0 * np.pi * k / lattice.n_sites))


def apply_precision(lattice: LatticeParams, x: np.ndarray) -> np.ndarray:
    """Matrix-free ``A @ x`` using cyclic shifts."""
    x = np.asarray(x, dtype=float)
    m = lattice.m_tilde
    return (2.0 * m + m * lattice.omega_tilde**2) * x - m * (np.roll(x, 1) + np.roll(x, -1))


def exact_lattice_mean(lattice: LatticeParams, force: ForceModel) -> np.ndarray:
    """Solve ``A mu = F`` by diagonalising the circulant in Fourier space."""
    _require_confining(lattice)
    f = force.values(lattice)
    if isinstance(force, ZeroForce):
        return np.zeros(lattice.n_sites)
    if isinstance(force, ConstantForce):
        # uniform vector is the zero mode; its eigenvalue is exactly m w^2
        return np.full(lattice.n_sites, coherent_alpha(lattice, force.coupling))
    mu = np.fft.ifft(np.fft.fft(f) / precision_eigenvalues(lattice))
    return mu.real


def exact_lattice_covariance_diag(lattice: LatticeParams) -> np.ndarray:
    """Per-site variance ``(A^{-1})_{ii}``, identical at every site."""
    _require_confining(lattice)
    var = np.mean(1.0 / precision_eigenvalues(lattice))
    return np.full(lattice.n_sites, var)


def continuum_ground_variance(lattice: LatticeParams) -> float:
    """``1 / (2 m w)``, the position variance of the continuum ground state."""
    return 1.0 / (2.0 * lattice.m_tilde * lattice.omega_tilde)


def sho_ground_density(x, lattice: LatticeParams, center: float = 0.0):
    """Gaussian density with the lattice-exact per-site variance."""
    var = exact_lattice_covariance_diag(lattice)[0]
    x = np.asarray(x, dtype=float)
    out = np.exp(-((x - center) ** 2) / (2.0 * var)) / math.sqrt(2.0 * math.pi * var)
    return float(out) if out.ndim == 0 else out


def pooled_density(x, lattice: LatticeParams, force: ForceModel):
    """Exact density of a position pooled over all sites.

    An equal-weight mixture of the per-site Gaussians; for a time-dependent
    drive this is the time-averaged distribution.
    """
    mu = exact_lattice_mean(lattice, force)
    var = exact_lattice_covariance_diag(lattice)[0]
    x = np.asarray(x, dtype=float)
    z = (x[..., None] - mu) ** 2 / (2.0 * var)
    return np.mean(np.exp(-z), axis=-1) / math.sqrt(2.0 * math.pi * var)


def theory_prediction(lattice: LatticeParams, force: ForceModel) -> TheoryPrediction:
    """Bundle the continuum and lattice-exact predictions.

    ``alpha`` is the constant displacement for uniform drives and the
    continuum amplitude ``lambda / (m w^2)`` for sinusoidal ones; for
    tabulated drives it is the largest ``|alpha_i|``.
    """
    traj = coherent_alpha_trajectory(lattice, force)
    if isinstance(force, (ConstantForce, SinusoidalForce)):
        alpha = coherent_alpha(lattice, force.coupling)
    elif isinstance(force, ZeroForce):
        alpha = 0.0
    else:
        alpha = float(np.max(np.abs(traj)))
    return TheoryPrediction(
        alpha=alpha,
        alpha_trajectory=traj,
        lattice_exact_mean=exact_lattice_mean(lattice, force),
        lattice_exact_var=exact_lattice_covariance_diag(lattice),
    )
