"""Reductions of retained path samples into measured quantities."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .lattice import PathState

__all__ = [
    "Histogram",
    "ObservableSet",
    "AutocorrTime",
    "as_samples",
    "mean_position",
    "std_position",
    "per_site_mean",
    "histogram",
    "thermalization_trace",
    "autocorrelation",
    "autocorrelation_time",
    "integrated_autocorrelation",
    "mean_stderr",
    "fit_sinusoid",
    "sinusoid_amplitude_stderr",
    "split_peak_modes",
    "measure",
]

DEFAULT_BIN_WIDTH = 0.1
MIN_SERIES = 10
WINDOW_FACTOR = 6.0


def as_samples(samples) -> np.ndarray:
    """Coerce samples (2-d array or sequence of paths) to a float 2-d array."""
    if isinstance(samples, PathState):
        samples = [samples]
    if isinstance(samples, np.ndarray):
        arr = np.asarray(samples, dtype=np.float64)
    else:
        arr = np.array(
            [s.positions if isinstance(s, PathState) else s for s in samples], dtype=np.float64
        )
    if arr.ndim == 1:
        arr = arr[None, :]
    if arr.ndim != 2 or arr.size == 0:
        raise ValueError("need at least one non-empty sample")
    return arr


@dataclass(frozen=True, eq=False)
class Histogram:
    bin_edges: np.ndarray
    densities: np.ndarray

    @property
    def centers(self) -> np.ndarray:
        return 0.5 * (self.bin_edges[1:] + self.bin_edges[:-1])

    @property
    def widths(self) -> np.ndarray:
        return np.diff(self.bin_edges)

    def integral(self) -> float:
        return float(np.sum(self.densities * self.widths))


@dataclass(frozen=True, eq=False)
class ObservableSet:
    mean_x: float
    mean_x_stderr: float
    std_x: float
    per_site_mean: np.ndarray
    per_site_stderr: np.ndarray
    histogram: Histogram
    tau_int: float
    tau_int_retained: float


@dataclass(frozen=True)
class AutocorrTime:
    tau: float
    window: int
    degenerate: bool = False


def mean_position(samples) -> float:
    return float(np.mean(as_samples(samples)))


def std_position(samples) -> float:
    """Population standard deviation pooled over all sites and samples."""
    x = as_samples(samples)
    if x.size < 2:
        raise ValueError("need at least two values for a standard deviation")
    return float(np.std(x))


def per_site_mean(samples) -> np.ndarray:
    return np.mean(as_samples(samples), axis=0)


def histogram(samples, bin_width=None, n_bins=None, range=None) -> Histogram:
    """Density histogram of every site value of every sample.

    With ``bin_width`` the edges sit on ``lo + k * bin_width``; ``lo``
    defaults to the multiple of ``bin_width`` just below the data, and a
    given ``range`` is widened by whole bins until it covers all data.
    With ``n_bins`` the ``range`` is split evenly and out-of-range values
    are dropped before normalising.
    """
    x = as_samples(samples).ravel()
    if n_bins is not None:
        if range is None:
            range = (float(x.min()), float(x.max()))
        lo, hi = map(float, range)
        if not hi > lo:
            raise ValueError(f"empty histogram range ({lo}, {hi})")
        if int(n_bins) < 1:
            raise ValueError("n_bins must be positive")
        counts, edges = np.histogram(x, bins=int(n_bins), range=(lo, hi))
    else:
        w = DEFAULT_BIN_WIDTH if bin_width is None else float(bin_width)
        if not w > 0:
            raise ValueError(f"bin_width must be positive, got {w}")
        xmin, xmax = float(x.min()), float(x.max())
        if range is None:
            lo, hi = math.floor(xmin / w) * w, xmax
        else:
            lo, hi = map(float, range)
            if not hi > lo:
                raise ValueError(f"empty histogram range ({lo}, {hi})")
            if xmin < lo:
                lo -= math.ceil((lo - xmin) / w) * w
            hi = max(hi, xmax)
        idx = np.maximum(np.floor((x - lo) / w).astype(np.int64), 0)
        nb = max(1, math.ceil((hi - lo) / w - 1e-9), int(idx.max()) + 1)
        counts = np.bincount(idx, minlength=nb)
        edges = lo + w * np.arange(nb + 1)
    total = counts.sum()
    if total == 0:
        raise ValueError("no values fall inside the histogram range")
    dens = counts / (total * np.diff(edges))
    return Histogram(np.asarray(edges, dtype=float), dens)


def thermalization_trace(trace) -> list[tuple[int, float, float]]:
    """``(sweep, mean, std)`` rows with 1-based sweep numbers."""
    t = np.asarray(trace, dtype=float)
    return [(i + 1, float(m), float(s)) for i, (m, s) in enumerate(t)]


def autocorrelation(series) -> np.ndarray:
    """Normalised empirical autocorrelation ``rho(t)`` for ``t = 0..n-1``."""
    x = np.asarray(series, dtype=float)
    n = x.shape[0]
    d = x - x.mean()
    size = 1 << (2 * n - 1).bit_length()
    f = np.fft.rfft(d, size)
    acov = np.fft.irfft(f * np.conj(f), size)[:n] / n
    return acov / acov[0]


def autocorrelation_time(series) -> AutocorrTime:
    """Integrated autocorrelation time with a self-consistent window.

    ``tau = 1/2 + sum_{t=1}^{W} rho(t)``; summation stops before the first
    negative ``rho(t)`` or once ``t >= 6 tau``. A constant series is
    flagged ``degenerate`` and reported as ``tau = 1/2``.
    """
    x = np.asarray(series, dtype=float)
    if x.ndim != 1 or x.shape[0] < MIN_SERIES:
        raise ValueError(f"series needs at least {MIN_SERIES} values")
    if np.ptp(x) == 0.0 or np.var(x) <= 1e-300:
        return AutocorrTime(0.5, 0, degenerate=True)
    rho = autocorrelation(x)
    tau = 0.5
    window = 0
    for t in range(1, x.shape[0]):
        if rho[t] < 0.0:
            break
        tau += rho[t]
        window = t
        if t >= WINDOW_FACTOR * tau:
            break
    return AutocorrTime(float(tau), window)


def integrated_autocorrelation(series) -> float:
    return autocorrelation_time(series).tau


def mean_stderr(series) -> tuple[float, float]:
    """Error of the mean of a correlated series, and its ``tau``.

    ``std * sqrt(2 tau / n)``.
    """
    x = np.asarray(series, dtype=float)
    tau = integrated_autocorrelation(x)
    return float(np.std(x) * math.sqrt(2.0 * tau / x.shape[0])), tau


def fit_sinusoid(values, omega_d, sites=None):
    """Least-squares fit ``A sin(omega_d i - phi)`` over 1-based sites.

    Returns ``(A, phi)`` with ``A >= 0``.
    """
    y = np.asarray(values, dtype=float)
    i = np.arange(1, y.shape[-1] + 1) if sites is None else np.asarray(sites)
    design = np.column_stack([np.sin(omega_d * i), np.cos(omega_d * i)])
    (a, b), *_ = np.linalg.lstsq(design, y, rcond=None)
    return float(math.hypot(a, b)), float(math.atan2(-b, a))


def sinusoid_amplitude_stderr(samples, omega_d, phase):
    """Error of the fitted amplitude, from the per-sample projection series."""
    x = as_samples(samples)
    i = np.arange(1, x.shape[1] + 1)
    design = np.column_stack([np.sin(omega_d * i), np.cos(omega_d * i)])
    coef, *_ = np.linalg.lstsq(design, x.T, rcond=None)
    along = coef[0] * math.cos(phase) - coef[1] * math.sin(phase)
    return mean_stderr(along)[0]


def split_peak_modes(hist: Histogram) -> tuple[float, float, float]:
    """Locate the two halves' maxima of a symmetric two-peaked histogram.

    Returns ``(negative_mode, positive_mode, dip_ratio)`` where
    ``dip_ratio`` is the density at the central bin over the smaller peak;
    a value below one means the histogram dips between the peaks.
    """
    c, d = hist.centers, hist.densities
    neg, pos = c < 0, c > 0
    if not neg.any() or not pos.any():
        raise ValueError("histogram does not straddle zero")
    neg_mode = float(c[neg][np.argmax(d[neg])])
    pos_mode = float(c[pos][np.argmax(d[pos])])
    centre = d[np.argmin(np.abs(c))]
    return neg_mode, pos_mode, float(centre / min(d[neg].max(), d[pos].max()))


def measure(samples, trace=None, bin_width=DEFAULT_BIN_WIDTH, n_bins=None, range=None) -> ObservableSet:
    """Compute the standard observables of a run.

    The error of ``mean_x`` comes from the series of per-sample path means
    and its own autocorrelation time, which accounts for correlations along
    the path; ``tau_int`` itself is measured on the per-sweep mean trace.
    """
    x = as_samples(samples)
    path_means = x.mean(axis=1)
    if x.shape[0] >= MIN_SERIES:
        se, tau_ret = mean_stderr(path_means)
        site_se = x.std(axis=0) * math.sqrt(2.0 * tau_ret / x.shape[0])
    else:
        tau_ret = float("nan")
        se = float("nan")
        site_se = np.full(x.shape[1], np.nan)
    if trace is not None and len(trace) >= MIN_SERIES:
        tau = integrated_autocorrelation(np.asarray(trace)[:, 0])
    else:
        tau = float("nan")
    return ObservableSet(
        mean_x=mean_position(x),
        mean_x_stderr=se,
        std_x=std_position(x),
        per_site_mean=per_site_mean(x),
        per_site_stderr=site_se,
        histogram=histogram(x, bin_width=bin_width if n_bins is None else None, n_bins=n_bins, range=range),
        tau_int=tau,
        tau_int_retained=tau_ret,
    )
