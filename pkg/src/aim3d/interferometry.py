"""
Visibility estimation and Fourier-domain image reconstruction.

Conventions
-----------
Forward: a scene of point intensities ``I_t`` at direction cosines
``(alpha_t, beta_t)`` has visibility

    V(u, v) = sum_t I_t exp(+j 2 pi (u alpha_t + v beta_t)).

Estimated visibilities follow the same sign: for receivers ``a`` and
``b`` the estimate is ``mean(s_a * conj(s_b))`` at
``u = (x_a - x_b) / lambda``. Inverse:

    I_r(alpha, beta) = sum_n w_n V_n exp(-j 2 pi (u_n alpha + v_n beta)),

with ``w_n`` the baseline multiplicity (natural weighting, the default).
Redundant baselines are averaged before weighting, so naturally weighted
reconstruction of the all-ones set reproduces ``compute_psf``.
"""

from __future__ import annotations

import logging
import warnings
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy import fft as sfft

from .compression import RadarDataCube
from .geometry import ArrayGeometry, SamplingFunction, compute_baselines, _weights, _check_grid
from .images import ImageGrid
from .scene import ChannelData
from .waveform import SampledWaveform

log = logging.getLogger(__name__)

__all__ = [
    "VisibilitySet",
    "ImageGrid",
    "analytic_visibility",
    "analytic_visibility_set",
    "correlation_matrix",
    "estimate_visibilities_raw",
    "estimate_visibilities_per_range_bin",
    "per_range_bin_visibilities",
    "reconstruct_image",
    "range_azimuth_image",
    "remove_lfm_component",
]

SOURCES = ("raw_correlation", "per_range_bin", "analytic")


@dataclass
class VisibilitySet:
    """Complex visibilities on the samples of a sampling function."""

    u: np.ndarray
    v: np.ndarray
    values: np.ndarray
    multiplicity: np.ndarray
    source: str = "analytic"
    integration_samples: int = 0

    def __post_init__(self):
        self.u = np.asarray(self.u, dtype=float)
        self.v = np.asarray(self.v, dtype=float)
        self.values = np.asarray(self.values, dtype=np.complex128)
        self.multiplicity = np.asarray(self.multiplicity, dtype=np.int64)
        if not (self.u.shape == self.v.shape == self.values.shape == self.multiplicity.shape):
            raise ValueError("u, v, values and multiplicity must have equal length")
        if self.source not in SOURCES:
            raise ValueError(f"unknown visibility source {self.source!r}")

    def __len__(self):
        return self.u.size

    def __add__(self, other: "VisibilitySet") -> "VisibilitySet":
        if not (np.array_equal(self.u, other.u) and np.array_equal(self.v, other.v)):
            raise ValueError("visibility sets sample different (u, v) points")
        return VisibilitySet(self.u, self.v, self.values + other.values, self.multiplicity,
                             self.source, self.integration_samples)

    def zero_spacing(self) -> complex:
        hits = np.flatnonzero((self.u == 0) & (self.v == 0))
        if hits.size == 0:
            raise ValueError("no zero-spacing sample")
        return complex(self.values[hits[0]])

    def normalized(self) -> "VisibilitySet":
        """Copy scaled so the zero-spacing sample is 1."""
        return VisibilitySet(self.u, self.v, self.values / self.zero_spacing(),
                             self.multiplicity, self.source, self.integration_samples)

    @classmethod
    def ones(cls, sampling: SamplingFunction) -> "VisibilitySet":
        return cls(sampling.u, sampling.v, np.ones(len(sampling)), sampling.multiplicity)


def analytic_visibility(targets, u, v):
    """Visibility of point sources ``(alpha, beta, intensity)`` at ``(u, v)``.

    ``u`` and ``v`` may be scalars or arrays of matching shape.
    """
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    out = np.zeros(np.broadcast(u, v).shape, dtype=np.complex128)
    for alpha, beta, intensity in targets:
        if abs(alpha) > 1 or abs(beta) > 1:
            raise ValueError("direction cosines must lie in [-1, 1]")
        out = out + intensity * np.exp(2j * np.pi * (u * alpha + v * beta))
    return out if out.ndim else complex(out)


def analytic_visibility_set(targets, sampling: SamplingFunction) -> VisibilitySet:
    values = analytic_visibility(targets, sampling.u, sampling.v)
    return VisibilitySet(sampling.u, sampling.v, np.atleast_1d(values), sampling.multiplicity,
                         "analytic")


def correlation_matrix(records: np.ndarray) -> np.ndarray:
    """Time-averaged cross power ``R[..., a, b] = mean_n x_a[n] conj(x_b[n])``.

    ``records`` has shape ``(..., n_samples, n_channels)``. Each unordered
    pair is reduced once and its reverse taken as the exact conjugate, so
    the result is Hermitian bit for bit.
    """
    x = np.asarray(records)
    n = x.shape[-2]
    full = np.matmul(np.swapaxes(x, -1, -2), x.conj()) / n
    upper = np.triu(full, 1)
    diag = np.real(np.diagonal(full, axis1=-2, axis2=-1))
    out = upper + np.conj(np.swapaxes(upper, -1, -2))
    idx = np.arange(x.shape[-1])
    out[..., idx, idx] = diag
    return out


def _membership(sampling: SamplingFunction):
    """``(n_pairs, n_canonical+1)`` averaging matrix onto canonical samples and zero."""
    keep = sampling.canonical_mask()
    keep[sampling.zero_index] = True
    cols = np.flatnonzero(keep)
    col_of = -np.ones(len(sampling), dtype=int)
    col_of[cols] = np.arange(cols.size)
    m = np.zeros((sampling.pair_index.size, cols.size))
    rows = np.flatnonzero(keep[sampling.pair_index])
    m[rows, col_of[sampling.pair_index[rows]]] = 1.0
    m /= sampling.multiplicity[cols][None, :]
    return cols, m


def _visibilities_from_correlation(R: np.ndarray, sampling: SamplingFunction) -> np.ndarray:
    """Average ordered-pair correlations onto the merged samples.

    Canonical-half samples are averaged directly; each twin is set to
    the conjugate of its partner.
    """
    pairs = R[..., sampling.pair_a, sampling.pair_b]
    cols, m = _membership(sampling)
    values = np.zeros(R.shape[:-2] + (len(sampling),), dtype=np.complex128)
    values[..., cols] = pairs @ m
    twin = sampling.twin_index()
    lower = ~sampling.canonical_mask()
    lower[sampling.zero_index] = False
    values[..., lower] = np.conj(values[..., twin[lower]])
    zi = sampling.zero_index
    values[..., zi] = np.real(values[..., zi])
    return values


def _receiver_rows(channel_ids, geometry: ArrayGeometry):
    ids = list(channel_ids)
    missing = [r for r in geometry.receiver_ids if r not in ids]
    if missing:
        raise ValueError(f"no data for receiver channel(s) {missing}")
    return [ids.index(r) for r in geometry.receiver_ids]


def remove_lfm_component(records: np.ndarray, train: SampledWaveform,
                         n_lags: int = 1) -> np.ndarray:
    """Project the strongest delayed copies of the LFM train out of each record.

    For every channel the ``n_lags`` integer lags with the largest
    correlation against ``train`` are fitted by least squares and
    subtracted. Fractional-sample delays leave a small residual.
    """
    x = np.atleast_2d(np.asarray(records, dtype=np.complex128))
    n = x.shape[1]
    if len(train) != n:
        raise ValueError("train length does not match records")
    spec_t = np.conj(sfft.fft(train.samples))
    out = x.copy()
    for i in range(x.shape[0]):
        corr = np.abs(sfft.ifft(sfft.fft(x[i]) * spec_t))
        lags = []
        c = corr.copy()
        for _ in range(n_lags):
            k = int(np.argmax(c))
            lags.append(k)
            c[max(0, k - 2):k + 3] = 0.0
        basis = np.zeros((n, len(lags)), dtype=np.complex128)
        for j, k in enumerate(lags):
            basis[k:, j] = train.samples[:n - k]
        coef, *_ = np.linalg.lstsq(basis, x[i], rcond=None)
        out[i] = x[i] - basis @ coef
    return out


def estimate_visibilities_raw(channels: ChannelData, geometry: ArrayGeometry,
                              remove_lfm: Optional[SampledWaveform] = None,
                              lfm_lags: int = 1) -> VisibilitySet:
    """Cross-correlate whole receiver records into visibilities.

    Parameters
    ----------
    channels : ChannelData
        Must contain a record for every receiver of ``geometry``.
    geometry : ArrayGeometry
    remove_lfm : SampledWaveform, optional
        LFM train to project out of every record first (off by default;
        the noise transmitters already decorrelate the illumination).
    lfm_lags : int
        Number of echo delays removed per channel when ``remove_lfm`` is set.
    """
    sampling = compute_baselines(geometry)
    rows = _receiver_rows(channels.channel_ids, geometry)
    x = channels.samples[rows]
    if remove_lfm is not None:
        x = remove_lfm_component(x, remove_lfm, lfm_lags)
    R = correlation_matrix(x.T)
    values = _visibilities_from_correlation(R, sampling)
    return VisibilitySet(sampling.u, sampling.v, values, sampling.multiplicity,
                         "raw_correlation", x.shape[1])


def per_range_bin_visibilities(cube: RadarDataCube, geometry: ArrayGeometry,
                               bins=None) -> np.ndarray:
    """Slow-time visibilities for many range bins at once.

    Returns an array of shape ``(n_bins, n_samples)`` aligned with
    ``compute_baselines(geometry)``.
    """
    sampling = compute_baselines(geometry)
    rows = _receiver_rows(cube.channel_ids, geometry)
    data = cube.data if bins is None else cube.data[np.atleast_1d(bins)]
    if cube.n_pulses == 1:
        warnings.warn("single pulse: slow-time correlation reduces to one product",
                      stacklevel=2)
    R = correlation_matrix(data[:, :, rows])
    return _visibilities_from_correlation(R, sampling)


def estimate_visibilities_per_range_bin(cube: RadarDataCube, geometry: ArrayGeometry,
                                        bin: int) -> VisibilitySet:
    """Correlate the slow-time samples of one range bin across channels."""
    if not 0 <= bin < cube.n_range_bins:
        raise ValueError(f"range bin {bin} outside [0, {cube.n_range_bins})")
    sampling = compute_baselines(geometry)
    values = per_range_bin_visibilities(cube, geometry, bins=[bin])[0]
    return VisibilitySet(sampling.u, sampling.v, values, sampling.multiplicity,
                         "per_range_bin", cube.n_pulses)


def reconstruct_image(vis: VisibilitySet, alpha, beta=0.0,
                      weighting: str = "natural") -> ImageGrid:
    """Direct-summation image on a direction-cosine grid.

    Normalisation: no scaling is applied, so the peak of a unit point
    source is the total multiplicity and, over one full period of a
    regular lattice, the cell-area weighted image sum equals the
    zero-spacing sample times its multiplicity times the period area
    (``2 * m0 * V(0, 0)`` along ``alpha`` for a half-wavelength line).
    """
    if len(vis) == 0:
        raise ValueError("empty visibility set")
    alpha, beta = _check_grid(alpha, beta)
    w = _weights(vis.multiplicity, weighting) * vis.values
    ea = np.exp(-2j * np.pi * np.outer(alpha, vis.u))
    eb = np.exp(-2j * np.pi * np.outer(beta, vis.v))
    return ImageGrid(alpha, beta, (ea * w) @ eb.T, "alpha", "beta")


def range_azimuth_image(cube: RadarDataCube, geometry: ArrayGeometry, alpha,
                        max_range_m: Optional[float] = None,
                        weighting: str = "natural") -> ImageGrid:
    """Range by azimuth image: one slow-time reconstruction per range bin.

    The azimuth cut is taken at ``beta = 0``, so elevation baselines
    contribute only through their ``u`` component.
    """
    alpha, _ = _check_grid(alpha, 0.0)
    n_bins = cube.n_range_bins
    if max_range_m is not None:
        n_bins = min(n_bins, int(np.floor(max_range_m / cube.range_bin_m)) + 1)
    sampling = compute_baselines(geometry)
    vis = per_range_bin_visibilities(cube, geometry, bins=np.arange(n_bins))
    w = _weights(sampling.multiplicity, weighting)
    ea = np.exp(-2j * np.pi * np.outer(sampling.u, alpha))
    values = (vis * w) @ ea
    return ImageGrid(cube.range_axis()[:n_bins], alpha, values, "range_m", "alpha")
