"""
Array layout, sampling function and point spread function.

Every ordered pair of receivers ``(i, j)`` measures one spatial frequency
sample ``u = (x_i - x_j) / lambda``, ``v = (y_i - y_j) / lambda``.
Identical baselines are merged into one sample that remembers how many
pairs fed it (its multiplicity); self pairs collapse onto the zero-spacing
sample ``(0, 0)`` with multiplicity equal to the receiver count.
"""

from __future__ import annotations

import logging
import warnings
from dataclasses import dataclass, field
from typing import Iterable, Optional

import numpy as np

from .constants import SPEED_OF_LIGHT
from .images import ImageGrid

log = logging.getLogger(__name__)

__all__ = [
    "ROLES",
    "Element",
    "ArrayGeometry",
    "SamplingFunction",
    "ResolutionReport",
    "compute_baselines",
    "compute_psf",
    "resolution_and_fov",
    "direction_grid",
    "uniform_linear_array",
    "random_lattice_array",
]

ROLES = ("receiver", "noise_tx", "lfm_tx", "loopback")

# baselines closer than this (in wavelengths) are treated as identical
_MERGE_RESOLUTION = 1e-6


@dataclass(frozen=True)
class Element:
    id: int
    x_m: float
    y_m: float
    role: str = "receiver"

    def __post_init__(self):
        if self.role not in ROLES:
            raise ValueError(f"unknown element role {self.role!r}; expected one of {ROLES}")
        if not (np.isfinite(self.x_m) and np.isfinite(self.y_m)):
            raise ValueError(f"element {self.id} has a non-finite position")


@dataclass
class ArrayGeometry:
    """Element positions (in the array plane ``z = 0``) and roles."""

    elements: list
    wavelength_m: float

    def __post_init__(self):
        self.elements = [e if isinstance(e, Element) else Element(**e) for e in self.elements]
        if self.wavelength_m <= 0:
            raise ValueError("wavelength_m must be positive")
        ids = [e.id for e in self.elements]
        if len(set(ids)) != len(ids):
            raise ValueError("element ids must be unique")

    def by_role(self, role: str) -> list:
        return [e for e in self.elements if e.role == role]

    @property
    def receivers(self) -> list:
        return self.by_role("receiver")

    @property
    def receiver_ids(self) -> list:
        return [e.id for e in self.receivers]

    @property
    def loopback(self) -> Optional[Element]:
        lb = self.by_role("loopback")
        return lb[0] if lb else None

    def receiver_positions(self) -> np.ndarray:
        """``(n_receivers, 2)`` array of receiver ``(x, y)`` in metres."""
        return np.array([[e.x_m, e.y_m] for e in self.receivers], dtype=float).reshape(-1, 2)

    def position3d(self, element: Element) -> np.ndarray:
        return np.array([element.x_m, element.y_m, 0.0])

    def centroid(self) -> np.ndarray:
        """Receiver centroid as a 3-vector."""
        xy = self.receiver_positions()
        return np.array([*xy.mean(axis=0), 0.0])

    def validate(self) -> list:
        """Check the layout, warning (not raising) on degenerate illumination.

        Returns the list of warning messages that were emitted.
        """
        if len(self.receivers) < 2:
            raise ValueError("geometry needs at least 2 receivers to form a baseline")
        messages = []
        n_noise = len(self.by_role("noise_tx"))
        n_lfm = len(self.by_role("lfm_tx"))
        if n_noise < 3:
            messages.append(
                f"only {n_noise} noise transmitters; incoherent 2-D illumination needs at least 3")
        if n_lfm != 1:
            messages.append(f"expected exactly 1 LFM transmitter, found {n_lfm}")
        for msg in messages:
            warnings.warn(msg, stacklevel=2)
        return messages

    def to_dict(self) -> dict:
        return {
            "wavelength_m": self.wavelength_m,
            "elements": [
                {"id": e.id, "x_m": e.x_m, "y_m": e.y_m, "role": e.role} for e in self.elements
            ],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ArrayGeometry":
        return cls([Element(**e) for e in d["elements"]], float(d["wavelength_m"]))


@dataclass
class SamplingFunction:
    """Merged spatial frequency samples of an array.

    Attributes
    ----------
    u, v : ndarray
        Sample coordinates in wavelengths, lexicographically sorted.
    multiplicity : ndarray of int
        Number of ordered receiver pairs (self pairs included at the
        origin) falling on each sample.
    pair_a, pair_b : ndarray of int
        Receiver indices of every ordered pair, self pairs included.
    pair_index : ndarray of int
        Sample each ordered pair maps to.
    """

    u: np.ndarray
    v: np.ndarray
    multiplicity: np.ndarray
    pair_a: np.ndarray = field(repr=False)
    pair_b: np.ndarray = field(repr=False)
    pair_index: np.ndarray = field(repr=False)

    def __len__(self):
        return self.u.size

    @property
    def total_multiplicity(self) -> int:
        return int(self.multiplicity.sum())

    @property
    def zero_index(self) -> int:
        hits = np.flatnonzero((self.u == 0) & (self.v == 0))
        if hits.size == 0:
            raise ValueError("sampling function has no zero-spacing sample")
        return int(hits[0])

    def twin_index(self) -> np.ndarray:
        """Index of the ``(-u, -v)`` partner of every sample."""
        keys = _keys(self.u, self.v)
        lookup = {tuple(k): i for i, k in enumerate(keys)}
        return np.array([lookup[(-k[0], -k[1])] for k in keys], dtype=int)

    def canonical_mask(self) -> np.ndarray:
        """True for samples in the half plane ``u > 0`` or ``u == 0, v > 0``."""
        ku, kv = _keys(self.u, self.v).T
        return (ku > 0) | ((ku == 0) & (kv > 0))


@dataclass(frozen=True)
class ResolutionReport:
    """Angular resolution and field of view in direction-cosine units.

    An axis along which the receivers have no extent is reported as None.
    """

    hpbw_alpha_rad: Optional[float]
    hpbw_beta_rad: Optional[float]
    fov_half_alpha: Optional[float]
    fov_half_beta: Optional[float]

    def to_dict(self) -> dict:
        return {
            "hpbw_alpha_rad": self.hpbw_alpha_rad,
            "hpbw_beta_rad": self.hpbw_beta_rad,
            "fov_half_alpha": self.fov_half_alpha,
            "fov_half_beta": self.fov_half_beta,
        }


def _keys(u, v) -> np.ndarray:
    return np.stack([np.round(np.asarray(u) / _MERGE_RESOLUTION),
                     np.round(np.asarray(v) / _MERGE_RESOLUTION)], axis=-1).astype(np.int64)


def ordered_pairs(n: int):
    """All ordered index pairs ``(a, b)`` of ``n`` receivers, self pairs first."""
    a, b = np.meshgrid(np.arange(n), np.arange(n), indexing="ij")
    a, b = a.ravel(), b.ravel()
    self_first = np.argsort(a != b, kind="stable")
    return a[self_first], b[self_first]


def compute_baselines(geometry: ArrayGeometry) -> SamplingFunction:
    """Enumerate receiver pairs into a merged sampling function.

    Raises
    ------
    ValueError
        If fewer than two receivers are present.
    """
    xy = geometry.receiver_positions()
    n = xy.shape[0]
    if n < 2:
        raise ValueError(f"need at least 2 receivers for a baseline, got {n}")
    a, b = ordered_pairs(n)
    u = (xy[a, 0] - xy[b, 0]) / geometry.wavelength_m
    v = (xy[a, 1] - xy[b, 1]) / geometry.wavelength_m
    keys = _keys(u, v)
    uniq, first, inverse, counts = np.unique(
        keys, axis=0, return_index=True, return_inverse=True, return_counts=True)
    inverse = inverse.ravel()
    su, sv = u[first], v[first]
    sampling = SamplingFunction(su, sv, counts.astype(np.int64), a, b, inverse)
    # twins take the exact negation of their canonical partner
    lower = ~sampling.canonical_mask()
    twin = sampling.twin_index()
    su[lower] = -su[twin[lower]]
    sv[lower] = -sv[twin[lower]]
    zero = np.all(uniq == 0, axis=1)
    su[zero] = 0.0
    sv[zero] = 0.0
    return sampling


def _phasor_factors(u, v, alpha, beta):
    ea = np.exp(-2j * np.pi * np.outer(alpha, u))
    eb = np.exp(-2j * np.pi * np.outer(beta, v))
    return ea, eb


def _check_grid(alpha, beta):
    alpha = np.atleast_1d(np.asarray(alpha, dtype=float))
    beta = np.atleast_1d(np.asarray(beta, dtype=float))
    if np.any(np.abs(alpha) > 1 + 1e-12) or np.any(np.abs(beta) > 1 + 1e-12):
        raise ValueError("direction-cosine grid must lie within [-1, 1]")
    return alpha, beta


def compute_psf(sampling: SamplingFunction, alpha, beta=0.0, weighting: str = "natural"):
    """Point spread function on a direction-cosine grid.

    ``PSF(alpha, beta) = sum_n w_n exp(-j 2 pi (u_n alpha + v_n beta))``
    where ``w_n`` is the multiplicity (``weighting="natural"``) or 1
    (``"uniform"``). The natural PSF of a filled line array is the
    squared array factor, a sinc-squared response.

    Returns
    -------
    ImageGrid
        Complex PSF with ``axis1 = alpha`` and ``axis2 = beta``.
    """
    if len(sampling) == 0:
        raise ValueError("empty sampling function")
    alpha, beta = _check_grid(alpha, beta)
    w = _weights(sampling.multiplicity, weighting)
    ea, eb = _phasor_factors(sampling.u, sampling.v, alpha, beta)
    values = (ea * w) @ eb.T
    return ImageGrid(alpha, beta, values, axis1_name="alpha", axis2_name="beta")


def _weights(multiplicity, weighting):
    if weighting == "natural":
        return np.asarray(multiplicity, dtype=float)
    if weighting == "uniform":
        return np.ones(len(multiplicity))
    raise ValueError(f"unknown weighting {weighting!r}")


def _axis_extent(coords: np.ndarray, tol: float):
    diffs = np.abs(coords[:, None] - coords[None, :])
    nonzero = diffs[diffs > tol]
    if nonzero.size == 0:
        return None, None
    return float(diffs.max()), float(nonzero.min())


def resolution_and_fov(geometry: ArrayGeometry) -> ResolutionReport:
    """Half-power beamwidth ``0.88 lambda / D`` and FOV half-width ``lambda / 2d``.

    ``D`` is the largest receiver separation along the axis and ``d`` the
    smallest nonzero one. Only receivers count: transmitters set the
    illumination, not the imaging baselines. The FOV is clamped to 1.
    """
    xy = geometry.receiver_positions()
    lam = geometry.wavelength_m
    tol = lam * _MERGE_RESOLUTION
    out = []
    for axis in (0, 1):
        D, d = _axis_extent(xy[:, axis], tol) if len(xy) >= 2 else (None, None)
        if D is None:
            out.append((None, None))
        else:
            out.append((0.88 * lam / D, min(1.0, lam / (2.0 * d))))
    if out[0][0] is None and out[1][0] is None:
        raise ValueError("receivers have no extent along either axis")
    return ResolutionReport(out[0][0], out[1][0], out[0][1], out[1][1])


def direction_grid(n: int, half_width: float = 1.0, endpoint: bool = True) -> np.ndarray:
    """``n`` equally spaced direction cosines over ``[-half_width, half_width]``."""
    if not 0 < half_width <= 1:
        raise ValueError("half_width must be in (0, 1]")
    return np.linspace(-half_width, half_width, n, endpoint=endpoint)


def uniform_linear_array(n: int, spacing_m: float, wavelength_m: float,
                         transmitters: Iterable = (), loopback: bool = False,
                         center: bool = True) -> ArrayGeometry:
    """Receivers on the x axis with constant spacing.

    ``transmitters`` is an iterable of ``(x_m, y_m, role)`` tuples appended
    after the receivers.
    """
    x = np.arange(n) * spacing_m
    if center:
        x = x - x.mean()
    elements = [Element(i, float(xi), 0.0, "receiver") for i, xi in enumerate(x)]
    next_id = n
    for tx, ty, role in transmitters:
        elements.append(Element(next_id, float(tx), float(ty), role))
        next_id += 1
    if loopback:
        elements.append(Element(next_id, 0.0, 0.0, "loopback"))
    return ArrayGeometry(elements, wavelength_m)


def random_lattice_array(n: int, pitch_m: float, lattice_shape, wavelength_m: float,
                         seed: int, transmitters: Iterable = (),
                         loopback: bool = False) -> ArrayGeometry:
    """Receivers at ``n`` distinct random sites of a rectangular lattice.

    Snapping to a lattice keeps the smallest spacing (and so the FOV)
    well defined while the random choice thins out redundant baselines.
    """
    nx, ny = lattice_shape
    if n > nx * ny:
        raise ValueError("more receivers than lattice sites")
    rng = np.random.default_rng(seed)
    sites = np.sort(rng.choice(nx * ny, size=n, replace=False))
    ix, iy = np.divmod(sites, ny)
    x = (ix - (nx - 1) / 2.0) * pitch_m
    y = (iy - (ny - 1) / 2.0) * pitch_m
    elements = [Element(i, float(x[i]), float(y[i]), "receiver") for i in range(n)]
    next_id = n
    for tx, ty, role in transmitters:
        elements.append(Element(next_id, float(tx), float(ty), role))
        next_id += 1
    if loopback:
        elements.append(Element(next_id, 0.0, 0.0, "loopback"))
    return ArrayGeometry(elements, wavelength_m)


def wavelength_for(carrier_frequency_hz: float) -> float:
    return SPEED_OF_LIGHT / carrier_frequency_hz
