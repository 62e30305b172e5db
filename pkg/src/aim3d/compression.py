"""
Fast-time pulse compression and the radar data cube.

The matched filter is the same-size correlation

    C[k] = sum_n s[n] * conj(h[n - k]),   k = 0 .. len(s) - 1,

so an echo arriving ``tau`` seconds after the record start peaks at lag
``k = tau / dt``. The compressed record of each channel is then cut into
pulse repetition intervals to form a ``(range, pulse, channel)`` cube.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Mapping, Optional

import numpy as np
from scipy import fft as sfft
from scipy import signal as ssig

from .constants import SPEED_OF_LIGHT
from .scene import ChannelData
from .waveform import LfmSpec, SampledWaveform

log = logging.getLogger(__name__)

__all__ = [
    "MatchedFilterOutput",
    "RadarDataCube",
    "matched_filter",
    "compress_channels",
    "build_data_cube",
    "reference_from_loopback",
    "mainlobe_width",
    "peak_sidelobe_level_db",
]


@dataclass
class MatchedFilterOutput:
    values: np.ndarray
    lag_interval_s: float

    def __len__(self):
        return self.values.size

    def peak_lag(self) -> int:
        return int(np.argmax(np.abs(self.values)))


@dataclass
class RadarDataCube:
    """Complex samples indexed ``[range_bin, pulse, channel]``."""

    data: np.ndarray
    range_bin_m: float
    pulse_interval_s: float
    channel_ids: list = field(default_factory=list)

    def __post_init__(self):
        self.data = np.asarray(self.data)
        if self.data.ndim != 3:
            raise ValueError(f"cube data must be 3-D, got shape {self.data.shape}")
        if not self.channel_ids:
            self.channel_ids = list(range(self.data.shape[2]))
        if len(self.channel_ids) != self.data.shape[2]:
            raise ValueError("channel_ids length does not match channel axis")

    @property
    def shape(self):
        return self.data.shape

    @property
    def n_range_bins(self) -> int:
        return self.data.shape[0]

    @property
    def n_pulses(self) -> int:
        return self.data.shape[1]

    @property
    def n_channels(self) -> int:
        return self.data.shape[2]

    def range_axis(self) -> np.ndarray:
        return np.arange(self.n_range_bins) * self.range_bin_m

    def channel_records(self) -> np.ndarray:
        """``(n_channels, n_pulses * n_range_bins)`` fast-time records."""
        return np.transpose(self.data, (2, 1, 0)).reshape(self.n_channels, -1)

    def to_channels(self, loopback_id: Optional[int] = None) -> ChannelData:
        dt = 2.0 * self.range_bin_m / SPEED_OF_LIGHT
        return ChannelData(self.channel_records(), list(self.channel_ids), dt, loopback_id)

    @classmethod
    def from_records(cls, records: np.ndarray, samples_per_pri: int, pulse_count: int,
                     sample_interval_s: float, channel_ids, truncate: bool = False):
        records = np.atleast_2d(records)
        need = samples_per_pri * pulse_count
        length = records.shape[1]
        if length != need:
            if truncate and length > need:
                records = records[:, :need]
            else:
                raise ValueError(
                    f"record length {length} != pulse_count * samples_per_pri = {need}"
                    + ("" if truncate else " (pass truncate=True to drop the tail)"))
        data = records.reshape(len(channel_ids), pulse_count, samples_per_pri)
        return cls(np.ascontiguousarray(np.transpose(data, (2, 1, 0))),
                   SPEED_OF_LIGHT * sample_interval_s / 2.0,
                   samples_per_pri * sample_interval_s, list(channel_ids))


def _check_pair(signal: SampledWaveform, reference: SampledWaveform):
    if len(signal) == 0 or len(reference) == 0:
        raise ValueError("empty input")
    if not np.isclose(signal.sample_interval_s, reference.sample_interval_s, rtol=1e-9, atol=0.0):
        raise ValueError("signal and reference sample intervals differ")
    if len(reference) > len(signal):
        raise ValueError("reference longer than signal")


def _correlate_fft(s: np.ndarray, h: np.ndarray) -> np.ndarray:
    n = s.size
    nfft = sfft.next_fast_len(n + h.size - 1)
    spec = sfft.fft(s, nfft) * np.conj(sfft.fft(h, nfft))
    return sfft.ifft(spec)[:n]


def _correlate_direct(s: np.ndarray, h: np.ndarray) -> np.ndarray:
    n, m = s.size, h.size
    padded = np.concatenate([s, np.zeros(m, dtype=s.dtype)])
    out = np.zeros(n, dtype=np.complex128)
    hc = np.conj(h)
    for j in range(m):
        out += hc[j] * padded[j:j + n]
    return out


def matched_filter(signal: SampledWaveform, reference: SampledWaveform,
                   method: str = "fft") -> MatchedFilterOutput:
    """Correlate ``signal`` against ``reference`` for lags ``0 .. len(signal)-1``.

    ``method="direct"`` sums tap by tap; ``"fft"`` uses zero-padded
    transforms. Both compute the same linear (non-circular) correlation.
    """
    _check_pair(signal, reference)
    if method == "fft":
        values = _correlate_fft(signal.samples, reference.samples)
    elif method == "direct":
        values = _correlate_direct(signal.samples, reference.samples)
    else:
        raise ValueError(f"unknown method {method!r}")
    return MatchedFilterOutput(values, signal.sample_interval_s)


def reference_from_loopback(channels: ChannelData, pulse_samples: int) -> SampledWaveform:
    """First pulse of the loopback capture, scaled to unit energy."""
    if channels.loopback_id is None:
        raise ValueError("channel data has no loopback channel")
    first = channels.channel(channels.loopback_id).samples[:pulse_samples]
    return _unit_energy(first, channels.sample_interval_s)


def _unit_energy(x: np.ndarray, dt: float) -> SampledWaveform:
    energy = float(np.vdot(x, x).real)
    if energy == 0:
        raise ValueError("reference waveform has zero energy")
    return SampledWaveform(x / np.sqrt(energy), dt)


def compress_channels(channels: ChannelData, reference: SampledWaveform,
                      use_loopback: bool = True, taper: Optional[str] = None,
                      method: str = "fft") -> dict:
    """Matched-filter every scene channel.

    Parameters
    ----------
    channels : ChannelData
        Receiver records; the loopback row is never compressed or imaged.
    reference : SampledWaveform
        The ideal transmitted pulse. If ``use_loopback`` is set and a
        loopback channel exists, its first ``len(reference)`` samples are
        used instead.
    taper : {None, "hamming"}
        Optional amplitude window on the reference for lower range
        sidelobes (at the cost of a wider mainlobe).

    Returns
    -------
    dict
        Channel id to :class:`MatchedFilterOutput`, in channel order.
    """
    if use_loopback and channels.loopback_id is not None:
        ref = reference_from_loopback(channels, len(reference))
        log.debug("using loopback channel %d as matched-filter reference", channels.loopback_id)
    else:
        ref = _unit_energy(reference.samples, reference.sample_interval_s)
    if taper == "hamming":
        ref = _unit_energy(ref.samples * np.hamming(len(ref)), ref.sample_interval_s)
    elif taper not in (None, "none"):
        raise ValueError(f"unknown taper {taper!r}")
    out = {}
    for cid in channels.scene_ids():
        out[cid] = matched_filter(channels.channel(cid), ref, method=method)
    return out


def build_data_cube(compressed: Mapping, spec: LfmSpec, truncate: bool = False) -> RadarDataCube:
    """Stack compressed channels into a ``(range, pulse, channel)`` cube.

    Range bin ``k`` is at ``c * k * dt / 2``.
    """
    if not compressed:
        raise ValueError("no compressed channels")
    ids = list(compressed)
    dts = {compressed[c].lag_interval_s for c in ids}
    if len(dts) != 1:
        raise ValueError("compressed channels have different lag intervals")
    lengths = {len(compressed[c]) for c in ids}
    if len(lengths) != 1:
        raise ValueError("compressed channels have different lengths")
    records = np.stack([compressed[c].values for c in ids])
    return RadarDataCube.from_records(records, spec.pri_samples, spec.pulse_count,
                                      spec.sample_interval_s, ids, truncate=truncate)


def mainlobe_width(values: np.ndarray, interval: float, level_db: float = -3.0,
                   upsample: int = 16) -> float:
    """Width of the main lobe of ``|values|**2`` at ``level_db`` below its peak.

    The sequence is band-limited interpolated by ``upsample`` first so
    widths narrower than one sample can be measured.
    """
    x = np.asarray(values)
    fine = ssig.resample(x, x.size * upsample)
    p = np.abs(fine) ** 2
    k = int(np.argmax(p))
    thresh = p[k] * 10 ** (level_db / 10)
    step = interval / upsample

    def crossing(direction):
        i = k
        while 0 <= i + direction < p.size and p[i + direction] >= thresh:
            i += direction
        j = i + direction
        if not 0 <= j < p.size:
            return i * step
        # linear interpolation between i (above) and j (below)
        frac = (p[i] - thresh) / (p[i] - p[j])
        return (i + direction * frac) * step

    return crossing(+1) - crossing(-1)


def peak_sidelobe_level_db(values: np.ndarray, upsample: int = 1) -> float:
    """Highest sidelobe relative to the peak of ``|values|``, in dB.

    The main lobe extends from the peak to the first local minimum on
    each side. A chirp sampled at exactly its bandwidth has its integer
    lags on the nulls of the compressed response, so pass ``upsample > 1``
    to measure the band-limited interpolated sidelobes instead.
    """
    x = np.asarray(values)
    if upsample > 1:
        x = ssig.resample(x, x.size * upsample)
    mag = np.abs(x)
    k = int(np.argmax(mag))
    lo = k
    while lo > 0 and mag[lo - 1] < mag[lo]:
        lo -= 1
    hi = k
    while hi < mag.size - 1 and mag[hi + 1] < mag[hi]:
        hi += 1
    side = np.concatenate([mag[:lo], mag[hi + 1:]])
    if side.size == 0:
        raise ValueError("no sidelobes outside the main lobe")
    return float(20 * np.log10(side.max() / mag[k]))
