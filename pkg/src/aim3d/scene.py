"""
Received-signal synthesis.

Each receiver sees the superposition, over point targets and transmitters,
of the transmitted baseband waveform delayed by the bistatic path
``|tx - target| + |target - rx|``, scaled by the target reflectivity and
an optional spreading loss, and rotated by the carrier phase of the path.
Exact spherical ranges are used; nothing assumes the far field.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Optional

import numpy as np
from scipy import fft as sfft

from .constants import SPEED_OF_LIGHT
from .geometry import ArrayGeometry
from .waveform import SampledWaveform

__all__ = [
    "PointTarget",
    "Scene",
    "ChannelData",
    "apply_delay",
    "synthesize_received",
    "direction_cosines",
]

LOSS_MODELS = ("none", "inverse_square")


@dataclass(frozen=True)
class PointTarget:
    """Isotropic point scatterer; ``z`` is the down-range (boresight) axis."""

    position: tuple
    reflectivity: complex = 1.0

    def __post_init__(self):
        pos = tuple(float(p) for p in self.position)
        if len(pos) != 3 or not np.all(np.isfinite(pos)):
            raise ValueError(f"target position must be 3 finite values, got {self.position}")
        object.__setattr__(self, "position", pos)
        object.__setattr__(self, "reflectivity", complex(self.reflectivity))


@dataclass
class Scene:
    targets: list = field(default_factory=list)
    receiver_noise_power: float = 0.0
    propagation_loss_model: str = "none"
    carrier_phase: bool = True

    def __post_init__(self):
        if self.receiver_noise_power < 0:
            raise ValueError("receiver_noise_power must be >= 0")
        if self.propagation_loss_model not in LOSS_MODELS:
            raise ValueError(f"unknown propagation loss model {self.propagation_loss_model!r}")

    def __add__(self, other: "Scene") -> "Scene":
        return Scene(self.targets + other.targets, self.receiver_noise_power,
                     self.propagation_loss_model, self.carrier_phase)


@dataclass
class ChannelData:
    """Time-aligned receiver channels sharing one sample clock.

    ``samples`` has shape ``(n_channels, n_samples)``; row ``i`` belongs to
    ``channel_ids[i]``. The loopback channel, if any, is one of the rows.
    """

    samples: np.ndarray
    channel_ids: list
    sample_interval_s: float
    loopback_id: Optional[int] = None

    def __post_init__(self):
        self.samples = np.atleast_2d(np.asarray(self.samples, dtype=np.complex128))
        self.channel_ids = [int(c) for c in self.channel_ids]
        if self.samples.shape[0] != len(self.channel_ids):
            raise ValueError("one row of samples is required per channel id")
        if self.loopback_id is not None and self.loopback_id not in self.channel_ids:
            raise ValueError("loopback_id is not among channel_ids")

    @property
    def n_samples(self) -> int:
        return self.samples.shape[1]

    def channel(self, channel_id: int) -> SampledWaveform:
        return SampledWaveform(self.samples[self.channel_ids.index(channel_id)],
                               self.sample_interval_s)

    def scene_ids(self) -> list:
        """Channel ids excluding the loopback."""
        return [c for c in self.channel_ids if c != self.loopback_id]

    def scene_samples(self) -> np.ndarray:
        rows = [i for i, c in enumerate(self.channel_ids) if c != self.loopback_id]
        return self.samples[rows]


def _fractional_shift(spectrum: np.ndarray, freqs: np.ndarray, n: int, shift: float):
    """Shift by ``shift`` samples via a spectral phase ramp, zeroing the wrapped head."""
    out = sfft.ifft(spectrum * np.exp(-2j * np.pi * freqs * shift), n)
    head = int(np.ceil(shift - 1e-9))
    out[:head] = 0.0
    return out


def apply_delay(w: SampledWaveform, delay_s: float) -> SampledWaveform:
    """Delay a waveform by an arbitrary (fractional) number of samples.

    The delay is a linear phase ramp in the frequency domain, so it is
    exact for periodic band-limited signals; samples that wrap around to
    the start of the record are set to zero. Length is preserved.
    """
    if not 0 <= delay_s < w.duration_s:
        raise ValueError(f"delay {delay_s} s outside [0, {w.duration_s}) s")
    n = len(w)
    shift = delay_s / w.sample_interval_s
    if shift == 0:
        return SampledWaveform(w.samples.copy(), w.sample_interval_s, w.start_time_s)
    freqs = sfft.fftfreq(n)
    out = _fractional_shift(sfft.fft(w.samples), freqs, n, shift)
    return SampledWaveform(out, w.sample_interval_s, w.start_time_s)


def direction_cosines(position, origin=(0.0, 0.0, 0.0)):
    """``(alpha, beta, range)`` of a 3-D point seen from ``origin``."""
    d = np.asarray(position, dtype=float) - np.asarray(origin, dtype=float)
    r = float(np.linalg.norm(d))
    return d[0] / r, d[1] / r, r


def _receiver_noise(n: int, power: float, seed: int, channel_id: int) -> np.ndarray:
    rng = np.random.default_rng((int(seed) ^ int(channel_id)) & 0xFFFFFFFFFFFFFFFF)
    parts = rng.standard_normal((2, n))
    return np.sqrt(power / 2.0) * (parts[0] + 1j * parts[1])


def synthesize_received(scene: Scene, geometry: ArrayGeometry,
                        tx_waveforms: Mapping, seed: int = 0,
                        carrier_frequency_hz: Optional[float] = None) -> ChannelData:
    """Simulate every receiver channel (plus the loopback) for a scene.

    Parameters
    ----------
    scene : Scene
        Targets, receiver noise and loss model.
    geometry : ArrayGeometry
        Receivers and transmitters. Each transmitter element must have a
        waveform in ``tx_waveforms``.
    tx_waveforms : mapping
        Keyed by transmitter element id. All waveforms must share length
        and sample interval.
    seed : int
        Receiver noise for channel ``c`` is drawn from ``seed ^ c``.
    carrier_frequency_hz : float, optional
        Carrier used for the path phase; defaults to ``c / wavelength``.

    Returns
    -------
    ChannelData
        One row per receiver in geometry order, followed by the loopback
        row (a clean copy of the LFM transmitter's waveform) if the
        geometry has a loopback element.
    """
    receivers = geometry.receivers
    if not receivers:
        raise ValueError("geometry has no receivers")
    transmitters = [e for e in geometry.elements if e.role in ("noise_tx", "lfm_tx")]
    if not transmitters:
        raise ValueError("geometry has no transmitters")
    missing = [t.id for t in transmitters if t.id not in tx_waveforms]
    if missing:
        raise ValueError(f"no waveform for transmitter(s) {missing}")
    waves = [tx_waveforms[t.id] for t in transmitters]
    dt = waves[0].sample_interval_s
    n = len(waves[0])
    for w in waves[1:]:
        if len(w) != n or not np.isclose(w.sample_interval_s, dt, rtol=1e-9, atol=0.0):
            raise ValueError("transmit waveforms differ in length or sample rate")

    fc = SPEED_OF_LIGHT / geometry.wavelength_m if carrier_frequency_hz is None \
        else carrier_frequency_hz
    freqs = sfft.fftfreq(n)
    spectra = [sfft.fft(w.samples) for w in waves]

    tx_pos = np.array([geometry.position3d(t) for t in transmitters])
    rx_pos = np.array([geometry.position3d(r) for r in receivers])
    tgt_pos = np.array([t.position for t in scene.targets], dtype=float).reshape(-1, 3)
    refl = np.array([t.reflectivity for t in scene.targets], dtype=complex)
    # d_tx[k, t], d_rx[t, r]
    d_tx = np.linalg.norm(tx_pos[:, None, :] - tgt_pos[None, :, :], axis=-1)
    d_rx = np.linalg.norm(tgt_pos[:, None, :] - rx_pos[None, :, :], axis=-1)

    ids = [r.id for r in receivers]
    out = np.zeros((len(receivers), n), dtype=np.complex128)
    for ri in range(len(receivers)):
        acc = out[ri]
        for ti in range(len(scene.targets)):
            for ki in range(len(transmitters)):
                path = d_tx[ki, ti] + d_rx[ti, ri]
                tau = path / SPEED_OF_LIGHT
                shift = tau / dt
                if shift >= n:
                    continue
                gain = refl[ti]
                if scene.propagation_loss_model == "inverse_square":
                    gain = gain / (d_tx[ki, ti] * d_rx[ti, ri])
                if scene.carrier_phase:
                    gain = gain * np.exp(-2j * np.pi * fc * tau)
                acc += gain * _fractional_shift(spectra[ki], freqs, n, shift)
        if scene.receiver_noise_power > 0:
            acc += _receiver_noise(n, scene.receiver_noise_power, seed, ids[ri])

    loopback = geometry.loopback
    if loopback is not None:
        lfm = [t for t in transmitters if t.role == "lfm_tx"]
        if not lfm:
            raise ValueError("loopback channel requires an LFM transmitter")
        ref = tx_waveforms[lfm[0].id].samples
        out = np.vstack([out, ref[None, :]])
        ids.append(loopback.id)
    return ChannelData(out, ids, dt, loopback.id if loopback is not None else None)
