"""
Transmit waveforms.

Two kinds of complex baseband signal illuminate the scene:

- a pulsed linear frequency modulated (LFM) chirp, repeated at a fixed
  pulse repetition interval, which carries the down-range information;
- seeded white complex Gaussian noise, one stream per noise transmitter,
  which makes the illumination spatially and temporally incoherent.

The chirp is generated centred at baseband, sweeping from ``-B/2`` to
``+B/2``; the carrier is applied as a phase term by the scene model.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .constants import SPEED_OF_LIGHT

__all__ = [
    "LfmSpec",
    "NoiseSpec",
    "SampledWaveform",
    "generate_lfm",
    "build_pulse_train",
    "generate_noise",
    "lfm_train",
]


@dataclass(frozen=True)
class LfmSpec:
    """Parameters of the LFM pulse train.

    Defaults reproduce the 38 GHz, 100 MHz, 10 us chirp repeated ten
    times every 50 us and sampled every 10 ns.
    """

    carrier_frequency_hz: float = 38e9
    bandwidth_hz: float = 100e6
    pulse_width_s: float = 10e-6
    sample_interval_s: float = 10e-9
    pri_s: float = 50e-6
    pulse_count: int = 10
    total_duration_s: float = 500e-6

    def __post_init__(self):
        if self.bandwidth_hz <= 0:
            raise ValueError(f"bandwidth_hz must be positive, got {self.bandwidth_hz}")
        if self.pulse_width_s <= 0:
            raise ValueError(f"pulse_width_s must be positive, got {self.pulse_width_s}")
        if self.sample_interval_s <= 0:
            raise ValueError(
                f"sample_interval_s must be positive, got {self.sample_interval_s}")
        if self.carrier_frequency_hz <= 0:
            raise ValueError("carrier_frequency_hz must be positive")
        if self.pulse_count < 1:
            raise ValueError(f"pulse_count must be >= 1, got {self.pulse_count}")
        # complex sampling: fs >= B
        if self.sample_interval_s * self.bandwidth_hz > 1.0 + 1e-9:
            raise ValueError(
                "sample_interval_s violates complex Nyquist sampling "
                f"({self.sample_interval_s} s > 1/{self.bandwidth_hz} Hz)")
        if self.pulse_width_s > self.pri_s * (1 + 1e-12):
            raise ValueError("pulse_width_s exceeds pri_s")
        if self.pulse_count * self.pri_s > self.total_duration_s + self.sample_interval_s:
            raise ValueError("pulse_count * pri_s exceeds total_duration_s")

    @property
    def wavelength_m(self) -> float:
        return SPEED_OF_LIGHT / self.carrier_frequency_hz

    @property
    def pulse_samples(self) -> int:
        return int(round(self.pulse_width_s / self.sample_interval_s))

    @property
    def pri_samples(self) -> int:
        return int(round(self.pri_s / self.sample_interval_s))

    @property
    def total_samples(self) -> int:
        return int(round(self.total_duration_s / self.sample_interval_s))

    @property
    def time_bandwidth_product(self) -> float:
        return self.pulse_width_s * self.bandwidth_hz


@dataclass(frozen=True)
class NoiseSpec:
    """One white complex Gaussian noise stream.

    ``power`` is the variance of the complex samples (linear units).
    """

    power: float = 1.0
    sample_interval_s: float = 10e-9
    duration_s: float = 500e-6
    seed: int = 0

    def __post_init__(self):
        if self.power <= 0:
            raise ValueError(f"noise power must be positive, got {self.power}")
        if self.sample_interval_s <= 0 or self.duration_s <= 0:
            raise ValueError("sample_interval_s and duration_s must be positive")
        if not 0 <= int(self.seed) < 2**64:
            raise ValueError("seed must fit in an unsigned 64-bit integer")

    @property
    def n_samples(self) -> int:
        return int(round(self.duration_s / self.sample_interval_s))


@dataclass
class SampledWaveform:
    """Uniformly sampled complex baseband signal."""

    samples: np.ndarray
    sample_interval_s: float
    start_time_s: float = 0.0

    def __post_init__(self):
        self.samples = np.asarray(self.samples, dtype=np.complex128)
        if self.samples.ndim != 1 or self.samples.size == 0:
            raise ValueError("waveform samples must be a non-empty 1-D array")
        if not np.all(np.isfinite(self.samples)):
            raise ValueError("waveform contains non-finite samples")
        if self.sample_interval_s <= 0:
            raise ValueError("sample_interval_s must be positive")

    def __len__(self):
        return self.samples.size

    @property
    def duration_s(self) -> float:
        return self.samples.size * self.sample_interval_s

    @property
    def energy(self) -> float:
        return float(np.vdot(self.samples, self.samples).real)

    def times(self) -> np.ndarray:
        return self.start_time_s + self.sample_interval_s * np.arange(self.samples.size)


def generate_lfm(spec: LfmSpec) -> SampledWaveform:
    """Generate a single unit-amplitude chirp pulse at baseband.

    The phase is ``2*pi*(-B/2 * t + B/(2T) * t**2)`` for ``t`` in
    ``[0, T)``, so the instantaneous frequency ``-B/2 + (B/T) t`` sweeps
    from ``-B/2`` up to ``+B/2`` and crosses zero at ``t = T/2``.

    Parameters
    ----------
    spec : LfmSpec
        Chirp parameters. The carrier frequency is not applied here.

    Returns
    -------
    SampledWaveform
        ``round(T / sample_interval)`` samples starting at ``t = 0``.
    """
    n = spec.pulse_samples
    if n < 1:
        raise ValueError("pulse shorter than one sample")
    B, T = spec.bandwidth_hz, spec.pulse_width_s
    t = np.arange(n) * spec.sample_interval_s
    phase = 2.0 * np.pi * (-0.5 * B * t + 0.5 * (B / T) * t**2)
    return SampledWaveform(np.exp(1j * phase), spec.sample_interval_s)


def build_pulse_train(pulse: SampledWaveform, spec: LfmSpec) -> SampledWaveform:
    """Repeat ``pulse`` every PRI, zero-filling between pulses.

    The result has ``round(total_duration / sample_interval)`` samples
    with pulse ``p`` starting at sample ``p * pri_samples``.
    """
    if not np.isclose(pulse.sample_interval_s, spec.sample_interval_s, rtol=1e-9, atol=0.0):
        raise ValueError("pulse sample interval does not match spec")
    pri = spec.pri_samples
    if len(pulse) > pri:
        raise ValueError(f"pulse length {len(pulse)} exceeds PRI of {pri} samples")
    total = spec.total_samples
    train = np.zeros(total, dtype=np.complex128)
    for p in range(spec.pulse_count):
        start = p * pri
        stop = min(start + len(pulse), total)
        train[start:stop] = pulse.samples[: stop - start]
    return SampledWaveform(train, spec.sample_interval_s, pulse.start_time_s)


def lfm_train(spec: LfmSpec) -> SampledWaveform:
    """Shorthand for ``build_pulse_train(generate_lfm(spec), spec)``."""
    return build_pulse_train(generate_lfm(spec), spec)


def generate_noise(spec: NoiseSpec) -> SampledWaveform:
    """Draw i.i.d. circularly-symmetric complex Gaussian samples.

    Each call owns its generator, seeded only from ``spec.seed``, so the
    output is a pure function of the ``NoiseSpec``.
    """
    rng = np.random.default_rng(int(spec.seed))
    n = spec.n_samples
    parts = rng.standard_normal((2, n))
    samples = np.sqrt(spec.power / 2.0) * (parts[0] + 1j * parts[1])
    return SampledWaveform(samples, spec.sample_interval_s)
