"""Chirp, matched filter output and the range response of a single echo.

Run: python demos/01_chirp_and_compression.py [output_dir]
"""

import sys
from pathlib import Path

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from aim3d import LfmSpec, SampledWaveform, generate_lfm, matched_filter
from aim3d.compression import mainlobe_width, peak_sidelobe_level_db
from aim3d.constants import SPEED_OF_LIGHT

out = Path(sys.argv[1] if len(sys.argv) > 1 else "demo_output")
out.mkdir(parents=True, exist_ok=True)

spec = LfmSpec()
pulse = generate_lfm(spec)
t_us = np.arange(pulse.samples.size) * spec.sample_interval_s * 1e6
inst_freq = np.gradient(np.unwrap(np.angle(pulse.samples)), spec.sample_interval_s) / (2 * np.pi)

# one echo at 1500 samples into a 4000-sample window, no noise
record = np.zeros(4000, complex)
record[1500:2500] = pulse.samples
compressed = matched_filter(SampledWaveform(record, spec.sample_interval_s), pulse).values
range_m = (np.arange(record.size) - 1500) * spec.sample_interval_s * SPEED_OF_LIGHT / 2
db = 20 * np.log10(np.abs(compressed) / np.abs(compressed).max() + 1e-12)

width = SPEED_OF_LIGHT * mainlobe_width(compressed, spec.sample_interval_s) / 2
psl = peak_sidelobe_level_db(compressed, upsample=8)
print(f"time-bandwidth product {spec.time_bandwidth_product:.0f}")
print(f"-3 dB range width {width:.3f} m, peak sidelobe {psl:.2f} dB")

fig, ax = plt.subplots(3, 1, figsize=(7, 9))
ax[0].plot(t_us, pulse.samples.real, lw=0.5)
ax[0].set(xlabel="time (us)", ylabel="real part", title="baseband chirp")
ax[1].plot(t_us, inst_freq / 1e6)
ax[1].set(xlabel="time (us)", ylabel="instantaneous frequency (MHz)")
ax[2].plot(range_m, db)
ax[2].set(xlim=(-15, 15), ylim=(-60, 3), xlabel="range offset (m)", ylabel="dB",
          title=f"compressed echo: width {width:.2f} m, PSL {psl:.1f} dB")
fig.tight_layout()
fig.savefig(out / "chirp_and_compression.png", dpi=120)
print("wrote", out / "chirp_and_compression.png")
