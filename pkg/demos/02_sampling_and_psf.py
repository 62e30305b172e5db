"""Baseline coverage and point spread function for the two bundled layouts.

Run: python demos/02_sampling_and_psf.py [output_dir]
"""

import sys
from pathlib import Path

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from aim3d import compute_baselines, compute_psf, direction_grid, load_config, resolution_and_fov

out = Path(sys.argv[1] if len(sys.argv) > 1 else "demo_output")
out.mkdir(parents=True, exist_ok=True)

fig, ax = plt.subplots(2, 2, figsize=(10, 9))
for row, name in enumerate(["fig2_linear24", "two_targets_a"]):
    geo = load_config(name).geometry
    s = compute_baselines(geo)
    res = resolution_and_fov(geo)
    beta_width = "n/a" if res.hpbw_beta_rad is None else f"{res.hpbw_beta_rad:.4f}"
    print(f"{name}: {len(s)} distinct baselines, half-power width "
          f"{res.hpbw_alpha_rad:.4f} (alpha) {beta_width} (beta)")
    ax[row, 0].scatter(s.u, s.v, s=4 + 2 * s.multiplicity)
    ax[row, 0].set(xlabel="u (wavelengths)", ylabel="v (wavelengths)", title=f"{name} coverage")
    if s.v.any():
        ax[row, 0].set_aspect("equal")
    grid = direction_grid(201, 0.5)
    beta = grid if s.v.any() else np.array([0.0])
    psf = compute_psf(s, grid, beta).real()
    psf = psf / psf.max()
    if beta.size == 1:
        ax[row, 1].plot(grid, psf[:, 0])
        ax[row, 1].set(xlabel="alpha", ylabel="normalized PSF")
    else:
        ax[row, 1].imshow(psf.T, origin="lower", extent=(-0.5, 0.5, -0.5, 0.5), cmap="viridis")
        ax[row, 1].set(xlabel="alpha", ylabel="beta")
    ax[row, 1].set_title(f"{name} PSF")
fig.tight_layout()
fig.savefig(out / "sampling_and_psf.png", dpi=120)
print("wrote", out / "sampling_and_psf.png")
