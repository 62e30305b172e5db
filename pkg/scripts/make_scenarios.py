"""Regenerate the bundled scenario JSON files in src/aim3d/scenarios/.

Run from the repository root:

    python scripts/make_scenarios.py
"""

import json
from pathlib import Path

import numpy as np

from aim3d.geometry import random_lattice_array, uniform_linear_array
from aim3d.waveform import LfmSpec

OUT = Path(__file__).resolve().parents[1] / "src" / "aim3d" / "scenarios"
LAM = LfmSpec().wavelength_m

# sphere reflectivities as sqrt(RCS): -11.5 dBsm (30 cm) and -15.94 dBsm (18 cm)
BIG_SPHERE = float(np.sqrt(10 ** (-11.5 / 10)))
SMALL_SPHERE = float(np.sqrt(10 ** (-15.94 / 10)))


def polar(range_m, azimuth_deg, y_m=0.0):
    th = np.radians(azimuth_deg)
    return [round(range_m * np.sin(th), 6), y_m, round(range_m * np.cos(th), 6)]


def linear24():
    tx = [(-0.30, 0.10, "noise_tx"), (0.30, 0.10, "noise_tx"), (0.0, -0.25, "noise_tx"),
          (0.0, 0.05, "lfm_tx")]
    return uniform_linear_array(24, LAM / 2, LAM, tx, loopback=True).to_dict()


def random23():
    # receivers on a 10 x 10 lattice of 2-wavelength pitch; transmitters at the corners
    tx = [(-0.15, -0.15, "noise_tx"), (0.15, -0.15, "noise_tx"), (-0.15, 0.15, "noise_tx"),
          (0.15, 0.15, "lfm_tx")]
    return random_lattice_array(23, 2 * LAM, (10, 10), LAM, seed=38, transmitters=tx,
                                loopback=True).to_dict()


def fig2(name, targets, description):
    return {
        "name": name,
        "description": description,
        "seed": 2025,
        "geometry": linear24(),
        "scene": {
            "targets": [{"position_m": polar(r, az), "reflectivity": 1.0, "label": lbl}
                        for lbl, r, az in targets],
            "receiver_noise_power": 0.1,
            "propagation_loss": "none",
            "carrier_phase": True,
        },
        "processing": {"grid_size": 256, "reference": "loopback", "alpha_half_width": 0.7071,
                       "max_range_m": 45.0, "n_peaks": 3},
        "outputs": ["range_azimuth", "psf", "visibility_csv"],
    }


def sphere(name, targets, description):
    return {
        "name": name,
        "description": description,
        "seed": 38,
        "geometry": random23(),
        "scene": {
            "targets": [{"position_m": pos, "reflectivity": refl, "label": lbl}
                        for lbl, pos, refl in targets],
            "receiver_noise_power": 1e-4,
            "propagation_loss": "inverse_square",
            "carrier_phase": True,
        },
        "processing": {"grid_size": 128, "reference": "loopback", "max_range_m": 15.0,
                       "azel_source": "raw", "n_peaks": len(targets)},
        "outputs": ["range_azimuth", "azimuth_elevation", "psf", "visibility_csv"],
    }


def main():
    OUT.mkdir(parents=True, exist_ok=True)
    base = [("A", 7.5, -25.0), ("B", 15.0, 5.0), ("C", 22.5, 30.0)]
    docs = [
        fig2("fig2_linear24", base,
             "24-element half-wavelength line, three point targets (case a)"),
        fig2("fig2_linear24_b", [base[0], base[1], ("C", 12.0, -10.0)],
             "case a with target C moved to 12 m, -10 deg"),
        fig2("fig2_linear24_c", [base[0], base[1], ("C", 19.5, 40.0)],
             "case a with target C moved to 19.5 m, +40 deg"),
    ]
    left, right = -0.12, 0.12

    def at(r, a):
        return [round(a * r, 6), 0.0, round(float(np.sqrt(r**2 - (a * r) ** 2)), 6)]

    for r in (2.0, 3.0):
        for side, a in (("center", 0.0), ("left", left), ("right", right)):
            docs.append(sphere(f"sphere_{int(r)}m_{side}", [("sphere", at(r, a), BIG_SPHERE)],
                               f"30 cm sphere at {r:g} m, {side} of the field of view"))

    docs.append(sphere("two_targets_a",
                       [("near_left", at(2.0, left), SMALL_SPHERE),
                        ("far_right", at(3.0, right), BIG_SPHERE)],
                       "18 cm sphere at 2 m left, 30 cm sphere at 3 m right"))
    docs.append(sphere("two_targets_b",
                       [("far_left", at(3.0, left), BIG_SPHERE),
                        ("near_right", at(2.0, right), SMALL_SPHERE)],
                       "30 cm sphere at 3 m left, 18 cm sphere at 2 m right"))
    for doc in docs:
        path = OUT / f"{doc['name']}.json"
        path.write_text(json.dumps(doc, indent=2) + "\n")
        print(path)


if __name__ == "__main__":
    main()
