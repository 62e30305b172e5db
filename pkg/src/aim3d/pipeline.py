"""
End-to-end processing chain.

Each stage is a plain function so the command line can run them one at a
time against files. Intermediate cubes are rounded to the complex64
storage precision at every stage boundary, which makes a single
``run_pipeline`` call and a chain of separate stage invocations produce
identical products.
"""

from __future__ import annotations

import json
import logging
import time
import warnings
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np
from scipy import ndimage

from . import io as aio
from .compression import RadarDataCube, build_data_cube, compress_channels
from .config import ScenarioConfig
from .geometry import compute_baselines, compute_psf, direction_grid, resolution_and_fov
from .images import ImageGrid
from .interferometry import (
    estimate_visibilities_raw,
    range_azimuth_image,
    reconstruct_image,
)
from .scene import ChannelData, direction_cosines, synthesize_received
from .waveform import generate_lfm, generate_noise, lfm_train

log = logging.getLogger(__name__)

__all__ = [
    "RunReport",
    "transmit_waveforms",
    "simulate_channels",
    "stage_simulate",
    "stage_compress",
    "stage_range_azimuth",
    "stage_azimuth_elevation",
    "stage_psf",
    "locate_peaks",
    "target_truth",
    "run_pipeline",
]

FORMATS = ("bin", "csv", "pgm")


@dataclass
class RunReport:
    scenario: str
    seed: int
    parameters: dict
    resolution: dict
    products: dict = field(default_factory=dict)
    timings_s: dict = field(default_factory=dict)
    warnings: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "scenario": self.scenario,
            "seed": self.seed,
            "parameters": self.parameters,
            "resolution": self.resolution,
            "products": self.products,
            "timings_s": self.timings_s,
            "warnings": self.warnings,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, default=_json_default)


def _json_default(obj):
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    raise TypeError(f"not JSON serialisable: {type(obj)}")


def _storage(x: np.ndarray) -> np.ndarray:
    """Round to the complex64 precision used by the cube file."""
    return np.asarray(x, dtype=np.complex64)


def transmit_waveforms(cfg: ScenarioConfig) -> dict:
    """Waveform per transmitter element id."""
    waves = {tid: generate_noise(spec) for tid, spec in cfg.noise_specs.items()}
    for e in cfg.geometry.by_role("lfm_tx"):
        waves[e.id] = lfm_train(cfg.lfm)
    return waves


def simulate_channels(cfg: ScenarioConfig) -> ChannelData:
    return synthesize_received(cfg.scene, cfg.geometry, transmit_waveforms(cfg), seed=cfg.seed,
                               carrier_frequency_hz=cfg.lfm.carrier_frequency_hz)


def raw_channel_ids(cfg: ScenarioConfig) -> list:
    ids = list(cfg.geometry.receiver_ids)
    if cfg.geometry.loopback is not None:
        ids.append(cfg.geometry.loopback.id)
    return ids


def stage_simulate(cfg: ScenarioConfig) -> RadarDataCube:
    """Simulated receiver records arranged as a raw ``(sample, pulse, channel)`` cube."""
    ch = simulate_channels(cfg)
    cube = RadarDataCube.from_records(ch.samples, cfg.lfm.pri_samples, cfg.lfm.pulse_count,
                                      cfg.lfm.sample_interval_s, ch.channel_ids)
    return RadarDataCube(_storage(cube.data), cube.range_bin_m, cube.pulse_interval_s,
                         cube.channel_ids)


def _raw_channels(raw: RadarDataCube, cfg: ScenarioConfig) -> ChannelData:
    ids = raw_channel_ids(cfg)
    if raw.n_channels != len(ids):
        raise ValueError(f"raw cube has {raw.n_channels} channels, scenario expects {len(ids)}")
    lb = cfg.geometry.loopback
    ch = ChannelData(raw.channel_records(), ids, cfg.lfm.sample_interval_s,
                     lb.id if lb is not None else None)
    return ch


def stage_compress(raw: RadarDataCube, cfg: ScenarioConfig,
                   reference: Optional[str] = None) -> RadarDataCube:
    """Matched-filter a raw cube into the compressed radar data cube."""
    ref_mode = reference or cfg.processing.reference
    if ref_mode not in ("loopback", "lfm"):
        raise ValueError(f"unknown reference {ref_mode!r}")
    ch = _raw_channels(raw, cfg)
    if ref_mode == "loopback" and ch.loopback_id is None:
        raise ValueError("loopback reference requested but scenario has no loopback channel")
    compressed = compress_channels(ch, generate_lfm(cfg.lfm),
                                   use_loopback=(ref_mode == "loopback"),
                                   taper=cfg.processing.taper)
    cube = build_data_cube(compressed, cfg.lfm)
    return RadarDataCube(_storage(cube.data), cube.range_bin_m, cube.pulse_interval_s,
                         cube.channel_ids)


def _half_widths(cfg: ScenarioConfig):
    res = resolution_and_fov(cfg.geometry)
    ha = cfg.processing.alpha_half_width or res.fov_half_alpha or 1.0
    hb = cfg.processing.beta_half_width or res.fov_half_beta or 1.0
    return ha, hb


def stage_range_azimuth(cube: RadarDataCube, cfg: ScenarioConfig) -> ImageGrid:
    ha, _ = _half_widths(cfg)
    alpha = direction_grid(cfg.processing.grid_size, ha)
    cube = RadarDataCube(cube.data, cube.range_bin_m, cube.pulse_interval_s,
                         list(cfg.geometry.receiver_ids))
    return range_azimuth_image(cube, cfg.geometry, alpha, cfg.processing.max_range_m,
                               cfg.processing.weighting)


def stage_azimuth_elevation(cube: RadarDataCube, cfg: ScenarioConfig):
    """Azimuth-elevation image from whole-record correlation.

    ``cube`` is either the raw cube (``azel_source="raw"``, loopback row
    dropped) or the compressed cube.

    Returns
    -------
    (ImageGrid, VisibilitySet)
    """
    n_rx = len(cfg.geometry.receiver_ids)
    lb = cfg.geometry.loopback
    if cube.n_channels == n_rx:
        ids = list(cfg.geometry.receiver_ids)
    else:
        ids = raw_channel_ids(cfg)
    ch = ChannelData(cube.channel_records(), ids, cfg.lfm.sample_interval_s,
                     lb.id if (lb is not None and lb.id in ids) else None)
    remove = lfm_train(cfg.lfm) if cfg.processing.remove_lfm else None
    vis = estimate_visibilities_raw(ch, cfg.geometry, remove_lfm=remove,
                                    lfm_lags=max(1, len(cfg.scene.targets)))
    ha, hb = _half_widths(cfg)
    n = cfg.processing.grid_size
    img = reconstruct_image(vis, direction_grid(n, ha), direction_grid(n, hb),
                            cfg.processing.weighting)
    return img, vis


def stage_psf(cfg: ScenarioConfig) -> ImageGrid:
    ha, hb = _half_widths(cfg)
    n = cfg.processing.grid_size
    return compute_psf(compute_baselines(cfg.geometry), direction_grid(n, ha),
                       direction_grid(n, hb), cfg.processing.weighting)


def locate_peaks(grid: ImageGrid, n: int, exclusion) -> list:
    """Strongest ``n`` local maxima of ``|grid|``.

    ``exclusion`` is a ``(axis1, axis2)`` half-width in axis units; no two
    reported peaks are closer than that along both axes. The background
    is the median magnitude of the whole image.
    """
    mag = np.abs(np.asarray(grid.values)).astype(float)
    d1, d2 = grid.spacing
    r1 = int(np.ceil(exclusion[0] / d1)) if d1 > 0 else 0
    r2 = int(np.ceil(exclusion[1] / d2)) if d2 > 0 else 0
    local = ndimage.maximum_filter(mag, size=(2 * r1 + 1, 2 * r2 + 1), mode="nearest")
    cand = np.argwhere((mag == local) & (mag > 0))
    order = np.lexsort((cand[:, 1], cand[:, 0], -mag[cand[:, 0], cand[:, 1]]))
    background = float(np.median(mag))
    peaks = []
    for i, j in cand[order]:
        if any(abs(i - p[0]) <= r1 and abs(j - p[1]) <= r2 for p in peaks):
            continue
        peaks.append((int(i), int(j)))
        if len(peaks) == n:
            break
    out = []
    for i, j in peaks:
        ratio = mag[i, j] / background if background > 0 else np.inf
        out.append({
            grid.axis1_name: float(grid.axis1[i]),
            grid.axis2_name: float(grid.axis2[j]),
            "index": [i, j],
            "magnitude": float(mag[i, j]),
            "peak_to_background_db": float(10 * np.log10(ratio)),
        })
    return out


def target_truth(cfg: ScenarioConfig) -> list:
    """Expected range and direction cosines of each configured target.

    Range is half the LFM transmitter to target to receiver-centroid path;
    angles are seen from the receiver centroid.
    """
    centroid = cfg.geometry.centroid()
    lfm = cfg.geometry.by_role("lfm_tx")[0]
    tx = cfg.geometry.position3d(lfm)
    out = []
    for t in cfg.scene.targets:
        p = np.asarray(t.position)
        a, b, r = direction_cosines(p, centroid)
        bistatic = 0.5 * (np.linalg.norm(p - tx) + r)
        out.append({"range_m": float(bistatic), "alpha": float(a), "beta": float(b)})
    return out


def _write_grid(out_dir: Path, stem: str, grid: ImageGrid, formats) -> list:
    files = []
    if "bin" in formats:
        files.append(aio.write_image(out_dir / f"{stem}.grid", grid))
    if "csv" in formats:
        files.append(aio.write_image_csv(out_dir / f"{stem}.csv", grid))
    if "pgm" in formats:
        files.append(aio.write_image_pgm(out_dir / f"{stem}.pgm", grid))
    return [str(f) for f in files]


def _report_base(cfg: ScenarioConfig) -> RunReport:
    res = resolution_and_fov(cfg.geometry)
    params = {
        "lfm": {k: getattr(cfg.lfm, k) for k in cfg.lfm.__dataclass_fields__},
        "wavelength_m": cfg.geometry.wavelength_m,
        "n_receivers": len(cfg.geometry.receivers),
        "n_noise_tx": len(cfg.geometry.by_role("noise_tx")),
        "noise_seeds": {str(k): v.seed for k, v in cfg.noise_specs.items()},
        "n_targets": len(cfg.scene.targets),
        "processing": dict(cfg.processing.__dict__),
        "outputs": list(cfg.outputs),
        "truth": target_truth(cfg),
    }
    return RunReport(cfg.name, cfg.seed, params, res.to_dict())


def image_report(grid: ImageGrid, cfg: ScenarioConfig, mode: str) -> dict:
    """Peak list for one image product.

    Peaks closer than two range bins and one resolution cell are merged.
    """
    res = resolution_and_fov(cfg.geometry)
    cell_a = res.hpbw_alpha_rad or res.hpbw_beta_rad
    cell_b = res.hpbw_beta_rad or cell_a
    if mode == "range_azimuth":
        exclusion = (2 * grid.spacing[0], cell_a)
    else:
        exclusion = (cell_a, cell_b)
    peaks = locate_peaks(grid, cfg.n_peaks, exclusion)
    return {"shape": list(grid.shape), "extent": [list(e) for e in grid.extent], "peaks": peaks}


def run_pipeline(cfg: ScenarioConfig, out_dir=None, formats=FORMATS) -> RunReport:
    """Run simulate, compress and image, writing selected products.

    With ``out_dir=None`` nothing is written and the products are kept in
    memory only (returned via ``report.products``).
    """
    report = _report_base(cfg)
    out = Path(out_dir) if out_dir is not None else None
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        cfg.geometry.validate()
        t0 = time.perf_counter()
        raw = stage_simulate(cfg)
        t1 = time.perf_counter()
        cube = stage_compress(raw, cfg)
        t2 = time.perf_counter()
        report.timings_s.update(simulate=t1 - t0, compress=t2 - t1)

        if "cube" in cfg.outputs and out is not None:
            report.products["cube_raw"] = {"files": [str(aio.write_cube(out / "cube_raw.bin", raw))]}
            report.products["cube"] = {"files": [str(aio.write_cube(out / "cube.bin", cube))]}

        if "range_azimuth" in cfg.outputs:
            t = time.perf_counter()
            img = stage_range_azimuth(cube, cfg)
            entry = image_report(img, cfg, "range_azimuth")
            if out is not None:
                entry["files"] = _write_grid(out, "range_azimuth", img, formats)
            report.products["range_azimuth"] = entry
            report.timings_s["range_azimuth"] = time.perf_counter() - t

        vis = None
        if "azimuth_elevation" in cfg.outputs or "visibility_csv" in cfg.outputs:
            t = time.perf_counter()
            src = raw if cfg.processing.azel_source == "raw" else cube
            img, vis = stage_azimuth_elevation(src, cfg)
            if "azimuth_elevation" in cfg.outputs:
                entry = image_report(img, cfg, "azimuth_elevation")
                if out is not None:
                    entry["files"] = _write_grid(out, "azimuth_elevation", img, formats)
                report.products["azimuth_elevation"] = entry
            report.timings_s["azimuth_elevation"] = time.perf_counter() - t

        if "visibility_csv" in cfg.outputs and vis is not None:
            entry = {"n_samples": len(vis), "source": vis.source}
            if out is not None:
                entry["files"] = [str(aio.write_visibility_csv(out / "visibilities.csv", vis))]
            report.products["visibility_csv"] = entry

        if "psf" in cfg.outputs:
            psf = stage_psf(cfg)
            entry = {"shape": list(psf.shape), "peak": abs(complex(psf.peak()[2]))}
            if out is not None:
                entry["files"] = _write_grid(out, "psf", psf, formats)
            report.products["psf"] = entry
    report.warnings = [str(w.message) for w in caught]
    if out is not None:
        aio.atomic_write(out / "report.json", report.to_json().encode())
    return report
