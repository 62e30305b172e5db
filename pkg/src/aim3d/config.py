"""
Scenario configuration.

Scenarios are JSON documents whose keys carry their units (``*_hz``,
``*_m``, ``*_s``). A minimal scenario::

    {
      "name": "demo",
      "seed": 7,
      "lfm": {"bandwidth_hz": 1e8},
      "geometry": {"elements": [
          {"id": 0, "x_m": -0.002, "y_m": 0.0, "role": "receiver"},
          {"id": 1, "x_m":  0.002, "y_m": 0.0, "role": "receiver"},
          {"id": 2, "x_m":  0.0,   "y_m": 0.1, "role": "lfm_tx"}]},
      "scene": {"targets": [{"position_m": [0, 0, 15]}]}
    }

Omitted ``lfm`` fields take the :class:`~aim3d.waveform.LfmSpec`
defaults. Noise seeds not given explicitly are derived from ``seed``.
"""

from __future__ import annotations

import copy
import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Optional

import jsonschema
import numpy as np

from .geometry import ArrayGeometry, Element
from .scene import PointTarget, Scene
from .waveform import LfmSpec, NoiseSpec

__all__ = [
    "ConfigError",
    "ScenarioConfig",
    "ProcessingOptions",
    "SCHEMA",
    "OUTPUTS",
    "load_config",
    "parse_config",
    "bundled_scenarios",
]

OUTPUTS = ("range_azimuth", "azimuth_elevation", "psf", "visibility_csv", "cube")

_NUM = {"type": "number"}
_POS = {"type": "number", "exclusiveMinimum": 0}

SCHEMA = {
    "$schema": "http://json-schema.org/draft-07/schema#",
    "type": "object",
    "additionalProperties": False,
    "required": ["geometry"],
    "properties": {
        "name": {"type": "string"},
        "description": {"type": "string"},
        "seed": {"type": "integer", "minimum": 0, "maximum": 2**64 - 1},
        "lfm": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "carrier_frequency_hz": _POS,
                "bandwidth_hz": _POS,
                "pulse_width_s": _POS,
                "sample_interval_s": _POS,
                "pri_s": _POS,
                "pulse_count": {"type": "integer", "minimum": 1},
                "total_duration_s": _POS,
            },
        },
        "noise": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "power": _POS,
                "seeds": {"type": "array",
                          "items": {"type": "integer", "minimum": 0, "maximum": 2**64 - 1}},
            },
        },
        "geometry": {
            "type": "object",
            "additionalProperties": False,
            "required": ["elements"],
            "properties": {
                "wavelength_m": _POS,
                "elements": {
                    "type": "array",
                    "minItems": 1,
                    "items": {
                        "type": "object",
                        "additionalProperties": False,
                        "required": ["id", "x_m", "y_m", "role"],
                        "properties": {
                            "id": {"type": "integer", "minimum": 0},
                            "x_m": _NUM,
                            "y_m": _NUM,
                            "role": {"enum": ["receiver", "noise_tx", "lfm_tx", "loopback"]},
                        },
                    },
                },
            },
        },
        "scene": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "targets": {
                    "type": "array",
                    "items": {
                        "type": "object",
                        "additionalProperties": False,
                        "required": ["position_m"],
                        "properties": {
                            "position_m": {"type": "array", "items": _NUM,
                                           "minItems": 3, "maxItems": 3},
                            "reflectivity": {"oneOf": [
                                _NUM,
                                {"type": "array", "items": _NUM, "minItems": 2, "maxItems": 2},
                            ]},
                            "label": {"type": "string"},
                        },
                    },
                },
                "receiver_noise_power": {"type": "number", "minimum": 0},
                "propagation_loss": {"enum": ["none", "inverse_square"]},
                "carrier_phase": {"type": "boolean"},
            },
        },
        "processing": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "grid_size": {"type": "integer", "minimum": 2},
                "reference": {"enum": ["loopback", "lfm"]},
                "taper": {"enum": ["none", "hamming"]},
                "azel_source": {"enum": ["raw", "compressed"]},
                "weighting": {"enum": ["natural", "uniform"]},
                "remove_lfm": {"type": "boolean"},
                "max_range_m": _POS,
                "alpha_half_width": {"type": "number", "exclusiveMinimum": 0, "maximum": 1},
                "beta_half_width": {"type": "number", "exclusiveMinimum": 0, "maximum": 1},
                "n_peaks": {"type": "integer", "minimum": 1},
            },
        },
        "outputs": {"type": "array", "items": {"enum": list(OUTPUTS)}, "uniqueItems": True},
    },
}


class ConfigError(ValueError):
    """Invalid scenario; ``key`` names the offending entry."""

    def __init__(self, key: str, message: str):
        self.key = key
        super().__init__(f"{key}: {message}" if key else message)


@dataclass
class ProcessingOptions:
    grid_size: int = 256
    reference: str = "loopback"
    taper: str = "none"
    azel_source: str = "raw"
    weighting: str = "natural"
    remove_lfm: bool = False
    max_range_m: Optional[float] = None
    alpha_half_width: Optional[float] = None
    beta_half_width: Optional[float] = None
    n_peaks: Optional[int] = None


@dataclass
class ScenarioConfig:
    name: str
    seed: int
    lfm: LfmSpec
    noise_specs: dict
    geometry: ArrayGeometry
    scene: Scene
    processing: ProcessingOptions = field(default_factory=ProcessingOptions)
    outputs: tuple = ("range_azimuth", "azimuth_elevation", "psf", "visibility_csv")
    raw: dict = field(default_factory=dict, repr=False)

    @property
    def n_peaks(self) -> int:
        return self.processing.n_peaks or max(1, len(self.scene.targets))

    def to_dict(self) -> dict:
        return copy.deepcopy(self.raw)


def _key(path) -> str:
    out = ""
    for p in path:
        out += f"[{p}]" if isinstance(p, int) else (f".{p}" if out else str(p))
    return out or "<root>"


def derived_noise_seed(seed: int, index: int) -> int:
    ss = np.random.SeedSequence([int(seed), 0x6E6F697365, int(index)])
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def parse_config(doc: dict, seed: Optional[int] = None,
                 grid_size: Optional[int] = None) -> ScenarioConfig:
    """Validate a scenario document and build the typed configuration.

    ``seed`` and ``grid_size`` override the document's values.

    Raises
    ------
    ConfigError
        On any schema or consistency violation.
    """
    try:
        jsonschema.validate(doc, SCHEMA)
    except jsonschema.ValidationError as exc:
        raise ConfigError(_key(exc.absolute_path), exc.message) from None
    doc = copy.deepcopy(doc)
    if seed is not None:
        doc["seed"] = int(seed)
    if grid_size is not None:
        doc.setdefault("processing", {})["grid_size"] = int(grid_size)
    run_seed = int(doc.get("seed", 0))

    try:
        lfm = LfmSpec(**doc.get("lfm", {}))
    except ValueError as exc:
        raise ConfigError("lfm", str(exc)) from None
    if lfm.pulse_count * lfm.pri_samples != lfm.total_samples:
        raise ConfigError("lfm.total_duration_s",
                          "must equal pulse_count * pri_s for the cube format")

    gdoc = doc["geometry"]
    try:
        geometry = ArrayGeometry([Element(**e) for e in gdoc["elements"]],
                                 float(gdoc.get("wavelength_m", lfm.wavelength_m)))
    except ValueError as exc:
        raise ConfigError("geometry.elements", str(exc)) from None
    if len(geometry.receivers) < 2:
        raise ConfigError("geometry.elements", "at least 2 receivers are required")
    lfm_tx = geometry.by_role("lfm_tx")
    if len(lfm_tx) != 1:
        raise ConfigError("geometry.elements", f"exactly one lfm_tx required, found {len(lfm_tx)}")
    if len(geometry.by_role("loopback")) > 1:
        raise ConfigError("geometry.elements", "at most one loopback element")

    proc = ProcessingOptions(**doc.get("processing", {}))
    if proc.reference == "loopback" and geometry.loopback is None:
        raise ConfigError("processing.reference", "'loopback' requires a loopback element")

    noise_tx = geometry.by_role("noise_tx")
    ndoc = doc.get("noise", {})
    seeds = ndoc.get("seeds")
    if seeds is not None and len(seeds) != len(noise_tx):
        raise ConfigError("noise.seeds",
                          f"{len(seeds)} seeds given for {len(noise_tx)} noise transmitters")
    if seeds is None:
        seeds = [derived_noise_seed(run_seed, i) for i in range(len(noise_tx))]
    power = float(ndoc.get("power", 1.0))
    noise_specs = {
        e.id: NoiseSpec(power, lfm.sample_interval_s, lfm.total_duration_s, int(s))
        for e, s in zip(noise_tx, seeds)
    }

    sdoc = doc.get("scene", {})
    targets = []
    for t in sdoc.get("targets", []):
        refl = t.get("reflectivity", 1.0)
        if isinstance(refl, list):
            refl = complex(refl[0], refl[1])
        targets.append(PointTarget(tuple(t["position_m"]), refl))
    scene = Scene(targets, float(sdoc.get("receiver_noise_power", 0.0)),
                  sdoc.get("propagation_loss", "none"), bool(sdoc.get("carrier_phase", True)))

    outputs = tuple(doc.get("outputs", ScenarioConfig.outputs))
    return ScenarioConfig(doc.get("name", "scenario"), run_seed, lfm, noise_specs, geometry,
                          scene, proc, outputs, doc)


def bundled_scenarios() -> list:
    """Names of the scenario files shipped with the package."""
    root = resources.files("aim3d") / "scenarios"
    return sorted(p.name for p in root.iterdir() if p.name.endswith(".json"))


def _resolve(path) -> Path:
    p = Path(path)
    if p.exists():
        return p
    name = p.name if p.suffix == ".json" else p.name + ".json"
    bundled = resources.files("aim3d") / "scenarios" / name
    if bundled.is_file():
        return Path(str(bundled))
    raise FileNotFoundError(f"no such scenario: {path}")


def load_config(path, seed: Optional[int] = None, grid_size: Optional[int] = None) -> ScenarioConfig:
    """Load a scenario from a file path or a bundled scenario name."""
    p = _resolve(path)
    try:
        doc = json.loads(p.read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError("<root>", f"invalid JSON in {p}: {exc}") from None
    return parse_config(doc, seed=seed, grid_size=grid_size)
