import json

import numpy as np
import pytest

from aim3d import LfmSpec, uniform_linear_array
from aim3d.constants import SPEED_OF_LIGHT

LAMBDA = LfmSpec().wavelength_m


def line_array(n=24, spacing_wavelengths=0.5, transmitters=(), loopback=False):
    return uniform_linear_array(n, spacing_wavelengths * LAMBDA, LAMBDA, transmitters,
                                loopback=loopback)


def standard_transmitters():
    """Three noise transmitters around the array plus an LFM transmitter."""
    return [(-0.3, 0.1, "noise_tx"), (0.3, 0.1, "noise_tx"), (0.0, -0.25, "noise_tx"),
            (0.0, 0.05, "lfm_tx")]


def half_power_width(axis, values):
    """Width of the central lobe of a real intensity profile at half its peak."""
    p = np.asarray(values, dtype=float)
    k = int(np.argmax(p))
    half = p[k] / 2.0

    def edge(step):
        i = k
        while 0 <= i + step < p.size and p[i + step] >= half:
            i += step
        j = i + step
        frac = (p[i] - half) / (p[i] - p[j])
        return axis[i] + frac * (axis[j] - axis[i])

    return edge(+1) - edge(-1)


def round_trip_delay_samples(range_m, dt=10e-9):
    return 2.0 * range_m / SPEED_OF_LIGHT / dt


def small_scenario_doc(n_receivers=8, targets=((0.0, 0.0, 9.0),), seed=11, outputs=None):
    """A fast scenario: short chirp, four pulses, an eight-element line."""
    geo = line_array(n_receivers, 0.5, standard_transmitters(), loopback=True)
    doc = {
        "name": "small",
        "seed": seed,
        "lfm": {"pulse_width_s": 2e-6, "pri_s": 1e-5, "pulse_count": 4,
                "total_duration_s": 4e-5},
        "geometry": geo.to_dict(),
        "scene": {"targets": [{"position_m": list(t)} for t in targets],
                  "receiver_noise_power": 0.01},
        "processing": {"grid_size": 32, "max_range_m": 20.0},
    }
    if outputs is not None:
        doc["outputs"] = list(outputs)
    return doc


@pytest.fixture
def small_config_path(tmp_path):
    path = tmp_path / "small.json"
    path.write_text(json.dumps(small_scenario_doc(
        outputs=["range_azimuth", "azimuth_elevation", "psf", "visibility_csv", "cube"])))
    return path


# ---------------------------------------------------------------------------
# acceptance summary: one line per criterion, whatever the capture mode

_CRITERIA = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    number, title = marker.args
    entry = _CRITERIA.setdefault(number, {"title": title, "tests": {}, "notes": []})
    if rep.failed:
        entry["tests"][item.nodeid] = "FAIL"
    elif rep.when == "call":
        entry["tests"].setdefault(item.nodeid, "PASS" if rep.passed else "SKIP")
        entry["notes"] += [str(v) for k, v in item.user_properties if k == "measured"]


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        entry = _CRITERIA[number]
        states = list(entry["tests"].values())
        verdict = "FAIL" if "FAIL" in states else ("PASS" if "PASS" in states else "SKIP")
        passed = states.count("PASS")
        line = f"criterion {number}: {verdict}  {entry['title']} ({passed}/{len(states)} checks)"
        if entry["notes"]:
            line += "  [" + "; ".join(entry["notes"]) + "]"
        terminalreporter.write_line(line)
