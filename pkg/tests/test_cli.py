import json
import shutil
import subprocess

import numpy as np
import pytest
from conftest import small_scenario_doc

from aim3d import io as aio
from aim3d import load_config, run_pipeline
from aim3d.cli import main
from aim3d.pipeline import locate_peaks, target_truth
from aim3d.images import ImageGrid

PRODUCTS = ["cube_raw.bin", "cube.bin", "range_azimuth.grid", "range_azimuth.csv",
            "range_azimuth.pgm", "azimuth_elevation.grid", "azimuth_elevation.csv",
            "azimuth_elevation.pgm", "visibilities.csv", "psf.grid", "psf.csv", "psf.pgm"]


def run(*argv):
    return main([str(a) for a in argv])


@pytest.fixture
def pipeline_dir(small_config_path, tmp_path):
    out = tmp_path / "pipe"
    assert run("pipeline", "--config", small_config_path, "--out-dir", out,
               "--format", "all", "--quiet") == 0
    return out


class TestPipelineCommand:
    def test_writes_every_product(self, pipeline_dir):
        for name in PRODUCTS + ["report.json"]:
            assert (pipeline_dir / name).is_file(), name

    def test_report_contents(self, pipeline_dir):
        report = json.loads((pipeline_dir / "report.json").read_text())
        assert report["scenario"] == "small" and report["seed"] == 11
        assert set(report["products"]) == {"cube_raw", "cube", "range_azimuth",
                                           "azimuth_elevation", "visibility_csv", "psf"}
        peak = report["products"]["range_azimuth"]["peaks"][0]
        truth = report["parameters"]["truth"][0]
        assert abs(peak["range_m"] - truth["range_m"]) <= 1.5
        assert abs(peak["alpha"] - truth["alpha"]) <= report["resolution"]["hpbw_alpha_rad"]
        assert peak["peak_to_background_db"] > 10
        assert set(report["timings_s"]) >= {"simulate", "compress", "range_azimuth"}

    def test_only_selected_products(self, tmp_path):
        path = tmp_path / "psf_only.json"
        path.write_text(json.dumps(small_scenario_doc(outputs=["psf"])))
        out = tmp_path / "o"
        assert run("pipeline", "--config", path, "--out-dir", out, "--quiet") == 0
        report = json.loads((out / "report.json").read_text())
        assert list(report["products"]) == ["psf"]
        assert sorted(p.name for p in out.iterdir()) == ["psf.grid", "report.json"]

    def test_prints_report_unless_quiet(self, small_config_path, tmp_path, capsys):
        run("pipeline", "--config", small_config_path, "--out-dir", tmp_path / "a")
        assert json.loads(capsys.readouterr().out)["scenario"] == "small"
        run("pipeline", "--config", small_config_path, "--out-dir", tmp_path / "b", "--quiet")
        assert capsys.readouterr().out == ""

    def test_same_seed_is_bitwise_identical(self, small_config_path, pipeline_dir, tmp_path):
        again = tmp_path / "again"
        run("pipeline", "--config", small_config_path, "--out-dir", again, "--format", "all",
            "--quiet")
        for name in PRODUCTS:
            assert (pipeline_dir / name).read_bytes() == (again / name).read_bytes(), name
        a = json.loads((pipeline_dir / "report.json").read_text().replace(str(pipeline_dir), "D"))
        b = json.loads((again / "report.json").read_text().replace(str(again), "D"))
        a.pop("timings_s"), b.pop("timings_s")
        assert a == b

    def test_seed_override_changes_noise(self, small_config_path, pipeline_dir, tmp_path):
        other = tmp_path / "other"
        run("pipeline", "--config", small_config_path, "--out-dir", other, "--seed", "12",
            "--quiet")
        assert (other / "cube_raw.bin").read_bytes() != (pipeline_dir / "cube_raw.bin").read_bytes()

    def test_grid_override(self, small_config_path, tmp_path):
        run("pipeline", "--config", small_config_path, "--out-dir", tmp_path, "--grid", "12",
            "--quiet")
        assert aio.read_image(tmp_path / "psf.grid").shape == (12, 12)


class TestStages:
    def test_stages_match_pipeline_bitwise(self, small_config_path, pipeline_dir, tmp_path):
        out = tmp_path / "stages"
        cfg = ["--config", small_config_path, "--out-dir", out, "--quiet", "--format", "all"]
        assert run("simulate", *cfg) == 0
        assert run("compress", *cfg, "--in", out / "cube_raw.bin") == 0
        assert run("image", *cfg, "--cube", out / "cube.bin", "--mode", "range-azimuth") == 0
        assert run("image", *cfg, "--cube", out / "cube_raw.bin",
                   "--mode", "azimuth-elevation") == 0
        assert run("psf", *cfg) == 0
        for name in PRODUCTS:
            if name == "visibilities.csv":
                continue
            assert (out / name).read_bytes() == (pipeline_dir / name).read_bytes(), name
        report = json.loads((out / "range_azimuth_report.json").read_text())
        piped = json.loads((pipeline_dir / "report.json").read_text())
        assert report["products"]["range_azimuth"]["peaks"] == \
            piped["products"]["range_azimuth"]["peaks"]

    def test_compress_reference_choice(self, small_config_path, pipeline_dir, tmp_path):
        a, b = tmp_path / "lfm.bin", tmp_path / "loop.bin"
        common = ["--config", small_config_path, "--quiet", "--in", pipeline_dir / "cube_raw.bin"]
        assert run("compress", *common, "--ref", "lfm", "--out", a) == 0
        assert run("compress", *common, "--ref", "loopback", "--out", b) == 0
        ca, cb = aio.read_cube(a), aio.read_cube(b)
        assert ca.shape == cb.shape == (1000, 4, 8)
        np.testing.assert_allclose(ca.data, cb.data, atol=1e-4)

    def test_psf_out_path(self, small_config_path, tmp_path, capsys):
        target = tmp_path / "x" / "psf.grid"
        assert run("psf", "--config", small_config_path, "--out", target) == 0
        grid = aio.read_image(target)
        assert grid.shape == (32, 32)
        assert json.loads(capsys.readouterr().out)["product"] == "psf"

    def test_console_script(self, small_config_path, tmp_path):
        exe = shutil.which("aim3d")
        if exe is None:
            pytest.skip("aim3d console script not on PATH")
        proc = subprocess.run([exe, "psf", "--config", str(small_config_path), "--out",
                               str(tmp_path / "p.grid"), "--quiet"], capture_output=True)
        assert proc.returncode == 0
        assert (tmp_path / "p.grid").is_file()


class TestExitCodes:
    def test_invalid_config_is_2(self, tmp_path, capsys):
        doc = small_scenario_doc()
        doc["lfm"]["bandwidth_hz"] = "wide"
        path = tmp_path / "bad.json"
        path.write_text(json.dumps(doc))
        assert run("pipeline", "--config", path, "--out-dir", tmp_path, "--quiet") == 2
        assert "lfm.bandwidth_hz" in capsys.readouterr().err

    def test_missing_config_is_4(self, tmp_path):
        assert run("psf", "--config", tmp_path / "nope.json", "--quiet") == 4

    def test_unwritable_output_is_4(self, small_config_path, tmp_path):
        blocker = tmp_path / "file"
        blocker.write_text("x")
        assert run("psf", "--config", small_config_path, "--out-dir", blocker / "sub",
                   "--quiet") == 4

    def test_missing_input_cube_is_4(self, small_config_path, tmp_path):
        assert run("compress", "--config", small_config_path, "--in", tmp_path / "none.bin",
                   "--quiet") == 4

    def test_inconsistent_cube_is_3(self, small_config_path, tmp_path, capsys):
        from aim3d import RadarDataCube
        path = aio.write_cube(tmp_path / "odd.bin",
                              RadarDataCube(np.zeros((1000, 4, 3), np.complex64), 1.5, 1e-5))
        assert run("compress", "--config", small_config_path, "--in", path, "--quiet") == 3
        assert "numerical failure" in capsys.readouterr().err

    def test_corrupt_cube_is_3(self, small_config_path, tmp_path):
        path = tmp_path / "junk.bin"
        path.write_bytes(b"not a cube at all, clearly")
        assert run("image", "--config", small_config_path, "--cube", path, "--quiet") == 3

    def test_bad_arguments_exit_via_argparse(self, small_config_path):
        with pytest.raises(SystemExit) as err:
            run("pipeline", "--config", small_config_path, "--seed", "-3")
        assert err.value.code == 2


def test_locate_peaks_respects_exclusion():
    values = np.zeros((20, 20))
    values[5, 5], values[5, 7], values[15, 15] = 10.0, 9.0, 5.0
    grid = ImageGrid(np.arange(20.0), np.arange(20.0), values, "range_m", "alpha")
    peaks = locate_peaks(grid, 2, (3.0, 3.0))
    assert [p["index"] for p in peaks] == [[5, 5], [15, 15]]
    assert peaks[0]["range_m"] == 5.0


def test_sphere_2m_center_localizes():
    cfg = load_config("sphere_2m_center")
    report = run_pipeline(cfg)
    truth = target_truth(cfg)[0]
    peak = report.products["range_azimuth"]["peaks"][0]
    assert abs(peak["range_m"] - 2.0) <= 1.5
    assert abs(peak["alpha"]) <= report.resolution["hpbw_alpha_rad"]
    assert abs(truth["alpha"]) < 0.01
    azel = report.products["azimuth_elevation"]["peaks"][0]
    assert abs(azel["alpha"]) <= report.resolution["hpbw_alpha_rad"]
    assert abs(azel["beta"]) <= report.resolution["hpbw_beta_rad"]
