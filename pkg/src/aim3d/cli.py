"""
Command-line front end.

    aim3d psf      --config g.json --out psf.grid
    aim3d simulate --config s.json --out-dir run/
    aim3d compress --config s.json --in run/cube_raw.bin --ref lfm
    aim3d image    --config s.json --cube run/cube.bin --mode range-azimuth
    aim3d pipeline --config s.json --out-dir run/

Exit codes: 0 success, 2 invalid configuration, 3 numerical failure,
4 I/O failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

import numpy as np

from . import io as aio
from .config import ConfigError, load_config
from .pipeline import (
    FORMATS,
    _report_base,
    _write_grid,
    image_report,
    raw_channel_ids,
    run_pipeline,
    stage_azimuth_elevation,
    stage_compress,
    stage_psf,
    stage_range_azimuth,
    stage_simulate,
)

log = logging.getLogger("aim3d")

EXIT_CONFIG = 2
EXIT_NUMERIC = 3
EXIT_IO = 4


def _u64(text: str) -> int:
    value = int(text, 0)
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return value


def _formats(choice: str):
    return FORMATS if choice == "all" else (choice,)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", required=True,
                        help="scenario JSON path or bundled scenario name")
    common.add_argument("--out-dir", default=".", type=Path)
    common.add_argument("--seed", type=_u64, default=None, help="override the scenario seed")
    common.add_argument("--grid", type=int, default=None, help="image grid size")
    common.add_argument("--format", choices=["bin", "csv", "pgm", "all"], default="bin")
    common.add_argument("--quiet", action="store_true")

    parser = argparse.ArgumentParser(prog="aim3d", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("psf", parents=[common], help="point spread function of the array")
    p.add_argument("--out", type=Path, default=None)

    p = sub.add_parser("simulate", parents=[common], help="simulate raw receiver records")
    p.add_argument("--out", type=Path, default=None)

    p = sub.add_parser("compress", parents=[common], help="matched-filter a raw cube")
    p.add_argument("--in", dest="inp", type=Path, required=True)
    p.add_argument("--ref", choices=["lfm", "loopback"], default=None)
    p.add_argument("--out", type=Path, default=None)

    p = sub.add_parser("image", parents=[common], help="form an image from a cube")
    p.add_argument("--cube", type=Path, required=True)
    p.add_argument("--mode", choices=["range-azimuth", "azimuth-elevation"],
                   default="range-azimuth")
    p.add_argument("--out", type=Path, default=None,
                   help="output stem (default: <out-dir>/<mode>)")

    sub.add_parser("pipeline", parents=[common], help="run every stage")
    return parser


def _out_path(args, default_name: str) -> Path:
    if args.out is not None:
        return args.out
    return args.out_dir / default_name


def _emit(report: dict, args, path: Path = None):
    text = json.dumps(report, indent=2)
    if path is not None:
        aio.atomic_write(path, text.encode())
    if not args.quiet:
        print(text)


def _run(args) -> int:
    cfg = load_config(args.config, seed=args.seed, grid_size=args.grid)
    formats = _formats(args.format)

    if args.command == "pipeline":
        report = run_pipeline(cfg, args.out_dir, formats)
        if not args.quiet:
            print(report.to_json())
        return 0

    if args.command == "psf":
        grid = stage_psf(cfg)
        out = _out_path(args, "psf.grid")
        files = [str(aio.write_image(out, grid))]
        extra = [f for f in formats if f != "bin"]
        files += _write_grid(out.parent, out.stem, grid, extra)
        _emit({"product": "psf", "files": files, "shape": list(grid.shape)}, args)
        return 0

    if args.command == "simulate":
        raw = stage_simulate(cfg)
        out = _out_path(args, "cube_raw.bin")
        aio.write_cube(out, raw)
        _emit({"product": "cube_raw", "files": [str(out)], "shape": list(raw.shape),
               "channel_ids": raw_channel_ids(cfg)}, args)
        return 0

    if args.command == "compress":
        raw = aio.read_cube(args.inp)
        cube = stage_compress(raw, cfg, args.ref)
        out = _out_path(args, "cube.bin")
        aio.write_cube(out, cube)
        _emit({"product": "cube", "files": [str(out)], "shape": list(cube.shape),
               "reference": args.ref or cfg.processing.reference}, args)
        return 0

    if args.command == "image":
        cube = aio.read_cube(args.cube)
        mode = args.mode.replace("-", "_")
        if mode == "range_azimuth":
            grid = stage_range_azimuth(cube, cfg)
        else:
            grid, _ = stage_azimuth_elevation(cube, cfg)
        stem = _out_path(args, mode)
        entry = image_report(grid, cfg, mode)
        entry["files"] = _write_grid(stem.parent, stem.name, grid, formats)
        base = _report_base(cfg)
        base.products[mode] = entry
        _emit(base.to_dict(), args, stem.parent / f"{stem.name}_report.json")
        return 0

    raise AssertionError(args.command)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.WARNING if args.quiet else logging.INFO,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return _run(args)
    except ConfigError as exc:
        print(f"error: invalid configuration: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"error: I/O failure: {exc}", file=sys.stderr)
        return EXIT_IO
    except (ValueError, ArithmeticError, np.linalg.LinAlgError) as exc:
        print(f"error: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
