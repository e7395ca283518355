#!/usr/bin/env python
"""
Command Line Module

`simtile` front end: generate example tilings, validate them, run the tiling
constructions, analyze tip simplices, slices and extremal points.

Every command prints one JSON document on stdout. Exit codes:
0 success, 1 usage or input error (diagnostic on stderr), 2 the input was
processed and judged invalid.
"""

import argparse
import sys
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Sequence

import pandas as pd
import structlog
from pydantic import ValidationError

from simtile.config import DEFAULT_SAMPLES, DEFAULT_SEED, SamplingSettings, Thresholds
from simtile.errors import DegenerateSlice, EmptySlice, SimtileError
from simtile.examples import cone_spindle_tiling, orthant_tiling, rotated_similar_tile_fixture, single_tile_tiling
from simtile.geometry import (
    Hyperplane,
    Location,
    classify_fixed_point,
    estimate_extremal_points,
    iterate_tiling,
    meet_tilings,
    move_fixed_point,
    normalize_to_homothety,
    plan_fixed_point_move,
    plan_normalization,
    slice_boundary_cloud,
    slice_tiling,
    tip_simplex,
    validate_tiling,
)
from simtile.geometry.constructions import DEFAULT_EPS_MAX, DEFAULT_MAX_STEPS, DEFAULT_PROBES, fixed_point_error
from simtile.geometry.slicing import DEFAULT_SLICE_SAMPLES
from simtile.geometry.tilings import Tiling
from simtile.log import setup_logging
from simtile.serialization import dumps, load_tiling, load_tilings, save_tiling

logger = structlog.get_logger(__name__)

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_INVALID = 2

EXAMPLE_CHOICES = ["cone-spindle", "quarter-square", "rotated-fixture", "orthant", "single-tile"]


class UsageError(Exception):
    pass


class Parser(argparse.ArgumentParser):
    """ArgumentParser that raises instead of exiting with status 2."""

    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def parse_floats(text: str) -> List[float]:
    try:
        return [float(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def parse_ints(text: str) -> List[int]:
    try:
        return [int(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def emit(document: Any) -> None:
    sys.stdout.buffer.write(dumps(document))
    sys.stdout.flush()


def _summary(t: Tiling, path: Optional[str]) -> Dict[str, Any]:
    return {"path": path, "tiles": len(t), "tagged": t.tagged_indices, "dim": t.dim}


def _write_or_emit(t: Tiling, output: Optional[str]) -> None:
    """Save to `output` and print a summary, or print the tiling itself."""
    if output is None:
        emit(t.to_dict())
        return
    save_tiling(t, output)
    emit(_summary(t, output))


def cmd_example(args) -> int:
    if args.kind == "cone-spindle":
        t = cone_spindle_tiling(args.dim or 3)
    elif args.kind == "quarter-square":
        t = orthant_tiling(2, args.corner or "0,0")
    elif args.kind == "orthant":
        dim = args.dim or 3
        t = orthant_tiling(dim, args.corner or ",".join("0" * dim))
    elif args.kind == "rotated-fixture":
        t = rotated_similar_tile_fixture()
    else:
        t = single_tile_tiling()
    _write_or_emit(t, args.output)
    return EXIT_OK


def cmd_validate(args) -> int:
    t = load_tiling(args.path)
    thresholds = Thresholds(volume_gap=args.volume_gap, overlap=args.overlap)
    settings = SamplingSettings(
        samples=args.samples, seed=args.seed, workers=args.workers, progress=args.progress
    )
    report = validate_tiling(
        t,
        settings.samples,
        settings.seed,
        thresholds,
        workers=settings.workers,
        chunk_size=settings.chunk_size,
        progress=settings.progress,
    )
    emit(report)
    return EXIT_OK if report.covered and report.proper else EXIT_INVALID


def cmd_iterate(args) -> int:
    t = load_tiling(args.path)
    pattern = load_tiling(args.pattern) if args.pattern else None
    _write_or_emit(iterate_tiling(t, args.tile, pattern), args.output)
    return EXIT_OK


def cmd_meet(args) -> int:
    left, right = load_tilings([args.left, args.right])
    _write_or_emit(meet_tilings(left, right, seed=args.seed), args.output)
    return EXIT_OK


def cmd_normalize(args) -> int:
    t = load_tiling(args.path)
    plan = plan_normalization(t, args.tile, args.eps_max, args.probes, args.seed, args.align_rotation)
    result = normalize_to_homothety(t, args.tile, plan=plan)
    if args.output:
        save_tiling(result, args.output)
    document = {
        "plan": plan.model_dump(),
        "polytope_certified": classify_fixed_point(t, args.tile) == Location.INSIDE,
        "result": _summary(result, args.output),
    }
    emit(document)
    return EXIT_OK


def cmd_move_fixpoint(args) -> int:
    tilings = load_tilings(args.paths)
    plan = plan_fixed_point_move(tilings, args.target, args.eps, args.max_steps)
    result = move_fixed_point(tilings, args.target, args.eps, args.max_steps, plan=plan)
    if args.output:
        save_tiling(result, args.output)
    document = {
        "plan": plan.summary(),
        "error": fixed_point_error(result, args.target),
        "result": _summary(result, args.output),
    }
    emit(document)
    return EXIT_OK


def cmd_tip_simplex(args) -> int:
    tilings = load_tilings(args.paths)
    simplex = tip_simplex(tilings, args.tags)
    emit(simplex)
    if args.require_nondegenerate and simplex.nondegenerate_for is None:
        return EXIT_INVALID
    return EXIT_OK


def dump_slice_cloud(
    tiling_path: str, normal: Sequence[float], offset: float, resolution: int, out_path: str, seed: int = 0
) -> pd.DataFrame:
    """
    Write boundary samples of every slice tile in chart coordinates

    Args:
        tiling_path: Tiling file
        normal: Hyperplane normal (any nonzero length)
        offset: Hyperplane offset for that normal
        resolution: Rays per slice tile
        out_path: CSV destination
        seed: Slice and ray seed

    Returns:
        The written cloud, columns tile, y0..y{n-2}
    """
    t = load_tiling(tiling_path)
    _, induced = slice_tiling(t, Hyperplane.from_normal(normal, offset), seed=seed)
    return write_cloud(induced, resolution, out_path, seed)


def write_cloud(induced: Tiling, resolution: int, out_path: str, seed: int = 0) -> pd.DataFrame:
    cloud = slice_boundary_cloud([tile.body for tile in induced.tiles], resolution, seed)
    out = Path(out_path)
    if out.parent != Path(""):
        out.parent.mkdir(parents=True, exist_ok=True)
    cloud.to_csv(out, index=False, float_format="%.17g")
    logger.info("dump_slice_cloud", path=str(out), points=len(cloud))
    return cloud


def cmd_slice(args) -> int:
    t = load_tiling(args.path)
    hyperplane = Hyperplane.from_normal(args.normal, args.offset)
    chart, induced = slice_tiling(t, hyperplane, samples=args.samples, seed=args.seed)
    if args.output:
        save_tiling(induced, args.output)
    document = {
        "chart": chart.to_dict(),
        "result": _summary(induced, args.output),
        "proper": induced.is_proper,
    }
    if args.cloud:
        cloud = write_cloud(induced, args.resolution, args.cloud, args.seed)
        document["cloud"] = {"path": args.cloud, "points": len(cloud)}
    emit(document)
    return EXIT_OK


def cmd_extremal(args) -> int:
    t = load_tiling(args.path)
    body = t.ambient if args.tile is None else t.tile(args.tile).body
    estimate = estimate_extremal_points(body, args.directions, args.delta, args.seed)
    emit(estimate)
    return EXIT_OK


def build_parser() -> Parser:
    """Argument grammar of the `simtile` command."""
    parser = Parser(prog="simtile", description="Tilings with tiles similar to the whole body")
    parser.add_argument("--log-level", type=str, help="Log level (default: SIMTILE_LOG_LEVEL or WARNING)")
    parser.add_argument("--log-format", choices=["console", "json"], help="Log format on stderr")
    parser.add_argument("--workers", type=int, default=1, help="Threads for sample loops (default: 1)")
    parser.add_argument("--progress", action="store_true", help="Show progress bars on stderr")
    commands = parser.add_subparsers(dest="command", required=True, parser_class=Parser)

    sub = commands.add_parser("example", help="Write an example tiling")
    sub.add_argument("kind", choices=EXAMPLE_CHOICES)
    sub.add_argument("--dim", type=int)
    sub.add_argument("--corner", type=str, help="Cube corner as 0/1 list, e.g. 1,0")
    sub.add_argument("-o", "--output", type=str)
    sub.set_defaults(handler=cmd_example)

    sub = commands.add_parser("validate", help="Monte Carlo cover check")
    sub.add_argument("path")
    sub.add_argument("--samples", type=int, default=DEFAULT_SAMPLES)
    sub.add_argument("--seed", type=int, default=DEFAULT_SEED)
    sub.add_argument("--volume-gap", type=float, default=Thresholds().volume_gap)
    sub.add_argument("--overlap", type=float, default=Thresholds().overlap)
    sub.set_defaults(handler=cmd_validate)

    sub = commands.add_parser("iterate", help="Replace a similar tile by the image of a tiling")
    sub.add_argument("path")
    sub.add_argument("--tile", type=int, required=True)
    sub.add_argument("--pattern", type=str, help="Tiling nested into the tile (default: the input)")
    sub.add_argument("-o", "--output", type=str)
    sub.set_defaults(handler=cmd_iterate)

    sub = commands.add_parser("meet", help="Pairwise intersections of two tilings")
    sub.add_argument("left")
    sub.add_argument("right")
    sub.add_argument("--seed", type=int, default=DEFAULT_SEED)
    sub.add_argument("-o", "--output", type=str)
    sub.set_defaults(handler=cmd_meet)

    sub = commands.add_parser("normalize", help="Turn a similar tile into a homothetic one")
    sub.add_argument("path")
    sub.add_argument("--tile", type=int, required=True)
    sub.add_argument("--eps-max", type=float, default=DEFAULT_EPS_MAX)
    sub.add_argument("--probes", type=int, default=DEFAULT_PROBES)
    sub.add_argument("--align-rotation", type=float)
    sub.add_argument("--seed", type=int, default=DEFAULT_SEED)
    sub.add_argument("-o", "--output", type=str)
    sub.set_defaults(handler=cmd_normalize)

    sub = commands.add_parser("move-fixpoint", help="Move a homothetic tile's fixed point")
    sub.add_argument("paths", nargs="+")
    sub.add_argument("--target", type=parse_floats, required=True)
    sub.add_argument("--eps", type=float, required=True)
    sub.add_argument("--max-steps", type=int, default=DEFAULT_MAX_STEPS)
    sub.add_argument("-o", "--output", type=str)
    sub.set_defaults(handler=cmd_move_fixpoint)

    sub = commands.add_parser("tip-simplex", help="Fixed points of the designated similar tiles")
    sub.add_argument("paths", nargs="+")
    sub.add_argument("--tags", type=parse_ints, help="Tile index per tiling (default: first tagged)")
    sub.add_argument("--require-nondegenerate", action="store_true")
    sub.set_defaults(handler=cmd_tip_simplex)

    sub = commands.add_parser("slice", help="Induced tiling on a hyperplane")
    sub.add_argument("path")
    sub.add_argument("--normal", type=parse_floats, required=True)
    sub.add_argument("--offset", type=float, required=True)
    sub.add_argument("--samples", type=int, default=DEFAULT_SLICE_SAMPLES)
    sub.add_argument("--seed", type=int, default=DEFAULT_SEED)
    sub.add_argument("--cloud", type=str, help="CSV file for boundary samples of the slice tiles")
    sub.add_argument("--resolution", type=int, default=256)
    sub.add_argument("-o", "--output", type=str)
    sub.set_defaults(handler=cmd_slice)

    sub = commands.add_parser("extremal", help="Estimate the extremal-point count of a body")
    sub.add_argument("path")
    sub.add_argument("--tile", type=int, help="Tile index (default: the ambient body)")
    sub.add_argument("--directions", type=int, required=True)
    sub.add_argument("--delta", type=float, required=True)
    sub.add_argument("--seed", type=int, default=DEFAULT_SEED)
    sub.set_defaults(handler=cmd_extremal)

    return parser


def run(argv: Optional[Sequence[str]] = None) -> int:
    """
    Run one command

    Args:
        argv: Arguments without the program name (default: sys.argv[1:])

    Returns:
        Exit code 0, 1 or 2
    """
    try:
        args = build_parser().parse_args(argv)
    except UsageError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_ERROR

    setup_logging(args.log_level, args.log_format)
    handler: Callable[[argparse.Namespace], int] = args.handler
    try:
        return handler(args)
    except (EmptySlice, DegenerateSlice) as exc:
        logger.warning("slice_failed", command=args.command, error=str(exc))
        print(f"simtile {args.command}: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except (SimtileError, ValidationError, IndexError, OSError) as exc:
        logger.error("command_failed", command=args.command, error=type(exc).__name__)
        print(f"simtile {args.command}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_ERROR


def main():
    """Console entry point."""
    sys.exit(run())


if __name__ == "__main__":
    main()
