#!/usr/bin/env python
"""
Workload Benchmarks Runner

Runs a single workload or all of them and writes per-workload results plus
JSON and CSV summaries to a timestamped reports directory.

Usage: python -m benchmarks.run [--workload NAME] [--repeats N]
"""

import argparse
import os
import sys
import time
from datetime import datetime
from pathlib import Path
from typing import Any, Dict

from benchmarks.benchmark import BenchmarkResult, benchmark_workload, save_results
from benchmarks.workloads import WORKLOADS
from simtile.log import setup_logging
from simtile.serialization import dumps

# Worker threads for the sampling workloads, from environment or default
BENCHMARK_WORKERS = int(os.environ.get("SIMTILE_BENCHMARK_WORKERS", "1"))

# Workloads that take a workers argument
THREADED = {"cone-validation"}


def generate_output_dir(prefix: str = "benchmark") -> str:
    """
    Create and return the path to the output directory

    Args:
        prefix: Prefix for the output directory name

    Returns:
        Path to the output directory
    """
    reports_dir = Path("reports")
    reports_dir.mkdir(exist_ok=True)

    timestamp = datetime.now().strftime("%Y%m%d_%H%M%S")
    run_dir = reports_dir / f"{prefix}_run_{timestamp}"
    run_dir.mkdir(exist_ok=True)

    return str(run_dir)


def run_single_benchmark(workload: str, repeats: int, workers: int, output_dir: str) -> BenchmarkResult:
    """
    Run a single workload

    Args:
        workload: Name of the workload
        repeats: Number of timed runs
        workers: Threads for sampling workloads
        output_dir: Directory to save results

    Returns:
        BenchmarkResult of the workload
    """
    print(f"\n{'=' * 80}")
    print(f"Running benchmark: {workload}")
    print(f"{'-' * 80}")

    start_time = time.time()
    params: Dict[str, Any] = {"workers": workers} if workload in THREADED else {}
    result = benchmark_workload(workload, WORKLOADS[workload], params, repeats)

    output_file = Path(output_dir) / f"{workload}_results.json"
    output_file.write_bytes(dumps(result.to_dict()))

    elapsed = time.time() - start_time
    print(f"Benchmark completed in {elapsed:.2f} seconds")
    return result


def run_all_benchmarks(repeats: int, workers: int, output_dir: str) -> Dict[str, BenchmarkResult]:
    """Run every workload in WORKLOADS order."""
    print(f"Results will be saved to {output_dir}")
    print(f"Running with {repeats} repeats and {workers} workers")
    return {name: run_single_benchmark(name, repeats, workers, output_dir) for name in WORKLOADS}


def print_summary(results: Dict[str, BenchmarkResult]):
    """
    Print a summary of benchmark results

    Args:
        results: Results by workload name
    """
    print(f"\n{'=' * 80}")
    print("Benchmark Summary:")
    print(f"{'-' * 80}")

    for workload, result in results.items():
        status = "ok" if result.failed_runs == 0 else f"{result.failed_runs} FAILED"
        print(f"{workload}: {status}")
        print(f"  - Average run time: {result.avg_run_time:.2f} ms")
        print(f"  - 95th percentile: {result.p95_run_time:.2f} ms")
        if "error" in result.last_outcome:
            print(f"  - Last error: {result.last_outcome['error']}")


def main(argv=None) -> int:
    """Main entry point"""
    parser = argparse.ArgumentParser(
        description="simtile Workload Benchmarks Runner",
        formatter_class=argparse.RawTextHelpFormatter,
    )
    parser.add_argument(
        "--workload",
        type=str,
        choices=list(WORKLOADS.keys()),
        help="Specific workload to benchmark. If not provided, all workloads will be benchmarked.\n"
        "Available workloads:\n" + "\n".join(f"  - {w}" for w in WORKLOADS.keys()),
    )
    parser.add_argument("--repeats", type=int, default=3, help="Timed runs per workload (default: 3)")
    parser.add_argument(
        "--workers",
        type=int,
        default=BENCHMARK_WORKERS,
        help=f"Threads for sampling workloads (default: {BENCHMARK_WORKERS})",
    )
    parser.add_argument("--output-dir", type=str, help="Directory to save results (default: auto-generated)")
    parser.add_argument("--log-level", type=str, default="WARNING", help="simtile log level")

    args = parser.parse_args(argv)
    setup_logging(args.log_level)

    output_dir = args.output_dir or generate_output_dir("single" if args.workload else "all")
    Path(output_dir).mkdir(parents=True, exist_ok=True)

    if args.workload:
        results = {args.workload: run_single_benchmark(args.workload, args.repeats, args.workers, output_dir)}
    else:
        results = run_all_benchmarks(args.repeats, args.workers, output_dir)

    print_summary(results)
    paths = save_results(list(results.values()), output_dir)

    print(f"\nDetailed results saved to {output_dir} ({paths['csv'].name})")
    print(f"{'=' * 80}")
    return 0 if all(r.failed_runs == 0 for r in results.values()) else 1


if __name__ == "__main__":
    sys.exit(main())
