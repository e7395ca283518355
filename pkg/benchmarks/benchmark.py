#!/usr/bin/env python
"""
Workload Benchmark Tool

Times simtile workloads over repeated runs and records what each run
produced (cover verdicts, cluster counts, fixed-point errors) next to the
timings.
"""

import time
from datetime import datetime
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Union

import pandas as pd
from tqdm import tqdm

from simtile.serialization import dumps


class BenchmarkResult:
    """Timings and outcomes of one workload."""

    def __init__(self, workload: str, params: Dict[str, Any], repeats: int):
        self.workload = workload
        self.params = params
        self.repeats = repeats
        self.runs: List[Dict[str, Any]] = []
        self.start_time = time.time()
        self.end_time: Optional[float] = None

    def add_run(self, elapsed: float, outcome: Dict[str, Any], success: bool):
        """Add one timed run."""
        self.runs.append({"elapsed_ms": elapsed * 1000, "outcome": outcome, "success": success})

    def complete(self):
        self.end_time = time.time()

    @property
    def total_time(self) -> float:
        """Wall time of the whole workload in seconds."""
        if self.end_time is None:
            return time.time() - self.start_time
        return self.end_time - self.start_time

    @property
    def successful_runs(self) -> int:
        return sum(1 for r in self.runs if r["success"])

    @property
    def failed_runs(self) -> int:
        return len(self.runs) - self.successful_runs

    @property
    def avg_run_time(self) -> float:
        """Mean run time in milliseconds."""
        if not self.runs:
            return 0
        return sum(r["elapsed_ms"] for r in self.runs) / len(self.runs)

    @property
    def p95_run_time(self) -> float:
        """95th percentile run time in milliseconds."""
        if not self.runs:
            return 0
        return sorted(r["elapsed_ms"] for r in self.runs)[int(len(self.runs) * 0.95)]

    @property
    def last_outcome(self) -> Dict[str, Any]:
        return self.runs[-1]["outcome"] if self.runs else {}

    def to_dict(self) -> Dict[str, Any]:
        return {
            "workload": self.workload,
            "params": self.params,
            "repeats": self.repeats,
            "successful_runs": self.successful_runs,
            "failed_runs": self.failed_runs,
            "total_time_seconds": self.total_time,
            "avg_run_time_ms": self.avg_run_time,
            "p95_run_time_ms": self.p95_run_time,
            "outcome": self.last_outcome,
            "timestamp": datetime.now().isoformat(),
        }

    def __str__(self) -> str:
        return (
            f"Benchmark Results for: {self.workload}\n"
            f"Params: {self.params}\n"
            f"Runs: {len(self.runs)} ({self.failed_runs} failed)\n"
            f"Total Time: {self.total_time:.2f} seconds\n"
            f"Average Run Time: {self.avg_run_time:.2f} ms\n"
            f"95th Percentile Run Time: {self.p95_run_time:.2f} ms\n"
            f"Outcome: {self.last_outcome}\n"
        )


def benchmark_workload(
    workload: str,
    fn: Callable[..., Dict[str, Any]],
    params: Dict[str, Any],
    repeats: int,
    progress: bool = True,
) -> BenchmarkResult:
    """
    Time a workload function over repeated runs

    Args:
        workload: Workload name
        fn: Function returning an outcome dict with an "ok" flag
        params: Keyword arguments for fn
        repeats: Number of runs
        progress: Show a progress bar

    Returns:
        BenchmarkResult with one entry per run
    """
    result = BenchmarkResult(workload, params, repeats)
    for _ in tqdm(range(repeats), desc=f"Benchmarking {workload}", disable=not progress):
        start = time.perf_counter()
        try:
            outcome = fn(**params)
            success = bool(outcome.get("ok", True))
        except Exception as exc:
            outcome, success = {"error": f"{type(exc).__name__}: {exc}"}, False
        result.add_run(time.perf_counter() - start, outcome, success)
    result.complete()
    return result


def save_results(results: Union[BenchmarkResult, List[BenchmarkResult]], output_dir: str = "results") -> Dict[str, Path]:
    """
    Save benchmark results as JSON and CSV

    Args:
        results: A single BenchmarkResult or a list of them
        output_dir: Directory to save results

    Returns:
        Paths of the written files by format
    """
    Path(output_dir).mkdir(parents=True, exist_ok=True)
    timestamp = datetime.now().strftime("%Y%m%d_%H%M%S")
    if not isinstance(results, list):
        results = [results]

    records = [r.to_dict() for r in results]
    json_path = Path(output_dir) / f"benchmark_{timestamp}.json"
    json_path.write_bytes(dumps(records))

    # Outcome dicts are flattened into outcome.* columns
    df = pd.json_normalize(records)
    csv_path = Path(output_dir) / f"benchmark_{timestamp}.csv"
    df.to_csv(csv_path, index=False)
    return {"json": json_path, "csv": csv_path}
