"""
Configuration and fixtures for benchmark tests.
"""
import pytest

from benchmarks.benchmark import BenchmarkResult


@pytest.fixture
def sample_result():
    """
    Fixture that provides a completed result with two good runs and one failure.
    """
    result = BenchmarkResult("tip-simplex", {"n": 5}, 3)
    result.add_run(0.1, {"ok": True, "affine_dim": 2}, True)
    result.add_run(0.2, {"ok": True, "affine_dim": 2}, True)
    result.add_run(0.3, {"error": "PreconditionError: boom"}, False)
    result.complete()
    return result
