"""
Test configuration and fixtures for the simtile tests.
"""
from pathlib import Path

import numpy as np
import pytest

from simtile.examples import (
    FIXTURES_DIR,
    cone_spindle_tiling,
    orthant_tiling,
    quarter_square_tiling,
    rotated_similar_tile_fixture,
    single_tile_tiling,
)
from simtile.geometry.bodies import Polytope
from simtile.geometry.sampling import TEST_STREAM, stream


@pytest.fixture
def rng():
    """Seeded generator for test data."""
    return stream(2024, TEST_STREAM)


@pytest.fixture
def unit_square():
    return Polytope.box(np.zeros(2), np.ones(2))


@pytest.fixture
def quarter_00():
    return quarter_square_tiling((0, 0))


@pytest.fixture
def quarter_11():
    return quarter_square_tiling((1, 1))


@pytest.fixture
def rotated_fixture():
    return rotated_similar_tile_fixture()


@pytest.fixture
def single_tile():
    return single_tile_tiling()


@pytest.fixture
def orthant_pair():
    """3-D cube tilings tagged at the opposite corners (0,0,0) and (1,1,1)."""
    return orthant_tiling(3, (0, 0, 0)), orthant_tiling(3, (1, 1, 1))


@pytest.fixture(scope="session")
def cone_spindles():
    """cone_spindle_tiling(n) for n = 3..6, built once."""
    return {n: cone_spindle_tiling(n) for n in (3, 4, 5, 6)}


@pytest.fixture
def fixtures_dir() -> Path:
    return FIXTURES_DIR
