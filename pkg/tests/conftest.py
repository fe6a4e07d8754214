"""Shared fixtures: src on the path, seeded generators, bundled scenarios."""

import sys
from pathlib import Path

import numpy as np
import pytest

ROOT = Path(__file__).parent.parent
sys.path.insert(0, str(ROOT / 'src'))

import verification  # noqa: E402
from currents import build_two_level  # noqa: E402

DATA_DIR = ROOT / 'data'


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


@pytest.fixture
def random_hermitian(rng):
    return lambda d: verification.random_hermitian(d, rng)


@pytest.fixture
def random_density(rng):
    return lambda d: verification.random_density(d, rng)


@pytest.fixture
def random_unitary(rng):
    return lambda d: verification.random_unitary(d, rng)


@pytest.fixture
def benchmark_model():
    """eps = 1, mu = 0.3, lambda = 0.1, delta = 0.05"""
    return build_two_level(1.0, 0.3, 0.1, 0.05)


@pytest.fixture
def two_level_path():
    return DATA_DIR / 'two_level.json'


@pytest.fixture
def three_level_path():
    return DATA_DIR / 'three_level.json'


@pytest.fixture
def energy_basis_path():
    return DATA_DIR / 'energy_basis.json'
