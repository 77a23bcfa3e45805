"""
Shared fixtures for the lab tests
"""

import os
import sys

import numpy as np
import pytest

# Allow importing bergman_lab when pytest is run from the project root
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), "..")))

from bergman_lab.models import Configuration, GafSpec  # noqa: E402
from bergman_lab.sampler import sample_gaf  # noqa: E402


@pytest.fixture
def disk_config():
    """A hand-placed configuration in the window B(o, 3)"""
    return Configuration(
        points=[[0.1 + 0.2j], [-0.3j], [0.5 + 0j], [0.2 - 0.6j], [-0.7 + 0.1j]],
        dimension=1, window_radius=3.0, seed=11, generator="gaf",
    )


@pytest.fixture
def ball_config():
    """A hand-placed configuration in the ball of C^2"""
    return Configuration(
        points=[[0.1 + 0.1j, -0.2j], [0.5 + 0j, 0.3 + 0.2j], [-0.4j, 0.6 + 0j], [0.2 - 0.1j, -0.3 + 0j]],
        dimension=2, window_radius=3.5, seed=3, generator="hkpv",
    )


@pytest.fixture(scope="session")
def gaf_sample():
    return sample_gaf(GafSpec(window_radius=2.0), seed=5)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
