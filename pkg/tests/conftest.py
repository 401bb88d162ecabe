"""Shared fixtures: one moderately expensive kernel set per session."""

import numpy as np
import pytest

from anngf.perturbation import (homogenized_matrix, moment_model,
                                perturbation_kernel, walk_kernel)
from anngf.quadrature import GreenEvaluator, QuadratureConfig


@pytest.fixture(scope="session")
def rad_kernel():
    return perturbation_kernel(moment_model("rademacher"), 0.15)


@pytest.fixture(scope="session")
def rad_walk(rad_kernel):
    return walk_kernel(rad_kernel)


@pytest.fixture(scope="session")
def rad_hom(rad_kernel):
    return homogenized_matrix(rad_kernel)


@pytest.fixture(scope="session")
def free_hom():
    return homogenized_matrix(None, 3)


@pytest.fixture(scope="session")
def ev64(rad_kernel):
    return GreenEvaluator(rad_kernel, 3, QuadratureConfig(resolution=64))


@pytest.fixture(scope="session")
def free_ev64():
    return GreenEvaluator(None, 3, QuadratureConfig(resolution=64))


@pytest.fixture()
def rng():
    return np.random.default_rng(42)
