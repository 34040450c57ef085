"""Shared fixtures and collection ordering.

The acceptance module sweeps the full perturbed fleet at two grids and runs
for hours on one core, so it is collected last; unit failures then surface
within the first few minutes of a full run.
"""

import pytest

from tkhodge import geometry
from tkhodge.config import SolverOptions


def pytest_collection_modifyitems(config, items):
    items.sort(key=lambda item: item.fspath.basename == "test_acceptance.py")


@pytest.fixture(scope="session")
def opts():
    return SolverOptions()


@pytest.fixture(scope="session")
def flat8():
    # session-scoped so the per-structure operator caches are shared
    return geometry.make_flat_structure(8)


@pytest.fixture(scope="session")
def pert8():
    return geometry.make_perturbed_structure(8, seed=3, amplitude=0.3)
