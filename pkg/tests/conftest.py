import pytest

from pinned import (  # noqa: F401  (re-exported for the test modules)
    LOO_FOREST,
    SMALL_FOREST,
    SMALL_SYNTH,
    build_small_dataset,
    build_small_loo,
    build_small_sweep,
)
from xmtc.features import warm_up


@pytest.fixture(scope="session", autouse=True)
def _warm_kernels():
    # compile every numba kernel once so timed tests measure warm behaviour
    warm_up()


@pytest.fixture(scope="session")
def small_dataset():
    return build_small_dataset()


@pytest.fixture(scope="session")
def small_sweep(small_dataset):
    return build_small_sweep(small_dataset)
