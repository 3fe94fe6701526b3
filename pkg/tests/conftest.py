import logging

import numpy as np
import pytest

from rffboot.cli.database import ExperimentRow, ExperimentRun  # noqa: F401
from rffboot.database import database, session
from rffboot.datasets.module import gen_swiss_roll
from rffboot.kernels.enums import KernelFamily
from rffboot.kernels.module import Kernel
from rffboot.logger import ROOT_NAME


@pytest.fixture(autouse=True)
def detach_log_handlers():
    """Handlers installed by the CLI hold the stream of the test that made them."""
    yield
    root = logging.getLogger(ROOT_NAME)
    for handler in list(root.handlers):
        root.removeHandler(handler)


@pytest.fixture
def rng():
    return np.random.default_rng(20240607)


@pytest.fixture
def gaussian():
    return Kernel(KernelFamily.GAUSSIAN, 1.0)


@pytest.fixture(params=list(KernelFamily), ids=lambda family: family.value)
def kernel(request):
    return Kernel(request.param, 2.0)


@pytest.fixture
def swiss_roll():
    return gen_swiss_roll(120, np.random.default_rng(7))


@pytest.fixture
def memory_db():
    """In-memory history database, emptied after the test."""
    url = "sqlite://"
    database.connect(url)
    yield url
    session.remove()
    database.base.metadata.drop_all(database.db)
