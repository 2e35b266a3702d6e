import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from ctcompand.core import CompandParams
from ctcompand.phantom import mandible_phantom


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def default_params():
    return CompandParams()


@pytest.fixture(scope="session")
def phantom_slice():
    return mandible_phantom()
