import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from besimc import HalfNormalParams, RandomStream  # noqa: E402


@pytest.fixture
def hn10_4():
    return HalfNormalParams(10.0, 4.0)


@pytest.fixture
def rng():
    return np.random.default_rng(20240917)


@pytest.fixture
def stream():
    return RandomStream(987654321, 3)
