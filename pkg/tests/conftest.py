import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from fractal_xcorr import AlignedPair, TimeSeries


def gaussian_pair(seed, n, corr=0.0):
    rng = np.random.default_rng(seed)
    a = rng.standard_normal(n)
    b = corr * a + np.sqrt(1.0 - corr**2) * rng.standard_normal(n)
    return AlignedPair(TimeSeries(a, label="x"), TimeSeries(b, label="y"))


@pytest.fixture
def pair_200():
    return gaussian_pair(7, 200)


@pytest.fixture
def pair_1000():
    return gaussian_pair(11, 1000)
