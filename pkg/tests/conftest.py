import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from devlab.iet import LabeledPermutation  # noqa: E402


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


@pytest.fixture
def rotation_perm():
    return LabeledPermutation.parse("AB/BA")


@pytest.fixture
def h2_perm():
    return LabeledPermutation.parse("ABCD/DCBA")


@pytest.fixture
def h11_perm():
    return LabeledPermutation.parse("ABCDE/EDCBA")
