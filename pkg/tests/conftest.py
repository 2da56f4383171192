import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from floydlab.group_models import Free, FreeAbelian, cayley_ball_labeled


@pytest.fixture(scope="session")
def z2_small():
    """FreeAbelian(2) ball of radius 8 with its element labels."""
    return cayley_ball_labeled(FreeAbelian(2), 8)


@pytest.fixture(scope="session")
def z2_mid():
    """FreeAbelian(2) ball of radius 16 with its element labels."""
    return cayley_ball_labeled(FreeAbelian(2), 16)


@pytest.fixture(scope="session")
def f2_small():
    """Free(2) ball of radius 6 with its element labels."""
    return cayley_ball_labeled(Free(2), 6)
