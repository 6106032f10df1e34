import math

import pytest

from vc_twist.kinematics import MediumModel, total_energy


@pytest.fixture
def water():
    return MediumModel.constant(1.33)


@pytest.fixture
def e300():
    """Total energy of a 300 keV electron."""
    return total_energy(300e3)


def deg(x):
    return math.radians(x)
