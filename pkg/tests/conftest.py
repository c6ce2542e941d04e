import math

import pytest

from recoilspec import PulseParams

TWO_PI = 2.0 * math.pi


@pytest.fixture(scope="session")
def dipole_pulse() -> PulseParams:
    """Short-pulse dipole-transition scenario used throughout the tests."""
    return PulseParams(rabi=TWO_PI * 5.6e6,
                       linewidth=TWO_PI * 34e6,
                       detuning=TWO_PI * 17e6,
                       lamb_dicke=0.108,
                       mode_freq=TWO_PI * 1.92e6,
                       pulse_duration=50e-9)
