import os
import sys
import warnings

import pytest
from hypothesis import settings

sys.path.insert(0, os.path.dirname(__file__))

settings.register_profile("repo", deadline=None, derandomize=True, max_examples=25)
settings.load_profile("repo")


@pytest.fixture
def quiet():
    """Silence the SQUID-length warning in regimes that deliberately exceed it."""
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", UserWarning)
        yield


@pytest.fixture(scope="session")
def squid_constants():
    from cavitysim.constants import PhysicalConstants

    return PhysicalConstants().with_delta_L_min(0.0075e-3)
