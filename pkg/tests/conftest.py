import pytest

import ringcav as rc


@pytest.fixture(scope="session")
def baseline():
    p = rc.baseline_params()
    return p, rc.derive_params(p)
