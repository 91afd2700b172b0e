import numpy as np
import pytest

from pvmodels.linalg import make_space
from pvmodels.model import Model0, constant_curvature_model, direct_sum, tensor_from_components


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def euclid3():
    return make_space(0, 3)


@pytest.fixture
def non_pv_model(euclid3):
    """Ricci = diag(3, 1, 2) with curvature coupling the eigenlines."""
    t = tensor_from_components(3, [(0, 1, 1, 0, 1.0), (0, 2, 2, 0, 2.0)])
    return Model0(euclid3, t)


@pytest.fixture
def two_block_model():
    return direct_sum(constant_curvature_model(make_space(0, 2), 1.0), constant_curvature_model(make_space(0, 2), 2.0))


def pytest_terminal_summary(terminalreporter):
    import acceptance_log

    if acceptance_log.LINES:
        terminalreporter.section("acceptance criteria")
        for line in acceptance_log.LINES:
            terminalreporter.write_line(line)
