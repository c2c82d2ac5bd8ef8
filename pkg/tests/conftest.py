import numpy as np
import pytest

from hybridplace import CostParams, SbaGraph


@pytest.fixture
def path3():
    """Three-node path 0-1-2, hosting (10, 20, 30), rates 5 and 7."""
    return SbaGraph.from_arrays([10, 20, 30], [(0, 1, 5.0), (1, 2, 7.0)])


@pytest.fixture
def path3_params():
    return CostParams(alpha=1, beta1=2, beta2=3)


@pytest.fixture
def bank_graph():
    """Bank account opening example: services 0 and 1 (hosting 12 and 45) go
    public, joined by a rate-5 edge; they talk to private services over
    edges of rate 17.5 and 10; one private-private edge costs nothing."""
    return SbaGraph.from_arrays(
        [12, 45, 8, 20, 15],
        [(0, 1, 5.0), (0, 2, 17.5), (1, 3, 10.0), (2, 3, 3.0), (3, 4, 6.5)],
    )


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    from helpers import CRITERIA

    if CRITERIA:
        terminalreporter.section("acceptance criteria")
        for line in CRITERIA:
            terminalreporter.write_line(line)
