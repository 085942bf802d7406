import numpy as np
import pytest

from privshade.corpus import corpus


@pytest.fixture(scope="session")
def charts():
    """The default 24-chart corpus as ``{name: (image, ground_truth)}``."""
    return {name: (img, gt) for name, img, gt in corpus()}


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def pytest_terminal_summary(terminalreporter):
    import test_acceptance
    if not test_acceptance.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(test_acceptance.RESULTS):
        terminalreporter.write_line(test_acceptance.RESULTS[n])
