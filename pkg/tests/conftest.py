import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "default", max_examples=60, deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def random_ball(rng, m, n, rmax=0.9):
    """Uniform-ish points of the ball of C^n with |z| <= rmax."""
    Z = rng.standard_normal((m, n)) + 1j * rng.standard_normal((m, n))
    Z /= np.linalg.norm(Z, axis=1, keepdims=True)
    return Z * (rmax * rng.uniform(size=(m, 1)) ** (1 / (2 * n)))


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
