import numpy as np
import pytest

from capkm.model import Instance

# lines collected by the acceptance suite, echoed in the terminal summary
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def line_metric(pos) -> np.ndarray:
    pos = np.asarray(pos, dtype=float)
    return np.abs(pos[:, None] - pos[None, :])


def plane_instance(n, seed, k=None, demand_max=5, slack=1.3) -> Instance:
    rng = np.random.default_rng(seed)
    pts = rng.random((n, 2))
    cost = np.linalg.norm(pts[:, None] - pts[None], axis=-1)
    d = rng.integers(1, demand_max + 1, n).astype(float)
    k = max(1, n // 3) if k is None else k
    return Instance(cost, d, d.sum() / k * slack, k)


@pytest.fixture
def two_far():
    """Two locations at distance 10 with unit demands."""
    return np.array([[0.0, 10.0], [10.0, 0.0]])


@pytest.fixture
def cluster_example():
    """Three locations: 0 and 2 are close, 1 is far from both."""
    return np.array([[0.0, 100.0, 1.0], [100.0, 0.0, 100.0], [1.0, 100.0, 0.0]])
