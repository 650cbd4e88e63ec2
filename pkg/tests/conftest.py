import numpy as np
import pytest

ACCEPTANCE_LINES = []


def record_acceptance(number, name, passed, detail):
    line = f"[criterion {number}] {'PASS' if passed else 'FAIL'} {name}: {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    return passed


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)


def inverse_iteration_residual(m, lam, seed=0):
    """Independent residual check: one step of inverse iteration with numpy's solver.

    Returns ||(M - lam) v|| for a unit v; an upper bound on sigma_min(M - lam).
    """
    n = m.shape[0]
    shifted = m - lam * np.eye(n)
    b = np.random.default_rng(seed).normal(size=n) + 0j
    b /= np.linalg.norm(b)
    try:
        x = np.linalg.solve(shifted, b)
    except np.linalg.LinAlgError:
        return 0.0
    if not np.all(np.isfinite(x)):
        return 0.0
    v = x / np.linalg.norm(x)
    return float(np.linalg.norm(shifted @ v))


@pytest.fixture
def np_rng():
    return np.random.default_rng(12345)


def random_complex(rng, *shape):
    return rng.normal(size=shape) + 1j * rng.normal(size=shape)
