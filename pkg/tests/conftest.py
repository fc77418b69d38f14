import numpy as np
import pytest

from stlsq.numkernel import pseudo_inverse_apply

# lines reported by the acceptance suite, printed after the run
ACCEPTANCE_LINES = []


def random_instance(rng, m_range=(8, 30), n_range=(4, 12), noise=0.05):
    """Random full-rank sparse-recovery instance with a lambda giving S0 != {}.

    Returns ``(A, b, lam)``. About half the coefficients of the generating
    vector are zero; lambda is drawn between the smallest and largest
    magnitudes of the least-squares start so that thresholding has work to do.
    """
    n = int(rng.integers(n_range[0], n_range[1] + 1))
    m = int(rng.integers(max(n, m_range[0]), m_range[1] + 1))
    A = rng.standard_normal((m, n))
    x = rng.standard_normal(n) * 2.0
    x[rng.random(n) < 0.5] = 0.0
    b = A @ x + noise * rng.standard_normal(m)
    x0 = np.abs(pseudo_inverse_apply(A, b))
    lam = float(rng.uniform(x0.min(), x0.max()))
    if lam <= 0:
        lam = float(x0.max())
    return A, b, lam


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
