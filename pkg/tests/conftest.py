import sys
from pathlib import Path

import numpy as np
import pytest

# Add src to path for imports
sys.path.insert(0, str(Path(__file__).resolve().parents[1] / 'src'))


def pytest_configure(config):
    config.addinivalue_line('markers', 'slow: full-scale checks against published figures')


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def random_hermitian(rng, n, scale=1.0, real=False):
    a = rng.normal(size=(n, n))
    if not real:
        a = a + 1j * rng.normal(size=(n, n))
    return scale * 0.5 * (a + a.conj().T)


def random_correlation_matrix(rng, n):
    """Random Hermitian matrix with spectrum strictly inside (0, 1)."""
    q, _ = np.linalg.qr(rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n)))
    occupations = rng.uniform(0.05, 0.95, size=n)
    return (q * occupations) @ q.conj().T
