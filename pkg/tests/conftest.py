import numpy as np
import pytest

from estlab.matkernel import SymMatrix


def random_spd(dim: int, seed: int, cond_lo: float = 0.1, cond_hi: float = 10.0) -> SymMatrix:
    """Random SPD matrix O @ D @ O.T with log-uniform positive eigenvalues."""
    rng = np.random.default_rng(seed)
    q, _ = np.linalg.qr(rng.normal(size=(dim, dim)))
    d = np.exp(rng.uniform(np.log(cond_lo), np.log(cond_hi), size=dim))
    return SymMatrix((q * d) @ q.T)


@pytest.fixture
def spd_factory():
    return random_spd
