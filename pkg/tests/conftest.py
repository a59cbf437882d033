import numpy as np
import pytest

from blockgs.precision import F32F64

U32 = F32F64.working_unit_roundoff
U64 = F32F64.high_unit_roundoff


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def conditioned(m, n, kappa, seed, dtype=np.float32):
    """m x n matrix with singular values logspaced from 1 to 1/kappa."""
    from blockgs.densela import random_orthonormal

    u = random_orthonormal(m, n, seed)
    v = random_orthonormal(n, n, seed + 7919)
    sigma = np.logspace(0, -np.log10(kappa), n)
    return ((u * sigma) @ v.T).astype(dtype)
