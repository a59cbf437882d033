"""Seeded generators for the Läuchli, monomial and glued test families.

Every generator builds the matrix in binary64 and rounds it once to the
requested working precision.
"""

from dataclasses import dataclass

import numpy as np

from .densela import frobenius_norm, gemm, random_orthonormal
from .precision import round_to

__all__ = [
    "LaeuchliParams",
    "MonomialParams",
    "GluedParams",
    "laeuchli",
    "monomial",
    "glued",
    "generate",
    "monomial_eigenvalues",
]


def _check_partition(m, p, s, need_rows):
    if min(m, p, s) < 1:
        raise ValueError(f"m, p, s must be positive, got m={m}, p={p}, s={s}")
    if need_rows > m:
        raise ValueError(f"{need_rows} rows needed but m={m}")


@dataclass(frozen=True)
class LaeuchliParams:
    m: int
    p: int
    s: int
    eta: float

    family = "laeuchli"

    def __post_init__(self):
        _check_partition(self.m, self.p, self.s, self.p * self.s + 1)
        if not 0 < self.eta < 1:
            raise ValueError(f"eta must lie in (0, 1), got {self.eta}")

    @property
    def sweep_param(self):
        return self.eta

    @property
    def seed(self):
        return 0


@dataclass(frozen=True)
class MonomialParams:
    m: int
    p: int
    s: int
    seed: int = 0

    family = "monomial"

    def __post_init__(self):
        _check_partition(self.m, self.p, self.s, self.p * self.s)

    @property
    def sweep_param(self):
        return float(self.s)


@dataclass(frozen=True)
class GluedParams:
    m: int
    p: int
    s: int
    c1: float
    c2: float
    seed: int = 0
    svec: float = None

    family = "glued"

    def __post_init__(self):
        _check_partition(self.m, self.p, self.s, self.p * self.s)
        if self.c1 < 0 or self.c2 < 0:
            raise ValueError(f"c1, c2 must be nonnegative, got {self.c1}, {self.c2}")

    @classmethod
    def from_svec(cls, m, p, s, svec, seed=0):
        return cls(m, p, s, svec / 2, svec / 2, seed, float(svec))

    @property
    def sweep_param(self):
        return self.svec if self.svec is not None else self.c1 + self.c2


def laeuchli(params, working=np.float32):
    """Row of ones on top of ``eta * I``, zero-padded to ``m`` rows."""
    n = params.p * params.s
    x = np.zeros((params.m, n))
    x[0, :] = 1.0
    x[1 + np.arange(n), np.arange(n)] = params.eta
    return round_to(x, working)


def monomial_eigenvalues(m):
    """``m`` evenly spaced points in (0.1, 10), half a step in from each end."""
    return 0.1 + (np.arange(1, m + 1) - 0.5) * 9.9 / m


def monomial(params, working=np.float32):
    """Blocks ``[v, A v, ..., A^(s-1) v]`` for diagonal ``A`` and random unit ``v``."""
    m, p, s = params.m, params.p, params.s
    lam = monomial_eigenvalues(m)
    rng = np.random.default_rng(params.seed)
    x = np.empty((m, p * s))
    for k in range(p):
        v = rng.uniform(0.0, 1.0, m)
        v /= frobenius_norm(v)
        for j in range(s):
            x[:, k * s + j] = v
            v = lam * v
    return round_to(x, working)


def glued(params, working=np.float32):
    """Scaled near-copies of one base block glued together.

    The base ``B = U diag(logspace(0, -c1, s)) V^T`` has condition 10**c1
    and is block 1. Block j > 1 is ``(B + 10**-c2 E_j) * 10**(-c2 (j-1)/(p-1))``
    with ``E_j`` a random m-by-s matrix of unit Frobenius norm, so all blocks
    are nearly dependent and the global condition number grows with c1 + c2.
    """
    m, p, s = params.m, params.p, params.s
    u = random_orthonormal(m, s, params.seed)
    v = random_orthonormal(s, s, params.seed + 1)
    base = gemm(u * np.logspace(0, -params.c1, s), v, trans_b=True)
    rng = np.random.default_rng(params.seed + 2)
    glue = 10.0 ** -params.c2
    x = np.empty((m, p * s))
    x[:, :s] = base
    for j in range(1, p):
        e = rng.standard_normal((m, s))
        e /= frobenius_norm(e)
        scale = 10.0 ** (-params.c2 * j / (p - 1))
        x[:, j * s:(j + 1) * s] = (base + glue * e) * scale
    return round_to(x, working)


_GENERATORS = {
    "laeuchli": laeuchli,
    "monomial": monomial,
    "glued": glued,
}


def generate(params, working=np.float32):
    return _GENERATORS[params.family](params, working)
