"""Block classical Gram-Schmidt variants and their stability metrics.

All four variants factor ``X = Q R`` block column by block column. The
working precision is the dtype of ``X``; only :func:`bcgsi_plus_ls_mp`
touches a second precision.

Synchronization accounting: one event per full-height cross product
against committed basis vectors and one per IntraOrtho call. Cholesky
factorizations, triangular solves and s-by-s updates are local.
"""

from dataclasses import dataclass

import numpy as np

from .densela import BreakdownError, gemm, cholesky, solve_upper, householder_qr, two_norm, frobenius_norm
from .precision import F32F64, PrecisionPair

__all__ = [
    "BlockPartition",
    "BlockQR",
    "SyncCounter",
    "intra_ortho",
    "bcgs",
    "bcgsi_plus",
    "bcgsi_plus_ls",
    "bcgsi_plus_ls_mp",
    "loss_of_orthogonality",
    "qr_residual",
    "VARIANTS",
    "expected_sync_events",
    "run_variant",
]


@dataclass(frozen=True)
class BlockPartition:
    """``X = [X_1, ..., X_p]`` with ``m`` rows and ``s`` columns per block."""

    m: int
    p: int
    s: int

    def __post_init__(self):
        if min(self.m, self.p, self.s) < 1:
            raise ValueError(f"m, p, s must be positive, got {self}")
        if self.m < self.n:
            raise ValueError(f"need m >= n = p*s, got m={self.m}, n={self.n}")

    @property
    def n(self):
        return self.p * self.s

    @classmethod
    def of(cls, x, s):
        m, n = np.shape(x)
        if n % s:
            raise ValueError(f"{n} columns do not split into blocks of {s}")
        return cls(m, n // s, s)

    def block(self, k):
        """Column slice of block ``k`` (1-based)."""
        return slice((k - 1) * self.s, k * self.s)

    def upto(self, k):
        """Column slice of blocks ``1..k``."""
        return slice(0, k * self.s)

    def check(self, x):
        if np.shape(x) != (self.m, self.n):
            raise ValueError(f"matrix shape {np.shape(x)} does not match partition {self}")


@dataclass
class BlockQR:
    Q: np.ndarray
    R: np.ndarray
    sync_events: int
    variant: str


class SyncCounter:
    def __init__(self):
        self.count = 0

    def tick(self, n=1):
        self.count += n


def _working(x):
    x = np.asarray(x)
    if x.dtype not in (np.float32, np.float64):
        x = x.astype(np.float64)
    return np.asfortranarray(x)


def intra_ortho(x, counter=None):
    """Householder QR of a single panel; one synchronization."""
    q, r = householder_qr(x)
    if counter is not None:
        counter.tick()
    return q, r


def _run(fn, x, part, variant, *args):
    x = _working(x)
    part.check(x)
    counter = SyncCounter()
    try:
        q, r = fn(x, part, counter, *args)
    except BreakdownError as exc:
        exc.sync_events = counter.count
        exc.variant = variant
        raise
    return BlockQR(q, r, counter.count, variant)


def _intra(x, counter, block):
    try:
        return intra_ortho(x, counter)
    except BreakdownError as exc:
        exc.block = block
        raise


def _bcgs(x, part, counter):
    q = np.zeros_like(x)
    r = np.zeros((part.n, part.n), dtype=x.dtype, order="F")
    b1 = part.block(1)
    q[:, b1], r[b1, b1] = _intra(x[:, b1], counter, 1)
    for k in range(1, part.p):
        done, nxt = part.upto(k), part.block(k + 1)
        xk = x[:, nxt]
        proj = gemm(q[:, done], xk, trans_a=True)
        counter.tick()
        w = gemm(q[:, done], proj, subtract_from=xk)
        q[:, nxt], r[nxt, nxt] = _intra(w, counter, k + 1)
        r[done, nxt] = proj
    return q, r


def _bcgsi_plus(x, part, counter):
    q = np.zeros_like(x)
    r = np.zeros((part.n, part.n), dtype=x.dtype, order="F")
    b1 = part.block(1)
    q[:, b1], r[b1, b1] = _intra(x[:, b1], counter, 1)
    for k in range(1, part.p):
        done, nxt = part.upto(k), part.block(k + 1)
        qd = q[:, done]
        xk = x[:, nxt]
        r1 = gemm(qd, xk, trans_a=True)
        counter.tick()
        w = gemm(qd, r1, subtract_from=xk)
        qhat, r1_diag = _intra(w, counter, k + 1)
        r2 = gemm(qd, qhat, trans_a=True)
        counter.tick()
        w = gemm(qd, r2, subtract_from=qhat)
        q[:, nxt], r2_diag = _intra(w, counter, k + 1)
        r[done, nxt] = r1 + gemm(r2, r1_diag)
        r[nxt, nxt] = gemm(r2_diag, r1_diag)
    return q, r


def _gram_factor(g, block):
    g = (g + g.T) / 2
    try:
        return cholesky(g)
    except BreakdownError as exc:
        exc.block = block
        raise


def _bcgsi_plus_ls(x, part, counter, high):
    """Low-sync reorthogonalized BCGS.

    ``high`` is the dtype of the reductions, the Gram deflation, the
    Cholesky factors and the triangular solves. Q and R are stored in the
    working dtype of ``x``; R accumulations and the U update run there too.
    """
    work = x.dtype
    if part.p < 2:
        raise ValueError("low-sync variants need at least two blocks")

    def up(a):
        return np.asfortranarray(a, dtype=high)

    def down(a):
        return np.asfortranarray(a, dtype=work)

    s = part.s
    q = np.zeros_like(x)
    r = np.zeros((part.n, part.n), dtype=work, order="F")
    u = x[:, part.block(1)]
    for k in range(2, part.p + 1):
        cur, prev = part.block(k), part.block(k - 1)
        xk = x[:, cur]
        if k == 2:
            g = gemm(up(u), up(np.hstack([u, xk])), trans_a=True)
            counter.tick()
            gram, pmat = g[:, :s], g[:, s:]
        else:
            old = part.upto(k - 2)
            nold = (k - 2) * s
            g = gemm(up(np.hstack([q[:, old], u])), up(np.hstack([u, xk])), trans_a=True)
            counter.tick()
            w, z = g[:nold, :s], g[:nold, s:]
            omega, y = g[nold:, :s], g[nold:, s:]
            gram = gemm(w, w, trans_a=True, subtract_from=omega)
            pmat = gemm(w, z, trans_a=True, subtract_from=y)
        r_diag = _gram_factor(gram, k - 1)
        r[prev, cur] = down(solve_upper(r_diag, pmat, mode="left_transposed"))
        if k == 2:
            qk = solve_upper(r_diag, up(u), mode="right")
        else:
            r[old, prev] = r[old, prev] + down(w)
            r[old, cur] = down(z)
            qk = solve_upper(r_diag, gemm(up(q[:, old]), w, subtract_from=up(u)), mode="right")
        q[:, prev] = down(qk)
        r[prev, prev] = down(r_diag)
        done = part.upto(k - 1)
        u = gemm(q[:, done], r[done, cur], subtract_from=xk)

    p = part.p
    old, last = part.upto(p - 1), part.block(p)
    nold = (p - 1) * s
    g = gemm(up(np.hstack([q[:, old], u])), up(u), trans_a=True)
    counter.tick()
    w, omega = g[:nold, :], g[nold:, :]
    r_diag = _gram_factor(gemm(w, w, trans_a=True, subtract_from=omega), p)
    r[old, last] = r[old, last] + down(w)
    qk = solve_upper(r_diag, gemm(up(q[:, old]), w, subtract_from=up(u)), mode="right")
    q[:, last] = down(qk)
    r[last, last] = down(r_diag)
    return q, r


def bcgs(x, part):
    """Block classical Gram-Schmidt with Householder IntraOrtho."""
    return _run(_bcgs, x, part, "bcgs")


def bcgsi_plus(x, part):
    """BCGS with one full reorthogonalization pass per block."""
    return _run(_bcgsi_plus, x, part, "bcgsi+")


def bcgsi_plus_ls(x, part):
    """Low-synchronization BCGSI+: one fused reduction per block."""
    x = _working(x)
    return _run(_bcgsi_plus_ls, x, part, "bcgsi+ls", x.dtype)


def bcgsi_plus_ls_mp(x, part, pair: PrecisionPair = F32F64):
    """Mixed-precision low-sync BCGSI+.

    Same control flow as :func:`bcgsi_plus_ls`, but the fused reductions,
    Gram deflations, Cholesky factorizations and the solves that apply the
    inverse R factors run in ``pair.high``; results are rounded to
    ``pair.working`` when stored in Q and R.
    """
    x = _working(x)
    if x.dtype != pair.working:
        x = pair.round(x)
    return _run(_bcgsi_plus_ls, x, part, "bcgsi+ls-mp", np.dtype(pair.high))


VARIANTS = {
    "bcgs": bcgs,
    "bcgsi+": bcgsi_plus,
    "bcgsi+ls": bcgsi_plus_ls,
    "bcgsi+ls-mp": bcgsi_plus_ls_mp,
}


def expected_sync_events(variant, p):
    return {
        "bcgs": 2 * p - 1,
        "bcgsi+": 4 * p - 3,
        "bcgsi+ls": p,
        "bcgsi+ls-mp": p,
    }[variant]


def run_variant(name, x, part, pair: PrecisionPair = F32F64):
    """Run variant ``name`` on ``x`` in the working precision of ``pair``."""
    try:
        fn = VARIANTS[name]
    except KeyError:
        raise ValueError(f"unknown variant {name!r}; choose from {', '.join(VARIANTS)}") from None
    x = pair.round(x) if np.asarray(x).dtype != pair.working else x
    if name == "bcgsi+ls-mp":
        return fn(x, part, pair)
    return fn(x, part)


def loss_of_orthogonality(q):
    """``||I - Q^T Q||_2`` evaluated in binary64."""
    qh = np.asfortranarray(q, dtype=np.float64)
    n = qh.shape[1]
    e = gemm(qh, qh, trans_a=True, subtract_from=np.eye(n))
    return two_norm(e)


def qr_residual(x, q, r):
    """``||X - Q R||_F / ||X||_F`` evaluated in binary64."""
    xh = np.asfortranarray(x, dtype=np.float64)
    resid = gemm(np.asarray(q, dtype=np.float64), np.asarray(r, dtype=np.float64), subtract_from=xh)
    return frobenius_norm(resid) / frobenius_norm(xh)
