"""Dense kernels shared by all block Gram-Schmidt variants.

Matrices are plain numpy arrays; the dtype is the precision an operation
runs in. Every kernel is compiled with numba and accumulates in a fixed
order, so identical inputs give bit-identical outputs; gemm in particular
sums sequentially over the inner dimension.
"""

import numba
import numpy as np

__all__ = [
    "BreakdownError",
    "gemm",
    "cholesky",
    "solve_upper",
    "householder_qr",
    "jacobi_svd",
    "cond2",
    "two_norm",
    "frobenius_norm",
    "random_orthonormal",
]

JACOBI_MAX_SWEEPS = 30

_jit = numba.njit(cache=True, nogil=True)


class BreakdownError(ArithmeticError):
    """A factorization hit a non-positive pivot or an exactly dependent column.

    ``block`` is filled in by the block algorithms with the 1-based index of
    the block being processed when the failure happened.
    """

    def __init__(self, message, block=None, index=None):
        super().__init__(message)
        self.block = block
        self.index = index

    def __str__(self):
        msg = super().__str__()
        if self.block is not None:
            msg = f"{msg} (block {self.block})"
        return msg


def _as_matrix(a, name="A"):
    a = np.asarray(a)
    if a.ndim == 1:
        a = a[:, None]
    if a.ndim != 2:
        raise ValueError(f"{name} must be 2-D, got shape {a.shape}")
    if a.dtype not in (np.float32, np.float64):
        a = a.astype(np.float64)
    return a


# ---------------------------------------------------------------------------
# kernels


@_jit
def _gemm_kernel(a, b, c):
    # c[i, j] = sum_k a[i, k] * b[k, j], summed in increasing k
    m, kk = a.shape
    n = b.shape[1]
    for j in range(n):
        for k in range(kk):
            bkj = b[k, j]
            for i in range(m):
                c[i, j] += a[i, k] * bkj


@_jit
def _cholesky_kernel(a, r):
    n = a.shape[0]
    for j in range(n):
        for i in range(j, n):
            acc = a[j, i]
            for k in range(j):
                acc -= r[k, j] * r[k, i]
            if i == j:
                if not acc > 0:
                    return j
                r[j, j] = np.sqrt(acc)
            else:
                r[j, i] = acc / r[j, j]
    return -1


@_jit
def _solve_left_t_kernel(r, x):
    # R^T X = B, x holds B on entry
    n = r.shape[0]
    ncol = x.shape[1]
    for c in range(ncol):
        for i in range(n):
            acc = x[i, c]
            for k in range(i):
                acc -= r[k, i] * x[k, c]
            x[i, c] = acc / r[i, i]


@_jit
def _solve_right_kernel(r, x):
    # X R = B, x holds B on entry
    n = r.shape[0]
    m = x.shape[0]
    for j in range(n):
        for k in range(j):
            rkj = r[k, j]
            for i in range(m):
                x[i, j] -= x[i, k] * rkj
        d = r[j, j]
        for i in range(m):
            x[i, j] = x[i, j] / d


@_jit
def _coldot(a, ca, b, cb, start, stop):
    # eight interleaved partial sums combined in a fixed tree: reproducible
    z = a[0, 0] * 0
    s0 = s1 = s2 = s3 = s4 = s5 = s6 = s7 = z
    i = start
    while i + 8 <= stop:
        s0 += a[i, ca] * b[i, cb]
        s1 += a[i + 1, ca] * b[i + 1, cb]
        s2 += a[i + 2, ca] * b[i + 2, cb]
        s3 += a[i + 3, ca] * b[i + 3, cb]
        s4 += a[i + 4, ca] * b[i + 4, cb]
        s5 += a[i + 5, ca] * b[i + 5, cb]
        s6 += a[i + 6, ca] * b[i + 6, cb]
        s7 += a[i + 7, ca] * b[i + 7, cb]
        i += 8
    while i < stop:
        s0 += a[i, ca] * b[i, cb]
        i += 1
    return ((s0 + s1) + (s2 + s3)) + ((s4 + s5) + (s6 + s7))


@_jit
def _householder_kernel(a, v, strict, pivot):
    """Reduce ``a`` in place to R; reflector j stored in v[j:, j].

    With ``pivot`` the remaining column of largest norm is swapped into
    place at each step (R of A P; only used to precondition Jacobi).
    """
    m, n = a.shape
    zero = a[0, 0] * 0
    two = zero + 2
    for j in range(n):
        if pivot:
            best = j
            best_norm = _coldot(a, j, a, j, j, m)
            for c in range(j + 1, n):
                cn = _coldot(a, c, a, c, j, m)
                if cn > best_norm:
                    best = c
                    best_norm = cn
            if best != j:
                for i in range(m):
                    t = a[i, j]
                    a[i, j] = a[i, best]
                    a[i, best] = t
        alpha = np.sqrt(_coldot(a, j, a, j, j, m))
        if alpha == 0:
            if strict:
                return j
            continue
        x0 = a[j, j]
        sgn = zero + 1 if x0 >= 0 else zero - 1
        v[j, j] = x0 + sgn * alpha
        for i in range(j + 1, m):
            v[i, j] = a[i, j]
        vtv = _coldot(v, j, v, j, j, m)
        a[j, j] = -sgn * alpha
        for i in range(j + 1, m):
            a[i, j] = zero
        for c in range(j + 1, n):
            f = two * _coldot(v, j, a, c, j, m) / vtv
            for i in range(j, m):
                a[i, c] -= f * v[i, j]
    return -1


@_jit
def _form_q_kernel(v, q):
    # q starts as the leading columns of the identity
    m, n = v.shape
    zero = v[0, 0] * 0
    two = zero + 2
    for j in range(n - 1, -1, -1):
        vtv = _coldot(v, j, v, j, j, m)
        if vtv == 0:
            continue
        for c in range(j, n):
            f = two * _coldot(v, j, q, c, j, m) / vtv
            for i in range(j, m):
                q[i, c] -= f * v[i, j]


@_jit
def _jacobi_kernel(a, tol, max_sweeps):
    """One-sided cyclic Jacobi; returns sweeps used, or -1 on no convergence.

    Columns below eps * ||A||_F carry only rounding noise and are left
    alone; this keeps normwise accuracy and avoids endless sweeps.
    """
    m, n = a.shape
    norms = np.zeros(n)
    total = 0.0
    for j in range(n):
        total += _coldot(a, j, a, j, 0, m)
    negligible = total * np.finfo(np.float64).eps ** 2
    for sweep in range(max_sweeps):
        for j in range(n):
            norms[j] = _coldot(a, j, a, j, 0, m)
        rotated = False
        for p in range(n - 1):
            for q in range(p + 1, n):
                alpha = norms[p]
                beta = norms[q]
                if alpha <= negligible or beta <= negligible:
                    continue
                gamma = _coldot(a, p, a, q, 0, m)
                if abs(gamma) <= tol * np.sqrt(alpha) * np.sqrt(beta):
                    continue
                rotated = True
                zeta = (beta - alpha) / (2.0 * gamma)
                if abs(zeta) > 1e150:
                    t = 0.5 / zeta
                else:
                    sgn = 1.0 if zeta >= 0 else -1.0
                    t = sgn / (abs(zeta) + np.sqrt(1.0 + zeta * zeta))
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = c * t
                for i in range(m):
                    ap = a[i, p]
                    aq = a[i, q]
                    a[i, p] = c * ap - s * aq
                    a[i, q] = s * ap + c * aq
                norms[p] = alpha - t * gamma
                norms[q] = beta + t * gamma
        if not rotated:
            return sweep + 1
    return -1


# ---------------------------------------------------------------------------
# public operations


def gemm(a, b, trans_a=False, trans_b=False, subtract_from=None):
    """Return ``op(a) @ op(b)``, or ``subtract_from - op(a) @ op(b)``.

    All operands must share a dtype; the product is accumulated in that
    dtype, sequentially over the inner dimension.
    """
    a = _as_matrix(a, "a")
    b = _as_matrix(b, "b")
    if a.dtype != b.dtype:
        raise TypeError(f"precision mismatch: {a.dtype} vs {b.dtype}")
    opa = a.T if trans_a else a
    opb = b.T if trans_b else b
    if opa.shape[1] != opb.shape[0]:
        raise ValueError(f"inner dimensions differ: {opa.shape} @ {opb.shape}")
    out = np.zeros((opa.shape[0], opb.shape[1]), dtype=a.dtype, order="F")
    if opa.shape[1] > 0:
        _gemm_kernel(np.asfortranarray(opa), np.asfortranarray(opb), out)
    if subtract_from is None:
        return out
    c = _as_matrix(subtract_from, "subtract_from")
    if c.dtype != a.dtype:
        raise TypeError(f"precision mismatch: {c.dtype} vs {a.dtype}")
    if c.shape != out.shape:
        raise ValueError(f"subtract_from has shape {c.shape}, product is {out.shape}")
    return np.asfortranarray(c - out)


def cholesky(a):
    """Upper Cholesky factor R with R^T R = A, reading only the upper triangle."""
    a = _as_matrix(a)
    n = a.shape[0]
    if a.shape != (n, n):
        raise ValueError(f"cholesky needs a square matrix, got {a.shape}")
    r = np.zeros((n, n), dtype=a.dtype, order="F")
    bad = _cholesky_kernel(np.asfortranarray(a), r)
    if bad >= 0:
        raise BreakdownError(
            f"Cholesky pivot {bad} is not positive; matrix is not numerically SPD",
            index=bad,
        )
    return r


def solve_upper(r, b, mode="right"):
    """Triangular solve with upper triangular ``r``.

    ``mode="left_transposed"`` solves ``R^T X = B``; ``mode="right"`` solves
    ``X R = B``.
    """
    r = _as_matrix(r, "r")
    b = _as_matrix(b, "b")
    if r.dtype != b.dtype:
        raise TypeError(f"precision mismatch: {r.dtype} vs {b.dtype}")
    n = r.shape[0]
    if r.shape != (n, n):
        raise ValueError(f"R must be square, got {r.shape}")
    zero = np.flatnonzero(np.diag(r) == 0)
    if zero.size:
        raise BreakdownError(f"R has a zero diagonal entry at {zero[0]}", index=int(zero[0]))
    x = np.array(b, dtype=b.dtype, order="F", copy=True)
    if mode == "left_transposed":
        if b.shape[0] != n:
            raise ValueError(f"R^T X = B needs {n} rows in B, got {b.shape[0]}")
        _solve_left_t_kernel(np.asfortranarray(r), x)
    elif mode == "right":
        if b.shape[1] != n:
            raise ValueError(f"X R = B needs {n} columns in B, got {b.shape[1]}")
        _solve_right_kernel(np.asfortranarray(r), x)
    else:
        raise ValueError(f"unknown mode {mode!r}")
    return x


def _householder(x, strict, want_q=True, pivot=False):
    m, n = x.shape
    if m < n:
        raise ValueError(f"householder_qr needs rows >= cols, got {x.shape}")
    a = np.array(x, order="F", copy=True)
    v = np.zeros_like(a, order="F")
    bad = _householder_kernel(a, v, strict, pivot)
    if bad >= 0:
        raise BreakdownError(f"column {bad} is exactly dependent on earlier columns", index=bad)
    r = np.triu(a[:n, :])
    if not want_q:
        return None, np.asfortranarray(r)
    q = np.eye(m, n, dtype=a.dtype, order="F")
    _form_q_kernel(v, q)
    neg = np.diag(r) < 0
    r[neg, :] *= -1
    q[:, neg] *= -1
    return np.asfortranarray(q), np.asfortranarray(r)


def householder_qr(x):
    """Thin Householder QR with a nonnegative diagonal in R."""
    return _householder(_as_matrix(x, "x"), strict=True)


def jacobi_svd(x):
    """Singular values of ``x`` in descending order, computed in binary64.

    The input is first reduced by column-pivoted QR; one-sided Jacobi then
    runs on R^T, which converges in far fewer sweeps than on the input.
    """
    a = _as_matrix(x, "x").astype(np.float64)
    m, n = a.shape
    if m < n:
        a = a.T
        m, n = n, m
    if n > 1:
        _, r = _householder(a, strict=False, want_q=False, pivot=True)
        a = np.asfortranarray(r.T)
    else:
        a = np.asfortranarray(a)
    tol = a.shape[0] * np.finfo(np.float64).eps
    if _jacobi_kernel(a, tol, JACOBI_MAX_SWEEPS) < 0:
        raise RuntimeError(f"Jacobi SVD did not converge in {JACOBI_MAX_SWEEPS} sweeps")
    sigma = np.sqrt(np.einsum("ij,ij->j", a, a))
    return np.sort(sigma)[::-1]


def cond2(x):
    """2-norm condition number; ``inf`` when the smallest singular value is 0."""
    sigma = jacobi_svd(x)
    if sigma[-1] == 0:
        return np.inf
    return float(sigma[0] / sigma[-1])


def two_norm(a):
    return float(jacobi_svd(a)[0])


@_jit
def _sumsq(a):
    s = 0.0
    m, n = a.shape
    for j in range(n):
        for i in range(m):
            s += a[i, j] * a[i, j]
    return s


def frobenius_norm(a):
    a = np.asfortranarray(_as_matrix(a).astype(np.float64))
    return float(np.sqrt(_sumsq(a)))


def random_orthonormal(rows, cols, seed):
    """Binary64 matrix with orthonormal columns, deterministic per seed."""
    if rows < cols:
        raise ValueError(f"need rows >= cols, got {rows}x{cols}")
    g = np.random.default_rng(seed).standard_normal((rows, cols))
    q, _ = householder_qr(g)
    return q
