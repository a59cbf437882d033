"""Invariant suite run by ``blockgs check``.

Each check returns ``(passed, detail)``. The instances are small so the
whole suite finishes in well under a minute.
"""

import numpy as np

from . import densela
from .bgs import (
    VARIANTS,
    BlockPartition,
    expected_sync_events,
    loss_of_orthogonality,
    qr_residual,
    run_variant,
)
from .harness import SweepSpec, format_csv, run_sweep
from .precision import F32F64
from .testmats import GluedParams, LaeuchliParams, MonomialParams, generate

U = F32F64.working_unit_roundoff


def _small_instances():
    return [
        LaeuchliParams(120, 10, 5, 1e-3),
        MonomialParams(200, 12, 4, seed=3),
        GluedParams.from_svec(200, 10, 4, 6, seed=5),
    ]


def check_round_trip():
    rng = np.random.default_rng(0)
    a = rng.standard_normal((50, 20)).astype(np.float32)
    back = F32F64.round(F32F64.promote(a))
    return bool(np.array_equal(back.view(np.uint32), a.view(np.uint32))), "round(promote(A)) == A"


def check_gemm_oracle():
    rng = np.random.default_rng(1)
    worst = 0.0
    for _ in range(20):
        a = rng.standard_normal((7, 5)).astype(np.float32)
        b = rng.standard_normal((5, 4)).astype(np.float32)
        got = densela.gemm(a, b).astype(np.float64)
        ref = np.zeros((7, 4))
        for i in range(7):
            for j in range(4):
                ref[i, j] = sum(float(a[i, k]) * float(b[k, j]) for k in range(5))
        scale = np.abs(a).astype(np.float64) @ np.abs(b).astype(np.float64)
        worst = max(worst, float(np.max(np.abs(got - ref) / scale)))
    return worst <= 10 * U, f"max relative error {worst:.2e} (limit {10 * U:.2e})"


def check_cholesky():
    rng = np.random.default_rng(2)
    worst = 0.0
    for _ in range(50):
        n = int(rng.integers(1, 20))
        g = rng.standard_normal((n + 5, n))
        a = (g.T @ g).astype(np.float32)
        r = densela.cholesky(a).astype(np.float64)
        err = np.linalg.norm(r.T @ r - a.astype(np.float64)) / np.linalg.norm(a.astype(np.float64))
        worst = max(worst, err / (n * U))
    return worst <= 10, f"max ||R^T R - A||_F / (n u ||A||_F) = {worst:.2f} (limit 10)"


def check_householder():
    rng = np.random.default_rng(3)
    worst = 0.0
    for _ in range(10):
        x = densela.random_orthonormal(80, 12, int(rng.integers(1 << 30)))
        x = (x * np.logspace(0, -5, 12)).astype(np.float32)
        q, _ = densela.householder_qr(x)
        worst = max(worst, loss_of_orthogonality(q) / (12 * U))
    return worst <= 100, f"max LOO / (n u) = {worst:.2f} (limit 100)"


def check_sync_counts():
    bad = []
    for p in (2, 3, 10):
        part = BlockPartition(60, p, 3)
        x = densela.random_orthonormal(60, 3 * p, p).astype(np.float32)
        for name in VARIANTS:
            got = run_variant(name, x, part).sync_events
            if got != expected_sync_events(name, p):
                bad.append(f"{name} p={p}: {got}")
    return not bad, "; ".join(bad) or "2p-1, 4p-3, p, p"


def check_residual_and_structure():
    bad = []
    for params in _small_instances():
        x = generate(params)
        part = BlockPartition(params.m, params.p, params.s)
        for name in VARIANTS:
            try:
                res = run_variant(name, x, part)
            except densela.BreakdownError:
                continue
            resid = qr_residual(x, res.Q, res.R)
            if resid > 100 * part.n * U:
                bad.append(f"{name}/{params.family} residual {resid:.2e}")
            r = res.R
            if np.any(np.tril(r, -1) != 0) or np.any(np.diag(r) <= 0):
                bad.append(f"{name}/{params.family} R not upper triangular with positive diagonal")
    return not bad, "; ".join(bad) or "residual <= 100 n u, R upper triangular"


def check_loo_ordering():
    bad = []
    for params in _small_instances():
        x = generate(params)
        part = BlockPartition(params.m, params.p, params.s)
        try:
            loo = {name: loss_of_orthogonality(run_variant(name, x, part).Q) for name in VARIANTS}
        except densela.BreakdownError:
            continue
        if loo["bcgsi+"] > 10 * loo["bcgsi+ls-mp"] + 100 * U:
            bad.append(f"{params.family}: bcgsi+ {loo['bcgsi+']:.2e} vs mp {loo['bcgsi+ls-mp']:.2e}")
        if loo["bcgsi+ls-mp"] > 10 * loo["bcgsi+ls"]:
            bad.append(f"{params.family}: mp {loo['bcgsi+ls-mp']:.2e} vs ls {loo['bcgsi+ls']:.2e}")
    return not bad, "; ".join(bad) or "bounded interleaving holds"


def check_determinism():
    spec = SweepSpec("laeuchli", [LaeuchliParams(60, 5, 4, 1e-2), LaeuchliParams(60, 5, 4, 1e-5)])
    first = format_csv(run_sweep(spec))
    second = format_csv(run_sweep(spec))
    return first == second, "identical sweep gives identical CSV bytes"


def check_jacobi_recovery():
    worst = 0.0
    for seed in range(5):
        sigma = np.logspace(0, -8, 20)
        u = densela.random_orthonormal(100, 20, seed)
        v = densela.random_orthonormal(20, 20, seed + 1000)
        got = densela.jacobi_svd((u * sigma) @ v.T)
        worst = max(worst, float(np.max(np.abs(got - sigma)) / sigma[0]))
    return worst <= 1e-12, f"max normwise error {worst:.2e} (limit 1e-12)"


CHECKS = {
    "precision round trip": check_round_trip,
    "gemm vs triple loop": check_gemm_oracle,
    "cholesky reconstruction": check_cholesky,
    "householder orthogonality": check_householder,
    "jacobi svd recovery": check_jacobi_recovery,
    "sync event counts": check_sync_counts,
    "residual and R structure": check_residual_and_structure,
    "loo ordering": check_loo_ordering,
    "sweep determinism": check_determinism,
}


def run_checks(report=print):
    """Run every check; returns True when all pass."""
    ok = True
    for name, fn in CHECKS.items():
        try:
            passed, detail = fn()
        except Exception as exc:  # a crashing check is a failed check
            passed, detail = False, f"{type(exc).__name__}: {exc}"
        ok = ok and passed
        report(f"{'PASS' if passed else 'FAIL'}  {name}: {detail}")
    return ok

