"""Block Gram-Schmidt QR variants, including a mixed-precision low-sync one."""

from .precision import F32F64, PrecisionPair, get_pair, unit_roundoff, promote, round_to
from .densela import (
    BreakdownError,
    gemm,
    cholesky,
    solve_upper,
    householder_qr,
    jacobi_svd,
    cond2,
    two_norm,
    frobenius_norm,
    random_orthonormal,
)
from .bgs import (
    BlockPartition,
    BlockQR,
    bcgs,
    bcgsi_plus,
    bcgsi_plus_ls,
    bcgsi_plus_ls_mp,
    loss_of_orthogonality,
    qr_residual,
    run_variant,
    VARIANTS,
)

__version__ = "0.1.0"
