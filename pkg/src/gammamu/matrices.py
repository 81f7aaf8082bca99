"""Hausdorff and generalized Hilbert matrices, T_t composition matrices,
and Hankel/Toeplitz structure classification.

Entries combine ``log C(n,k)`` with log-space quadrature weights inside a
single ``exp`` so that the assembled entry never overflows even where the
binomial factor alone leaves double range (around n+k ~ 1030).  Entries whose
log drops below -745 flush to zero and set the matrix underflow flag.

Matrix construction is embarrassingly parallel over entries; the compiled
kernel below parallelises over rows and the resulting arrays are immutable
by convention.
"""

from __future__ import annotations

import math
import os
import warnings
from dataclasses import dataclass

import numpy as np

os.environ.setdefault("NUMBA_THREADING_LAYER", "workqueue")

from numba import njit, prange  # noqa: E402
from scipy.special import gammaln  # noqa: E402

from .errors import (  # noqa: E402
    EstimateUnconverged,
    InvalidArguments,
    InvalidParameter,
    StabilityCapExceeded,
)
from .measure import (  # noqa: E402
    Measure,
    MomentSequence,
    binomial_table_sources,
    forward_difference,
    moment,
    total_mass,
)

DIFFERENCE_PATH_CAP = 40


@dataclass(frozen=True)
class OperatorMatrix:
    """Dense nonnegative matrix with a kind tag.

    ``kind`` is one of ``hausdorff``, ``gamma``, ``composition``.  ``underflow``
    marks entries flushed to zero because their log fell below double range;
    ``converged`` reports the quadrature doubling status for cutoff measures.
    """

    kind: str
    entries: np.ndarray
    measure: Measure | None = None
    t: float | None = None
    underflow: bool = False
    converged: bool = True

    @property
    def size(self) -> int:
        return self.entries.shape[0]


@njit(parallel=True, cache=True)
def _gamma_kernel(lgam, logt, log1mt, logw, n):  # pragma: no cover - compiled
    out = np.zeros((n, n))
    for row in prange(n):
        for col in range(n):
            lc = lgam[row + col + 1] - (lgam[row + 1] + lgam[col + 1])
            acc = 0.0
            for i in range(logt.shape[0]):
                acc += math.exp(lc + (col * logt[i] + row * log1mt[i]) + logw[i])
            out[row, col] = acc
    return out


@njit(parallel=True, cache=True)
def _hausdorff_kernel(lgam, logt, log1mt, logw, n):  # pragma: no cover - compiled
    out = np.zeros((n, n))
    for row in prange(n):
        for col in range(row + 1):
            diff = row - col
            lc = lgam[row + 1] - (lgam[col + 1] + lgam[diff + 1])
            acc = 0.0
            for i in range(logt.shape[0]):
                acc += math.exp(lc + (col * logt[i] + diff * log1mt[i]) + logw[i])
            out[row, col] = acc
    return out


def _build(kernel, mu: Measure, n: int, max_degree: int):
    lgam = gammaln(np.arange(max_degree + 2, dtype=float))
    t, logw, exact = binomial_table_sources(mu, max_degree)
    if len(t) == 0:
        return np.zeros((n, n)), True
    if exact:
        return kernel(lgam, np.log(t), np.log1p(-t), logw, n), True
    # cutoff densities lose polynomial exactness: double nodes until stable
    m = max(128, max_degree // 2 + 1)
    t, logw, _ = binomial_table_sources(mu, max_degree, m)
    prev = kernel(lgam, np.log(t), np.log1p(-t), logw, n)
    converged = False
    while True:
        m *= 2
        t, logw, _ = binomial_table_sources(mu, max_degree, m)
        cur = kernel(lgam, np.log(t), np.log1p(-t), logw, n)
        scale = max(1.0, float(np.max(cur)))
        if float(np.max(np.abs(cur - prev))) < 1e-12 * scale:
            converged = True
            break
        if m >= 4096:
            break
        prev = cur
    if not converged:
        warnings.warn("matrix entries did not stabilise under node doubling",
                      EstimateUnconverged, stacklevel=3)
    return cur, converged


def hausdorff_matrix(mu: Measure, n: int) -> OperatorMatrix:
    """Lower-triangular Hausdorff matrix ``c_{nk} = C(n,k) int t^k (1-t)^{n-k} dmu``."""
    if n < 1:
        raise InvalidArguments("matrix size must be >= 1")
    entries, converged = _build(_hausdorff_kernel, mu, n, n - 1)
    underflow = (not mu.is_zero) and bool(
        np.any(entries[np.tril_indices(n)] == 0.0))
    return OperatorMatrix("hausdorff", entries, measure=mu,
                          underflow=underflow, converged=converged)


def gamma_matrix(mu: Measure, n: int) -> OperatorMatrix:
    """Generalized Hilbert matrix ``gamma_{nk} = C(n+k,k) int t^k (1-t)^n dmu``."""
    if n < 1:
        raise InvalidArguments("matrix size must be >= 1")
    entries, converged = _build(_gamma_kernel, mu, n, 2 * (n - 1))
    underflow = (not mu.is_zero) and bool(np.any(entries == 0.0))
    return OperatorMatrix("gamma", entries, measure=mu,
                          underflow=underflow, converged=converged)


def hausdorff_matrix_via_differences(seq: MomentSequence, n: int) -> OperatorMatrix:
    """Hausdorff matrix from ``c_{nk} = C(n,k) Delta^{n-k} mu_k``.

    Cross-check path only; capped at N = 40 where the difference recurrence
    is still meaningful.
    """
    if n < 1:
        raise InvalidArguments("matrix size must be >= 1")
    if n > DIFFERENCE_PATH_CAP:
        raise StabilityCapExceeded(
            f"difference path capped at N = {DIFFERENCE_PATH_CAP}, got {n}")
    if len(seq) < n:
        raise InvalidArguments(f"need {n} moments, sequence holds {len(seq)}")
    entries = np.zeros((n, n))
    for row in range(n):
        for col in range(row + 1):
            entries[row, col] = math.comb(row, col) * forward_difference(
                seq, row - col, col)
    source = seq.source
    return OperatorMatrix("hausdorff", entries, measure=source)


def composition_matrix(t: float, n: int) -> OperatorMatrix:
    """Coefficient action of the weighted composition operator T_t on
    monomials: ``(T_t)_{nk} = C(n+k,n) t^k (1-t)^n``.

    Assembled so that ``composition_matrix(t).T`` and
    ``composition_matrix(1-t)`` agree to the last bit the float inputs allow
    (the adjoint identity T_t* = T_{1-t}).
    """
    if not (0.0 < t < 1.0):
        raise InvalidParameter(f"composition parameter must lie in (0,1), got {t}")
    if n < 1:
        raise InvalidArguments("matrix size must be >= 1")
    idx = np.arange(n, dtype=float)
    lgam = gammaln(np.arange(2 * n + 1, dtype=float))
    lc = lgam[(np.add.outer(idx, idx) + 1).astype(int)] \
        - (np.add.outer(lgam[1:n + 1], lgam[1:n + 1]))
    inner = np.add.outer(idx * math.log1p(-t), idx * math.log(t))
    with np.errstate(under="ignore"):
        entries = np.exp(lc + inner)
    underflow = bool(np.any(entries == 0.0))
    return OperatorMatrix("composition", entries, t=t, underflow=underflow)


# ---------------------------------------------------------------------------
# Structure classification
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class StructureResult:
    """Outcome of a Hankel/Toeplitz test with the first violating witness."""

    holds: bool
    witness: tuple[tuple[int, int], tuple[int, int]] | None = None
    witness_values: tuple[float, float] | None = None

    def __bool__(self) -> bool:
        return self.holds


def is_hankel(matrix: OperatorMatrix, tol: float = 1e-9) -> StructureResult:
    """Entries constant along anti-diagonals, tolerance scaled by the largest
    entry on each tested anti-diagonal."""
    e = matrix.entries
    n = e.shape[0]
    for s in range(1, 2 * n - 2):
        lo = max(0, s - (n - 1))
        hi = min(s, n - 1)
        diag = np.array([e[s - k, k] for k in range(lo, hi + 1)])
        scale = float(np.max(np.abs(diag))) if len(diag) else 0.0
        for k in range(lo, hi):
            a, b = e[s - k, k], e[s - k - 1, k + 1]
            if abs(a - b) > tol * scale:
                return StructureResult(False, ((s - k, k), (s - k - 1, k + 1)),
                                       (float(a), float(b)))
    return StructureResult(True)


def is_toeplitz(matrix: OperatorMatrix, tol: float = 1e-9) -> StructureResult:
    """Entries constant along diagonals, scanned row-major so that for Gamma
    matrices of nonzero measures the witness found is (0,0) against (1,1)."""
    e = matrix.entries
    n = e.shape[0]
    scales = {}
    for d in range(-(n - 1), n):
        diag = np.diagonal(e, offset=d)
        scales[d] = float(np.max(np.abs(diag))) if len(diag) else 0.0
    for i in range(n - 1):
        for j in range(n - 1):
            if abs(e[i, j] - e[i + 1, j + 1]) > tol * scales[j - i]:
                return StructureResult(False, ((i, j), (i + 1, j + 1)),
                                       (float(e[i, j]), float(e[i + 1, j + 1])))
    return StructureResult(True)


def hankel_moment_test(mu: Measure, n_max: int, tol: float = 1e-9) -> bool:
    """True iff ``moment(mu, n) = totalMass(mu)/(n+1)`` for n = 0..n_max,
    the moment identity equivalent to the Gamma matrix being Hankel."""
    if n_max < 1:
        raise InvalidArguments("n_max must be >= 1")
    mass = total_mass(mu)
    for n in range(n_max + 1):
        if abs(moment(mu, n) - mass / (n + 1)) > tol * max(1.0, mass):
            return False
    return True
