"""Applying Gamma_mu, its adjoint, and T_t in coefficient and boundary space.

The series path is the truncated matrix action A = Gamma_N a; for a degree-d
input with d < N every computed coefficient is exact, and the unevaluated
tail A_n, n >= N is bounded by the tail of the matrix row sums.  The integral
path evaluates ``int w_t(zeta) f(phi_t(zeta)) dmu(t)`` node by node with the
shared quadrature backend.  Note that for measures with mass near t = 0 the
coefficients A_n decay only like 1/n, so the *partial sum* of the series path
converges to the integral-path boundary values extremely slowly near zeta = 1;
cross-checks at finite truncation therefore compare the two constructions of
the same truncated object (see tests) rather than partial sums against the
exact integral.
"""

from __future__ import annotations

from functools import cached_property

import numpy as np

from .errors import (
    InvalidArguments,
    InvalidParameter,
    NonConvergentIntegral,
    TruncationMismatch,
)
from .hardy import BoundaryFunction, BoundaryGrid, CoefficientVector
from .matrices import OperatorMatrix, gamma_matrix
from .measure import Measure, integrate, integrate_columns

_NODE_CHUNK = 2048


class OperatorHandle:
    """Measure + truncation + grid with a lazily built Gamma matrix.

    Build-once, then share read-only: the cached matrix is written by the
    first accessor and never mutated afterwards.
    """

    def __init__(self, measure: Measure, truncation: int, grid: BoundaryGrid):
        self.measure = measure
        self.truncation = int(truncation)
        self.grid = grid

    @cached_property
    def matrix(self) -> OperatorMatrix:
        return gamma_matrix(self.measure, self.truncation)


def _padded(f: CoefficientVector, n: int) -> np.ndarray:
    if f.degree >= n:
        raise TruncationMismatch(
            f"input degree {f.degree} must be below the truncation {n}")
    a = np.zeros(n, dtype=complex)
    a[: len(f.coeffs)] = f.coeffs
    return a


def apply_gamma_coefficients(h: OperatorHandle, f: CoefficientVector) -> CoefficientVector:
    """Truncated coefficient action A_n = sum_k gamma_{nk} a_k, degree N-1."""
    a = _padded(f, h.truncation)
    return CoefficientVector(h.matrix.entries @ a)


def apply_gamma_adjoint_coefficients(h: OperatorHandle, f: CoefficientVector) -> CoefficientVector:
    """Adjoint action through the transposed matrix (T_t* = T_{1-t} under mu)."""
    a = _padded(f, h.truncation)
    return CoefficientVector(h.matrix.entries.T @ a)


def apply_t_boundary(t: float, f: BoundaryFunction, grid: BoundaryGrid) -> np.ndarray:
    """Values of T_t f = w_t (f o phi_t) at the grid nodes.

    phi_t maps the circle into the closed disc D(1/(2-t), (1-t)/(2-t)), so f
    is evaluated strictly inside the disc except at zeta -> 1.
    """
    if not (0.0 < t < 1.0):
        raise InvalidParameter(f"composition parameter must lie in (0,1), got {t}")
    zeta = grid.points
    w = 1.0 / (1.0 - (1.0 - t) * zeta)
    return w * f(t * w)


def apply_gamma_boundary(
    h: OperatorHandle,
    f: BoundaryFunction,
    hint=None,
    tol: float = 1e-9,
) -> np.ndarray:
    """Node-wise quadrature of ``int T_t f(zeta_j) dmu(t)`` over the handle's
    grid.  Raises :class:`NonConvergentIntegral` if any node fails to
    stabilise under node doubling."""
    zeta = h.grid.points
    out = np.empty(len(zeta), dtype=complex)
    for i0 in range(0, len(zeta), _NODE_CHUNK):
        z = zeta[i0:i0 + _NODE_CHUNK, None]

        def block(t, z=z):
            if len(t) == 0:
                return np.zeros((z.shape[0], 0), dtype=complex)
            w = 1.0 / (1.0 - (1.0 - t)[None, :] * z)
            return w * f(t[None, :] * w)

        vals, converged = integrate_columns(h.measure, block, hint=hint, tol=tol)
        if not converged:
            raise NonConvergentIntegral(
                "boundary-path quadrature failed to stabilise at the node cap")
        out[i0:i0 + _NODE_CHUNK] = vals
    return out


def gamma_of_one(mu: Measure, n: int) -> CoefficientVector:
    """Coefficients of Gamma_mu(1): the n-th coefficient is
    ``int (1-t)^n dmu(t)``."""
    if n < 1:
        raise InvalidArguments("coefficient count must be >= 1")
    powers = np.arange(n)

    def block(t):
        if len(t) == 0:
            return np.zeros((n, 0))
        return (1.0 - t)[None, :] ** powers[:, None]

    vals, converged = integrate_columns(mu, block, tol=1e-12)
    if not converged:
        raise NonConvergentIntegral("Gamma_mu(1) coefficients failed to stabilise")
    return CoefficientVector(np.asarray(vals, dtype=complex))


def gamma_of_one_value(mu: Measure, z: complex) -> complex:
    """Direct evaluation ``Gamma_mu(1)(z) = int dmu(t)/(1-(1-t)z)``."""
    re = integrate(mu, lambda t: np.real(1.0 / (1.0 - (1.0 - t) * z)))
    im = integrate(mu, lambda t: np.imag(1.0 / (1.0 - (1.0 - t) * z)))
    return complex(re, im)
