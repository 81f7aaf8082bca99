"""Hardy-space numerics on the unit circle.

Boundary grids use midpoint-offset nodes ``theta_j = 2 pi (j + 1/2) / M`` so
that the singularities of the probe functions at theta = 0 are never sampled.
H^p norms are the 1/(2 pi)-normalised boundary integrals throughout; for
p = 2 on coefficient vectors the norm is the exact l^2 coefficient norm.
For p != 2 the grid norm is a Riemann-sum estimate and every consumer states
its grid size and tolerance explicitly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, NamedTuple

import numpy as np
from scipy.integrate import quad

from .errors import (
    EvaluationFailure,
    GridTooCoarse,
    InvalidArguments,
)


@dataclass(frozen=True)
class BoundaryGrid:
    """Midpoint-offset sample nodes on the unit circle."""

    m: int

    def __post_init__(self):
        if self.m < 4:
            raise InvalidArguments(f"grid needs at least 4 nodes, got {self.m}")

    @property
    def thetas(self) -> np.ndarray:
        return _grid_thetas(self.m)

    @property
    def points(self) -> np.ndarray:
        return _grid_points(self.m)


@lru_cache(maxsize=32)
def _grid_thetas(m: int) -> np.ndarray:
    th = 2.0 * np.pi * (np.arange(m) + 0.5) / m
    th.setflags(write=False)
    return th


@lru_cache(maxsize=32)
def _grid_points(m: int) -> np.ndarray:
    pts = np.exp(1j * _grid_thetas(m))
    pts.setflags(write=False)
    return pts


@dataclass(frozen=True)
class CoefficientVector:
    """Truncated Taylor coefficients a_0..a_N of an analytic function."""

    coeffs: np.ndarray

    def __post_init__(self):
        arr = np.atleast_1d(np.asarray(self.coeffs, dtype=complex))
        if arr.ndim != 1 or len(arr) == 0:
            raise InvalidArguments("coefficient vector must be a nonempty 1-d array")
        arr.setflags(write=False)
        object.__setattr__(self, "coeffs", arr)

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def norm2(self) -> float:
        return float(np.linalg.norm(self.coeffs))

    def horner(self, z) -> np.ndarray:
        return np.polynomial.polynomial.polyval(np.asarray(z, dtype=complex), self.coeffs)

    @classmethod
    def basis(cls, n: int) -> "CoefficientVector":
        c = np.zeros(n + 1, dtype=complex)
        c[n] = 1.0
        return cls(c)


@dataclass(frozen=True)
class BoundaryFunction:
    """Function given by an evaluator on the closed disc minus {1}.

    ``modulus``, when present, gives ``theta -> |f(e^{i theta})|`` in closed
    form and must agree with ``abs(evaluator)`` at grid nodes to 1e-12.
    """

    evaluator: Callable[[np.ndarray], np.ndarray]
    modulus: Callable[[np.ndarray], np.ndarray] | None = None
    label: str = ""

    def __call__(self, z) -> np.ndarray:
        try:
            return np.asarray(self.evaluator(np.asarray(z)))
        except (ArithmeticError, ValueError) as exc:
            raise EvaluationFailure(f"boundary function {self.label!r} failed: {exc}") from exc


def as_boundary_function(f: CoefficientVector) -> BoundaryFunction:
    return BoundaryFunction(evaluator=f.horner, label="polynomial")


# ---------------------------------------------------------------------------
# Evaluation and norms
# ---------------------------------------------------------------------------

def evaluate_on_grid(f: CoefficientVector, grid: BoundaryGrid) -> np.ndarray:
    """Polynomial values at all grid points.

    Uses a folded FFT (midpoint twist absorbed into the coefficients), which
    matches plain Horner evaluation to 1e-13 relative accuracy.
    """
    a = f.coeffs
    m = grid.m
    k = np.arange(len(a))
    b = a * np.exp(1j * np.pi * k / m)
    folded = np.zeros(m, dtype=complex)
    np.add.at(folded, k % m, b)
    return m * np.fft.ifft(folded)


def grid_norm(values: np.ndarray, p: float) -> float:
    """Riemann p-mean of boundary samples: ((1/M) sum |v_j|^p)^(1/p)."""
    if p < 1.0:
        raise InvalidArguments(f"p must be >= 1, got {p}")
    return float(np.mean(np.abs(values) ** p) ** (1.0 / p))


def hp_norm(f, p: float, grid: BoundaryGrid | None = None) -> float:
    """H^p norm of a coefficient vector or boundary function.

    For p = 2 on a coefficient vector the exact coefficient l^2 norm is
    returned (Parseval); providing a grid with M <= 2*degree then raises
    :class:`GridTooCoarse` since that grid could not certify the claim.
    All other paths are grid Riemann means.
    """
    if p < 1.0:
        raise InvalidArguments(f"p must be >= 1, got {p}")
    if isinstance(f, CoefficientVector):
        if p == 2.0:
            if grid is not None and grid.m <= 2 * f.degree:
                raise GridTooCoarse(
                    f"p=2 exactness needs M > 2*degree; got M={grid.m}, degree={f.degree}")
            return f.norm2()
        if grid is None:
            raise InvalidArguments("p != 2 coefficient norms need a grid")
        return grid_norm(evaluate_on_grid(f, grid), p)
    if isinstance(f, BoundaryFunction):
        if grid is None:
            raise InvalidArguments("boundary-function norms need a grid")
        if f.modulus is not None:
            return float(np.mean(np.asarray(f.modulus(grid.thetas)) ** p) ** (1.0 / p))
        return grid_norm(f(grid.points), p)
    raise InvalidArguments(f"cannot take an H^p norm of {type(f).__name__}")


# ---------------------------------------------------------------------------
# Probe families
# ---------------------------------------------------------------------------

def fa_function(a: float) -> BoundaryFunction:
    """The singular probe f_a(z) = (1-z)^(-a), 0 <= a < 1.

    Principal branch; the branch cut [1, inf) misses the closed disc except
    at z = 1, which no midpoint grid node hits.  Boundary modulus in closed
    form: |f_a(e^{i theta})| = (2 sin(theta/2))^(-a).
    """
    if not (0.0 <= a < 1.0):
        raise InvalidArguments(f"fa parameter must lie in [0,1), got {a}")

    def evaluator(z):
        return np.power(1.0 - np.asarray(z, dtype=complex), -a)

    def modulus(theta):
        return (2.0 * np.sin(np.asarray(theta) / 2.0)) ** (-a)

    return BoundaryFunction(evaluator=evaluator, modulus=modulus, label=f"f_a(a={a})")


def fa_coefficients(a: float, degree: int) -> CoefficientVector:
    """Taylor coefficients C(n+a-1, n) of f_a, i.e. the ratio recursion
    c_{n} = c_{n-1} (n + a - 1) / n."""
    if not (0.0 <= a < 1.0):
        raise InvalidArguments(f"fa parameter must lie in [0,1), got {a}")
    c = np.empty(degree + 1)
    c[0] = 1.0
    for n in range(1, degree + 1):
        c[n] = c[n - 1] * (n + a - 1.0) / n
    return CoefficientVector(c)


def fa_h2_norm_exact(a: float) -> float:
    """Closed form ||f_a||_{H^2} = sqrt(Gamma(1-2a)) / Gamma(1-a); the grid
    and partial-sum routes both lose the singular mass for a near 1/2."""
    if not (0.0 <= a < 0.5):
        raise InvalidArguments("exact H^2 norm needs a in [0, 1/2)")
    return math.sqrt(math.gamma(1.0 - 2.0 * a)) / math.gamma(1.0 - a)


def fa_hp_norm_exact(a: float, p: float) -> float:
    """Closed form ||f_a||_{H^p} = (Gamma(1-ap)/Gamma(1-ap/2)^2)^(1/p), ap < 1."""
    s = a * p
    if not (0.0 <= s < 1.0):
        raise InvalidArguments("exact H^p norm needs a*p in [0, 1)")
    return (math.gamma(1.0 - s) / math.gamma(1.0 - s / 2.0) ** 2) ** (1.0 / p)


class KernelPair(NamedTuple):
    boundary: BoundaryFunction
    coefficients: CoefficientVector


def kernel_kw(w: complex, q: float, degree: int | None = None) -> KernelPair:
    """Normalized reproducing-kernel probe k_w(z) = (1-|w|^2)^(1/q)/(1 - conj(w) z).

    Coefficient form (1-|w|^2)^(1/q) conj(w)^n, truncated where the geometric
    tail drops below 1e-13 of the norm.
    """
    w = complex(w)
    r = abs(w)
    if not r < 1.0:
        raise InvalidArguments(f"kernel parameter must satisfy |w| < 1, got |w|={r}")
    if not q > 1.0:
        raise InvalidArguments(f"kernel exponent must satisfy q > 1, got {q}")
    c = (1.0 - r * r) ** (1.0 / q)
    if degree is None:
        degree = 0 if r == 0.0 else min(500_000, int(math.ceil(30.0 / -math.log(r))) + 1)
    coeffs = c * np.conj(w) ** np.arange(degree + 1)

    def evaluator(z):
        return c / (1.0 - np.conj(w) * np.asarray(z, dtype=complex))

    def modulus(theta):
        z = np.exp(1j * np.asarray(theta))
        return c / np.abs(1.0 - np.conj(w) * z)

    bf = BoundaryFunction(evaluator=evaluator, modulus=modulus, label=f"k_w(w={w}, q={q})")
    return KernelPair(bf, CoefficientVector(coeffs))


class H1KernelNorm(NamedTuple):
    value: float
    ratio: float  # value / log(e / (1-r))


def h1_kernel_norm(r: float, grid: BoundaryGrid) -> H1KernelNorm:
    """Boundary-quadrature H^1 norm of k_r(z) = 1/(1-rz) plus its ratio to
    the comparison scale log(e/(1-r))."""
    if not (0.0 <= r < 1.0):
        raise InvalidArguments(f"kernel radius must lie in [0,1), got {r}")
    if grid.m < 64.0 / (1.0 - r):
        raise GridTooCoarse(
            f"resolving k_r at r={r} needs M >= {64.0 / (1.0 - r):.0f}, got {grid.m}")
    value = float(np.mean(1.0 / np.abs(1.0 - r * grid.points)))
    return H1KernelNorm(value, value / math.log(math.e / (1.0 - r)))


# ---------------------------------------------------------------------------
# Classical inequality checks
# ---------------------------------------------------------------------------

def hardy_inequality_check(f: CoefficientVector, grid: BoundaryGrid) -> tuple[float, float]:
    """lhs = sum |a_n|/(n+1) against rhs = pi * ||f||_{H^1,grid}."""
    lhs = float(np.sum(np.abs(f.coeffs) / (np.arange(len(f.coeffs)) + 1.0)))
    rhs = math.pi * hp_norm(f, 1.0, grid)
    return lhs, rhs


def fejer_riesz_check(f: BoundaryFunction, grid: BoundaryGrid) -> tuple[float, float]:
    """lhs = int_0^1 |f(s)| ds by adaptive quadrature against
    rhs = pi * ||f||_{H^1,grid}."""
    lhs = quad(lambda s: abs(complex(f(np.array([s]))[0])), 0.0, 1.0, limit=200)[0]
    rhs = math.pi * hp_norm(f, 1.0, grid)
    return lhs, rhs


def growth_estimate_check(
    f: CoefficientVector, p: float, z: complex, grid: BoundaryGrid,
) -> tuple[float, float]:
    """lhs = |f(z)| against rhs = (2/(1-|z|))^(1/p) ||f||_{H^p}."""
    z = complex(z)
    if not abs(z) < 1.0:
        raise InvalidArguments(f"growth estimate needs |z| < 1, got |z|={abs(z)}")
    lhs = abs(complex(f.horner(z)))
    rhs = (2.0 / (1.0 - abs(z))) ** (1.0 / p) * hp_norm(f, p, grid)
    return lhs, rhs
