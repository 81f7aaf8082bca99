"""Quantitative verification of the structure and boundedness theorems.

Implements the psi_p boundedness criterion (convergence decided symbolically
from the exact density exponents), the finite-section spectral estimator for
the p = 2 operator norm, the f_a probe family approaching the exact norm,
proof-derived one-sided bounds, T_t norm bounds, and the compactness /
complete-continuity trend probes.

Finite-section norms are exposed only for p = 2, where the H^p norm is a
coefficient l^2 norm; for other p the matrix singular value is not the
operator norm and only the probe family is offered.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    CriterionViolated,
    InvalidArguments,
    IterationCapReached,
    NonConvergentIntegral,
    ScheduleInvalid,
)
from .hardy import (
    BoundaryFunction,
    BoundaryGrid,
    fa_hp_norm_exact,
    grid_norm,
    h1_kernel_norm,
    kernel_kw,
)
from .matrices import composition_matrix, gamma_matrix
from .measure import (
    Measure,
    integrate,
    integrate_columns,
    integrate_graded,
    restrict,
    total_mass,
)
from .operators import OperatorHandle, apply_gamma_boundary

POWER_ITERATION_TOL = 1e-12
POWER_ITERATION_CAP = 10_000


@dataclass(frozen=True)
class Divergent:
    """Marker returned when a criterion integral diverges at an endpoint."""

    endpoint: float

    def __bool__(self) -> bool:  # a divergent value is not a usable number
        return False


@dataclass(frozen=True)
class NormEstimate:
    value: float
    method: str
    params: dict = field(default_factory=dict)
    converged: bool = True
    iterations: int = 0


@dataclass(frozen=True)
class ProbeReport:
    schedule: tuple[float, ...]
    responses: tuple[float, ...]
    target: float | None
    verdict: bool
    detail: str = ""
    extras: dict = field(default_factory=dict)


def psi_weight(t, p: float):
    """The boundedness weight psi_p(t) = t^(1/p-1) (1-t)^(-1/p) for p > 1,
    log(e/t)/(1-t) for p = 1.  Written as (t/(1-t))^(1/p)/t so that the
    one-atom value psi_2(1/2) = 2 comes out exact."""
    t = np.asarray(t, dtype=float)
    if p > 1.0:
        return (t / (1.0 - t)) ** (1.0 / p) / t
    return (1.0 - np.log(t)) / (1.0 - t)


def psi_integral(mu: Measure, p: float):
    """``int psi_p dmu`` or a :class:`Divergent` marker with the failing endpoint.

    Convergence is decided symbolically from the density exponents:
    for p > 1 a cutoff-free density needs alpha > -1/p and beta > 1/p - 1;
    for p = 1 any alpha > -1 beats the log factor but beta > 0 is required.
    Atoms always contribute finitely.
    """
    if p < 1.0:
        raise InvalidArguments(f"p must be >= 1, got {p}")
    for d in mu.densities:
        if p > 1.0:
            if d.cutoff == 0.0 and d.alpha <= -1.0 / p:
                return Divergent(endpoint=0.0)
            if d.beta <= 1.0 / p - 1.0:
                return Divergent(endpoint=1.0)
        else:
            if d.beta <= 0.0:
                return Divergent(endpoint=1.0)
    if mu.is_zero:
        return 0.0
    if p > 1.0:
        return integrate(mu, lambda t: psi_weight(t, p), hint=(1.0 / p - 1.0, -1.0 / p))
    return integrate_graded(mu, lambda t: psi_weight(t, 1.0), right_exponent=-1.0)


# ---------------------------------------------------------------------------
# Finite-section spectral estimator
# ---------------------------------------------------------------------------

def largest_singular_value(entries: np.ndarray) -> tuple[float, bool, int]:
    """Largest singular value by power iteration on the normal form.

    Deterministic all-ones start; stops when the singular-value estimate's
    relative change drops below 1e-12; on stagnation with a large residual,
    restarts once from the first coordinate basis vector.  Returns
    (value, converged, iterations).
    """
    n = entries.shape[0]
    v = np.ones(n) / math.sqrt(n)
    restarted = False
    sigma = 0.0
    for it in range(1, POWER_ITERATION_CAP + 1):
        u = entries @ v
        s = float(np.linalg.norm(u))
        if s == 0.0:
            return 0.0, True, it
        w = entries.T @ u
        nw = float(np.linalg.norm(w))
        v_next = w / nw
        if it > 1 and abs(s - sigma) <= POWER_ITERATION_TOL * max(s, 1e-300):
            residual = float(np.linalg.norm(w - (s * s) * v)) / max(s * s, 1e-300)
            if residual > 1e-9 and not restarted:
                restarted = True
                v = np.zeros(n)
                v[0] = 1.0
                sigma = 0.0
                continue
            return s, True, it
        sigma = s
        v = v_next
    return sigma, False, POWER_ITERATION_CAP


def finite_section_norm(mu: Measure, n: int) -> NormEstimate:
    """sigma_max of the N x N Gamma section; meaningful as an operator-norm
    estimate only for p = 2 (Parseval), monotone nondecreasing in N."""
    matrix = gamma_matrix(mu, n)
    value, converged, iters = largest_singular_value(matrix.entries)
    if not converged:
        warnings.warn("power iteration hit its iteration cap",
                      IterationCapReached, stacklevel=2)
    return NormEstimate(value=value, method="finiteSection",
                        params={"N": n}, converged=converged, iterations=iters)


# ---------------------------------------------------------------------------
# The f_a probe machinery
# ---------------------------------------------------------------------------

def lambda_values(mu: Measure, a: float, points: np.ndarray,
                  tol: float = 1e-7) -> np.ndarray:
    """Lambda_a(z) = int (1-(1-t)z)^(a-1) (1-t)^(-a) dmu(t) at the given
    boundary points (the eigenvalue function of the f_a probe).

    The default tolerance reflects the probe use: responses carry
    percent-scale acceptance margins, so 1e-7 on Lambda is already far below
    any decision threshold.
    """
    if not (0.0 <= a < 1.0):
        raise InvalidArguments(f"probe exponent must lie in [0,1), got {a}")
    out = np.empty(len(points), dtype=complex)
    chunk = 8192
    for i0 in range(0, len(points), chunk):
        z = points[i0:i0 + chunk, None]

        def block(t, z=z):
            if len(t) == 0:
                return np.zeros((z.shape[0], 0), dtype=complex)
            base = 1.0 - (1.0 - t)[None, :] * z
            vals = np.power(base, a - 1.0)
            return vals * (1.0 - t)[None, :] ** (-a)

        vals, _ = integrate_columns(mu, block, hint=(0.0, -a), tol=tol)
        out[i0:i0 + chunk] = vals
    return out


def lambda_at_one(mu: Measure, a: float) -> float:
    """Lambda_a(1) = int t^(a-1) (1-t)^(-a) dmu(t)."""
    return integrate(mu, lambda t: (t / (1.0 - t)) ** a / t, hint=(a - 1.0, -a))


def norm_probe_fa(
    mu: Measure,
    p: float,
    a_schedule,
    delta: float = 0.0,
    grid: BoundaryGrid | None = None,
    rel_tol: float = 0.05,
) -> ProbeReport:
    """Norm probe along f_a: responses estimate ||Gamma^delta_mu(f_a)|| / ||f_a||
    in H^p, converging to the psi_p integral of the restricted measure.

    The raw grid ratio systematically loses the singular mass of f_a
    concentrated below the first grid node (for a near 1/p that mass lives at
    angular scales ~ exp(-1/(1/p - a)), far below any realisable grid), so the
    response corrects the truncated tail through the closed form
    ``||f_a||_p^p = Gamma(1-ap)/Gamma(1-ap/2)^2`` and the continuity of
    Lambda_a at z = 1:

        R^p = |Lambda_a(1)|^p + mean_grid(|f_a|^p (|Lambda_a|^p - |Lambda_a(1)|^p)) / ||f_a||_p^p

    The uncorrected grid ratio is reported in ``extras['grid_ratios']``.
    """
    if p < 1.0:
        raise InvalidArguments(f"p must be >= 1, got {p}")
    if not (0.0 <= delta <= 0.5):
        raise InvalidArguments(f"delta must lie in [0, 1/2], got {delta}")
    schedule = tuple(float(a) for a in a_schedule)
    if any(a >= 1.0 / p or a < 0.0 for a in schedule):
        raise ScheduleInvalid(f"every probe exponent must lie in [0, 1/p), got {schedule}")
    if any(b <= a for a, b in zip(schedule, schedule[1:])):
        raise ScheduleInvalid("probe schedule must be strictly increasing")
    grid = grid or BoundaryGrid(8192)
    restricted = restrict(mu, delta) if delta > 0.0 else mu
    target = psi_integral(restricted, p)
    if isinstance(target, Divergent):
        raise NonConvergentIntegral(
            f"psi_{p} diverges for the restricted measure at endpoint {target.endpoint}",
            endpoint=target.endpoint)

    # Lambda and |f_a| are conjugate-symmetric across theta = pi, so on even
    # grids the means over the lower half equal the full-grid means exactly
    if grid.m % 2 == 0:
        theta = grid.thetas[: grid.m // 2]
        points = grid.points[: grid.m // 2]
    else:
        theta = grid.thetas
        points = grid.points
    responses, grid_ratios = [], []
    for a in schedule:
        lam = lambda_values(restricted, a, points, tol=3e-6)
        fap = (2.0 * np.sin(theta / 2.0)) ** (-a * p)
        grid_ratio = float((np.mean(fap * np.abs(lam) ** p) / np.mean(fap)) ** (1.0 / p))
        grid_ratios.append(grid_ratio)
        if a == 0.0:
            # f_0 == 1 carries no singular mass; the correction cancels exactly
            responses.append(float(np.mean(np.abs(lam) ** p) ** (1.0 / p)))
            continue
        try:
            lam1 = lambda_at_one(restricted, a)
        except NonConvergentIntegral as exc:
            raise ScheduleInvalid(
                f"Lambda_a(1) diverges at a={a}; the tail-corrected response needs "
                f"schedule exponents above the measure's left exponent") from exc
        f_norm_p = fa_hp_norm_exact(a, p) ** p
        correction = float(np.mean(fap * (np.abs(lam) ** p - lam1 ** p)))
        responses.append((lam1 ** p + correction / f_norm_p) ** (1.0 / p))

    increasing = all(b > a for a, b in zip(responses, responses[1:]))
    within = abs(responses[-1] - target) <= rel_tol * target if target > 0 else False
    return ProbeReport(
        schedule=schedule,
        responses=tuple(responses),
        target=float(target),
        verdict=increasing and within,
        detail=f"increasing={increasing}, final within {rel_tol:.0%} of target={within}",
        extras={"grid_ratios": tuple(grid_ratios), "delta": delta, "p": p},
    )


@dataclass(frozen=True)
class LambdaBoundResult:
    holds: bool
    bound: float
    min_modulus: float
    tightest_index: int  # node where |Lambda| - bound is smallest (zeta = -1 side)
    slackest_index: int  # node where the bound is loosest (zeta -> 1 side)

    def __bool__(self) -> bool:
        return self.holds


def lambda_lower_bound_check(mu: Measure, a: float, grid: BoundaryGrid,
                             tol: float = 1e-9) -> LambdaBoundResult:
    """Proof inequality |Lambda_a(zeta)| >= 2^(a-1) int (1-t)^(-a) dmu at every
    grid node.  The bound is loosest near zeta = 1 (where |Lambda| peaks) and
    tightest near zeta = -1; both witness nodes are reported."""
    if not (0.0 < a < 1.0):
        raise InvalidArguments(f"exponent must lie in (0,1), got {a}")
    lam = np.abs(lambda_values(mu, a, grid.points))
    bound = 2.0 ** (a - 1.0) * integrate(
        mu, lambda t: (1.0 - t) ** (-a), hint=(0.0, -a))
    margins = lam - bound
    return LambdaBoundResult(
        holds=bool(np.all(margins >= -tol)),
        bound=float(bound),
        min_modulus=float(np.min(lam)),
        tightest_index=int(np.argmin(margins)),
        slackest_index=int(np.argmax(margins)),
    )


def proof_lower_bounds(mu: Measure, p: float):
    """The two proof-derived lower bounds for the H^p operator norm:
    ``2^(1/p-1) int (1-t)^(-1/p) dmu`` and ``2^(-1/p) int t^(1/p-1) dmu``.
    Divergent integrals surface as :class:`Divergent` markers."""
    if p <= 1.0:
        raise InvalidArguments(f"proof bounds need p > 1, got {p}")
    inv_p = 1.0 / p
    if any(d.beta <= inv_p - 1.0 for d in mu.densities):
        first = Divergent(endpoint=1.0)
    else:
        first = 2.0 ** (inv_p - 1.0) * integrate(
            mu, lambda t: (1.0 - t) ** (-inv_p), hint=(0.0, -inv_p))
    if any(d.cutoff == 0.0 and d.alpha <= -inv_p for d in mu.densities):
        second = Divergent(endpoint=0.0)
    else:
        second = 2.0 ** (-inv_p) * integrate(
            mu, lambda t: t ** (inv_p - 1.0), hint=(inv_p - 1.0, 0.0))
    return first, second


def t_norm_bound_check(t: float, p: float, n: int) -> tuple[float, float]:
    """(finite-section singular value of T_t, psi_p(t) norm bound).

    The contract ``section <= bound + 1e-9`` is meaningful at p = 2 where the
    bound holds with constant 1; for 1 <= p < 2 no explicit constant is
    available and only the bound's shape is reported.
    """
    if p < 1.0:
        raise InvalidArguments(f"p must be >= 1, got {p}")
    matrix = composition_matrix(t, n)
    section, converged, _ = largest_singular_value(matrix.entries)
    if not converged:
        warnings.warn("power iteration hit its iteration cap",
                      IterationCapReached, stacklevel=2)
    bound = float(psi_weight(np.array(t), p))
    return section, bound


# ---------------------------------------------------------------------------
# Compactness and complete-continuity probes
# ---------------------------------------------------------------------------

def compactness_probe(
    mu: Measure,
    p: float,
    r_schedule,
    grid: BoundaryGrid | None = None,
    tol: float = 1e-3,
) -> ProbeReport:
    """Non-compactness witness: ||Gamma_mu k_r||_{H^p} stays above
    totalMass(mu) / 2^(1/p) as r -> 1 (a compact operator would send the
    weakly-null kernels k_r to norm-null images)."""
    if not p > 1.0:
        raise InvalidArguments(f"compactness probe needs p > 1, got {p}")
    schedule = tuple(float(r) for r in r_schedule)
    if any(not (0.0 <= r < 1.0) for r in schedule):
        raise ScheduleInvalid("kernel radii must lie in [0,1)")
    if any(b <= a for a, b in zip(schedule, schedule[1:])):
        raise ScheduleInvalid("kernel schedule must be strictly increasing")
    conv = psi_integral(mu, p)
    if isinstance(conv, Divergent):
        raise NonConvergentIntegral(
            f"psi_{p} diverges at endpoint {conv.endpoint}; Gamma_mu is unbounded on H^p",
            endpoint=conv.endpoint)
    grid = grid or BoundaryGrid(8192)
    q = p / (p - 1.0)
    handle = OperatorHandle(mu, 2, grid)
    floor = total_mass(mu) / 2.0 ** (1.0 / p)
    responses = []
    for r in schedule:
        kernel = kernel_kw(r, q).boundary
        values = apply_gamma_boundary(handle, kernel)
        responses.append(grid_norm(values, p))
    verdict = all(resp >= floor - tol for resp in responses)
    return ProbeReport(
        schedule=schedule,
        responses=tuple(responses),
        target=floor,
        verdict=verdict,
        detail=f"non-compactness floor totalMass/2^(1/p) = {floor:.6g}",
        extras={"p": p},
    )


def complete_continuity_probe(
    mu: Measure,
    r_schedule,
    grid: BoundaryGrid | None = None,
) -> ProbeReport:
    """Trend probe for complete continuity on H^1.

    Refuses to run (``CriterionViolated``) unless psi_1 converges, i.e.
    Gamma_mu is bounded on H^1.  Responses are ||Gamma_mu k_r||_{H^1} scaled
    by the kernel growth scale log(e/(1-r)); along an increasing r-schedule
    the responses decrease strictly.  Dividing by the computed ||k_r||_{H^1}
    instead produces an *increasing* sequence (both are reported; see
    ``extras['kernel_normalized']``): the normalised kernels are not weakly
    null in the non-reflexive H^1, so no decay of that ratio is implied.

    Also returns the Fejer-Riesz segment integrals of Gamma_mu k_r computed
    from the per-t closed form ``(1/(1-t)) log((1-rt)/(t(1-r)))``.
    """
    conv = psi_integral(mu, 1.0)
    if isinstance(conv, Divergent):
        raise CriterionViolated(
            f"psi_1 diverges at endpoint {conv.endpoint}; Gamma_mu is not bounded on H^1")
    schedule = tuple(float(r) for r in r_schedule)
    if any(not (0.0 < r < 1.0) for r in schedule):
        raise ScheduleInvalid("kernel radii must lie in (0,1)")
    if any(b <= a for a, b in zip(schedule, schedule[1:])):
        raise ScheduleInvalid("kernel schedule must be strictly increasing")
    grid = grid or BoundaryGrid(8192)
    handle = OperatorHandle(mu, 2, grid)
    responses, kernel_normalized, segments = [], [], []
    for r in schedule:
        h1 = h1_kernel_norm(r, grid)  # enforces the grid-resolution precondition
        scale = math.log(math.e / (1.0 - r))
        kernel = BoundaryFunction(
            evaluator=lambda z, r=r: 1.0 / (1.0 - r * np.asarray(z, dtype=complex)),
            label=f"k_r(r={r})")
        raw = grid_norm(apply_gamma_boundary(handle, kernel), 1.0)
        responses.append(raw / scale)
        kernel_normalized.append(raw / h1.value)
        seg = integrate_graded(
            mu, lambda t, r=r: np.log((1.0 - r * t) / (t * (1.0 - r))) / (1.0 - t))
        segments.append(seg / scale)
    decreasing = all(b < a for a, b in zip(responses, responses[1:]))
    return ProbeReport(
        schedule=schedule,
        responses=tuple(responses),
        target=None,
        verdict=decreasing,
        detail="responses are ||Gamma k_r||_H1 / log(e/(1-r)); verdict = strictly decreasing",
        extras={
            "kernel_normalized": tuple(kernel_normalized),
            "segment_integrals": tuple(segments),
        },
    )


def segment_integral_direct(mu: Measure, r: float, tol: float = 1e-10) -> float:
    """Cross-check for the probe's segment closed form: adaptive outer
    quadrature over s of ``int dmu(t) / (1 - r t - (1-t) s)``.

    The inner integrand develops a boundary layer at t -> 0 as s -> 1, so the
    inner integral uses the graded rule.
    """
    from scipy.integrate import quad

    def inner(s: float) -> float:
        return integrate_graded(mu, lambda t: 1.0 / (1.0 - r * t - (1.0 - t) * s))

    return quad(inner, 0.0, 1.0, epsabs=tol, epsrel=tol, limit=200)[0]
