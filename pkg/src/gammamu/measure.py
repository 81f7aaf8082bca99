"""Finite positive Borel measures on (0,1) and endpoint-aware quadrature.

A measure is a finite list of interior atoms plus a finite list of
Jacobi-type densities ``w(t) = t^alpha (1-t)^beta rho(t)`` with polynomial
``rho >= 0``.  This covers Lebesgue measure, Dirac masses and every
endpoint-singular test measure the boundedness criterion distinguishes,
while keeping convergence of singular integrals decidable from the exact
``(alpha, beta)`` metadata.

All integration goes through Gauss-Jacobi rules whose weight exponents are
the *combined* exponents of the density and the integrand's singularity
hint; node counts start at 128 and double until two successive estimates
agree to 1e-12 (cap 2048, after which ``EstimateUnconverged`` is warned).
Integrands with a logarithmic singularity at t=0 use a geometrically graded
composite rule instead (``integrate_graded``).

Everything here is a pure function of immutable values and safe to share
across threads.
"""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Sequence

import mpmath
import numpy as np
from scipy.special import roots_jacobi

from .errors import (
    EstimateUnconverged,
    IndexOutOfRange,
    InvalidArguments,
    InvalidHint,
    NonConvergentIntegral,
)

QUAD_START = 128
QUAD_CAP = 2048
QUAD_ABS_TOL = 1e-12

# mpmath working precision for the extended-precision moment channel
_MP_DPS = 50


def _poly_val(coeffs: Sequence[float], t: np.ndarray) -> np.ndarray:
    return np.polynomial.polynomial.polyval(t, np.asarray(coeffs, dtype=float))


@dataclass(frozen=True)
class JacobiDensity:
    """Density ``t^alpha (1-t)^beta rho(t)`` with polynomial smooth factor rho.

    ``cutoff`` restricts the support to [cutoff, 1); it is set by
    :func:`restrict` and honoured by every quadrature path.  The exponents
    are exact metadata used for symbolic convergence decisions, never
    estimated.
    """

    alpha: float
    beta: float
    poly: tuple[float, ...] = (1.0,)
    cutoff: float = 0.0

    def __post_init__(self):
        if not (self.alpha > -1.0 and self.beta > -1.0):
            raise InvalidArguments(
                f"density exponents must exceed -1, got alpha={self.alpha}, beta={self.beta}")
        if not self.poly:
            raise InvalidArguments("density polynomial must have at least one coefficient")
        if not (0.0 <= self.cutoff < 1.0):
            raise InvalidArguments(f"cutoff must lie in [0,1), got {self.cutoff}")
        obj_poly = tuple(float(c) for c in self.poly)
        object.__setattr__(self, "poly", obj_poly)
        grid = np.linspace(0.0, 1.0, 513)
        vals = _poly_val(obj_poly, grid)
        scale = float(np.max(np.abs(vals))) or 1.0
        if float(np.min(vals)) < -1e-10 * scale:
            raise InvalidArguments("smooth factor rho must be nonnegative on [0,1]")

    def smooth_values(self, t: np.ndarray) -> np.ndarray:
        return _poly_val(self.poly, t)

    @property
    def poly_degree(self) -> int:
        return len(self.poly) - 1


@dataclass(frozen=True)
class Measure:
    """Finite positive Borel measure on (0,1): interior atoms plus densities."""

    atoms: tuple[tuple[float, float], ...] = ()
    densities: tuple[JacobiDensity, ...] = ()

    def __post_init__(self):
        cleaned = []
        for pos, w in self.atoms:
            pos, w = float(pos), float(w)
            if not (0.0 < pos < 1.0):
                raise InvalidArguments(f"atom position {pos} must lie strictly inside (0,1)")
            if not w > 0.0:
                raise InvalidArguments(f"atom weight {w} must be positive")
            cleaned.append((pos, w))
        object.__setattr__(self, "atoms", tuple(cleaned))
        object.__setattr__(self, "densities", tuple(self.densities))

    # -- constructors -----------------------------------------------------

    @classmethod
    def lebesgue(cls) -> "Measure":
        return cls(densities=(JacobiDensity(0.0, 0.0, (1.0,)),))

    @classmethod
    def dirac(cls, position: float, weight: float = 1.0) -> "Measure":
        return cls(atoms=((position, weight),))

    @classmethod
    def jacobi(cls, alpha: float, beta: float, poly: Sequence[float] = (1.0,)) -> "Measure":
        return cls(densities=(JacobiDensity(alpha, beta, tuple(poly)),))

    @classmethod
    def zero(cls) -> "Measure":
        return cls()

    def scaled(self, factor: float) -> "Measure":
        if not factor > 0.0:
            raise InvalidArguments("scale factor must be positive")
        atoms = tuple((t, w * factor) for t, w in self.atoms)
        densities = tuple(
            JacobiDensity(d.alpha, d.beta, tuple(c * factor for c in d.poly), d.cutoff)
            for d in self.densities)
        return Measure(atoms, densities)

    @property
    def is_zero(self) -> bool:
        return not self.atoms and not self.densities


# ---------------------------------------------------------------------------
# Gauss-Jacobi machinery
# ---------------------------------------------------------------------------

@lru_cache(maxsize=512)
def _jacobi_rule(m: int, a: float, b: float) -> tuple[np.ndarray, np.ndarray]:
    """Nodes/weights for ``int_0^1 t^a (1-t)^b h(t) dt ~ sum w_i h(t_i)``."""
    with np.errstate(invalid="ignore"):  # scipy's recurrence warns benignly
        x, w = roots_jacobi(m, b, a)  # scipy weight (1-x)^b (1+x)^a on [-1,1]
    t = 0.5 * (x + 1.0)
    w01 = w * (0.5 ** (a + b + 1.0))
    t.setflags(write=False)
    w01.setflags(write=False)
    return t, w01


def _check_hint(hint) -> tuple[float, float]:
    if hint is None:
        return 0.0, 0.0
    try:
        left, right = float(hint[0]), float(hint[1])
    except (TypeError, ValueError, IndexError) as exc:
        raise InvalidHint(f"singularity hint must be a pair of reals, got {hint!r}") from exc
    if not (math.isfinite(left) and math.isfinite(right)):
        raise InvalidHint("singularity hint exponents must be finite")
    if left > 1e-12 or right > 1e-12:
        raise InvalidHint("singularity hint exponents describe singular decay and must be <= 0")
    return left, right


def _density_nodes(d: JacobiDensity, hint: tuple[float, float], m: int):
    """Nodes and full-integrand weights for one density under a hint.

    The returned weights satisfy ``int g dmu_d ~ sum wt_i g(t_i)`` with ``g``
    the *full* integrand including its singular endpoint factors; the hint's
    power parts are absorbed into the Jacobi weight.
    """
    hl, hr = hint
    b_eff = d.beta + hr
    if b_eff <= -1.0:
        raise NonConvergentIntegral(
            f"combined right endpoint exponent {b_eff} <= -1", endpoint=1.0)
    if d.cutoff == 0.0:
        a_eff = d.alpha + hl
        if a_eff <= -1.0:
            raise NonConvergentIntegral(
                f"combined left endpoint exponent {a_eff} <= -1", endpoint=0.0)
        t, w = _jacobi_rule(m, a_eff, b_eff)
        wt = w * d.smooth_values(t)
        if hl != 0.0:
            wt = wt * t ** (-hl)
        if hr != 0.0:
            wt = wt * (1.0 - t) ** (-hr)
        return t, wt
    # left cutoff: substitute t = c + (1-c) s, only the right endpoint stays singular
    c = d.cutoff
    s, w = _jacobi_rule(m, 0.0, b_eff)
    t = c + (1.0 - c) * s
    wt = w * (1.0 - c) ** (1.0 + b_eff) * t ** d.alpha * d.smooth_values(t)
    if hr != 0.0:
        wt = wt * (1.0 - t) ** (-hr)
    return t, wt


def _atom_arrays(mu: Measure) -> tuple[np.ndarray, np.ndarray]:
    if not mu.atoms:
        return np.empty(0), np.empty(0)
    t = np.array([a[0] for a in mu.atoms])
    w = np.array([a[1] for a in mu.atoms])
    return t, w


def integrate(mu: Measure, g: Callable[[np.ndarray], np.ndarray], hint=None) -> float:
    """Integrate ``g`` against ``mu`` with endpoint-exponent-aware quadrature.

    ``g`` receives an ndarray of interior nodes and must return values of the
    full integrand there.  ``hint = (left, right)`` gives the power exponents
    of g's endpoint singularities (both <= 0); combined exponents below -1
    raise :class:`NonConvergentIntegral`.  Node counts double from 128 until
    two successive estimates differ by less than 1e-12 (cap 2048, then an
    :class:`EstimateUnconverged` warning is issued).
    """
    hint = _check_hint(hint)
    t_at, w_at = _atom_arrays(mu)
    total = float(np.real(w_at @ np.asarray(g(t_at)))) if len(t_at) else 0.0
    if not mu.densities:
        return total

    def density_sum(m: int) -> float:
        acc = 0.0
        for d in mu.densities:
            t, wt = _density_nodes(d, hint, m)
            acc += float(np.real(wt @ np.asarray(g(t))))
        return acc

    m = QUAD_START
    prev = density_sum(m)
    while True:
        m *= 2
        cur = density_sum(m)
        if abs(cur - prev) < QUAD_ABS_TOL:
            return total + cur
        if m >= QUAD_CAP:
            warnings.warn(
                f"quadrature did not stabilise to {QUAD_ABS_TOL} at {m} nodes",
                EstimateUnconverged, stacklevel=2)
            return total + cur
        prev = cur


def integrate_columns(
    mu: Measure,
    g: Callable[[np.ndarray], np.ndarray],
    hint=None,
    tol: float = 1e-9,
    start: int = QUAD_START,
    cap: int = QUAD_CAP,
) -> tuple[np.ndarray, bool]:
    """Vectorised integrate: ``g(t)`` returns shape (..., len(t)), integrated
    over the last axis.  Returns (values, converged)."""
    hint = _check_hint(hint)
    if mu.is_zero:
        probe = np.asarray(g(np.empty(0)))
        return np.zeros(probe.shape[:-1], dtype=probe.dtype), True
    t_at, w_at = _atom_arrays(mu)
    atom_part = np.asarray(g(t_at)) @ w_at if len(t_at) else 0.0

    if not mu.densities:
        return np.asarray(atom_part), True

    def density_sum(m: int):
        acc = None
        for d in mu.densities:
            t, wt = _density_nodes(d, hint, m)
            part = np.asarray(g(t)) @ wt
            acc = part if acc is None else acc + part
        return acc

    m = start
    prev = density_sum(m)
    converged = False
    while True:
        m *= 2
        cur = density_sum(m)
        scale = max(1.0, float(np.max(np.abs(cur))))
        if float(np.max(np.abs(cur - prev))) < tol * scale:
            converged = True
            break
        if m >= cap:
            break
        prev = cur
    return atom_part + cur, converged


def integrate_graded(
    mu: Measure,
    g: Callable[[np.ndarray], np.ndarray],
    right_exponent: float = 0.0,
    panel_order: int = 24,
    right_order: int = 96,
) -> float:
    """Integrate ``g`` against ``mu`` when g has a logarithmic (or milder)
    singularity at t=0 and behaves like ``(1-t)^right_exponent`` at t=1.

    Uses geometrically graded Gauss-Legendre panels toward 0 and a
    Gauss-Jacobi rule on the right half; this resolves log endpoints to
    near machine precision where plain doubling stalls.
    """
    t_at, w_at = _atom_arrays(mu)
    total = float(w_at @ np.asarray(g(t_at))) if len(t_at) else 0.0
    xg, wg = np.polynomial.legendre.leggauss(panel_order)
    sg = 0.5 * (xg + 1.0)
    wgs = 0.5 * wg
    for d in mu.densities:
        b_eff = d.beta + right_exponent
        if b_eff <= -1.0:
            raise NonConvergentIntegral(
                f"combined right endpoint exponent {b_eff} <= -1", endpoint=1.0)
        # right piece [c0, 1) with c0 = max(cutoff, 1/2)
        c0 = max(d.cutoff, 0.5)
        s, w = _jacobi_rule(right_order, 0.0, b_eff)
        t = 1.0 - (1.0 - c0) * (1.0 - s)
        wt = w * (1.0 - c0) ** (1.0 + b_eff) * t ** d.alpha * d.smooth_values(t)
        if right_exponent != 0.0:
            wt = wt * (1.0 - t) ** (-right_exponent)
        total += float(wt @ np.asarray(g(t)))
        # graded panels [cutoff, 1/2)
        if d.cutoff >= 0.5:
            continue
        n_panels = max(60, int(math.ceil(58.0 / (d.alpha + 1.0))) + 15)
        hi = 0.5
        for _ in range(n_panels):
            lo = max(hi / 2.0, d.cutoff)
            t = lo + (hi - lo) * sg
            wt = wgs * (hi - lo) * t ** d.alpha * (1.0 - t) ** d.beta * d.smooth_values(t)
            total += float(wt @ np.asarray(g(t)))
            if lo == d.cutoff:
                break
            hi = lo
    return total


def total_mass(mu: Measure) -> float:
    return integrate(mu, lambda t: np.ones_like(t))


# ---------------------------------------------------------------------------
# Moments and forward differences
# ---------------------------------------------------------------------------

def moment(mu: Measure, n: int) -> float:
    """n-th power moment ``int t^n dmu`` via quadrature (no singularity hint)."""
    if n < 0 or int(n) != n:
        raise InvalidArguments(f"moment index must be a nonnegative integer, got {n}")
    n = int(n)
    return integrate(mu, lambda t: t ** n)


def moment_hp(mu: Measure, n: int) -> mpmath.mpf:
    """Extended-precision moment via closed Beta/incomplete-Beta forms.

    Feeds the forward-difference matrix path, where double-precision input
    rounding alone is amplified past any useful tolerance around order 30.
    """
    if n < 0 or int(n) != n:
        raise InvalidArguments(f"moment index must be a nonnegative integer, got {n}")
    n = int(n)
    with mpmath.workdps(_MP_DPS):
        acc = mpmath.mpf(0)
        for pos, w in mu.atoms:
            acc += mpmath.mpf(w) * mpmath.mpf(pos) ** n
        for d in mu.densities:
            a = mpmath.mpf(d.alpha)
            b = mpmath.mpf(d.beta)
            for j, c in enumerate(d.poly):
                if c == 0.0:
                    continue
                acc += mpmath.mpf(c) * mpmath.betainc(
                    a + n + j + 1, b + 1, x1=mpmath.mpf(d.cutoff), x2=1)
        return acc


@dataclass(frozen=True)
class MomentSequence:
    """Truncated moment sequence mu_0..mu_N of a measure.

    ``hp`` carries the extended-precision channel used by the difference
    recurrence; plain float sequences remain usable but are documented as
    numerically unsafe past difference order ~40.
    """

    values: tuple[float, ...]
    source: Measure | None = None
    hp: tuple | None = field(default=None, compare=False, repr=False)

    def __len__(self) -> int:
        return len(self.values)

    @classmethod
    def from_measure(cls, mu: Measure, count: int) -> "MomentSequence":
        if count < 1:
            raise InvalidArguments("moment count must be >= 1")
        hp = tuple(moment_hp(mu, n) for n in range(count))
        values = tuple(float(v) for v in hp)
        return cls(values=values, source=mu, hp=hp)


def moments(mu: Measure, count: int) -> MomentSequence:
    return MomentSequence.from_measure(mu, count)


def forward_difference(seq: MomentSequence, order: int, start: int = 0) -> float:
    """Iterated forward difference ``Delta^order mu_start``.

    Runs the naive recurrence, in extended precision when the sequence
    carries its high-precision channel.
    """
    if order < 0 or start < 0:
        raise InvalidArguments("difference order and start index must be nonnegative")
    if start + order >= len(seq.values):
        raise IndexOutOfRange(
            f"need {start + order + 1} moments, sequence holds {len(seq.values)}")
    if seq.hp is not None:
        with mpmath.workdps(_MP_DPS):
            work = list(seq.hp[start:start + order + 1])
            for _ in range(order):
                work = [a - b for a, b in zip(work[:-1], work[1:])]
            return float(work[0])
    work = list(seq.values[start:start + order + 1])
    for _ in range(order):
        work = [a - b for a, b in zip(work[:-1], work[1:])]
    return work[0]


def log_binomial(n: int, k: int) -> float:
    """``ln C(n,k)`` via log-gamma; relative error <= 1e-13 for n <= 4096."""
    if k < 0 or n < 0 or int(n) != n or int(k) != k:
        raise InvalidArguments("log_binomial requires nonnegative integers")
    if k > n:
        raise InvalidArguments(f"k={k} exceeds n={n}")
    return math.lgamma(n + 1) - math.lgamma(k + 1) - math.lgamma(n - k + 1)


def restrict(mu: Measure, delta: float) -> Measure:
    """Measure restricted to [delta, 1): atoms below delta dropped, densities
    carry a left cutoff marker honoured by all quadrature paths."""
    if not (0.0 < delta < 1.0):
        raise InvalidArguments(f"delta must lie in (0,1), got {delta}")
    atoms = tuple((t, w) for t, w in mu.atoms if t >= delta)
    densities = tuple(
        JacobiDensity(d.alpha, d.beta, d.poly, max(d.cutoff, delta))
        for d in mu.densities)
    return Measure(atoms, densities)


# ---------------------------------------------------------------------------
# Log-space quadrature sources for binomial-moment tables
# ---------------------------------------------------------------------------

def binomial_table_sources(mu: Measure, max_degree: int, m: int | None = None):
    """Nodes ``t_i`` and log-weights for exp-sum evaluation of
    ``int t^k (1-t)^n dmu`` with ``k + n <= max_degree``.

    Returns ``(t, logw, exact)``.  When every density is cutoff-free the node
    count is chosen for polynomial exactness and ``exact`` is True; otherwise
    the caller drives a doubling loop through ``m``.
    """
    ts, lws = [], []
    for pos, w in mu.atoms:
        ts.append(np.array([pos]))
        lws.append(np.array([math.log(w)]))
    exact = True
    for d in mu.densities:
        if d.cutoff == 0.0:
            md = (max_degree + d.poly_degree) // 2 + 1 if m is None else m
            t, wt = _density_nodes(d, (0.0, 0.0), md)
        else:
            exact = False
            md = m if m is not None else QUAD_START
            t, wt = _density_nodes(d, (0.0, 0.0), md)
        with np.errstate(divide="ignore"):
            lw = np.log(wt)
        keep = np.isfinite(lw)
        ts.append(t[keep])
        lws.append(lw[keep])
    if not ts:
        return np.empty(0), np.empty(0), True
    return np.concatenate(ts), np.concatenate(lws), exact


# ---------------------------------------------------------------------------
# Measure literals and JSON documents
# ---------------------------------------------------------------------------

def measure_to_json(mu: Measure) -> dict:
    doc: dict = {
        "atoms": [{"t": t, "w": w} for t, w in mu.atoms],
        "densities": [],
    }
    for d in mu.densities:
        entry = {"alpha": d.alpha, "beta": d.beta, "poly": list(d.poly)}
        if d.cutoff > 0.0:
            entry["cutoff"] = d.cutoff
        doc["densities"].append(entry)
    return doc


def measure_from_json(doc) -> Measure:
    if isinstance(doc, str):
        doc = json.loads(doc)
    atoms = tuple((float(a["t"]), float(a.get("w", 1.0))) for a in doc.get("atoms", []))
    densities = tuple(
        JacobiDensity(
            float(d["alpha"]), float(d["beta"]),
            tuple(float(c) for c in d.get("poly", [1.0])),
            float(d.get("cutoff", 0.0)))
        for d in doc.get("densities", []))
    return Measure(atoms, densities)


def parse_measure(spec: str) -> Measure:
    """Parse a measure literal.

    Accepted forms: ``lebesgue``, ``zero``, ``dirac:<t>[:<w>]``,
    ``jacobi:a=<alpha>,b=<beta>[,poly=<c0,c1,...>]``, an inline JSON document,
    or ``@<path>`` pointing at a JSON file.
    """
    spec = spec.strip()
    if spec.startswith("{"):
        return measure_from_json(spec)
    if spec.startswith("@"):
        with open(spec[1:], "r", encoding="utf-8") as fh:
            return measure_from_json(json.load(fh))
    head, _, body = spec.partition(":")
    head = head.lower()
    if head == "lebesgue":
        return Measure.lebesgue()
    if head == "zero":
        return Measure.zero()
    if head == "dirac":
        parts = body.split(":")
        if not parts or not parts[0]:
            raise InvalidArguments("dirac literal needs a position: dirac:<t>[:<w>]")
        pos = float(parts[0])
        wgt = float(parts[1]) if len(parts) > 1 else 1.0
        return Measure.dirac(pos, wgt)
    if head == "jacobi":
        alpha = beta = None
        poly: list[float] | None = None
        in_poly = False
        for token in body.split(","):
            token = token.strip()
            if "=" in token:
                key, _, val = token.partition("=")
                key = key.strip().lower()
                if key == "a":
                    alpha, in_poly = float(val), False
                elif key == "b":
                    beta, in_poly = float(val), False
                elif key == "poly":
                    poly, in_poly = [float(val)], True
                else:
                    raise InvalidArguments(f"unknown jacobi field {key!r}")
            elif in_poly and token:
                poly.append(float(token))
            elif token:
                raise InvalidArguments(f"stray token {token!r} in jacobi literal")
        if alpha is None or beta is None:
            raise InvalidArguments("jacobi literal needs a=<alpha> and b=<beta>")
        return Measure.jacobi(alpha, beta, tuple(poly) if poly else (1.0,))
    raise InvalidArguments(f"unrecognised measure literal {spec!r}")
