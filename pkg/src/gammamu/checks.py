"""Invariant suites for the ``check`` subcommand.

Runs the cross-module invariants at fixed seeds and sizes and reports one
pass/fail line per invariant.  ``fast`` keeps everything at small sizes;
``full`` runs the acceptance-scale variants including the divergence growth
check and the kernel probe floor.
"""

from __future__ import annotations

import math
from typing import Callable

import numpy as np

from . import analysis, hardy, matrices, measure, operators
from .measure import Measure

SEED = 20240811


def _test_measures() -> dict[str, Measure]:
    return {
        "lebesgue": Measure.lebesgue(),
        "2*lebesgue": Measure.lebesgue().scaled(2.0),
        "dirac(0.3)": Measure.dirac(0.3),
        "dirac(0.5)": Measure.dirac(0.5),
        "2(1-t)dt": Measure.jacobi(0.0, 1.0, (2.0,)),
        "jacobi(-0.3,0.2)": Measure.jacobi(-0.3, 0.2),
        "mixture": Measure(atoms=((0.25, 0.5),),
                           densities=(measure.JacobiDensity(0.0, 0.0, (0.5,)),)),
    }


def _check_binomial_row_identity(full: bool) -> tuple[bool, str]:
    n_max = 16 if full else 10
    worst = 0.0
    for mu in _test_measures().values():
        mass = measure.total_mass(mu)
        for n in range(n_max + 1):
            total = sum(
                math.exp(measure.log_binomial(n, k))
                * measure.integrate(mu, lambda t, k=k, n=n: t ** k * (1.0 - t) ** (n - k))
                for k in range(n + 1))
            worst = max(worst, abs(total - mass))
    return worst < 1e-10, f"max deviation {worst:.2e}"


def _check_total_monotonicity(full: bool) -> tuple[bool, str]:
    n_max = 24 if full else 16
    worst = 0.0
    for mu in _test_measures().values():
        seq = measure.moments(mu, n_max + 1)
        for n in range(n_max + 1):
            for k in range(n + 1):
                worst = min(worst, measure.forward_difference(seq, n - k, k))
    return worst >= -1e-10, f"min iterated difference {worst:.2e}"


def _check_additivity(full: bool) -> tuple[bool, str]:
    parts = _test_measures()
    mix = Measure(atoms=parts["dirac(0.3)"].atoms,
                  densities=parts["2(1-t)dt"].densities)
    g = lambda t: np.cos(3.0 * t) + t ** 2  # noqa: E731
    lhs = measure.integrate(mix, g)
    rhs = measure.integrate(parts["dirac(0.3)"], g) + measure.integrate(parts["2(1-t)dt"], g)
    return abs(lhs - rhs) < 1e-14, f"|mixture - sum| = {abs(lhs - rhs):.2e}"


def _check_quadrature_consistency(full: bool) -> tuple[bool, str]:
    worst = 0.0
    leb = Measure.lebesgue()
    for n in range(0, 24):
        worst = max(worst, abs(measure.moment(leb, n) - 1.0 / (n + 1)))
    atom = Measure(atoms=((0.2, 0.7), (0.8, 0.3)))
    for n in range(0, 24):
        exact = 0.7 * 0.2 ** n + 0.3 * 0.8 ** n
        worst = max(worst, abs(measure.moment(atom, n) - exact))
    return worst < 1e-12, f"max moment error {worst:.2e}"


def _check_column_shift(full: bool) -> tuple[bool, str]:
    n = 24 if full else 12
    worst = 0.0
    for mu in _test_measures().values():
        g = matrices.gamma_matrix(mu, n)
        h = matrices.hausdorff_matrix(mu, 2 * n)
        for row in range(n):
            for col in range(n):
                if row + col < 2 * n:
                    worst = max(worst, abs(g.entries[row, col] - h.entries[row + col, col]))
    return worst < 1e-10, f"max |gamma_nk - c_(n+k)k| = {worst:.2e}"


def _check_transpose_adjoint(full: bool) -> tuple[bool, str]:
    n = 128 if full else 64
    worst = 0.0
    for t in (0.1, 0.3, 0.5, 0.7, 0.9):
        a = matrices.composition_matrix(t, n)
        b = matrices.composition_matrix(1.0 - t, n)
        worst = max(worst, float(np.max(np.abs(a.entries.T - b.entries))))
    return worst < 1e-14, f"max transpose deviation {worst:.2e}"


def _check_hankel_agreement(full: bool) -> tuple[bool, str]:
    n = 16
    for name, mu in _test_measures().items():
        g = matrices.gamma_matrix(mu, n)
        if bool(matrices.is_hankel(g)) != matrices.hankel_moment_test(mu, n):
            return False, f"disagreement for {name}"
    return True, "isHankel == hankelMomentTest on all test measures"


def _check_mass_row_sums(full: bool) -> tuple[bool, str]:
    n = 24 if full else 12
    worst = 0.0
    for mu in _test_measures().values():
        h = matrices.hausdorff_matrix(mu, n)
        if np.any(h.entries < 0.0):
            return False, "negative entry"
        mass = measure.total_mass(mu)
        worst = max(worst, float(np.max(np.abs(h.entries.sum(axis=1) - mass))))
    return worst < 1e-10, f"max |row sum - mass| = {worst:.2e}"


def _check_parseval(full: bool) -> tuple[bool, str]:
    rng = np.random.default_rng(SEED)
    deg = 48 if full else 24
    grid = hardy.BoundaryGrid(4 * deg + 2)
    worst = 0.0
    for _ in range(20):
        c = rng.standard_normal(deg + 1) + 1j * rng.standard_normal(deg + 1)
        f = hardy.CoefficientVector(c)
        worst = max(worst, abs(hardy.grid_norm(hardy.evaluate_on_grid(f, grid), 2.0)
                               - f.norm2()))
    return worst < 1e-12, f"max |grid - l2| = {worst:.2e}"


def _check_p_monotonicity(full: bool) -> tuple[bool, str]:
    rng = np.random.default_rng(SEED + 1)
    grid = hardy.BoundaryGrid(512)
    for _ in range(10):
        c = rng.standard_normal(17)
        f = hardy.CoefficientVector(c.astype(complex))
        norms = [hardy.hp_norm(f, p, grid) for p in (1.0, 1.5, 2.5, 4.0)]
        if any(b < a - 1e-12 for a, b in zip(norms, norms[1:])):
            return False, f"norms not monotone in p: {norms}"
    return True, "grid norms monotone in p on random polynomials"


def _check_fa_blowup(full: bool) -> tuple[bool, str]:
    # closed-form H^2 norms: the grid loses the singular mass for a near 1/2
    lo = hardy.fa_h2_norm_exact(0.4)
    hi = hardy.fa_h2_norm_exact(0.499)
    ratio = hi / lo
    grid = hardy.BoundaryGrid(65536 if full else 8192)
    g1 = hardy.hp_norm(hardy.fa_function(0.30), 2.0, grid)
    g2 = hardy.hp_norm(hardy.fa_function(0.45), 2.0, grid)
    return ratio >= 2.0 and g2 > g1, f"closed-form ratio {ratio:.2f}, grid trend {g1:.3f} -> {g2:.3f}"


def _check_kernel_normalization(full: bool) -> tuple[bool, str]:
    worst = 0.0
    for r in (0.0, 0.5, 0.9, 0.99, 0.999):
        pair = hardy.kernel_kw(r, 2.0)
        worst = max(worst, abs(pair.coefficients.norm2() - 1.0))
    return worst < 1e-12, f"max |norm - 1| = {worst:.2e}"


def _check_representation(full: bool) -> tuple[bool, str]:
    # series path against the entrywise mu-integral of composition matrices,
    # both truncated identically (matched-truncation form of Gamma = int T_t dmu)
    rng = np.random.default_rng(SEED + 2)
    n = 48 if full else 24
    deg = 8
    grid = hardy.BoundaryGrid(256)
    worst = 0.0
    for mu in (Measure.lebesgue(), Measure.dirac(0.5), Measure.jacobi(0.0, 1.0, (2.0,))):
        handle = operators.OperatorHandle(mu, n, grid)

        def t_matrices(t, n=n):
            if len(t) == 0:
                return np.zeros((n * n, 0))
            return np.stack(
                [matrices.composition_matrix(float(tt), n).entries.ravel() for tt in t],
                axis=-1)

        flat, _ = measure.integrate_columns(mu, t_matrices, tol=1e-11)
        integral_entries = np.asarray(flat).reshape(n, n)
        for _ in range(3):
            c = rng.standard_normal(deg + 1).astype(complex)
            f = hardy.CoefficientVector(c)
            series = operators.apply_gamma_coefficients(handle, f)
            a = np.zeros(n, dtype=complex)
            a[:deg + 1] = c
            integral = integral_entries @ a
            v1 = hardy.evaluate_on_grid(series, grid)
            v2 = hardy.evaluate_on_grid(hardy.CoefficientVector(integral), grid)
            worst = max(worst, float(np.max(np.abs(v1 - v2))))
    return worst < 1e-8, f"max node deviation {worst:.2e}"


def _check_adjoint_consistency(full: bool) -> tuple[bool, str]:
    rng = np.random.default_rng(SEED + 3)
    n = 24
    grid = hardy.BoundaryGrid(128)
    worst = 0.0
    for mu in (Measure.lebesgue(), Measure.dirac(0.5)):
        handle = operators.OperatorHandle(mu, n, grid)
        c = rng.standard_normal(n - 1).astype(complex)
        f = hardy.CoefficientVector(c)
        adj = operators.apply_gamma_adjoint_coefficients(handle, f)
        a = np.concatenate([c, [0.0]])

        def flipped_action(t, n=n, a=a):
            if len(t) == 0:
                return np.zeros((n, 0), dtype=complex)
            return np.stack(
                [matrices.composition_matrix(float(1.0 - tt), n).entries @ a for tt in t],
                axis=-1)

        direct, _ = measure.integrate_columns(mu, flipped_action, tol=1e-11)
        worst = max(worst, float(np.max(np.abs(adj.coeffs - np.asarray(direct)))))
    return worst < 1e-10, f"max deviation {worst:.2e}"


def _check_positivity_linearity(full: bool) -> tuple[bool, str]:
    rng = np.random.default_rng(SEED + 4)
    n = 24
    grid = hardy.BoundaryGrid(128)
    handle = operators.OperatorHandle(Measure.jacobi(0.0, 1.0, (2.0,)), n, grid)
    pos = hardy.CoefficientVector(np.abs(rng.standard_normal(10)).astype(complex))
    img = operators.apply_gamma_coefficients(handle, pos)
    if np.any(img.coeffs.real < 0.0) or np.max(np.abs(img.coeffs.imag)) > 0.0:
        return False, "positivity violated"
    f = hardy.CoefficientVector(rng.standard_normal(10).astype(complex))
    g = hardy.CoefficientVector(rng.standard_normal(10).astype(complex))
    lin = operators.apply_gamma_coefficients(
        handle, hardy.CoefficientVector(2.0 * f.coeffs - 3.0 * g.coeffs))
    split = 2.0 * operators.apply_gamma_coefficients(handle, f).coeffs \
        - 3.0 * operators.apply_gamma_coefficients(handle, g).coeffs
    dev = float(np.max(np.abs(lin.coeffs - split)))
    return dev < 1e-12, f"linearity deviation {dev:.2e}"


def _check_norm_sandwich(full: bool) -> tuple[bool, str]:
    sizes = (16, 64, 256) if full else (8, 16, 32)
    for name, mu in _test_measures().items():
        psi = analysis.psi_integral(mu, 2.0)
        if isinstance(psi, analysis.Divergent):
            continue
        prev = 0.0
        for n in sizes:
            est = analysis.finite_section_norm(mu, n)
            if est.value > psi + 1e-9:
                return False, f"{name}: section {est.value} exceeds psi {psi}"
            if est.value < prev - 1e-12:
                return False, f"{name}: sections not nondecreasing"
            prev = est.value
    return True, "sections nondecreasing and below the psi_2 integral"


def _check_lower_bound_consistency(full: bool) -> tuple[bool, str]:
    for name, mu in _test_measures().items():
        psi = analysis.psi_integral(mu, 2.0)
        if isinstance(psi, analysis.Divergent):
            continue
        b1, b2 = analysis.proof_lower_bounds(mu, 2.0)
        for b in (b1, b2):
            if not isinstance(b, analysis.Divergent) and b > psi + 1e-9:
                return False, f"{name}: proof bound {b} exceeds psi {psi}"
    return True, "proof-derived bounds below the exact norm"


def _check_tnorm_bounds(full: bool) -> tuple[bool, str]:
    sizes = (64, 256, 1024) if full else (16, 64)
    for t in (0.1, 0.5, 0.9):
        prev = 0.0
        for n in sizes:
            section, bound = analysis.t_norm_bound_check(t, 2.0, n)
            if section > bound + 1e-9:
                return False, f"t={t}, N={n}: section {section} above bound {bound}"
            if section < prev - 1e-12:
                return False, f"t={t}: sections not monotone in N"
            prev = section
    return True, "T_t sections monotone and below psi_2(t)"


def _check_divergence_growth(full: bool) -> tuple[bool, str]:
    # psi_2 diverges for beta = -0.6: sections must keep growing
    mu = Measure.jacobi(0.0, -0.6)
    sizes = (64, 128, 256, 512, 1024) if full else (16, 32, 64)
    values = [analysis.finite_section_norm(mu, n).value for n in sizes]
    growing = all(b > a + 1e-6 for a, b in zip(values, values[1:]))
    return growing, f"sections {['%.3f' % v for v in values]}"


def _check_kernel_probe_floor(full: bool) -> tuple[bool, str]:
    grid = hardy.BoundaryGrid(8192 if full else 2048)
    schedule = (0.9, 0.99, 0.999) if full else (0.9, 0.99)
    for mu in (Measure.lebesgue(), Measure.dirac(0.5)):
        rep = analysis.compactness_probe(mu, 2.0, schedule, grid)
        if not rep.verdict:
            return False, f"responses {rep.responses} dip below {rep.target}"
    return True, "kernel responses stay above totalMass/sqrt(2)"


def _check_cli_roundtrip(full: bool) -> tuple[bool, str]:
    from .measure import measure_from_json, measure_to_json
    for name, mu in _test_measures().items():
        back = measure_from_json(measure_to_json(mu))
        for n in range(8):
            if abs(measure.moment(back, n) - measure.moment(mu, n)) > 1e-15:
                return False, f"{name}: moments differ after JSON round trip"
    return True, "JSON round trip preserves moments to 1e-15"


def _check_cli_determinism(full: bool) -> tuple[bool, str]:
    from .cli import run_to_string
    a = run_to_string(["criterion", "--measure", "lebesgue", "--p", "2"])
    b = run_to_string(["criterion", "--measure", "lebesgue", "--p", "2"])
    return a == b, "identical configs produce byte-identical reports"


FAST_CHECKS: list[tuple[str, Callable[[bool], tuple[bool, str]]]] = [
    ("measure.binomial-row-identity", _check_binomial_row_identity),
    ("measure.total-monotonicity", _check_total_monotonicity),
    ("measure.atom-density-additivity", _check_additivity),
    ("measure.quadrature-consistency", _check_quadrature_consistency),
    ("matrices.column-shift", _check_column_shift),
    ("matrices.transpose-adjoint", _check_transpose_adjoint),
    ("matrices.hankel-moment-agreement", _check_hankel_agreement),
    ("matrices.mass-row-sums", _check_mass_row_sums),
    ("hardy.discrete-parseval", _check_parseval),
    ("hardy.p-monotonicity", _check_p_monotonicity),
    ("hardy.fa-blowup", _check_fa_blowup),
    ("hardy.kernel-normalization", _check_kernel_normalization),
    ("operators.representation-equivalence", _check_representation),
    ("operators.adjoint-consistency", _check_adjoint_consistency),
    ("operators.positivity-linearity", _check_positivity_linearity),
    ("analysis.norm-sandwich", _check_norm_sandwich),
    ("analysis.lower-bound-consistency", _check_lower_bound_consistency),
    ("analysis.tnorm-bounds", _check_tnorm_bounds),
    ("cli.measure-roundtrip", _check_cli_roundtrip),
    ("cli.determinism", _check_cli_determinism),
]

FULL_ONLY_CHECKS: list[tuple[str, Callable[[bool], tuple[bool, str]]]] = [
    ("analysis.divergence-growth", _check_divergence_growth),
    ("analysis.kernel-probe-floor", _check_kernel_probe_floor),
]


def run_suite(name: str, printer=print) -> int:
    """Run the named invariant suite; returns 0 iff every invariant passes."""
    if name not in ("fast", "full"):
        from .errors import InvalidArguments
        raise InvalidArguments(f"suite must be 'fast' or 'full', got {name!r}")
    full = name == "full"
    checks = FAST_CHECKS + (FULL_ONLY_CHECKS if full else [])
    failures = []
    for label, fn in checks:
        ok, detail = fn(full)
        printer(f"[{'PASS' if ok else 'FAIL'}] {label:42s} {detail}")
        if not ok:
            failures.append(label)
    if failures:
        printer(f"{len(failures)} invariant(s) failed, first: {failures[0]}")
        return 1
    printer(f"all {len(checks)} invariants pass ({name} suite)")
    return 0
