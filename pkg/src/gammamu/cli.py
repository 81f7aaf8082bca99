"""Command-line entry point.

Reports are JSON by default (full-precision ``%.17g`` floats, deterministic
byte-for-byte for identical configs); schedule/response pairs and matrices
can be exported as CSV.  Exit codes: 0 success, 2 precondition violation,
3 numerical non-convergence (surfaced quadrature/power-iteration flags),
4 criterion-based refusal.
"""

from __future__ import annotations

import argparse
import io
import json
import math
import os
import sys
import warnings

import numpy as np

from . import __version__
from .errors import (
    CriterionViolated,
    EstimateUnconverged,
    GammaMuError,
    IterationCapReached,
    NonConvergentIntegral,
    PreconditionError,
)
from .hardy import (
    BoundaryGrid,
    CoefficientVector,
    as_boundary_function,
    fa_function,
    hp_norm,
    kernel_kw,
)
from .measure import (
    measure_to_json,
    moments,
    parse_measure,
    total_mass,
)
from . import analysis, matrices, operators
from .checks import run_suite

TOOL = "gamma-mu"


# ----------------------------- deterministic JSON --------------------------

def _fmt_float(x: float) -> str:
    if math.isnan(x):
        return '"nan"'
    if math.isinf(x):
        return '"inf"' if x > 0 else '"-inf"'
    return format(x, ".17g")


def render_json(obj, indent: int = 0) -> str:
    """Minimal JSON writer with %.17g floats for reproducible reports."""
    pad = "  " * indent
    if obj is None:
        return "null"
    if isinstance(obj, bool):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _fmt_float(float(obj))
    if isinstance(obj, complex):
        return render_json([obj.real, obj.imag], indent)
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        inner = ",\n".join(
            f"{pad}  {json.dumps(str(k))}: {render_json(v, indent + 1)}"
            for k, v in obj.items())
        return "{\n" + inner + "\n" + pad + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        seq = list(obj)
        if not seq:
            return "[]"
        inner = ", ".join(render_json(v, indent + 1) for v in seq)
        return "[" + inner + "]"
    raise TypeError(f"cannot render {type(obj).__name__} as JSON")


def _emit(report: dict, args, csv_rows=None, csv_header=None) -> None:
    fmt = getattr(args, "format", "json")
    if fmt == "csv" and csv_rows is not None:
        lines = []
        if csv_header:
            lines.append(",".join(csv_header))
        for row in csv_rows:
            lines.append(",".join(_fmt_float(float(v)).strip('"') for v in row))
        text = "\n".join(lines) + "\n"
    else:
        text = render_json(report) + "\n"
    out = getattr(args, "out", None)
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _coeffs_from_path(path: str) -> CoefficientVector:
    with open(path, "r", encoding="utf-8") as fh:
        raw = json.load(fh)
    vals = [complex(v[0], v[1]) if isinstance(v, (list, tuple)) else complex(v) for v in raw]
    return CoefficientVector(np.array(vals, dtype=complex))


def _parse_function(spec: str):
    """fa:<a> | kernel:<r>[:<q>] | coeffs:<path> -> (boundary fn, coeff vector | None)."""
    head, _, body = spec.partition(":")
    head = head.lower()
    if head == "fa":
        return fa_function(float(body)), None
    if head == "kernel":
        parts = body.split(":")
        r = float(parts[0])
        q = float(parts[1]) if len(parts) > 1 else 2.0
        pair = kernel_kw(r, q)
        return pair.boundary, pair.coefficients
    if head == "coeffs":
        cv = _coeffs_from_path(body)
        return as_boundary_function(cv), cv
    raise PreconditionError(f"unrecognised function spec {spec!r}")


# ----------------------------- subcommands ---------------------------------

def _cmd_moments(args) -> dict:
    mu = parse_measure(args.measure)
    vals = moments(mu, args.n + 1)
    return {
        "measure": measure_to_json(mu),
        "totalMass": total_mass(mu),
        "moments": list(vals.values),
    }


def _cmd_matrix(args):
    mu = parse_measure(args.measure) if args.kind != "tt" else None
    if args.kind == "hausdorff":
        m = matrices.hausdorff_matrix(mu, args.n)
    elif args.kind == "gamma":
        m = matrices.gamma_matrix(mu, args.n)
    elif args.kind == "tt":
        if args.t is None:
            raise PreconditionError("--kind tt requires --t")
        m = matrices.composition_matrix(args.t, args.n)
    else:
        raise PreconditionError(f"unknown matrix kind {args.kind!r}")
    report = {
        "kind": m.kind,
        "N": m.size,
        "underflow": m.underflow,
        "converged": m.converged,
        "entries": [list(row) for row in m.entries],
    }
    return report, [list(row) for row in m.entries], None


def _cmd_structure(args) -> dict:
    mu = parse_measure(args.measure)
    g = matrices.gamma_matrix(mu, args.n)
    hank = matrices.is_hankel(g, args.tol)
    toep = matrices.is_toeplitz(g, args.tol)
    mom = matrices.hankel_moment_test(mu, args.n, args.tol)
    report = {
        "measure": measure_to_json(mu),
        "N": args.n,
        "hankelUpToOrder": bool(hank),
        "toeplitzUpToOrder": bool(toep),
        "hankelMomentTest": mom,
    }
    if hank.witness:
        report["hankelWitness"] = {
            "indices": [list(hank.witness[0]), list(hank.witness[1])],
            "values": list(hank.witness_values),
        }
    if toep.witness:
        report["toeplitzWitness"] = {
            "indices": [list(toep.witness[0]), list(toep.witness[1])],
            "values": list(toep.witness_values),
        }
    return report


def _cmd_hardy(args) -> dict:
    bf, cv = _parse_function(args.f)
    grid = BoundaryGrid(args.grid)
    target = cv if (cv is not None and args.p == 2.0) else bf
    norm = hp_norm(target, args.p, grid)
    return {"norm": norm, "p": args.p, "M": args.grid, "f": args.f}


def _cmd_apply(args):
    mu = parse_measure(args.measure)
    grid = BoundaryGrid(args.grid)
    handle = operators.OperatorHandle(mu, args.n, grid)
    bf, cv = _parse_function(args.f)
    if args.path == "coeff":
        if cv is None:
            raise PreconditionError("coefficient path needs a function with coefficients")
        out = operators.apply_gamma_coefficients(handle, cv)
        coeffs = [[c.real, c.imag] for c in out.coeffs]
        report = {"path": "coeff", "N": args.n, "coefficients": coeffs}
        return report, [[c.real, c.imag] for c in out.coeffs], ("re", "im")
    values = operators.apply_gamma_boundary(handle, bf)
    report = {"path": "boundary", "M": args.grid,
              "values": [[v.real, v.imag] for v in values]}
    return report, [[v.real, v.imag] for v in values], ("re", "im")


def _cmd_criterion(args) -> dict:
    mu = parse_measure(args.measure)
    result = analysis.psi_integral(mu, args.p)
    if isinstance(result, analysis.Divergent):
        return {"measure": measure_to_json(mu), "p": args.p,
                "convergent": False, "endpoint": result.endpoint}
    return {"measure": measure_to_json(mu), "p": args.p,
            "convergent": True, "value": result}


def _cmd_norm(args):
    mu = parse_measure(args.measure)
    if args.method == "psi":
        value = analysis.psi_integral(mu, args.p)
        if isinstance(value, analysis.Divergent):
            return {"method": "psi", "p": args.p, "divergent": True,
                    "endpoint": value.endpoint, "value": None}
        return {"method": "psi", "p": args.p, "value": value}
    if args.method == "section":
        if args.p != 2.0:
            raise PreconditionError(
                "finite-section norms are exposed only for p = 2 "
                "(the H^p norm is a coefficient norm only there)")
        est = analysis.finite_section_norm(mu, args.n)
        return {"method": "section", "p": 2.0, "N": args.n, "value": est.value,
                "iterations": est.iterations, "converged": est.converged}
    if args.method == "probe":
        schedule = args.a_list or [1.0 / args.p - 0.1, 1.0 / args.p - 0.01,
                                   1.0 / args.p - 0.001]
        rep = analysis.norm_probe_fa(mu, args.p, schedule, args.delta,
                                     BoundaryGrid(args.grid))
        report = {
            "method": "probe", "p": args.p, "M": args.grid, "delta": args.delta,
            "schedule": list(rep.schedule), "responses": list(rep.responses),
            "gridRatios": list(rep.extras["grid_ratios"]),
            "target": rep.target, "verdict": rep.verdict, "detail": rep.detail,
        }
        return report, list(zip(rep.schedule, rep.responses)), ("a", "response")
    raise PreconditionError(f"unknown norm method {args.method!r}")


def _cmd_compactness(args):
    mu = parse_measure(args.measure)
    rep = analysis.compactness_probe(mu, args.p, args.r_list,
                                     BoundaryGrid(args.grid))
    report = {
        "p": args.p, "M": args.grid,
        "schedule": list(rep.schedule), "responses": list(rep.responses),
        "floor": rep.target, "verdict": rep.verdict, "detail": rep.detail,
    }
    return report, list(zip(rep.schedule, rep.responses)), ("r", "response")


def _cmd_ccprobe(args):
    mu = parse_measure(args.measure)
    rep = analysis.complete_continuity_probe(mu, args.r_list, BoundaryGrid(args.grid))
    report = {
        "M": args.grid,
        "schedule": list(rep.schedule), "responses": list(rep.responses),
        "kernelNormalized": list(rep.extras["kernel_normalized"]),
        "segmentIntegrals": list(rep.extras["segment_integrals"]),
        "strictlyDecreasing": rep.verdict, "detail": rep.detail,
    }
    return report, list(zip(rep.schedule, rep.responses)), ("r", "response")


# ----------------------------- parser --------------------------------------

def _add_common(sp, out=True):
    sp.add_argument("--out", type=str, default=None, help="write the report to a file")
    sp.add_argument("--format", choices=("json", "csv"), default="json")
    sp.add_argument("--config", type=str, default=None,
                    help="JSON file whose keys provide flag defaults")
    sp.add_argument("--threads", type=int, default=None,
                    help="cap data-parallel entry/node computation "
                         "(default: GAMMA_MU_THREADS or all cores)")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog=TOOL,
        description="Numerical laboratory for generalized Hilbert matrices "
                    "built from finite positive Borel measures on (0,1).")
    p.add_argument("--version", action="version", version=f"{TOOL} {__version__}")
    sub = p.add_subparsers(dest="cmd", required=True)

    sp = sub.add_parser("moments", help="moment sequence of a measure")
    sp.add_argument("--measure", required=True)
    sp.add_argument("--n", type=int, default=16, help="highest moment index")
    _add_common(sp)

    sp = sub.add_parser("matrix", help="export a Hausdorff/Gamma/T_t matrix")
    sp.add_argument("--kind", choices=("hausdorff", "gamma", "tt"), required=True)
    sp.add_argument("--measure", default="lebesgue")
    sp.add_argument("--t", type=float, default=None, help="parameter for --kind tt")
    sp.add_argument("--n", type=int, required=True)
    _add_common(sp)

    sp = sub.add_parser("structure", help="Hankel/Toeplitz classification")
    sp.add_argument("--measure", required=True)
    sp.add_argument("--n", type=int, default=16)
    sp.add_argument("--tol", type=float, default=1e-9)
    _add_common(sp)

    sp = sub.add_parser("hardy", help="H^p norm queries")
    sp.add_argument("--f", required=True, help="fa:<a> | kernel:<r>[:<q>] | coeffs:<path>")
    sp.add_argument("--p", type=float, default=2.0)
    sp.add_argument("--grid", type=int, default=8192)
    _add_common(sp)

    sp = sub.add_parser("apply", help="apply Gamma_mu to a function")
    sp.add_argument("--measure", required=True)
    sp.add_argument("--f", required=True)
    sp.add_argument("--path", choices=("coeff", "boundary"), default="coeff")
    sp.add_argument("--n", type=int, default=128)
    sp.add_argument("--grid", type=int, default=8192)
    _add_common(sp)

    sp = sub.add_parser("criterion", help="psi_p boundedness criterion")
    sp.add_argument("--measure", required=True)
    sp.add_argument("--p", type=float, required=True)
    _add_common(sp)

    sp = sub.add_parser("norm", help="operator-norm estimates")
    sp.add_argument("--measure", required=True)
    sp.add_argument("--p", type=float, default=2.0)
    sp.add_argument("--method", choices=("psi", "section", "probe"), required=True)
    sp.add_argument("--n", type=int, default=256, help="section size")
    sp.add_argument("--a-list", type=float, nargs="*", default=None)
    sp.add_argument("--delta", type=float, default=0.0)
    sp.add_argument("--grid", type=int, default=65536)
    _add_common(sp)

    sp = sub.add_parser("compactness", help="non-compactness kernel probe")
    sp.add_argument("--measure", required=True)
    sp.add_argument("--p", type=float, default=2.0)
    sp.add_argument("--r-list", type=float, nargs="+", required=True)
    sp.add_argument("--grid", type=int, default=8192)
    _add_common(sp)

    sp = sub.add_parser("ccprobe", help="complete-continuity trend probe (H^1)")
    sp.add_argument("--measure", required=True)
    sp.add_argument("--r-list", type=float, nargs="+", required=True)
    sp.add_argument("--grid", type=int, default=65536)
    _add_common(sp)

    sp = sub.add_parser("check", help="run the invariant suite")
    sp.add_argument("suite", choices=("fast", "full"))
    _add_common(sp)
    return p


_DISPATCH = {
    "moments": _cmd_moments,
    "matrix": _cmd_matrix,
    "structure": _cmd_structure,
    "hardy": _cmd_hardy,
    "apply": _cmd_apply,
    "criterion": _cmd_criterion,
    "norm": _cmd_norm,
    "compactness": _cmd_compactness,
    "ccprobe": _cmd_ccprobe,
}


def _apply_config(parser, argv):
    ns, _ = parser.parse_known_args(argv)
    cfg_path = getattr(ns, "config", None)
    if cfg_path:
        with open(cfg_path, "r", encoding="utf-8") as fh:
            cfg = json.load(fh)
        parser.set_defaults(**{k.replace("-", "_"): v for k, v in cfg.items()})
    return parser.parse_args(argv)


def _thread_cap(args):
    cap = getattr(args, "threads", None)
    if cap is None:
        env = os.environ.get("GAMMA_MU_THREADS")
        cap = int(env) if env else None
    if cap is None:
        return None
    try:
        import numba
        numba.set_num_threads(max(1, cap))
    except (ImportError, ValueError):
        pass
    try:
        from threadpoolctl import threadpool_limits
        return threadpool_limits(limits=max(1, cap))
    except ImportError:
        return None


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = _apply_config(parser, argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    limiter = _thread_cap(args)
    try:
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always", EstimateUnconverged)
            warnings.simplefilter("always", IterationCapReached)
            if args.cmd == "check":
                return run_suite(args.suite)
            result = _DISPATCH[args.cmd](args)
            if isinstance(result, tuple):
                report, csv_rows, csv_header = result
            else:
                report, csv_rows, csv_header = result, None, None
            flags = [w for w in caught
                     if issubclass(w.category, (EstimateUnconverged, IterationCapReached))]
            if flags:
                report["flags"] = sorted({w.category.__name__ for w in flags})
            _emit(report, args, csv_rows, csv_header)
            return 3 if flags else 0
    except CriterionViolated as exc:
        print(f"refused: {exc}", file=sys.stderr)
        return 4
    except (PreconditionError, NonConvergentIntegral) as exc:
        print(f"precondition violated: {exc}", file=sys.stderr)
        return 2
    except GammaMuError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    finally:
        if limiter is not None:
            limiter.unregister()


def run_to_string(argv) -> str:
    """Run the CLI capturing stdout; used by the determinism invariant."""
    buf = io.StringIO()
    old = sys.stdout
    sys.stdout = buf
    try:
        main(argv)
    finally:
        sys.stdout = old
    return buf.getvalue()


if __name__ == "__main__":
    sys.exit(main())
