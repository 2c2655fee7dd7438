"""Command-line front end.

Subcommands: moments, disintegrate, spectrum, reconstruct, charfun, cad,
extreme, frame-export, selftest.  Inputs are JSON function specs and matrix
files; outputs are JSON (sorted keys) and CSV, byte-identical across runs for
a fixed seed.  Exit codes: 0 success, 2 precondition error, 3 numerically
inconclusive, 1 internal failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import acceptance, charfun, haar, matfun, modelspace, moments, opmodel
from .errors import DomainError, NumericalError

DEFAULT_SEED = 0


def _load_json(path: str):
    try:
        with open(path) as fh:
            return json.load(fh)
    except FileNotFoundError as exc:
        raise DomainError(f"no such file: {path}") from exc
    except json.JSONDecodeError as exc:
        raise DomainError(f"malformed JSON in {path}: {exc}") from exc


def _load_theta(path: str) -> matfun.MatFunction:
    return matfun.from_json(_load_json(path))


def _load_matrix(path: str, dim: int | None = None) -> np.ndarray:
    doc = _load_json(path)
    rows = doc.get("matrix") if isinstance(doc, dict) else doc
    if rows is None:
        raise DomainError(f"{path}: expected a matrix document")
    return matfun.matrix_from_json(rows, dim)


def _emit(doc: dict, out: str | None) -> None:
    text = json.dumps(doc, indent=2, sort_keys=True) + "\n"
    if out is None or out == "-":
        sys.stdout.write(text)
    else:
        with open(out, "w") as fh:
            fh.write(text)


def _emit_text(text: str, out: str | None) -> None:
    if out is None or out == "-":
        sys.stdout.write(text)
    else:
        with open(out, "w") as fh:
            fh.write(text)


def _pair(z) -> list:
    return [float(np.real(z)), float(np.imag(z))]


def _parse_complex(text: str) -> complex:
    parts = [p.strip() for p in text.split(",")]
    if len(parts) == 1:
        return complex(float(parts[0]), 0.0)
    if len(parts) == 2:
        return complex(float(parts[0]), float(parts[1]))
    raise DomainError(f"cannot parse complex number from '{text}'")


def _parse_float_list(text: str) -> list:
    return [float(p) for p in text.split(",") if p.strip() != ""]


def _threads(args) -> int:
    if getattr(args, "threads", None):
        return max(1, args.threads)
    env = os.environ.get("CLARKLAB_THREADS")
    return max(1, int(env)) if env else 1


def cmd_moments(args) -> int:
    theta = _load_theta(args.theta)
    a = (_load_matrix(args.A, theta.dim) if args.A
         else np.eye(theta.dim, dtype=complex))
    order = args.k
    tol = args.tol * (0.5 if args.strict else 1.0)
    ls = moments.recurrence_moments(theta, a, order)
    le = moments.elliott_negative_moments(theta, a, order)
    gap = max(matfun.operator_norm(ls[j] - le[j]) for j in range(order))
    doc = {
        "l": [matfun.matrix_to_json(m) for m in ls],
        "oracle_gap": gap,
        "order": order,
    }
    _emit(doc, args.out)
    if gap > tol:
        raise NumericalError(f"moment oracles disagree by {gap:.3e} (tol {tol:.1e})")
    return 0


def cmd_disintegrate(args) -> int:
    theta = _load_theta(args.theta)
    trig = _parse_float_list(args.f)
    res = haar.filtration_check(theta, trig, samples=args.samples,
                                seed=args.seed, workers=_threads(args))
    doc = {
        "lhs": matfun.matrix_to_json(res.lhs),
        "rhs": matfun.matrix_to_json(res.rhs),
        "abs_err": res.abs_err,
        "sigma": res.sigma,
        "samples": res.samples,
    }
    _emit(doc, args.out)
    return 0


def cmd_spectrum(args) -> int:
    theta = _load_theta(args.theta)
    u = _load_matrix(args.unitary, theta.dim)
    system = modelspace.clark_eigensystem(theta, u)
    _emit(modelspace.system_to_json(system), args.out)
    if args.plot_out:
        lines = []
        for lam, weight in zip(system.points, system.weights):
            lines.append(f"{float(np.angle(lam)):.17g} {float(np.trace(weight).real):.17g}")
        _emit_text("\n".join(lines) + "\n", args.plot_out)
    return 0


def _read_complex_csv(path: str) -> list:
    out = []
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            out.append(_parse_complex(line))
    return out


def cmd_reconstruct(args) -> int:
    system = modelspace.system_from_json(_load_json(args.system))
    samples = _read_complex_csv(args.samples)
    points = _read_complex_csv(args.points)
    rows = []
    for z in points:
        vec = modelspace.reconstruct(system, samples, z)
        cells = []
        for v in np.atleast_1d(vec):
            cells.extend([f"{v.real:.17g}", f"{v.imag:.17g}"])
        rows.append(",".join(cells))
    _emit_text("\n".join(rows) + "\n", args.out)
    return 0


def cmd_charfun(args) -> int:
    theta = _load_theta(args.theta)
    order = args.k
    tol = args.tol * (0.5 if args.strict else 1.0)
    frame = opmodel.build_frame(theta, max(2 * order, 8))
    if args.contraction:
        a = _load_matrix(args.contraction, theta.dim)
        frame_side = charfun.gamma_coeffs(frame, a, order)
        series_side = charfun.gamma_series_coeffs(theta, a, order)
    else:
        frame_side = charfun.nagy_foias_coeffs(frame, order)
        series_side = charfun.CoeffSeries(coeffs=tuple(matfun.taylor(theta, order)),
                                          band=order, provenance="series")
    residual = frame_side.max_gap(series_side)
    doc = {
        "c": [matfun.matrix_to_json(m) for m in series_side.coeffs],
        "d": [matfun.matrix_to_json(m) for m in frame_side.coeffs],
        "max_residual": residual,
        "order": order,
    }
    _emit(doc, args.out)
    if residual > tol:
        raise NumericalError(f"characteristic coefficients disagree by {residual:.3e}")
    return 0


def cmd_cad(args) -> int:
    theta = _load_theta(args.theta)
    zeta = _parse_complex(args.zeta)
    direction = None
    if args.direction:
        flat = _parse_float_list(args.direction)
        if len(flat) != 2 * theta.dim:
            raise DomainError("direction needs dim re,im pairs")
        direction = np.array([complex(flat[2 * i], flat[2 * i + 1])
                              for i in range(theta.dim)])
    res = modelspace.cad_test(theta, zeta, direction=direction)
    doc = {
        "exists": res.exists,
        "c_liminf": res.c_liminf,
        "boundary_value": matfun.matrix_to_json(res.boundary_value),
        "ladder": [float(x) for x in res.ladder],
    }
    if res.derivative is not None:
        doc["derivative"] = matfun.matrix_to_json(res.derivative)
    _emit(doc, args.out)
    if res.exists is None:
        raise NumericalError("angular-derivative ladder is inconclusive")
    return 0


def cmd_extreme(args) -> int:
    theta = _load_theta(args.theta)
    res = modelspace.extreme_test(theta)
    integral = None if not np.isfinite(res.integral) else res.integral
    doc = {"classification": res.classification, "integral": integral}
    _emit(doc, args.out)
    return 0


def cmd_frame_export(args) -> int:
    theta = _load_theta(args.theta)
    tau = args.tau if args.tau is not None else None
    oracle_tol = 1e-6 * (0.5 if args.strict else 1.0)
    frame = opmodel.build_frame(theta, args.band, tau=tau, oracle_tol=oracle_tol)
    u = _load_matrix(args.unitary, theta.dim) if args.unitary else None
    sidecar = opmodel.export_frame(frame, args.out, u=u)
    sys.stdout.write(json.dumps(sidecar, indent=2, sort_keys=True) + "\n")
    return 0


def cmd_selftest(args) -> int:
    scale = 0.5 if args.strict else 1.0
    indices = [int(x) for x in args.criteria.split(",")] if args.criteria else None
    results = acceptance.run_all(indices, scale=scale)
    failed = 0
    for res in results:
        mark = "PASS" if res.passed else "FAIL"
        print(f"[{mark}] criterion {res.index}: {res.name} "
              f"({res.seconds:.1f}s) -- {res.detail}")
        failed += 0 if res.passed else 1
    print(f"{len(results) - failed}/{len(results)} acceptance criteria passed")
    return 0 if failed == 0 else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="clarklab",
        description="Matrix Aleksandrov-Clark measures, Clark perturbations, "
                    "and model-space sampling")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--out", default="-", help="output path ('-' for stdout)")
        p.add_argument("--seed", type=int, default=DEFAULT_SEED,
                       help="RNG seed (default %(default)s; runs are reproducible)")
        p.add_argument("--strict", action="store_true",
                       help="halve all validation tolerances")
        p.add_argument("--threads", type=int, default=None,
                       help="worker cap (default: CLARKLAB_THREADS or 1)")

    p = sub.add_parser("moments", help="measure moments with oracle cross-check")
    p.add_argument("--theta", required=True)
    p.add_argument("--A", default=None, help="parameter matrix JSON (default identity)")
    p.add_argument("--k", type=int, default=4)
    p.add_argument("--tol", type=float, default=1e-6)
    common(p)
    p.set_defaults(func=cmd_moments)

    p = sub.add_parser("disintegrate", help="Haar average of the measure family")
    p.add_argument("--theta", required=True)
    p.add_argument("--f", required=True,
                   help="centred trig coefficients a_{-d}..a_d, comma separated")
    p.add_argument("--samples", type=int, default=2000)
    common(p)
    p.set_defaults(func=cmd_disintegrate)

    p = sub.add_parser("spectrum", help="Clark eigensystem of a unitary parameter")
    p.add_argument("--theta", required=True)
    p.add_argument("--unitary", required=True)
    p.add_argument("--plot-out", default=None,
                   help="two-column angle/weight plot data")
    common(p)
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("reconstruct", help="rebuild a model element from samples")
    p.add_argument("--system", required=True, help="Clark system JSON")
    p.add_argument("--samples", required=True, help="CSV of re,im sample values")
    p.add_argument("--points", required=True, help="CSV of re,im evaluation points")
    common(p)
    p.set_defaults(func=cmd_reconstruct)

    p = sub.add_parser("charfun", help="characteristic-function coefficients")
    p.add_argument("--theta", required=True)
    p.add_argument("--k", type=int, default=6)
    p.add_argument("--contraction", default=None)
    p.add_argument("--tol", type=float, default=1e-6)
    common(p)
    p.set_defaults(func=cmd_charfun)

    p = sub.add_parser("cad", help="angular-derivative test at a boundary point")
    p.add_argument("--theta", required=True)
    p.add_argument("--zeta", required=True, help="boundary point 're,im'")
    p.add_argument("--direction", default=None,
                   help="direction vector as flat re,im list")
    common(p)
    p.set_defaults(func=cmd_cad)

    p = sub.add_parser("extreme", help="extreme-point classification")
    p.add_argument("--theta", required=True)
    common(p)
    p.set_defaults(func=cmd_extreme)

    p = sub.add_parser("frame-export", help="write the Gram matrix and sidecar")
    p.add_argument("--theta", required=True)
    p.add_argument("--band", type=int, default=20)
    p.add_argument("--tau", type=float, default=None)
    p.add_argument("--unitary", default=None,
                   help="parameter for the sidecar unitarity deviation")
    p.add_argument("--out", required=True, help="output base path")
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--strict", action="store_true")
    p.add_argument("--threads", type=int, default=None)
    p.set_defaults(func=cmd_frame_export)

    p = sub.add_parser("selftest", help="run the acceptance suite")
    p.add_argument("--criteria", default=None, help="comma list, default all")
    p.add_argument("--strict", action="store_true")
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--threads", type=int, default=None)
    p.set_defaults(func=cmd_selftest)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except DomainError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except NumericalError as exc:
        print(f"inconclusive: {exc}", file=sys.stderr)
        return 3
    except Exception as exc:  # noqa: BLE001 - map anything else to exit 1
        print(f"internal error: {exc!r}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
