"""Command-line front end: batch in, one machine-readable document out.

Exit codes: 0 success (certify: ACCEPTED), 1 certify REJECTED, 2 invalid
input, 3 internal numeric failure.  All diagnostics and progress go to
standard error; standard output carries exactly one JSON or CSV document,
key-sorted and NaN-free so identical invocations are byte-identical.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .algebra import bound
from .certify import CertifyTolerances, certified_classes, certify
from .experiment import generic_sweep
from .model import DziobekError, PotentialParam, WrongDimension, validate_masses
from .solver import SolveOptions, dedup_classes, euler_collinear_oracle, multistart_solve

_A_ALIASES = {"newton": -1.5, "vortex": -1.0}


class CLIInputError(Exception):
    """Invalid flags or input files; maps to exit code 2."""


def _log(msg: str) -> None:
    print(msg, file=sys.stderr)


def _parse_a(text: str) -> float:
    key = text.strip().lower()
    if key in _A_ALIASES:
        return _A_ALIASES[key]
    try:
        return PotentialParam(float(text)).a
    except ValueError:
        raise CLIInputError(
            f"invalid exponent {text!r}; use a nonzero real, 'newton' or 'vortex'"
        ) from None


def _parse_masses(args):
    if getattr(args, "masses", None) and getattr(args, "equal", False):
        raise CLIInputError("--masses and --equal are mutually exclusive")
    if getattr(args, "equal", False):
        if args.n is None:
            raise CLIInputError("--equal requires --n")
        values = [1.0] * args.n
    elif getattr(args, "masses", None):
        try:
            values = [float(tok) for tok in args.masses.split(",")]
        except ValueError:
            raise CLIInputError(
                f"invalid mass list {args.masses!r}; expected comma-separated reals"
            ) from None
        if args.n is not None and args.n != len(values):
            raise CLIInputError(
                f"--n {args.n} disagrees with {len(values)} masses"
            )
    else:
        raise CLIInputError("provide --masses or --equal")
    try:
        return validate_masses(values)
    except (DziobekError, ValueError) as e:
        raise CLIInputError(str(e)) from None


def _pair_names(n: int) -> list[str]:
    return [f"d_{i + 1}{j + 1}" for i in range(n) for j in range(i + 1, n)]


def _emit(text: str, out: str | None) -> None:
    sys.stdout.write(text)
    if out:
        Path(out).write_text(text)


def _emit_json(doc, out: str | None) -> None:
    _emit(json.dumps(doc, sort_keys=True, indent=2, allow_nan=False) + "\n", out)


def _class_row(cl, n: int) -> dict:
    dist = {
        name: float(v)
        for name, v in zip(_pair_names(n), cl.canonical_key)
    }
    return {
        "key": [float(v) for v in cl.canonical_key],
        "distances": dist,
        "positions": [[float(v) for v in row] for row in cl.representative.x],
        "certificate": cl.certificate.to_dict() if cl.certificate else None,
        "multiplicity_found": cl.multiplicity_found,
    }


def _solve_csv(classes, n: int) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(
        ["class_key"]
        + _pair_names(n)
        + [
            "kappa",
            "degeneracy_index",
            "isolated",
            "cc_residual",
            "dziobek_residual",
            "rank1_residual",
            "veronese_residual",
        ]
    )
    for cl in classes:
        cert = cl.certificate
        writer.writerow(
            [";".join(f"{v:.17g}" for v in cl.canonical_key)]
            + [f"{v:.17g}" for v in cl.canonical_key]
            + [
                f"{cert.kappa:.17g}",
                cert.degeneracy_index,
                cert.isolated,
                f"{cert.cc_residual:.17g}",
                f"{cert.dziobek_residual:.17g}",
                f"{cert.rank1_residual:.17g}",
                f"{cert.veronese_residual:.17g}",
            ]
        )
    return buf.getvalue()


def cmd_solve(args) -> int:
    masses = _parse_masses(args)
    a = _parse_a(args.a)
    n = masses.n
    try:
        opts = SolveOptions(
            starts=args.starts, newton_tol=args.tol, seed=args.seed
        )
    except ValueError as e:
        raise CLIInputError(str(e)) from None
    t0 = time.perf_counter()
    candidates = multistart_solve(masses, a, opts, workers=args.workers)
    classes = dedup_classes(candidates, masses, opts.dedup_tol)
    classes = certified_classes(classes, masses, a)
    _log(
        f"n={n} a={a:g}: {len(candidates)} converged starts, "
        f"{len(classes)} classes in {time.perf_counter() - t0:.1f}s"
    )
    if args.format == "csv":
        _emit(_solve_csv(classes, n), args.out)
        return 0
    limit = bound(n)
    doc = {
        "schema": "dziobek/1",
        "kind": "solve",
        "meta": {
            "n": n,
            "a": a,
            "masses": [float(v) for v in masses.m],
            "seed": args.seed,
            "starts": opts.resolved_starts(n),
            "version": __version__,
        },
        "bound": {"exponent": limit.exponent, "decimal": str(limit.value)},
        "class_count": len(classes),
        "classes": [_class_row(cl, n) for cl in classes],
    }
    _emit_json(doc, args.out)
    return 0


def cmd_certify(args) -> int:
    path = Path(args.input)
    try:
        raw = path.read_text()
    except OSError as e:
        raise CLIInputError(f"cannot read {path}: {e}") from None
    try:
        data = json.loads(raw)
    except json.JSONDecodeError as e:
        raise CLIInputError(f"{path}:{e.lineno}:{e.colno}: {e.msg}") from None
    if not isinstance(data, dict):
        raise CLIInputError(f"{path}: top level must be an object")
    for field in ("masses", "a", "positions"):
        if field not in data:
            raise CLIInputError(f"{path}: missing field {field!r}")
    try:
        masses = validate_masses(data["masses"])
        a = (
            _parse_a(data["a"])
            if isinstance(data["a"], str)
            else PotentialParam(float(data["a"])).a
        )
        positions = np.array(data["positions"], dtype=float)
        if positions.ndim != 2 or positions.shape[0] != masses.n:
            raise CLIInputError(
                f"{path}: positions must be an n x dim array with n = {masses.n}"
            )
    except (DziobekError, TypeError, ValueError) as e:
        raise CLIInputError(f"{path}: {e}") from None
    try:
        cert = certify(positions, masses, a)
    except WrongDimension as e:
        _emit_json(
            {
                "schema": "dziobek/1",
                "kind": "certificate",
                "accepted": False,
                "error": "wrong-dimension",
                "measured_dim": e.measured,
                "expected_dim": e.expected,
            },
            args.out,
        )
        return 1
    doc = {"schema": "dziobek/1", "kind": "certificate", **cert.to_dict()}
    _emit_json(doc, args.out)
    return 0 if cert.accepted else 1


def cmd_bound(args) -> int:
    if args.n < 3:
        raise CLIInputError("need n >= 3")
    b = bound(args.n)
    _emit(f"2^{b.exponent} = {b.value}\n", args.out)
    return 0


def _sweep_csv(report) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(
        ["trial", "class_count", "all_isolated", "all_accepted", "flagged"]
        + [f"m_{i + 1}" for i in range(report.n)]
        + ["max_cc", "max_dziobek", "max_rank1", "max_veronese", "degeneracy"]
    )
    for idx, t in enumerate(report.trials):
        writer.writerow(
            [idx, t.class_count, t.all_isolated, t.all_accepted, t.flagged]
            + [f"{v:.17g}" for v in t.mass_vector]
            + [
                f"{t.max_residuals[k]:.17g}"
                for k in ("cc", "dziobek", "rank1", "veronese")
            ]
            + [";".join(f"{k}:{v}" for k, v in t.degeneracy_histogram.items())]
        )
    return buf.getvalue()


def cmd_sweep(args) -> int:
    if args.trials < 1:
        raise CLIInputError("--trials must be positive")
    if not 3 <= args.n <= 6:
        raise CLIInputError("--n must be in 3..6")
    a = _parse_a(args.a)
    report = generic_sweep(
        args.n, a, args.trials, seed=args.seed, workers=args.workers
    )
    _log(
        f"sweep n={args.n} a={a:g} trials={args.trials} "
        f"in {report.wall_time:.1f}s"
    )
    if args.format == "csv":
        _emit(_sweep_csv(report), args.out)
    else:
        _emit_json(report.to_json_dict(), args.out)
    return 0


def cmd_oracle(args) -> int:
    masses = _parse_masses(args)
    if masses.n != 3:
        raise CLIInputError("the oracle is three-body only")
    a = _parse_a(args.a)
    solutions = []
    for mid, dmat in enumerate(euler_collinear_oracle(masses, a)):
        dist = {
            f"d_{i + 1}{j + 1}": float(dmat.d[i, j])
            for i in range(3)
            for j in range(i + 1, 3)
        }
        solutions.append({"middle_body": mid + 1, "distances": dist})
    doc = {
        "schema": "dziobek/1",
        "kind": "oracle",
        "a": a,
        "masses": [float(v) for v in masses.m],
        "solutions": solutions,
    }
    _emit_json(doc, args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dziobek",
        description="Solve and certify Dziobek central configurations.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--out", help="also write the document to this path")

    p = sub.add_parser("solve", help="enumerate classes for given masses")
    p.add_argument("--n", type=int, help="number of bodies")
    p.add_argument("--masses", help="comma-separated positive masses")
    p.add_argument("--equal", action="store_true", help="equal unit masses")
    p.add_argument("--a", required=True, help="exponent, or 'newton'/'vortex'")
    p.add_argument("--starts", type=int, default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--tol", type=float, default=1e-11, help="Newton tolerance")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--format", choices=("json", "csv"), default="json")
    add_common(p)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("certify", help="certify one configuration file")
    p.add_argument("--input", required=True, help="JSON {masses, a, positions}")
    add_common(p)
    p.set_defaults(func=cmd_certify)

    p = sub.add_parser("bound", help="print the class-count bound")
    p.add_argument("--n", type=int, required=True)
    add_common(p)
    p.set_defaults(func=cmd_bound)

    p = sub.add_parser("sweep", help="random-mass finiteness evidence")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--a", required=True)
    p.add_argument("--trials", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--format", choices=("json", "csv"), default="json")
    add_common(p)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("oracle", help="three-body collinear solutions")
    p.add_argument("--masses", help="comma-separated positive masses")
    p.add_argument("--equal", action="store_true")
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--a", required=True)
    add_common(p)
    p.set_defaults(func=cmd_oracle)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    try:
        return args.func(args)
    except CLIInputError as e:
        _log(f"error: {e}")
        return 2
    except (DziobekError, ValueError, ArithmeticError, np.linalg.LinAlgError) as e:
        _log(f"numeric failure: {type(e).__name__}: {e}")
        return 3


if __name__ == "__main__":
    sys.exit(main())
