"""Command-line front end.

Exit codes: 0 success, 1 usage or input error, 2 mathematical failure
(a failed verification, an obstruction, or a solver that did not converge).
JSON is written with sorted keys and 17 significant digits so that piping
a document through a read/write round trip reproduces it byte for byte.
"""

from __future__ import annotations

import argparse
import io
import json
import math
import sys

import numpy as np

from . import cascade, factorize, families, localsolve, qmf, rotations
from .laurent import VectorSignal

EXIT_OK, EXIT_USAGE, EXIT_MATH = 0, 1, 2


class UsageError(Exception):
    pass


class MathFailure(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


# ------------------------------------------------------------------ JSON

def _encode(value):
    if isinstance(value, dict):
        items = sorted(value.items())
        return "{" + ", ".join(f"{json.dumps(str(k))}: {_encode(v)}" for k, v in items) + "}"
    if isinstance(value, (list, tuple)):
        return "[" + ", ".join(_encode(v) for v in value) + "]"
    if isinstance(value, np.ndarray):
        return _encode(value.tolist())
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if value is None:
        return "null"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        x = float(value)
        if not math.isfinite(x):
            raise ValueError("cannot serialize a non-finite number")
        text = format(x, ".17g")
        return "0" if text == "-0" else text
    if isinstance(value, str):
        return json.dumps(value)
    raise TypeError(f"cannot serialize {type(value).__name__}")


def dumps(value):
    """Canonical JSON text (sorted keys, 17 significant digits), newline-terminated."""
    return _encode(value) + "\n"


def _read_text(path):
    try:
        if path in (None, "-"):
            return sys.stdin.read()
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as err:
        raise UsageError(f"cannot read {path}: {err}") from err


def _read_json(path):
    text = _read_text(path)
    try:
        return json.loads(text)
    except json.JSONDecodeError as err:
        raise UsageError(f"invalid JSON in {path or 'stdin'}: {err}") from err


def _write_text(path, text):
    try:
        if path in (None, "-"):
            sys.stdout.write(text)
        else:
            with open(path, "w", encoding="utf-8", newline="\n") as fh:
                fh.write(text)
    except OSError as err:
        raise UsageError(f"cannot write {path or 'stdout'}: {err}") from err


def _load_bank(path):
    data = _read_json(path)
    try:
        return qmf.FilterBank.from_dict(data)
    except (KeyError, TypeError, ValueError) as err:
        raise UsageError(f"not a filter bank document: {err}") from err


def _load_signal(data):
    try:
        return VectorSignal.from_dict(data)
    except (KeyError, TypeError, ValueError) as err:
        raise UsageError(f"not a signal document: {err}") from err


def parse_steps(data):
    """Steps from a list, or from ``{"shift": n, "steps": [...]}``. Returns ``(steps, shift)``."""
    shift = 0
    if isinstance(data, dict):
        shift = int(data.get("shift", 0))
        data = data.get("steps")
    if not isinstance(data, list):
        raise UsageError("expected a list of rotation steps")
    try:
        steps = [rotations.RotationStep.from_dict(s) for s in data]
    except (KeyError, TypeError, ValueError) as err:
        raise UsageError(f"invalid rotation step: {err}") from err
    return steps, shift


# ------------------------------------------------------------------ commands

def cmd_construct(args):
    steps, shift = parse_steps(_read_json(args.input))
    if steps:
        d = steps[0].dim
        if any(s.dim != d for s in steps):
            raise UsageError("steps have different sizes")
    elif args.d is None:
        raise UsageError("--d is required for an empty step list")
    else:
        d = args.d
    if args.d is not None and args.d != d:
        raise UsageError(f"--d {args.d} does not match steps of size {2 * d}")
    try:
        bank = rotations.construct(steps, d, seed=args.seed_bank)
    except rotations.NonOrthogonalStep as err:
        raise MathFailure(str(err)) from err
    _write_text(args.out, dumps(bank.translate(shift).to_dict()))


def cmd_family(args):
    params = (args.a,) if args.b is None else (args.a, args.b)
    try:
        bank = families.FamilyId(args.tag, params).build()
    except ValueError as err:
        raise UsageError(str(err)) from err
    _write_text(args.out, dumps(bank.to_dict()))


def cmd_verify(args):
    bank = _load_bank(args.input)
    report = qmf.check_qmf(bank, args.tol, args.moments)
    _write_text(args.out, dumps(report.to_dict()))
    if not report.ok(full_rank=not args.skip_full_rank):
        raise MathFailure("verification failed")


def cmd_solve(args):
    initial = None
    if args.initial is not None:
        initial = np.asarray(_read_json(args.initial), dtype=float)
        if initial.shape != (12,):
            raise UsageError("initial parameters must be a list of 12 numbers")
    if initial is None and args.restarts < 1:
        raise UsageError("give --initial or --restarts >= 1")
    result = localsolve.solve_constraints(initial, args.param, args.moments, args.restarts,
                                          args.seed, args.tol, args.max_iter)
    report = result.to_dict()
    report["seed"] = args.seed
    report["restarts"] = args.restarts
    report["checks"] = localsolve.solution_report(result, max(args.tol, 1e-10)).to_dict()
    _write_text(args.out, dumps(result.bank().to_dict()))
    if args.report:
        _write_text(args.report, dumps(report))
    else:
        sys.stderr.write(dumps(report))
    if not result.success:
        raise MathFailure(f"no solution below {args.tol:g} (best {result.residual_norm:.3g})")


def cmd_analyze(args):
    bank = _load_bank(args.bank)
    signal = _load_signal(_read_json(args.input))
    if signal.dim != bank.dim:
        raise UsageError("signal and bank dimensions differ")
    s0, s1 = qmf.analyze(bank, signal)
    _write_text(args.out, dumps({"s0": s0.to_dict(), "s1": s1.to_dict()}))


def cmd_synthesize(args):
    bank = _load_bank(args.bank)
    data = _read_json(args.input)
    if not isinstance(data, dict) or "s0" not in data or "s1" not in data:
        raise UsageError("expected a document with keys s0 and s1")
    s0, s1 = _load_signal(data["s0"]), _load_signal(data["s1"])
    if not s0.dim == s1.dim == bank.dim:
        raise UsageError("signal and bank dimensions differ")
    _write_text(args.out, dumps(qmf.synthesize(bank, s0, s1).to_dict()))


def _csv_text(F, prefix):
    buf = io.StringIO()
    cascade.write_csv(buf, F, prefix)
    return buf.getvalue()


def cmd_cascade(args):
    if args.levels < 0:
        raise UsageError("--levels must be non-negative")
    bank = _load_bank(args.input)
    if bank.A.is_zero:
        raise UsageError("scaling filter is zero")
    F = cascade.cascade_scaling(bank, args.levels, converge=not args.box)
    _write_text(args.out, _csv_text(F, "F"))
    if args.wavelet_out:
        G = cascade.cascade_wavelet(bank, args.levels, scaling=F)
        _write_text(args.wavelet_out, _csv_text(G, "G"))


def cmd_factorize(args):
    bank = _load_bank(args.input)
    if bank.support is None:
        raise UsageError("cannot factorize the zero bank")
    try:
        cert = factorize.factorize(bank, args.tol)
    except factorize.OrthogonalityError as err:
        raise MathFailure(str(err)) from err
    if not cert.ok:
        _write_text(args.out, dumps(cert.to_dict()))
        raise MathFailure(str(cert.obstruction))
    if cert.shift:
        doc = {"shift": cert.shift, "steps": [s.to_dict() for s in cert.steps]}
    else:
        doc = [s.to_dict() for s in cert.steps]
    _write_text(args.out, dumps(doc))


def cmd_jacobian(args):
    J = localsolve.jacobian_at_origin(args.step)
    s = np.linalg.svd(J, compute_uv=False)
    kernel = localsolve.SubspaceBasis(localsolve.null_space(J), True)
    doc = {
        "shape": list(J.shape),
        "rank": localsolve.numerical_rank(J),
        "singular_values": s,
        "kernel": kernel.vectors.T,
        "kernel_angle_to_gamma": kernel.max_angle(localsolve.kernel_basis()),
    }
    _write_text(args.out, dumps(doc))


# ------------------------------------------------------------------ parser

def build_parser():
    parser = _Parser(prog="matqmf", description="Orthogonal matrix filter banks from rotations.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add_io(p, with_input=True):
        if with_input:
            p.add_argument("--in", dest="input", default=None, help="input file (default stdin)")
        p.add_argument("--out", default=None, help="output file (default stdout)")

    p = sub.add_parser("construct", help="build a bank from rotation steps")
    add_io(p)
    p.add_argument("--d", type=int, default=None)
    p.add_argument("--seed-bank", choices=("haar", "trivial"), default="haar")
    p.set_defaults(func=cmd_construct)

    p = sub.add_parser("family", help="closed-form two-channel family")
    add_io(p, with_input=False)
    p.add_argument("--tag", required=True, choices=families.TAGS)
    p.add_argument("--a", type=float, required=True)
    p.add_argument("--b", type=float, default=None)
    p.set_defaults(func=cmd_family)

    p = sub.add_parser("verify", help="check QMF, full rank and sum rules")
    add_io(p)
    p.add_argument("--tol", type=float, default=qmf.EXACT_TOL)
    p.add_argument("--moments", type=int, default=1, help="sum rules of order 1..p-1")
    p.add_argument("--skip-full-rank", action="store_true")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("solve", help="solve the full-rank and sum-rule constraints")
    p.add_argument("--out", default=None)
    p.add_argument("--report", default=None, help="run report file (default stderr)")
    p.add_argument("--param", choices=localsolve.PARAMETERIZATIONS, default="lie")
    p.add_argument("--moments", type=int, default=2)
    p.add_argument("--restarts", type=int, default=50)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--tol", type=float, default=1e-12)
    p.add_argument("--max-iter", type=int, default=200)
    p.add_argument("--initial", default=None, help="JSON list of 12 starting parameters")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("analyze", help="one-level analysis of a signal")
    add_io(p)
    p.add_argument("--bank", required=True)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("synthesize", help="one-level synthesis from s0 and s1")
    add_io(p)
    p.add_argument("--bank", required=True)
    p.set_defaults(func=cmd_synthesize)

    p = sub.add_parser("cascade", help="sampled scaling function (and wavelet) as CSV")
    add_io(p)
    p.add_argument("--levels", type=int, required=True)
    p.add_argument("--wavelet-out", default=None)
    p.add_argument("--box", action="store_true", help="plain iterate from the box function")
    p.set_defaults(func=cmd_cascade)

    p = sub.add_parser("factorize", help="factor a bank into rotation steps")
    add_io(p)
    p.add_argument("--tol", type=float, default=factorize.QMF_TOL)
    p.set_defaults(func=cmd_factorize)

    p = sub.add_parser("jacobian", help="rank and kernel of the linearization at Haar")
    add_io(p, with_input=False)
    p.add_argument("--step", type=float, default=localsolve.FD_STEP)
    p.set_defaults(func=cmd_jacobian)
    return parser


def run(argv=None):
    """Run the CLI; returns the exit code."""
    try:
        args = build_parser().parse_args(argv)
        args.func(args)
    except UsageError as err:
        sys.stderr.write(f"matqmf: error: {err}\n")
        return EXIT_USAGE
    except MathFailure as err:
        sys.stderr.write(f"matqmf: failed: {err}\n")
        return EXIT_MATH
    except SystemExit as err:
        # --help exits through argparse
        return int(err.code or 0)
    return EXIT_OK


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
