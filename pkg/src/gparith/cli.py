"""Command-line front end.

Three subcommands: ``refine`` takes a JSON request on stdin or from a file
and prints the refined result as JSON; ``trace`` sweeps one prior mean and
prints the curve as CSV (optionally also rendering a figure); ``examples``
replays the built-in worked examples as a self-checking report.

Exit codes: 0 success, 1 invalid input, 2 non-convergence, 3 example-suite
failure.  All numbers are serialized with 17 significant digits, enough to
round-trip doubles exactly.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys

import numpy as np

from . import __version__, reference
from .addition import refine_add
from .model import (
    GaussianTriple,
    InvalidInputError,
    Operation,
    OperationSpec,
    NotPositiveDefiniteError,
    PrecisionMatrix3,
    UncertainScalar,
    covariance_of,
    triple_from_independent,
)
from .multiplication import (
    MulSolverConfig,
    NonConvergenceError,
    refine_mul,
    refined_from_point,
)
from .sweep import SweepMode, SweepSpec, trace_sweep

__all__ = ["main", "run"]

_SOLVER_KEYS = ("gradient_tolerance", "max_iterations", "max_starts", "damping_initial")


class _UsageError(Exception):
    """Bad command-line flags; reported like any other invalid input."""


def _format_number(value) -> str:
    return format(float(value), ".17g")


def _dumps(value) -> str:
    """Serialize to JSON with floats rendered at 17 significant digits."""
    if isinstance(value, bool):
        return "true" if value else "false"
    if value is None:
        return "null"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return _format_number(value)
    if isinstance(value, str):
        return json.dumps(value)
    if isinstance(value, dict):
        items = ", ".join(f"{json.dumps(k)}: {_dumps(v)}" for k, v in value.items())
        return "{" + items + "}"
    if isinstance(value, (list, tuple)):
        return "[" + ", ".join(_dumps(v) for v in value) + "]"
    raise TypeError(f"cannot serialize {type(value).__name__}")


def _matrix_rows(matrix: np.ndarray) -> list[list[float]]:
    return [[float(x) for x in row] for row in matrix]


def _read_document(path: str | None) -> dict:
    try:
        if path is None:
            text = sys.stdin.read()
        else:
            with open(path, "r", encoding="utf-8") as handle:
                text = handle.read()
    except OSError as exc:
        raise InvalidInputError(f"cannot read input: {exc}") from None
    try:
        document = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InvalidInputError(f"malformed JSON: {exc}") from None
    if not isinstance(document, dict):
        raise InvalidInputError("request must be a JSON object")
    return document


def _number(value, name: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise InvalidInputError(f"{name} must be a number, got {value!r}")
    return float(value)


def _parse_request(document: dict):
    """Validate a request document.

    Returns (op string or None, theta, GaussianTriple, MulSolverConfig or
    None).  ``op`` may be absent when the caller supplies it by flag.
    """
    op = document.get("op")
    if op is not None and op not in ("add", "mul"):
        raise InvalidInputError(f'op must be "add" or "mul", got {op!r}')
    if "theta" not in document:
        raise InvalidInputError("request is missing theta")
    theta = _number(document["theta"], "theta")

    operands = document.get("operands")
    if not isinstance(operands, list) or len(operands) != 3:
        raise InvalidInputError("operands must be a list of exactly 3 entries")
    for index, operand in enumerate(operands):
        if not isinstance(operand, dict) or "mean" not in operand:
            raise InvalidInputError(f"operand {index + 1} must be an object with a mean")

    precision = document.get("precision")
    if precision is not None:
        means = [_number(o["mean"], f"operand {i + 1} mean") for i, o in enumerate(operands)]
        triple = GaussianTriple(np.array(means), PrecisionMatrix3(precision))
    else:
        scalars = []
        for index, operand in enumerate(operands):
            if "std" not in operand:
                raise InvalidInputError(
                    f"operand {index + 1} needs a std when no precision matrix is given"
                )
            scalars.append(
                UncertainScalar(
                    _number(operand["mean"], f"operand {index + 1} mean"),
                    _number(operand["std"], f"operand {index + 1} std"),
                )
            )
        triple = triple_from_independent(*scalars)

    solver = document.get("solver")
    config = None
    if solver is not None:
        if not isinstance(solver, dict):
            raise InvalidInputError("solver must be an object")
        unknown = sorted(set(solver) - set(_SOLVER_KEYS))
        if unknown:
            raise InvalidInputError(f"unknown solver keys: {', '.join(unknown)}")
        kwargs = {}
        for key in _SOLVER_KEYS:
            if key in solver:
                value = _number(solver[key], f"solver.{key}")
                kwargs[key] = int(value) if key in ("max_iterations", "max_starts") else value
        config = MulSolverConfig(**kwargs)

    return op, theta, triple, config


def _result_document(refined, covariance, warnings) -> dict:
    return {
        "means": [float(v) for v in refined.means],
        "precision": _matrix_rows(refined.precision.entries),
        "covariance": None if covariance is None else _matrix_rows(covariance),
        "residual": refined.residual,
        "objective": refined.objective,
        "converged": refined.diagnostics.converged,
        "iterations": refined.diagnostics.iterations,
        "warnings": warnings,
    }


def _emit_result(refined, out=None) -> None:
    warnings = []
    if not refined.diagnostics.converged:
        warnings.append("solver did not converge; best iterate reported")
    if not refined.diagnostics.hessian_spd:
        warnings.append("refined precision matrix is not positive definite")
    try:
        covariance = covariance_of(refined.precision)
    except NotPositiveDefiniteError:
        covariance = None
        warnings.append("covariance unavailable: refined precision not invertible")
    document = _result_document(refined, covariance, warnings)
    print(_dumps(document), file=out or sys.stdout)


def cmd_refine(args) -> int:
    document = _read_document(args.input)
    op, theta, triple, config = _parse_request(document)
    if op is None:
        raise InvalidInputError("request is missing op")
    spec = OperationSpec(Operation(op), theta)
    if spec.kind is Operation.ADD:
        refined = refine_add(triple, spec)
        code = 0
    else:
        try:
            refined = refine_mul(triple, spec, config)
            code = 0
        except NonConvergenceError as err:
            refined = refined_from_point(
                triple,
                spec,
                err.best_point,
                converged=False,
                iterations=err.iterations,
                starts_tried=err.starts_tried,
                gradient_norm=err.gradient_norm,
            )
            code = 2
    _emit_result(refined)
    return code


def _write_curve_csv(curve, stream) -> None:
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(
        ["sweep", "mean1", "mean2", "mean3", "residual", "objective", "converged"]
    )
    for sample in curve.samples:
        refined = sample.refined
        writer.writerow(
            [
                _format_number(sample.sweep_value),
                _format_number(refined.means[0]),
                _format_number(refined.means[1]),
                _format_number(refined.means[2]),
                _format_number(refined.residual),
                _format_number(refined.objective),
                "true" if refined.diagnostics.converged else "false",
            ]
        )


def cmd_trace(args) -> int:
    document = _read_document(args.input)
    op, theta, triple, config = _parse_request(document)
    if args.op is not None:
        op = args.op
    if op is None:
        raise InvalidInputError("no operation given (use --op or the document's op)")
    spec = OperationSpec(Operation(op), theta)
    sweep = SweepSpec(
        operand=args.sweep_operand - 1,
        start=args.sweep_from,
        stop=args.sweep_to,
        steps=args.steps,
        mode=SweepMode(args.mode),
    )
    curve = trace_sweep(triple, spec, sweep, config)

    if args.out is None:
        _write_curve_csv(curve, sys.stdout)
    else:
        with open(args.out, "w", encoding="utf-8", newline="") as handle:
            _write_curve_csv(curve, handle)

    if args.plot is not None:
        from . import plotting  # matplotlib import deferred to the plot path

        reference_c = (
            float(triple.means[2])
            if spec.kind is Operation.MUL and sweep.operand != 2
            else None
        )
        plotting.render_trace_figure(curve, args.plot, reference_c)
    return 0


def cmd_examples(args) -> int:
    reports = reference.run_all()
    width = max(len(r.example.name) for r in reports)
    for report in reports:
        computed = ", ".join(f"{v:.5f}" for v in report.refined.means)
        expected = ", ".join(f"{v:.5f}" for v in report.example.expected_means)
        verdict = "PASS" if report.passed else "FAIL"
        print(
            f"{report.example.name:<{width}}  computed ({computed})  "
            f"expected ({expected})  max dev {report.max_mean_deviation:.2e}  {verdict}"
        )
    passed = sum(r.passed for r in reports)
    print(f"{passed}/{len(reports)} examples passed")
    return 0 if passed == len(reports) else 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="gparith",
        description="Refine correlated Gaussian operands under x+y~=z or x*y~=z.",
    )
    parser.add_argument(
        "--version", action="version", version=f"%(prog)s {__version__}"
    )
    commands = parser.add_subparsers(dest="command", required=True)

    refine = commands.add_parser("refine", help="refine one JSON request")
    refine.add_argument("--input", help="request file (default: stdin)")
    refine.set_defaults(handler=cmd_refine)

    trace = commands.add_parser("trace", help="sweep one prior mean, emit CSV")
    trace.add_argument("--input", help="base request file (default: stdin)")
    trace.add_argument("--op", choices=("add", "mul"), help="override the document op")
    trace.add_argument(
        "--sweep-operand",
        type=int,
        choices=(1, 2, 3),
        default=1,
        help="which prior mean sweeps (default: 1)",
    )
    trace.add_argument("--from", dest="sweep_from", type=float, required=True)
    trace.add_argument("--to", dest="sweep_to", type=float, required=True)
    trace.add_argument("--steps", type=int, default=401)
    trace.add_argument("--mode", choices=("warm", "cold"), default="warm")
    trace.add_argument("--out", help="write CSV here instead of stdout")
    trace.add_argument("--plot", help="also render a figure to this file")
    trace.set_defaults(handler=cmd_trace)

    examples = commands.add_parser(
        "examples", help="replay the built-in worked examples"
    )
    examples.set_defaults(handler=cmd_examples)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print(_dumps({"error": "invalid-input", "detail": str(exc)}))
        return 1
    except SystemExit as exc:  # --help / --version
        return int(exc.code or 0)
    try:
        return args.handler(args)
    except InvalidInputError as exc:
        print(_dumps({"error": "invalid-input", "detail": str(exc)}))
        return 1


def run() -> None:
    try:
        code = main()
    except BrokenPipeError:
        # downstream consumer (head, a closed pager, ...) went away; point
        # stdout at /dev/null so the interpreter's final flush stays quiet
        os.dup2(os.open(os.devnull, os.O_WRONLY), sys.stdout.fileno())
        code = 0
    sys.exit(code)
