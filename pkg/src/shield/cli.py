"""Command-line front end.

Subcommands:

* ``compile`` -- parse and compile a requirement file, print a plan summary
* ``apply``   -- correct a prediction batch, optionally writing a JSON report
* ``check``   -- audit a batch against the requirements without correcting
* ``vjp``     -- pull a cotangent batch back through the correction

Exit codes are a stable contract: 0 success, 1 violations found (check
only), 2 input or compile error, 3 internal guarantee violation (an engine
bug: the corrected output failed its own re-check).

Every flag can also come from the environment with a ``SHIELD_`` prefix
(``SHIELD_REQUIREMENTS``, ``SHIELD_ENGINE``, ...); flags win over the
environment.
"""

from __future__ import annotations

import argparse
import os
import sys

from .batch import (
    DEFAULT_TOLERANCE,
    PredictionBatch,
    build_report,
    check_batch,
    read_batch,
    write_batch,
    write_report,
)
from .errors import InternalGuaranteeError, ShieldError
from .grad import apply_with_trace, vjp
from .layer import ENGINE_CHOICES, ShieldLayer, build_shield_layer_from_text
from .linear import DEFAULT_DERIVED_CAP, DEFAULT_STRICT_EPSILON

ENV_PREFIX = "SHIELD_"

EXIT_OK = 0
EXIT_VIOLATIONS = 1
EXIT_INPUT_ERROR = 2
EXIT_GUARANTEE = 3


def _env(name: str) -> str | None:
    return os.environ.get(ENV_PREFIX + name)


def _resolve(flag_value, env_name: str, cast, default=None):
    if flag_value is not None:
        return flag_value
    raw = _env(env_name)
    if raw is not None:
        return cast(raw)
    return default


def _parse_ordering(text: str) -> tuple[int, ...]:
    return tuple(int(part) for part in text.split(",") if part.strip() != "")


def _add_common(sub: argparse.ArgumentParser, with_io: bool) -> None:
    sub.add_argument("-r", "--requirements", help="path to the requirement file")
    sub.add_argument(
        "-n", "--num-variables", type=int, help="output dimension (inferred when omitted)"
    )
    sub.add_argument("--engine", choices=ENGINE_CHOICES, help="engine override (default auto)")
    sub.add_argument("--ordering", help="comma-separated variable order for the linear engine")
    sub.add_argument(
        "--strict-epsilon", type=float, help=f"margin for strict inequalities (default {DEFAULT_STRICT_EPSILON})"
    )
    sub.add_argument(
        "--tolerance", type=float, help=f"satisfaction tolerance for checking (default {DEFAULT_TOLERANCE})"
    )
    sub.add_argument(
        "--fm-cap", type=int, help=f"derived-constraint cap for elimination (default {DEFAULT_DERIVED_CAP})"
    )
    if with_io:
        sub.add_argument("-i", "--input", help="input prediction batch (CSV)")
        sub.add_argument("-o", "--output", help="output path for the corrected batch")
        sub.add_argument("--report", help="write a JSON compliance report here")


def build_arg_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="shield",
        description="Compile output requirements and correct prediction batches.",
    )
    subs = parser.add_subparsers(dest="command", required=True)

    compile_p = subs.add_parser("compile", help="compile requirements and print a plan summary")
    _add_common(compile_p, with_io=False)

    apply_p = subs.add_parser("apply", help="correct a prediction batch")
    _add_common(apply_p, with_io=True)

    check_p = subs.add_parser("check", help="count requirement violations in a batch")
    _add_common(check_p, with_io=True)

    vjp_p = subs.add_parser("vjp", help="pull a cotangent batch back through the correction")
    _add_common(vjp_p, with_io=True)
    vjp_p.add_argument("--cotangent", help="cotangent batch (CSV, same shape as the input)")

    return parser


class _Config:
    """Flag/environment resolution for one invocation."""

    def __init__(self, args: argparse.Namespace):
        self.requirements_path = _resolve(getattr(args, "requirements", None), "REQUIREMENTS", str)
        self.input_path = _resolve(getattr(args, "input", None), "INPUT", str)
        self.output_path = _resolve(getattr(args, "output", None), "OUTPUT", str)
        self.report_path = _resolve(getattr(args, "report", None), "REPORT", str)
        self.cotangent_path = _resolve(getattr(args, "cotangent", None), "COTANGENT", str)
        self.num_variables = _resolve(getattr(args, "num_variables", None), "NUM_VARIABLES", int)
        self.engine = _resolve(getattr(args, "engine", None), "ENGINE", str, "auto")
        self.ordering = _resolve(getattr(args, "ordering", None), "ORDERING", str)
        self.strict_epsilon = _resolve(
            getattr(args, "strict_epsilon", None), "STRICT_EPSILON", float, DEFAULT_STRICT_EPSILON
        )
        self.tolerance = _resolve(getattr(args, "tolerance", None), "TOLERANCE", float, DEFAULT_TOLERANCE)
        self.fm_cap = _resolve(getattr(args, "fm_cap", None), "FM_CAP", int, DEFAULT_DERIVED_CAP)

    def require(self, attr: str, flag: str) -> str:
        value = getattr(self, attr)
        if value is None:
            raise ShieldError(f"missing required option {flag}")
        return value

    def build_layer(self, num_variables: int | None) -> ShieldLayer:
        path = self.require("requirements_path", "-r/--requirements")
        try:
            with open(path, encoding="utf-8") as handle:
                text = handle.read()
        except OSError as exc:
            raise ShieldError(f"cannot read requirements: {exc}") from exc
        ordering = _parse_ordering(self.ordering) if self.ordering else None
        return build_shield_layer_from_text(
            text,
            num_variables,
            engine=self.engine,
            ordering=ordering,
            strict_epsilon=self.strict_epsilon,
            max_derived=self.fm_cap,
        )

    def read_input(self) -> PredictionBatch:
        path = self.require("input_path", "-i/--input")
        try:
            return read_batch(path)
        except OSError as exc:
            raise ShieldError(f"cannot read input: {exc}") from exc


def _print_summary(layer: ShieldLayer) -> None:
    info = layer.describe()
    print(f"dialect: {info['dialect']}")
    print(f"engine: {info['engine']}")
    print(f"variables: {info['num_variables']}")
    print(f"requirements: {info['num_requirements']} ({info['num_normalized']} after normalization)")
    print(f"derived constraints: {info['derived_constraints']}")
    order = info["ordering"]
    print(f"ordering: {','.join(map(str, order)) if order else '-'}")


def cmd_compile(cfg: _Config) -> int:
    layer = cfg.build_layer(cfg.num_variables)
    _print_summary(layer)
    return EXIT_OK


def cmd_apply(cfg: _Config) -> int:
    batch = cfg.read_input()
    n = cfg.num_variables if cfg.num_variables is not None else batch.width
    layer = cfg.build_layer(n)
    if batch.width != n:
        raise ShieldError(f"input width {batch.width} does not match num_variables {n}")

    corrected = PredictionBatch([layer.correct_row(row) for row in batch.rows], batch.names)
    # re-check before any output leaves the process: a violation here is a bug
    report = build_report(
        layer.requirements, layer.describe(), batch, corrected, cfg.tolerance
    )
    out_path = cfg.require("output_path", "-o/--output")
    write_batch(corrected, out_path)
    if cfg.report_path:
        write_report(report, cfg.report_path)
    print(
        f"rows: {report.total_rows}  corrected: {report.rows_corrected}  "
        f"violations repaired: {report.total_violations_before}"
    )
    return EXIT_OK


def cmd_check(cfg: _Config) -> int:
    batch = cfg.read_input()
    n = cfg.num_variables if cfg.num_variables is not None else batch.width
    layer = cfg.build_layer(n)
    if batch.width != n:
        raise ShieldError(f"input width {batch.width} does not match num_variables {n}")

    report = check_batch(layer.requirements, batch, layer.describe(), cfg.tolerance)
    for stat in report.requirements:
        print(f"requirement {stat.index} (line {stat.source_line}): violations={stat.violations_before}")
    total = report.total_violations_before
    print(f"total violations: {total} over {report.total_rows} rows")
    if cfg.report_path:
        write_report(report, cfg.report_path)
    return EXIT_VIOLATIONS if total else EXIT_OK


def cmd_vjp(cfg: _Config) -> int:
    batch = cfg.read_input()
    cot_path = cfg.require("cotangent_path", "--cotangent")
    try:
        cotangents = read_batch(cot_path)
    except OSError as exc:
        raise ShieldError(f"cannot read cotangent batch: {exc}") from exc
    n = cfg.num_variables if cfg.num_variables is not None else batch.width
    layer = cfg.build_layer(n)
    if batch.width != n or cotangents.width != n or len(cotangents) != len(batch):
        raise ShieldError(
            f"input ({len(batch)}x{batch.width}) and cotangent "
            f"({len(cotangents)}x{cotangents.width}) batches must both be rows of width {n}"
        )
    pulled = []
    for row, cot in zip(batch.rows, cotangents.rows):
        _, trace = apply_with_trace(layer.plan, row)
        pulled.append(vjp(layer.plan, trace, cot))
    out_path = cfg.require("output_path", "-o/--output")
    write_batch(PredictionBatch(pulled, batch.names), out_path)
    print(f"rows: {len(pulled)}")
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_arg_parser()
    args = parser.parse_args(argv)
    commands = {
        "compile": cmd_compile,
        "apply": cmd_apply,
        "check": cmd_check,
        "vjp": cmd_vjp,
    }
    try:
        return commands[args.command](_Config(args))
    except InternalGuaranteeError as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_GUARANTEE
    except ShieldError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT_ERROR
    except (OSError, ValueError) as exc:
        # ValueError covers malformed flag/environment values (orderings,
        # numbers, engine names) surfaced below argparse's own validation
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT_ERROR


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
