"""
Command-line entry point

    causaleval fit --data runs.csv --formula "acc ~ pretrain + arch + algo"
    causaleval compare --data runs.csv --formula "acc ~ arch" --formula "acc ~ arch + algo"
    causaleval demo --output demo.csv

Exit codes: 0 on success, 1 on usage errors, 2 on data/model errors. Errors
are reported as one JSON line on stderr and never leave partial output files.
With --output PATH the JSON report goes to PATH and the text report to PATH
with a .txt suffix; without it the text report is printed on stdout.

A --config TOML file may set any flag (underscored key names); flags given on
the command line take precedence over the file.
"""

import argparse
import json
import logging
import os
import sys
import tempfile
import tomllib
from pathlib import Path
from typing import Any, Dict, NoReturn, Optional, Sequence

from pydantic import ValidationError

from . import __version__
from .analysis.report import render_json, render_text
from .config import config
from .errors import CausalEvalError, UsageError
from .models.requests import RunConfig
from .services.analysis_service import AnalysisService
from .services.demo_data import DEMO_ROWS, DEMO_SEED, write_demo_csv

logger = logging.getLogger(__name__)

SUBCOMMANDS = ("fit", "anova", "diagnose", "compare", "ame")


class _ArgumentParser(argparse.ArgumentParser):
    def error(self, message: str) -> NoReturn:
        raise UsageError(message)


def _reference(text: str) -> tuple[str, str]:
    name, sep, level = text.partition("=")
    if not sep or not name.strip() or not level.strip():
        raise argparse.ArgumentTypeError(f"expected VAR=LEVEL, got '{text}'")
    return name.strip(), level.strip()


def build_parser() -> argparse.ArgumentParser:
    parser = _ArgumentParser(
        prog="causaleval",
        description="Econometric regression reports for ML experiment logs",
        allow_abbrev=False,
    )
    parser.add_argument("--version", action="version", version=f"causaleval {__version__}")
    commands = parser.add_subparsers(dest="subcommand", required=True, parser_class=_ArgumentParser)

    # None marks a flag as not given; --config values fill those
    for name in SUBCOMMANDS:
        sub = commands.add_parser(name, allow_abbrev=False)
        sub.add_argument("--config", type=Path, help="TOML file with flag values")
        sub.add_argument("--data", type=Path, help="CSV file with a header row")
        sub.add_argument("--schema", type=Path, help="schema file of name=continuous|categorical lines")
        sub.add_argument("--formula", action="append", help="model formula; repeatable")
        sub.add_argument("--family", choices=["ols", "logit"])
        sub.add_argument("--alpha", type=float)
        sub.add_argument("--center", action="append", help="continuous column to mean-center; repeatable")
        sub.add_argument("--reference", action="append", type=_reference, metavar="VAR=LEVEL")
        sub.add_argument("--seed", type=int)
        sub.add_argument("--n-sim", type=int)
        sub.add_argument("--workers", type=int)
        sub.add_argument("--output", type=Path, help="JSON report path; text goes to the .txt sibling")
        sub.add_argument("--timestamp", help="timestamp recorded in the report meta")
        sub.add_argument("--verbose", action="store_true", default=None)
        if name == "anova":
            sub.add_argument("--anova-method", choices=["model_comparison", "single_term"])
        if name == "ame":
            sub.add_argument("--terms", action="append", help="design column; repeatable")
        if name == "fit":
            sub.add_argument("--no-diagnostics", dest="diagnostics", action="store_false", default=None)

    demo = commands.add_parser("demo", allow_abbrev=False, help="write the synthetic demo dataset")
    demo.add_argument("--output", type=Path, default=Path("demo.csv"))
    demo.add_argument("--rows", type=int, default=DEMO_ROWS)
    demo.add_argument("--seed", type=int, default=DEMO_SEED)
    demo.add_argument("--verbose", action="store_true")
    return parser


def _read_config_file(path: Path) -> Dict[str, Any]:
    try:
        with open(path, "rb") as f:
            values = tomllib.load(f)
    except FileNotFoundError:
        raise UsageError(f"config file not found: {path}")
    except tomllib.TOMLDecodeError as e:
        raise UsageError(f"invalid config file {path}: {e}")

    values = {key.replace("-", "_"): value for key, value in values.items()}
    if "subcommand" in values:
        raise UsageError(f"invalid config file {path}: 'subcommand' is chosen on the command line")
    if "formula" in values:
        formula = values.pop("formula")
        values["formulas"] = [formula] if isinstance(formula, str) else formula
    if "data" in values:
        values["data_path"] = values.pop("data")
    if "schema" in values:
        values["schema_path"] = values.pop("schema")
    values.pop("verbose", None)
    return values


def to_run_config(args: argparse.Namespace) -> RunConfig:
    """Merge defaults, the optional config file and the command line into a RunConfig"""
    analysis = config.analysis
    values: Dict[str, Any] = {
        "alpha": analysis.alpha,
        "seed": analysis.seed,
        "n_sim": analysis.n_sim,
        "workers": analysis.workers,
        "timestamp": analysis.timestamp,
    }
    if args.config is not None:
        values.update(_read_config_file(args.config))

    flags = {
        "data_path": args.data,
        "schema_path": args.schema,
        "formulas": args.formula,
        "family": args.family,
        "alpha": args.alpha,
        "center": args.center,
        "reference": dict(args.reference) if args.reference else None,
        "seed": args.seed,
        "n_sim": args.n_sim,
        "workers": args.workers,
        "output": args.output,
        "timestamp": args.timestamp,
        "anova_method": getattr(args, "anova_method", None),
        "terms": getattr(args, "terms", None),
        "diagnostics": getattr(args, "diagnostics", None),
    }
    values.update({key: value for key, value in flags.items() if value is not None})

    if "data_path" not in values:
        raise UsageError("--data is required")
    if not values.get("formulas"):
        raise UsageError("at least one --formula is required")

    try:
        return RunConfig(subcommand=args.subcommand, **values)
    except ValidationError as e:
        problems = "; ".join(
            f"{'.'.join(str(p) for p in err['loc']) or 'config'}: {err['msg']}" for err in e.errors()
        )
        raise UsageError(f"invalid run configuration: {problems}")


def _write_atomic(path: Path, payload: bytes) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as f:
            f.write(payload)
        os.replace(tmp, path)
    except BaseException:
        Path(tmp).unlink(missing_ok=True)
        raise


def write_outputs(run: RunConfig, json_bytes: bytes, text: str) -> None:
    """Write the JSON and text reports, or print the text report when no output path is set"""
    if run.output is None:
        sys.stdout.write(text)
        return
    text_path = run.output.with_suffix(".txt")
    if text_path == run.output:
        raise UsageError(f"--output must not end in .txt: {run.output}")
    _write_atomic(run.output, json_bytes)
    try:
        _write_atomic(text_path, text.encode("utf-8"))
    except OSError:
        run.output.unlink(missing_ok=True)
        raise
    logger.info(f"Report written to {run.output} and {text_path}")


def _setup_logging(verbose: bool) -> None:
    if config.debug:
        level = logging.DEBUG
    elif verbose:
        level = logging.INFO
    else:
        level = logging.WARNING
    logging.basicConfig(
        level=level,
        format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
        stream=sys.stderr,
    )


def _report_error(error: CausalEvalError) -> int:
    line = {"error": {"kind": error.kind, "message": str(error), "exit_code": error.exit_code}}
    sys.stderr.write(json.dumps(line, ensure_ascii=False) + "\n")
    return error.exit_code


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Run the CLI and return the process exit code"""
    try:
        args = build_parser().parse_args(argv)
        _setup_logging(bool(args.verbose))

        if args.subcommand == "demo":
            if args.rows < 1:
                raise UsageError("--rows must be positive")
            write_demo_csv(args.output, args.rows, args.seed)
            return 0

        run = to_run_config(args)
        report = AnalysisService().run(run)
        write_outputs(run, render_json(report), render_text(report))
        return 0

    except CausalEvalError as e:
        return _report_error(e)
    except OSError as e:
        return _report_error(UsageError(f"I/O error: {e}"))


if __name__ == "__main__":
    sys.exit(main())
