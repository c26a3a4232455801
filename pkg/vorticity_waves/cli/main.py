"""
Command-line entry point

Configuration is resolved as Settings defaults, then the YAML file given with
--config, then command-line flags. Exit codes: 0 success, 1 failed
validation, 2 solver fault, 3 configuration error, 4 no vertical tangent.
"""
import argparse
import logging
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

from pydantic import ValidationError

from vorticity_waves.cli import storage
from vorticity_waves.cli.commands import cmd_compute, cmd_critlayer
from vorticity_waves.cli.validation import cmd_validate
from vorticity_waves.config import load_config_file, settings
from vorticity_waves.errors import ConfigError, WaveSolverError
from vorticity_waves.models.schemas import EventKind, RunConfig, SolverOptions

logger = logging.getLogger(__name__)

# argparse destination -> RunConfig field
FLAG_FIELDS = {
    "g": "G",
    "a": "a",
    "l": "l",
    "omega": "omega",
    "bernoulli": "bernoulli",
    "a_start": "a_start",
    "a_end": "a_end",
    "from_bifurcation": "from_bifurcation",
    "switch_amplitude": "switch_amplitude",
    "initial": "initial",
    "branch": "branch",
    "solution": "solution",
    "kind": "kinds",
    "alpha": "alpha",
    "half_width": "half_width",
    "beta_min": "beta_min",
    "beta_max": "beta_max",
    "columns": "columns",
    "rows": "rows",
    "only": "only",
    "perturb": "perturb",
    "out": "out",
    "n": "n",
    "seed": "seed",
    "workers": "workers",
}

OPTION_FLAGS = ("newton_tol", "max_newton_iters", "gap_tol", "slope_tol", "n_max")


def _a_end(value: str) -> Union[float, str]:
    if value == "touch":
        return value
    try:
        return float(value)
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"expected a number or 'touch', got '{value}'") from e


class ConfigArgumentParser(argparse.ArgumentParser):
    """Parser whose usage errors surface as ConfigError (exit 3)"""

    def error(self, message: str):
        raise ConfigError(f"{self.prog}: {message}", details={"usage": self.format_usage().strip()})


def build_parser() -> argparse.ArgumentParser:
    common = ConfigArgumentParser(add_help=False)
    common.add_argument("--config", help="YAML file with RunConfig keys")
    common.add_argument("--out", help="Output directory")
    common.add_argument("--n", type=int, help="Truncation order N")
    common.add_argument("--seed", type=int, help="Seed for randomized checks")
    common.add_argument("--log-level", help="Logging level (default from WAVES_LOG_LEVEL)")
    common.add_argument("--newton-tol", type=float, help="Residual sup-norm target")
    common.add_argument("--max-newton-iters", type=int)
    common.add_argument("--gap-tol", type=float)
    common.add_argument("--slope-tol", type=float)
    common.add_argument("--n-max", type=int, help="Largest truncation reached by escalation")

    parser = ConfigArgumentParser(
        prog="vorticity-waves",
        description="Steady periodic water waves over constant vorticity",
    )
    subparsers = parser.add_subparsers(dest="command", required=True)

    exact = subparsers.add_parser("exact", parents=[common], help="Zero-gravity exact wave")
    exact.add_argument("--a", type=float)

    solve = subparsers.add_parser("solve", parents=[common], help="Newton solve")
    solve.add_argument("--g", type=float)
    solve.add_argument("--a", type=float)
    solve.add_argument("--l", type=float)
    solve.add_argument("--omega", type=float, help="Vorticity, with --bernoulli")
    solve.add_argument("--bernoulli", type=float, help="Bernoulli constant, with --omega")
    solve.add_argument("--initial", help="Initial Solution file")

    cont = subparsers.add_parser("continue", parents=[common], help="Continuation in a at fixed (G, l)")
    cont.add_argument("--g", type=float, nargs="+", help="One gravity, or several for a sweep")
    cont.add_argument("--l", type=float)
    cont.add_argument("--a-start", type=float)
    cont.add_argument("--a-end", type=_a_end, help="Final a or 'touch'")
    cont.add_argument("--from-bifurcation", action="store_true", default=None)
    cont.add_argument("--switch-amplitude", type=float)
    cont.add_argument("--initial", help="Starting Solution file")
    cont.add_argument("--workers", type=int, help="Worker processes for a sweep")

    events = subparsers.add_parser("events", parents=[common], help="Refine events on a Branch")
    events.add_argument("--branch", help="Branch file")
    events.add_argument("--kind", nargs="+", choices=[kind.value for kind in EventKind])

    crit = subparsers.add_parser("critlayer", parents=[common], help="Critical layer near a vertical tangent")
    crit.add_argument("--solution", help="Solution file")
    crit.add_argument("--alpha", type=float, help="Override the vertical-tangent parameter")
    crit.add_argument("--half-width", type=float)
    crit.add_argument("--beta-min", type=float)
    crit.add_argument("--beta-max", type=float)
    crit.add_argument("--columns", type=int)
    crit.add_argument("--rows", type=int)

    validate = subparsers.add_parser("validate", parents=[common], help="Validation suite")
    validate.add_argument("--only", nargs="+", help="Check names or groups")
    validate.add_argument("--perturb", help="Deliberately fail the named check")
    return parser


def resolve_config(args: argparse.Namespace) -> RunConfig:
    """Settings defaults <- YAML file <- flags"""
    values: Dict[str, Any] = {}
    if getattr(args, "config", None):
        values.update(load_config_file(args.config))
    values["command"] = args.command

    flags = vars(args)
    for dest, field in FLAG_FIELDS.items():
        value = flags.get(dest)
        if value is not None:
            values[field] = value
    if isinstance(values.get("G"), list):
        gravities = values.pop("G")
        values["G"] = gravities[0]
        if len(gravities) > 1:
            values["G_values"] = gravities

    option_values = dict(values.pop("options", None) or {})
    for name in OPTION_FLAGS:
        if flags.get(name) is not None:
            option_values[name] = flags[name]
    try:
        values["options"] = SolverOptions.from_settings(**option_values)
        return RunConfig(**values)
    except (ValidationError, TypeError) as e:
        raise ConfigError(f"Invalid configuration: {e}") from e


def run(cfg: RunConfig) -> int:
    if cfg.command == "critlayer":
        return cmd_critlayer(cfg)
    if cfg.command == "validate":
        return cmd_validate(cfg)
    return cmd_compute(cfg)


def configure_logging(level: Optional[str] = None):
    name = (level or settings.log_level).upper()
    if not isinstance(logging.getLevelName(name), int):
        raise ConfigError(f"Unknown log level '{name}'")
    logging.basicConfig(level=name, format=settings.log_format)


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    out_dir = Path(settings.output_dir)
    try:
        args = parser.parse_args(argv)
        if args.out:
            out_dir = Path(args.out)
        configure_logging(args.log_level)
        cfg = resolve_config(args)
        out_dir = Path(cfg.out)
        logger.info(f"Running '{cfg.command}' with N={cfg.n}, output in {out_dir}")
        return run(cfg)
    except WaveSolverError as e:
        logger.error(f"{e.reason}: {e.message}", exc_info=True)
        try:
            storage.write_error(e, out_dir)
        except OSError:
            logger.error(f"Could not write the error report to {out_dir}")
        return e.exit_code


if __name__ == "__main__":
    sys.exit(main())
