"""
RunConfig from command-line flags and an optional key-value config file.

Precedence, lowest first: RunConfig defaults, the file's [model] section, the file's
section named after the command, flags. The source of every value is kept in
RunConfig.provenance.
"""

import argparse
import configparser
import logging
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

from pydantic import ValidationError

from j1j2bench.cli.reproduce import resolve_target
from j1j2bench.config import settings
from j1j2bench.errors import ConfigError
from j1j2bench.models.schemas import Command, Regime, RunConfig

logger = logging.getLogger(__name__)

MODEL_SECTION = "model"

# commands that run without model parameters
PARAMETER_FREE = {Command.REPRODUCE}

# flag destination -> parser for file values
FIELD_TYPES = {
    "two_n": int,
    "b": float,
    "eta": float,
    "regime": str,
    "output": str,
    "format": str,
    "omega_max": int,
    "step": float,
    "sizes": str,
    "seeds_file": str,
    "branch": str,
    "n": int,
    "lam": float,
    "mu": float,
    "mu1": float,
    "mu2": float,
    "grid_points": int,
    "kind": str,
    "quantity": str,
    "strict": str,
}


def build_parser() -> argparse.ArgumentParser:
    """Argument parser; every option defaults to None so given flags can be told apart."""
    parser = argparse.ArgumentParser(
        prog="j1j2bench",
        description="Numerical workbench for the integrable antiperiodic J1-J2 spin chain",
    )
    parser.add_argument("command", choices=[c.value for c in Command], help="Operation to run")
    parser.add_argument("target", nargs="?", default=None, help="Target name for reproduce")
    parser.add_argument("--config", default=None, help="Key-value config file")
    parser.add_argument("--two-n", dest="two_n", type=int, default=None, help="Number of sites 2N")
    parser.add_argument("--b", type=float, default=None, help="Inhomogeneity a = i*b")
    parser.add_argument("--eta", type=float, default=None, help="Real crossing parameter")
    parser.add_argument(
        "--eta-plus",
        dest="eta_plus",
        type=float,
        default=None,
        help="Real part of eta in the eta + i*pi regime (sets the regime)",
    )
    parser.add_argument("--regime", choices=[r.value for r in Regime], default=None)
    parser.add_argument("--output", default=None, help="Output directory")
    parser.add_argument("--format", choices=["csv", "json", "both"], default=None)
    parser.add_argument("--omega-max", dest="omega_max", type=int, default=None, help="Fourier cutoff override")
    parser.add_argument("--step", type=float, default=None, help="Grid step of b scans")
    parser.add_argument("--sizes", default=None, help="Comma-separated chain lengths, e.g. 8,10,12")
    parser.add_argument("--seeds-file", dest="seeds_file", default=None, help="JSON list of root-pattern seeds")
    parser.add_argument("--branch", default=None, help="Excitation branch e1, e2, e3 or e4")
    parser.add_argument("--n", type=int, default=None, help="String length of the e1 pair")
    parser.add_argument("--lam", type=float, default=None, help="Position of the e1 pair")
    parser.add_argument("--mu", type=float, default=None, help="Boundary-string position")
    parser.add_argument("--mu1", type=float, default=None)
    parser.add_argument("--mu2", type=float, default=None)
    parser.add_argument("--grid-points", dest="grid_points", type=int, default=None)
    parser.add_argument("--kind", choices=["ferro", "neel"], default=None, help="Kink basis")
    parser.add_argument("--quantity", default=None, help="Quantity of thermo or scaling")
    parser.add_argument("--strict", action="store_const", const=True, default=None, help="Exit 3 on failed checks")
    return parser


def _parse_sizes(raw: Any) -> List[int]:
    if isinstance(raw, list):
        return [int(v) for v in raw]
    try:
        return [int(v) for v in str(raw).replace(" ", "").split(",") if v]
    except ValueError as e:
        raise ConfigError(f"sizes must be a comma-separated list of integers: {raw!r}", {"field": "sizes"}) from e


def _read_file(path: str, command: Command) -> Dict[str, Dict[str, str]]:
    """Values of the [model] and command sections, keyed by section."""
    if not Path(path).is_file():
        raise ConfigError(f"config file not found: {path}", {"path": path})
    parser = configparser.ConfigParser(interpolation=None)
    try:
        parser.read(path, encoding="utf-8")
    except configparser.MissingSectionHeaderError as e:
        raise ConfigError(f"cannot parse {path} at line {e.lineno}: no section header", {"path": path, "lines": [e.lineno]}) from e
    except configparser.ParsingError as e:
        lines = [lineno for lineno, _ in e.errors]
        raise ConfigError(f"cannot parse {path} at line {lines[0]}", {"path": path, "lines": lines}) from e
    except configparser.Error as e:
        raise ConfigError(f"cannot parse {path}: {e.message}", {"path": path}) from e
    sections = {}
    for section in (MODEL_SECTION, command.value):
        if parser.has_section(section):
            sections[section] = {k.replace("-", "_"): v for k, v in parser.items(section)}
    return sections


def _coerce(key: str, raw: str, section: str) -> Any:
    if key not in FIELD_TYPES:
        raise ConfigError(f"unknown key '{key}' in section [{section}]", {"field": key, "section": section})
    if key == "sizes":
        return _parse_sizes(raw)
    if key == "strict":
        return raw.strip().lower() in ("1", "true", "yes", "on")
    try:
        return FIELD_TYPES[key](raw)
    except ValueError as e:
        raise ConfigError(f"invalid value for '{key}' in [{section}]: {raw!r}", {"field": key, "section": section}) from e


def load_config(argv: Optional[Sequence[str]] = None) -> RunConfig:
    """
    Parse flags (and the file named by --config) into a validated RunConfig.

    Raises:
        ConfigError: unparsable file, unknown key, invalid value or a missing required field
    """
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        # argparse already printed its usage message
        raise ConfigError("invalid command line", {"argv": list(argv or [])}) from e
    command = Command(args.command)

    values: Dict[str, Any] = {"command": command}
    provenance: Dict[str, str] = {"command": "flag"}

    if args.config:
        for section, entries in _read_file(args.config, command).items():
            for key, raw in entries.items():
                values[key] = _coerce(key, raw, section)
                provenance[key] = f"file:[{section}]"

    flags = {k: v for k, v in vars(args).items() if v is not None and k not in ("command", "config", "target", "eta_plus")}
    if args.eta_plus is not None:
        if args.eta is not None:
            raise ConfigError("--eta and --eta-plus are mutually exclusive", {"field": "eta"})
        flags["eta"] = args.eta_plus
        flags["regime"] = Regime.ETA_PLUS_I_PI.value
    if "sizes" in flags:
        flags["sizes"] = _parse_sizes(flags["sizes"])
    for key, value in flags.items():
        values[key] = value
        provenance[key] = "flag"
    if args.target is not None:
        values["target"] = args.target
        provenance["target"] = "flag"

    if "output" not in values:
        values["output"] = settings.output_dir
        provenance["output"] = "settings"
    for field in RunConfig.model_fields:
        provenance.setdefault(field, "default")
    provenance.pop("provenance", None)

    try:
        config = RunConfig(**values, provenance=provenance)
    except ValidationError as e:
        fields = [".".join(str(p) for p in err["loc"]) for err in e.errors()]
        raise ConfigError(f"invalid configuration: {', '.join(fields)}", {"fields": fields, "errors": e.errors(include_url=False)}) from e

    _check_command(config)
    logger.debug(f"Loaded config for '{command.value}' ({sum(1 for v in provenance.values() if v != 'default')} explicit values)")
    return config


def _check_command(config: RunConfig) -> None:
    """Command preconditions that depend on more than one field."""
    if config.command in PARAMETER_FREE:
        if not config.target:
            raise ConfigError("reproduce requires a target name", {"field": "target"})
        resolve_target(config.target)
        return
    if config.eta is None:
        raise ConfigError(f"'{config.command.value}' requires eta (--eta or --eta-plus)", {"field": "eta"})
    try:
        config.model_params()
    except ValidationError as e:
        fields = [".".join(str(p) for p in err["loc"]) or err["msg"] for err in e.errors()]
        raise ConfigError(f"invalid model parameters: {e.errors()[0]['msg']}", {"fields": fields}) from e
    if config.command == Command.EXCITE and config.branch is None:
        raise ConfigError("excite requires --branch", {"field": "branch"})
    if config.command == Command.SCALING:
        if not config.quantity:
            raise ConfigError("scaling requires --quantity", {"field": "quantity"})
        if len(config.sizes) < 3:
            raise ConfigError("scaling requires at least three --sizes", {"field": "sizes"})
