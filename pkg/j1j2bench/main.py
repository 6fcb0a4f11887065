"""
Console entry point.

Exit status 0 on success, 2 on invalid configuration, 3 on a numerical failure (or a
failed reproduce check under --strict). Errors are reported on stderr as one JSON
record; logs also go to stderr so stdout carries only the written file paths.
"""

import json
import logging
import sys
from typing import Any, Dict, List, Optional, Sequence

from pydantic import ValidationError

from j1j2bench.cli.commands import run
from j1j2bench.cli.config_loader import load_config
from j1j2bench.cli.output import write_record
from j1j2bench.config import settings
from j1j2bench.errors import ConfigError, NumericalError, WorkbenchError

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3


class JsonFormatter(logging.Formatter):
    """One JSON object per log line."""

    def format(self, record: logging.LogRecord) -> str:
        payload = {
            "time": self.formatTime(record),
            "logger": record.name,
            "level": record.levelname,
            "message": record.getMessage(),
        }
        if record.exc_info:
            payload["exception"] = self.formatException(record.exc_info)
        return json.dumps(payload)


def configure_logging() -> None:
    handler = logging.StreamHandler(sys.stderr)
    if settings.log_format == "json":
        handler.setFormatter(JsonFormatter())
    else:
        handler.setFormatter(logging.Formatter("%(asctime)s - %(name)s - %(levelname)s - %(message)s"))
    logging.basicConfig(level=getattr(logging, settings.log_level), handlers=[handler], force=True)


def error_record(error: Exception, exit_code: int) -> Dict[str, Any]:
    if isinstance(error, WorkbenchError):
        record = error.to_record()
        record["exit_code"] = exit_code
        return record
    if isinstance(error, ValidationError):
        fields = [".".join(str(p) for p in e["loc"]) for e in error.errors()]
        return {
            "error": "ValidationError",
            "message": f"invalid parameters: {', '.join(fields) or error.errors()[0]['msg']}",
            "diagnostics": {"fields": fields},
            "exit_code": exit_code,
        }
    return {"error": type(error).__name__, "message": str(error), "diagnostics": {}, "exit_code": exit_code}


def report_error(error: Exception, exit_code: int) -> int:
    print(json.dumps(error_record(error, exit_code), sort_keys=True, default=str), file=sys.stderr)
    return exit_code


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Run one command; returns the process exit status."""
    configure_logging()
    try:
        config = load_config(argv)
    except (ConfigError, ValidationError) as e:
        return report_error(e, EXIT_CONFIG)

    try:
        record = run(config)
    except (ConfigError, ValidationError) as e:
        return report_error(e, EXIT_CONFIG)
    except NumericalError as e:
        logger.error(f"{type(e).__name__}: {e.message}")
        return report_error(e, EXIT_NUMERICAL)

    paths: List[str] = [str(p) for p in write_record(record, config.output, config.format)]
    for path in paths:
        print(path)

    failed = [name for name, check in record.checks.items() if not check.passed]
    if failed and config.strict:
        error = NumericalError(
            f"reproduce checks failed: {', '.join(failed)}",
            {name: record.checks[name].model_dump() for name in failed},
        )
        return report_error(error, EXIT_NUMERICAL)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
