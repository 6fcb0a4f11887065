"""
Run every reproduction target and print a pass/fail summary.
"""

import argparse
import sys
import time
from pathlib import Path

# Add parent directory to path
sys.path.insert(0, str(Path(__file__).parent.parent))

from j1j2bench.cli.output import write_record
from j1j2bench.cli.reproduce import TARGETS, run_target
from j1j2bench.config import settings
from j1j2bench.errors import NumericalError
import logging

logging.basicConfig(level=logging.WARNING, format='%(message)s')
logger = logging.getLogger(__name__)


def main() -> int:
    parser = argparse.ArgumentParser(description="Run all reproduction targets")
    parser.add_argument("--output", default=settings.output_dir, help="Output directory")
    parser.add_argument("--skip", nargs="*", default=[], help="Targets to skip")
    args = parser.parse_args()

    print("=" * 70)
    print("REPRODUCTION TARGETS")
    print("=" * 70)

    failures = 0
    for name in TARGETS:
        if name in args.skip:
            print(f"  {name:<32} skipped")
            continue
        started = time.perf_counter()
        try:
            record = run_target(name, {"target": name})
        except NumericalError as e:
            failures += 1
            print(f"  {name:<32} ERROR   {type(e).__name__}: {e.message}")
            continue
        write_record(record, args.output)
        failed = [k for k, c in record.checks.items() if not c.passed]
        failures += bool(failed)
        status = "FAILED  " + ", ".join(failed) if failed else "passed"
        print(f"  {name:<32} {status} ({time.perf_counter() - started:.1f}s)")

    print("=" * 70)
    skipped = sum(1 for name in TARGETS if name in args.skip)
    print(f"{len(TARGETS) - failures - skipped} passed, {failures} failed, {skipped} skipped")
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
