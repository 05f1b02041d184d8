"""Command line: build a bank from a JSON job file.

Exit codes: 0 success, 1 bad job file or usage, 2 extraction error,
3 internal error.
"""

from __future__ import annotations

import argparse
import logging
import sys

from .build import build_bank
from .errors import ExtractorError, JobError
from .job import load_job


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="cwebank", description="Build an embedding-bank directory from a job file."
    )
    parser.add_argument("job", help="path to the extraction job JSON")
    parser.add_argument("-v", "--verbose", action="store_true")
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 1 if exc.code else 0
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        job = load_job(args.job)
        out = build_bank(job)
    except JobError as exc:
        print(f"E:{exc.category}: {exc}", file=sys.stderr)
        return 1
    except ExtractorError as exc:
        print(f"E:{exc.category}: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # pragma: no cover - defensive
        print(f"E:internal: {exc}", file=sys.stderr)
        return 3
    print(out)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
