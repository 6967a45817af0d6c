"""Command-line entry point.

Fixture mode (``--fixture``) replays a JSON fixture on a simulated clock and
never opens a network connection. Without it the real Telegram transport is
used, which needs credentials from ``--credentials`` or the TG_* variables.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
from pathlib import Path

from .clock import SimulatedClock, SystemClock
from .config import (
    ConfigError,
    OutputFormat,
    ScrapeJobSpec,
    load_credentials,
    normalize_output_format,
    parse_channel_list,
    parse_date_window,
    validate_job,
)
from .engine import run_job
from .governor import BudgetLockedError, BudgetState, CheckpointPolicy, PacingPolicy, PersistentBudget
from .sink import ArchiveSink

logger = logging.getLogger("tgscrape")

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_FAILURE = 1
EXIT_INTERRUPTED = 130

CREDENTIALS_ENV = "TG_CREDENTIALS"


class VerificationCodeError(RuntimeError):
    pass


def prompt_verification_code(stream=None, prompt_out=None) -> str:
    """Read the login code the platform sends when a new session signs in."""
    stream = sys.stdin if stream is None else stream
    prompt_out = sys.stderr if prompt_out is None else prompt_out
    prompt_out.write("Enter the verification code Telegram sent you: ")
    prompt_out.flush()
    try:
        line = stream.readline()
    except (ValueError, OSError):
        line = ""
    if not line:
        raise VerificationCodeError(
            "no interactive input available for the verification code; run once in a terminal "
            "so the session file is created, then rerun non-interactively"
        )
    return line.strip()


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="tgscrape",
        description="Archive messages and comment threads from Telegram channels within a date window.",
    )
    p.add_argument("--channels", help="comma-separated @handles or https://t.me/ links")
    p.add_argument("--date-min", help="first day of the window, YYYY-MM-DD (UTC)")
    p.add_argument("--date-max", help="last day of the window, YYYY-MM-DD (UTC midnight, inclusive)")
    p.add_argument("--file-name", default="Test", help="stem for output files (default: %(default)s)")
    p.add_argument("--key-search", default="", help="only keep messages matching this keyword")
    p.add_argument("--max-messages", type=int, default=1_000_000, help="global message cap (default: %(default)s)")
    p.add_argument("--time-limit", type=int, default=21600, help="run deadline in seconds (default: %(default)s)")
    p.add_argument("--format", default="excel", help="excel or parquet (default: %(default)s)")
    p.add_argument("--fixture", type=Path, help="replay this JSON fixture instead of contacting Telegram")
    p.add_argument("--real-clock", action="store_true", help="in fixture mode, pace with real sleeps")
    p.add_argument("--credentials", type=Path, help=f"key=value credentials file (or set ${CREDENTIALS_ENV})")
    p.add_argument("--output-dir", type=Path, default=Path("."), help="where archives are written")
    p.add_argument("--budget-state", type=Path, help="persist the 24h community budget in this file")
    p.add_argument("--budget-limit", type=int, default=200, help="distinct communities per 24h (default: %(default)s)")
    p.add_argument("--checkpoint-interval", type=int, default=1000, help="backup every N messages")
    p.add_argument("--min-loop-seconds", type=float, default=60.0, help="minimum time spent per channel")
    p.add_argument("-q", "--quiet", action="store_true", help="suppress per-message progress output")
    return p


def job_from_args(args: argparse.Namespace) -> ScrapeJobSpec:
    for flag in ("channels", "date_min", "date_max"):
        if getattr(args, flag) is None:
            raise ConfigError(flag.replace("_", "-"), "required")
    return ScrapeJobSpec(
        channels=parse_channel_list(args.channels),
        window=parse_date_window(args.date_min, args.date_max),
        file_name=args.file_name,
        key_search=args.key_search,
        max_t_index=args.max_messages,
        time_limit=args.time_limit,
        output_format=normalize_output_format(args.format),
    )


def job_to_argv(job: ScrapeJobSpec) -> list[str]:
    """Render a job back to the flags that produce it."""
    return [
        "--channels", ", ".join(c.handle for c in job.channels),
        "--date-min", job.window.date_min.date().isoformat(),
        "--date-max", job.window.date_max.date().isoformat(),
        "--file-name", job.file_name,
        "--key-search", job.key_search,
        "--max-messages", str(job.max_t_index),
        "--time-limit", str(job.time_limit),
        "--format", job.output_format.value,
    ]


class _DevNull:
    def write(self, text):
        return len(text)

    def flush(self):
        pass


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(name)s: %(message)s")

    try:
        validated = validate_job(job_from_args(args))
        pacing = PacingPolicy(args.min_loop_seconds)
        checkpoint = CheckpointPolicy(args.checkpoint_interval)
        if args.budget_limit < 1:
            raise ConfigError("budget-limit", "must be >= 1")
    except (ConfigError, ValueError) as e:
        field = getattr(e, "field", None)
        print(f"error: --{field}: {e.message}" if field else f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    for warning in validated.warnings:
        print(f"warning: {warning}", file=sys.stderr)

    if args.fixture is not None:
        from .source import FixtureError, load_fixture

        clock = SystemClock() if args.real_clock else SimulatedClock()
        try:
            source = load_fixture(args.fixture, clock=clock if isinstance(clock, SimulatedClock) else None)
        except (OSError, FixtureError) as e:
            print(f"error: --fixture: {e}", file=sys.stderr)
            return EXIT_USAGE
        transport = None
    else:
        from .source import TelethonSource

        clock = SystemClock()
        try:
            cred_path = args.credentials or os.environ.get(CREDENTIALS_ENV)
            credentials = load_credentials(cred_path)
        except (ConfigError, OSError) as e:
            print(f"error: --credentials: {e}", file=sys.stderr)
            return EXIT_USAGE
        try:
            source = transport = TelethonSource(credentials, code_callback=prompt_verification_code)
        except RuntimeError as e:
            print(f"error: {e}", file=sys.stderr)
            return EXIT_FAILURE

    sink = ArchiveSink(args.output_dir, validated.file_name, validated.output_format)
    out = _DevNull() if args.quiet else sys.stdout

    try:
        if args.budget_state is not None:
            with PersistentBudget(args.budget_state, args.budget_limit) as budget:
                summary = _run(validated, source, sink, budget, clock, pacing, checkpoint, out, transport)
        else:
            budget = BudgetState(budget_limit=args.budget_limit)
            summary = _run(validated, source, sink, budget, clock, pacing, checkpoint, out, transport)
    except BudgetLockedError as e:
        print(f"error: --budget-state: {e}", file=sys.stderr)
        return EXIT_FAILURE
    except OSError as e:
        print(f"error: writing archive failed: {e}", file=sys.stderr)
        return EXIT_FAILURE

    print(summary.render())
    return EXIT_INTERRUPTED if summary.stop_reason == "interrupted" else EXIT_OK


def _run(validated, source, sink, budget, clock, pacing, checkpoint, out, transport):
    if transport is not None:  # pragma: no cover - real network session
        with transport:
            return run_job(validated, source, sink, budget, clock, pacing=pacing, checkpoint=checkpoint, out=out)
    return run_job(validated, source, sink, budget, clock, pacing=pacing, checkpoint=checkpoint, out=out)


if __name__ == "__main__":
    sys.exit(main())
