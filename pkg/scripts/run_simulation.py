"""Run the full pipeline against a synthetic fixture and report files and timings.

    python scripts/run_simulation.py --out runs/demo --format parquet
"""

import argparse
import io
import json
import time
from datetime import datetime, timezone
from pathlib import Path

from tgscrape.clock import SimulatedClock
from tgscrape.config import (
    ScrapeJobSpec,
    normalize_output_format,
    parse_channel_list,
    parse_date_window,
    validate_job,
)
from tgscrape.engine import run_job
from tgscrape.governor import BudgetState
from tgscrape.sink import ArchiveSink, read_back
from tgscrape.source import SimulatedSource, parse_fixture, synthesize_fixture


def main():
    p = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("--out", type=Path, default=Path("runs/sim"))
    p.add_argument("--counts", default="1200,800,500")
    p.add_argument("--format", default="excel")
    p.add_argument("--latency", type=float, default=0.05)
    p.add_argument("--seed", type=int, default=0)
    args = p.parse_args()

    counts = [int(c) for c in args.counts.split(",")]
    handles = [f"@sim_{i}" for i in range(len(counts))]
    window = parse_date_window("2024-10-15", "2025-01-15")
    doc = synthesize_fixture(counts, (window.date_min, window.date_max), seed=args.seed,
                             handles=handles, latency=args.latency)
    job = validate_job(
        ScrapeJobSpec(
            channels=parse_channel_list(",".join(handles)),
            window=window,
            file_name="Sim",
            output_format=normalize_output_format(args.format),
        )
    )
    clock = SimulatedClock(start=datetime(2025, 1, 16, tzinfo=timezone.utc).timestamp())
    channels, latency = parse_fixture(doc)
    source = SimulatedSource(channels, clock=clock, latency=latency)
    sink = ArchiveSink(args.out, job.file_name, job.output_format)

    t0 = time.perf_counter()
    summary = run_job(job, source, sink, BudgetState(), clock, out=io.StringIO())
    wall = time.perf_counter() - t0

    final = read_back(summary.final_file)
    threads = sum(1 for r in final.rows if json.loads(r.comments_list))
    print(summary.render())
    print(f"simulated duration: {summary.wall_seconds:.0f}s, sleeps: {clock.sleeps}")
    print(f"real duration: {wall:.2f}s; {len(final)} rows, {threads} with comment threads")
    for path in summary.files_written:
        print(f"  {path.name}  {path.stat().st_size:,} bytes")


if __name__ == "__main__":
    main()
