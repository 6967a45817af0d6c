"""Write a synthetic fixture: N in-window messages per channel plus a few outside the window."""

import argparse
import json
from datetime import datetime, timezone

from tgscrape.source import synthesize_fixture


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("output")
    p.add_argument("--counts", default="1200,800,500", help="in-window messages per channel")
    p.add_argument("--handles", default="@LulanoTelegram,@jairbolsonarobrasil,@Other_Channel_Name")
    p.add_argument("--date-min", default="2024-10-15")
    p.add_argument("--date-max", default="2025-01-15")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--latency", type=float, default=0.01, help="simulated seconds per delivered item")
    args = p.parse_args()

    counts = [int(c) for c in args.counts.split(",")]
    handles = [h.strip() for h in args.handles.split(",")][: len(counts)]
    window = tuple(
        datetime.fromisoformat(d).replace(tzinfo=timezone.utc) for d in (args.date_min, args.date_max)
    )
    doc = synthesize_fixture(counts, window, seed=args.seed, handles=handles, latency=args.latency)
    with open(args.output, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, ensure_ascii=False, indent=1)
    print(f"wrote {sum(counts)} in-window messages across {len(counts)} channels to {args.output}")


if __name__ == "__main__":
    main()
