#!/usr/bin/env python3
"""Sweep response deadlines against one partition span and print the CSV.

Example:
    python scripts/run_frontier.py --tp 20 --deadlines 0,4,8,12,16,20
"""

import argparse
import sys

from capsim.harness import frontier_csv, frontier_sweep


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--tp", type=int, default=20, help="partition span in ticks")
    parser.add_argument(
        "--deadlines",
        default="0,2,4,8,12,16,20",
        help="comma-separated response deadlines",
    )
    parser.add_argument("--latency", type=int, default=1)
    parser.add_argument("--gossip", type=int, default=2, help="anti-entropy period")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("-o", "--output", help="write CSV here instead of stdout")
    args = parser.parse_args(argv)

    deadlines = [int(part) for part in args.deadlines.split(",") if part]
    rows = frontier_sweep(
        args.tp,
        deadlines,
        {"latency": args.latency, "seed": args.seed, "G": args.gossip},
    )
    text = frontier_csv(rows)
    if args.output:
        with open(args.output, "w", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0 if all(row.bound_ok for row in rows) else 1


if __name__ == "__main__":
    sys.exit(main())
