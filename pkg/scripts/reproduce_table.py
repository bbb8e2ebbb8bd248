"""Consensus-number table for logical and arithmetic shift registers.

    python3 scripts/reproduce_table.py --widths 1-3 --out results/table.csv

Logical widths are searched until the first n that is not discerning.
Arithmetic widths are probed up to ``--arith-max-n`` only: the count never
stops growing, so the row reads ``>=N``.
"""

from __future__ import annotations

import argparse
import csv
import sys
import time
from pathlib import Path

from shiftcons.discern import probe_consensus_number
from shiftcons.shiftreg import ObjectKind


def parse_widths(text: str) -> range:
    lo, _, hi = text.partition("-")
    return range(int(lo), int(hi or lo) + 1)


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--widths", type=parse_widths, default=range(1, 4))
    ap.add_argument("--arith-max-n", type=int, default=4)
    ap.add_argument("--fast", action="store_true", help="symmetry-reduced search")
    ap.add_argument("--jobs", type=int, default=1)
    ap.add_argument("--out", type=Path, help="CSV path (stdout if omitted)")
    args = ap.parse_args(argv)

    rows = []
    for kind in (ObjectKind.LOGICAL, ObjectKind.ARITHMETIC):
        for w in args.widths:
            max_n = w + 1 if kind is ObjectKind.LOGICAL else args.arith_max_n
            started = time.perf_counter()
            probe = probe_consensus_number(w, kind, max_n=max_n, fast=args.fast, jobs=args.jobs)
            rows.append({
                "width": w,
                "kind": kind.value,
                "consensus_number": probe.label,
                "first_non_discerning_n": probe.first_non_discerning_n or "",
                "nodes_searched": probe.nodes,
                "seconds": f"{time.perf_counter() - started:.2f}",
            })
            print(f"{kind.value:10s} w={w}: {probe.label:>4s}  ({rows[-1]['seconds']}s)", file=sys.stderr)

    if args.out:
        args.out.parent.mkdir(parents=True, exist_ok=True)
        handle = args.out.open("w", newline="")
    else:
        handle = sys.stdout
    writer = csv.DictWriter(handle, fieldnames=list(rows[0]))
    writer.writeheader()
    writer.writerows(rows)
    if args.out:
        handle.close()
    return 0


if __name__ == "__main__":
    sys.exit(main())
