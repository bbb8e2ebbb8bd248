"""Exhaustively model-check the layered consensus protocol on small instances.

    python3 scripts/model_check_protocols.py
    python3 scripts/model_check_protocols.py --instance 3,3,logical --all-orders

Each instance runs every schedule for one distinct-input vector and one
equal-input vector, followed by the single-process mutation check.
"""

from __future__ import annotations

import argparse
import sys
import time

from shiftcons.checker import explore_all_schedules, input_vectors
from shiftcons.protocol import build_consensus, invert_classification
from shiftcons.shiftreg import ObjectKind

DEFAULT = ["2,2,logical", "3,3,logical", "3,2,arithmetic", "4,2,arithmetic"]


def parse_instance(text: str):
    n, w, kind = text.split(",")
    return int(n), int(w), ObjectKind.parse(kind)


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--instance", action="append", type=parse_instance,
                    help="n,w,kind; repeatable (default: a fixed set up to n=4)")
    ap.add_argument("--all-orders", action="store_true", help="every permutation of 1..n, not just one")
    args = ap.parse_args(argv)

    failures = 0
    for n, w, kind in args.instance or [parse_instance(t) for t in DEFAULT]:
        protocol = build_consensus(n, w, kind)
        vectors = input_vectors(n)
        if not args.all_orders:
            vectors = [vectors[0], vectors[-1]]
        for inputs in vectors:
            started = time.perf_counter()
            v = explore_all_schedules(protocol, inputs)
            status = "ok" if v.ok else "FAILED"
            print(f"n={n} w={w} {kind.value:10s} inputs={inputs}: {status}  "
                  f"schedules={v.schedules} states={v.states} ({time.perf_counter() - started:.1f}s)")
            failures += not v.ok
        if n == 2:
            mutant = explore_all_schedules(invert_classification(protocol, 1), (1, 2))
            caught = not mutant.agreement
            print(f"n={n} w={w} {kind.value:10s} mutant: {'caught' if caught else 'MISSED'}")
            failures += not caught
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
