"""Bound for a bundled problem when the degenerate case is ignored.

Usage: python scripts/optimal_reference.py [ex1|ex2]
"""

from __future__ import annotations

import sys
import time

from lfl3.driver import optimal_reference
from lfl3.problem import bundled_problem


def run(key: str) -> None:
    t0 = time.perf_counter()
    ref = optimal_reference(bundled_problem(key))
    print(f"{key}: reference bound {ref.bound.hi_float:.6g} ({time.perf_counter() - t0:.1f} s)")
    print("history: " + ", ".join(f"{h:.6g}" for h in ref.history))
    if ref.note:
        print(ref.note)


if __name__ == "__main__":
    run(sys.argv[1] if len(sys.argv) > 1 else "ex1")
