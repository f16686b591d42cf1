#!/usr/bin/env python3
"""Exhaustively check the grid-projection facts behind the dimension proof.

For each subdivision count u and block size N this sweeps every fine-grid
index within the radius and verifies (a) the projection chain from level
(k+1)N+1 returns to the coarse grid at level kN+1 landing on the cell it
started from, and (b) levels between coarse checkpoints stay inside the
half-shrunk nearest parent.  Any counterexample prints a witness tuple.
"""
import argparse
import itertools
import sys
import time
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from gamecert.gamesim import verify_half_shrink, verify_projection_return


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--radius", type=int, default=50)
    ap.add_argument("--u-min", type=int, default=6)
    ap.add_argument("--u-max", type=int, default=12)
    ap.add_argument("--blocks", type=int, nargs="+", default=[1, 2, 3])
    ap.add_argument("--two-dim", action="store_true",
                    help="also sweep all ordered pairs (u1,u2); slower")
    args = ap.parse_args()

    us = range(args.u_min, args.u_max + 1)
    total_checked = failures = 0
    t0 = time.perf_counter()
    combos = [(u,) for u in us]
    if args.two_dim:
        combos += list(itertools.product(us, us))
    for u in combos:
        for block in args.blocks:
            audit = verify_projection_return(u, block, radius=args.radius)
            total_checked += audit.checked
            failures += audit.failures
            if audit.failures:
                print(f"FAIL projection u={u} N={block}: {audit.witness}")
            for level in range(2, block + 1):
                hs = verify_half_shrink(u, level, block, radius=args.radius)
                total_checked += hs.checked
                failures += hs.failures
                if hs.failures:
                    print(f"FAIL half-shrink u={u} N={block} level={level}: {hs.witness}")
    dt = time.perf_counter() - t0
    print(f"checked {total_checked} tuples in {dt:.1f}s, {failures} failures")
    return 0 if failures == 0 else 2


if __name__ == "__main__":
    sys.exit(main())
