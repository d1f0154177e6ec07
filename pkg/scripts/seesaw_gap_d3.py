"""How close does the see-saw get to the d = 3 causal bound?

Runs the optimizer at several local dimensions and reports the best lower
bound on B^3 with its gap to 1/3 + 2/(3 sqrt 3).

    BOXLAB_THREADS=4 python scripts/seesaw_gap_d3.py --dims 3 4 --restarts 50
"""
import argparse
import time

from boxlab.boxes import bell_bd
from boxlab.lhv import classical_max
from boxlab.seesaw import seesaw_optimize
from boxlab.tsirelson import b3_bound


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    p.add_argument("--dims", type=int, nargs="+", default=[3, 4])
    p.add_argument("--restarts", type=int, default=50)
    p.add_argument("--seed", type=int, default=42)
    args = p.parse_args(argv)

    f = bell_bd(3)
    bound = b3_bound()
    print(f"classical max {classical_max(f).value:.10f}  causal bound {bound:.10f}")
    print("local_dim  lower_bound     gap         seconds")
    for k in args.dims:
        t0 = time.perf_counter()
        res = seesaw_optimize(f, 3, k, args.restarts, seed=args.seed)
        dt = time.perf_counter() - t0
        print(f"{k:9d}  {res.best_value:.10f}  {bound - res.best_value:.3e}  {dt:7.1f}")


if __name__ == "__main__":
    main()
