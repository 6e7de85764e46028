"""Time the kernel and iterative procedures on seeded random systems.

Writes one CSV row per instance.  Instances over the work budget are recorded
as skipped rather than aborting the sweep.
"""

import argparse
import csv
import random
import sys
import time
from dataclasses import asdict, dataclass

from reachmod.freemod import module_equal
from reachmod.geocontrol import max_reachability_iterative, max_reachability_kernel, verify_reachability_certificate
from reachmod.groebner import ResourceExhaustedError, work_budget
from reachmod.instances import InstanceConfig, random_instance


@dataclass(frozen=True)
class SweepConfig:
    seed: int = 0
    count: int = 50
    budget: int = 1_000_000
    instance: InstanceConfig = InstanceConfig()


def sweep(cfg: SweepConfig):
    rnd = random.Random(cfg.seed)
    for i in range(cfg.count):
        sys_, M = random_instance(rnd, cfg.instance)
        row = {"index": i, "ring": str(sys_.ring), "n": sys_.n, "m": sys_.m, "status": "ok"}
        try:
            with work_budget(cfg.budget):
                t0 = time.perf_counter()
                r = max_reachability_kernel(sys_, M)
                t1 = time.perf_counter()
                it = max_reachability_iterative(sys_, M)
                t2 = time.perf_counter()
            row.update(
                kernel_s=round(t1 - t0, 4),
                iterative_s=round(t2 - t1, 4),
                rank=len(r.module.canonical),
                equal=module_equal(r.module, it.module),
                certified=verify_reachability_certificate(sys_, M, r).ok,
            )
        except ResourceExhaustedError:
            row["status"] = "skipped"
        yield row


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--count", type=int, default=50)
    ap.add_argument("--budget", type=int, default=1_000_000, help="term operations per instance")
    ap.add_argument("--max-n", type=int, default=4)
    ap.add_argument("--max-vars", type=int, default=2)
    args = ap.parse_args()
    cfg = SweepConfig(args.seed, args.count, args.budget, InstanceConfig(max_n=args.max_n, max_vars=args.max_vars))
    print(f"# {asdict(cfg)}", file=sys.stderr)
    fields = ["index", "ring", "n", "m", "status", "kernel_s", "iterative_s", "rank", "equal", "certified"]
    out = csv.DictWriter(sys.stdout, fieldnames=fields)
    out.writeheader()
    for row in sweep(cfg):
        out.writerow(row)


if __name__ == "__main__":
    main()
