#!/usr/bin/env python3
"""Benchmark sweep: detection rate and query cost per family and size.

Writes one CSV of records plus one JSON summary per (family, n) cell into
the output directory.  Fully deterministic given --seed (wall_ms excepted).

Example:
    python scripts/run_benchmarks.py --out results/ --count 25 --seed 7
"""

import argparse
import json
from pathlib import Path

from monotest.generators import (
    ADVERSARIAL,
    HEAVY_COORDINATE,
    InstanceFamily,
    MONOTONE_RANDOM,
    PLANTED_NEGATIVE_MASS,
    SIGNED_MAJORITY,
)
from monotest.harness import SuiteConfig, default_threads, run_suite, write_outputs

SWEEP = [
    (MONOTONE_RANDOM, {}, 0.1),
    (SIGNED_MAJORITY, {"k": 4}, 0.05),
    (PLANTED_NEGATIVE_MASS, {"lambda_target": 0.25}, 0.05),
    (HEAVY_COORDINATE, {"heavy": 8.0, "sign": -1.0}, 0.05),
    (ADVERSARIAL, {}, 0.05),
]


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="results")
    ap.add_argument("--count", type=int, default=25)
    ap.add_argument("--sizes", type=int, nargs="+",
                    default=[64, 256, 1024])
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--threads", type=int, default=None)
    args = ap.parse_args()

    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    threads = args.threads or default_threads()
    overview = []
    for kind, params, eps in SWEEP:
        for n in args.sizes:
            family = InstanceFamily(kind, n, params)
            config = SuiteConfig(family=family, count=args.count, eps=eps,
                                 master_seed=args.seed, threads=threads)
            records, summary = run_suite(config)
            stem = f"{kind}-n{n}"
            write_outputs(records, summary,
                          csv_path=out_dir / f"{stem}.csv",
                          json_path=out_dir / f"{stem}.json")
            overview.append({"family": kind, "n": n, "eps": eps, **summary})
            print(f"{stem}: detect={summary['detection_rate']:.2f} "
                  f"queries~{summary['queries_mean']:.0f} "
                  f"violations={summary['hard_invariant_violation']}")
    with open(out_dir / "overview.json", "w", encoding="utf-8") as fh:
        json.dump(overview, fh, indent=2)
    bad = any(row["hard_invariant_violation"] for row in overview)
    raise SystemExit(2 if bad else 0)


if __name__ == "__main__":
    main()
