#!/usr/bin/env python3
"""Scaling benchmark on synthetic blobs: per-stage seconds and log-log
growth exponents across dataset sizes.

    python scripts/bench_scaling.py --sizes 5000,10000,20000 --d 8
"""

import argparse
import json
import sys
import time
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from gcao import ContractionConfig, RunRecord, make_blobs, run_gcao, runtime_report, standardize


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--sizes", default="5000,10000,20000")
    ap.add_argument("--d", type=int, default=8)
    ap.add_argument("--clusters", type=int, default=4)
    ap.add_argument("--k", type=int, default=8)
    ap.add_argument("--lam", type=float, default=0.05)
    ap.add_argument("--iters", type=int, default=5)
    ap.add_argument("--seed", type=int, default=1)
    args = ap.parse_args()

    records = []
    for n in (int(s) for s in args.sizes.split(",")):
        ps = standardize(make_blobs(n, args.d, args.clusters, spread=1.0, separation=8.0, seed=args.seed))
        cfg = ContractionConfig(k=args.k, step_size=args.lam, iterations=args.iters)
        t0 = time.perf_counter()
        result = run_gcao(ps, cfg)
        timings = dict(result.trace.timings)
        timings["total"] = time.perf_counter() - t0
        print(f"N={n}: " + "  ".join(f"{k}={v:.3f}s" for k, v in timings.items()), file=sys.stderr)
        records.append(RunRecord(config={}, n_points=n, dim=args.d, report=None, trace_summary={}, timings=timings))
    print(json.dumps(runtime_report(records), indent=2))
    return 0


if __name__ == "__main__":
    sys.exit(main())
