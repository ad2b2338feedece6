"""Run the law suite with a small or default configuration and print a per-law summary.

    python3 scripts/run_default_suite.py --trials 5 --out report.json
"""

import argparse
import dataclasses

from schattenrad.harness import SuiteConfig, run_suite


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--trials", type=int, default=5, help="trials per (law, p, dim) cell")
    ap.add_argument("--dims", type=int, nargs="+", default=[1, 2, 3])
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--workers", type=int, default=1)
    ap.add_argument("--out", help="write the JSON report here")
    args = ap.parse_args()

    cfg = dataclasses.replace(SuiteConfig(), trials=args.trials, dims=args.dims,
                              master_seed=args.seed)
    rep = run_suite(cfg, workers=args.workers)
    print(f"{'law':10} {'trials':>6} {'fail':>5} {'witn':>5} {'min slack':>12}")
    for law in rep.laws:
        print(f"{law['law_id']:10} {law['trials']:6d} {law['failures']:5d} "
              f"{law['witnesses']:5d} {law['min_slack']:12.4e}")
    print(f"{len(rep.failures)} failing trial(s), {len(rep.uncertified)} uncertified, "
          f"{rep.wall_clock_seconds:.1f}s")
    if args.out:
        rep.write(args.out)


if __name__ == "__main__":
    main()
