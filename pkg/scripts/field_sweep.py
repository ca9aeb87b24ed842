#!/usr/bin/env python3
"""Empirical failure rate against the analytic bound as p grows.

    python scripts/field_sweep.py --model side-channel --trials 300 > sweep.csv
"""
import argparse
import csv
import sys

from maniac import experiments as ex

PRIMES = (251, 1021, 4093, 16381, 65521)


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--model", default="side-channel", choices=["side-channel", "omniscient"])
    ap.add_argument("--fixture", default="fig2")
    ap.add_argument("--rates", default=None, help="defaults to 2,1 (side-channel) or 1,1 (omniscient)")
    ap.add_argument("--trials", type=int, default=300)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)
    rates = args.rates or ("2,1" if args.model == "side-channel" else "1,1")
    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(["p", "trials", "failures", "failure_rate", "bound"])
    for p in PRIMES:
        cfg = ex.ExperimentConfig.from_sections({
            "field": {"p": p},
            "network": {"fixture": args.fixture},
            "code": {"model": args.model, "rates": rates, "z": 1},
            "run": {"trials": args.trials, "seed": args.seed, "strategies": "random,erase"},
        })
        rep = ex.run(cfg)
        w.writerow([p, rep.trials, rep.trials - rep.successes, f"{rep.failure_rate:.4f}", f"{rep.bound:.4f}"])
    return 0


if __name__ == "__main__":
    sys.exit(main())
