"""Command-line harness: ``maniac {run,region,oracle-check,gen-net}``.

Exit codes: 0 success, 1 configuration error, 2 threshold breach under --assert.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys

from . import capacity, experiments
from .errors import ConfigInvalid, RateRegionViolation
from .netsim import NetworkInstance, load_fixture, random_dag

log = logging.getLogger("maniac")

EXIT_OK, EXIT_CONFIG, EXIT_THRESHOLD = 0, 1, 2


def _load_config(args) -> experiments.ExperimentConfig:
    cfg = experiments.ExperimentConfig.from_ini(args.config) if args.config else experiments.ExperimentConfig()
    strategies = args.strategy.split(",") if getattr(args, "strategy", None) else None
    return cfg.with_overrides(seed=args.seed, trials=args.trials, model=args.model, jobs=args.jobs,
                              strategies=strategies, force=args.force or None)


def cmd_run(args) -> int:
    cfg = _load_config(args)
    report = experiments.run(cfg)
    print(report.to_text())
    if args.out:
        report.write_csv(args.out)
    if args.assert_ and not report.within_bound:
        print(f"threshold breach: failure rate {report.failure_rate:.4f} > bound + 3 sigma", file=sys.stderr)
        return EXIT_THRESHOLD
    return EXIT_OK


def _network(args) -> NetworkInstance:
    if args.net:
        try:
            return NetworkInstance.load(args.net)
        except (OSError, ValueError, KeyError) as exc:
            raise ConfigInvalid(f"cannot load {args.net}: {exc}") from exc
    if args.fixture:
        try:
            return load_fixture(args.fixture)
        except OSError as exc:
            raise ConfigInvalid(f"unknown fixture {args.fixture!r}") from exc
    if args.config:
        return experiments.ExperimentConfig.from_ini(args.config).network.load()
    return load_fixture("fig2")


def cmd_region(args) -> int:
    net = _network(args)
    models = [capacity.normalize_model(args.model)] if args.model else ["side-channel", "omniscient"]
    rates = tuple(int(x) for x in args.rates.split(",")) if args.rates else tuple(net.rates or (0,) * net.s)
    rows = []
    ok = True
    for model in models:
        rep = capacity.check(net, rates, args.z, model)
        print(rep.to_text())
        print(f"max sum-rate: {capacity.max_sum_rate(net, args.z, model)}")
        print()
        ok = ok and rep.feasible
        rows += [{"model": model, **r} for r in rep.to_rows()]
    if args.out:
        import csv

        with open(args.out, "w", newline="") as fh:
            w = csv.DictWriter(fh, fieldnames=["model", "subset", "m", "bound", "sum_rate", "slack"], lineterminator="\n")
            w.writeheader()
            w.writerows(rows)
    if args.assert_ and not ok:
        return EXIT_THRESHOLD
    return EXIT_OK


def cmd_oracle_check(args) -> int:
    instance = args.instance or ("two-source" if args.p == 2 else "single-source")
    res = experiments.oracle_trials(instance, args.p, args.trials, args.seed, args.attacked)
    within = [r for r in res if r.adversary_rank <= 1]
    beyond = [r for r in res if r.adversary_rank > 1]
    agree = sum(r.agree for r in within)
    ties_within = sum(not r.oracle_unique for r in within)
    print(f"instance={instance} p={args.p} trials={len(res)} attacked_edges={args.attacked}")
    print(f"rank<=z: {len(within)} trials, agreement {agree}/{len(within)}, oracle ties {ties_within}")
    print(f"rank>z:  {len(beyond)} trials, oracle ties {sum(not r.oracle_unique for r in beyond)}, "
          f"decoder correct {sum(r.decoder_ok for r in beyond)}")
    if args.out:
        import csv

        with open(args.out, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["trial", "adversary_rank", "decoder_ok", "oracle_unique", "oracle_ok", "agree"])
            for r in res:
                w.writerow([r.trial, r.adversary_rank, int(r.decoder_ok), int(r.oracle_unique), int(r.oracle_ok), int(r.agree)])
    if args.assert_ and (agree < len(within) or ties_within):
        return EXIT_THRESHOLD
    return EXIT_OK


def cmd_gen_net(args) -> int:
    net = random_dag(args.nodes, args.edges, args.sources, args.sinks, seed=args.seed, name=args.name)
    if args.rates:
        net = net.with_rates([int(x) for x in args.rates.split(",")])
    text = json.dumps(net.to_dict(), indent=2)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="maniac", description="Multi-source network error-correction experiments")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="cmd", required=True)

    r = sub.add_parser("run", help="Monte-Carlo decode trials")
    r.add_argument("--config")
    r.add_argument("--seed", type=int)
    r.add_argument("--trials", type=int)
    r.add_argument("--model", choices=["side-channel", "omniscient"])
    r.add_argument("--strategy", help="comma-separated adversary strategies, cycled over trials")
    r.add_argument("--jobs", type=int)
    r.add_argument("--force", action="store_true", help="allow rates outside the region (converse demos)")
    r.add_argument("--out", help="per-trial CSV")
    r.add_argument("--assert", dest="assert_", action="store_true", help="exit 2 if failures exceed bound + 3 sigma")
    r.set_defaults(func=cmd_run)

    g = sub.add_parser("region", help="rate-region report")
    g.add_argument("--config")
    g.add_argument("--fixture")
    g.add_argument("--net", help="network JSON file")
    g.add_argument("--model", choices=["side-channel", "omniscient"])
    g.add_argument("--z", type=int, default=1)
    g.add_argument("--rates")
    g.add_argument("--out")
    g.add_argument("--assert", dest="assert_", action="store_true", help="exit 2 if the rates are infeasible")
    g.set_defaults(func=cmd_region)

    o = sub.add_parser("oracle-check", help="cross-validate the omniscient decoder against exhaustive search")
    o.add_argument("--p", type=int, default=2, choices=[2, 3])
    o.add_argument("--instance", choices=["two-source", "single-source"])
    o.add_argument("--trials", type=int, default=10)
    o.add_argument("--seed", type=int, default=0)
    o.add_argument("--attacked", type=int, default=1, help="number of attacked edges")
    o.add_argument("--out")
    o.add_argument("--assert", dest="assert_", action="store_true")
    o.set_defaults(func=cmd_oracle_check)

    n = sub.add_parser("gen-net", help="seeded random DAG fixture")
    n.add_argument("--nodes", type=int, default=6)
    n.add_argument("--edges", type=int, default=10)
    n.add_argument("--sources", type=int, default=2)
    n.add_argument("--sinks", type=int, default=1)
    n.add_argument("--seed", type=int, default=0)
    n.add_argument("--rates")
    n.add_argument("--name", default="random")
    n.add_argument("--out")
    n.set_defaults(func=cmd_gen_net)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except RateRegionViolation as exc:
        print(f"rate region violation: {exc} (use --force for converse demos)", file=sys.stderr)
        return EXIT_CONFIG
    except (ConfigInvalid, ValueError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
