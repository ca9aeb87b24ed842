"""Monte-Carlo trial harness shared by the CLI, the scripts and the tests.

Every trial is a pure function of (config, trial seed).  Trial seeds are
spawned from the run seed with numpy's SeedSequence, so a run can be split
over workers in any order and still produce the same rows.
"""
from __future__ import annotations

import configparser
import csv
import io
import json
import math
import random
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field as dc_field, replace
from math import log10, prod
from pathlib import Path
from typing import Sequence

import numpy as np

from . import capacity
from .codec_omniscient import OmniscientParams, om_decode, om_encode, transfer_invertible
from .codec_side_channel import generate_secret, overhead, sc_decode, sc_encode, union_bound
from .errors import ConfigInvalid, DecodeFailure, ManiacError, RateRegionViolation
from .ff_tower import Mat, PrimeField, is_prime
from .matrix import rank
from .netsim import NetworkInstance, adversary_strategies, load_fixture, min_cut, transmit

CSV_COLUMNS = ("trial", "seed", "strategy", "success", "sink", "stage", "event")
STRATEGIES = ("none", "random", "mincut", "erase", "worst")


# configuration -------------------------------------------------------------------

@dataclass(frozen=True)
class FieldConfig:
    p: int = 251
    n: tuple[int, ...] = ()  # optional tower degrees, checked against rates + 2z


@dataclass(frozen=True)
class NetworkConfig:
    fixture: str | None = "fig2"
    path: str | None = None
    inline: str | None = None

    def load(self) -> NetworkInstance:
        try:
            if self.inline:
                return NetworkInstance.from_dict(json.loads(self.inline))
            if self.path:
                return NetworkInstance.load(self.path)
            if self.fixture:
                return load_fixture(self.fixture)
        except (OSError, ValueError, KeyError, TypeError) as exc:
            raise ConfigInvalid(f"cannot load network: {exc}") from exc
        raise ConfigInvalid("[network] needs one of fixture, path or inline")


@dataclass(frozen=True)
class CodeConfig:
    model: str = "omniscient"
    rates: tuple[int, ...] = (1, 1)
    z: int = 1
    k: int = 1
    ell: int | None = None  # side-channel packet length; default alpha + 3


@dataclass(frozen=True)
class RunConfig:
    trials: int = 100
    seed: int = 0
    jobs: int = 1
    strategies: tuple[str, ...] = ("random",)
    search_budget: int = 64


@dataclass(frozen=True)
class ExperimentConfig:
    field: FieldConfig = dc_field(default_factory=FieldConfig)
    network: NetworkConfig = dc_field(default_factory=NetworkConfig)
    code: CodeConfig = dc_field(default_factory=CodeConfig)
    run: RunConfig = dc_field(default_factory=RunConfig)
    force: bool = False

    @classmethod
    def from_ini(cls, path) -> "ExperimentConfig":
        cp = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
        try:
            with open(path) as fh:
                cp.read_file(fh)
        except (OSError, configparser.Error) as exc:
            raise ConfigInvalid(f"cannot read config {path}: {exc}") from exc
        base = Path(path).parent
        return cls.from_sections({s: dict(cp[s]) for s in cp.sections()}, base)

    @classmethod
    def from_sections(cls, sec: dict, base: Path | None = None) -> "ExperimentConfig":
        unknown = set(sec) - {"field", "network", "code", "run"}
        if unknown:
            raise ConfigInvalid(f"unknown config sections: {sorted(unknown)}")
        try:
            f = sec.get("field", {})
            fc = FieldConfig(int(f.get("p", 251)), _ints(f.get("n", "")))
            n = sec.get("network", {})
            path = n.get("path")
            if path and base is not None and not Path(path).is_absolute():
                path = str(base / path)
            nc = NetworkConfig(n.get("fixture") if not (path or n.get("inline")) else None, path, n.get("inline"))
            if not (nc.fixture or nc.path or nc.inline):
                nc = NetworkConfig()
            c = sec.get("code", {})
            cc = CodeConfig(
                c.get("model", "omniscient"),
                _ints(c.get("rates", "1,1")),
                int(c.get("z", 1)),
                int(c.get("k", 1)),
                int(c["ell"]) if c.get("ell") else None,
            )
            r = sec.get("run", {})
            rc = RunConfig(
                int(r.get("trials", 100)),
                int(r.get("seed", 0)),
                int(r.get("jobs", 1)),
                tuple(s.strip() for s in r.get("strategies", r.get("strategy", "random")).split(",") if s.strip()),
                int(r.get("search_budget", 64)),
            )
        except (ValueError, KeyError) as exc:
            raise ConfigInvalid(f"bad config value: {exc}") from exc
        cfg = cls(fc, nc, cc, rc)
        cfg.validate()
        return cfg

    def with_overrides(self, *, seed=None, trials=None, model=None, jobs=None, strategies=None, force=None):
        run = self.run
        if seed is not None:
            run = replace(run, seed=int(seed))
        if trials is not None:
            run = replace(run, trials=int(trials))
        if jobs is not None:
            run = replace(run, jobs=int(jobs))
        if strategies:
            run = replace(run, strategies=tuple(strategies))
        code = replace(self.code, model=model) if model else self.code
        cfg = replace(self, run=run, code=code, force=self.force if force is None else bool(force))
        cfg.validate()
        return cfg

    def validate(self) -> None:
        if not is_prime(self.field.p):
            raise ConfigInvalid(f"p={self.field.p} is not prime")
        try:
            capacity.normalize_model(self.code.model)
        except ValueError as exc:
            raise ConfigInvalid(str(exc)) from exc
        if self.code.z < 0 or self.code.k < 1 or any(r < 1 for r in self.code.rates):
            raise ConfigInvalid("need z >= 0, k >= 1 and positive rates")
        if self.run.trials < 0 or self.run.jobs < 1 or self.run.seed < 0:
            raise ConfigInvalid("need trials >= 0, jobs >= 1 and seed >= 0")
        bad = [s for s in self.run.strategies if s not in STRATEGIES]
        if bad or not self.run.strategies:
            raise ConfigInvalid(f"unknown adversary strategies {bad}; choose from {STRATEGIES}")
        if self.model == "side-channel" and "worst" in self.run.strategies:
            raise ConfigInvalid("the worst-case search needs omniscience; not allowed for side-channel")
        if self.field.n and self.model == "omniscient":
            want = tuple(r + 2 * self.code.z for r in self.code.rates)
            if self.field.n != want:
                raise ConfigInvalid(f"[field] n={list(self.field.n)} but rates + 2z give {list(want)}")

    @property
    def model(self) -> str:
        return capacity.normalize_model(self.code.model)

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentConfig":
        return cls(
            FieldConfig(d["field"]["p"], tuple(d["field"]["n"])),
            NetworkConfig(**d["network"]),
            CodeConfig(**{**d["code"], "rates": tuple(d["code"]["rates"])}),
            RunConfig(**{**d["run"], "strategies": tuple(d["run"]["strategies"])}),
            d.get("force", False),
        )


def _ints(text) -> tuple[int, ...]:
    if isinstance(text, (tuple, list)):
        return tuple(int(x) for x in text)
    return tuple(int(x) for x in str(text).replace(" ", "").split(",") if x)


# per-run context ---------------------------------------------------------------------

@dataclass
class RunContext:
    cfg: ExperimentConfig
    net: NetworkInstance
    m: int
    ell: int
    params: OmniscientParams | None = None
    cut_subset: tuple[int, ...] | None = None

    @classmethod
    def build(cls, cfg: ExperimentConfig) -> "RunContext":
        net = cfg.network.load()
        rates = cfg.code.rates
        if len(rates) != net.s:
            raise ConfigInvalid(f"network has {net.s} sources but {len(rates)} rates were given")
        report = capacity.check(net, rates, cfg.code.z, cfg.model)
        if not report.feasible and not cfg.force:
            raise RateRegionViolation(report.violations)
        # converse demos aim the cut-based adversaries at the most violated subset
        cut_subset = min(report.violations, key=lambda r: r.slack).subset if report.violations else None
        m = min_cut(net, range(net.s))
        if cfg.model == "side-channel":
            alpha = overhead(m)
            ell = cfg.code.ell or alpha + 3
            if ell <= alpha:
                raise ConfigInvalid(f"ell={ell} must exceed alpha={alpha}")
            return cls(cfg, net, m, ell, None, cut_subset)
        params = OmniscientParams.build(cfg.field.p, rates, cfg.code.z, cfg.code.k, seed=cfg.run.seed)
        return cls(cfg, net, m, params.ell, params, cut_subset)

    def bound_terms(self) -> dict:
        cfg = self.cfg
        if cfg.model == "side-channel":
            return union_bound(self.net.num_edges, len(self.net.sinks), cfg.code.z, cfg.field.p, cfg.code.rates, self.m, self.ell)
        b = min(1.0, self.net.s * self.net.num_edges / cfg.field.p)
        return {"total": self.net.s * self.net.num_edges / cfg.field.p, "bound": b}


def trial_seeds(seed: int, trials: int) -> list[int]:
    return [int(s.generate_state(1, dtype=np.uint64)[0]) for s in np.random.SeedSequence(seed).spawn(trials)]


# trials --------------------------------------------------------------------------------

@dataclass(frozen=True)
class TrialRow:
    trial: int
    seed: int
    strategy: str
    success: bool
    sink: str = ""
    stage: str = ""
    event: str = ""
    decode_seconds: float = dc_field(default=0.0, compare=False)

    def csv_fields(self) -> list:
        return [self.trial, self.seed, self.strategy, int(self.success), self.sink, self.stage, self.event]


def _streams(trial_seed: int):
    msg, sec, adv, netc = np.random.SeedSequence(trial_seed).spawn(4)
    return msg, sec, adv, netc


def run_trial(ctx: RunContext, trial: int, trial_seed: int, strategy: str) -> TrialRow:
    if ctx.cfg.model == "side-channel":
        return _side_channel_trial(ctx, trial, trial_seed, strategy)
    return _omniscient_trial(ctx, trial, trial_seed, strategy)


def _side_channel_trial(ctx, trial, trial_seed, strategy) -> TrialRow:
    cfg, net = ctx.cfg, ctx.net
    F = PrimeField(cfg.field.p)
    msg_ss, sec_ss, adv_ss, net_ss = _streams(trial_seed)
    alpha = overhead(ctx.m)
    srng = np.random.default_rng(sec_ss)
    secrets = [generate_secret(F, R, alpha, srng) for R in cfg.code.rates]
    mrng = np.random.default_rng(msg_ss)
    X = [Mat(F, mrng.integers(0, F.p, size=(R, ctx.ell - alpha)).tolist(), ctx.ell - alpha) for R in cfg.code.rates]
    M = [sc_encode(x, s, ctx.ell).M for x, s in zip(X, secrets)]
    adv = adversary_strategies(net, cfg.code.z, adv_ss, strategy=strategy, field=F, ell=ctx.ell,
                               cut_subset=ctx.cut_subset)
    outs = transmit(net, M, adv, net_ss)
    t0 = time.perf_counter()
    for sink, out in outs.items():
        try:
            got = sc_decode(out.Y, secrets, cfg.code.rates)
        except DecodeFailure as exc:
            return TrialRow(trial, trial_seed, strategy, False, sink, exc.stage or "", exc.event or "",
                            time.perf_counter() - t0)
        if any(g != x for g, x in zip(got, X)):
            return TrialRow(trial, trial_seed, strategy, False, sink, "output", "wrong-message", time.perf_counter() - t0)
    return TrialRow(trial, trial_seed, strategy, True, decode_seconds=time.perf_counter() - t0)


def _om_messages(params: OmniscientParams, msg_ss) -> list[Mat]:
    rng = random.Random(int(msg_ss.generate_state(1, dtype=np.uint64)[0]))
    return [Mat.random(params.tower[i + 1], *params.payload_shape(i), rng) for i in range(params.s)]


def _om_failure(params, outs, X):
    """(sink, stage, event) of the first failing sink, or None."""
    for sink, out in outs.items():
        try:
            got = om_decode(out.Y, params)
        except DecodeFailure as exc:
            return sink, exc.stage or "", exc.event or ""
        except ManiacError as exc:
            return sink, "decode", type(exc).__name__
        if any(g != x for g, x in zip(got, X)):
            return sink, "output", "wrong-message"
    return None


def _omniscient_trial(ctx, trial, trial_seed, strategy) -> TrialRow:
    cfg, net, params = ctx.cfg, ctx.net, ctx.params
    F = params.tower[0]
    msg_ss, _, adv_ss, net_ss = _streams(trial_seed)
    X = _om_messages(params, msg_ss)
    M = [om_encode(i, X[i], params).M for i in range(params.s)]

    def harmful(action) -> bool:
        # omniscient: the adversary may replay the whole trial
        return _om_failure(params, transmit(net, M, action, net_ss), X) is not None

    adv = adversary_strategies(net, cfg.code.z, adv_ss, strategy=strategy, field=F, ell=params.ell,
                               search=harmful, search_budget=cfg.run.search_budget, cut_subset=ctx.cut_subset)
    outs = transmit(net, M, adv, net_ss)
    t0 = time.perf_counter()
    fail = _om_failure(params, outs, X)
    dt = time.perf_counter() - t0
    if fail is None:
        return TrialRow(trial, trial_seed, strategy, True, decode_seconds=dt)
    return TrialRow(trial, trial_seed, strategy, False, *fail, decode_seconds=dt)


def _run_chunk(cfg_dict: dict, jobs: list[tuple[int, int, str]]) -> list[TrialRow]:
    ctx = RunContext.build(ExperimentConfig.from_dict(cfg_dict))
    return [run_trial(ctx, i, s, strat) for i, s, strat in jobs]


# reports ---------------------------------------------------------------------------------

@dataclass
class RunReport:
    model: str
    network: str
    p: int
    rates: tuple[int, ...]
    z: int
    ell: int
    rows: list[TrialRow]
    bound: float
    bound_terms: dict
    table: list[dict]

    @property
    def trials(self) -> int:
        return len(self.rows)

    @property
    def successes(self) -> int:
        return sum(r.success for r in self.rows)

    @property
    def failure_rate(self) -> float:
        return 0.0 if not self.rows else 1.0 - self.successes / self.trials

    @property
    def sigma(self) -> float:
        """Binomial standard deviation of the failure frequency at the bound."""
        if not self.rows:
            return 0.0
        b = min(1.0, self.bound)
        return math.sqrt(b * (1 - b) / self.trials)

    @property
    def within_bound(self) -> bool:
        return self.failure_rate <= self.bound + 3 * self.sigma

    @property
    def mean_decode_seconds(self) -> float:
        return float(np.mean([r.decode_seconds for r in self.rows])) if self.rows else 0.0

    def failures_by_stage(self) -> dict[str, int]:
        out: dict[str, int] = {}
        for r in self.rows:
            if not r.success:
                key = f"{r.stage}/{r.event}"
                out[key] = out.get(key, 0) + 1
        return dict(sorted(out.items()))

    def csv_text(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        for r in sorted(self.rows, key=lambda r: r.trial):
            w.writerow(r.csv_fields())
        return buf.getvalue()

    def write_csv(self, path) -> None:
        Path(path).write_text(self.csv_text())

    def to_text(self) -> str:
        lines = [
            f"model={self.model} network={self.network} p={self.p} rates={list(self.rates)} z={self.z} ell={self.ell}",
            f"trials={self.trials} successes={self.successes} failure_rate={self.failure_rate:.4f} "
            f"bound={self.bound:.4g} 3sigma={3 * self.sigma:.4f} within_bound={self.within_bound}",
            f"mean_decode_ms={1000 * self.mean_decode_seconds:.2f}",
        ]
        for k, v in self.failures_by_stage().items():
            lines.append(f"  failures {k}: {v}")
        lines.append("")
        lines.append(f"{'construction':<24} {'packet_length':>13} {'log10_decode_ops':>16}")
        for row in self.table:
            lines.append(f"{row['construction']:<24} {row['packet_length']:>13} {row['log10_decode_ops']:>16.2f}")
        return "\n".join(lines)


def comparison_table(net: NetworkInstance, p: int, rates: Sequence[int], z: int, k: int = 1) -> list[dict]:
    """Packet length and rough decoding cost of the three constructions at these parameters."""
    m = min_cut(net, range(net.s))
    s = len(rates)
    alpha = overhead(m)
    sc_ell = alpha + max(rates)
    n = [r + 2 * z for r in rates]
    om_ell = sum(n) + k * prod(n)
    sub_ell = sum(n) + 1
    return [
        {"construction": "side-channel", "packet_length": sc_ell, "log10_decode_ops": log10(sc_ell * m ** 3)},
        {"construction": "subspace-search", "packet_length": sub_ell,
         "log10_decode_ops": sub_ell * sum(rates) * log10(p)},
        {"construction": "field-extension", "packet_length": om_ell,
         "log10_decode_ops": (2 * s + 1) * log10(m) + log10(max(1.0, math.log(p * m ** s)))},
    ]


def run(cfg: ExperimentConfig, progress=None) -> RunReport:
    ctx = RunContext.build(cfg)
    seeds = trial_seeds(cfg.run.seed, cfg.run.trials)
    strategies = cfg.run.strategies
    jobs = [(i, s, strategies[i % len(strategies)]) for i, s in enumerate(seeds)]
    if cfg.run.jobs > 1 and len(jobs) > 1:
        chunks = [jobs[w::cfg.run.jobs] for w in range(cfg.run.jobs)]
        with ProcessPoolExecutor(cfg.run.jobs) as pool:
            parts = pool.map(_run_chunk, [cfg.to_dict()] * len(chunks), chunks)
            rows = [r for part in parts for r in part]
    else:
        rows = []
        for i, s, strat in jobs:
            rows.append(run_trial(ctx, i, s, strat))
            if progress:
                progress(i)
    rows.sort(key=lambda r: r.trial)
    terms = ctx.bound_terms()
    return RunReport(
        cfg.model, ctx.net.name, cfg.field.p, cfg.code.rates, cfg.code.z, ctx.ell, rows, terms["bound"], terms,
        comparison_table(ctx.net, cfg.field.p, cfg.code.rates, cfg.code.z, cfg.code.k),
    )


# network-code statistics -------------------------------------------------------------------

def invertibility_rate(net: NetworkInstance, params: OmniscientParams, trials: int, seed: int) -> float:
    """Fraction of seeded network codes whose combined transfer matrix D is invertible at every sink."""
    F = params.tower[0]
    zeros = [Mat.zeros(F, n, params.ell) for n in params.n]
    hits = 0
    for ss in np.random.SeedSequence(seed).spawn(trials):
        outs = transmit(net, zeros, None, ss)
        hits += all(transfer_invertible(o.T, params) for o in outs.values())
    return hits / trials if trials else 0.0


# oracle cross-validation ----------------------------------------------------------------------

@dataclass(frozen=True)
class OracleTrial:
    trial: int
    adversary_rank: int
    decoder_ok: bool
    oracle_unique: bool
    oracle_ok: bool
    agree: bool


def good_network_code(outcome, params: OmniscientParams) -> bool:
    """Every recursion stage sees a full-rank transfer: D_top invertible and each T_i of full column rank."""
    if not transfer_invertible(outcome.T, params):
        return False
    return all(rank(T) == n for T, n in zip(outcome.T, params.n))


def oracle_trials(instance: str, p: int, trials: int, seed: int = 0, attacked: int = 1,
                  max_resample: int = 10_000) -> list[OracleTrial]:
    """Compare om_decode with exhaustive min-injection decoding on toy instances.

    ``instance`` is "two-source" (toy fixture, rates (1,1), z=1, p=2 only)
    or "single-source" (relay fixture, rate 1, z=1).  ``attacked`` edges
    carry random injections; with attacked > z the adversary may exceed the
    design.  Network codes are redrawn until every stage has a full-rank
    transfer, which separates channel failures from adversarial ones.
    """
    from .oracle import all_messages, min_injection_decode
    from .subspace import Subspace

    if instance == "two-source":
        net, rates = load_fixture("toy"), (1, 1)
    elif instance == "single-source":
        net, rates = load_fixture("relay"), (1,)
    else:
        raise ValueError(f"unknown oracle instance {instance!r}")
    z = 1
    params = OmniscientParams.build(p, rates, z, 1, seed=seed, net=net)
    F = params.tower[0]
    msgs, books = [], []
    for i in range(params.s):
        xs = list(all_messages(params.tower[i + 1], *params.payload_shape(i)))
        msgs.append(xs)
        books.append([om_encode(i, x, params).M for x in xs])
    out = []
    for t, ss in enumerate(np.random.SeedSequence(seed).spawn(trials)):
        pick_ss, adv_ss, net_ss = ss.spawn(3)
        prng = np.random.default_rng(pick_ss)
        idx = tuple(int(prng.integers(len(b))) for b in books)
        M = [books[i][idx[i]] for i in range(params.s)]
        adv = adversary_strategies(net, attacked, adv_ss, strategy="random", field=F, ell=params.ell)
        nrng = np.random.default_rng(net_ss)
        for _ in range(max_resample):
            outcome = transmit(net, M, adv, nrng.integers(2**63))[net.sinks[0]]
            if good_network_code(outcome, params):
                break
        else:
            raise RuntimeError("no full-rank network code found")
        rz = rank(outcome.T_z @ adv.Z) if adv.z else 0
        try:
            got = om_decode(outcome.Y, params)
            dec = tuple(msgs[i].index(got[i]) for i in range(params.s))
        except (DecodeFailure, ValueError):
            dec = None
        res = min_injection_decode(Subspace.span(outcome.Y), books)
        out.append(OracleTrial(t, rz, dec == idx, res.unique, res.unique and res.winner == idx,
                               dec is not None and res.unique and res.winner == dec))
    return out
