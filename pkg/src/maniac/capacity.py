"""Rate regions: sum of rates over every source subset against m_{S'} - c*z.

c = 1 when sources share a secret with the sinks, c = 2 against an
omniscient adversary.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Sequence

from .errors import TooManySources
from .netsim import NetworkInstance, all_min_cuts

SUBSET_CAP = 10

MARGIN = {"side-channel": 1, "omniscient": 2}


def normalize_model(model: str) -> str:
    key = model.lower().replace("_", "-").replace(" ", "-")
    if key in ("sidechannel", "side-channel", "sc"):
        return "side-channel"
    if key in ("omniscient", "om"):
        return "omniscient"
    raise ValueError(f"unknown model {model!r}")


@dataclass(frozen=True)
class RegionRow:
    subset: tuple[int, ...]
    min_cut: int
    bound: int
    sum_rate: int

    @property
    def slack(self) -> int:
        return self.bound - self.sum_rate

    @property
    def label(self) -> str:
        return "{" + ",".join(f"S{i + 1}" for i in self.subset) + "}"


@dataclass(frozen=True)
class RateRegionReport:
    model: str
    z: int
    rates: tuple[int, ...]
    rows: tuple[RegionRow, ...]

    @property
    def feasible(self) -> bool:
        return all(r.slack >= 0 for r in self.rows)

    @property
    def violations(self) -> list[RegionRow]:
        return [r for r in self.rows if r.slack < 0]

    def to_rows(self) -> list[dict]:
        return [
            {"subset": r.label, "m": r.min_cut, "bound": r.bound, "sum_rate": r.sum_rate, "slack": r.slack}
            for r in self.rows
        ]

    def to_text(self) -> str:
        head = f"model={self.model} z={self.z} rates={list(self.rates)} feasible={self.feasible}"
        w = max([len("subset")] + [len(r.label) for r in self.rows])
        lines = [head, f"{'subset':<{w}}  {'m':>3}  {'bound':>5}  {'sum':>4}  {'slack':>5}"]
        for r in self.rows:
            lines.append(f"{r.label:<{w}}  {r.min_cut:>3}  {r.bound:>5}  {r.sum_rate:>4}  {r.slack:>5}")
        return "\n".join(lines)


def _cuts(net: NetworkInstance, cap: int) -> dict[tuple[int, ...], int]:
    if net.s > cap:
        raise TooManySources(f"{net.s} sources exceeds the subset-enumeration cap {cap}")
    return all_min_cuts(net)


def check(
    net: NetworkInstance,
    rates: Sequence[int],
    z: int,
    model: str,
    cap: int = SUBSET_CAP,
    cuts: dict | None = None,
) -> RateRegionReport:
    model = normalize_model(model)
    rates = tuple(int(r) for r in rates)
    if len(rates) != net.s:
        raise ValueError(f"{net.s} sources but {len(rates)} rates")
    cuts = cuts if cuts is not None else _cuts(net, cap)
    c = MARGIN[model]
    rows = tuple(
        RegionRow(sub, m, m - c * z, sum(rates[i] for i in sub)) for sub, m in sorted(cuts.items(), key=lambda kv: (len(kv[0]), kv[0]))
    )
    return RateRegionReport(model, z, rates, rows)


def region_points(net: NetworkInstance, z: int, model: str, cap: int = SUBSET_CAP) -> set[tuple[int, ...]]:
    """All nonnegative integer rate tuples inside the region."""
    cuts = _cuts(net, cap)
    c = MARGIN[normalize_model(model)]
    hi = [max(0, cuts[(i,)] - c * z) for i in range(net.s)]
    pts = set()
    for rates in itertools.product(*(range(h + 1) for h in hi)):
        if all(sum(rates[i] for i in sub) <= m - c * z for sub, m in cuts.items()):
            pts.add(rates)
    return pts


def max_sum_rate(net: NetworkInstance, z: int, model: str) -> int:
    pts = region_points(net, z, model)
    return max((sum(p) for p in pts), default=0)


def boundary_rates(net: NetworkInstance, z: int, model: str) -> list[tuple[int, ...]]:
    """Region points that attain the maximal sum-rate."""
    pts = region_points(net, z, model)
    best = max((sum(p) for p in pts), default=0)
    return sorted(p for p in pts if sum(p) == best)
