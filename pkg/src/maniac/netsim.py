"""Random linear network coding over an acyclic unit-capacity multigraph.

Every edge carries one length-ell packet over F_p.  We propagate global coding
vectors over the stacked unknowns [M_1; ...; M_s; Z] in topological order,
so the sink matrices satisfy Y = sum_i T_i M_i + T_z Z by construction.
"""
from __future__ import annotations

import itertools
import json
from math import comb
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Sequence

import networkx as nx
import numpy as np

from .errors import ConfigInvalid, ShapeMismatch
from .ff_tower import Mat, PrimeField
from .matrix import rank

FIXTURE_DIR = Path(__file__).parent / "fixtures"


@dataclass(frozen=True)
class NetworkInstance:
    nodes: tuple[str, ...]
    edges: tuple[tuple[str, str], ...]
    sources: tuple[str, ...]
    sinks: tuple[str, ...]
    rates: tuple[int, ...] | None = None
    name: str = ""
    topo_order: tuple[str, ...] = field(default=(), compare=False)

    def __post_init__(self):
        object.__setattr__(self, "nodes", tuple(self.nodes))
        object.__setattr__(self, "edges", tuple((str(a), str(b)) for a, b in self.edges))
        object.__setattr__(self, "sources", tuple(self.sources))
        object.__setattr__(self, "sinks", tuple(self.sinks))
        known = set(self.nodes)
        for a, b in self.edges:
            if a not in known or b not in known:
                raise ConfigInvalid(f"edge ({a}, {b}) uses an undeclared node")
        for v in self.sources + self.sinks:
            if v not in known:
                raise ConfigInvalid(f"terminal {v} is not a node")
        g = nx.MultiDiGraph()
        g.add_nodes_from(self.nodes)
        g.add_edges_from(self.edges)
        try:
            order = tuple(nx.lexicographical_topological_sort(g, key=self.nodes.index))
        except nx.NetworkXUnfeasible as exc:
            raise ConfigInvalid("network has a cycle") from exc
        object.__setattr__(self, "topo_order", order)
        for s in self.sources:
            for t in self.sinks:
                if not nx.has_path(g, s, t):
                    raise ConfigInvalid(f"source {s} does not reach sink {t}")
        if self.rates is not None:
            object.__setattr__(self, "rates", tuple(int(r) for r in self.rates))
            if len(self.rates) != len(self.sources):
                raise ConfigInvalid("one rate per source is required")

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    @property
    def s(self) -> int:
        return len(self.sources)

    def in_edges(self, v: str) -> list[int]:
        return [i for i, (_, b) in enumerate(self.edges) if b == v]

    def out_edges(self, v: str) -> list[int]:
        return [i for i, (a, _) in enumerate(self.edges) if a == v]

    def with_rates(self, rates: Sequence[int]) -> "NetworkInstance":
        return NetworkInstance(self.nodes, self.edges, self.sources, self.sinks, tuple(rates), self.name)

    # serialization ------------------------------------------------------------
    def to_dict(self) -> dict:
        srcs = [
            {"id": s, "rate": r} for s, r in zip(self.sources, self.rates)
        ] if self.rates is not None else list(self.sources)
        return {
            "name": self.name,
            "nodes": list(self.nodes),
            "edges": [list(e) for e in self.edges],
            "sources": srcs,
            "sinks": list(self.sinks),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "NetworkInstance":
        try:
            srcs = d["sources"]
            ids = [s["id"] if isinstance(s, dict) else s for s in srcs]
            rates = [s["rate"] for s in srcs] if srcs and all(isinstance(s, dict) and "rate" in s for s in srcs) else None
            return cls(
                nodes=tuple(str(v) for v in d["nodes"]),
                edges=tuple((str(a), str(b)) for a, b in d["edges"]),
                sources=tuple(str(s) for s in ids),
                sinks=tuple(str(t) for t in d["sinks"]),
                rates=tuple(rates) if rates is not None else None,
                name=d.get("name", ""),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigInvalid(f"malformed topology: {exc}") from exc

    @classmethod
    def load(cls, path) -> "NetworkInstance":
        with open(path) as fh:
            return cls.from_dict(json.load(fh))

    def dump(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_dict(), fh, indent=2)
            fh.write("\n")


def load_fixture(name: str) -> NetworkInstance:
    return NetworkInstance.load(FIXTURE_DIR / f"{name}.json")


# min-cuts -----------------------------------------------------------------------

_SUPER = "__super_source__"


def _flow_graph(net: NetworkInstance, subset: Sequence[int]) -> nx.DiGraph:
    g = nx.DiGraph()
    g.add_nodes_from(net.nodes)
    for a, b in net.edges:
        if g.has_edge(a, b):
            g[a][b]["capacity"] += 1
        else:
            g.add_edge(a, b, capacity=1)
    for i in subset:
        g.add_edge(_SUPER, net.sources[i])  # no capacity attribute means infinite
    return g


def min_cut(net: NetworkInstance, subset: Sequence[int], sink: str | None = None) -> int:
    """Max-flow value from the sources in ``subset`` to ``sink`` (min over sinks if None)."""
    subset = tuple(subset)
    if not subset:
        raise ValueError("subset of sources must be nonempty")
    sinks = net.sinks if sink is None else (sink,)
    g = _flow_graph(net, subset)
    return min(int(nx.maximum_flow_value(g, _SUPER, t)) for t in sinks)


def min_cut_edges(net: NetworkInstance, subset: Sequence[int], sink: str) -> list[int]:
    """Edge ids of one minimum cut separating ``subset`` from ``sink``."""
    g = _flow_graph(net, subset)
    _, (reach, _) = nx.minimum_cut(g, _SUPER, sink)
    return [i for i, (a, b) in enumerate(net.edges) if a in reach and b not in reach]


def all_min_cuts(net: NetworkInstance) -> dict[tuple[int, ...], int]:
    out = {}
    for k in range(1, net.s + 1):
        for sub in itertools.combinations(range(net.s), k):
            out[sub] = min_cut(net, sub)
    return out


# adversary ------------------------------------------------------------------------

@dataclass(frozen=True)
class AdversaryAction:
    """Rows of Z are injected on (or, with mode="replace", replace the output of) attacked edges."""

    attacked_edges: tuple[int, ...]
    Z: Mat
    strategy: str = "none"
    mode: str = "inject"

    def __post_init__(self):
        if self.Z.nrows != len(self.attacked_edges):
            raise ShapeMismatch("Z needs one row per attacked edge")
        if self.mode not in ("inject", "replace"):
            raise ValueError(f"unknown adversary mode {self.mode!r}")

    @property
    def z(self) -> int:
        return len(self.attacked_edges)

    def truncated(self, rank_z: int) -> "AdversaryAction":
        """Same edges, Z projected onto its first ``rank_z`` independent rows."""
        from .matrix import row_basis

        B = row_basis(self.Z)
        keep = B.rows[:rank_z]
        rows = []
        for i in range(self.Z.nrows):
            rows.append(list(keep[i]) if i < len(keep) else [0] * self.Z.ncols)
        return AdversaryAction(self.attacked_edges, Mat(self.Z.field, rows, self.Z.ncols), self.strategy, self.mode)


def no_adversary(field, ell: int) -> AdversaryAction:
    return AdversaryAction((), Mat.zeros(field, 0, ell), "none")


def _rng(seed) -> np.random.Generator:
    return np.random.default_rng(seed)


def _random_rows(rng: np.random.Generator, field, nrows: int, ell: int) -> Mat:
    return Mat(field, rng.integers(0, field.p, size=(nrows, ell)).tolist(), ell)


def adversary_strategies(
    net: NetworkInstance,
    z: int,
    seed,
    *,
    strategy: str = "random",
    field=None,
    ell: int = 1,
    search: Callable[[AdversaryAction], bool] | None = None,
    forge: Callable[[np.random.Generator, int], Mat] | None = None,
    search_budget: int = 64,
    cut_subset: Sequence[int] | None = None,
) -> AdversaryAction:
    """Build the adversary's action for one trial.

    strategy:
      ``none``    nothing attacked;
      ``random``  z uniformly chosen edges, uniform Z;
      ``mincut``  z edges of a min-cut to the first sink, uniform Z (the cut
                  separates ``cut_subset``, all sources by default);
      ``erase``   z min-cut edges forced to output zero;
      ``forge``   min-cut edges, Z rows produced by ``forge(rng, z)``;
      ``worst``   enumerate edge subsets and sampled Z, returning the first
                  action that ``search`` reports as harmful.
    The strategy sees the network and whatever the callbacks close over,
    never the shared secrets.
    """
    field = field or PrimeField(2)
    rng = _rng(seed)
    if z == 0 or strategy == "none":
        return no_adversary(field, ell)
    z = min(z, net.num_edges)
    if strategy == "random":
        edges = tuple(sorted(rng.choice(net.num_edges, size=z, replace=False).tolist()))
        return AdversaryAction(edges, _random_rows(rng, field, z, ell), "random")
    subset = range(net.s) if cut_subset is None else cut_subset
    cut = sorted(min_cut_edges(net, subset, net.sinks[0]))
    if strategy in ("mincut", "erase", "forge"):
        picks = sorted(rng.choice(len(cut), size=min(z, len(cut)), replace=False).tolist())
        edges = tuple(cut[i] for i in picks)
        if strategy == "mincut":
            return AdversaryAction(edges, _random_rows(rng, field, len(edges), ell), "mincut")
        if strategy == "erase":
            return AdversaryAction(edges, Mat.zeros(field, len(edges), ell), "erase", mode="replace")
        if forge is None:
            raise ValueError("forge strategy needs a forge callback")
        return AdversaryAction(edges, forge(rng, len(edges)), "forge")
    if strategy == "worst":
        if search is None:
            raise ValueError("worst-case strategy needs a search callback")
        last = None
        per_subset = max(1, search_budget // max(1, comb(net.num_edges, z)))
        for edges in itertools.combinations(range(net.num_edges), z):
            tries = [AdversaryAction(edges, Mat.zeros(field, z, ell), "worst", mode="replace")]
            tries += [AdversaryAction(edges, _random_rows(rng, field, z, ell), "worst") for _ in range(per_subset)]
            for action in tries:
                last = action
                if search(action):
                    return action
        return last
    raise ValueError(f"unknown adversary strategy {strategy!r}")


# transmission -----------------------------------------------------------------------

@dataclass(frozen=True)
class TransmissionOutcome:
    sink: str
    Y: Mat
    T: tuple[Mat, ...]
    T_z: Mat
    rho: int
    t: int

    def reconstruct(self, messages: Sequence[Mat], Z: Mat) -> Mat:
        acc = self.T_z @ Z if Z.nrows else Mat.zeros(self.Y.field, self.Y.nrows, self.Y.ncols)
        for Ti, Mi in zip(self.T, messages):
            acc = acc + Ti @ Mi
        return acc


def coding_vectors(
    net: NetworkInstance,
    packet_counts: Sequence[int],
    p: int,
    seed,
    attacked: Sequence[int] = (),
    mode: str = "inject",
) -> np.ndarray:
    """Global coding vectors, one row per edge, over the unknowns [M_1; ...; M_s; Z]."""
    rng = _rng(seed)
    offsets = np.cumsum([0] + list(packet_counts))
    D = int(offsets[-1]) + len(attacked)
    vec = np.zeros((net.num_edges, D), dtype=np.int64)
    slot = {e: int(offsets[-1]) + k for k, e in enumerate(attacked)}
    src_index = {s: i for i, s in enumerate(net.sources)}
    ins = {v: net.in_edges(v) for v in net.nodes}
    for v in net.topo_order:
        outs = net.out_edges(v)
        if not outs:
            continue
        inputs = [vec[e] for e in ins[v]]
        if v in src_index:
            i = src_index[v]
            for r in range(int(offsets[i]), int(offsets[i + 1])):
                u = np.zeros(D, dtype=np.int64)
                u[r] = 1
                inputs.append(u)
        basis = np.array(inputs, dtype=np.int64) if inputs else np.zeros((0, D), dtype=np.int64)
        for e in outs:
            coeffs = rng.integers(0, p, size=len(inputs), dtype=np.int64)
            g = (coeffs @ basis) % p if len(inputs) else np.zeros(D, dtype=np.int64)
            if e in slot:
                if mode == "replace":
                    g = np.zeros(D, dtype=np.int64)
                g[slot[e]] = (g[slot[e]] + 1) % p
            vec[e] = g
    return vec


def transmit(
    net: NetworkInstance,
    messages: Sequence[Mat],
    adversary: AdversaryAction | None,
    seed,
) -> dict[str, TransmissionOutcome]:
    """Run one network use; returns the outcome at every sink."""
    if len(messages) != net.s:
        raise ShapeMismatch(f"{net.s} sources but {len(messages)} messages")
    F = messages[0].field
    if F.base is not None:
        raise ShapeMismatch("network packets must be over the prime field")
    ell = messages[0].ncols
    if any(M.ncols != ell for M in messages):
        raise ShapeMismatch("all messages must share the packet length")
    adversary = adversary or no_adversary(F, ell)
    if adversary.Z.nrows and adversary.Z.ncols != ell:
        raise ShapeMismatch("Z rows must have the packet length")
    p = F.p
    counts = [M.nrows for M in messages]
    vec = coding_vectors(net, counts, p, seed, adversary.attacked_edges, adversary.mode)
    stacked = np.array(
        [r for M in messages for r in M.rows] + [list(r) for r in adversary.Z.rows],
        dtype=np.int64,
    ).reshape(-1, ell)
    offsets = np.cumsum([0] + counts)
    sent = Mat.vstack(*messages)
    sent_rank = rank(sent)
    out = {}
    for t in net.sinks:
        ids = net.in_edges(t)
        G = vec[ids]
        Y = _mulmod(G, stacked, p)
        Ymat = Mat(F, Y.tolist(), ell)
        T = tuple(
            Mat(F, G[:, int(offsets[i]):int(offsets[i + 1])].tolist(), counts[i]) for i in range(net.s)
        )
        Tz = Mat(F, G[:, int(offsets[-1]):].tolist(), adversary.z)
        dim_r = rank(Ymat)
        dim_sum = rank(Mat.vstack(sent, Ymat))
        inter = sent_rank + dim_r - dim_sum
        out[t] = TransmissionOutcome(t, Ymat, T, Tz, rho=sent_rank - inter, t=dim_r - inter)
    return out


def _mulmod(A: np.ndarray, B: np.ndarray, p: int) -> np.ndarray:
    if A.shape[1] == 0:
        return np.zeros((A.shape[0], B.shape[1]), dtype=np.int64)
    if p < 3_000_000 and A.shape[1] < 1000:
        return (A @ B) % p
    out = np.zeros((A.shape[0], B.shape[1]), dtype=np.int64)
    for k in range(A.shape[1]):
        out = (out + np.outer(A[:, k], B[k]) % p) % p
    return out


# random fixtures ------------------------------------------------------------------------

def random_dag(
    n_nodes: int,
    n_edges: int,
    n_sources: int = 2,
    n_sinks: int = 1,
    seed: int = 0,
    name: str = "random",
) -> NetworkInstance:
    """Seeded random DAG where every source reaches every sink.

    Nodes are ordered; sources come first and sinks last, edges only go
    forward.  A spanning chain guarantees reachability.
    """
    if n_nodes < n_sources + n_sinks:
        raise ValueError("not enough nodes for the terminals")
    rng = _rng(seed)
    nodes = [f"v{i}" for i in range(n_nodes)]
    sources = nodes[:n_sources]
    sinks = nodes[n_nodes - n_sinks:]
    mids = nodes[n_sources:n_nodes - n_sinks]
    edges = []
    for s in sources:
        for t in sinks:
            hop = mids[int(rng.integers(len(mids)))] if mids else None
            edges += [(s, hop), (hop, t)] if hop else [(s, t)]
    while len(edges) < n_edges:
        a, b = sorted(rng.choice(n_nodes, size=2, replace=False).tolist())
        if nodes[b] in sources or nodes[a] in sinks:
            continue
        edges.append((nodes[a], nodes[b]))
    return NetworkInstance(tuple(nodes), tuple(edges), tuple(sources), tuple(sinks), name=name)
