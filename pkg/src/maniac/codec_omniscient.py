"""Multi-source code against an omniscient adversary via nested field extensions.

Source i (1-based) works over level i of a tower whose i-th degree is
n_i = R_i + 2z, Gabidulin-encodes with a Moore matrix G_i (d = 2z + 1),
unfolds the codeword to F_p and prepends an identity header in block i:

    M_i = [0 ... I_{n_i} ... 0 | unfold(G_i X_i)],   ell = sum n_i + k prod n_i.

The sink decodes the top source first: it builds

    Y_a = [Y_1 G_1 ... Y_{s-1} G_{s-1}  Y_s  fold(Y_payload)]

over level s-1, splits its RREF into (L_hat, r, E_hat) and runs the
erasure-assisted Gabidulin decoder on the last n_s rows.  Subtracting
Y_s * unfold(G_s X_s) from the payload leaves an (s-1)-source problem with
k replaced by k n_s.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from math import prod
from typing import Sequence

from .capacity import check as region_check
from .errors import DecodeFailure, RateRegionViolation, ShapeMismatch
from .ff_tower import FieldTower, Mat, fold_to, unfold_to
from .matrix import rank
from .rank_metric import GabidulinCode, SideInfo, decode as gab_decode, make_generator
from .subspace import rre_decompose


@dataclass(frozen=True)
class OmniscientParams:
    p: int
    rates: tuple[int, ...]
    z: int
    k: int = 1
    seed: int = 0
    tower: FieldTower = field(default=None, compare=False, repr=False)
    codes: tuple[GabidulinCode, ...] = field(default=(), compare=False, repr=False)
    generators: tuple[Mat, ...] = field(default=(), compare=False, repr=False)

    @classmethod
    def build(cls, p: int, rates: Sequence[int], z: int, k: int = 1, seed: int = 0,
              net=None, force: bool = False) -> "OmniscientParams":
        """Derive tower and generators deterministically from ``seed``.

        With ``net`` given, rate tuples outside the region raise
        RateRegionViolation unless ``force`` is set.
        """
        rates = tuple(int(r) for r in rates)
        if any(r < 1 for r in rates):
            raise ValueError("every source needs a positive rate")
        if z < 0 or k < 1:
            raise ValueError("need z >= 0 and k >= 1")
        n = tuple(r + 2 * z for r in rates)
        tower = FieldTower(p, n, seed=seed)
        codes = tuple(GabidulinCode(tower[i + 1], n[i], rates[i]) for i in range(len(rates)))
        gens = tuple(make_generator(c, tower, seed=seed + i) for i, c in enumerate(codes))
        params = cls(p, rates, z, k, seed, tower, codes, gens)
        assert all(c.d == 2 * z + 1 for c in codes)
        if net is not None and not force:
            om_rate_check(params, net)
        return params

    @property
    def s(self) -> int:
        return len(self.rates)

    @property
    def n(self) -> tuple[int, ...]:
        return tuple(r + 2 * self.z for r in self.rates)

    @property
    def ell(self) -> int:
        return sum(self.n) + self.k * prod(self.n)

    @property
    def header_len(self) -> int:
        return sum(self.n)

    def payload_shape(self, i: int) -> tuple[int, int]:
        """Rows and level-(i+1) columns of X_i (0-based source index)."""
        return self.rates[i], self.k * prod(self.n[i + 1:])

    def base_payload_cols(self, i: int) -> int:
        return self.k * prod(self.n)


@dataclass(frozen=True)
class OmniscientMessage:
    M: Mat
    M_prime: Mat


def om_rate_check(params: OmniscientParams, net):
    report = region_check(net, params.rates, params.z, "omniscient")
    if not report.feasible:
        raise RateRegionViolation(report.violations)
    return report


def om_encode(i: int, X: Mat, params: OmniscientParams) -> OmniscientMessage:
    """Message of source ``i`` (0-based)."""
    tower = params.tower
    L = tower[i + 1]
    rows, cols = params.payload_shape(i)
    if X.field is tower[0]:
        X = fold_to(X, L)
    elif X.field is not L:
        X = X.embed(L)
    if X.shape != (rows, cols):
        raise ShapeMismatch(f"source {i + 1} payload must be {rows}x{cols} over level {i + 1}, got {X.shape}")
    Mp = unfold_to(params.generators[i] @ X, tower[0])
    n = params.n
    F = tower[0]
    hdr = [[0] * sum(n[:i]) + [int(a == b) for b in range(n[i])] + [0] * sum(n[i + 1:]) for a in range(n[i])]
    M = Mat.hstack(Mat(F, hdr, sum(n)), Mp)
    return OmniscientMessage(M, Mp)


def _split(Y: Mat, params: OmniscientParams):
    n = params.n
    offs = [sum(n[:i]) for i in range(params.s + 1)]
    headers = [Y[:, offs[i]:offs[i + 1]] for i in range(params.s)]
    return headers, Y[:, offs[-1]:]


def stage_matrix(headers: Sequence[Mat], payload: Mat, params: OmniscientParams, top: int) -> tuple[Mat, int]:
    """Y_a for decoding source ``top`` (0-based) and its split column C."""
    K = params.tower[top]
    blocks = [(headers[i] @ params.generators[i]).embed(K) for i in range(top)]
    blocks.append(headers[top].embed(K))
    Ya = Mat.hstack(*blocks, fold_to(payload, K))
    C = sum(params.rates[:top]) + params.n[top]
    return Ya, C


def om_decode(Y: Mat, params: OmniscientParams) -> list[Mat]:
    """All payloads X_1..X_s (each over its own tower level)."""
    if Y.ncols != params.ell:
        raise ShapeMismatch(f"received packets have length {Y.ncols}, expected {params.ell}")
    headers, payload = _split(Y, params)
    out: list[Mat] = [None] * params.s
    F = params.tower[0]
    for top in reversed(range(params.s)):
        Ya, C = stage_matrix(headers, payload, params, top)
        dec = rre_decompose(Ya, C)
        nd = params.n[top]
        side = SideInfo(dec.L_hat[C - nd:, :], dec.E_hat)
        try:
            X = gab_decode(params.codes[top], params.generators[top], dec.r[C - nd:, :], side)
        except DecodeFailure as exc:
            raise DecodeFailure(str(exc), stage=f"stage1:s={top + 1}", event="gabidulin") from exc
        out[top] = X
        Mp = unfold_to(params.generators[top] @ X, F)
        payload = payload - headers[top] @ Mp
    return out


def transfer_matrix(T: Sequence[Mat], params: OmniscientParams) -> Mat:
    """D = [T_1 G_1 ... T_{s-1} G_{s-1}  T_s] over level s-1."""
    top = params.s - 1
    K = params.tower[top]
    blocks = [(T[i] @ params.generators[i]).embed(K) for i in range(top)]
    blocks.append(T[top].embed(K))
    return Mat.hstack(*blocks)


def transfer_invertible(T: Sequence[Mat], params: OmniscientParams) -> bool:
    D = transfer_matrix(T, params)
    return rank(D) == D.ncols if D.nrows >= D.ncols else False


def stage1_error_profile(Y: Mat, params: OmniscientParams, payloads: Sequence[Mat]) -> dict:
    """Ground-truth check of the top stage's side information.

    Returns mu, delta and tau = rank [[L_hat, e], [0, E_hat]] with
    e = r - X for X = [fold(X_1); ...; fold(X_{s-1}); unfold(G_s X_s)],
    plus whether e_d lies in the span allowed by the side information.
    """
    headers, payload = _split(Y, params)
    top = params.s - 1
    K = params.tower[top]
    Ya, C = stage_matrix(headers, payload, params, top)
    dec = rre_decompose(Ya, C)
    parts = [fold_to(payloads[i], K) for i in range(top)]
    parts.append(unfold_to(params.generators[top] @ payloads[top], K))
    X = Mat.vstack(*parts)
    e = dec.r - X
    blk = Mat.vstack(
        Mat.hstack(dec.L_hat, e),
        Mat.hstack(Mat.zeros(K, dec.delta, dec.mu), dec.E_hat),
    ) if dec.delta else Mat.hstack(dec.L_hat, e)
    tau = rank(blk)
    return {"mu": dec.mu, "delta": dec.delta, "tau": tau, "slack": 2 * params.z - (2 * tau - dec.mu - dec.delta)}


def theorem3_bound(num_sources: int, num_edges: int, p: int) -> float:
    return min(1.0, num_sources * num_edges / p)
