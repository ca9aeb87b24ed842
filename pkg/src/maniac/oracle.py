"""Brute-force reference decoders for toy parameters.

Both enumerate their whole candidate set and refuse (rather than truncate)
when it exceeds the cap.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from math import prod
from typing import Sequence

import numpy as np

from .errors import EnumerationCapExceeded
from .ff_tower import Mat, unfold_to
from .matrix import rank
from .subspace import Subspace, injection_distance

DEFAULT_CAP = 1 << 20


@dataclass(frozen=True)
class OracleResult:
    best: tuple  # candidates attaining the minimum, in enumeration order
    distance: int

    @property
    def unique(self) -> bool:
        return len(self.best) == 1

    @property
    def winner(self):
        return self.best[0] if self.unique else None


def batch_rank(A: np.ndarray, p: int) -> np.ndarray:
    """Ranks over F_p of a stack of matrices, shape (batch, rows, cols).

    Each pivot row is used to clear its column everywhere, itself included,
    so it drops out of the pool; the rank is the number of pivots found.
    """
    A = np.asarray(A, dtype=np.int64) % p
    nb, r, c = A.shape
    if nb == 0 or r == 0 or c == 0:
        return np.zeros(nb, dtype=np.int64)
    if p == 2 and c <= 62:
        return _batch_rank_gf2((A << np.arange(c, dtype=np.int64)).sum(axis=2), c)
    inv = np.array([0] + [pow(x, p - 2, p) for x in range(1, p)], dtype=np.int64)
    rk = np.zeros(nb, dtype=np.int64)
    ar = np.arange(nb)
    for col in range(c):
        nz = A[:, :, col] != 0
        found = nz.any(axis=1)
        piv = A[ar, np.argmax(nz, axis=1)]
        piv = (piv * inv[piv[:, col]][:, None]) % p
        piv[~found] = 0
        A = (A - A[:, :, col, None] * piv[:, None, :]) % p
        rk += found
    return rk


def _batch_rank_gf2(rows: np.ndarray, c: int) -> np.ndarray:
    rk = np.zeros(rows.shape[0], dtype=np.int64)
    ar = np.arange(rows.shape[0])
    for bit in range(c):
        has = (rows >> bit) & 1 == 1
        found = has.any(axis=1)
        piv = np.where(found, rows[ar, np.argmax(has, axis=1)], 0)
        rows = np.where(has, rows ^ piv[:, None], rows)
        rk += found
    return rk


def _header_layout(codebooks: Sequence[Sequence[Mat]]):
    """Header widths if every codeword is [0..I..0 | payload] in its own block, else None."""
    widths = [cb[0].nrows for cb in codebooks]
    H = sum(widths)
    off = 0
    for cb, w in zip(codebooks, widths):
        hdr = [[int(j == off + i) for j in range(H)] for i in range(w)]
        for cw in cb:
            if cw.nrows != w or cw.ncols <= H or [list(r[:H]) for r in cw.rows] != hdr:
                return None
        off += w
    return widths


def min_injection_decode(
    R_space: Subspace,
    codebooks: Sequence[Sequence[Mat]],
    cap: int = DEFAULT_CAP,
) -> OracleResult:
    """Tuple(s) of codeword indices minimizing d_I(R, <M_1; ...; M_s>).

    Each codeword is a message matrix over F_p whose row space is what the
    source injects.  With identity headers in disjoint blocks,
    dim(R + U) = sum n_i + rank(R_pay - R_head M'), which is evaluated in
    vectorized batches; otherwise every candidate space is built.
    """
    total = prod(len(cb) for cb in codebooks)
    if total > cap:
        raise EnumerationCapExceeded(f"{total} candidates exceed the cap {cap}")
    F = R_space.field
    widths = _header_layout(codebooks)
    if widths is None or F.base is not None:
        return _generic(R_space, codebooks)
    H = sum(widths)
    p = F.p
    Rb = np.array(R_space.basis.rows, dtype=np.int64).reshape(R_space.dim, -1)
    dimR = R_space.dim
    if dimR == 0:
        return OracleResult(tuple(itertools.product(*(range(len(cb)) for cb in codebooks))), H)
    Rhead, Rpay = Rb[:, :H], Rb[:, H:]
    contrib = []
    off = 0
    for cb, w in zip(codebooks, widths):
        pays = np.array([[r[H:] for r in cw.rows] for cw in cb], dtype=np.int64)  # (|cb|, w, P)
        contrib.append(np.einsum("rw,awp->arp", Rhead[:, off:off + w], pays) % p)
        off += w
    # enumerate the first s-1 codebooks in python, vectorize over the last
    last = contrib[-1]
    best_val = None
    best: list[tuple] = []
    for prefix in itertools.product(*(range(len(cb)) for cb in codebooks[:-1])):
        base = Rpay.copy()
        for i, a in enumerate(prefix):
            base = base - contrib[i][a]
        batch = (base[None, :, :] - last) % p
        ranks = batch_rank(batch, p)
        m = int(ranks.min())
        if best_val is None or m < best_val:
            best_val, best = m, []
        if m == best_val:
            best.extend(prefix + (int(j),) for j in np.nonzero(ranks == m)[0])
    dist = H + best_val - min(dimR, H)
    return OracleResult(tuple(best), dist)


def _generic(R_space: Subspace, codebooks) -> OracleResult:
    best_val, best = None, []
    for combo in itertools.product(*(range(len(cb)) for cb in codebooks)):
        U = Subspace.span(Mat.vstack(*(cb[a] for cb, a in zip(codebooks, combo))))
        d = injection_distance(R_space, U)
        if best_val is None or d < best_val:
            best_val, best = d, []
        if d == best_val:
            best.append(combo)
    return OracleResult(tuple(best), best_val)


def all_messages(field, rows: int, cols: int, cap: int = DEFAULT_CAP):
    """Every rows x cols matrix over ``field`` in lexicographic order."""
    total = field.size ** (rows * cols)
    if total > cap:
        raise EnumerationCapExceeded(f"{total} messages exceed the cap {cap}")
    for vals in itertools.product(range(field.size), repeat=rows * cols):
        yield Mat(field, [vals[i * cols:(i + 1) * cols] for i in range(rows)], cols)


def nearest_rank_decode(code, G: Mat, received: Mat, cap: int = DEFAULT_CAP) -> OracleResult:
    """Messages X minimizing rank_K(received - G X), K the code's base field."""
    L = code.field
    K = L.base
    Rf = received if received.field is L else None
    if Rf is None:
        from .ff_tower import fold

        Rf = fold(received, L)
    cols = Rf.ncols
    msgs = list(all_messages(L, code.R, cols, cap))
    diffs = [unfold_to(Rf - G @ X, K) for X in msgs]
    if K.base is None:
        arr = np.array([d.rows for d in diffs], dtype=np.int64).reshape(len(diffs), code.m, -1)
        ranks = batch_rank(arr, K.p).tolist()
    else:
        ranks = [rank(d) for d in diffs]
    m = min(ranks)
    return OracleResult(tuple(X for X, r in zip(msgs, ranks) if r == m), m)
