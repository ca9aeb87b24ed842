"""Shared-secret multi-source code.

Source i holds a secret (W_i, H_i) known to the sinks.  It prepends a block
L_i to its payload so that M_i P_i = H_i, where P_i is the ell x alpha
Vandermonde matrix of W_i.  A sink reduces Y = Ys F to independent columns
and solves M_i^s (F P_i) = H_i for each source.
"""
from __future__ import annotations

from dataclasses import dataclass
from math import comb, log
from typing import Sequence

import numpy as np

from .errors import DecodeFailure, NoSolution, ShapeMismatch, Underdetermined
from .ff_tower import Mat
from .matrix import column_basis, inverse, is_invertible, solve, vandermonde

# failure events of the probability analysis
EVENT_TRANSFER = "rank-deficient-transfer"
EVENT_VANDERMONDE = "singular-vandermonde"
EVENT_NONUNIQUE = "non-unique-solution"


def overhead(m: int) -> int:
    """alpha = m^2 + 1 for full-set min-cut m."""
    return m * m + 1


@dataclass(frozen=True)
class SharedSecret:
    W: Mat
    H: Mat

    @property
    def alpha(self) -> int:
        return self.W.ncols

    @property
    def R(self) -> int:
        return self.H.nrows

    def is_degenerate(self) -> bool:
        w = self.W.rows[0]
        return 0 in w or len(set(w)) != len(w)

    def to_hex(self) -> dict:
        # test artifact: lets a failing trial be replayed
        return {
            "W": [format(x, "x") for x in self.W.rows[0]],
            "H": [[format(x, "x") for x in r] for r in self.H.rows],
        }


def generate_secret(field, R: int, alpha: int, rng: np.random.Generator) -> SharedSecret:
    W = Mat(field, [rng.integers(0, field.p, size=alpha).tolist()], alpha)
    H = Mat(field, rng.integers(0, field.p, size=(R, alpha)).tolist(), alpha)
    return SharedSecret(W, H)


@dataclass(frozen=True)
class SideChannelMessage:
    M: Mat
    L: Mat
    X: Mat
    degenerate: bool


def sc_encode(X: Mat, secret: SharedSecret, ell: int) -> SideChannelMessage:
    alpha = secret.alpha
    if ell <= alpha:
        raise ShapeMismatch(f"packet length {ell} must exceed alpha={alpha}")
    if X.ncols != ell - alpha or X.nrows != secret.R:
        raise ShapeMismatch(f"payload must be {secret.R}x{ell - alpha}, got {X.shape}")
    F = X.field
    P = vandermonde(secret.W, ell)
    V = P[:alpha, :]
    Pt = P[alpha:, :]
    if is_invertible(V):
        L = (secret.H - X @ Pt) @ inverse(V)
        degenerate = False
    else:
        L = Mat.zeros(F, secret.R, alpha)
        degenerate = True
    return SideChannelMessage(Mat.hstack(L, X), L, X, degenerate)


def sc_decode(Y: Mat, secrets: Sequence[SharedSecret], rates: Sequence[int] | None = None) -> list[Mat]:
    """Payloads X_1..X_s from the sink matrix Y."""
    ell = Y.ncols
    if rates is not None and list(rates) != [s.R for s in secrets]:
        raise ShapeMismatch("rates disagree with the secrets' row counts")
    Ys, F, _ = column_basis(Y)
    out = []
    for i, sec in enumerate(secrets):
        if sec.is_degenerate():
            raise DecodeFailure(f"source {i + 1}: secret Vandermonde block is singular",
                                stage=f"source{i + 1}", event=EVENT_VANDERMONDE)
        P = vandermonde(sec.W, ell)
        A = F @ P  # r x alpha
        try:
            Ms_T = solve(A.T, sec.H.T)
        except NoSolution as exc:
            raise DecodeFailure(f"source {i + 1}: inconsistent system", stage=f"source{i + 1}",
                                event=EVENT_TRANSFER) from exc
        except Underdetermined as exc:
            raise DecodeFailure(f"source {i + 1}: more than one solution", stage=f"source{i + 1}",
                                event=EVENT_NONUNIQUE) from exc
        M = Ms_T.T @ F
        out.append(M[:, sec.alpha:])
    return out


def union_bound(num_edges: int, num_sinks: int, z: int, p: int, rates: Sequence[int], m: int, ell: int) -> dict:
    """The three failure-event terms for s sources and their (capped) sum.

    The non-uniqueness term uses p^(R_i m) (ell/p)^alpha per source, the
    form before it is loosened to ell^alpha / p.
    """
    alpha = overhead(m)
    e1 = comb(num_edges, z) * num_edges * num_sinks / p
    e2 = len(rates) * alpha * alpha / p
    e3 = 0.0
    for R in rates:
        lg = R * m * log(p) + alpha * (log(ell) - log(p))
        e3 += float(np.exp(min(lg, 700.0)))
    total = e1 + e2 + e3
    return {"transfer": e1, "vandermonde": e2, "non_unique": e3, "total": total, "bound": min(1.0, total)}
