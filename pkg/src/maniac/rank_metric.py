"""Gabidulin codes over one step L/K of a field tower.

A message column x = (x_0..x_{R-1}) over L is the linearized polynomial
f(y) = sum x_j y^[j] with y^[j] = y^(|K|^j), and the codeword is
(f(g_1), ..., f(g_m)) for K-independent evaluation points g_i.  The
generator is therefore the Moore matrix G[i][j] = g_i^[j].

Decoding handles side information about the error Z = sum L_i E_i:

* known locations (columns L_i over K): a K-invertible change of evaluation
  points moves their span onto the first coordinates, which are dropped;
* known values (rows E_i over K): the subspace polynomial of their span is
  composed on the left, raising the q-degree by delta;
* what remains is decoded by a Welch-Berlekamp key equation solved by
  Gaussian elimination, then two exact left divisions.

The guarantee is exact recovery when 2*tau - mu - delta <= d - 1.
"""
from __future__ import annotations

import random
from dataclasses import dataclass
from functools import lru_cache

from .errors import DecodeFailure, ParametersExceedFieldDegree, ShapeMismatch
from .ff_tower import Mat, fold
from .matrix import _gauss_jordan, inverse, rank, rref_only


@dataclass(frozen=True)
class GabidulinCode:
    """Length-m, dimension-R Gabidulin code with symbols in ``field`` over ``field.base``."""

    field: object
    m: int
    R: int

    def __post_init__(self):
        if self.field.base is None:
            raise ValueError("symbols must live in an extension field")
        if not 1 <= self.R <= self.m:
            raise ValueError(f"need 1 <= R <= m, got R={self.R}, m={self.m}")
        if self.m > self.field.degree:
            raise ParametersExceedFieldDegree(
                f"length {self.m} exceeds extension degree {self.field.degree}"
            )

    @property
    def base_size(self) -> int:
        return self.field.base.size

    @property
    def d(self) -> int:
        return self.m - self.R + 1

    @property
    def level(self) -> int:
        return self.field.level


@dataclass(frozen=True)
class SideInfo:
    """Known error locations (m x mu over K) and known error values (delta x cols over K)."""

    known_locations: Mat | None = None
    known_values: Mat | None = None

    @property
    def mu(self) -> int:
        return 0 if self.known_locations is None else self.known_locations.ncols

    @property
    def delta(self) -> int:
        return 0 if self.known_values is None else self.known_values.nrows


# linearized polynomials: coefficient lists, P(x) = sum c_i x^[i] ---------------

def lin_eval(L, coeffs, x: int) -> int:
    acc = 0
    if not x:
        return 0
    for i, c in enumerate(coeffs):
        if c:
            acc = L.add(acc, L.mul(c, L.frob(x, i)))
    return acc


def lin_compose(L, A, B) -> list[int]:
    """Coefficients of A o B."""
    out = [0] * (len(A) + len(B) - 1) if A and B else []
    for i, a in enumerate(A):
        if a:
            for j, b in enumerate(B):
                if b:
                    out[i + j] = L.add(out[i + j], L.mul(a, L.frob(b, i)))
    return out


def lin_left_divide(L, A, B) -> list[int]:
    """Q with A o Q = B; DecodeFailure if A does not divide B on the left."""
    A = list(A)
    while A and not A[-1]:
        A.pop()
    if not A:
        raise DecodeFailure("division by the zero polynomial", stage="gabidulin")
    a = len(A) - 1
    inv_lead = L.inv(A[-1])
    B = list(B)
    while B and not B[-1]:
        B.pop()
    Q = [0] * max(len(B) - a, 0)
    for k in range(len(B) - 1 - a, -1, -1):
        top = B[k + a]
        if top:
            c = L.frob(L.mul(top, inv_lead), -a)
            Q[k] = c
            for i, ai in enumerate(A):
                if ai:
                    B[i + k] = L.sub(B[i + k], L.mul(ai, L.frob(c, i)))
    if any(B):
        raise DecodeFailure("nonzero remainder in left division", stage="gabidulin")
    return Q


def subspace_polynomial(L, values) -> list[int]:
    """Monic linearized polynomial vanishing exactly on span_K(values)."""
    q1 = L.base.size - 1
    sigma = [1]
    for v in values:
        val = lin_eval(L, sigma, v)
        if not val:
            continue
        scale = L.pow(val, q1)
        shifted = [0] + [L.frob(c) for c in sigma]
        for i, c in enumerate(sigma):
            if c:
                shifted[i] = L.sub(shifted[i], L.mul(scale, c))
        sigma = shifted
    return sigma


# code construction -------------------------------------------------------------

def evaluation_points(code: GabidulinCode, seed: int = 0) -> list[int]:
    """A seeded shuffle of the polynomial basis of L over K, truncated to m."""
    L = code.field
    basis = [L.base.size ** i for i in range(L.degree)]
    random.Random(seed).shuffle(basis)
    return basis[: code.m]


def make_generator(code: GabidulinCode, tower=None, seed: int = 0) -> Mat:
    """Moore matrix G[i][j] = g_i^[j]."""
    L = code.field
    if tower is not None and not any(lv is L for lv in tower.levels):
        raise ValueError("code field is not a level of the given tower")
    g = evaluation_points(code, seed)
    return Mat(L, [[L.frob(gi, j) for j in range(code.R)] for gi in g], code.R)


def encode(code: GabidulinCode, G: Mat, X: Mat) -> Mat:
    if G.shape != (code.m, code.R):
        raise ShapeMismatch(f"generator must be {code.m}x{code.R}, got {G.shape}")
    if X.nrows != code.R:
        raise ShapeMismatch(f"message must have {code.R} rows, got {X.nrows}")
    return G @ X


def _as_folded(code: GabidulinCode, A: Mat) -> Mat:
    L = code.field
    if A.field is L:
        return A
    if A.field is L.base:
        return fold(A, L)
    if L.contains(A.field):
        return A.embed(L)
    raise ShapeMismatch(f"matrix over {A.field!r} is not usable with {L!r}")


def _location_transform(K, Lhat: Mat, m: int) -> tuple[Mat, int]:
    """Invertible Theta over K with Theta * colspan(Lhat) = span(e_1..e_mu')."""
    basis = []
    if Lhat is not None and Lhat.ncols:
        _, pivots = rref_only(Lhat)
        basis = [list(Lhat.T.rows[c]) for c in pivots]
    mu = len(basis)
    cols = list(basis)
    for i in range(m):
        if len(cols) == m:
            break
        e = [int(j == i) for j in range(m)]
        trial = Mat(K, cols + [e], m)
        if rank(trial) == len(cols) + 1:
            cols.append(e)
    P = Mat(K, cols, m).T
    return inverse(P), mu


def decode(code: GabidulinCode, G: Mat, received: Mat, side: SideInfo | None = None) -> Mat:
    """Recover X (R x c over L) from (G X)^u + Z given side information on Z."""
    L = code.field
    K = L.base
    if G.shape != (code.m, code.R):
        raise ShapeMismatch(f"generator must be {code.m}x{code.R}, got {G.shape}")
    Yf = _as_folded(code, received)
    if Yf.nrows != code.m:
        raise ShapeMismatch(f"received word has {Yf.nrows} rows, code length is {code.m}")
    side = side or SideInfo()
    g = [row[0] for row in G.rows]

    Lhat = side.known_locations
    if Lhat is not None and Lhat.ncols and Lhat.nrows != code.m:
        raise ShapeMismatch("known locations must have m rows")
    if Lhat is not None and Lhat.ncols and not Lhat.is_zero():
        theta, mu = _location_transform(K, Lhat, code.m)
        g2 = [_kdot(L, row, g) for row in theta.rows][mu:]
        cols = [[_kdot(L, row, col) for row in theta.rows][mu:] for col in Yf.T.rows]
    else:
        g2 = g
        cols = [list(c) for c in zip(*Yf.rows)] if Yf.nrows else [[] for _ in range(Yf.ncols)]

    values = [[] for _ in cols]
    E = side.known_values
    if E is not None and E.nrows:
        Ef = _as_folded(code, E)
        if Ef.ncols != len(cols):
            raise ShapeMismatch("known values do not match the received word's columns")
        values = [list(c) for c in Ef.T.rows]

    g_pows = None
    out_cols = []
    for j, r in enumerate(cols):
        sigma = subspace_polynomial(L, values[j])
        if len(sigma) > 1:
            y = [lin_eval(L, sigma, v) for v in r]
        else:
            y = r
        Rp = code.R + len(sigma) - 1
        if g_pows is None or len(g_pows[0]) < Rp + len(g2):
            g_pows = _frobenius_powers(L, tuple(g2), Rp + len(g2))
        F = _welch_berlekamp(L, g2, g_pows, y, Rp)
        f = lin_left_divide(L, sigma, F) if len(sigma) > 1 else F
        if any(f[code.R:]):
            raise DecodeFailure("recovered polynomial exceeds the code dimension", stage="gabidulin")
        out_cols.append((f + [0] * code.R)[: code.R])
    return Mat(L, [list(r) for r in zip(*out_cols)] if out_cols else [[] for _ in range(code.R)], len(out_cols))


@lru_cache(maxsize=256)
def _frobenius_powers(L, points: tuple[int, ...], count: int) -> list[list[int]]:
    return [[L.frob(x, b) for b in range(count)] for x in points]


def _kdot(L, krow, vec) -> int:
    acc = 0
    for a, b in zip(krow, vec):
        if a and b:
            acc = L.add(acc, L.mul(a, b))
    return acc


def _krank(L, vals) -> int:
    """Rank over the base field of a vector over L."""
    if L.p == 2 and L.base.base is None:
        # entries are already F_2 bit vectors
        basis: list[int] = []
        for x in vals:
            for b in basis:
                x = min(x, x ^ b)
            if x:
                basis.append(x)
                basis.sort(reverse=True)
        return len(basis)
    rows = [L.coeffs(x) for x in vals if x]
    return len(_gauss_jordan(L.base, rows, L.degree, full=False)) if rows else 0


def _welch_berlekamp(L, g, g_pows, y, Rp) -> list[int]:
    """Find F of q-degree < Rp with rank_K(y - F(g)) <= (len(g) - Rp) // 2."""
    m = len(g)
    t = (m - Rp) // 2
    if t < 0:
        raise DecodeFailure("side information leaves fewer points than unknowns", stage="gabidulin")
    if not any(y):
        return [0] * Rp
    neg = L.neg
    rows = []
    for i in range(m):
        yi = y[i]
        row = [L.frob(yi, a) for a in range(t + 1)]
        row += [neg(v) for v in g_pows[i][: Rp + t]]
        rows.append(row)
    n = len(rows[0])
    pivots = _gauss_jordan(L, rows, n)
    free = next((c for c in range(n) if c not in pivots), None)
    if free is None:
        raise DecodeFailure("key equation has only the trivial solution", stage="gabidulin")
    v = [0] * n
    v[free] = 1
    for i, c in enumerate(pivots):
        v[c] = neg(rows[i][free])
    lam, N = v[: t + 1], v[t + 1:]
    if not any(lam):
        raise DecodeFailure("key equation has only the trivial solution", stage="gabidulin")
    F = lin_left_divide(L, lam, N)
    resid = [L.sub(yi, _kdot(L, F, gp)) for yi, gp in zip(y, g_pows)]
    if any(resid) and _krank(L, resid) > t:
        raise DecodeFailure("residual error exceeds the correctable rank", stage="gabidulin")
    return F + [0] * (Rp - len(F))
