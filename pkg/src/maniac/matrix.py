"""Exact linear algebra over any tower level.

Everything is Gauss-Jordan elimination with first-nonzero pivoting, run on
plain lists of ints.  Prime fields take a fast path with ``% p``.
"""
from __future__ import annotations

from dataclasses import dataclass

from .errors import NoSolution, ShapeMismatch, Underdetermined
from .ff_tower import Mat, common_field


@dataclass(frozen=True)
class RrefResult:
    rref: Mat
    pivot_cols: tuple[int, ...]
    rank: int
    transform: Mat


def _gauss_jordan(F, rows: list[list[int]], limit: int, full: bool = True) -> list[int]:
    """Reduce ``rows`` in place, choosing pivots among the first ``limit`` columns.

    With ``full=False`` only rows below the pivot are cleared (echelon form),
    which is all ``rank`` needs.
    """
    n = len(rows)
    pivots: list[int] = []
    r = 0
    if F.base is None:
        p = F.p
        for c in range(limit):
            if r == n:
                break
            piv = next((i for i in range(r, n) if rows[i][c]), None)
            if piv is None:
                continue
            rows[r], rows[piv] = rows[piv], rows[r]
            inv = pow(rows[r][c], p - 2, p)
            pr = [x * inv % p for x in rows[r]]
            rows[r] = pr
            for i in range(0 if full else r + 1, n):
                f = rows[i][c]
                if i != r and f:
                    rows[i] = [(x - f * y) % p for x, y in zip(rows[i], pr)]
            pivots.append(c)
            r += 1
        return pivots
    if getattr(F, "_exp", None) is not None:
        return _gauss_jordan_tables(F, rows, limit, full)
    mul, sub, inv_ = F.mul, F.sub, F.inv
    for c in range(limit):
        if r == n:
            break
        piv = next((i for i in range(r, n) if rows[i][c]), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        inv = inv_(rows[r][c])
        pr = [mul(x, inv) if x else 0 for x in rows[r]]
        rows[r] = pr
        for i in range(0 if full else r + 1, n):
            f = rows[i][c]
            if i != r and f:
                rows[i] = [sub(x, mul(f, y)) if y else x for x, y in zip(rows[i], pr)]
        pivots.append(c)
        r += 1
    return pivots


def _gauss_jordan_tables(F, rows, limit, full):
    # same elimination with exp/log lookups inlined
    exp, log = F._exp, F._log
    order = F.size - 1
    xor = F.p == 2
    sub = F.sub
    n = len(rows)
    pivots: list[int] = []
    r = 0
    for c in range(limit):
        if r == n:
            break
        piv = next((i for i in range(r, n) if rows[i][c]), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        li = order - log[rows[r][c]]
        pr = [exp[log[x] + li] if x else 0 for x in rows[r]]
        rows[r] = pr
        lp = [log[y] if y else -1 for y in pr]
        for i in range(0 if full else r + 1, n):
            f = rows[i][c]
            if i != r and f:
                lf = log[f]
                if xor:
                    rows[i] = [x ^ exp[lf + ly] if ly >= 0 else x for x, ly in zip(rows[i], lp)]
                else:
                    rows[i] = [sub(x, exp[lf + ly]) if ly >= 0 else x for x, ly in zip(rows[i], lp)]
        pivots.append(c)
        r += 1
    return pivots


def rref(A: Mat) -> RrefResult:
    """Reduced row echelon form with the transform that produces it."""
    m, n = A.shape
    rows = [list(r) + [int(i == j) for j in range(m)] for i, r in enumerate(A.rows)]
    pivots = _gauss_jordan(A.field, rows, n)
    R = Mat(A.field, [r[:n] for r in rows], n)
    T = Mat(A.field, [r[n:] for r in rows], m)
    return RrefResult(R, tuple(pivots), len(pivots), T)


def rref_only(A: Mat) -> tuple[Mat, tuple[int, ...]]:
    rows = [list(r) for r in A.rows]
    pivots = _gauss_jordan(A.field, rows, A.ncols)
    return Mat(A.field, rows, A.ncols), tuple(pivots)


def rank(A: Mat) -> int:
    rows = [list(r) for r in A.rows]
    return len(_gauss_jordan(A.field, rows, A.ncols, full=False))


def solve(A: Mat, B: Mat) -> Mat:
    """The unique X with A X = B.

    Raises NoSolution when B is outside the column space of A and
    Underdetermined when A has a nontrivial kernel.
    """
    if A.nrows != B.nrows:
        raise ShapeMismatch(f"A has {A.nrows} rows, B has {B.nrows}")
    F = common_field(A.field, B.field)
    n = A.ncols
    rows = [list(a) + list(b) for a, b in zip(A.rows, B.rows)]
    pivots = _gauss_jordan(F, rows, n)
    r = len(pivots)
    if any(any(row[n:]) for row in rows[r:]):
        raise NoSolution("right-hand side not in the column space")
    if r < n:
        raise Underdetermined(f"solution space has dimension {n - r} per column")
    return Mat(F, [row[n:] for row in rows[:n]], B.ncols)


def inverse(A: Mat) -> Mat:
    if A.nrows != A.ncols:
        raise ShapeMismatch("inverse of a non-square matrix")
    try:
        return solve(A, Mat.identity(A.field, A.nrows))
    except Underdetermined as exc:  # pragma: no cover - square case never lands here
        raise NoSolution("singular matrix") from exc


def is_invertible(A: Mat) -> bool:
    return A.nrows == A.ncols and rank(A) == A.nrows


def nullspace(A: Mat) -> Mat:
    """Rows form a basis of {x : A x = 0}."""
    R, pivots = rref_only(A)
    n = A.ncols
    F = A.field
    free = [c for c in range(n) if c not in pivots]
    basis = []
    for f in free:
        v = [0] * n
        v[f] = 1
        for i, c in enumerate(pivots):
            v[c] = F.neg(R.rows[i][f])
        basis.append(v)
    return Mat(F, basis, n)


def vandermonde(W: Mat, rows: int) -> Mat:
    """``rows`` x alpha matrix with entry (m, c) = W[c]^(m+1)."""
    if W.nrows != 1:
        raise ShapeMismatch("W must be a single row")
    F = W.field
    out = []
    cur = list(W.rows[0])
    for _ in range(rows):
        out.append(cur)
        cur = [F.mul(a, w) for a, w in zip(cur, W.rows[0])]
    return Mat(F, out, W.ncols)


def column_basis(Y: Mat) -> tuple[Mat, Mat, tuple[int, ...]]:
    """Y = Ys F with Ys the lowest-index independent columns of Y."""
    R, pivots = rref_only(Y)
    Ys = Y[:, list(pivots)]
    F = Mat(Y.field, R.rows[: len(pivots)], Y.ncols)
    return Ys, F, pivots


def row_basis(A: Mat) -> Mat:
    """Canonical RREF basis of the row space."""
    R, pivots = rref_only(A)
    return Mat(A.field, R.rows[: len(pivots)], A.ncols)
