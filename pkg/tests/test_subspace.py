import random

import pytest
from hypothesis import given, settings, strategies as st

from maniac.errors import AmbientMismatch, MalformedInput
from maniac.ff_tower import Mat, PrimeField
from maniac.matrix import is_invertible, rank
from maniac.subspace import (
    Subspace, injection_distance, intersection_dim, rre_decompose, subspace_distance,
)

F2, F3, F7 = PrimeField(2), PrimeField(3), PrimeField(7)


def random_space(F, dim, n, r):
    while True:
        A = Mat.random(F, dim, n, r)
        if rank(A) == dim:
            return Subspace.span(A)


def invertible(F, n, r):
    while True:
        A = Mat.random(F, n, n, r)
        if is_invertible(A):
            return A


spaces = st.builds(
    lambda p, n, dims, seed: [Subspace.span(Mat.random(PrimeField(p), d, n, random.Random(seed + i)))
                              for i, d in enumerate(dims)],
    st.sampled_from([2, 3]), st.integers(1, 5), st.lists(st.integers(0, 4), min_size=3, max_size=3),
    st.integers(0, 2**31),
)


def test_distance_examples():
    U = Subspace.span(Mat(F2, [[1, 0]], 2))
    V = Subspace.span(Mat(F2, [[1, 1]], 2))
    assert subspace_distance(U, U) == 0
    assert injection_distance(U, U) == 0
    assert subspace_distance(U, V) == 2
    small = Subspace.span(Mat(F3, [[1, 0, 0, 0]], 4))
    big = Subspace.span(Mat(F3, [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0]], 4))
    assert injection_distance(small, big) == 2
    assert intersection_dim(small, big) == 1


def test_canonical_basis():
    r = random.Random(1)
    U = random_space(F7, 3, 5, r)
    A = invertible(F7, 3, r)
    assert Subspace.span(A @ U.basis) == U
    assert hash(Subspace.span(A @ U.basis)) == hash(U)
    assert Mat(F7, [U.basis.rows[0]], 5) in U


def test_ambient_mismatch():
    with pytest.raises(AmbientMismatch):
        subspace_distance(Subspace.span(Mat.identity(F2, 2)), Subspace.span(Mat.identity(F2, 3)))


@settings(max_examples=80, deadline=None)
@given(spaces)
def test_metric_axioms(triple):
    a, b, c = triple
    for d in (subspace_distance, injection_distance):
        assert d(a, a) == 0
        assert d(a, b) == d(b, a)
        assert d(a, c) <= d(a, b) + d(b, c)
        assert (d(a, b) == 0) == (a == b)


def test_equal_dimension_relation():
    r = random.Random(3)
    for _ in range(200):
        k = r.randint(1, 3)
        U, V = random_space(F3, k, 5, r), random_space(F3, k, 5, r)
        assert 2 * injection_distance(U, V) == subspace_distance(U, V)


def test_proposition_1_bound():
    r = random.Random(4)
    for _ in range(200):
        B1, B2 = Mat.random(F2, 3, 6, r), Mat.random(F2, 3, 6, r)
        if r.random() < 0.5:
            B2 = B1 + Mat(F2, [[1, 0, 0, 1, 0, 1]] + [[0] * 6] * 2, 6)
        assert subspace_distance(Subspace.span(B1), Subspace.span(B2)) <= 2 * rank(B1 - B2)


def test_rre_error_free():
    r = random.Random(5)
    C, w = 4, 5
    X = Mat.random(F7, C, w, r)
    Ya = invertible(F7, C, r) @ Mat.hstack(Mat.identity(F7, C), X)
    dec = rre_decompose(Ya, C)
    assert dec.T_rre == Mat.identity(F7, C)
    assert dec.mu == dec.delta == 0
    assert dec.r == X


def check_structure(dec, C):
    F = dec.r.field
    assert (dec.U.T @ dec.r).is_zero()
    assert dec.U.T @ dec.L_hat == Mat.identity(F, dec.mu).scale(F.p - 1)
    top = dec.T_rre[list(range(C)), :]
    assert top == Mat.identity(F, C) + dec.L_hat @ dec.U.T


def rank_one_instance(F, C, w, r, rows=None):
    """Y = A [I | X] + t e with a single injected row e; returns (Y, X)."""
    X = Mat.random(F, C, w, r)
    A = invertible(F, C, r)[: rows or C, :] if rows is None or rows <= C else Mat.random(F, rows, C, r)
    t = Mat.random(F, A.nrows, 1, r)
    e = Mat.random(F, 1, C + w, r)
    return A @ Mat.hstack(Mat.identity(F, C), X) + t @ e, X


def test_rre_rank_one_corruption_lemma():
    r = random.Random(6)
    C, w = 4, 4
    seen_side = 0
    for _ in range(300):
        Y, X = rank_one_instance(F3, C, w, r)
        dec = rre_decompose(Y, C)
        check_structure(dec, C)
        e = dec.r - X
        blk = Mat.hstack(dec.L_hat, e)
        if dec.delta:
            blk = Mat.vstack(blk, Mat.hstack(Mat.zeros(F3, dec.delta, dec.mu), dec.E_hat))
        tau = rank(blk)
        assert 2 * tau - dec.mu - dec.delta <= 2
        seen_side += (dec.mu + dec.delta) >= 1
    assert seen_side > 0


def test_rre_more_rows_than_c():
    r = random.Random(8)
    C, w = 3, 4
    for _ in range(50):
        Y, X = rank_one_instance(F7, C, w, r, rows=5)
        dec = rre_decompose(Y, C)
        check_structure(dec, C)
        assert Subspace.span(Mat.vstack(dec.T_rre.__class__.hstack(dec.T_rre, dec.M_rre))) == Subspace.span(Y)


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 5), st.integers(1, 4), st.integers(0, 3), st.integers(0, 2**31))
def test_rre_row_space_preserved(rows, C, w, seed):
    Y = Mat.random(F3, rows, C + w, random.Random(seed))
    dec = rre_decompose(Y, C)
    check_structure(dec, C)
    assert Subspace.span(Mat.hstack(dec.T_rre, dec.M_rre)) == Subspace.span(Y)


def test_rre_malformed():
    with pytest.raises(MalformedInput):
        rre_decompose(Mat.zeros(F2, 2, 2), 3)
