"""Instance builders shared by several test modules."""
import itertools

from maniac.ff_tower import Mat, unfold
from maniac.matrix import rank
from maniac.rank_metric import SideInfo


def error_instance(code, G, mu, delta, tau, cols, rng):
    """Random message plus an error of K-rank tau with mu known locations and delta known values.

    The error is Z = L E with L (m x tau over K) and E (tau x cols over L);
    columns 0..mu-1 of L and rows mu..mu+delta-1 of E are revealed.
    """
    Lf = code.field
    K = Lf.base
    X = Mat.random(Lf, code.R, cols, rng)
    while True:
        Lm = Mat.random(K, code.m, tau, rng)
        E = Mat.random(Lf, tau, cols, rng)
        Z = Lm @ E if tau else Mat.zeros(Lf, code.m, cols)
        if rank(unfold(Z)) == tau:
            break
    side = SideInfo(
        Lm[:, list(range(mu))] if mu else None,
        E[list(range(mu, mu + delta)), :] if delta else None,
    )
    return X, unfold(G @ X + Z), side


def rank_one_matrices(K, m, n):
    """Every rank-1 m x n matrix u v^T over the prime field K, each exactly once."""
    seen = set()
    vecs_u = [u for u in itertools.product(range(K.p), repeat=m) if any(u)]
    vecs_v = [v for v in itertools.product(range(K.p), repeat=n) if any(v)]
    for u in vecs_u:
        for v in vecs_v:
            key = tuple(tuple(K.mul(a, b) for b in v) for a in u)
            if key not in seen:
                seen.add(key)
                yield Mat(K, key, n)
