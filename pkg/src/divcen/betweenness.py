"""Betweenness centrality and its community-pair-weighted variant.

Both measures run Brandes-style dependency accumulation for all sources at
once using dense level-synchronous matrix sweeps, which keeps the per-pair
weighting cheap. Memory is O(n^2); shortest-path counts live in float64,
which is exact for the short-diameter graphs this package targets.
"""

from __future__ import annotations

import numpy as np

from .errors import WrongK
from .graphs import AffiliationMatrix, Graph


def _dense_adjacency(g: Graph) -> np.ndarray:
    src, dst = g.edge_arrays()
    A = np.zeros((g.n, g.n))
    A[src, dst] = 1.0
    np.fill_diagonal(A, 0.0)  # self-loops never lie on a shortest path
    return A


def _distances_and_counts(A: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """All-pairs BFS distances L and shortest-path counts NSP via walk matrices."""
    n = A.shape[0]
    L = np.full((n, n), np.inf)
    np.fill_diagonal(L, 0.0)
    NSP = np.eye(n)
    walks = A.copy()  # walks[s, v] = number of length-d walks s -> v
    d = 1
    while True:
        new = walks * np.isinf(L)
        if not new.any():
            break
        found = new > 0
        L[found] = d
        NSP += new
        d += 1
        walks = walks @ A
    return L, NSP


def _accumulate(A: np.ndarray, L: np.ndarray, NSP: np.ndarray, W: np.ndarray) -> np.ndarray:
    """Back-propagate pair dependencies seeded with per-target weights W[s, t]."""
    n = A.shape[0]
    DP = np.zeros((n, n))
    finite = L[np.isfinite(L)]
    diam = int(finite.max()) if finite.size else 0
    for d in range(diam, 1, -1):
        at_d = L == d
        coeff = np.zeros((n, n))
        np.divide(W + DP, NSP, out=coeff, where=at_d)
        DP += (coeff @ A.T) * (L == d - 1) * NSP
    return DP.sum(axis=0)


def betweenness(g: Graph) -> np.ndarray:
    """Betweenness over ordered (s, t) pairs, s != t, endpoints excluded.

    Unreachable pairs contribute nothing. Scores are unnormalized
    dependency sums.
    """
    A = _dense_adjacency(g)
    L, NSP = _distances_and_counts(A)
    return _accumulate(A, L, NSP, np.ones((g.n, g.n)))


def diverse_betweenness(g: Graph, a: AffiliationMatrix) -> np.ndarray:
    """Betweenness with each (s, t) pair weighted by |r_s - r_t|.

    The weight multiplies the pair-dependency seed at each target before
    back-propagation, so the result equals the definitional sum of
    delta_st(v) * |r_s - r_t|. Requires K = 2.
    """
    if a.k != 2:
        raise WrongK(f"diverse betweenness requires K=2, got K={a.k}")
    A = _dense_adjacency(g)
    L, NSP = _distances_and_counts(A)
    r = a.r
    W = np.abs(r[:, None] - r[None, :])
    return _accumulate(A, L, NSP, W)
