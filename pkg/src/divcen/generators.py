"""Seeded random constructions of the six experiment graph families.

Every generator returns a bidirected simple Graph (each undirected edge
stored as both directed arcs, no self-loops) together with a two-community
AffiliationMatrix whose rows are (b, r) = (1 - r, r). Randomness comes
from NumPy's PCG64 (``numpy.random.default_rng``); one independent stream
is created per call, so identical seeds reproduce bit-identical output
for a given NumPy version. Callers needing many decorrelated runs should
pass ``numpy.random.SeedSequence`` children.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import BadParams
from .graphs import AffiliationMatrix, Graph, _graph_from_arrays

MODELS = (
    "fully-random",
    "preferential-attachment",
    "polarity-attachment",
    "change-local",
    "change-neighborhood",
    "nine-clusters",
)


def _rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def _bidirected_graph(n: int, iu: np.ndarray, ju: np.ndarray) -> Graph:
    """Materialize unique undirected pairs (iu < ju) as both directed arcs."""
    src = np.concatenate([iu, ju])
    dst = np.concatenate([ju, iu])
    return _graph_from_arrays(n, src, dst, dedup=False)


def _uniform_polarities(rng: np.random.Generator, n: int) -> np.ndarray:
    # open interval (0, 1): redraw the (measure-zero) exact zeros
    r = rng.random(n)
    while True:
        zeros = r == 0.0
        if not zeros.any():
            return r
        r[zeros] = rng.random(int(zeros.sum()))


def _affiliation_from_r(r: np.ndarray) -> AffiliationMatrix:
    return AffiliationMatrix(np.column_stack([1.0 - r, r]))


def _pair_indices(n: int) -> tuple[np.ndarray, np.ndarray]:
    return np.triu_indices(n, k=1)


def _fully_random(rng: np.random.Generator, n: int, e: float) -> tuple[Graph, AffiliationMatrix]:
    r = _uniform_polarities(rng, n)
    iu, ju = _pair_indices(n)
    keep = rng.random(len(iu)) < e
    return _bidirected_graph(n, iu[keep], ju[keep]), _affiliation_from_r(r)


def gen_fully_random(n: int = 1000, e: float = 0.2, seed=0) -> tuple[Graph, AffiliationMatrix]:
    """Erdos-Renyi style graph: each unordered pair kept with probability e."""
    if n < 1:
        raise BadParams(f"n must be >= 1, got {n}")
    if not 0.0 <= e <= 1.0:
        raise BadParams(f"edge probability must lie in [0, 1], got {e!r}")
    return _fully_random(_rng(seed), n, e)


def gen_preferential_attachment(n: int = 1000, m: int = 20, seed=0) -> tuple[Graph, AffiliationMatrix]:
    """Degree-proportional attachment starting from an m-clique.

    Each new node links to m distinct existing nodes, drawn one batch at a
    time with probability proportional to the degrees frozen at the start
    of its attachment step; duplicate draws are discarded and redrawn.
    """
    if n < 1:
        raise BadParams(f"n must be >= 1, got {n}")
    if not 1 <= m <= n:
        raise BadParams(f"attachment count m={m} must lie in [1, n={n}]")
    rng = _rng(seed)
    r = _uniform_polarities(rng, n)
    iu, ju = _pair_indices(m)
    srcs = [iu]
    dsts = [ju]
    deg = np.zeros(n, dtype=np.int64)
    deg[:m] = m - 1
    for i in range(m, n):
        cum = np.cumsum(deg[:i], dtype=np.float64)
        total = cum[-1]
        chosen: list[int] = []
        chosen_set: set[int] = set()
        if total == 0.0:
            # degenerate start (m = 1): no degree mass yet, attach uniformly
            chosen = list(rng.choice(i, size=m, replace=False))
        else:
            while len(chosen) < m:
                draws = np.searchsorted(cum, rng.random(m - len(chosen)) * total, side="right")
                for j in draws.tolist():
                    if j not in chosen_set:
                        chosen_set.add(j)
                        chosen.append(j)
        targets = np.asarray(chosen, dtype=np.int64)
        srcs.append(np.full(m, i, dtype=np.int64))
        dsts.append(targets)
        deg[i] = m
        deg[targets] += 1
    return (
        _bidirected_graph(n, np.concatenate(srcs), np.concatenate(dsts)),
        _affiliation_from_r(r),
    )


def _polarity_attachment(rng: np.random.Generator, n: int) -> tuple[Graph, AffiliationMatrix]:
    r = _uniform_polarities(rng, n)
    b = 1.0 - r
    iu, ju = _pair_indices(n)
    p = 0.5 * (r[iu] * r[ju] + b[iu] * b[ju])
    keep = rng.random(len(iu)) < p
    return _bidirected_graph(n, iu[keep], ju[keep]), _affiliation_from_r(r)


def gen_polarity_attachment(n: int = 1000, seed=0) -> tuple[Graph, AffiliationMatrix]:
    """Homophily graph: pair (i, j) connects with probability 0.5 (r_i r_j + b_i b_j)."""
    if n < 1:
        raise BadParams(f"n must be >= 1, got {n}")
    return _polarity_attachment(_rng(seed), n)


def gen_change_local_polarity(seed=0) -> tuple[Graph, AffiliationMatrix, tuple[np.ndarray, np.ndarray, np.ndarray]]:
    """2000-node fully-random graph with 600 nodes forced to fixed polarities.

    Of the 600 uniformly sampled nodes, 150 get r = 0.99 (V1), 300 get
    r = 0.5 (V2), and 150 get r = 0.01 (V3); the rest keep their uniform
    draws. Returns (graph, affiliations, (V1, V2, V3)) with sorted id arrays.
    """
    rng = _rng(seed)
    g, a = _fully_random(rng, 2000, 0.2)
    sample = rng.choice(2000, size=600, replace=False)
    v1, v2, v3 = sample[:150], sample[150:450], sample[450:]
    q = a.q.copy()
    q[v1] = (0.01, 0.99)
    q[v2] = (0.5, 0.5)
    q[v3] = (0.99, 0.01)
    return g, AffiliationMatrix(q), (np.sort(v1), np.sort(v2), np.sort(v3))


def gen_change_neighborhood_polarity(seed=0) -> tuple[Graph, AffiliationMatrix, np.ndarray]:
    """2000-node polarity-attachment graph with 600 nodes rebalanced to r = 0.5.

    Edges are drawn before the reassignment, so the rebalanced nodes keep
    the neighborhoods their original polarities induced; the edge set is
    identical to ``gen_polarity_attachment(2000, seed)``. Returns
    (graph, affiliations, V0) with V0 sorted.
    """
    rng = _rng(seed)
    g, a = _polarity_attachment(rng, 2000)
    v0 = rng.choice(2000, size=600, replace=False)
    q = a.q.copy()
    q[v0] = (0.5, 0.5)
    return g, AffiliationMatrix(q), np.sort(v0)


_NINE_ROWS = (50, 150, 450)
_NINE_ADJACENT = (
    ("A1", "B1"), ("B1", "C1"),
    ("A2", "B2"), ("B2", "C2"),
    ("A3", "B3"), ("B3", "C3"),
    ("B1", "B2"), ("B2", "B3"),
)


def gen_nine_clusters(seed=0) -> tuple[Graph, AffiliationMatrix, dict[str, np.ndarray]]:
    """Three rows of clusters A_k - B_k - C_k sized 50/150/450 per row.

    Pairs inside a cluster connect with probability 0.5 and pairs in
    adjacent clusters (A_k-B_k, B_k-C_k, plus the B1-B2 and B2-B3 spine)
    with 0.1; non-adjacent clusters never connect. B-column nodes are
    balanced (r = 0.5), all others draw r uniformly. Returns
    (graph, affiliations, {cluster name: id array}).
    """
    rng = _rng(seed)
    clusters: dict[str, np.ndarray] = {}
    start = 0
    for row, size in enumerate(_NINE_ROWS, start=1):
        for col in ("A", "B", "C"):
            clusters[f"{col}{row}"] = np.arange(start, start + size, dtype=np.int64)
            start += size
    n = start
    r = _uniform_polarities(rng, n)
    for row in (1, 2, 3):
        r[clusters[f"B{row}"]] = 0.5
    srcs: list[np.ndarray] = []
    dsts: list[np.ndarray] = []
    for name in sorted(clusters):
        ids = clusters[name]
        iu, ju = _pair_indices(len(ids))
        keep = rng.random(len(iu)) < 0.5
        srcs.append(ids[iu[keep]])
        dsts.append(ids[ju[keep]])
    for left, right in _NINE_ADJACENT:
        li, ri = clusters[left], clusters[right]
        pairs_l = np.repeat(li, len(ri))
        pairs_r = np.tile(ri, len(li))
        keep = rng.random(len(pairs_l)) < 0.1
        srcs.append(pairs_l[keep])
        dsts.append(pairs_r[keep])
    g = _bidirected_graph(n, np.concatenate(srcs), np.concatenate(dsts))
    return g, _affiliation_from_r(r), clusters


@dataclass(frozen=True)
class GenSpec:
    """Declarative generator request, mostly used by the CLI."""

    model: str
    n: int | None = None
    e: float | None = None
    m: int | None = None
    seed: int = 0

    def __post_init__(self):
        if self.model not in MODELS:
            raise BadParams(f"unknown model {self.model!r}; choose from {MODELS}")


def generate(spec: GenSpec) -> tuple[Graph, AffiliationMatrix, dict]:
    """Dispatch a GenSpec to its generator.

    Returns (graph, affiliations, extras); extras carries the model's node
    sets or cluster map when it has any, keyed by name.
    """
    model, seed = spec.model, spec.seed
    if model == "fully-random":
        g, a = gen_fully_random(spec.n if spec.n is not None else 1000,
                                spec.e if spec.e is not None else 0.2, seed)
        return g, a, {}
    if model == "preferential-attachment":
        g, a = gen_preferential_attachment(spec.n if spec.n is not None else 1000,
                                           spec.m if spec.m is not None else 20, seed)
        return g, a, {}
    if model == "polarity-attachment":
        g, a = gen_polarity_attachment(spec.n if spec.n is not None else 1000, seed)
        return g, a, {}
    if spec.n is not None or spec.e is not None or spec.m is not None:
        raise BadParams(f"model {model!r} takes no size parameters (its constants are fixed)")
    if model == "change-local":
        g, a, (v1, v2, v3) = gen_change_local_polarity(seed)
        return g, a, {"V1": v1, "V2": v2, "V3": v3}
    if model == "change-neighborhood":
        g, a, v0 = gen_change_neighborhood_polarity(seed)
        return g, a, {"V0": v0}
    g, a, clusters = gen_nine_clusters(seed)
    return g, a, dict(clusters)
