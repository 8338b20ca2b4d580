"""PageRank, diverse centrality via iterated best response, and reweighting baselines.

All solvers work in 64-bit floats; summations go through NumPy, whose
pairwise accumulation keeps the 1e-10 stopping tolerances meaningful at
the experiment sizes used here (n up to a few thousand).
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np
from scipy.sparse import csr_matrix

from .errors import BadParams, DegenerateMass, NonConvergence, SinkPresent, WrongK
from .graphs import AffiliationMatrix, Graph

logger = logging.getLogger(__name__)

F_CHOICES = ("min", "geomean", "l1")
_F_ALIASES = {
    "min": "min",
    "minimum": "min",
    "geomean": "geomean",
    "geometric-mean": "geomean",
    "l1": "l1",
}


def canonical_f(name: str) -> str:
    try:
        return _F_ALIASES[name]
    except KeyError:
        raise BadParams(f"unknown aggregator {name!r}; choose from {F_CHOICES}") from None


@dataclass(frozen=True)
class SolverConfig:
    """Shared fixed-point solver settings.

    ``f_choice`` selects the concave per-node aggregator over community
    scores: "min" (the default used throughout the experiments),
    "geomean", or "l1" (plain sum, which collapses diverse centrality to
    PageRank). ``init`` is "uniform" or "random"; random starts draw
    i.i.d. uniforms from a PCG64 stream seeded with ``init_seed`` and
    L1-normalize them.
    """

    damping: float = 0.85
    epsilon: float = 1e-10
    f_choice: str = "min"
    max_iters: int = 10_000
    init: str = "uniform"
    init_seed: int = 0

    def __post_init__(self):
        if not 0.0 < self.damping < 1.0:
            raise BadParams(f"damping must lie in (0, 1), got {self.damping!r}")
        if self.epsilon <= 0.0:
            raise BadParams("epsilon must be positive")
        if self.max_iters < 1:
            raise BadParams("max_iters must be >= 1")
        object.__setattr__(self, "f_choice", canonical_f(self.f_choice))
        if self.init not in ("uniform", "random"):
            raise BadParams(f"init must be 'uniform' or 'random', got {self.init!r}")


@dataclass(frozen=True)
class SolverReport:
    """Convergence evidence for one solver call."""

    iterations: int
    converged: bool
    final_l1_delta: float
    per_iteration_delta: list[float] = field(default_factory=list)


@dataclass(frozen=True)
class NeighborPolarity:
    """Summed red/blue affiliation over each node's in- and out-neighbors."""

    R: np.ndarray
    B: np.ndarray


def apply_f(f_choice: str, x) -> float:
    """Aggregate a K-vector of nonnegative community scores into a scalar."""
    x = np.asarray(x, dtype=np.float64)
    f = canonical_f(f_choice)
    if f == "min":
        return float(x.min())
    if f == "geomean":
        return float(np.prod(x) ** (1.0 / len(x)))
    return float(x.sum())


def _f_rows(f_choice: str, x: np.ndarray) -> np.ndarray:
    """Row-wise version of apply_f for an (n, K) matrix."""
    if f_choice == "min":
        return x.min(axis=1)
    if f_choice == "geomean":
        k = x.shape[1]
        with np.errstate(divide="ignore"):
            return np.exp(np.log(x).sum(axis=1) / k)
    return x.sum(axis=1)


def _in_weight_matrix(g: Graph) -> csr_matrix:
    """Sparse P with P[i, j] = 1/d_j for every edge (j, i); rejects sinks."""
    if (g.d == 0).any():
        sink = int(np.flatnonzero(g.d == 0)[0])
        raise SinkPresent(f"node {sink} has no out-edges; patch_sinks first")
    src, dst = g.edge_arrays()
    inv_d = 1.0 / g.d.astype(np.float64)
    return csr_matrix((inv_d[src], (dst, src)), shape=(g.n, g.n))


def _init_vector(n: int, cfg: SolverConfig) -> np.ndarray:
    if cfg.init == "uniform":
        return np.full(n, 1.0 / n)
    rng = np.random.default_rng(cfg.init_seed)
    s = rng.random(n)
    total = s.sum()
    while total == 0.0:  # unreachable in practice; keeps the contract airtight
        s = rng.random(n)
        total = s.sum()
    return s / total


def pagerank(g: Graph, cfg: SolverConfig | None = None) -> tuple[np.ndarray, SolverReport]:
    """Power-iterate the damped random-walk map to its stationary scores.

    Requires a sink-free graph. Returns L1-normalized scores and a report;
    raises NonConvergence if ``cfg.max_iters`` updates never bring the L1
    change below ``cfg.epsilon``.
    """
    cfg = cfg or SolverConfig()
    P = _in_weight_matrix(g)
    n = g.n
    restart = (1.0 - cfg.damping) / n
    s = _init_vector(n, cfg)
    deltas: list[float] = []
    for it in range(1, cfg.max_iters + 1):
        s_new = restart + cfg.damping * (P @ s)
        delta = float(np.abs(s_new - s).sum())
        deltas.append(delta)
        s = s_new
        if delta <= cfg.epsilon:
            return s, SolverReport(it, True, delta, deltas)
    raise NonConvergence(
        f"pagerank: L1 delta {deltas[-1]:.3e} > {cfg.epsilon:.1e} after {cfg.max_iters} iterations"
    )


def diverse_centrality(
    g: Graph, a: AffiliationMatrix, cfg: SolverConfig | None = None
) -> tuple[np.ndarray, SolverReport]:
    """Iterate the concave best-response map to its normalized fixed point.

    Each update scores node i per community as the damped restart mass
    (1-p) q_i / n plus p times the community-weighted incoming score mass,
    aggregates across communities with ``cfg.f_choice``, and renormalizes
    to the simplex. Stops when successive vectors differ by at most
    ``cfg.epsilon`` in L1.

    Raises SinkPresent, NonConvergence, or DegenerateMass (all aggregated
    scores zero, possible only when some affiliation entries are exactly
    zero).
    """
    cfg = cfg or SolverConfig()
    if a.n != g.n:
        raise BadParams(f"affiliations cover {a.n} nodes, graph has {g.n}")
    P = _in_weight_matrix(g)
    n = g.n
    q = a.q
    restart = (1.0 - cfg.damping) / n * q
    s = _init_vector(n, cfg)
    deltas: list[float] = []
    for it in range(1, cfg.max_iters + 1):
        incoming = P @ (s[:, None] * q)
        t = _f_rows(cfg.f_choice, restart + cfg.damping * incoming)
        total = t.sum()
        if total <= 0.0:
            raise DegenerateMass(f"all aggregated scores vanished at iteration {it}")
        s_new = t / total
        delta = float(np.abs(s_new - s).sum())
        deltas.append(delta)
        s = s_new
        if delta <= cfg.epsilon:
            return s, SolverReport(it, True, delta, deltas)
    raise NonConvergence(
        f"diverse centrality: L1 delta {deltas[-1]:.3e} > {cfg.epsilon:.1e} "
        f"after {cfg.max_iters} iterations"
    )


def neighbor_polarity(g: Graph, a: AffiliationMatrix) -> NeighborPolarity:
    """Per-node red/blue mass summed over in-neighbors plus out-neighbors.

    A neighbor on both sides of a node contributes once per direction, and
    self-loops are excluded. Requires K = 2.
    """
    if a.k != 2:
        raise WrongK(f"neighbor polarity requires K=2, got K={a.k}")
    src, dst = g.edge_arrays()
    keep = src != dst
    src, dst = src[keep], dst[keep]
    r, b = a.r, a.b
    R = np.bincount(dst, weights=r[src], minlength=g.n)
    R += np.bincount(src, weights=r[dst], minlength=g.n)
    B = np.bincount(dst, weights=b[src], minlength=g.n)
    B += np.bincount(src, weights=b[dst], minlength=g.n)
    return NeighborPolarity(R=R, B=B)


def _renormalize(weighted: np.ndarray) -> np.ndarray:
    total = weighted.sum()
    if total <= 0.0:
        raise DegenerateMass("all reweighted scores are zero")
    return weighted / total


def reweight_node_bias(s: np.ndarray, a: AffiliationMatrix) -> np.ndarray:
    """Reweight scores by each node's own balance min(r_i, b_i), renormalized."""
    if a.k != 2:
        raise WrongK(f"node-bias reweighting requires K=2, got K={a.k}")
    return _renormalize(np.asarray(s, dtype=np.float64) * np.minimum(a.r, a.b))


def reweight_neighbor_bias(s: np.ndarray, g: Graph, a: AffiliationMatrix) -> np.ndarray:
    """Reweight scores by neighborhood balance min(R, B) / (R + B), renormalized.

    Isolated nodes (R + B = 0) get weight zero.
    """
    pol = neighbor_polarity(g, a)
    total = pol.R + pol.B
    w = np.zeros(g.n)
    np.divide(np.minimum(pol.R, pol.B), total, out=w, where=total > 0)
    return _renormalize(np.asarray(s, dtype=np.float64) * w)
