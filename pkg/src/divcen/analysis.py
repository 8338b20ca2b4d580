"""Measurement layer: score bucketing, Welch's t-test, spectral bipartition,
top-k ranking, and cut-edge counting."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.sparse import csr_matrix
from scipy.special import betainc

from .centrality import SolverConfig, diverse_centrality
from .errors import (
    BadK,
    BadParams,
    DegenerateRange,
    Disconnected,
    NonConvergence,
    NotSymmetric,
    TooFewSamples,
)
from .graphs import AffiliationMatrix, Graph, symmetrize

P_VALUE_FLOOR = 1e-300  # avoids subnormal underflow in reports

BALANCED_LO = 0.45
BALANCED_HI = 0.55


@dataclass(frozen=True)
class BucketAssignment:
    """Equal-width 15-interval split with the extreme fives merged into 7 buckets."""

    edges: np.ndarray           # the 8 bucket boundaries, strictly increasing
    member_buckets: np.ndarray  # bucket index in 0..6 per analyzed node, input order


@dataclass(frozen=True)
class TTestResult:
    t: float
    df: float
    p_value: float
    mean_diff: float


@dataclass(frozen=True)
class Bipartition:
    label: np.ndarray  # per-node cluster id in {0, 1}


def bucketize(scores: np.ndarray, analyzed: np.ndarray) -> BucketAssignment:
    """Assign each analyzed node to one of 7 merged equal-width score buckets.

    The range [min, max] over the analyzed nodes splits into 15 equal
    intervals, half-open on the right except the last; intervals 1-5 merge
    into bucket 0, 6-10 map to buckets 1-5, and 11-15 merge into bucket 6.
    Raises DegenerateRange when all analyzed scores coincide.
    """
    analyzed = np.asarray(analyzed, dtype=np.int64)
    if analyzed.size == 0:
        raise BadParams("analyzed node set is empty")
    vals = np.asarray(scores, dtype=np.float64)[analyzed]
    if not np.isfinite(vals).all():
        raise BadParams("scores must be finite")
    lo, hi = float(vals.min()), float(vals.max())
    if hi == lo:
        raise DegenerateRange("all analyzed scores are equal")
    width = (hi - lo) / 15.0
    raw = np.floor((vals - lo) / width).astype(np.int64)
    np.clip(raw, 0, 14, out=raw)  # closes the last interval at the maximum
    buckets = np.where(raw <= 4, 0, np.where(raw >= 10, 6, raw - 4))
    edges = np.concatenate([[lo], lo + width * np.arange(5, 11), [hi]])
    return BucketAssignment(edges=edges, member_buckets=buckets)


def welch_t_test(a, b) -> TTestResult:
    """Two-sided Welch's t-test with Welch-Satterthwaite degrees of freedom.

    The p-value comes from the Student-t survival function evaluated via
    the regularized incomplete beta function. Two degenerate zero-variance
    cases are handled rather than rejected: equal means give (t=0, p=1),
    distinct means give (t=+/-inf, p=0).
    """
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.size < 2 or b.size < 2:
        raise TooFewSamples(f"need >= 2 observations per sample, got {a.size} and {b.size}")
    na, nb = a.size, b.size
    mean_diff = float(a.mean() - b.mean())
    va = float(a.var(ddof=1)) / na
    vb = float(b.var(ddof=1)) / nb
    pooled = va + vb
    if pooled == 0.0:
        if mean_diff == 0.0:
            return TTestResult(t=0.0, df=float(na + nb - 2), p_value=1.0, mean_diff=0.0)
        t = float(np.copysign(np.inf, mean_diff))
        return TTestResult(t=t, df=float(na + nb - 2), p_value=0.0, mean_diff=mean_diff)
    t = mean_diff / np.sqrt(pooled)
    df = pooled**2 / (va**2 / (na - 1) + vb**2 / (nb - 1))
    # P(|T| >= |t|) = I_{df/(df+t^2)}(df/2, 1/2)
    p = float(betainc(df / 2.0, 0.5, df / (df + t * t)))
    p = min(1.0, max(p, P_VALUE_FLOOR))
    return TTestResult(t=float(t), df=float(df), p_value=p, mean_diff=mean_diff)


def _check_symmetric(g: Graph) -> None:
    src, dst = g.edge_arrays()
    if (src == dst).any():
        raise NotSymmetric("graph has self-loops; run symmetrize() first")
    fwd = src * g.n + dst
    rev = dst * g.n + src
    if not np.array_equal(np.sort(fwd), np.sort(rev)):
        raise NotSymmetric("edge (i, j) present without (j, i); run symmetrize() first")


def _check_connected(g: Graph) -> None:
    # BFS over the (already symmetric) adjacency
    seen = np.zeros(g.n, dtype=bool)
    seen[0] = True
    frontier = np.array([0], dtype=np.int64)
    while frontier.size:
        nxt = np.unique(np.concatenate([g.out_edges(i) for i in frontier.tolist()]))
        nxt = nxt[~seen[nxt]]
        seen[nxt] = True
        frontier = nxt
    if not seen.all():
        raise Disconnected(f"{int((~seen).sum())} nodes unreachable from node 0")


def spectral_bipartition(
    g: Graph,
    *,
    tol: float = 1e-8,
    max_iters: int = 200_000,
    seed: int = 0,
) -> Bipartition:
    """Split a symmetrized connected graph by the sign of its Fiedler vector.

    The Fiedler vector of the symmetric normalized Laplacian
    L = I - D^{-1/2} A D^{-1/2} is found by power iteration on
    (I - L/2), deflated against the known top eigenvector D^{1/2} 1,
    run until the L-residual ||L v - lambda v||_2 drops below ``tol``.
    Zero entries land in cluster 0. Raises NotSymmetric, Disconnected, or
    NonConvergence (degenerate spectra with no gap can stall the iteration).
    """
    if g.n < 2:
        raise BadParams("bipartition needs at least 2 nodes")
    _check_symmetric(g)
    _check_connected(g)
    src, dst = g.edge_arrays()
    A = csr_matrix((np.ones(len(src)), (src, dst)), shape=(g.n, g.n))
    deg = g.d.astype(np.float64)  # symmetric, so out-degree = total degree
    inv_sqrt = 1.0 / np.sqrt(deg)
    top = np.sqrt(deg)
    top /= np.linalg.norm(top)

    def apply_m(x: np.ndarray) -> np.ndarray:
        # M = (I + D^{-1/2} A D^{-1/2}) / 2, spectrum in [0, 1], top pair (1, D^{1/2} 1)
        return 0.5 * (x + inv_sqrt * (A @ (inv_sqrt * x)))

    rng = np.random.default_rng(seed)
    x = rng.standard_normal(g.n)
    x -= (top @ x) * top
    norm = np.linalg.norm(x)
    if norm == 0.0:
        x = np.arange(g.n) - (g.n - 1) / 2.0
        x -= (top @ x) * top
        norm = np.linalg.norm(x)
    x /= norm
    for _ in range(max_iters):
        y = apply_m(x)
        y -= (top @ y) * top  # deflation also scrubs float drift
        theta = float(x @ y)
        # residual transfers to L as ||L x - (2 - 2 theta) x|| = 2 ||M x - theta x||
        if 2.0 * float(np.linalg.norm(y - theta * x)) <= tol:
            break
        norm = np.linalg.norm(y)
        if norm == 0.0:
            raise NonConvergence("power iteration collapsed to the zero vector")
        x = y / norm
    else:
        raise NonConvergence(f"Fiedler residual above {tol:.1e} after {max_iters} iterations")
    if x[int(np.argmax(np.abs(x)))] < 0:
        x = -x
    return Bipartition(label=(x > 0).astype(np.int64))


def rank_top_k(scores: np.ndarray, k: int) -> np.ndarray:
    """Top k node ids by descending score, ties broken by ascending id."""
    scores = np.asarray(scores, dtype=np.float64)
    n = scores.size
    if not 1 <= k <= n:
        raise BadK(f"k={k} outside [1, {n}]")
    order = np.lexsort((np.arange(n), -scores))
    return order[:k].astype(np.int64)


def cut_edges_topk(g: Graph, part: Bipartition, top: np.ndarray) -> int:
    """Count unordered cross-cluster node pairs inside ``top`` joined by an edge."""
    top = np.asarray(top, dtype=np.int64)
    in_top = np.zeros(g.n, dtype=bool)
    in_top[top] = True
    src, dst = g.edge_arrays()
    sel = in_top[src] & in_top[dst] & (src != dst)
    u, v = src[sel], dst[sel]
    pairs = np.unique(np.minimum(u, v) * g.n + np.maximum(u, v))
    lo, hi = pairs // g.n, pairs % g.n
    return int((part.label[lo] != part.label[hi]).sum())


def neighborhood_ratio(R: np.ndarray, B: np.ndarray) -> np.ndarray:
    """R / (R + B) per node; isolated nodes (R + B = 0) yield NaN."""
    total = R + B
    out = np.full(len(R), np.nan)
    np.divide(R, total, out=out, where=total > 0)
    return out


def balanced_neighborhood(R: np.ndarray, B: np.ndarray) -> np.ndarray:
    """True where the red share of the neighborhood lies in [0.45, 0.55].

    Isolated nodes classify as not balanced.
    """
    ratio = neighborhood_ratio(R, B)
    with np.errstate(invalid="ignore"):
        return (ratio >= BALANCED_LO) & (ratio <= BALANCED_HI)


def compare_inits(
    g: Graph,
    a: AffiliationMatrix,
    cfg: SolverConfig,
    seeds,
) -> tuple[float, float]:
    """Solve from the uniform start and from each seeded random start.

    Returns the worst-case and mean per-node absolute score difference
    between the uniform-start solution and the random-start ones.
    Propagates solver errors.
    """
    base_cfg = SolverConfig(
        damping=cfg.damping, epsilon=cfg.epsilon, f_choice=cfg.f_choice,
        max_iters=cfg.max_iters, init="uniform",
    )
    s_uniform, _ = diverse_centrality(g, a, base_cfg)
    max_diff = 0.0
    mean_diffs = []
    for seed in seeds:
        rand_cfg = SolverConfig(
            damping=cfg.damping, epsilon=cfg.epsilon, f_choice=cfg.f_choice,
            max_iters=cfg.max_iters, init="random", init_seed=int(seed),
        )
        s_rand, _ = diverse_centrality(g, a, rand_cfg)
        diff = np.abs(s_rand - s_uniform)
        max_diff = max(max_diff, float(diff.max()))
        mean_diffs.append(float(diff.mean()))
    return max_diff, float(np.mean(mean_diffs)) if mean_diffs else 0.0
