"""Directed-graph and community-affiliation containers, transforms, and file I/O.

Nodes are dense integer ids ``0..n-1``. Graphs are immutable after
construction and safe to share across threads.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Iterable, TextIO

import numpy as np
from scipy.sparse.csgraph import connected_components as _sparse_components
from scipy.sparse import csr_matrix

from .errors import (
    BadSimplex,
    DuplicateNode,
    MissingNode,
    OutOfRangeNode,
    ParseError,
)

logger = logging.getLogger(__name__)

SIMPLEX_ATOL = 1e-6       # tolerance on stored affiliation row sums
SIMPLEX_INPUT_ATOL = 1e-3  # looser tolerance accepted (then renormalized) on input


class Graph:
    """Immutable directed graph with per-node sorted out-adjacency.

    Adjacency is stored CSR-style: ``out_edges(i)`` is a read-only slice of
    the target array. Self-loops are representable but never produced by
    the generators in this package.
    """

    __slots__ = ("n", "_indptr", "_indices", "d")

    def __init__(self, n: int, indptr: np.ndarray, indices: np.ndarray):
        self.n = int(n)
        indptr = np.ascontiguousarray(indptr, dtype=np.int64)
        indices = np.ascontiguousarray(indices, dtype=np.int64)
        indptr.setflags(write=False)
        indices.setflags(write=False)
        self._indptr = indptr
        self._indices = indices
        d = np.diff(indptr)
        d.setflags(write=False)
        self.d = d

    @property
    def num_edges(self) -> int:
        return int(self._indptr[-1])

    def out_edges(self, i: int) -> np.ndarray:
        """Sorted targets of node ``i`` (read-only view)."""
        return self._indices[self._indptr[i]:self._indptr[i + 1]]

    def edge_arrays(self) -> tuple[np.ndarray, np.ndarray]:
        """All directed edges as parallel (src, dst) arrays, sorted by (src, dst)."""
        src = np.repeat(np.arange(self.n, dtype=np.int64), self.d)
        return src, self._indices

    def __eq__(self, other) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return (
            self.n == other.n
            and np.array_equal(self._indptr, other._indptr)
            and np.array_equal(self._indices, other._indices)
        )

    def __hash__(self):
        return hash((self.n, self.num_edges))

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, edges={self.num_edges})"


def _graph_from_arrays(n: int, src: np.ndarray, dst: np.ndarray, *, dedup: bool) -> Graph:
    """Assemble a Graph from parallel edge arrays, sorting per-node targets."""
    if len(src) == 0:
        return Graph(n, np.zeros(n + 1, dtype=np.int64), np.empty(0, dtype=np.int64))
    order = np.lexsort((dst, src))
    src = src[order]
    dst = dst[order]
    if dedup:
        keep = np.empty(len(src), dtype=bool)
        keep[0] = True
        np.logical_or(src[1:] != src[:-1], dst[1:] != dst[:-1], out=keep[1:])
        dropped = len(src) - int(keep.sum())
        if dropped:
            logger.debug("collapsed %d duplicate directed edges", dropped)
            src = src[keep]
            dst = dst[keep]
    counts = np.bincount(src, minlength=n)
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(counts, out=indptr[1:])
    return Graph(n, indptr, dst)


def build_graph(n: int, edges: Iterable[tuple[int, int]] | np.ndarray) -> Graph:
    """Build a graph from an edge list, collapsing duplicate directed edges.

    Raises OutOfRangeNode if any endpoint falls outside [0, n).
    """
    if n < 1:
        raise OutOfRangeNode(f"node count must be >= 1, got {n}")
    arr = np.asarray(list(edges) if not isinstance(edges, np.ndarray) else edges,
                     dtype=np.int64)
    if arr.size == 0:
        arr = arr.reshape(0, 2)
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise OutOfRangeNode("edges must be (src, dst) pairs")
    if arr.size and (arr.min() < 0 or arr.max() >= n):
        bad = arr[(arr < 0).any(axis=1) | (arr >= n).any(axis=1)][0]
        raise OutOfRangeNode(f"edge ({bad[0]}, {bad[1]}) outside [0, {n})")
    return _graph_from_arrays(n, arr[:, 0].copy(), arr[:, 1].copy(), dedup=True)


def patch_sinks(g: Graph) -> Graph:
    """Add out-edges from every zero-out-degree node to all other nodes.

    Leaves non-sink adjacency untouched; idempotent. A single-node graph
    is returned unchanged since it has no other node to point at.
    """
    sinks = np.flatnonzero(g.d == 0)
    if len(sinks) == 0 or g.n == 1:
        return g
    src, dst = g.edge_arrays()
    add_src = np.repeat(sinks, g.n - 1)
    others = np.arange(g.n, dtype=np.int64)
    add_dst = np.concatenate([others[others != s] for s in sinks])
    return _graph_from_arrays(
        g.n, np.concatenate([src, add_src]), np.concatenate([dst, add_dst]), dedup=False
    )


def symmetrize(g: Graph) -> Graph:
    """Return the graph with every edge present in both directions, self-loops removed."""
    src, dst = g.edge_arrays()
    keep = src != dst
    src, dst = src[keep], dst[keep]
    return _graph_from_arrays(
        g.n, np.concatenate([src, dst]), np.concatenate([dst, src]), dedup=True
    )


def largest_component(g: Graph) -> tuple[Graph, np.ndarray]:
    """Extract the largest weakly connected component.

    Returns the induced directed subgraph with nodes relabeled ``0..m-1``
    and the array mapping new ids back to original ids. Ties between
    equally sized components break toward the one containing the smallest
    original id.
    """
    src, dst = g.edge_arrays()
    adj = csr_matrix((np.ones(len(src), dtype=np.int8), (src, dst)), shape=(g.n, g.n))
    ncomp, labels = _sparse_components(adj, directed=True, connection="weak")
    if ncomp == 1:
        return g, np.arange(g.n, dtype=np.int64)
    sizes = np.bincount(labels, minlength=ncomp)
    keep_label = int(np.argmax(sizes))
    old_ids = np.flatnonzero(labels == keep_label).astype(np.int64)
    new_id = np.full(g.n, -1, dtype=np.int64)
    new_id[old_ids] = np.arange(len(old_ids))
    sel = (labels[src] == keep_label) & (labels[dst] == keep_label)
    sub = _graph_from_arrays(len(old_ids), new_id[src[sel]], new_id[dst[sel]], dedup=False)
    return sub, old_ids


@dataclass(frozen=True)
class AffiliationMatrix:
    """Per-node community membership weights.

    ``q`` has one row per node and one column per community; rows are
    nonnegative and sum to 1 within ``SIMPLEX_ATOL``. For two communities
    column 0 is blue (``b``) and column 1 is red (``r``).
    """

    q: np.ndarray

    def __post_init__(self):
        q = np.ascontiguousarray(self.q, dtype=np.float64)
        if q.ndim != 2 or q.shape[1] < 1:
            raise BadSimplex("affiliations must be a 2-D (n, K) array with K >= 1")
        if (q < 0).any():
            raise BadSimplex("affiliation weights must be nonnegative")
        sums = q.sum(axis=1)
        if np.abs(sums - 1.0).max(initial=0.0) > SIMPLEX_ATOL:
            i = int(np.argmax(np.abs(sums - 1.0)))
            raise BadSimplex(f"row {i} sums to {sums[i]!r}, expected 1")
        q.setflags(write=False)
        object.__setattr__(self, "q", q)

    @property
    def n(self) -> int:
        return self.q.shape[0]

    @property
    def k(self) -> int:
        return self.q.shape[1]

    @property
    def b(self) -> np.ndarray:
        """Blue-community weight per node (K = 2 only)."""
        self._require_two()
        return self.q[:, 0]

    @property
    def r(self) -> np.ndarray:
        """Red-community weight per node (K = 2 only)."""
        self._require_two()
        return self.q[:, 1]

    def _require_two(self):
        from .errors import WrongK

        if self.k != 2:
            raise WrongK(f"operation requires K=2 communities, got K={self.k}")


def _data_lines(stream: TextIO):
    """Yield (line_number, stripped_text) skipping blanks and '#' comments."""
    for lineno, raw in enumerate(stream, start=1):
        text = raw.strip()
        if not text or text.startswith("#"):
            continue
        yield lineno, text


def load_edge_list(stream: TextIO) -> tuple[int, np.ndarray]:
    """Parse "src,dst" lines into (node count, edge array in file order).

    The node count is one more than the largest id seen; an empty stream
    yields (0, empty). Malformed lines raise ParseError with the line number.
    """
    srcs: list[int] = []
    dsts: list[int] = []
    for lineno, text in _data_lines(stream):
        parts = text.split(",")
        if len(parts) != 2:
            raise ParseError(f"expected 'src,dst', got {text!r}", lineno)
        try:
            u, v = int(parts[0]), int(parts[1])
        except ValueError:
            raise ParseError(f"non-integer node id in {text!r}", lineno) from None
        if u < 0 or v < 0:
            raise ParseError(f"negative node id in {text!r}", lineno)
        srcs.append(u)
        dsts.append(v)
    if not srcs:
        return 0, np.empty((0, 2), dtype=np.int64)
    edges = np.column_stack([np.asarray(srcs, dtype=np.int64),
                             np.asarray(dsts, dtype=np.int64)])
    return int(edges.max()) + 1, edges


def load_affiliations(stream: TextIO, n: int, k: int = 2, mode: str = "scalar") -> AffiliationMatrix:
    """Parse an affiliation file covering every node ``0..n-1`` exactly once.

    Scalar mode reads "node,v" with v in [-1, 1] and maps it linearly to
    (b, r) = ((1-v)/2, (1+v)/2); it requires k == 2. Vector mode reads
    "node,q1,...,qK" rows, renormalizing each row whose sum is within
    ``SIMPLEX_INPUT_ATOL`` of 1 and rejecting anything further off.
    """
    if mode not in ("scalar", "vector"):
        raise ParseError(f"unknown affiliation mode {mode!r}")
    if mode == "scalar" and k != 2:
        raise BadSimplex("scalar affiliation files define exactly two communities")
    q = np.zeros((n, k), dtype=np.float64)
    seen = np.zeros(n, dtype=bool)
    for lineno, text in _data_lines(stream):
        parts = text.split(",")
        try:
            node = int(parts[0])
        except ValueError:
            raise ParseError(f"non-integer node id in {text!r}", lineno) from None
        if node < 0 or node >= n:
            raise ParseError(f"node id {node} outside [0, {n})", lineno)
        if seen[node]:
            raise DuplicateNode(f"node {node} listed twice (line {lineno})")
        seen[node] = True
        if mode == "scalar":
            if len(parts) != 2:
                raise ParseError(f"expected 'node,value', got {text!r}", lineno)
            try:
                v = float(parts[1])
            except ValueError:
                raise ParseError(f"non-numeric value in {text!r}", lineno) from None
            if not -1.0 <= v <= 1.0 or not np.isfinite(v):
                raise ParseError(f"scalar polarity {v!r} outside [-1, 1]", lineno)
            q[node, 0] = (1.0 - v) / 2.0
            q[node, 1] = (1.0 + v) / 2.0
        else:
            if len(parts) != k + 1:
                raise ParseError(f"expected {k} weights, got {len(parts) - 1}", lineno)
            try:
                row = np.array([float(x) for x in parts[1:]], dtype=np.float64)
            except ValueError:
                raise ParseError(f"non-numeric weight in {text!r}", lineno) from None
            if not np.isfinite(row).all() or (row < 0).any():
                raise BadSimplex(f"node {node}: weights must be finite and nonnegative")
            total = row.sum()
            if abs(total - 1.0) > SIMPLEX_INPUT_ATOL:
                raise BadSimplex(f"node {node}: row sums to {total!r}, expected 1")
            q[node] = row / total
    if not seen.all():
        raise MissingNode(f"node {int(np.flatnonzero(~seen)[0])} has no affiliation row")
    return AffiliationMatrix(q)


def write_edge_list(g: Graph, stream: TextIO) -> None:
    """Write "src,dst" lines in sorted (src, dst) order."""
    src, dst = g.edge_arrays()
    for u, v in zip(src.tolist(), dst.tolist()):
        stream.write(f"{u},{v}\n")


def write_affiliations(a: AffiliationMatrix, stream: TextIO) -> None:
    """Write "node,q1,...,qK" rows with round-trippable float formatting."""
    for i in range(a.n):
        weights = ",".join(repr(x) for x in a.q[i].tolist())
        stream.write(f"{i},{weights}\n")
