"""Directed weighted graphs: construction, generators, and read-only views.

Graphs are immutable once built.  Edges are stored as flat arrays sorted by
(source, destination); forward and reverse CSR indexes are prepared at
construction so traversal code never has to search.
"""

from __future__ import annotations

from collections.abc import Iterable

import numpy as np

from ._kernels import knn_select
from .errors import InvariantError, ParameterError, ParseError


class WeightedDigraph:
    """Immutable directed graph with one float weight per ordered node pair.

    Invariants enforced at construction: node ids are dense 0..n-1, no
    self-loops, at most one edge per ordered pair.  Weight *values* are not
    constrained here; use :func:`clamp_weights` to force them into [0, 1].
    """

    __slots__ = ("n_nodes", "src", "dst", "weight", "_out_indptr", "_out_dst32",
                 "_in_indptr", "_in_src", "_in_src32", "_in_w", "_in_order")

    def __init__(self, n_nodes: int, src, dst, weight):
        n_nodes = int(n_nodes)
        if n_nodes < 1:
            raise ParameterError(f"graph needs at least one node, got {n_nodes}")
        src = np.ascontiguousarray(src, dtype=np.int64)
        dst = np.ascontiguousarray(dst, dtype=np.int64)
        weight = np.ascontiguousarray(weight, dtype=np.float64)
        if not (src.shape == dst.shape == weight.shape) or src.ndim != 1:
            raise ParameterError("src, dst and weight must be 1-D arrays of equal length")
        if src.size:
            if src.min() < 0 or max(src.max(), dst.max()) >= n_nodes or dst.min() < 0:
                raise InvariantError("edge endpoint outside 0..n_nodes-1")
            if np.any(src == dst):
                raise InvariantError("self-loop edges are not allowed")
        # canonical order: by source, then destination
        order = np.lexsort((dst, src))
        src, dst, weight = src[order], dst[order], weight[order]
        if src.size > 1:
            same = (src[1:] == src[:-1]) & (dst[1:] == dst[:-1])
            if np.any(same):
                raise InvariantError("duplicate edge for an ordered node pair")

        self.n_nodes = n_nodes
        self.src, self.dst, self.weight = src, dst, weight
        self._out_indptr = np.zeros(n_nodes + 1, dtype=np.int64)
        np.cumsum(np.bincount(src, minlength=n_nodes), out=self._out_indptr[1:])
        # reverse view sorted by (destination, source)
        self._in_order = np.lexsort((src, dst))
        self._in_src = np.ascontiguousarray(src[self._in_order])
        self._in_w = np.ascontiguousarray(weight[self._in_order])
        self._in_indptr = np.zeros(n_nodes + 1, dtype=np.int64)
        np.cumsum(np.bincount(dst, minlength=n_nodes), out=self._in_indptr[1:])
        # int32 copies keep the traversal kernels' memory traffic down
        self._out_dst32 = dst.astype(np.int32)
        self._in_src32 = self._in_src.astype(np.int32)
        for a in (self.src, self.dst, self.weight, self._out_indptr, self._out_dst32,
                  self._in_order, self._in_src, self._in_src32, self._in_w, self._in_indptr):
            a.flags.writeable = False

    @classmethod
    def from_edges(cls, n_nodes: int, edges: Iterable[tuple[int, int, float]]) -> "WeightedDigraph":
        """Build from an iterable of (src, dst, weight) triples."""
        triples = list(edges)
        if triples:
            s, d, w = zip(*triples)
        else:
            s, d, w = (), (), ()
        return cls(n_nodes, np.array(s, dtype=np.int64), np.array(d, dtype=np.int64),
                   np.array(w, dtype=np.float64))

    @property
    def n_edges(self) -> int:
        return int(self.src.size)

    def edges(self) -> list[tuple[int, int, float]]:
        """All edges as (src, dst, weight), sorted by (src, dst)."""
        return [(int(s), int(d), float(w)) for s, d, w in zip(self.src, self.dst, self.weight)]

    def out_neighbors(self, i: int) -> tuple[np.ndarray, np.ndarray]:
        """Destinations and weights of edges leaving node ``i`` (ascending id)."""
        self._check_node(i)
        lo, hi = self._out_indptr[i], self._out_indptr[i + 1]
        return self.dst[lo:hi], self.weight[lo:hi]

    def out_degree(self, i: int) -> int:
        self._check_node(i)
        return int(self._out_indptr[i + 1] - self._out_indptr[i])

    def _check_node(self, i: int) -> None:
        if not 0 <= i < self.n_nodes:
            raise IndexError(f"node {i} out of range for graph with {self.n_nodes} nodes")

    def in_csr(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Reverse adjacency as (indptr, sources, weights); sources ascend per node."""
        return self._in_indptr, self._in_src, self._in_w

    def out_csr(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Forward adjacency as (indptr, destinations, weights)."""
        return self._out_indptr, self.dst, self.weight

    def _kernel_csr(self) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
        """Compact views handed to the numba spreading kernel."""
        return self._out_indptr, self._out_dst32, self._in_indptr, self._in_src32, self._in_w

    def __repr__(self) -> str:  # pragma: no cover
        return f"WeightedDigraph(n_nodes={self.n_nodes}, n_edges={self.n_edges})"


def in_neighbors(g: WeightedDigraph, z: int) -> list[tuple[int, float]]:
    """Pairs (x, w) for every edge x -> z, sorted by ascending x."""
    g._check_node(z)
    indptr, srcs, ws = g.in_csr()
    lo, hi = indptr[z], indptr[z + 1]
    return [(int(x), float(w)) for x, w in zip(srcs[lo:hi], ws[lo:hi])]


def clamp_weights(g: WeightedDigraph) -> WeightedDigraph:
    """Return a copy of ``g`` with every weight clipped into [0, 1]."""
    return WeightedDigraph(g.n_nodes, g.src, g.dst, np.clip(g.weight, 0.0, 1.0))


def prune_zero_edges(g: WeightedDigraph) -> WeightedDigraph:
    """Return a copy of ``g`` without the edges whose weight is exactly zero."""
    keep = g.weight != 0.0
    return WeightedDigraph(g.n_nodes, g.src[keep], g.dst[keep], g.weight[keep])


def reachable_set(g: WeightedDigraph, i: int) -> set[int]:
    """Nodes reachable from ``i`` along directed edges, ``i`` included."""
    g._check_node(i)
    seen = np.zeros(g.n_nodes, dtype=bool)
    seen[i] = True
    stack = [i]
    while stack:
        x = stack.pop()
        for z in g.out_neighbors(x)[0]:
            if not seen[z]:
                seen[z] = True
                stack.append(int(z))
    return {int(j) for j in np.nonzero(seen)[0]}


def make_rectilinear(n: int, mode: str = "one-directional", w: float = 1.0) -> WeightedDigraph:
    """Chain graph on ``n`` nodes: edges i -> i+1, plus the reverse edges
    when ``mode`` is "bi-directional".  All edges carry weight ``w``."""
    if n < 1:
        raise ParameterError(f"rectilinear graph needs n >= 1, got {n}")
    if mode not in ("one-directional", "bi-directional"):
        raise ParameterError(f"unknown rectilinear mode {mode!r}")
    fwd = np.arange(n - 1, dtype=np.int64)
    src, dst = fwd, fwd + 1
    if mode == "bi-directional":
        src = np.concatenate([src, fwd + 1])
        dst = np.concatenate([dst, fwd])
    return WeightedDigraph(n, src, dst, np.full(src.size, float(w)))


def make_circle(n: int, w: float = 1.0) -> WeightedDigraph:
    """Directed ring on ``n`` nodes: edges i -> (i+1) mod n, weight ``w``."""
    if n < 2:
        raise ParameterError(f"circle graph needs n >= 2, got {n}")
    src = np.arange(n, dtype=np.int64)
    dst = (src + 1) % n
    return WeightedDigraph(n, src, dst, np.full(n, float(w)))


def pairwise_distances(points: np.ndarray, metric: str = "euclidean",
                       box_side: float | None = None) -> np.ndarray:
    """Dense distance matrix for 2-D points, plain or wrap-around."""
    points = np.asarray(points, dtype=np.float64)
    diff = np.abs(points[:, None, :] - points[None, :, :])
    if metric == "torus":
        if box_side is None or box_side <= 0:
            raise ParameterError("torus metric requires a positive box_side")
        diff = np.minimum(diff, box_side - diff)
    elif metric != "euclidean":
        raise ParameterError(f"unknown metric {metric!r}")
    return np.sqrt(np.einsum("ijk,ijk->ij", diff, diff))


def velocity_cosines(velocities: np.ndarray) -> np.ndarray:
    """Matrix of cos(angle) between every pair of velocity vectors."""
    v = np.asarray(velocities, dtype=np.float64)
    norms = np.sqrt(np.einsum("ij,ij->i", v, v))
    if np.any(norms == 0.0):
        bad = int(np.nonzero(norms == 0.0)[0][0])
        raise ParameterError(f"velocity of point {bad} is zero; direction undefined")
    unit = v / norms[:, None]
    return unit @ unit.T


def build_knn_graph(positions: np.ndarray, velocities: np.ndarray, k: int,
                    metric: str = "euclidean",
                    box_side: float | None = None) -> WeightedDigraph:
    """K-nearest-neighbor digraph over moving points.

    Node i gets exactly k out-edges to its k spatially nearest neighbors
    (distance ties broken by ascending id).  The weight on edge i -> j is the
    cosine of the angle between the two velocities, floored at zero, so
    weights land in [0, 1].  Zero-weight edges are kept.
    """
    positions = np.asarray(positions, dtype=np.float64)
    velocities = np.asarray(velocities, dtype=np.float64)
    if positions.ndim != 2 or positions.shape[1] != 2:
        raise ParameterError("positions must be an (n, 2) array")
    if positions.shape != velocities.shape:
        raise ParameterError("positions and velocities must have the same shape")
    n = positions.shape[0]
    if n < 2:
        raise ParameterError(f"need at least 2 points, got {n}")
    if not 1 <= k <= n - 1:
        raise ParameterError(f"k must be in 1..{n - 1}, got {k}")
    if metric == "torus":
        if box_side is None or box_side <= 0:
            raise ParameterError("torus metric requires a positive box_side")
        side = float(box_side)
    elif metric == "euclidean":
        side = 0.0
    else:
        raise ParameterError(f"unknown metric {metric!r}")
    cos = velocity_cosines(velocities)
    nbrs = knn_select(np.ascontiguousarray(positions), k, side)
    src = np.repeat(np.arange(n, dtype=np.int64), k)
    dst = nbrs.ravel()
    w = np.clip(cos[src, dst], 0.0, 1.0)
    return WeightedDigraph(n, src, dst, w)


def write_edgelist_csv(g: WeightedDigraph, path) -> None:
    """Write ``src,dst,weight`` rows; adds a ``# nodes=N`` line when some
    node has no incident edge (so the count survives a round-trip)."""
    lines = ["src,dst,weight"]
    touched = np.zeros(g.n_nodes, dtype=bool)
    touched[g.src] = True
    touched[g.dst] = True
    if not touched.all() or g.n_edges == 0:
        lines.append(f"# nodes={g.n_nodes}")
    for s, d, w in zip(g.src, g.dst, g.weight):
        lines.append(f"{s},{d},{w:.10g}")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


def read_edgelist_csv(path) -> WeightedDigraph:
    """Parse the edge-list format written by :func:`write_edgelist_csv`."""
    n_declared = None
    src, dst, w = [], [], []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line:
                continue
            if line.startswith("#"):
                body = line[1:].strip()
                if body.startswith("nodes="):
                    try:
                        n_declared = int(body[len("nodes="):])
                    except ValueError:
                        raise ParseError(f"bad node count {body!r}", lineno) from None
                continue
            if lineno == 1 and line.lower().replace(" ", "") == "src,dst,weight":
                continue
            parts = line.split(",")
            if len(parts) != 3:
                raise ParseError(f"expected 3 columns, got {len(parts)}", lineno)
            try:
                src.append(int(parts[0]))
                dst.append(int(parts[1]))
                w.append(float(parts[2]))
            except ValueError as exc:
                raise ParseError(str(exc), lineno) from None
    if n_declared is None:
        if not src:
            raise ParseError("edge list is empty and no '# nodes=N' line present")
        n_declared = 1 + max(max(src), max(dst))
    return WeightedDigraph(n_declared, np.array(src, dtype=np.int64),
                           np.array(dst, dtype=np.int64), np.array(w, dtype=np.float64))
