"""Clique learning on weighted digraphs and the collectiveness scores on top.

The pipeline is: learn one node set ("clique") per node by spreading
information along edges, compare cliques pairwise into a coherence matrix,
then average coherence into per-node and whole-graph collectiveness.

Spreading rules, for a single core node:

* the core starts with information 1 and is privileged and renewed;
  everyone else starts at 0, unprivileged, unrenewed;
* a node is *ready* when it is unrenewed and has at least one privileged
  in-neighbor; each iteration processes all currently ready nodes in
  ascending id;
* a processed node z is renewed once and for all; its information is
  combined from its privileged in-neighbors x over edges x -> z, either
  the mean or the minimum of w(x, z) * info(x);
* z becomes privileged only if its information strictly exceeds the
  threshold; by default the grant is visible immediately, so a later node
  of the same iteration already counts z among its privileged in-neighbors
  (``batched=True`` defers all grants to the end of the iteration);
* the clique is the final privileged set, core included.

Because weights never exceed 1, information never grows while spreading,
and every node is processed at most once, so the loop always terminates.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from ._kernels import spread_cliques
from .errors import InvariantError, ParameterError
from .graph import WeightedDigraph

STRATEGIES = ("avg", "min")
SCHEMES = ("ncl1", "ncl2")


@dataclass(frozen=True)
class NclConfig:
    """Knobs of the measurement: information threshold, spreading strategy
    ("avg" or "min"), coherence scheme ("ncl1" or "ncl2")."""

    lam: float = 0.7
    strategy: str = "avg"
    scheme: str = "ncl1"
    batched: bool = False

    def __post_init__(self):
        if not 0.0 <= self.lam <= 1.0:
            raise ParameterError(f"threshold must be in [0, 1], got {self.lam}")
        if self.strategy not in STRATEGIES:
            raise ParameterError(f"strategy must be one of {STRATEGIES}, got {self.strategy!r}")
        if self.scheme not in SCHEMES:
            raise ParameterError(f"scheme must be one of {SCHEMES}, got {self.scheme!r}")

    @property
    def variant(self) -> str:
        """Short label like "ncl1_avg" used in CSV output."""
        return f"{self.scheme}_{self.strategy}"


class Measurement(NamedTuple):
    cliques: np.ndarray        # (n, n) bool, row i = clique of node i
    coherence: np.ndarray      # (n, n) float in [0, 1], zero diagonal
    phi: np.ndarray            # (n,) per-node collectiveness
    capital_phi: float         # graph collectiveness


def _check_spread_args(g: WeightedDigraph, lam: float, strategy: str) -> None:
    if not 0.0 <= lam <= 1.0:
        raise ParameterError(f"threshold must be in [0, 1], got {lam}")
    if strategy not in STRATEGIES:
        raise ParameterError(f"strategy must be one of {STRATEGIES}, got {strategy!r}")
    if g.n_edges and (g.weight.min() < 0.0 or g.weight.max() > 1.0):
        raise InvariantError("graph weights must lie in [0, 1]; apply clamp_weights first")


def _spread(g: WeightedDigraph, cores: np.ndarray, lam: float, strategy: str,
            batched: bool) -> np.ndarray:
    out_indptr, out_dst, in_indptr, in_src, in_w = g._kernel_csr()
    return spread_cliques(g.n_nodes, out_indptr, out_dst, in_indptr, in_src, in_w,
                          cores, float(lam), strategy == "min", batched)


def learn_clique(g: WeightedDigraph, core: int, lam: float, strategy: str = "avg",
                 batched: bool = False) -> set[int]:
    """Clique of one core node: the privileged set after spreading ends."""
    g._check_node(core)
    _check_spread_args(g, lam, strategy)
    row = _spread(g, np.array([core], dtype=np.int64), lam, strategy, batched)[0]
    return {int(j) for j in np.nonzero(row)[0]}

def learn_cliques(g: WeightedDigraph, cfg: NclConfig) -> np.ndarray:
    """Clique indicator matrix: row i marks the clique learned from core i."""
    _check_spread_args(g, cfg.lam, cfg.strategy)
    cores = np.arange(g.n_nodes, dtype=np.int64)
    return _spread(g, cores, cfg.lam, cfg.strategy, cfg.batched)


def coherence(cliques: np.ndarray, scheme: str = "ncl1") -> np.ndarray:
    """Pairwise coherence from clique rows and columns.

    ncl1 averages two Jaccard overlaps (rows and columns, intersection over
    union); ncl2 averages two absolute overlaps (intersection over the size
    of node i's own row/column).  The diagonal is zero by definition.
    """
    if scheme not in SCHEMES:
        raise ParameterError(f"scheme must be one of {SCHEMES}, got {scheme!r}")
    c = np.asarray(cliques)
    if c.ndim != 2 or c.shape[0] != c.shape[1]:
        raise ParameterError("clique matrix must be square")
    n = c.shape[0]
    # float32 products stay exact: every count is an integer <= n << 2**24
    f = np.float32 if n < 2 ** 24 else np.float64
    cf = c.astype(f)
    if not np.array_equal(cf, cf.astype(bool).astype(f)):
        raise InvariantError("clique matrix entries must be 0 or 1")
    row = cf.sum(axis=1, dtype=np.float64)
    col = cf.sum(axis=0, dtype=np.float64)
    if np.any(row == 0) or np.any(col == 0):
        raise InvariantError("clique matrix needs every row and column sum >= 1")
    z = (cf @ cf.T).astype(np.float64)
    inter_cols = (cf.T @ cf).astype(np.float64)
    if scheme == "ncl1":
        union_rows = row[:, None] + row[None, :]
        union_rows -= z
        z /= union_rows
        union_cols = col[:, None] + col[None, :]
        union_cols -= inter_cols
        inter_cols /= union_cols
    else:
        z /= row[:, None]
        inter_cols /= col[:, None]
    z += inter_cols
    z *= 0.5
    np.fill_diagonal(z, 0.0)
    return z


def node_collectiveness(z: np.ndarray) -> np.ndarray:
    """Per-node collectiveness: mean coherence with every other node."""
    z = np.asarray(z, dtype=np.float64)
    n = z.shape[0]
    if n < 2:
        raise ParameterError("node collectiveness needs at least 2 nodes")
    return z.sum(axis=1) / (n - 1)


def graph_collectiveness(phi: np.ndarray) -> float:
    """Graph collectiveness: mean of the per-node values."""
    phi = np.asarray(phi, dtype=np.float64)
    if phi.size == 0:
        raise ParameterError("empty collectiveness vector")
    return float(phi.mean())


def measure(g: WeightedDigraph, cfg: NclConfig) -> Measurement:
    """Full pipeline on one graph: cliques, coherence, phi and its mean."""
    c = learn_cliques(g, cfg)
    z = coherence(c, cfg.scheme)
    phi = node_collectiveness(z)
    return Measurement(c, z, phi, graph_collectiveness(phi))


def write_matrix_csv(m: np.ndarray, path) -> None:
    """Row-major CSV dump of a square matrix, `# N=<n>` header included."""
    m = np.asarray(m)
    lines = [f"# N={m.shape[0]}"]
    if m.dtype == bool:
        lines += [",".join("1" if v else "0" for v in r) for r in m]
    else:
        lines += [",".join(f"{v:.12g}" for v in r) for r in m]
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")
