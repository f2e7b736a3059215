"""Component structure and the structural subroutines used by the proofs:
high blue-degree sets, greedy min-degree cores, balanced cuts, split census."""

from __future__ import annotations

import heapq
from dataclasses import dataclass

import numpy as np

from . import _kernels as K
from .percolate import EdgeColoring, EdgeView
from .sampler import GuardError, SimpleGraph

_NO_MASK = np.zeros(0, dtype=np.bool_)


@dataclass(frozen=True)
class ComponentStats:
    sizes: np.ndarray  # descending
    roots: np.ndarray | None = None

    @property
    def L1(self) -> int:
        return int(self.sizes[0]) if self.sizes.size else 0

    @property
    def second_largest(self) -> int:
        return int(self.sizes[1]) if self.sizes.size > 1 else 0

    @property
    def count(self) -> int:
        return int(self.sizes.size)

    def largest_members(self) -> np.ndarray:
        """Boolean membership of (one) largest component."""
        if self.roots is None:
            raise ValueError("computed without vertex roots")
        labels, counts = np.unique(self.roots, return_counts=True)
        return self.roots == labels[np.argmax(counts)]


@dataclass(frozen=True)
class VertexSet:
    members: np.ndarray  # boolean membership over 0..n-1

    @property
    def size(self) -> int:
        return int(np.count_nonzero(self.members))

    def labels(self) -> np.ndarray:
        return np.nonzero(self.members)[0]

    def __contains__(self, v):
        return bool(self.members[v])


def component_stats(g, keep_roots: bool = True) -> ComponentStats:
    """Union-find over the edges of a graph, view or colouring (blue edges only)."""
    if isinstance(g, EdgeColoring):
        g = g.blue()
    if isinstance(g, EdgeView):
        n, edges, mask = g.n, g.host.edges, np.ascontiguousarray(g.mask, dtype=np.bool_)
    else:
        n, edges, mask = g.n, g.edges, _NO_MASK
    roots = K.union_find_roots(n, edges, mask)
    sizes = np.bincount(roots, minlength=n)
    sizes = np.sort(sizes[sizes > 0])[::-1]
    return ComponentStats(sizes, roots if keep_roots else None)


def v_omega(c: EdgeColoring, omega: float) -> VertexSet:
    """Vertices whose blue degree is at least ``omega``."""
    if omega < 0:
        raise ValueError("omega must be non-negative")
    return VertexSet(c.blue_degrees() >= omega)


def extract_core(g: SimpleGraph, d0: float) -> SimpleGraph:
    """Greedy peeling: delete the smallest-labelled vertex of degree < ``d0`` until none is left.

    The result is the induced subgraph on the survivors, relabelled
    ``0..h-1``; ``labels`` maps back to the vertices of ``g``.
    """
    if d0 < 0:
        raise ValueError("d0 must be non-negative")
    base = g.labels if g.labels is not None else np.arange(g.n)
    indptr, nbrs = g.csr()
    deg = np.diff(indptr).astype(np.int64)
    alive = np.ones(g.n, dtype=bool)
    queued = deg < d0
    heap = np.nonzero(queued)[0].tolist()
    heapq.heapify(heap)
    while heap:
        v = heapq.heappop(heap)
        alive[v] = False
        for w in nbrs[indptr[v]:indptr[v + 1]]:
            if alive[w]:
                deg[w] -= 1
                if not queued[w] and deg[w] < d0:
                    queued[w] = True
                    heapq.heappush(heap, int(w))
    keep = np.nonzero(alive)[0]
    relabel = np.full(g.n, -1, dtype=np.int64)
    relabel[keep] = np.arange(keep.size)
    e = g.edges
    inside = alive[e[:, 0]] & alive[e[:, 1]]
    return SimpleGraph(keep.size, relabel[e[inside]], labels=base[keep], check=False)


def almost_balanced_min_cut(g: SimpleGraph, max_n: int = 20) -> int:
    """Fewest crossing edges over bipartitions whose smaller side has >= 9|V|/20 vertices."""
    n = g.n
    if n > max_n:
        raise GuardError(f"exhaustive cut search limited to n <= {max_n}, got {n}")
    if n < 2:
        raise ValueError("a cut needs at least two vertices")
    lo = -(-9 * n // 20)
    masks = np.arange(1 << (n - 1), dtype=np.int64)  # vertex n-1 fixed on side 0
    pop = np.zeros(masks.size, dtype=np.int64)
    for v in range(n - 1):
        pop += (masks >> v) & 1
    ok = (pop >= lo) & (n - pop >= lo)
    masks = masks[ok]
    if masks.size == 0:
        raise ValueError("no almost balanced cut exists")
    cross = np.zeros(masks.size, dtype=np.int64)
    for u, v in g.edges.tolist():
        cross += ((masks >> u) & 1) ^ ((masks >> v) & 1)
    return int(cross.min())


def two_cut_pair_census(g: SimpleGraph, max_edges: int = 1000) -> int:
    """Ordered pairs of oriented edges whose valid switch creates exactly one extra component."""
    if g.m_edges > max_edges:
        raise GuardError(f"census limited to {max_edges} edges, got {g.m_edges}")
    return int(K.split_census(g.n, g.edges, g.table()))
