"""Simple graphs with a prescribed degree sequence: Havel–Hakimi seeding,
switching chains, the configuration model and exhaustive enumeration."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import _kernels as K
from .degseq import DegreeSequence, _as_seq, validate


class InfeasibleSequence(ValueError):
    pass


class GuardError(ValueError):
    """A size guard refused the request."""


def _seed_from(rng: np.random.Generator) -> int:
    return int(rng.integers(0, 2**32 - 1))


class SimpleGraph:
    """Labelled simple graph on ``0..n-1``.

    Edges live in an ``(E, 2)`` int64 array with ``u < v`` per row. An
    open-addressing hash set of edge keys is built on demand for O(1)
    adjacency tests and kept in sync by the switching routines.
    """

    def __init__(self, n: int, edges=None, *, labels=None, check: bool = True):
        self.n = int(n)
        arr = np.zeros((0, 2), dtype=np.int64) if edges is None else np.asarray(edges, dtype=np.int64).reshape(-1, 2)
        arr = np.sort(arr, axis=1)
        self.edges = np.ascontiguousarray(arr)
        self.labels = None if labels is None else np.asarray(labels, dtype=np.int64)
        self._table = None
        if check:
            self._check()

    def _check(self):
        e = self.edges
        if e.size and (e.min() < 0 or e.max() >= self.n):
            raise ValueError("edge endpoint out of range")
        if np.any(e[:, 0] == e[:, 1]):
            raise ValueError("loops are not allowed")
        keys = e[:, 0] * self.n + e[:, 1]
        if np.unique(keys).size != keys.size:
            raise ValueError("repeated edges are not allowed")

    @property
    def m_edges(self) -> int:
        return int(self.edges.shape[0])

    def degrees(self) -> np.ndarray:
        return np.bincount(self.edges.ravel(), minlength=self.n)

    def table(self) -> np.ndarray:
        if self._table is None:
            self._table = K.build_table(self.edges, self.n, K.table_size(self.m_edges))
        return self._table

    def has_edge(self, u: int, v: int) -> bool:
        if u == v:
            return False
        u, v = min(u, v), max(u, v)
        return bool(K.ht_contains(self.table(), u * self.n + v))

    def neighbors(self, v: int) -> np.ndarray:
        e = self.edges
        return np.sort(np.concatenate((e[e[:, 0] == v, 1], e[e[:, 1] == v, 0])))

    def csr(self) -> tuple[np.ndarray, np.ndarray]:
        """``(indptr, indices)`` adjacency in compressed sparse row form."""
        both = np.concatenate((self.edges, self.edges[:, ::-1]))
        order = np.lexsort((both[:, 1], both[:, 0]))
        both = both[order]
        indptr = np.zeros(self.n + 1, dtype=np.int64)
        np.cumsum(np.bincount(both[:, 0], minlength=self.n), out=indptr[1:])
        return indptr, both[:, 1].copy()

    def edge_set(self) -> frozenset:
        return frozenset(map(tuple, self.edges.tolist()))

    def canonical_edges(self) -> np.ndarray:
        order = np.lexsort((self.edges[:, 1], self.edges[:, 0]))
        return self.edges[order]

    def copy(self) -> "SimpleGraph":
        g = SimpleGraph(self.n, self.edges.copy(), labels=self.labels, check=False)
        if self._table is not None:
            g._table = self._table.copy()
        return g

    def __eq__(self, other):
        if not isinstance(other, SimpleGraph):
            return NotImplemented
        return self.n == other.n and np.array_equal(self.canonical_edges(), other.canonical_edges())

    def __repr__(self):
        return f"SimpleGraph(n={self.n}, edges={self.m_edges})"

    def to_text(self) -> str:
        rows = self.canonical_edges()
        lines = [f"{self.n} {self.m_edges}"] + [f"{u} {v}" for u, v in rows.tolist()]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "SimpleGraph":
        rows = [line.split() for line in text.splitlines() if line.strip()]
        n, m = int(rows[0][0]), int(rows[0][1])
        edges = np.array([[int(a), int(b)] for a, b in rows[1:]], dtype=np.int64).reshape(-1, 2)
        if edges.shape[0] != m:
            raise ValueError(f"header announces {m} edges, found {edges.shape[0]}")
        return cls(n, edges)

    def save(self, path) -> None:
        Path(path).write_text(self.to_text())

    @classmethod
    def load(cls, path) -> "SimpleGraph":
        return cls.from_text(Path(path).read_text())


@dataclass
class MultiGraph:
    """Configuration-model output: loops and parallel edges allowed."""

    n: int
    edges: np.ndarray  # (E, 2), u <= v

    @property
    def loop_count(self) -> int:
        return int(np.count_nonzero(self.edges[:, 0] == self.edges[:, 1]))

    @property
    def multi_edge_count(self) -> int:
        """Surplus copies of repeated non-loop pairs."""
        plain = self.edges[self.edges[:, 0] != self.edges[:, 1]]
        keys = plain[:, 0] * self.n + plain[:, 1]
        return int(keys.size - np.unique(keys).size)

    def degrees(self) -> np.ndarray:
        return np.bincount(self.edges.ravel(), minlength=self.n)

    def is_simple(self) -> bool:
        return self.loop_count == 0 and self.multi_edge_count == 0

    def to_simple(self) -> SimpleGraph:
        if not self.is_simple():
            raise ValueError("multigraph has loops or parallel edges")
        return SimpleGraph(self.n, self.edges, check=False)


@dataclass(frozen=True)
class SwitchMove:
    """Replace edges ``ab`` and ``cd`` by ``ad`` and ``cb``."""

    a: int
    b: int
    c: int
    d: int

    def is_valid(self, g: SimpleGraph) -> bool:
        if len({self.a, self.b, self.c, self.d}) < 4:
            return False
        return (g.has_edge(self.a, self.b) and g.has_edge(self.c, self.d)
                and not g.has_edge(self.a, self.d) and not g.has_edge(self.c, self.b))

    def inverse(self) -> "SwitchMove":
        return SwitchMove(self.a, self.d, self.c, self.b)

    def apply(self, g: SimpleGraph) -> None:
        """Apply in place; raises if the move is not valid on ``g``."""
        if not self.is_valid(g):
            raise ValueError(f"invalid switch {self}")
        keys = g.edges[:, 0] * g.n + g.edges[:, 1]
        i = int(np.nonzero(keys == min(self.a, self.b) * g.n + max(self.a, self.b))[0][0])
        j = int(np.nonzero(keys == min(self.c, self.d) * g.n + max(self.c, self.d))[0][0])
        # stored row i reads (a, b) or (b, a); the move ba,dc -> bc,da is the same switch
        partner = self.c if g.edges[i, 0] == self.a else self.d
        flip = bool(g.edges[j, 0] != partner)
        ok = K.try_switch(g.edges, g.table(), g.n, i, j, flip)
        assert ok


def havel_hakimi(seq) -> SimpleGraph:
    """Deterministic realisation: repeatedly join the largest residual degree
    to the next largest ones.

    Ties at the boundary are resolved towards the end of the sorted run so
    the residual array stays sorted without re-sorting.
    """
    seq = _as_seq(seq)
    rep = validate(seq)
    if not rep.feasible:
        raise InfeasibleSequence(f"sequence is not graphical ({rep})")
    order = seq.order
    labels = order.copy()
    res = seq.degrees[order].astype(np.int64).copy()
    chunks = []
    start = 0
    n = res.size
    while start < n and res[start] > 0:
        d = int(res[start])
        head = start + 1
        if head + d > n or res[head + d - 1] <= 0:
            raise InfeasibleSequence("Havel-Hakimi failed")
        x = res[head + d - 1]
        # run of value x inside res[head:]: [lo, hi)
        seg = res[head:]
        lo = head + int(np.searchsorted(-seg, -x, side="left"))
        hi = head + int(np.searchsorted(-seg, -x, side="right"))
        take_run = head + d - lo  # how many of the x-run we need
        targets = np.concatenate((np.arange(head, lo), np.arange(hi - take_run, hi)))
        res[targets] -= 1
        u = labels[start]
        chunks.append(np.column_stack((np.full(targets.size, u), labels[targets])))
        res[start] = 0
        start += 1
    edges = np.concatenate(chunks) if chunks else np.zeros((0, 2), dtype=np.int64)
    return SimpleGraph(seq.n, edges, check=False)


def configuration_multigraph(seq, rng: np.random.Generator) -> MultiGraph:
    """Uniform pairing of degree stubs."""
    seq = seq if isinstance(seq, DegreeSequence) else DegreeSequence(seq, thinned=True)
    if seq.m % 2:
        raise ValueError("sum of degrees must be even")
    stubs = np.repeat(np.arange(seq.n, dtype=np.int64), seq.degrees)
    stubs = rng.permutation(stubs).reshape(-1, 2)
    return MultiGraph(seq.n, np.sort(stubs, axis=1))


def switch_step(g: SimpleGraph, rng: np.random.Generator) -> bool:
    """One attempted switch on ``g`` (in place): two ordered uniform edges and
    a uniform orientation of the second."""
    if g.m_edges < 2:
        raise ValueError("switching needs at least two edges")
    i = int(rng.integers(g.m_edges))
    j = int(rng.integers(g.m_edges))
    flip = bool(rng.integers(2))
    return bool(K.try_switch(g.edges, g.table(), g.n, i, j, flip))


def run_chain(g: SimpleGraph, steps: int, rng: np.random.Generator) -> int:
    """``steps`` attempted switches in compiled code; returns the number accepted."""
    return int(K.switch_chain(g.edges, g.table(), g.n, int(steps), _seed_from(rng)))


def default_burn_in(seq: DegreeSequence) -> int:
    return 30 * seq.m


def sample_uniform(seq, rng: np.random.Generator, burn_in: int | None = None) -> SimpleGraph:
    """Havel–Hakimi seed followed by ``burn_in`` attempted switches (default 30·m)."""
    seq = _as_seq(seq)
    g = havel_hakimi(seq)
    steps = default_burn_in(seq) if burn_in is None else int(burn_in)
    if steps < 0:
        raise ValueError("burn_in must be non-negative")
    if steps and g.m_edges >= 2:
        run_chain(g, steps, rng)
    return g


def sample_uniform_batch(seq, count: int, rng: np.random.Generator, burn_in: int | None = None) -> np.ndarray:
    """``count`` independent draws of :func:`sample_uniform` as an ``(count, E, 2)`` array."""
    seq = _as_seq(seq)
    g = havel_hakimi(seq)
    steps = default_burn_in(seq) if burn_in is None else int(burn_in)
    return K.switch_chain_batch(g.edges, g.n, steps, int(count), _seed_from(rng), K.table_size(g.m_edges))


def enumerate_all(seq, max_n: int = 8) -> list[SimpleGraph]:
    """Every labelled simple realisation, sorted by lexicographic edge list."""
    seq = _as_seq(seq)
    n = seq.n
    if n > max_n:
        raise GuardError(f"enumeration limited to n <= {max_n}, got {n}")
    target = seq.degrees.tolist()
    if sum(target) % 2:
        return []
    pairs = [(u, v) for u in range(n) for v in range(u + 1, n)]
    # remaining pairs touching each vertex, for pruning
    left = [n - 1] * n
    deg = [0] * n
    chosen: list[tuple[int, int]] = []
    out: list[list[tuple[int, int]]] = []

    def rec(idx: int):
        if idx == len(pairs):
            if deg == target:
                out.append(list(chosen))
            return
        u, v = pairs[idx]
        left[u] -= 1
        left[v] -= 1
        if deg[u] < target[u] and deg[v] < target[v]:
            deg[u] += 1
            deg[v] += 1
            chosen.append((u, v))
            if deg[u] + left[u] >= target[u] and deg[v] + left[v] >= target[v]:
                rec(idx + 1)
            chosen.pop()
            deg[u] -= 1
            deg[v] -= 1
        if deg[u] + left[u] >= target[u] and deg[v] + left[v] >= target[v]:
            rec(idx + 1)
        left[u] += 1
        left[v] += 1

    rec(0)
    out.sort()
    return [SimpleGraph(n, np.array(es, dtype=np.int64).reshape(-1, 2), check=False) for es in out]
