"""Bond percolation as a blue/red edge colouring, blue-preserving switchings,
and the two-stage coupling of two percolation probabilities."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import _kernels as K
from .sampler import SimpleGraph, _seed_from

RED, BLUE, GREEN = 0, 1, 2
_CHARS = {RED: "R", BLUE: "B", GREEN: "B"}


class EdgeView:
    """Subgraph of ``host`` made of the edges selected by ``mask`` (no copy)."""

    def __init__(self, host: SimpleGraph, mask: np.ndarray):
        self.host = host
        self.mask = mask

    @property
    def n(self) -> int:
        return self.host.n

    @property
    def edges(self) -> np.ndarray:
        return self.host.edges[self.mask]

    @property
    def m_edges(self) -> int:
        return int(np.count_nonzero(self.mask))

    def degrees(self) -> np.ndarray:
        return np.bincount(self.edges.ravel(), minlength=self.n)

    def materialize(self) -> SimpleGraph:
        return SimpleGraph(self.n, self.edges.copy(), check=False)


class EdgeColoring:
    """Per-edge state over a host graph: red (closed), blue (open), green
    (opened in a second stage; reported as blue)."""

    def __init__(self, host: SimpleGraph, state: np.ndarray):
        state = np.asarray(state, dtype=np.uint8)
        if state.shape != (host.m_edges,):
            raise ValueError("one state per host edge required")
        self.host = host
        self.state = state
        self._owns_host = False

    @property
    def blue_mask(self) -> np.ndarray:
        return self.state != RED

    @property
    def blue_count(self) -> int:
        return int(np.count_nonzero(self.state != RED))

    def blue(self) -> EdgeView:
        return EdgeView(self.host, self.blue_mask)

    def blue_degrees(self) -> np.ndarray:
        return self.blue().degrees()

    def to_text(self) -> str:
        order = np.lexsort((self.host.edges[:, 1], self.host.edges[:, 0]))
        lines = [f"{self.host.n} {self.host.m_edges}"]
        for e in order:
            u, v = self.host.edges[e]
            lines.append(f"{u} {v} {_CHARS[int(self.state[e])]}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "EdgeColoring":
        rows = [line.split() for line in text.splitlines() if line.strip()]
        n, m = int(rows[0][0]), int(rows[0][1])
        body = rows[1:]
        if len(body) != m:
            raise ValueError(f"header announces {m} edges, found {len(body)}")
        edges = np.array([[int(r[0]), int(r[1])] for r in body], dtype=np.int64).reshape(-1, 2)
        state = np.array([BLUE if r[2] == "B" else RED for r in body], dtype=np.uint8)
        return cls(SimpleGraph(n, edges), state)

    def save(self, path) -> None:
        Path(path).write_text(self.to_text())


@dataclass
class TwoStageSample:
    coloring: EdgeColoring  # RED / BLUE (stage 1) / GREEN (stage 2 only)

    @property
    def g1(self) -> EdgeView:
        return EdgeView(self.coloring.host, self.coloring.state == BLUE)

    @property
    def g2(self) -> EdgeView:
        return EdgeView(self.coloring.host, self.coloring.state != RED)

    @property
    def green(self) -> EdgeView:
        return EdgeView(self.coloring.host, self.coloring.state == GREEN)


def _check_p(p: float, name: str = "p"):
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"{name} must lie in [0, 1], got {p}")


def percolate(g: SimpleGraph, p: float, rng: np.random.Generator) -> EdgeColoring:
    """Keep each edge independently with probability ``p``; one uniform per edge in edge order."""
    _check_p(p)
    u = rng.random(g.m_edges)
    return EdgeColoring(g, (u < p).astype(np.uint8))


def second_stage_probability(p1, p2):
    """Chance that an edge closed at ``p1`` opens in the second stage."""
    _check_p(p1, "p1")
    _check_p(p2, "p2")
    if p1 > p2:
        raise ValueError("p1 must not exceed p2")
    if p1 >= 1:
        raise ValueError("p1 must be < 1")
    return (p2 - p1) / (1 - p1)


def two_stage(g: SimpleGraph, p1: float, p2: float, rng: np.random.Generator) -> TwoStageSample:
    """``p1``-percolation, then each closed edge opens with ``(p2-p1)/(1-p1)``."""
    q = second_stage_probability(p1, p2)
    u1 = rng.random(g.m_edges)
    u2 = rng.random(g.m_edges)
    state = np.where(u1 < p1, BLUE, np.where(u2 < q, GREEN, RED)).astype(np.uint8)
    return TwoStageSample(EdgeColoring(g, state))


def _own_host(c: EdgeColoring) -> None:
    # switchings rewire the host; copy it once so shared hosts stay untouched
    if not c._owns_host:
        c.host = c.host.copy()
        c._owns_host = True


def colored_switch_step(c: EdgeColoring, rng: np.random.Generator) -> bool:
    """One attempted switch of two ordered blue edges; target pairs must be absent from the host."""
    blue_idx = np.nonzero(c.state == BLUE)[0]
    if blue_idx.size < 2:
        return False
    _own_host(c)
    i = int(blue_idx[rng.integers(blue_idx.size)])
    j = int(blue_idx[rng.integers(blue_idx.size)])
    flip = bool(rng.integers(2))
    return bool(K.try_switch(c.host.edges, c.host.table(), c.host.n, i, j, flip))


def colored_switch_chain(c: EdgeColoring, steps: int, rng: np.random.Generator) -> int:
    blue_idx = np.nonzero(c.state == BLUE)[0].astype(np.int64)
    if blue_idx.size < 2:
        return 0
    _own_host(c)
    return int(K.colored_switch_chain(c.host.edges, c.host.table(), c.host.n, blue_idx, int(steps), _seed_from(rng)))
