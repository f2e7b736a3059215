"""Compiled inner loops: open-addressing edge set, switch chains, union-find.

Randomised kernels take an integer seed and reseed numba's thread-local
generator, so results depend only on the seed, never on the calling thread.
"""

from __future__ import annotations

import numpy as np
from numba import njit

EMPTY = np.int64(-1)
_GOLDEN = np.uint64(0x9E3779B97F4A7C15)


def table_size(n_keys: int) -> int:
    size = 16
    while size < 2 * n_keys + 2:
        size *= 2
    return size


@njit(cache=True, nogil=True)
def _slot(key, mask):
    h = np.uint64(key) * _GOLDEN
    return np.int64((h >> np.uint64(17)) & np.uint64(mask))


@njit(cache=True, nogil=True)
def ht_contains(table, key):
    mask = table.size - 1
    i = _slot(key, mask)
    while True:
        k = table[i]
        if k == key:
            return True
        if k == -1:
            return False
        i = (i + 1) & mask


@njit(cache=True, nogil=True)
def ht_insert(table, key):
    mask = table.size - 1
    i = _slot(key, mask)
    while True:
        k = table[i]
        if k == key:
            return False
        if k == -1:
            table[i] = key
            return True
        i = (i + 1) & mask


@njit(cache=True, nogil=True)
def ht_remove(table, key):
    # linear probing with backward-shift deletion, no tombstones
    mask = table.size - 1
    i = _slot(key, mask)
    while True:
        k = table[i]
        if k == -1:
            return False
        if k == key:
            break
        i = (i + 1) & mask
    j = i
    while True:
        j = (j + 1) & mask
        k = table[j]
        if k == -1:
            break
        home = _slot(k, mask)
        # move k into the hole at i unless its home lies cyclically in (i, j]
        if i <= j:
            stays = i < home <= j
        else:
            stays = home > i or home <= j
        if not stays:
            table[i] = k
            i = j
    table[i] = -1
    return True


@njit(cache=True, nogil=True)
def build_table(edges, n, size):
    table = np.full(size, -1, dtype=np.int64)
    for e in range(edges.shape[0]):
        ht_insert(table, edges[e, 0] * n + edges[e, 1])
    return table


@njit(cache=True, nogil=True)
def _key(u, v, n):
    if u < v:
        return u * n + v
    return v * n + u


@njit(cache=True, nogil=True)
def try_switch(edges, table, n, i, j, flip):
    """Attempt the switch of edges i=(a,b), j=(c,d) (d,c if flip) into ad, cb."""
    if i == j:
        return False
    a = edges[i, 0]
    b = edges[i, 1]
    if flip:
        c = edges[j, 1]
        d = edges[j, 0]
    else:
        c = edges[j, 0]
        d = edges[j, 1]
    if a == c or a == d or b == c or b == d:
        return False
    k_ad = _key(a, d, n)
    k_cb = _key(c, b, n)
    if ht_contains(table, k_ad) or ht_contains(table, k_cb):
        return False
    ht_remove(table, _key(a, b, n))
    ht_remove(table, _key(c, d, n))
    ht_insert(table, k_ad)
    ht_insert(table, k_cb)
    edges[i, 0] = min(a, d)
    edges[i, 1] = max(a, d)
    edges[j, 0] = min(c, b)
    edges[j, 1] = max(c, b)
    return True


@njit(cache=True, nogil=True)
def switch_chain(edges, table, n, steps, seed):
    """Run ``steps`` attempted switches in place; returns the number accepted."""
    np.random.seed(seed)
    n_edges = edges.shape[0]
    accepted = 0
    if n_edges < 2:
        return 0
    for _ in range(steps):
        i = np.random.randint(0, n_edges)
        j = np.random.randint(0, n_edges)
        flip = np.random.randint(0, 2) == 1
        if try_switch(edges, table, n, i, j, flip):
            accepted += 1
    return accepted


@njit(cache=True, nogil=True)
def switch_chain_batch(edges0, n, steps, count, seed, size):
    """``count`` independent chains from the same start; returns final edge arrays."""
    np.random.seed(seed)
    n_edges = edges0.shape[0]
    out = np.empty((count, n_edges, 2), dtype=np.int64)
    for r in range(count):
        edges = edges0.copy()
        table = build_table(edges, n, size)
        if n_edges >= 2:
            for _ in range(steps):
                i = np.random.randint(0, n_edges)
                j = np.random.randint(0, n_edges)
                flip = np.random.randint(0, 2) == 1
                try_switch(edges, table, n, i, j, flip)
        out[r] = edges
    return out


@njit(cache=True, nogil=True)
def colored_switch_chain(edges, table, n, blue_idx, steps, seed):
    """Switches restricted to pairs of blue edges; blue edges stay blue."""
    np.random.seed(seed)
    n_blue = blue_idx.size
    accepted = 0
    if n_blue < 2:
        return 0
    for _ in range(steps):
        i = blue_idx[np.random.randint(0, n_blue)]
        j = blue_idx[np.random.randint(0, n_blue)]
        flip = np.random.randint(0, 2) == 1
        if try_switch(edges, table, n, i, j, flip):
            accepted += 1
    return accepted


@njit(cache=True, nogil=True)
def _find(parent, x):
    while parent[x] != x:
        parent[x] = parent[parent[x]]
        x = parent[x]
    return x


@njit(cache=True, nogil=True)
def union_find_roots(n, edges, mask):
    """Root label per vertex over edges with ``mask`` true (all if mask is empty)."""
    parent = np.arange(n, dtype=np.int64)
    size = np.ones(n, dtype=np.int64)
    use_all = mask.size == 0
    for e in range(edges.shape[0]):
        if not use_all and not mask[e]:
            continue
        ra = _find(parent, edges[e, 0])
        rb = _find(parent, edges[e, 1])
        if ra == rb:
            continue
        if size[ra] < size[rb]:
            ra, rb = rb, ra
        parent[rb] = ra
        size[ra] += size[rb]
    for v in range(n):
        parent[v] = _find(parent, v)
    return parent


@njit(cache=True, nogil=True)
def _count_components(n, edges, skip_a, skip_b, extra):
    parent = np.arange(n, dtype=np.int64)
    comps = n
    for e in range(edges.shape[0]):
        if e == skip_a or e == skip_b:
            continue
        ra = _find(parent, edges[e, 0])
        rb = _find(parent, edges[e, 1])
        if ra != rb:
            parent[rb] = ra
            comps -= 1
    for e in range(extra.shape[0]):
        ra = _find(parent, extra[e, 0])
        rb = _find(parent, extra[e, 1])
        if ra != rb:
            parent[rb] = ra
            comps -= 1
    return comps


@njit(cache=True, nogil=True)
def split_census(n, edges, table):
    """Ordered pairs of oriented edges whose valid switch adds exactly one component."""
    n_edges = edges.shape[0]
    base = _count_components(n, edges, -1, -1, np.empty((0, 2), dtype=np.int64))
    extra = np.empty((2, 2), dtype=np.int64)
    total = 0
    for i in range(n_edges):
        for oi in range(2):
            a = edges[i, oi]
            b = edges[i, 1 - oi]
            for j in range(n_edges):
                if j == i:
                    continue
                for oj in range(2):
                    c = edges[j, oj]
                    d = edges[j, 1 - oj]
                    if a == c or a == d or b == c or b == d:
                        continue
                    if ht_contains(table, _key(a, d, n)) or ht_contains(table, _key(c, b, n)):
                        continue
                    extra[0, 0] = a
                    extra[0, 1] = d
                    extra[1, 0] = c
                    extra[1, 1] = b
                    if _count_components(n, edges, i, j, extra) == base + 1:
                        total += 1
    return total
