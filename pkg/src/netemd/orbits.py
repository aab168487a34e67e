"""Graphlet orbit counting by enumeration of connected induced subgraphs.

Every connected induced subgraph on at most five nodes is visited exactly once
(ESU enumeration), its induced adjacency is packed into a bitmask and a lookup
table maps (size, mask, position) to the automorphism orbit of that position.
Orbit and graphlet ids follow the usual 73-orbit / 30-graphlet numbering, which
is pinned by ``data/graphlets.json``.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources

import numba
import numpy as np

from .graph import Graph, ego_network

N_ORBITS = {2: 1, 3: 4, 4: 15, 5: 73}
N_GRAPHLETS = {2: 1, 3: 3, 4: 9, 5: 30}
MAX_SIZE = 5

# pair (i, j), i < j, of subgraph positions -> bit index
_PAIRS = [(i, j) for j in range(MAX_SIZE) for i in range(j)]
_PAIR_BIT = np.full((MAX_SIZE, MAX_SIZE), -1, dtype=np.int64)
for _b, (_i, _j) in enumerate(_PAIRS):
    _PAIR_BIT[_i, _j] = _PAIR_BIT[_j, _i] = _b


@dataclass(frozen=True)
class Graphlet:
    id: int
    size: int
    edges: tuple[tuple[int, int], ...]
    node_orbits: tuple[int, ...]


@lru_cache(maxsize=None)
def graphlet_catalogue() -> tuple[Graphlet, ...]:
    text = resources.files("netemd").joinpath("data/graphlets.json").read_text()
    return tuple(
        Graphlet(g["graphlet"], g["size"], tuple(map(tuple, g["edges"])), tuple(g["node_orbits"]))
        for g in json.loads(text)["graphlets"]
    )


def _mask_of(size: int, edges) -> int:
    m = 0
    for i, j in edges:
        m |= 1 << int(_PAIR_BIT[i, j])
    return m


def _permuted_mask(size: int, mask: int, perm) -> int:
    out = 0
    for b, (i, j) in enumerate(_PAIRS[: size * (size - 1) // 2]):
        if mask >> b & 1:
            out |= 1 << int(_PAIR_BIT[perm[i], perm[j]])
    return out


@lru_cache(maxsize=None)
def lookup_tables() -> tuple[np.ndarray, np.ndarray]:
    """Return ``(orbit_of, graphlet_of)``.

    ``orbit_of[size, mask, pos]`` is the orbit id of position ``pos`` in the
    labelled graph ``mask`` on ``size`` nodes, ``-1`` when disconnected;
    ``graphlet_of[size, mask]`` is the graphlet id.
    """
    nmask = 1 << (MAX_SIZE * (MAX_SIZE - 1) // 2)
    orbit_of = np.full((MAX_SIZE + 1, nmask, MAX_SIZE), -1, dtype=np.int64)
    graphlet_of = np.full((MAX_SIZE + 1, nmask), -1, dtype=np.int64)
    for gl in graphlet_catalogue():
        base = _mask_of(gl.size, gl.edges)
        # perm maps graphlet node -> labelled position
        for perm in itertools.permutations(range(gl.size)):
            m = _permuted_mask(gl.size, base, perm)
            graphlet_of[gl.size, m] = gl.id
            for node, pos in enumerate(perm):
                orbit_of[gl.size, m, pos] = gl.node_orbits[node]
    return orbit_of, graphlet_of


@numba.njit(cache=True, nogil=True)
def _has_edge(indptr, indices, u, v):
    lo = indptr[u]
    hi = indptr[u + 1]
    while lo < hi:
        mid = (lo + hi) >> 1
        x = indices[mid]
        if x == v:
            return True
        if x < v:
            lo = mid + 1
        else:
            hi = mid
    return False


@numba.njit(cache=True, nogil=True)
def _esu(indptr, indices, n, max_size, orbit_of, graphlet_of, pair_bit, node_counts, graphlet_counts, per_node):
    """Visit every connected induced subgraph with 2..max_size nodes once.

    If ``per_node`` the orbit count of each member is incremented in
    ``node_counts``; the graphlet census always goes to ``graphlet_counts``.
    """
    UNSET = 1 << 30
    mark = np.full(n, UNSET, dtype=np.int64)
    sub = np.zeros(max_size, dtype=np.int64)
    masks = np.zeros(max_size + 1, dtype=np.int64)
    cap = indices.shape[0] + 1
    ext = np.zeros((max_size + 1, cap), dtype=np.int64)
    ext_len = np.zeros(max_size + 1, dtype=np.int64)
    cursor = np.zeros(max_size + 1, dtype=np.int64)

    for v in range(n):
        sub[0] = v
        mark[v] = 1
        ext_len[1] = 0
        for p in range(indptr[v], indptr[v + 1]):
            u = indices[p]
            if mark[u] == UNSET:
                mark[u] = 1
            if u > v:
                ext[1, ext_len[1]] = u
                ext_len[1] += 1
        masks[1] = 0
        cursor[1] = 0
        depth = 1  # current |sub|
        while depth >= 1:
            if depth == max_size or cursor[depth] >= ext_len[depth]:
                # backtrack: undo marks made when sub[depth - 1] was added
                if depth > 1:
                    w = sub[depth - 1]
                    for p in range(indptr[w], indptr[w + 1]):
                        u = indices[p]
                        if mark[u] == depth:
                            mark[u] = UNSET
                depth -= 1
                continue
            w = ext[depth, cursor[depth]]
            cursor[depth] += 1
            sub[depth] = w
            m = masks[depth]
            for i in range(depth):
                if _has_edge(indptr, indices, sub[i], w):
                    m |= 1 << pair_bit[i, depth]
            size = depth + 1
            masks[size] = m
            graphlet_counts[graphlet_of[size, m]] += 1
            if per_node:
                for i in range(size):
                    node_counts[sub[i], orbit_of[size, m, i]] += 1
            if size < max_size:
                # remaining siblings plus exclusive neighbours of w
                k = 0
                for j in range(cursor[depth], ext_len[depth]):
                    ext[size, k] = ext[depth, j]
                    k += 1
                for p in range(indptr[w], indptr[w + 1]):
                    u = indices[p]
                    if mark[u] == UNSET:
                        mark[u] = size
                        if u > v:
                            ext[size, k] = u
                            k += 1
                ext_len[size] = k
                cursor[size] = 0
                depth = size
        for p in range(indptr[v], indptr[v + 1]):
            u = indices[p]
            if mark[u] == 1:
                mark[u] = UNSET
        mark[v] = UNSET


def _run_esu(g: Graph, max_size: int, per_node: bool):
    if max_size < 2 or max_size > MAX_SIZE:
        raise ValueError(f"max_size must be in 2..{MAX_SIZE}, got {max_size}")
    orbit_of, graphlet_of = lookup_tables()
    n = g.node_count
    node_counts = np.zeros((n if per_node else 0, N_ORBITS[max_size]), dtype=np.int64)
    graphlet_counts = np.zeros(N_GRAPHLETS[max_size], dtype=np.int64)
    if n:
        _esu(g.indptr, g.indices, n, max_size, orbit_of, graphlet_of, _PAIR_BIT,
             node_counts, graphlet_counts, per_node)
    return node_counts, graphlet_counts


@dataclass(frozen=True)
class OrbitCountTable:
    """Node-by-orbit matrix of graphlet degrees."""

    max_graphlet_size: int
    counts: np.ndarray

    @property
    def orbit_ids(self) -> list[int]:
        return list(range(self.counts.shape[1]))


def orbit_counts(g: Graph, max_size: int = 4) -> OrbitCountTable:
    """Graphlet degrees of every node for all orbits of graphlets with ``<= max_size`` nodes."""
    counts, _ = _run_esu(g, max_size, per_node=True)
    return OrbitCountTable(max_size, counts)


def graphlet_census(g: Graph, max_size: int = 4) -> np.ndarray:
    """Number of induced copies of each connected graphlet on 2..max_size nodes."""
    return _run_esu(g, max_size, per_node=False)[1]


def ego_graphlet_counts(g: Graph, k: int = 1, max_size: int = 4) -> np.ndarray:
    """Row ``v``: graphlet census of the ``k``-step ego network of ``v``."""
    out = np.zeros((g.node_count, N_GRAPHLETS[max_size]), dtype=np.int64)
    for v in range(g.node_count):
        out[v] = graphlet_census(ego_network(g, v, k), max_size)
    return out
