"""Undirected simple graphs, edge-list ingestion and dataset manifests."""

from __future__ import annotations

import csv
import hashlib
from collections import deque
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np


class EdgeListError(ValueError):
    """Malformed edge-list or manifest file."""


@dataclass(frozen=True, eq=False)
class Graph:
    """Immutable undirected simple graph in CSR form.

    Neighbours of node ``v`` are ``indices[indptr[v]:indptr[v + 1]]`` and are
    kept sorted. Use :meth:`from_edges` rather than the constructor.
    """

    indptr: np.ndarray
    indices: np.ndarray
    name: str = ""

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[Sequence[int]] | np.ndarray, name: str = "") -> "Graph":
        """Build a graph on nodes ``0..n-1``, dropping self-loops and duplicate edges."""
        e = np.asarray(list(edges) if not isinstance(edges, np.ndarray) else edges, dtype=np.int64)
        e = e.reshape(-1, 2)
        if e.size and (e.min() < 0 or e.max() >= n):
            raise IndexError(f"edge endpoint outside 0..{n - 1}")
        e = e[e[:, 0] != e[:, 1]]
        e = np.sort(e, axis=1)
        e = np.unique(e, axis=0)
        both = np.concatenate([e, e[:, ::-1]])
        order = np.lexsort((both[:, 1], both[:, 0]))
        both = both[order]
        counts = np.bincount(both[:, 0], minlength=n) if n else np.zeros(0, np.int64)
        indptr = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(counts, out=indptr[1:])
        indices = np.ascontiguousarray(both[:, 1], dtype=np.int64)
        indptr.setflags(write=False)
        indices.setflags(write=False)
        return cls(indptr, indices, name)

    @classmethod
    def from_networkx(cls, g, name: str = "") -> "Graph":
        nodes = list(g.nodes())
        index = {u: i for i, u in enumerate(nodes)}
        return cls.from_edges(len(nodes), [(index[u], index[v]) for u, v in g.edges()], name)

    @property
    def node_count(self) -> int:
        return len(self.indptr) - 1

    @property
    def edge_count(self) -> int:
        return len(self.indices) // 2

    def neighbors(self, v: int) -> np.ndarray:
        return self.indices[self.indptr[v]:self.indptr[v + 1]]

    def degrees(self) -> np.ndarray:
        return np.diff(self.indptr)

    def has_edge(self, u: int, v: int) -> bool:
        nb = self.neighbors(u)
        i = np.searchsorted(nb, v)
        return bool(i < len(nb) and nb[i] == v)

    def edges(self) -> np.ndarray:
        """Edge array of shape ``(E, 2)`` with ``u < v``, lexicographically sorted."""
        src = np.repeat(np.arange(self.node_count, dtype=np.int64), self.degrees())
        mask = src < self.indices
        return np.column_stack([src[mask], self.indices[mask]])

    def adjacency_matrix(self) -> np.ndarray:
        a = np.zeros((self.node_count, self.node_count))
        e = self.edges()
        a[e[:, 0], e[:, 1]] = 1.0
        a[e[:, 1], e[:, 0]] = 1.0
        return a

    def subgraph(self, nodes: Sequence[int], name: str = "") -> "Graph":
        """Induced subgraph; node ``nodes[i]`` becomes node ``i``."""
        nodes = np.asarray(nodes, dtype=np.int64)
        remap = np.full(self.node_count, -1, dtype=np.int64)
        remap[nodes] = np.arange(len(nodes))
        e = self.edges()
        keep = (remap[e[:, 0]] >= 0) & (remap[e[:, 1]] >= 0)
        return Graph.from_edges(len(nodes), remap[e[keep]], name)

    def relabel(self, perm: Sequence[int]) -> "Graph":
        """Copy in which old node ``v`` is renamed ``perm[v]``."""
        perm = np.asarray(perm, dtype=np.int64)
        return Graph.from_edges(self.node_count, perm[self.edges()], self.name)

    def content_hash(self) -> str:
        h = hashlib.sha256()
        h.update(np.int64(self.node_count).tobytes())
        h.update(self.indices.astype("<i8").tobytes())
        h.update(self.indptr.astype("<i8").tobytes())
        return h.hexdigest()

    def __eq__(self, other) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return np.array_equal(self.indptr, other.indptr) and np.array_equal(self.indices, other.indices)

    def __hash__(self) -> int:
        return hash(self.content_hash())

    def __repr__(self) -> str:
        return f"Graph(name={self.name!r}, nodes={self.node_count}, edges={self.edge_count})"


@dataclass
class GraphDataset:
    graphs: list[Graph]
    class_labels: list[str] | None = None
    time_labels: list[float] | None = None
    names: list[str] = field(default_factory=list)

    def __post_init__(self):
        n = len(self.graphs)
        for what, labels in (("class", self.class_labels), ("time", self.time_labels)):
            if labels is not None and len(labels) != n:
                raise ValueError(f"{what} labels: expected {n}, got {len(labels)}")
        if not self.names:
            self.names = [g.name or f"g{i}" for i, g in enumerate(self.graphs)]

    def __len__(self) -> int:
        return len(self.graphs)

    def time_order(self) -> list[int]:
        """Graph indices sorted by time label (stable)."""
        if self.time_labels is None:
            raise ValueError("dataset has no time labels")
        return sorted(range(len(self)), key=lambda i: self.time_labels[i])


def parse_edge_list(lines: Iterable[str], name: str = "") -> Graph:
    """Parse edge-list lines. Node tokens are arbitrary strings indexed in first-appearance order.

    A leading ``# nodes: a b c`` header declares nodes up front, which is the
    only way isolated nodes survive a round trip.
    """
    index: dict[str, int] = {}
    edges = []
    for lineno, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            body = line[1:].strip()
            if body.startswith("nodes:") and not edges:
                for tok in body[len("nodes:"):].split():
                    index.setdefault(tok, len(index))
            continue
        parts = line.split()
        if len(parts) != 2:
            raise EdgeListError(f"{name or '<edges>'}:{lineno}: expected 2 tokens, got {len(parts)}")
        a, b = (index.setdefault(t, len(index)) for t in parts)
        edges.append((a, b))
    return Graph.from_edges(len(index), edges, name)


def load_edge_list(path: str | Path, directed_as_undirected: bool = True) -> Graph:
    """Read a whitespace-separated edge list; ``#`` lines are comments.

    Directed inputs are always symmetrised, so ``directed_as_undirected=False``
    is rejected rather than silently ignored.
    """
    if not directed_as_undirected:
        raise ValueError("only undirected graphs are supported")
    path = Path(path)
    with open(path) as fh:
        return parse_edge_list(fh, name=path.stem)


def write_edge_list(g: Graph, path: str | Path, header: Sequence[str] = ()) -> None:
    with open(path, "w") as fh:
        for line in header:
            fh.write(f"# {line}\n")
        # declaring every node keeps isolated nodes and the original numbering
        if g.node_count:
            fh.write("# nodes: " + " ".join(map(str, range(g.node_count))) + "\n")
        for u, v in g.edges():
            fh.write(f"{u} {v}\n")


def ego_network(g: Graph, v: int, k: int = 1) -> Graph:
    """Induced subgraph on all nodes within ``k`` hops of ``v`` (``v`` itself is node 0)."""
    if not 0 <= v < g.node_count:
        raise IndexError(f"node {v} out of range for {g.node_count}-node graph")
    if k < 1:
        raise ValueError("k must be >= 1")
    dist = {v: 0}
    queue = deque([v])
    while queue:
        u = queue.popleft()
        if dist[u] == k:
            continue
        for w in g.neighbors(u):
            w = int(w)
            if w not in dist:
                dist[w] = dist[u] + 1
                queue.append(w)
    return g.subgraph(list(dist), name=f"{g.name}:ego{v}")


def degree_sequence(g: Graph) -> list[int]:
    return g.degrees().tolist()


def summary_stats(g: Graph) -> dict:
    n, m = g.node_count, g.edge_count
    return {
        "nodes": n,
        "edges": m,
        "density": 2.0 * m / (n * (n - 1)) if n >= 2 else 0.0,
        "avg_degree": 2.0 * m / n if n >= 1 else 0.0,
    }


MANIFEST_COLUMNS = ("path", "class_label", "time_label")


def load_manifest(path: str | Path) -> GraphDataset:
    """Load a tab-separated manifest with a header naming ``path`` and optionally
    ``class_label`` / ``time_label``. Relative paths resolve against the manifest."""
    path = Path(path)
    with open(path) as fh:
        rows = [ln for ln in fh if ln.strip() and not ln.startswith("#")]
    reader = csv.DictReader(rows, delimiter="\t")
    if reader.fieldnames is None or "path" not in reader.fieldnames:
        raise EdgeListError(f"{path}: manifest header must contain a 'path' column")
    graphs, classes, times = [], [], []
    for lineno, row in enumerate(reader, start=2):
        if not row.get("path"):
            raise EdgeListError(f"{path}:{lineno}: empty path")
        gpath = Path(row["path"])
        if not gpath.is_absolute():
            gpath = path.parent / gpath
        graphs.append(load_edge_list(gpath))
        classes.append(row.get("class_label") or None)
        t = row.get("time_label")
        try:
            times.append(float(t) if t not in (None, "") else None)
        except ValueError:
            raise EdgeListError(f"{path}:{lineno}: bad time label {t!r}") from None
    return GraphDataset(
        graphs,
        class_labels=classes if all(c is not None for c in classes) and classes else None,
        time_labels=times if all(t is not None for t in times) and times else None,
    )


def write_dataset(ds: GraphDataset, directory: str | Path, header: Sequence[str] = ()) -> Path:
    """Write every graph as ``<name>.edges`` plus ``manifest.tsv``; returns the manifest path."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    cols = ["path"]
    if ds.class_labels is not None:
        cols.append("class_label")
    if ds.time_labels is not None:
        cols.append("time_label")
    manifest = directory / "manifest.tsv"
    with open(manifest, "w") as fh:
        for line in header:
            fh.write(f"# {line}\n")
        fh.write("\t".join(cols) + "\n")
        for i, (g, name) in enumerate(zip(ds.graphs, ds.names)):
            fname = f"{name}.edges"
            write_edge_list(g, directory / fname, header)
            row = [fname]
            if ds.class_labels is not None:
                row.append(str(ds.class_labels[i]))
            if ds.time_labels is not None:
                row.append(repr(ds.time_labels[i]))
            fh.write("\t".join(row) + "\n")
    return manifest
