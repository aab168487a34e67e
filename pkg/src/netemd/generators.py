"""Random graph models used for the synthetic benchmarks.

Each generator is a pure function of its arguments and ``seed``. Models with
a direct edge budget (ER, geometric, geometric gene duplication,
Watts-Strogatz) hit ``round(n * k_avg / 2)`` edges exactly or by
construction; the duplication-divergence models calibrate their free
probability by a grid search and then keep realisations whose mean
degree lands within 5% of the target.
"""

from __future__ import annotations

import enum
import logging
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import product

import numpy as np
from scipy.spatial.distance import pdist

from .graph import Graph, GraphDataset

log = logging.getLogger(__name__)

DD_VAZQUEZ_P = 0.05
WS_REWIRE_P = 0.05
GGD_SEED_POINTS = 5
GGD_RADIUS = 0.1
CALIBRATION_STEP = 0.01
CALIBRATION_SEEDS = 20
MAX_ATTEMPTS = 2000


class CalibrationError(RuntimeError):
    pass


class Model(enum.Enum):
    ER = "ER"
    BA = "BA"
    CONFIG = "CONFIG"
    GEO3D = "GEO3D"
    GEO_GENE_DUP = "GEO_GENE_DUP"
    DD_VAZQUEZ = "DD_VAZQUEZ"
    DD_ISPOLATOV = "DD_ISPOLATOV"
    WATTS_STROGATZ = "WATTS_STROGATZ"


@dataclass(frozen=True)
class ModelSpec:
    model: Model
    n: int
    k_avg: float
    seed: int = 0
    fixed_params: dict = field(default_factory=dict, hash=False, compare=False)

    def __post_init__(self):
        if isinstance(self.model, str):
            object.__setattr__(self, "model", Model(self.model.upper()))
        if self.n < 2:
            raise ValueError("n must be at least 2")
        if not 0 < self.k_avg < self.n - 1 and not (self.n == 2 and self.k_avg == 1):
            raise ValueError(f"k_avg must lie in (0, n-1), got {self.k_avg} for n={self.n}")


def _rng(seed) -> np.random.Generator:
    return np.random.default_rng(seed)


def _target_edges(n: int, k_avg: float) -> int:
    return int(round(n * k_avg / 2))


def _pair_from_index(idx: np.ndarray, n: int) -> np.ndarray:
    # row-major index into the strict upper triangle -> (i, j)
    i = (n - 2 - np.floor(np.sqrt(-8 * idx + 4 * n * (n - 1) - 7) / 2.0 - 0.5)).astype(np.int64)
    j = idx + i + 1 - n * (n - 1) // 2 + (n - i) * ((n - i) - 1) // 2
    return np.column_stack([i, j])


def gen_er(n: int, k_avg: float, seed=None) -> Graph:
    """G(n, m) with ``m = round(n k_avg / 2)`` distinct uniformly chosen edges."""
    m = _target_edges(n, k_avg)
    total = n * (n - 1) // 2
    if m > total:
        raise ValueError(f"{m} edges do not fit in a simple graph on {n} nodes")
    idx = _rng(seed).choice(total, size=m, replace=False)
    return Graph.from_edges(n, _pair_from_index(np.sort(idx), n), f"ER_n{n}_k{k_avg:g}")


def gen_ba(n: int, k_avg: float, seed=None) -> Graph:
    """Preferential attachment: start from a clique on ``m + 1`` nodes, attach ``m = round(k_avg / 2)`` edges per node."""
    m = int(round(k_avg / 2))
    if m < 1 or n <= m:
        raise ValueError(f"need 1 <= m < n, got m={m}, n={n}")
    rng = _rng(seed)
    edges = [(i, j) for i in range(m + 1) for j in range(i + 1, m + 1)]
    # each node appears once per incident edge, so uniform picks are degree-proportional
    ends = np.empty(2 * (len(edges) + m * (n - m - 1)), dtype=np.int64)
    k = 0
    for i, j in edges:
        ends[k] = i
        ends[k + 1] = j
        k += 2
    for v in range(m + 1, n):
        targets: set[int] = set()
        while len(targets) < m:
            targets.add(int(ends[rng.integers(k)]))
        for t in sorted(targets):
            edges.append((t, v))
            ends[k] = t
            ends[k + 1] = v
            k += 2
    return Graph.from_edges(n, edges, f"BA_n{n}_k{k_avg:g}")


def configuration_model(degrees, seed=None, name: str = "") -> Graph:
    """Erased configuration model: random stub matching, self-loops and multi-edges dropped.

    An odd degree sum is fixed by adding one stub to a uniformly chosen node.
    """
    rng = _rng(seed)
    deg = np.asarray(degrees, dtype=np.int64).copy()
    if np.any(deg < 0):
        raise ValueError("degrees must be non-negative")
    if deg.sum() % 2:
        deg[rng.integers(len(deg))] += 1
    stubs = np.repeat(np.arange(len(deg)), deg)
    rng.shuffle(stubs)
    return Graph.from_edges(len(deg), stubs.reshape(-1, 2), name)


def dd_vazquez(n: int, q: float, p: float = DD_VAZQUEZ_P, seed=None, max_edges: int | None = None) -> Graph | None:
    """Vazquez duplication-divergence grown from a single edge.

    The duplicate copies every edge of a random node, joins its parent with
    probability ``p``, and each duplicated pair of edges loses one uniformly
    chosen member with probability ``q``. Returns ``None`` if ``max_edges``
    is exceeded (used to abort runaway calibration runs).
    """
    rng = _rng(seed)
    adj: list[set[int]] = [{1}, {0}]
    m = 1
    for new in range(2, n):
        v = int(rng.integers(new))
        nbrs = list(adj[v])
        adj.append(set())
        for u in nbrs:
            adj[u].add(new)
            adj[new].add(u)
        m += len(nbrs)
        if nbrs:
            drop = rng.random(len(nbrs)) < q
            side = rng.random(len(nbrs)) < 0.5
            for u, d, s in zip(nbrs, drop, side):
                if d:
                    keep_from = new if s else v
                    adj[u].discard(keep_from)
                    adj[keep_from].discard(u)
                    m -= 1
        if rng.random() < p:
            adj[v].add(new)
            adj[new].add(v)
            m += 1
        if max_edges is not None and m > max_edges:
            return None
    return _from_adj(adj, f"DDV_n{n}_q{q:g}")


def dd_ispolatov(n: int, p: float, seed=None, max_edges: int | None = None) -> Graph | None:
    """Ispolatov duplication-divergence grown from a single edge: the duplicate
    links to each neighbour of its parent with probability ``p``."""
    rng = _rng(seed)
    adj: list[set[int]] = [{1}, {0}]
    m = 1
    for new in range(2, n):
        v = int(rng.integers(new))
        nbrs = sorted(adj[v])
        keep = rng.random(len(nbrs)) < p
        adj.append(set())
        for u, k in zip(nbrs, keep):
            if k:
                adj[u].add(new)
                adj[new].add(u)
                m += 1
        if max_edges is not None and m > max_edges:
            return None
    return _from_adj(adj, f"DDI_n{n}_p{p:g}")


def _from_adj(adj: list[set[int]], name: str) -> Graph:
    edges = [(u, w) for u, nb in enumerate(adj) for w in nb if u < w]
    return Graph.from_edges(len(adj), edges, name)


def _calibrate(grow, n: int, k_avg: float, values: np.ndarray, seeds: int) -> float:
    """Grid value whose mean degree over ``seeds`` realisations is closest to ``k_avg``.

    ``values`` is ordered so mean degree increases along it; the sweep stops
    once the mean exceeds ``3 * k_avg``, which avoids growing near-complete
    graphs without changing the argmin for a monotone response.
    """
    cap = int(4 * n * k_avg)
    best, best_err = None, np.inf
    lo_seen = hi_seen = False
    for x in values:
        degs = []
        for s in range(seeds):
            g = grow(n, float(x), [0xCA1, s], cap)
            degs.append(np.inf if g is None else 2.0 * g.edge_count / n)
        mean = float(np.mean(degs))
        lo_seen |= mean <= k_avg
        hi_seen |= mean >= k_avg
        if abs(mean - k_avg) < best_err:
            best, best_err = float(x), abs(mean - k_avg)
        if mean > 3 * k_avg:
            break
    if not (lo_seen and hi_seen):
        raise CalibrationError(f"grid does not bracket mean degree {k_avg} (n={n})")
    return best


def _grid(step: float) -> np.ndarray:
    return np.round(np.arange(0.0, 1.0 + step / 2, step), 10)


@lru_cache(maxsize=None)
def calibrate_dd_vazquez(n: int, k_avg: float, step: float = CALIBRATION_STEP,
                         seeds: int = CALIBRATION_SEEDS) -> float:
    """Divergence probability ``q`` of the Vazquez model for mean degree ``k_avg``."""
    grow = lambda n_, q, s, cap: dd_vazquez(n_, q, seed=s, max_edges=cap)  # noqa: E731
    return _calibrate(grow, n, k_avg, _grid(step)[::-1], seeds)


@lru_cache(maxsize=None)
def calibrate_dd_ispolatov(n: int, k_avg: float, step: float = CALIBRATION_STEP,
                           seeds: int = CALIBRATION_SEEDS) -> float:
    """Retention probability ``p`` of the Ispolatov model for mean degree ``k_avg``."""
    grow = lambda n_, p, s, cap: dd_ispolatov(n_, p, seed=s, max_edges=cap)  # noqa: E731
    return _calibrate(grow, n, k_avg, _grid(step), seeds)


def _conditioned(grow, n: int, k_avg: float, seed) -> Graph:
    # realisations at the calibrated parameter, first one within 5% of k_avg
    cap = int(1.05 * n * k_avg / 2) + 1
    for attempt in range(MAX_ATTEMPTS):
        g = grow([*np.atleast_1d(seed if seed is not None else 0).tolist(), attempt], cap)
        if g is not None and abs(2.0 * g.edge_count / n - k_avg) <= 0.05 * k_avg:
            return g
    raise CalibrationError(f"no realisation within 5% of mean degree {k_avg} after {MAX_ATTEMPTS} tries")


def gen_dd_vazquez(n: int, k_avg: float, seed=None) -> Graph:
    """Vazquez model at the calibrated ``q``, conditioned on mean degree within 5% of ``k_avg``."""
    q = calibrate_dd_vazquez(n, float(k_avg))
    g = _conditioned(lambda s, cap: dd_vazquez(n, q, seed=s, max_edges=cap), n, k_avg, seed)
    return Graph(g.indptr, g.indices, f"DD_VAZQUEZ_n{n}_k{k_avg:g}")


def gen_dd_ispolatov(n: int, k_avg: float, seed=None) -> Graph:
    """Ispolatov model at the calibrated ``p``, conditioned like :func:`gen_dd_vazquez`."""
    p = calibrate_dd_ispolatov(n, float(k_avg))
    g = _conditioned(lambda s, cap: dd_ispolatov(n, p, seed=s, max_edges=cap), n, k_avg, seed)
    return Graph(g.indptr, g.indices, f"DD_ISPOLATOV_n{n}_k{k_avg:g}")


def gen_config_from_dd(n: int, k_avg: float, seed=None) -> Graph:
    """Erased configuration model on the degree sequence of a calibrated Vazquez graph."""
    seeds = _rng(seed).integers(2 ** 63, size=2)
    target = gen_dd_vazquez(n, k_avg, seed=int(seeds[0])).degrees()
    return configuration_model(target, seed=int(seeds[1]), name=f"CONFIG_n{n}_k{k_avg:g}")


def threshold_graph(points: np.ndarray, m: int, name: str = "") -> Graph:
    """Join the ``m`` closest pairs of points (Euclidean), i.e. cut at the m-th smallest distance."""
    n = len(points)
    total = n * (n - 1) // 2
    if m > total:
        raise ValueError(f"{m} edges do not fit in a simple graph on {n} nodes")
    d = pdist(points)
    if m == total:
        idx = np.arange(total)
    else:
        idx = np.argpartition(d, m - 1)[:m] if m else np.zeros(0, dtype=np.int64)
    return Graph.from_edges(n, _pair_from_index(np.sort(idx), n), name)


def gen_geometric3d(n: int, k_avg: float, seed=None) -> Graph:
    pts = _rng(seed).random((n, 3))
    return threshold_graph(pts, min(_target_edges(n, k_avg), n * (n - 1) // 2), f"GEO3D_n{n}_k{k_avg:g}")


def geo_gene_dup_points(n: int, rng: np.random.Generator, n_seed: int = GGD_SEED_POINTS,
                        radius: float = GGD_RADIUS) -> np.ndarray:
    """Points grown by duplication: each new point lands uniformly in a ball around a random existing point."""
    n_seed = min(n_seed, n)
    pts = np.empty((n, 3))
    pts[:n_seed] = rng.random((n_seed, 3))
    for i in range(n_seed, n):
        parent = pts[rng.integers(i)]
        direction = rng.normal(size=3)
        direction /= np.linalg.norm(direction)
        pts[i] = parent + direction * radius * rng.random() ** (1 / 3)
    return pts


def gen_geo_gene_dup(n: int, k_avg: float, seed=None) -> Graph:
    pts = geo_gene_dup_points(n, _rng(seed))
    return threshold_graph(pts, min(_target_edges(n, k_avg), n * (n - 1) // 2), f"GEO_GENE_DUP_n{n}_k{k_avg:g}")


def watts_strogatz(n: int, k_ring: int, p: float, seed=None, name: str = "") -> Graph:
    """Ring lattice with ``k_ring`` neighbours per side; each edge's far end is
    rewired with probability ``p`` to a uniform node, avoiding loops and duplicates."""
    if k_ring < 1 or 2 * k_ring >= n:
        raise ValueError(f"need 1 <= k_ring < n/2, got {k_ring} for n={n}")
    rng = _rng(seed)
    adj = [set() for _ in range(n)]
    lattice = []
    for j in range(1, k_ring + 1):
        for u in range(n):
            w = (u + j) % n
            adj[u].add(w)
            adj[w].add(u)
            lattice.append((u, w))
    for u, w in lattice:
        if rng.random() < p:
            if len(adj[u]) >= n - 1:
                continue
            x = int(rng.integers(n))
            while x == u or x in adj[u]:
                x = int(rng.integers(n))
            adj[u].discard(w)
            adj[w].discard(u)
            adj[u].add(x)
            adj[x].add(u)
    return _from_adj(adj, name)


def gen_watts_strogatz(n: int, k_avg: float, seed=None) -> Graph:
    return watts_strogatz(n, int(round(k_avg / 2)), WS_REWIRE_P, seed, f"WATTS_STROGATZ_n{n}_k{k_avg:g}")


GENERATORS = {
    Model.ER: gen_er,
    Model.BA: gen_ba,
    Model.CONFIG: gen_config_from_dd,
    Model.GEO3D: gen_geometric3d,
    Model.GEO_GENE_DUP: gen_geo_gene_dup,
    Model.DD_VAZQUEZ: gen_dd_vazquez,
    Model.DD_ISPOLATOV: gen_dd_ispolatov,
    Model.WATTS_STROGATZ: gen_watts_strogatz,
}


def generate(spec: ModelSpec) -> Graph:
    return GENERATORS[spec.model](spec.n, spec.k_avg, spec.seed)


def grid(models=tuple(Model), sizes=(1000,), degrees=(10,), seed_base: int = 0) -> list[ModelSpec]:
    """One spec per (model, n, k_avg) cell, seeds derived from ``seed_base``."""
    out = []
    for model, n, k in product(models, sizes, degrees):
        out.append(ModelSpec(Model(model) if isinstance(model, str) else model, n, k, seed_base))
    return out


def gen_suite(spec_grid: list[ModelSpec], reps: int) -> GraphDataset:
    """``reps`` realisations per cell, class-labelled by model.

    Replicate ``r`` of a cell uses seed ``[spec.seed, model index, n, k_avg * 1000, r]``.
    """
    if reps < 1:
        raise ValueError("reps must be >= 1")
    graphs, labels, names = [], [], []
    models = list(Model)
    for spec in spec_grid:
        for r in range(reps):
            seed = [spec.seed, models.index(spec.model), spec.n, int(round(spec.k_avg * 1000)), r]
            g = GENERATORS[spec.model](spec.n, spec.k_avg, seed)
            name = f"{spec.model.value}_n{spec.n}_k{spec.k_avg:g}_r{r}"
            graphs.append(Graph(g.indptr, g.indices, name))
            labels.append(spec.model.value)
            names.append(name)
            log.debug("generated %s (%d edges)", name, g.edge_count)
    return GraphDataset(graphs, class_labels=labels, names=names)


def rewiring_chain(g: Graph, steps: int, fraction: float = 0.01, seed=None) -> list[Graph]:
    """``steps + 1`` graphs; each moves ``fraction`` of the edges of the previous one to random non-edges."""
    rng = _rng(seed)
    n = g.node_count
    edges = {tuple(e) for e in g.edges().tolist()}
    k = max(1, int(round(fraction * len(edges))))
    chain = [Graph(g.indptr, g.indices, f"{g.name}_t0")]
    for t in range(1, steps + 1):
        ordered = sorted(edges)
        for idx in rng.choice(len(ordered), size=k, replace=False):
            edges.discard(ordered[idx])
        added = 0
        while added < k:
            a, b = sorted(int(x) for x in rng.integers(n, size=2))
            if a != b and (a, b) not in edges:
                edges.add((a, b))
                added += 1
        chain.append(Graph.from_edges(n, sorted(edges), f"{g.name}_t{t}"))
    return chain
