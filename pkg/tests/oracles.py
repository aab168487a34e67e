"""Slow, independent reference implementations used only by the tests."""

import itertools

import networkx as nx
import numpy as np
from scipy.optimize import linprog
from sklearn.metrics import roc_auc_score

from netemd.emd import emd
from netemd.orbits import N_GRAPHLETS, N_ORBITS, graphlet_catalogue


def _catalogue_graphs():
    out = []
    for gl in graphlet_catalogue():
        h = nx.Graph()
        h.add_nodes_from(range(gl.size))
        h.add_edges_from(gl.edges)
        out.append((gl, h))
    return out


def to_networkx(g) -> nx.Graph:
    h = nx.Graph()
    h.add_nodes_from(range(g.node_count))
    h.add_edges_from(map(tuple, g.edges().tolist()))
    return h


def brute_force_orbits(g, max_size: int = 5):
    """Visit every node subset, keep the connected induced ones, and classify
    each member's position with a networkx isomorphism onto the catalogue."""
    ng = to_networkx(g)
    cat = _catalogue_graphs()
    counts = np.zeros((g.node_count, N_ORBITS[max_size]), dtype=np.int64)
    census = np.zeros(N_GRAPHLETS[max_size], dtype=np.int64)
    for size in range(2, max_size + 1):
        for nodes in itertools.combinations(range(g.node_count), size):
            sub = ng.subgraph(nodes)
            if not nx.is_connected(sub):
                continue
            for gl, h in cat:
                if gl.size != size or h.number_of_edges() != sub.number_of_edges():
                    continue
                gm = nx.algorithms.isomorphism.GraphMatcher(sub, h)
                if gm.is_isomorphic():
                    census[gl.id] += 1
                    for v, w in gm.mapping.items():
                        counts[v, gl.node_orbits[w]] += 1
                    break
            else:
                raise AssertionError(f"no catalogue graphlet matches {sorted(sub.edges())}")
    return counts, census


def lp_emd(xa, wa, xb, wb) -> float:
    """Optimal transport cost |x - y| between two discrete measures by linear programming."""
    na, nb = len(xa), len(xb)
    cost = np.abs(np.subtract.outer(xa, xb)).ravel()
    a_eq = np.zeros((na + nb, na * nb))
    for i in range(na):
        a_eq[i, i * nb:(i + 1) * nb] = 1
    for j in range(nb):
        a_eq[na + j, j::nb] = 1
    res = linprog(cost, A_eq=a_eq, b_eq=np.concatenate([wa, wb]), bounds=(0, None), method="highs")
    assert res.status == 0
    return float(res.fun)


def grid_emd_star(p, q, step: float = 1e-3, refine: int = 3) -> float:
    """EMD* by brute-force search over the shift: a coarse grid over the full
    bracket, then successively finer grids around the best point."""
    ph, qh = p.rescaled(), q.rescaled()
    lo = qh.support()[0] - ph.support()[1]
    hi = qh.support()[1] - ph.support()[0]
    f = lambda c: emd(ph.translate(c), qh)
    grid = np.arange(lo, hi + step, step)
    vals = [f(c) for c in grid]
    best = grid[int(np.argmin(vals))]
    for _ in range(refine):
        width = step
        step /= 100
        grid = np.arange(best - width, best + width + step, step)
        vals = [f(c) for c in grid]
        best = grid[int(np.argmin(vals))]
    return float(min(vals))


def pbar_by_auroc(d: np.ndarray, labels) -> float:
    """Mean over graphs of the ROC AUC of ranking every other graph by closeness,
    with same-class graphs as positives."""
    labels = np.asarray(labels)
    scores = []
    for i in range(len(labels)):
        others = np.arange(len(labels)) != i
        y = labels[others] == labels[i]
        if y.sum() == 0 or y.sum() == len(y):
            continue
        scores.append(roc_auc_score(y, -d[i, others]))
    return float(np.mean(scores))


def auprc_reference(d: np.ndarray, labels) -> float:
    """Literal quadruple loop: for each threshold taken from the pair list, classify every pair."""
    n = len(labels)
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    thresholds = sorted({d[i, j] for i, j in pairs})
    n_pos = sum(labels[i] == labels[j] for i, j in pairs)
    points = []
    for t in thresholds:
        tp = fp = 0
        for i in range(n):
            for j in range(i + 1, n):
                if d[i, j] <= t:
                    if labels[i] == labels[j]:
                        tp += 1
                    else:
                        fp += 1
        points.append((tp / n_pos, tp / (tp + fp)))
    area, prev_r, prev_p = 0.0, 0.0, points[0][1]
    for r, p in points:
        area += (r - prev_r) * (p + prev_p) / 2
        prev_r, prev_p = r, p
    return area
