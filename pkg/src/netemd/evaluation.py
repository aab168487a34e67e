"""Scoring a distance matrix: P-bar, AUPRC, time-order recovery and k-NN accuracy."""

from __future__ import annotations

import warnings
from collections import Counter
from dataclasses import dataclass
from typing import Sequence

import numpy as np


def _values(dm) -> np.ndarray:
    return np.asarray(getattr(dm, "values", dm), dtype=np.float64)


def _check_labels(d: np.ndarray, labels) -> np.ndarray:
    labels = np.asarray(labels, dtype=object)
    if d.ndim != 2 or d.shape[0] != d.shape[1] or d.shape[0] != len(labels):
        raise ValueError("distance matrix and labels disagree in size")
    if len(set(labels.tolist())) < 2:
        raise ValueError("need at least two classes")
    return labels


def per_graph_p(dm, class_labels) -> np.ndarray:
    """``P(G)`` for every graph: probability that a random same-class graph is
    closer than a random other-class graph, ties counting one half. ``nan``
    for graphs alone in their class."""
    d = _values(dm)
    labels = _check_labels(d, class_labels)
    n = len(labels)
    out = np.full(n, np.nan)
    for i in range(n):
        same = labels == labels[i]
        same[i] = False
        other = labels != labels[i]
        if not same.any():
            continue
        a = d[i, same]
        b = np.sort(d[i, other])
        less = len(b) - np.searchsorted(b, a, side="right")
        ties = np.searchsorted(b, a, side="right") - np.searchsorted(b, a, side="left")
        out[i] = (less.sum() + 0.5 * ties.sum()) / (len(a) * len(b))
    return out


def pbar(dm, class_labels) -> float:
    """Mean of :func:`per_graph_p` over graphs whose class has another member."""
    p = per_graph_p(dm, class_labels)
    lonely = np.isnan(p)
    if lonely.any():
        warnings.warn(f"{int(lonely.sum())} graph(s) excluded: only member of their class", stacklevel=2)
    if lonely.all():
        raise ValueError("every class has a single member")
    return float(np.mean(p[~lonely]))


def precision_recall(dm, class_labels) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Precision and recall of "similar iff d <= t" over unordered pairs, for each unique distance t."""
    d = _values(dm)
    labels = _check_labels(d, class_labels)
    iu = np.triu_indices(len(labels), k=1)
    dist = d[iu]
    pos = labels[iu[0]] == labels[iu[1]]
    if not pos.any():
        raise ValueError("no same-class pairs")
    order = np.argsort(dist, kind="stable")
    dist, pos = dist[order], pos[order]
    thresholds = np.unique(dist)
    ends = np.searchsorted(dist, thresholds, side="right")
    tp = np.cumsum(pos)[ends - 1]
    precision = tp / ends
    recall = tp / pos.sum()
    return thresholds, precision, recall


def auprc(dm, class_labels) -> float:
    """Area under the precision-recall curve, linear in recall, starting at
    ``(0, precision at the first threshold)``."""
    _, precision, recall = precision_recall(dm, class_labels)
    r = np.concatenate([[0.0], recall])
    p = np.concatenate([[precision[0]], precision])
    return float(np.sum(np.diff(r) * (p[1:] + p[:-1]) / 2))


def kendall_tau(order_a: Sequence[int], order_b: Sequence[int]) -> float:
    """Kendall tau-a between two orderings of the same items (no tie correction)."""
    a = list(order_a)
    if sorted(a) != sorted(order_b) or len(set(a)) != len(a):
        raise ValueError("orderings must be permutations of the same items")
    n = len(a)
    if n < 2:
        raise ValueError("need at least two items")
    pos_b = {item: i for i, item in enumerate(order_b)}
    r = np.array([pos_b[item] for item in a])
    sign = np.sign(r[None, :] - r[:, None])
    return float(np.triu(sign, k=1).sum() / (n * (n - 1) / 2))


def rank_nearest_last(d: np.ndarray, anchor: int) -> list[int]:
    """Grow a ranking by always appending the graph nearest to the last one added."""
    n = len(d)
    order = [anchor]
    left = np.ones(n, dtype=bool)
    left[anchor] = False
    while left.any():
        cand = np.flatnonzero(left)
        nxt = int(cand[np.argmin(d[order[-1], cand])])
        order.append(nxt)
        left[nxt] = False
    return order


def rank_nearest_mean(d: np.ndarray, anchor: int) -> list[int]:
    """Grow a ranking by appending the graph with the smallest mean distance to those ranked so far."""
    n = len(d)
    order = [anchor]
    left = np.ones(n, dtype=bool)
    left[anchor] = False
    total = d[anchor].copy()
    while left.any():
        cand = np.flatnonzero(left)
        nxt = int(cand[np.argmin(total[cand])])
        order.append(nxt)
        left[nxt] = False
        total += d[nxt]
    return order


@dataclass
class RankingResult:
    orderings: dict[tuple[str, int], list[int]]
    taus: dict[tuple[str, int], float]

    @property
    def best_tau(self) -> float:
        return max(self.taus.values())

    @property
    def best(self) -> tuple[str, int]:
        return max(self.taus, key=self.taus.get)


def time_rankings(dm, true_order: Sequence[int]) -> RankingResult:
    """Recover a time ordering from distances with both greedy rules, anchored at the
    first or at the last graph of ``true_order``.

    Orderings grown from the last graph run backwards in time and are
    reversed before scoring. Ties go to the lowest index.
    """
    d = _values(dm)
    true_order = [int(i) for i in true_order]
    n = len(d)
    if n < 3:
        raise ValueError("need at least three graphs")
    if sorted(true_order) != list(range(n)):
        raise ValueError("true_order must be a permutation of the graph indices")
    orderings, taus = {}, {}
    for anchor_name, anchor in (("first", true_order[0]), ("last", true_order[-1])):
        for algo, rule in ((1, rank_nearest_last), (2, rank_nearest_mean)):
            order = rule(d, anchor)
            if anchor_name == "last":
                order = order[::-1]
            orderings[(anchor_name, algo)] = order
            taus[(anchor_name, algo)] = kendall_tau(order, true_order)
    return RankingResult(orderings, taus)


def knn_predict(dm, class_labels, k: int = 1) -> list:
    """Leave-one-out k-nearest-neighbour labels; vote ties go to the label of the single nearest neighbour."""
    d = _values(dm)
    labels = list(class_labels)
    n = len(labels)
    if not 1 <= k < n:
        raise ValueError("need 1 <= k < number of graphs")
    out = []
    for i in range(n):
        cand = np.array([j for j in range(n) if j != i])
        nearest = cand[np.lexsort((cand, d[i, cand]))][:k]
        votes = Counter(labels[j] for j in nearest)
        top = max(votes.values())
        winners = {lab for lab, c in votes.items() if c == top}
        if len(winners) == 1:
            out.append(winners.pop())
        else:
            out.append(next(labels[j] for j in nearest if labels[j] in winners))
    return out


def knn_accuracy(dm, class_labels, k: int = 1) -> float:
    pred = knn_predict(dm, class_labels, k)
    return float(np.mean([p == t for p, t in zip(pred, class_labels)]))
