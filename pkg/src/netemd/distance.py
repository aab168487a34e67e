"""NetEmd distances between graphs, distance matrices and Gaussian kernels."""

from __future__ import annotations

import logging
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .emd import EmpiricalDistribution, emd_star
from .features import FeatureCache, FeatureSetId, feature_distributions, sample_nodes
from .graph import Graph, GraphDataset

log = logging.getLogger(__name__)


class FeatureError(RuntimeError):
    """Feature extraction failed for a named graph."""


def _as_feature_set(t) -> FeatureSetId:
    return t if isinstance(t, FeatureSetId) else FeatureSetId.parse(str(t))


def graph_distributions(g: Graph, feature_set, cache: FeatureCache | None = None,
                        sample=None) -> list[EmpiricalDistribution]:
    fs = _as_feature_set(feature_set)
    cache = cache if cache is not None else FeatureCache()
    return feature_distributions(cache.get(g, fs.kind), fs, sample)


def combine(dists_a: Sequence[EmpiricalDistribution], dists_b: Sequence[EmpiricalDistribution],
            weights=None) -> float:
    """Mean (or weighted mean) of per-feature EMD* values."""
    vals = np.array([emd_star(p, q) for p, q in zip(dists_a, dists_b, strict=True)])
    if weights is None:
        return float(vals.mean())
    w = np.asarray(weights, dtype=np.float64)
    if w.shape != vals.shape or np.any(w < 0) or w.sum() <= 0:
        raise ValueError("weights must be non-negative, one per feature, not all zero")
    return float(np.dot(w, vals) / w.sum())


def netemd_single(g_a: Graph, g_b: Graph, feature_set, index: int = 0,
                  cache: FeatureCache | None = None) -> float:
    """NetEmd for one feature: EMD* between the ``index``-th feature distributions."""
    da = graph_distributions(g_a, feature_set, cache)
    db = graph_distributions(g_b, feature_set, cache)
    return emd_star(da[index], db[index])


def netemd_set(g_a: Graph, g_b: Graph, feature_set, cache: FeatureCache | None = None,
               weights=None) -> float:
    """NetEmd over a whole feature family, e.g. ``"G4"`` (15 orbits) or ``"S"`` (two spectra)."""
    cache = cache if cache is not None else FeatureCache()
    return combine(graph_distributions(g_a, feature_set, cache),
                   graph_distributions(g_b, feature_set, cache), weights)


@dataclass
class DistanceMatrix:
    labels: list[str]
    values: np.ndarray
    feature_set: str = ""

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.float64)
        n = len(self.labels)
        if self.values.shape != (n, n):
            raise ValueError(f"expected {n}x{n} matrix, got {self.values.shape}")

    def __len__(self) -> int:
        return len(self.labels)


@dataclass
class KernelMatrix:
    labels: list[str]
    values: np.ndarray
    alpha: float
    min_eigenvalue: float

    @property
    def is_psd(self) -> bool:
        return self.min_eigenvalue >= -1e-10 * max(1, len(self.labels))


def _default_threads() -> int:
    return os.cpu_count() or 1


def distance_matrix(ds: GraphDataset | Sequence[Graph], feature_set, sample_fraction: float | None = None,
                    seed: int = 0, cache: FeatureCache | None = None, threads: int | None = None,
                    weights=None) -> DistanceMatrix:
    """All pairwise NetEmd values.

    Node sub-sampling draws an independent uniform sample for graph ``i`` from
    ``default_rng([seed, i])``, so results do not depend on thread count.
    """
    if not isinstance(ds, GraphDataset):
        ds = GraphDataset(list(ds))
    if len(ds) == 0:
        raise ValueError("dataset is empty")
    fs = _as_feature_set(feature_set)
    if sample_fraction is not None:
        fs = FeatureSetId(fs.kind, sample_fraction)
    cache = cache if cache is not None else FeatureCache()
    threads = threads or _default_threads()

    def prepare(i: int):
        g = ds.graphs[i]
        try:
            feats = cache.get(g, fs.kind)
            sample = None
            if fs.fraction < 1:
                sample = sample_nodes(g.node_count, fs.fraction, np.random.default_rng([seed, i]))
            return feature_distributions(feats, fs, sample)
        except Exception as exc:
            raise FeatureError(f"graph {ds.names[i]!r}: {exc}") from exc

    n = len(ds)
    with ThreadPoolExecutor(max_workers=threads) as pool:
        dists = list(pool.map(prepare, range(n)))

        def row(i: int) -> np.ndarray:
            out = np.zeros(n)
            for j in range(i + 1, n):
                out[j] = combine(dists[i], dists[j], weights)
            return out

        rows = list(pool.map(row, range(n)))
    vals = np.array(rows) if n else np.zeros((0, 0))
    vals = vals + vals.T
    log.debug("computed %d NetEmd_%s pairs", n * (n - 1) // 2, fs)
    return DistanceMatrix(list(ds.names), vals, str(fs))


def gaussian_kernel(dm: DistanceMatrix, alpha: float) -> KernelMatrix:
    """``exp(-alpha * d^2)``; not necessarily positive semidefinite, see ``min_eigenvalue``."""
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    k = np.exp(-alpha * dm.values ** 2)
    min_eig = float(np.linalg.eigvalsh(k)[0]) if len(dm) else 0.0
    return KernelMatrix(list(dm.labels), k, float(alpha), min_eig)


def alpha_grid(lo: float = 1e-3, hi: float = 1e3, num: int = 13) -> np.ndarray:
    return np.logspace(np.log10(lo), np.log10(hi), num)


def write_matrix(path: str | Path, labels: Sequence[str], values: np.ndarray, header: Sequence[str] = ()) -> None:
    """Tab-separated square matrix with a label row and column; floats to 17 significant digits."""
    with open(path, "w") as fh:
        for line in header:
            fh.write(f"# {line}\n")
        fh.write("\t" + "\t".join(labels) + "\n")
        for lab, row in zip(labels, values):
            fh.write(lab + "\t" + "\t".join(f"{x:.17g}" for x in row) + "\n")


def read_matrix(path: str | Path) -> tuple[list[str], np.ndarray, list[str]]:
    """Returns ``(labels, values, header_lines)``."""
    header, rows = [], []
    with open(path) as fh:
        for line in fh:
            line = line.rstrip("\n")
            if line.startswith("#"):
                header.append(line[1:].strip())
            elif line:
                rows.append(line.split("\t"))
    if not rows:
        raise ValueError(f"{path}: no matrix rows")
    labels = rows[0][1:]
    body = rows[1:]
    if [r[0] for r in body] != labels:
        raise ValueError(f"{path}: row labels do not match column labels")
    values = np.array([[float(x) for x in r[1:]] for r in body], dtype=np.float64).reshape(len(labels), len(labels))
    return labels, values, header
