"""Per-graph feature extraction and conversion to empirical distributions.

Node features (degrees, graphlet degrees, ego-network graphlet counts) are
integer valued and become unit-width histograms. Laplacian spectra are real
valued and become point-mass distributions.
"""

from __future__ import annotations

import os
import re
import threading
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy import linalg

from .emd import AtomKind, EmpiricalDistribution
from .graph import Graph
from .orbits import N_GRAPHLETS, N_ORBITS, ego_graphlet_counts, orbit_counts

KINDS = ("DD", "G3", "G4", "G5", "E4", "S")
SPECTRAL_TOL = 1e-9

_GRAPHLET_SIZE = {"G3": 3, "G4": 4, "G5": 5}


@dataclass(frozen=True)
class FeatureSetId:
    """A NetEmd feature family plus the fraction of nodes to sample (1 = all)."""

    kind: str
    fraction: float = 1.0

    def __post_init__(self):
        kind = self.kind.upper()
        if kind not in KINDS:
            raise ValueError(f"unknown feature set {self.kind!r}; expected one of {KINDS}")
        if not 0 < self.fraction <= 1:
            raise ValueError("sample fraction must lie in (0, 1]")
        object.__setattr__(self, "kind", kind)

    @classmethod
    def parse(cls, text: str) -> "FeatureSetId":
        """``"g4"`` or ``"G4@0.1"``."""
        m = re.fullmatch(r"\s*(\w+)\s*(?:@\s*([0-9.eE+-]+))?\s*", text)
        if not m:
            raise ValueError(f"cannot parse feature set {text!r}")
        return cls(m.group(1), float(m.group(2)) if m.group(2) else 1.0)

    def feature_names(self) -> list[str]:
        if self.kind == "DD":
            return ["degree"]
        if self.kind in _GRAPHLET_SIZE:
            return [f"orbit{o}" for o in range(N_ORBITS[_GRAPHLET_SIZE[self.kind]])]
        if self.kind == "E4":
            return [f"ego_graphlet{i}" for i in range(N_GRAPHLETS[4])]
        return ["spectrum_L", "spectrum_Lnorm"]

    def __str__(self) -> str:
        return self.kind if self.fraction == 1 else f"{self.kind}@{self.fraction:g}"


@dataclass(frozen=True)
class SpectrumPair:
    laplacian_eigenvalues: np.ndarray
    normalized_eigenvalues: np.ndarray


def _clamp(vals: np.ndarray, lo: float, hi: float, what: str) -> np.ndarray:
    tol = SPECTRAL_TOL * max(1.0, float(np.max(np.abs(vals))) if vals.size else 1.0)
    if vals.size and (vals.min() < lo - tol or vals.max() > hi + tol):
        raise FloatingPointError(f"{what} eigenvalues outside [{lo}, {hi}] beyond tolerance")
    return np.clip(vals, lo, hi)


def spectra(g: Graph) -> SpectrumPair:
    """Eigenvalues of ``L = D - A`` and ``D^-1/2 L D^-1/2`` (isolated nodes get ``D^-1/2 = 0``)."""
    a = g.adjacency_matrix()
    deg = a.sum(axis=1)
    lap = np.diag(deg) - a
    with np.errstate(divide="ignore"):
        inv_sqrt = np.where(deg > 0, 1.0 / np.sqrt(deg), 0.0)
    norm = inv_sqrt[:, None] * lap * inv_sqrt[None, :]
    if g.node_count == 0:
        empty = np.zeros(0)
        return SpectrumPair(empty, empty)
    lam = linalg.eigvalsh(lap)
    lam_n = linalg.eigvalsh(norm)
    return SpectrumPair(
        _clamp(np.sort(lam), 0.0, np.inf, "Laplacian"),
        _clamp(np.sort(lam_n), 0.0, 2.0, "normalized Laplacian"),
    )


def node_feature_matrix(g: Graph, kind: str) -> np.ndarray:
    """Node-by-feature integer matrix for the node-based families."""
    kind = kind.upper()
    if kind == "DD":
        return g.degrees().reshape(-1, 1).astype(np.int64)
    if kind in _GRAPHLET_SIZE:
        return orbit_counts(g, _GRAPHLET_SIZE[kind]).counts
    if kind == "E4":
        return ego_graphlet_counts(g, k=1, max_size=4)
    raise ValueError(f"{kind} is not a node feature family")


def integer_distribution(values) -> EmpiricalDistribution:
    """Unit-bin histogram of integer values; a constant feature becomes a point mass."""
    values = np.asarray(values)
    if values.size and np.all(values == values.flat[0]):
        return EmpiricalDistribution.point(float(values.flat[0]))
    return EmpiricalDistribution.from_values(values, AtomKind.UNIT_BIN)


def feature_distributions(features, feature_set: FeatureSetId | str, sample=None) -> list[EmpiricalDistribution]:
    """One distribution per feature of ``feature_set``.

    ``features`` is a node-by-feature matrix for node families or a
    :class:`SpectrumPair` for ``S``. ``sample`` restricts node features to a
    subset of rows; counts themselves were computed on the whole graph.
    """
    if isinstance(feature_set, str):
        feature_set = FeatureSetId.parse(feature_set)
    if feature_set.kind == "S":
        if sample is not None:
            raise ValueError("node sampling does not apply to spectral features")
        return [EmpiricalDistribution.from_values(features.laplacian_eigenvalues),
                EmpiricalDistribution.from_values(features.normalized_eigenvalues)]
    mat = np.asarray(features)
    if sample is not None:
        sample = np.asarray(sample, dtype=np.int64)
        if sample.size == 0:
            raise ValueError("node sample is empty")
        mat = mat[sample]
    if mat.shape[0] == 0:
        raise ValueError("graph has no nodes")
    return [integer_distribution(mat[:, j]) for j in range(mat.shape[1])]


def sample_nodes(n: int, fraction: float, rng: np.random.Generator) -> np.ndarray | None:
    """Uniform sample without replacement of ``round(fraction * n)`` nodes (at least one)."""
    if fraction >= 1:
        return None
    size = max(1, int(round(fraction * n)))
    return np.sort(rng.choice(n, size=size, replace=False))


class FeatureCache:
    """Feature store keyed by (graph content hash, feature family).

    Kept in memory and, when ``directory`` is given, mirrored to one
    tab-separated file per entry. Graphlet families reuse a cached larger
    family since orbit columns do not depend on the size cap.
    """

    def __init__(self, directory: str | Path | None = None):
        self.directory = Path(directory) if directory is not None else None
        if self.directory is not None:
            self.directory.mkdir(parents=True, exist_ok=True)
        self._mem: dict[tuple[str, str], object] = {}
        self._lock = threading.Lock()

    def _path(self, key: str, kind: str) -> Path:
        return self.directory / f"{key}.{kind}.tsv"

    def get(self, g: Graph, kind: str):
        kind = "S" if kind.upper() == "S" else kind.upper()
        key = g.content_hash()
        for k in self._candidates(kind):
            hit = self._lookup(key, k)
            if hit is not None:
                if k != kind:
                    hit = hit[:, : N_ORBITS[_GRAPHLET_SIZE[kind]]]
                return hit
        value = spectra(g) if kind == "S" else node_feature_matrix(g, kind)
        self._store(key, kind, value)
        return value

    @staticmethod
    def _candidates(kind: str) -> list[str]:
        if kind in _GRAPHLET_SIZE:
            return [k for k in ("G3", "G4", "G5") if _GRAPHLET_SIZE[k] >= _GRAPHLET_SIZE[kind]]
        return [kind]

    def _lookup(self, key: str, kind: str):
        with self._lock:
            if (key, kind) in self._mem:
                return self._mem[(key, kind)]
        if self.directory is None:
            return None
        path = self._path(key, kind)
        if not path.exists():
            return None
        value = read_feature_file(path, kind)
        with self._lock:
            self._mem[(key, kind)] = value
        return value

    def _store(self, key: str, kind: str, value) -> None:
        with self._lock:
            self._mem[(key, kind)] = value
        if self.directory is not None:
            path = self._path(key, kind)
            tmp = path.with_suffix(f".tmp{os.getpid()}.{threading.get_ident()}")
            write_feature_file(tmp, kind, value)
            os.replace(tmp, path)


def write_feature_file(path: str | Path, kind: str, value) -> None:
    with open(path, "w") as fh:
        if kind == "S":
            fh.write("operator\teigenvalues\n")
            for name, vals in (("L", value.laplacian_eigenvalues), ("Lnorm", value.normalized_eigenvalues)):
                fh.write(name + "\t" + " ".join(repr(float(x)) for x in vals) + "\n")
            return
        mat = np.asarray(value)
        fh.write("\t".join(str(i) for i in range(mat.shape[1])) + "\n")
        for row in mat:
            fh.write("\t".join(map(str, row.tolist())) + "\n")


def read_feature_file(path: str | Path, kind: str):
    with open(path) as fh:
        lines = fh.read().splitlines()
    if kind == "S":
        vals = {}
        for line in lines[1:]:
            name, _, rest = line.partition("\t")
            vals[name] = np.array([float(x) for x in rest.split()], dtype=np.float64)
        return SpectrumPair(vals["L"], vals["Lnorm"])
    ncol = len(lines[0].split("\t"))
    if len(lines) == 1:
        return np.zeros((0, ncol), dtype=np.int64)
    return np.array([list(map(int, ln.split("\t"))) for ln in lines[1:]], dtype=np.int64).reshape(-1, ncol)
