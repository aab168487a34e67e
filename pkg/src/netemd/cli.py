"""Command-line interface: ``netemd <command> [options]``.

Commands chain through files on disk::

    netemd generate --grid grid.tsv --out data/
    netemd distance --features g4 --manifest data/manifest.tsv --out d.tsv
    netemd eval-pbar --matrix d.tsv --manifest data/manifest.tsv --out scores.tsv

Every output carries ``#`` provenance lines (tool version, a hash of the
options that affect the result, and the seed). Exit codes: 0 success,
1 usage error, 2 data error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import logging
import os
import shutil
import sys
import tempfile
from pathlib import Path

import numpy as np

from . import __version__
from .distance import DistanceMatrix, FeatureError, distance_matrix, gaussian_kernel, read_matrix, write_matrix
from .evaluation import auprc, knn_accuracy, pbar, time_rankings
from .features import FeatureCache, FeatureSetId, write_feature_file
from .generators import CalibrationError, ModelSpec, gen_suite
from .graph import EdgeListError, GraphDataset, load_manifest, write_dataset

log = logging.getLogger("netemd")

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_NUMERIC = 0, 1, 2, 3

# options that never change the contents of an output
_NOT_HASHED = {"out", "threads", "cache_dir", "no_cache", "verbose", "func", "command"}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def provenance(args: argparse.Namespace) -> list[str]:
    cfg = {k: v for k, v in sorted(vars(args).items()) if k not in _NOT_HASHED}
    cfg["command"] = args.command
    blob = json.dumps(cfg, sort_keys=True, default=str).encode()
    return [f"netemd {__version__}", f"command: {args.command}",
            f"config_sha256: {hashlib.sha256(blob).hexdigest()}", f"seed: {getattr(args, 'seed', None)}"]


def atomic_write(path: Path, write) -> None:
    """Call ``write(tmp_path)`` and move the result into place; nothing is left behind on failure."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", dir=path.parent)
    os.close(fd)
    try:
        write(tmp)
        os.replace(tmp, path)
    except BaseException:
        Path(tmp).unlink(missing_ok=True)
        raise


def _cache(args, manifest: Path) -> FeatureCache:
    if args.no_cache:
        return FeatureCache()
    return FeatureCache(args.cache_dir or manifest.parent / ".netemd-cache")


def _load_dataset(path) -> GraphDataset:
    ds = load_manifest(path)
    if len(ds) == 0:
        raise EdgeListError(f"{path}: manifest lists no graphs")
    return ds


def read_grid(path) -> list[tuple[ModelSpec, int]]:
    """Rows ``model n k_avg reps seed_base`` (tab separated, header optional)."""
    out = []
    with open(path) as fh:
        rows = [r for r in csv.reader((ln for ln in fh if ln.strip() and not ln.startswith("#")), delimiter="\t")]
    if rows and rows[0][0].strip().lower() == "model":
        rows = rows[1:]
    for i, row in enumerate(rows, start=1):
        if len(row) != 5:
            raise EdgeListError(f"{path}: grid row {i} needs 5 fields, got {len(row)}")
        model, n, k, reps, seed = (x.strip() for x in row)
        try:
            out.append((ModelSpec(model, int(n), float(k), int(seed)), int(reps)))
        except ValueError as exc:
            raise EdgeListError(f"{path}: grid row {i}: {exc}") from None
    if not out:
        raise EdgeListError(f"{path}: empty grid")
    return out


def cmd_generate(args) -> int:
    cells = read_grid(args.grid)
    graphs, labels, names = [], [], []
    for spec, reps in cells:
        if args.seed is not None:
            spec = ModelSpec(spec.model, spec.n, spec.k_avg, args.seed)
        part = gen_suite([spec], args.reps or reps)
        graphs += part.graphs
        labels += part.class_labels
        names += part.names
    if len(set(names)) != len(names):
        raise EdgeListError("grid produces duplicate graph names; merge repeated cells")
    ds = GraphDataset(graphs, class_labels=labels, names=names)
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    tmp = Path(tempfile.mkdtemp(prefix=f".{out.name}.", dir=out.parent))
    try:
        write_dataset(ds, tmp, provenance(args))
        out.mkdir(exist_ok=True)
        for f in sorted(tmp.iterdir()):
            os.replace(f, out / f.name)
    finally:
        shutil.rmtree(tmp, ignore_errors=True)
    print(f"wrote {len(ds)} graphs to {out}")
    return EXIT_OK


def cmd_features(args) -> int:
    fs = args.features
    manifest = Path(args.manifest)
    ds = _load_dataset(manifest)
    cache = _cache(args, manifest)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for g, name in zip(ds.graphs, ds.names):
        try:
            value = cache.get(g, fs.kind)
        except (ValueError, FloatingPointError) as exc:
            raise FeatureError(f"graph {name!r}: {exc}") from exc
        atomic_write(out / f"{name}.{fs.kind}.tsv", lambda p, v=value: write_feature_file(p, fs.kind, v))
    print(f"wrote {fs.kind} features for {len(ds)} graphs to {out}")
    return EXIT_OK


def cmd_distance(args) -> int:
    fs = args.features
    if args.sample_fraction is not None:
        fs = FeatureSetId(fs.kind, args.sample_fraction)
    manifest = Path(args.manifest)
    ds = _load_dataset(manifest)
    dm = distance_matrix(ds, fs, seed=args.seed, cache=_cache(args, manifest), threads=args.threads)
    header = provenance(args) + [f"feature_set: {dm.feature_set}"]
    atomic_write(args.out, lambda p: write_matrix(p, dm.labels, dm.values, header))
    print(f"wrote {len(dm)}x{len(dm)} NetEmd_{dm.feature_set} matrix to {args.out}")
    return EXIT_OK


def cmd_kernel(args) -> int:
    labels, values, _ = read_matrix(args.matrix)
    dm = DistanceMatrix(labels, values)
    alphas = args.alpha
    out = Path(args.out)
    targets = [out] if len(alphas) == 1 else [out / f"kernel_alpha{a:g}.tsv" for a in alphas]
    for alpha, target in zip(alphas, targets):
        km = gaussian_kernel(dm, alpha)
        header = provenance(args) + [f"alpha: {alpha!r}", f"min_eigenvalue: {km.min_eigenvalue!r}",
                                     f"psd: {km.is_psd}"]
        atomic_write(target, lambda p, km=km, h=header: write_matrix(p, km.labels, km.values, h))
        print(f"alpha={alpha:g}\tmin_eigenvalue={km.min_eigenvalue:.6g}\tpsd={km.is_psd}")
    return EXIT_OK


def _matrix_and_dataset(args):
    labels, values, header = read_matrix(args.matrix)
    ds = _load_dataset(args.manifest)
    index = {name: i for i, name in enumerate(ds.names)}
    missing = [lab for lab in labels if lab not in index]
    if missing:
        raise EdgeListError(f"matrix labels not in manifest: {missing[:5]}")
    order = [index[lab] for lab in labels]
    feature_set = next((h.split(":", 1)[1].strip() for h in header if h.startswith("feature_set:")), "")
    return values, ds, order, feature_set


def _dataset_name(args) -> str:
    return args.dataset or Path(args.manifest).parent.name or "dataset"


def _write_scores(args, rows: list[tuple[str, str, str, float]]) -> None:
    def write(p):
        with open(p, "w") as fh:
            for line in provenance(args):
                fh.write(f"# {line}\n")
            fh.write("metric\tfeature_set\tdataset\tvalue\n")
            for metric, fs, dataset, value in rows:
                fh.write(f"{metric}\t{fs}\t{dataset}\t{value:.17g}\n")
    if args.out:
        atomic_write(args.out, write)
    width = max(len(r[0]) for r in rows)
    for metric, fs, dataset, value in rows:
        print(f"{metric:<{width}}  {fs:<6} {dataset:<16} {value:.6f}")


def _class_labels(ds: GraphDataset, order: list[int]) -> list[str]:
    if ds.class_labels is None:
        raise EdgeListError("manifest has no class_label column")
    return [ds.class_labels[i] for i in order]


def cmd_eval_pbar(args) -> int:
    values, ds, order, fs = _matrix_and_dataset(args)
    _write_scores(args, [("pbar", fs, _dataset_name(args), pbar(values, _class_labels(ds, order)))])
    return EXIT_OK


def cmd_eval_auprc(args) -> int:
    values, ds, order, fs = _matrix_and_dataset(args)
    _write_scores(args, [("auprc", fs, _dataset_name(args), auprc(values, _class_labels(ds, order)))])
    return EXIT_OK


def cmd_eval_knn(args) -> int:
    values, ds, order, fs = _matrix_and_dataset(args)
    acc = knn_accuracy(values, _class_labels(ds, order), args.k)
    _write_scores(args, [(f"knn{args.k}_accuracy", fs, _dataset_name(args), acc)])
    return EXIT_OK


def cmd_eval_timeorder(args) -> int:
    values, ds, order, fs = _matrix_and_dataset(args)
    if ds.time_labels is None:
        raise EdgeListError("manifest has no time_label column")
    times = [ds.time_labels[i] for i in order]
    true_order = sorted(range(len(times)), key=lambda i: times[i])
    res = time_rankings(values, true_order)
    name = _dataset_name(args)
    rows = [(f"tau_{anchor}_alg{algo}", fs, name, tau) for (anchor, algo), tau in res.taus.items()]
    rows.append(("tau_best", fs, name, res.best_tau))
    _write_scores(args, rows)
    return EXIT_OK


def _feature_set(text: str) -> FeatureSetId:
    try:
        return FeatureSetId.parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="netemd", description="NetEmd network comparison.")
    p.add_argument("--version", action="version", version=f"netemd {__version__}")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    g = sub.add_parser("generate", help="generate a random-graph suite from a grid file")
    g.add_argument("--grid", required=True, help="TSV rows: model n k_avg reps seed_base")
    g.add_argument("--reps", type=int, help="override the reps column")
    g.add_argument("--seed", type=int, help="override the seed_base column")
    g.add_argument("--out", required=True, help="output directory")
    g.set_defaults(func=cmd_generate)

    def cache_opts(sp):
        sp.add_argument("--cache-dir", help="feature cache directory (default: <manifest dir>/.netemd-cache)")
        sp.add_argument("--no-cache", action="store_true", help="keep features in memory only")

    f = sub.add_parser("features", help="extract per-node features or spectra")
    f.add_argument("--features", required=True, type=_feature_set, help="DD, G3, G4, G5, E4 or S")
    f.add_argument("--manifest", required=True)
    f.add_argument("--out", required=True, help="output directory")
    cache_opts(f)
    f.set_defaults(func=cmd_features)

    d = sub.add_parser("distance", help="pairwise NetEmd distance matrix")
    d.add_argument("--features", required=True, type=_feature_set, help="feature set, e.g. g4 or G4@0.1")
    d.add_argument("--manifest", required=True)
    d.add_argument("--out", required=True)
    d.add_argument("--sample-fraction", type=float, help="fraction of nodes sampled per graph")
    d.add_argument("--seed", type=int, help="node-sampling seed (required when sampling)")
    d.add_argument("--threads", type=int, help="worker threads (default: all cores)")
    cache_opts(d)
    d.set_defaults(func=cmd_distance)

    k = sub.add_parser("kernel", help="Gaussian kernel exp(-alpha d^2) from a distance matrix")
    k.add_argument("--matrix", required=True)
    k.add_argument("--alpha", type=float, nargs="+", required=True,
                   help="one value writes --out as a file; several write one file each into --out")
    k.add_argument("--out", required=True)
    k.set_defaults(func=cmd_kernel)

    for name, func, help_ in (
        ("eval-pbar", cmd_eval_pbar, "P-bar class separation score"),
        ("eval-auprc", cmd_eval_auprc, "area under the precision-recall curve"),
        ("eval-timeorder", cmd_eval_timeorder, "time-order recovery (Kendall tau)"),
        ("eval-knn", cmd_eval_knn, "leave-one-out k-NN accuracy"),
    ):
        e = sub.add_parser(name, help=help_)
        e.add_argument("--matrix", required=True)
        e.add_argument("--manifest", required=True, help="supplies class or time labels")
        e.add_argument("--dataset", help="dataset name for the score rows")
        e.add_argument("--out", help="score TSV (printed only if omitted)")
        if name == "eval-knn":
            e.add_argument("--k", type=int, default=1)
        e.set_defaults(func=func)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if getattr(args, "threads", None) is not None and args.threads < 1:
        parser.error("--threads must be >= 1")
    if getattr(args, "sample_fraction", None) is not None and not 0 < args.sample_fraction <= 1:
        parser.error("--sample-fraction must lie in (0, 1]")
    if getattr(args, "reps", None) is not None and args.reps < 1:
        parser.error("--reps must be >= 1")
    if getattr(args, "k", None) is not None and args.k < 1:
        parser.error("--k must be >= 1")
    if args.command == "distance" and args.seed is None and \
            (args.sample_fraction if args.sample_fraction is not None else args.features.fraction) < 1:
        parser.error("--seed is required when sub-sampling nodes")
    if args.command == "kernel" and any(a <= 0 for a in args.alpha):
        parser.error("--alpha values must be positive")
    try:
        return args.func(args)
    except (FloatingPointError, np.linalg.LinAlgError) as exc:
        print(f"netemd: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except FeatureError as exc:
        code = EXIT_NUMERIC if isinstance(exc.__cause__, (FloatingPointError, np.linalg.LinAlgError)) else EXIT_DATA
        print(f"netemd: {exc}", file=sys.stderr)
        return code
    except (OSError, ValueError, KeyError, CalibrationError) as exc:
        print(f"netemd: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
