import subprocess
import sys

import numpy as np
import pytest

from netemd import cli
from netemd.distance import read_matrix
from netemd.graph import load_manifest

MODELS = ["ER", "BA", "CONFIG", "GEO3D", "GEO_GENE_DUP", "DD_VAZQUEZ", "DD_ISPOLATOV", "WATTS_STROGATZ"]


def write_grid(path, models=MODELS, n=40, k=4, reps=2, seed=1):
    rows = ["model\tn\tk_avg\treps\tseed_base"] + [f"{m}\t{n}\t{k}\t{reps}\t{seed}" for m in models]
    path.write_text("\n".join(rows) + "\n")
    return path


@pytest.fixture(scope="module")
def dataset(tmp_path_factory):
    root = tmp_path_factory.mktemp("cli")
    grid = write_grid(root / "grid.tsv", models=["ER", "GEO3D", "WATTS_STROGATZ"], reps=3)
    assert cli.main(["generate", "--grid", str(grid), "--out", str(root / "data")]) == 0
    return root


def run(*argv):
    return cli.main([str(a) for a in argv])


def test_generate_eighty_graphs(tmp_path):
    grid = write_grid(tmp_path / "rg1.tsv", reps=1)
    assert run("generate", "--grid", grid, "--reps", 10, "--out", tmp_path / "out") == 0
    files = sorted((tmp_path / "out").glob("*.edges"))
    assert len(files) == 80
    ds = load_manifest(tmp_path / "out" / "manifest.tsv")
    assert len(ds) == 80 and sorted(set(ds.class_labels)) == sorted(MODELS)


def test_generate_deterministic(tmp_path, dataset):
    grid = dataset / "grid.tsv"
    assert run("generate", "--grid", grid, "--out", tmp_path / "again") == 0
    for f in sorted((dataset / "data").iterdir()):
        if f.is_file():
            assert (tmp_path / "again" / f.name).read_bytes() == f.read_bytes()


def test_distance_matrix_file(tmp_path, dataset, capsys):
    manifest = dataset / "data" / "manifest.tsv"
    out = tmp_path / "d.tsv"
    assert run("distance", "--features", "g4", "--manifest", manifest, "--out", out, "--no-cache") == 0
    labels, values, header = read_matrix(out)
    assert len(labels) == 9 and np.array_equal(values, values.T) and np.all(np.diag(values) == 0)
    assert header[0].startswith("netemd ") and any(h.startswith("config_sha256: ") for h in header)
    assert "seed: None" in header and "feature_set: G4" in header
    assert "9x9" in capsys.readouterr().out


def test_distance_byte_identical_across_threads_and_cache(tmp_path, dataset):
    manifest = dataset / "data" / "manifest.tsv"
    outs = []
    for i, extra in enumerate([["--threads", 1], ["--threads", 3, "--cache-dir", tmp_path / "c"],
                               ["--cache-dir", tmp_path / "c"]]):
        outs.append(tmp_path / f"d{i}.tsv")
        assert run("distance", "--features", "S", "--manifest", manifest, "--out", outs[-1], *extra) == 0
    assert outs[0].read_bytes() == outs[1].read_bytes() == outs[2].read_bytes()


def test_sampled_distance_needs_seed(tmp_path, dataset):
    manifest = dataset / "data" / "manifest.tsv"
    with pytest.raises(SystemExit) as e:
        run("distance", "--features", "G3@0.5", "--manifest", manifest, "--out", tmp_path / "d.tsv")
    assert e.value.code == 1
    assert not (tmp_path / "d.tsv").exists()


def test_sampled_distance_records_seed(tmp_path, dataset):
    manifest = dataset / "data" / "manifest.tsv"
    a, b = tmp_path / "a.tsv", tmp_path / "b.tsv"
    run("distance", "--features", "G3", "--sample-fraction", 0.5, "--seed", 4, "--manifest", manifest, "--out", a)
    run("distance", "--features", "G3@0.5", "--seed", 5, "--manifest", manifest, "--out", b)
    ha, hb = read_matrix(a)[2], read_matrix(b)[2]
    assert "seed: 4" in ha and "feature_set: G3@0.5" in ha and "seed: 5" in hb


def test_eval_commands(tmp_path, dataset, capsys):
    manifest = dataset / "data" / "manifest.tsv"
    d = tmp_path / "d.tsv"
    run("distance", "--features", "G4", "--manifest", manifest, "--out", d)
    for cmd, metric in (("eval-pbar", "pbar"), ("eval-auprc", "auprc"), ("eval-knn", "knn1_accuracy")):
        out = tmp_path / f"{cmd}.tsv"
        assert run(cmd, "--matrix", d, "--manifest", manifest, "--dataset", "mini", "--out", out) == 0
        rows = [ln for ln in out.read_text().splitlines() if not ln.startswith("#")]
        assert rows[0] == "metric\tfeature_set\tdataset\tvalue"
        m, fs, ds, value = rows[1].split("\t")
        assert (m, fs, ds) == (metric, "G4", "mini") and 0 <= float(value) <= 1
    assert "pbar" in capsys.readouterr().out


def test_eval_timeorder(tmp_path):
    data = tmp_path / "chain"
    data.mkdir()
    lines = ["path\ttime_label"]
    for t in range(5):
        # a path that grows by one node per step
        (data / f"t{t}.edges").write_text("".join(f"{i} {i + 1}\n" for i in range(t + 3)))
        lines.append(f"t{t}.edges\t{t}")
    (data / "manifest.tsv").write_text("\n".join(lines) + "\n")
    d = tmp_path / "d.tsv"
    assert run("distance", "--features", "DD", "--manifest", data / "manifest.tsv", "--out", d) == 0
    out = tmp_path / "tau.tsv"
    assert run("eval-timeorder", "--matrix", d, "--manifest", data / "manifest.tsv", "--out", out) == 0
    rows = [ln.split("\t") for ln in out.read_text().splitlines() if not ln.startswith("#")][1:]
    assert [r[0] for r in rows] == ["tau_first_alg1", "tau_first_alg2", "tau_last_alg1", "tau_last_alg2", "tau_best"]
    assert all(-1 <= float(r[3]) <= 1 for r in rows)


def test_kernel(tmp_path, dataset):
    manifest = dataset / "data" / "manifest.tsv"
    d = tmp_path / "d.tsv"
    run("distance", "--features", "DD", "--manifest", manifest, "--out", d)
    assert run("kernel", "--matrix", d, "--alpha", 0.5, "--out", tmp_path / "k.tsv") == 0
    labels, k, header = read_matrix(tmp_path / "k.tsv")
    assert np.allclose(np.diag(k), 1) and "alpha: 0.5" in header
    assert run("kernel", "--matrix", d, "--alpha", 1, 10, "--out", tmp_path / "ks") == 0
    assert sorted(p.name for p in (tmp_path / "ks").iterdir()) == ["kernel_alpha1.tsv", "kernel_alpha10.tsv"]


def test_features_command(tmp_path, dataset):
    manifest = dataset / "data" / "manifest.tsv"
    assert run("features", "--features", "G3", "--manifest", manifest, "--out", tmp_path / "f", "--no-cache") == 0
    files = sorted((tmp_path / "f").iterdir())
    assert len(files) == 9 and files[0].read_text().splitlines()[0] == "0\t1\t2\t3"


class TestExitCodes:
    def test_usage_errors(self, tmp_path, capsys):
        with pytest.raises(SystemExit) as e:
            run("distance", "--manifest", "m.tsv")
        assert e.value.code == 1
        with pytest.raises(SystemExit) as e:
            run("distance", "--features", "G9", "--manifest", "m.tsv", "--out", "x")
        assert e.value.code == 1
        with pytest.raises(SystemExit) as e:
            run("distance", "--features", "G4", "--sample-fraction", 2, "--manifest", "m", "--out", "x")
        assert e.value.code == 1
        with pytest.raises(SystemExit) as e:
            run("frobnicate")
        assert e.value.code == 1

    def test_data_errors(self, tmp_path):
        assert run("distance", "--features", "G4", "--manifest", tmp_path / "missing.tsv",
                   "--out", tmp_path / "d.tsv") == 2
        bad = tmp_path / "bad.tsv"
        bad.write_text("ER\t10\n")
        assert run("generate", "--grid", bad, "--out", tmp_path / "g") == 2
        (tmp_path / "x.edges").write_text("0 1 2\n")
        (tmp_path / "m.tsv").write_text("path\nx.edges\n")
        assert run("distance", "--features", "DD", "--manifest", tmp_path / "m.tsv", "--out", tmp_path / "d.tsv") == 2
        assert not (tmp_path / "d.tsv").exists()

    def test_numerical_failure_leaves_no_output(self, tmp_path, dataset, monkeypatch):
        import netemd.features as features

        def broken(g):
            raise FloatingPointError("eigenvalues out of range")

        monkeypatch.setattr(features, "spectra", broken)
        out = tmp_path / "d.tsv"
        code = run("distance", "--features", "S", "--manifest", dataset / "data" / "manifest.tsv",
                   "--out", out, "--no-cache")
        assert code == 3
        assert list(tmp_path.iterdir()) == []

    def test_missing_labels(self, tmp_path, dataset):
        manifest = dataset / "data" / "manifest.tsv"
        d = tmp_path / "d.tsv"
        run("distance", "--features", "DD", "--manifest", manifest, "--out", d)
        assert run("eval-timeorder", "--matrix", d, "--manifest", manifest) == 2


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "netemd", "--version"], capture_output=True, text=True)
    assert res.returncode == 0 and res.stdout.startswith("netemd ")
