import json
import os

import numpy as np
import pytest

from plsbound.cli import main
from plsbound.synth import generate_problem


def read_table(path):
    with open(path) as fh:
        lines = [ln for ln in fh if not ln.startswith("#")]
    header = lines[0].strip().split(",")
    return header, [ln.strip().split(",") for ln in lines[1:]]


def tree_bytes(d):
    return {f: open(os.path.join(d, f), "rb").read() for f in sorted(os.listdir(d))}


@pytest.fixture(scope="module")
def synth_dir(tmp_path_factory):
    out = tmp_path_factory.mktemp("synth")
    assert main(["synth", "--scenario", "1", "--n", "1000", "--seed", "7", "--out", str(out)]) == 0
    return out


def test_synth_outputs(synth_dir):
    hx, rx = read_table(synth_dir / "X.csv")
    hy, ry = read_table(synth_dir / "y.csv")
    assert len(hx) == 30 and len(rx) == 1000 and hy == ["y"] and len(ry) == 1000
    meta = json.loads((synth_dir / "meta.json").read_text())
    assert meta["scenario"] == 1 and meta["d"] == 30


def test_synth_is_byte_identical(synth_dir, tmp_path):
    assert main(["synth", "--scenario", "1", "--n", "1000", "--seed", "7", "--out", str(tmp_path)]) == 0
    assert tree_bytes(tmp_path) == tree_bytes(synth_dir)


def test_synth_scenario_five_metadata(tmp_path):
    assert main(["synth", "--scenario", "5", "--n", "200", "--seed", "1", "--out", str(tmp_path)]) == 0
    lam = np.array(json.loads((tmp_path / "meta.json").read_text())["realized_eigenvalues"])
    small = lam[lam < 1.0]
    assert small.size == 10 and np.all(small > 0) and abs(small.mean() - 0.2) < 0.1


def test_synth_from_config_file(tmp_path):
    cfg = tmp_path / "sc.txt"
    cfg.write_text("id = 11\nblock = 4 normal 2 0.1\nblock = 3 spaced 5 6\n")
    out = tmp_path / "o"
    assert main(["synth", "--scenario-file", str(cfg), "--n", "50", "--out", str(out)]) == 0
    assert len(read_table(out / "X.csv")[0]) == 7


def test_fit_pls_matches_ols(synth_dir, tmp_path):
    args = ["fit", "--data", str(synth_dir / "X.csv"), "--y", str(synth_dir / "y.csv"), "--no-scale"]
    assert main(args + ["--method", "pls", "--out", str(tmp_path / "pls")]) == 0
    assert main(args + ["--method", "ols", "--out", str(tmp_path / "ols")]) == 0
    _, pls = read_table(tmp_path / "pls" / "coefficients.csv")
    _, ols = read_table(tmp_path / "ols" / "coefficients.csv")
    assert len(pls) == 30 and len(ols) == 1
    np.testing.assert_allclose(np.array(pls[-1][1:], float), np.array(ols[0][1:], float), rtol=1e-6)


def test_fit_pcr_nested(synth_dir, tmp_path):
    args = ["fit", "--data", str(synth_dir / "X.csv"), "--y", str(synth_dir / "y.csv")]
    assert main(args + ["--method", "pcr", "--lmax", "3", "--out", str(tmp_path)]) == 0
    _, rows = read_table(tmp_path / "summary.csv")
    r2 = [float(r[1]) for r in rows]
    assert len(r2) == 3 and r2 == sorted(r2)


def test_fit_with_response_column(tmp_path):
    rng = np.random.default_rng(0)
    x = rng.standard_normal((40, 3))
    y = x @ [1.0, 2.0, 3.0] + 0.1 * rng.standard_normal(40)
    path = tmp_path / "d.csv"
    path.write_text("a,b,c,target\n" + "\n".join(",".join(repr(float(v)) for v in (*r, t)) for r, t in zip(x, y)))
    assert main(["fit", "--data", str(path), "--response", "target", "--out", str(tmp_path / "o")]) == 0
    assert main(["fit", "--data", str(path), "--response", "nope", "--out", str(tmp_path / "o")]) == 1


def bound_values(out):
    _, rows = read_table(out / "bound.csv")
    return np.array([float(r[1]) for r in rows])


def test_bound_running_example(tmp_path):
    ev = tmp_path / "ev.txt"
    ev.write_text("1, 4\n")
    assert main(["bound", "--eigenvalues", str(ev), "--lmax", "1", "--out", str(tmp_path)]) == 0
    assert bound_values(tmp_path)[0] == pytest.approx(9 / 17, rel=1e-12)


def test_bound_constant_spectrum(tmp_path):
    ev = tmp_path / "ev.txt"
    ev.write_text("3 3 3 3 3\n")
    assert main(["bound", "--eigenvalues", str(ev), "--lmax", "4", "--out", str(tmp_path)]) == 0
    np.testing.assert_allclose(bound_values(tmp_path), 0.0, atol=1e-12)


def test_bound_two_cluster_spectrum(tmp_path):
    lam = generate_problem(3, n=1000, seed=1).realized_eigenvalues
    ev = tmp_path / "ev.txt"
    ev.write_text("\n".join(repr(float(v)) for v in lam))
    assert main(["bound", "--eigenvalues", str(ev), "--out", str(tmp_path)]) == 0
    c = bound_values(tmp_path)
    assert c.size == 10 and c[1] < 0.1 * c[0]


def test_bound_from_data(synth_dir, tmp_path):
    args = ["bound", "--data", str(synth_dir / "X.csv"), "--y", str(synth_dir / "y.csv"), "--out", str(tmp_path)]
    assert main(args) == 0
    c = bound_values(tmp_path)
    assert np.all(np.diff(c) <= 0)


def test_experiment_outputs_and_determinism(tmp_path):
    args = ["experiment", "--scenarios", "2", "3", "--seeds", "2", "--lmax", "3", "--n", "200"]
    assert main(args + ["--out", str(tmp_path / "a")]) == 0
    assert main(args + ["--jobs", "2", "--out", str(tmp_path / "b")]) == 0
    assert tree_bytes(tmp_path / "a") == tree_bytes(tmp_path / "b")
    header, rows = read_table(tmp_path / "a" / "records.csv")
    assert header[:3] == ["scenario", "seed", "l"] and len(rows) == 12
    _, agg = read_table(tmp_path / "a" / "aggregate.csv")
    assert len(agg) == 6


def test_error_exit_codes(tmp_path, capsys):
    assert main(["bound", "--eigenvalues", str(tmp_path / "missing.txt"), "--out", str(tmp_path)]) == 1
    err = capsys.readouterr().err
    assert err.startswith("plsbound bound: error:") and err.count("\n") == 1
    assert main(["fit", "--data", str(tmp_path / "missing.csv"), "--response", "y", "--out", str(tmp_path)]) == 1
    assert main(["bound", "--out", str(tmp_path)]) == 1
    with pytest.raises(SystemExit) as exc:
        main(["synth", "--scenario", "1"])  # --out missing
    assert exc.value.code != 0


def test_console_script_entry_point():
    from importlib.metadata import entry_points

    eps = [ep for ep in entry_points(group="console_scripts") if ep.name == "plsbound"]
    assert eps and eps[0].value == "plsbound.cli:main"
