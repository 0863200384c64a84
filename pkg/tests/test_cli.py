import json
import subprocess
import sys

import jsonschema
import numpy as np
import pytest

from kummer_forge.cli import main, read_csv_columns, resolve_seed, write_csv_columns
from report_schema import REPORT_SCHEMA

TREE = json.dumps({"nodes": [{"id": 1, "c": 1}, {"id": 2, "c": 1}, {"id": 3, "c": 1}],
                   "edges": [{"u": 1, "v": 2, "c": 1}, {"u": 2, "v": 3, "c": 1}]})


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def _csv(path, header, rows):
    path.write_text(header + "\n" + "\n".join(",".join(map(str, r)) for r in rows) + "\n")
    return str(path)


def test_specfun_example(capsys):
    code, out, _ = run(capsys, "specfun", "u", "--a", "1", "--b", "2", "--z", "2")
    assert code == 0 and out.strip() == "0.5"
    code, out, _ = run(capsys, "specfun", "u", "--a", "2", "--b", "3", "--z", "4", "--log")
    assert code == 0 and float(out) == pytest.approx(np.log(0.0625))


def test_dist_commands(capsys, tmp_path):
    spec = '{"family": "gamma", "shape": 3, "rate": 2}'
    assert run(capsys, "dist", "moment", "--spec", spec, "--s", "1")[1].strip() == "1.5"
    code, out, _ = run(capsys, "dist", "cdf", "--spec", '{"family":"gamma","shape":1,"rate":1}',
                       "--x", str(np.log(2)))
    assert float(out) == pytest.approx(0.5)
    path = tmp_path / "spec.json"
    path.write_text('{"family": "beta", "a": 2, "b": 1}')
    assert float(run(capsys, "dist", "pdf", "--spec", str(path), "--x", "0.5")[1]) == 1.0
    out_csv = tmp_path / "s.csv"
    assert run(capsys, "dist", "sample", "--spec", spec, "--n", "50", "--seed", "3",
               "--out", str(out_csv))[0] == 0
    (vals,) = read_csv_columns(out_csv, ["value"])
    assert vals.size == 50


def test_transform_round_trip_is_lossless(capsys, tmp_path):
    rng = np.random.default_rng(0)
    x, y = rng.gamma(2.0, size=200), rng.gamma(3.0, size=200)
    src = tmp_path / "xy.csv"
    write_csv_columns(str(src), ["x", "y"], [x, y])
    for m in ("hv", "kv"):
        fwd, back = tmp_path / f"{m}_uv.csv", tmp_path / f"{m}_xy.csv"
        assert run(capsys, "transform", m, "--in", str(src), "--out", str(fwd))[0] == 0
        assert run(capsys, "transform", m, "--inverse", "--in", str(fwd),
                   "--out", str(back))[0] == 0
        xb, yb = read_csv_columns(back, ["x", "y"])
        np.testing.assert_allclose(xb, x, rtol=1e-12)
        np.testing.assert_allclose(yb, y, rtol=1e-9)


def test_csv_17_digits_round_trip(tmp_path):
    vals = np.random.default_rng(1).lognormal(0, 5, 1000)
    path = tmp_path / "v.csv"
    write_csv_columns(str(path), ["value"], [vals])
    assert np.array_equal(read_csv_columns(path, ["value"])[0], vals)


def test_transform_bad_input_line_numbered(capsys, tmp_path):
    bad = _csv(tmp_path / "bad.csv", "x,y", [(1, 2), (-1, 2)])
    code, _, err = run(capsys, "transform", "kv", "--in", bad)
    assert code == 2 and "bad.csv:3: x=-1 must be finite and positive" in err


@pytest.mark.parametrize("header,rows,msg", [
    ("x,z", [(1, 2)], "missing y"),
    ("x,y", [(1, "abc")], "is not a number"),
    ("x,y", [(1, 2, 3)], "expected 2 fields"),
    ("x,y", [], "no data rows"),
])
def test_csv_errors(capsys, tmp_path, header, rows, msg):
    path = _csv(tmp_path / "in.csv", header, rows)
    code, _, err = run(capsys, "transform", "hv", "--in", path)
    assert code == 2 and msg in err


def test_kv_inverse_rejects_u_at_one(capsys, tmp_path):
    path = _csv(tmp_path / "uv.csv", "u,v", [(0.5, 1), (1.0, 2)])
    code, _, err = run(capsys, "transform", "kv", "--inverse", "--in", path)
    assert code == 2 and "uv.csv:3" in err


def test_tree_transform_and_sample(capsys, tmp_path):
    src = _csv(tmp_path / "s.csv", "1,2,3", [(1, 1, 1)])
    out = tmp_path / "t.csv"
    assert run(capsys, "tree", "transform", "--tree", TREE, "--root", "1", "--in", src,
               "--out", str(out))[0] == 0
    assert [c[0] for c in read_csv_columns(out, ["1", "2", "3"])] == [3.0, 2.0, 1.0]
    code, out, _ = run(capsys, "tree", "sample", "--tree", TREE, "--a", "4,3,2", "--n", "5",
                       "--seed", "1")
    assert code == 0 and len(out.strip().splitlines()) == 6
    assert run(capsys, "tree", "sample", "--tree", TREE, "--a", "4,3", "--n", "5")[0] == 2
    assert run(capsys, "tree", "transform", "--tree", TREE, "--in", src)[0] == 2


def test_recover_commands(capsys):
    code, out, _ = run(capsys, "recover", "hv-reg", "--alpha", "2", "--beta", "1", "--c", "3")
    doc = json.loads(out)
    assert code == 0
    assert doc["x"] == {"family": "kummer", "a": 2.0, "b": 1.0, "c": 1.0}
    assert doc["y"] == {"family": "gamma", "shape": 3.0, "rate": 1.0}
    code, out, _ = run(capsys, "recover", "kv-reg", "--alpha", "0.5", "--beta", "2", "--c", "1")
    doc = json.loads(out)
    assert doc["x"]["a"] == 1.5 and doc["forward_consistency"]["printed"]["implied_alpha"] == 0.75
    code, out, _ = run(capsys, "recover", "kv-ratio", "--alpha", "0.5", "--beta", "0.6",
                       "--c", "1")
    doc = json.loads(out)
    assert doc["x"]["a"] == pytest.approx(1 / 3) and "consistent" in doc
    code, out, _ = run(capsys, "recover", "hv-ratio", "--alpha", "2", "--beta", "3", "--c", "3")
    assert json.loads(out)["x"]["a"] == pytest.approx(2.0)
    code, _, err = run(capsys, "recover", "hv-reg", "--alpha", "1", "--beta", "1", "--c", "1")
    assert code == 2 and "αβ>1" in err
    code, _, err = run(capsys, "recover", "kv-reg", "--alpha", "1.5", "--beta", "2", "--c", "1")
    assert code == 2 and "0<α<1<β" in err


def test_verify_report_to_stdout_and_file(capsys, tmp_path):
    code, out, err = run(capsys, "verify", "genfn", "--seed", "7")
    assert code == 0 and "genfn: PASS" in err
    jsonschema.validate(json.loads(out), REPORT_SCHEMA)
    path = tmp_path / "r.json"
    code, _, _ = run(capsys, "verify", "kv", "--n", "20000", "--seed", "7", "--workers", "2",
                     "--report", str(path))
    doc = json.loads(path.read_text())
    jsonschema.validate(doc, REPORT_SCHEMA)
    assert code == 0 and doc["seed"] == 7 and doc["n"] == 20000


def test_verify_spec_example(capsys):
    code, out, _ = run(capsys, "verify", "hv", "--a", "2", "--b", "3", "--c", "1",
                       "--n", "100000", "--seed", "7")
    assert code == 0 and json.loads(out)["pass"] is True


def test_verify_failure_exit_code(capsys):
    # The CLI cannot swap an input law, so force a failure with a level few p-values exceed.
    code, out, _ = run(capsys, "verify", "kv", "--n", "5000", "--config",
                       '{"significance": 0.999}')
    assert code == 1 and json.loads(out)["pass"] is False


def test_verify_config_file_and_tree(capsys, tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"tree": json.loads(TREE), "a": [4, 3, 2], "n": 5000}))
    code, out, _ = run(capsys, "verify", "tree", "--config", str(cfg), "--seed", "3")
    assert code == 0 and json.loads(out)["suite"] == "tree"


@pytest.mark.parametrize("argv", [
    ["verify", "hv", "--config", '{"bogus": 1}'],
    ["verify", "hv", "--config", "[1, 2]"],
    ["verify", "hv", "--config", "{bad json"],
    ["verify", "tree"],
    ["verify", "recurrences", "--a", "2"],
    ["verify", "hv", "--a", "-1"],
    ["dist", "pdf", "--spec", '{"family":"gamma","shape":1,"rate":1}'],
    ["dist", "pdf", "--spec", '{"family":"gamma","shape":1,"rate":1}', "--x", "-1"],
    ["dist", "moment", "--spec", '{"family":"gamma","shape":1,"rate":1}', "--s", "-2"],
    ["specfun", "u", "--a", "0", "--b", "1", "--z", "1"],
    ["transform", "hv", "--in", "/nonexistent/file.csv"],
    ["characterize", "--family", "hv", "--in", "/nonexistent/file.csv"],
    ["bogus-command"],
    ["specfun", "u", "--a", "1"],
    ["verify", "hv", "--unknown-flag"],
    ["dist", "sample", "--spec", '{"family":"gamma","shape":1,"rate":1}', "--n", "0"],
])
def test_error_exit_codes(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == 2
    assert err.strip()


def test_help_documents_every_subcommand(capsys):
    code, out, _ = run(capsys, "--help")
    assert code == 0
    for cmd in ("specfun", "dist", "transform", "tree", "recover", "characterize", "verify"):
        assert cmd in out
        assert run(capsys, cmd, "--help")[0] == 0


def test_characterize_command(capsys, tmp_path):
    from kummer_forge.distributions import GammaParams, KummerParams, draw
    from kummer_forge.rng import generator
    x = draw(KummerParams(2, 1, 1), 20_000, generator(1, 1))
    y = draw(GammaParams(3, 1), 20_000, generator(1, 2))
    path = tmp_path / "pairs.csv"
    write_csv_columns(str(path), ["x", "y"], [x, y])
    code, out, _ = run(capsys, "characterize", "--family", "hv", "--in", str(path),
                       "--seed", "2")
    doc = json.loads(out)
    assert code == 0 and doc["details"]["parameters"]["a"] == pytest.approx(2, rel=0.1)
    path_bad = tmp_path / "bad_pairs.csv"
    write_csv_columns(str(path_bad), ["x", "y"],
                      [x, generator(1, 3).lognormal(0.95, 0.55, 20_000)])
    assert run(capsys, "characterize", "--family", "hv", "--in", str(path_bad))[0] == 1


def test_seed_policy(monkeypatch):
    monkeypatch.delenv("KUMMER_FORGE_SEED", raising=False)
    assert resolve_seed(None) == 0xC0FFEE
    monkeypatch.setenv("KUMMER_FORGE_SEED", "0x10")
    assert resolve_seed(None) == 16
    assert resolve_seed(5) == 5


def test_env_seed_reaches_report(capsys, monkeypatch):
    monkeypatch.setenv("KUMMER_FORGE_SEED", "42")
    code, out, _ = run(capsys, "verify", "genfn")
    assert json.loads(out)["seed"] == 42
    monkeypatch.setenv("KUMMER_FORGE_SEED", "notanint")
    assert run(capsys, "verify", "genfn")[0] == 2


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "kummer_forge", "specfun", "u", "--a", "1",
                           "--b", "2", "--z", "2"], capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout.strip() == "0.5"
    proc = subprocess.run([sys.executable, "-m", "kummer_forge", "--nope"],
                          capture_output=True, text=True)
    assert proc.returncode == 2 and "usage" in proc.stderr
