import json
import subprocess
import sys

import pytest

from gaussradon import cli


def _run(tmp_path, *args):
    return cli.main(list(args))


def _write(tmp_path, cfg, name="cfg.json"):
    p = tmp_path / name
    p.write_text(json.dumps(cfg))
    return str(p)


def test_list_registry(capsys):
    assert cli.main(["list"]) == 0
    out = capsys.readouterr().out
    for name in ("weighted-l2", "wiener-sup", "ball", "hull", "coordinate-bump"):
        assert name in out
    assert cli.main(["list", "--json"]) == 0
    data = json.loads(capsys.readouterr().out)
    names = [e["name"] for e in data["functionals"]]
    assert names == sorted(names)


def test_transform_constant(tmp_path):
    out = tmp_path / "o"
    assert cli.main(["transform", "--config", "shipped:transform-constant", "--out", str(out)]) == 0
    rep = json.loads((out / "report.json").read_text())
    assert rep["result"]["estimate"] == 1.0 and rep["result"]["stderr"] == 0.0
    assert rep["config"]["functional"]["name"] == "constant"


def test_seed_override_and_provenance(tmp_path):
    out = tmp_path / "o"
    assert cli.main(["transform", "--config", "shipped:transform-gaussian-weight", "--seed", "99",
                     "--out", str(out)]) == 0
    rep = json.loads((out / "report.json").read_text())
    assert rep["config"]["seed"] == 99 and rep["config"]["samples"] == 100_000


@pytest.mark.parametrize("cfg, field", [
    ({"experiment": "transform", "truncation": 2, "functional": {"name": "constant"},
      "hyperplane": {"normal": [1.0], "offset": 0.0}}, "seed"),
    ({"seed": 1, "truncation": 2, "functional": {"name": "nope"},
      "hyperplane": {"normal": [1.0], "offset": 0.0}}, "functional.name"),
    ({"seed": 1, "truncation": 0, "functional": {"name": "constant"},
      "hyperplane": {"normal": [1.0], "offset": 0.0}}, "truncation"),
    ({"seed": 1, "truncation": 2, "functional": {"name": "constant", "params": {"bogus": 1}},
      "hyperplane": {"normal": [1.0], "offset": 0.0}}, "functional.params"),
    ({"experiment": "sample", "seed": 1}, "experiment"),
])
def test_config_errors(tmp_path, capsys, cfg, field):
    code = cli.main(["transform", "--config", _write(tmp_path, cfg), "--out", str(tmp_path / "o")])
    assert code == 2
    err = capsys.readouterr().err
    assert json.loads(err.strip().splitlines()[-1])["error"]["field"] == field


def test_bad_json(tmp_path):
    p = tmp_path / "bad.json"
    p.write_text("{not json")
    assert cli.main(["transform", "--config", str(p)]) == 2
    assert cli.main(["transform", "--config", str(tmp_path / "missing.json")]) == 2


def test_proof_step_failure_exit_3(tmp_path):
    out = tmp_path / "o"
    assert cli.main(["support", "--config", "shipped:support-inside", "--out", str(out)]) == 3
    rep = json.loads((out / "report.json").read_text())
    assert rep["status"] == "error" and rep["error"]["error"] == "SeparationError"


def test_tolerance_failure_exit_4(tmp_path):
    cfg = cli.load_config("shipped:recover-bump")
    cfg.update(depth=2, samples=2000, tail_samples=2000, cert_samples=2000)
    out = tmp_path / "o"
    assert cli.main(["recover", "--config", _write(tmp_path, cfg), "--out", str(out)]) == 4
    assert json.loads((out / "report.json").read_text())["status"] == "tolerance"


def test_outputs_independent_of_workers(tmp_path):
    cfg = cli.load_config("shipped:disintegrate-logistic")
    cfg.update(lhs_samples=30_000, outer=50, inner=200)
    path = _write(tmp_path, cfg)
    a, b = tmp_path / "a", tmp_path / "b"
    assert cli.main(["disintegrate", "--config", path, "--out", str(a)]) == 0
    assert cli.main(["disintegrate", "--config", path, "--out", str(b), "--workers", "3"]) == 0
    assert (a / "report.json").read_bytes() == (b / "report.json").read_bytes()


def test_sample_csv(tmp_path):
    cfg = {"experiment": "sample", "seed": 3, "truncation": 3, "count": 20_000, "write_samples": 5,
           "subspace": {"anchor": [0.0, 0.0, 1.0], "conormals": [[0.0, 0.0, 1.0]]}}
    out = tmp_path / "o"
    assert cli.main(["sample", "--config", _write(tmp_path, cfg), "--out", str(out)]) == 0
    lines = (out / "samples.csv").read_text().splitlines()
    assert lines[0] == "x0,x1,x2" and len(lines) == 6
    assert all(line.endswith(",1.0") for line in lines[1:])


def test_console_script(tmp_path):
    r = subprocess.run([sys.executable, "-m", "gaussradon.cli", "list"], capture_output=True, text=True)
    assert r.returncode == 0 and "wiener-sup" in r.stdout
