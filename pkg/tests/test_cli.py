import csv
import io
import json
import subprocess
import sys

import pytest

from rispace.cli import main

COUPLE = json.dumps({"x0": {"kind": "lebesgue", "p": 1}, "x1": {"kind": "lebesgue", "p": 2}})


def run_cli(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_norm_of_indicator(capsys):
    code, out, _ = run_cli(capsys, "norm", "--function", "indicator:0.25",
                           "--space", '{"kind": "lorentz", "p": 2, "q": 1}')
    assert code == 0
    assert json.loads(out)["norm"] == pytest.approx(2 * 0.5)


def test_norm_from_pieces_file(capsys, tmp_path):
    path = tmp_path / "f.json"
    path.write_text(json.dumps([[2.0, 0.5], [-1.0, 0.5]]))
    code, out, _ = run_cli(capsys, "norm", "--function", str(path), "--space", '{"kind": "lebesgue", "p": 1}')
    assert code == 0 and json.loads(out)["norm"] == pytest.approx(1.5)


def test_kfunc_csv(capsys):
    code, out, _ = run_cli(capsys, "kfunc", "--function", "indicator:0.5", "--t", "0.1,0.5,2",
                           "--couple", json.dumps({"x0": {"kind": "lebesgue", "p": 1},
                                                   "x1": {"kind": "lebesgue", "p": "inf"}}),
                           "--format", "csv")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert [float(r["K"]) for r in rows] == pytest.approx([0.1, 0.5, 0.5])


def test_identify_prints_spec_with_provenance(capsys):
    code, out, _ = run_cli(capsys, "identify", "--couple", COUPLE, "--theta", "0.5", "--q", "1")
    d = json.loads(out)
    assert code == 0
    assert d["kind"] == "lorentz_zygmund" and d["p"] == pytest.approx(4 / 3) and d["q"] == 1.0
    assert "case (1)" in d["provenance"]


def test_verify_embedding_csv(capsys):
    cfg = {"mode": "embedding", "source": {"kind": "lebesgue", "p": 4}, "target": {"kind": "lebesgue", "p": 2},
           "family": {"kind": "random", "count": 10}}
    code, out, _ = run_cli(capsys, "verify", "--config", json.dumps(cfg), "--seed", "1")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert len(rows) == 10 and all(r["pass"] == "true" for r in rows)


def test_verify_failing_run_exits_two(capsys):
    cfg = {"mode": "equivalence", "a": {"kind": "lebesgue", "p": 1}, "b": {"kind": "lebesgue", "p": "inf"},
           "family": {"kind": "indicator", "count": 12}, "budget": 10}
    code, _, _ = run_cli(capsys, "verify", "--config", json.dumps(cfg))
    assert code == 2


def test_solve_writes_outputs(capsys, tmp_path):
    prefix = str(tmp_path / "run")
    code, out, _ = run_cli(capsys, "solve", "--dim", "1", "--n", "256", "--p", "3", "--f", "const:1", "--out", prefix)
    assert code == 0
    assert json.loads(out)["max_u"] == pytest.approx(0.2357, rel=1e-3)
    sol = json.loads((tmp_path / "run_solution.json").read_text())
    assert sol["grid"]["n"] == 256 and sol["run"]["converged"]
    grad = json.loads((tmp_path / "run_gradient.json").read_text())
    assert len(grad["vectors"]) == 256


def test_experiment_subcommand_deterministic(capsys):
    cfg = json.dumps({"kind": "table", "samples": 3, "grid": 16})
    _, a, _ = run_cli(capsys, "table", "--config", cfg, "--seed", "5")
    _, b, _ = run_cli(capsys, "table", "--config", cfg, "--seed", "5")
    strip = lambda text: [row[:-1] for row in csv.reader(io.StringIO(text))]
    assert strip(a) == strip(b)
    assert a.splitlines()[0] == "experiment,config_hash,sample_id,norm_src,norm_tgt,ratio,pass,seconds"


@pytest.mark.parametrize("argv", [
    ["teleport"],
    [],
    ["norm", "--function", "indicator:0.5"],
    ["norm", "--function", "wobble:1", "--space", '{"kind": "lebesgue", "p": 1}'],
    ["norm", "--function", "indicator:0.5", "--space", '{"kind": "lebesgue"'],
    ["identify", "--couple", COUPLE, "--theta", "1", "--q", "2", "--alpha", "0.5"],
    ["identify", "--couple", COUPLE, "--theta", "0.5", "--q", "inf"],
    ["holder", "--config", '{"kind": "holder", "colour": "red"}'],
    ["table", "--config", '{"kind": "holder"}'],
    ["verify"],
    ["verify", "--config", '{"mode": "nothing", "family": {"kind": "indicator"}}'],
])
def test_usage_and_config_errors_exit_one(capsys, argv):
    code, _, err = run_cli(capsys, *argv)
    assert code == 1
    assert err


def test_config_error_names_field(capsys):
    _, _, err = run_cli(capsys, "holder", "--config", '{"kind": "holder", "colour": "red"}')
    assert "config.colour" in err


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "rispace", "norm", "--function", "const:2",
                          "--space", '{"kind": "lebesgue", "p": 3}'], capture_output=True, text=True, check=False)
    assert res.returncode == 0 and json.loads(res.stdout)["norm"] == pytest.approx(2.0)


def test_experiment_kind_defaults_to_subcommand(capsys):
    cfg = json.dumps({"variant": "homogeneity", "p": 2, "n": 2, "grid": 8})
    code, out, _ = run_cli(capsys, "bounds", "--config", cfg)
    assert code == 0
    assert out.splitlines()[1].startswith("bounds:homogeneity,")


def test_experiment_kind_mismatch_is_usage_error(capsys):
    cfg = json.dumps({"kind": "holder", "variant": "weak", "p": 3, "n": 2, "grid": 8})
    code, _, err = run_cli(capsys, "bounds", "--config", cfg)
    assert code == 1 and "config.kind" in err
