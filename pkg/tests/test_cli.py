import json
import subprocess
import sys

import pytest

from gibbslab import cli

CHAIN3 = {
    "n": 3,
    "terms": [{"support": [0, 1], "paulis": "ZZ"}, {"support": [1, 2], "paulis": "XX", "coeff": 0.5}],
    "field": [{"site": 0, "z": 3.0}, {"site": 2, "matrix": [[0.5, [0, -1]], [[0, 1], -0.5]]}],
}
PROJ = {"n": 2, "terms": [{"support": [0, 1], "matrix": [[0, 0, 0, 0], [0, 0, 0, 0], [0, 0, 0, 0], [0, 0, 0, 1]]}]}


@pytest.fixture
def spec(tmp_path):
    def write(obj, name="h.json"):
        path = tmp_path / name
        path.write_text(obj if isinstance(obj, str) else json.dumps(obj))
        return str(path)

    return write


def test_check_db_passes(spec, tmp_path):
    out = tmp_path / "db.json"
    assert cli.main(["check-db", "--spec", spec(CHAIN3), "--beta", "0.05", "--out", str(out)]) == 0
    data = json.loads(out.read_text())
    db = next(c for c in data["checks"] if c["name"] == "db_defect")
    assert db["computed"] < 1e-8 and data["version"] == "0.1.0"


def test_empty_spec_is_exit_two(spec, capsys):
    assert cli.main(["check-db", "--spec", spec(""), "--beta", "0.05"]) == 2
    assert "line 1 column 1" in capsys.readouterr().err


def test_bad_field_reports_path(spec, capsys):
    bad = {"n": 2, "terms": [{"support": [0, 1], "paulis": "ZQ"}]}
    assert cli.main(["build", "--spec", spec(bad), "--beta", "0.1"]) == 2
    assert "terms[0].paulis" in capsys.readouterr().err


def test_usage_errors(spec):
    assert cli.main(["check-db", "--spec", spec(CHAIN3)]) == 2
    assert cli.main(["nonsense"]) == 2
    assert cli.main(["check-db", "--spec", spec(CHAIN3), "--beta", "0.1", "--tol-overrides", "nope=1"]) == 2


def test_failing_check_is_exit_one(spec, tmp_path):
    args = ["check-db", "--spec", spec(CHAIN3), "--beta", "0.05", "--tol-overrides", "db_defect=0", "--out", str(tmp_path / "r.json")]
    assert cli.main(args) == 1


def test_tolerance_file(spec, tmp_path):
    tol = tmp_path / "tol.json"
    tol.write_text(json.dumps({"db_defect": 1e-3}))
    out = tmp_path / "r.json"
    assert cli.main(["check-db", "--spec", spec(CHAIN3), "--beta", "0.05", "--tol-overrides", str(tol), "--out", str(out)]) == 0
    assert json.loads(out.read_text())["checks"][0]["bound"] == 1e-3


def test_mix_writes_curve(spec, tmp_path):
    out = tmp_path / "mix.json"
    assert cli.main(["mix", "--spec", spec(CHAIN3), "--beta", "0.02", "--eps", "1e-3", "--out", str(out)]) == 0
    rows = (tmp_path / "mix.curve.csv").read_text().splitlines()
    assert rows[0] == "t,trace_distance" and len(rows) > 2
    assert json.loads(out.read_text())["results"]["gap"] > 0


def test_mix_is_deterministic(spec, tmp_path):
    outs = []
    for k in range(2):
        out = tmp_path / f"m{k}.json"
        cli.main(["mix", "--spec", spec(CHAIN3), "--beta", "0.05", "--seed", "7", "--out", str(out)])
        outs.append((tmp_path / f"m{k}.curve.csv").read_text())
    assert outs[0] == outs[1]


def test_params_override(spec, tmp_path):
    params = tmp_path / "p.json"
    params.write_text(json.dumps([[20.0, 20.0, 20.0]] * 3))
    assert cli.main(["build", "--spec", spec(CHAIN3), "--beta", "0.05", "--params", str(params), "--out", str(tmp_path / "b.json")]) == 0
    params.write_text(json.dumps([[20.0, 20.0, 21.0]] * 3))
    assert cli.main(["build", "--spec", spec(CHAIN3), "--beta", "0.05", "--params", str(params)]) == 2


def test_other_subcommands(spec, tmp_path):
    runs = [
        ["lr-shells", "--spec", spec(CHAIN3), "--h", "0,10,1e4", "--r-max", "3"],
        ["kernels", "--beta", "0.05", "--h", "0,100", "--jobs", "2"],
        ["contraction", "--beta", "0.1", "--h", "0.1,10,1e4", "--delta", "0.2"],
        ["clusters", "--spec", spec(CHAIN3), "--beta", "1e-5", "--h", "100", "--origin", "1", "--k-max", "4"],
        ["refrigerate", "--spec", spec(PROJ, "p.json"), "--beta", "0.5", "--ancillas", "2", "--h", "3"],
        ["refrigerate", "--spec", spec(PROJ, "p.json"), "--beta", "0.5", "--regime", "case2"],
        ["build", "--spec", spec(CHAIN3), "--beta", "0.1", "--radius", "1"],
    ]
    for k, args in enumerate(runs):
        out = tmp_path / f"r{k}.json"
        assert cli.main(args + ["--out", str(out)]) == 0, args
        assert json.loads(out.read_text())["passed"]
    hist = (tmp_path / "r4.histogram.csv").read_text().splitlines()
    assert hist[0] == "x,p" and len(hist) == 5


def test_suite_subset_via_module_entry_point(tmp_path):
    out = tmp_path / "suite.json"
    proc = subprocess.run(
        [sys.executable, "-m", "gibbslab", "suite", "--criteria", "2,3,8", "--jobs", "2", "--out", str(out)],
        capture_output=True, text=True,
    )
    assert proc.returncode == 0, proc.stderr
    assert proc.stdout.count("[PASS]") == 3
    assert (tmp_path / "suite.criteria.csv").exists()
