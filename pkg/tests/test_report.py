import json

import numpy as np

from gibbslab.report import ExperimentReport, check, json_safe, make_rng


def test_make_rng_is_keyed_and_reproducible():
    a = make_rng(3, 1, 2).normal(size=4)
    b = make_rng(3, 1, 2).normal(size=4)
    c = make_rng(3, 1, 3).normal(size=4)
    assert (a == b).all() and not (a == c).all()
    assert isinstance(make_rng(0).bit_generator, np.random.Philox)


def test_check_relations():
    assert check("x", 1.0, "<=", 2.0).passed
    assert not check("x", 3.0, "<=", 2.0).passed
    assert check("x", 3.0, ">=", 2.0).margin == 1.0
    assert check("x", 5, "==", 5).passed
    assert check("x", True, "true", None).passed


def test_json_safe_handles_numpy_and_special_floats():
    out = json_safe({"a": np.float64("nan"), "b": np.array([1, 2]), "c": 1 + 2j, 3: np.bool_(True)})
    assert out == {"a": "nan", "b": [1, 2], "c": [1.0, 2.0], "3": True}


def test_report_write(tmp_path):
    rep = ExperimentReport("demo", {"beta": 0.1})
    rep.checks.append(check("c", 0.5, "<=", 1.0, r=1))
    rep.tables["curve"] = [{"t": 0.0, "d": 1.0}, {"t": 1.0, "d": 0.5}]
    paths = rep.write(tmp_path / "out.json")
    data = json.loads((tmp_path / "out.json").read_text())
    assert data["passed"] and data["checks"][0]["inputs"] == {"r": 1}
    assert (tmp_path / "out.curve.csv").read_text().splitlines()[0] == "t,d"
    assert len(paths) == 3
    assert not list(tmp_path.glob(".*.tmp"))
