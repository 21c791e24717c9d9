import json
import os

import pytest

import mbkdv


def test_version():
    assert mbkdv.__version__ == "0.1.0"


def test_critical_index_branches():
    r = mbkdv.critical_index("4", "12")
    assert r["branch"] == "Alpha4Resonant"
    assert r["s_star"] == 1.0
    assert mbkdv.critical_index("3", "1")["branch"] == "RalphaRational"


def test_out_of_scope_raises():
    with pytest.raises(ValueError):
        mbkdv.critical_index("5", "1")


def test_resonance_function():
    assert mbkdv.resonance_H("2", "1", "1", "10", "7") == "270"
    assert mbkdv.resonance_H("4", "3", "1", "3", "2") == "0"


def test_zero_pairs():
    e = mbkdv.estimate_indices("2/3", "1/3", 500)
    assert sorted(e["zero_pairs"]) == [(-1, -1), (1, 1)]


def test_growth_slope():
    slope = mbkdv.growth_exponent("alpha4-nonresonant", "4", "1", 0.5, [32, 64, 128, 256])
    assert abs(slope) < 0.1


def test_run_writes_manifest(tmp_path):
    out = tmp_path / "ci"
    m = mbkdv.run("critical-index", {"alpha": "4", "beta": "5"}, str(out))
    assert m["exit_code"] == 0
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["status"] == "ok"
    assert os.path.exists(out / "critical_index.json")
