import json
import subprocess
import sys

import pytest

from dynmech.cli import main
from dynmech.io import Instance, InstanceError, load_json, parse_instance, save_json
from dynmech.dist import DiscreteDistribution

D = DiscreteDistribution


def _write(tmp_path, periods, name="inst.json", **extra):
    data = {"schema_version": 1, "periods": [d.to_dict() for d in periods], **extra}
    path = tmp_path / name
    path.write_text(json.dumps(data))
    return str(path)


@pytest.fixture
def point_masses(tmp_path):
    return _write(tmp_path, [D.point_mass(1.0), D.point_mass(1.0)])


def test_compare_point_masses(point_masses, tmp_path, capsys):
    out = tmp_path / "res.json"
    assert main(["compare", point_masses, "-o", str(out)]) == 0
    table = capsys.readouterr().out
    assert "optimal_recursive" in table and "sequential_monopoly" in table
    res = load_json(out)
    r = res["revenues"]
    for key in ("optimal_recursive", "oracle_lp", "combined", "sequential_monopoly"):
        assert r[key] == pytest.approx(2.0, abs=1e-9)
    assert all(res["checks"].values())


def test_solve_optimal_then_verify(point_masses, tmp_path):
    res = tmp_path / "opt.json"
    assert main(["solve-optimal", point_masses, "--trace", "-o", str(res)]) == 0
    data = load_json(res)
    assert data["traces"][0]["pay"] == pytest.approx([1.0, 1.0])
    ver = tmp_path / "ver.json"
    assert main(["verify", str(res), "-o", str(ver)]) == 0
    v = load_json(ver)
    assert v["reproduced"] and v["within_tolerance"]
    assert v["verification"]["max_pic_violation"] <= 1e-9


def test_verify_instance_directly(tmp_path):
    path = _write(tmp_path, [D.uniform([1.0, 2.0]), D.uniform([1.0, 2.0])])
    out = tmp_path / "v.json"
    assert main(["verify", path, "-o", str(out)]) == 0
    assert load_json(out)["within_tolerance"]


def test_round_trip_bit_equality(tmp_path):
    path = _write(tmp_path, [D.uniform([1.0, 3.0]), D([0.5, 2.0], [0.3, 0.7])])
    out = tmp_path / "r.json"
    assert main(["solve-approx", path, "-o", str(out)]) == 0
    first = load_json(out)
    again = tmp_path / "r2.json"
    save_json(first, again)
    second = load_json(again)
    for k, v in first["revenues"].items():
        assert second["revenues"][k] == v  # exact, not approximate
    assert again.read_text() == out.read_text()


def test_deterministic_output(tmp_path):
    path = _write(tmp_path, [D.uniform([1.0, 2.0]), D.uniform([1.0, 3.0])])
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    assert main(["solve-optimal", path, "--seed", "3", "-o", str(a)]) == 0
    assert main(["solve-optimal", path, "--seed", "3", "-o", str(b)]) == 0
    assert a.read_text() == b.read_text()


def test_oracle_and_markov(tmp_path):
    path = _write(tmp_path, [D.point_mass(2.0)], agents=[[D.point_mass(1.0).to_dict()],
                                                         [D.point_mass(2.0).to_dict()]])
    out = tmp_path / "o.json"
    assert main(["oracle", path, "-o", str(out)]) == 0
    r = load_json(out)["revenues"]
    assert r["oracle_lp"] == pytest.approx(2.0)
    assert r["oracle_lp_multi"] == pytest.approx(2.0)
    assert main(["markov", path, "--markov-delta", "0.5", "-o", str(out)]) == 0
    assert load_json(out)["markov"]["value"] == pytest.approx(2.0)


def test_example_two_er(tmp_path, capsys):
    out = tmp_path / "er.json"
    assert main(["example-two-er", "--n", "3", "--N", "20", "-o", str(out)]) == 0
    r = load_json(out)["revenues"]
    assert r["sequential_monopoly"] == pytest.approx(2.0, abs=1e-12)
    assert r["oracle_lp"] > 2.3
    assert "gap ratio" in capsys.readouterr().out


def test_exit_codes(tmp_path, capsys):
    with pytest.raises(SystemExit) as e:
        main(["frobnicate"])
    assert e.value.code == 2
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"schema_version": 1, "periods": [{"support": [2, 1], "probs": [0.5, 0.5]}]}))
    assert main(["solve-optimal", str(bad)]) == 3
    assert main(["solve-optimal", str(tmp_path / "missing.json")]) == 3
    assert "invalid instance" in capsys.readouterr().err
    big = _write(tmp_path, [D.uniform([float(v) for v in range(1, 11)])] * 7, name="big.json")
    assert main(["oracle", big]) == 4
    assert main(["example-two-er", "--n", "0"]) == 3


def test_parse_instance_errors():
    with pytest.raises(InstanceError):
        parse_instance({"periods": []})
    with pytest.raises(InstanceError):
        parse_instance({"schema_version": 99, "periods": []})
    with pytest.raises(InstanceError):
        parse_instance({"schema_version": 1, "periods": []})
    with pytest.raises(InstanceError):
        parse_instance({"schema_version": 1, "periods": [{"support": [1], "probs": [1]}],
                        "settings": {"colour": 1}})
    inst = parse_instance({"schema_version": 1, "periods": [{"support": [1], "probs": [1]}]})
    assert isinstance(inst, Instance)
    assert parse_instance(inst.to_dict()).to_dict() == inst.to_dict()


def test_module_entry_point(point_masses):
    proc = subprocess.run([sys.executable, "-m", "dynmech", "solve-approx", point_masses],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["revenues"]["combined"] == pytest.approx(2.0)
