import json

import numpy as np
import pytest

from mubkit.cli import run
from mubkit.states import StateSet


def call(argv, capsys):
    code = run(argv)
    out, err = capsys.readouterr()
    return code, out, err


@pytest.mark.parametrize("q", (2, 3, 4, 5, 7, 8, 9))
def test_gen_check_round_trip(q, tmp_path, capsys):
    path = tmp_path / f"mub{q}.json"
    assert call(["gen", "mub", "--q", str(q), "--out", str(path)], capsys)[0] == 0
    code, out, _ = call(["check", "--in", str(path), "--tests", "mub,design2,frame"], capsys)
    assert code == 0
    reports = json.loads(out)
    assert [r["test"] for r in reports] == ["mub", "design2", "frame"]
    assert all(r["passed"] for r in reports)


def test_gen_hesse(tmp_path, capsys):
    path = tmp_path / "sic.json"
    assert call(["gen", "sic", "--hesse", "--out", str(path)], capsys)[0] == 0
    S = StateSet.from_json(json.loads(path.read_text()))
    assert len(S) == 9
    assert np.allclose(S.states[0], [0, 0.7071067811865476, -0.7071067811865476])
    code, out, _ = call(["check", "--in", str(path), "--tests", "sic,design2,frame"], capsys)
    assert code == 0


def test_check_failure_exit_1(tmp_path, capsys):
    path = tmp_path / "mub2.json"
    call(["gen", "mub", "--q", "2", "--out", str(path)], capsys)
    code, out, _ = call(["check", "--in", str(path), "--tests", "sic"], capsys)
    assert code == 1 and json.loads(out)[0]["passed"] is False


def test_group_bad_q(capsys):
    code, _, err = call(["group", "--q", "6"], capsys)
    assert code == 2 and "q must be a prime power ≤ 9" in err


def test_usage_errors(tmp_path, capsys):
    assert call(["frobnicate"], capsys)[0] == 2
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert call(["check", "--in", str(bad)], capsys)[0] == 2
    assert call(["check", "--in", str(tmp_path / "missing.json")], capsys)[0] == 2
    wrong = tmp_path / "wrong.json"
    wrong.write_text(json.dumps({"q": 2, "nothing": []}))
    assert call(["check", "--in", str(wrong)], capsys)[0] == 2
    assert call(["orbit", "--q", "5", "--seed-state", "hesse"], capsys)[0] == 2


def test_group_stats_and_table(tmp_path, capsys):
    code, out, _ = call(["group", "--q", "3", "--potential"], capsys)
    stats = json.loads(out)
    assert code == 0 and stats["order"] == 216 and abs(stats["frame_potential"]["value"] - 2) < 1e-9
    path = tmp_path / "g2.json"
    assert call(["group", "--q", "2", "--dump-matrices", "--out", str(path)], capsys)[0] == 0
    table = json.loads(path.read_text())
    assert table["order"] == 24 and len(table["elements"]) == 24
    assert table["elements"][0] == {"symplectic": [[1, 0], [0, 1]], "word": "",
                                    "matrix": [[[1.0, 0.0], [0.0, 0.0]], [[0.0, 0.0], [1.0, 0.0]]]}


def test_orbit_command(tmp_path, capsys):
    code, out, _ = call(["orbit", "--q", "3", "--seed-state", "hesse"], capsys)
    rep = json.loads(out)
    assert code == 0 and rep["orbit_size"] == 9 and rep["highly_symmetric"]["passed"]
    states = tmp_path / "orb.json"
    code, out, _ = call(["orbit", "--q", "4", "--seed-state", "mub0", "--states-out", str(states)], capsys)
    assert json.loads(out)["orbit_size"] == 20
    code, out, _ = call(["orbit", "--q", "4", "--seed-state", f"file:{states}"], capsys)
    assert json.loads(out)["orbit_size"] == 20


def test_orbit_random_deterministic(capsys):
    a = call(["orbit", "--q", "3", "--seed-state", "random", "--rng-seed", "5"], capsys)[1]
    b = call(["orbit", "--q", "3", "--seed-state", "random", "--rng-seed", "5"], capsys)[1]
    assert a == b and json.loads(a)["orbit_size"] == 216


def test_verify_theorem1_deterministic(capsys):
    argv = ["verify-theorem1", "--q", "3", "--samples", "4", "--rng-seed", "11"]
    code, a, _ = call(argv, capsys)
    _, b, _ = call(["--threads", "2"] + argv, capsys)
    assert code == 0 and a == b
    rep = json.loads(a)
    assert rep["all_pass"] and rep["hesse_orbit"]["orbit_size"] == 9


def test_outputs_self_consumable(tmp_path, capsys):
    path = tmp_path / "m.json"
    call(["gen", "mub", "--q", "4", "--out", str(path)], capsys)
    text1 = path.read_text()
    S = StateSet.from_json(json.loads(text1))
    path2 = tmp_path / "m2.json"
    path2.write_text(json.dumps(S.to_json(), indent=1) + "\n")
    assert path2.read_text() == text1
