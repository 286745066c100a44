from __future__ import annotations

import json
import subprocess
import sys

import pytest

from tropicount.cli import EXIT_INVALID, EXIT_NONGENERIC, main


def _run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def test_count_line(capsys, problems):
    code, out, _ = _run(capsys, "count", problems / "plane-deg1-2pts.json")
    assert code == 0
    data = json.loads(out)
    assert data["total"] == 1 and len(data["curves"]) == 1


def test_count_pretty(capsys, problems):
    code, out, _ = _run(capsys, "count", problems / "plane-deg2-5pts.json", "--pretty")
    assert code == 0 and out.startswith("total 1 ")


def test_count_is_deterministic_across_threads(capsys, problems):
    f = problems / "plane-deg2-5pts.json"
    _, a, _ = _run(capsys, "count", f, "--seed", 3)
    _, b, _ = _run(capsys, "count", f, "--seed", 3, "--threads", 3)
    assert a == b


def test_count_on_vertex(capsys, problems):
    f = problems / "plane-deg1-on-vertex.json"
    code, _, err = _run(capsys, "count", f, "--no-resample")
    assert code == EXIT_NONGENERIC and "not generic" in err
    code, out, _ = _run(capsys, "count", f)
    assert code == 0 and json.loads(out)["total"] == 1


def test_invalid_inputs_exit_1(capsys, problems, tmp_path):
    assert _run(capsys, "count", problems / "plane-deg1-bad-codim.json")[0] == EXIT_INVALID
    assert _run(capsys, "types", problems / "unbalanced-degree.json")[0] == EXIT_INVALID
    assert _run(capsys, "count", tmp_path / "missing.json")[0] == EXIT_INVALID
    assert _run(capsys, "count", problems / "plane-deg1-2pts.json", "--set", "oops")[0] == EXIT_INVALID


def test_types(capsys, problems):
    code, out, _ = _run(capsys, "types", problems / "plane-deg1-degree.json")
    assert code == 0 and json.loads(out)["count"] == 1
    code, out, _ = _run(capsys, "types", problems / "plane-deg2-degree.json")
    data = json.loads(out)
    assert data["count"] == 17 == len(data["codes"])
    assert sum(data["inner_weights"].values()) == 17


def test_check2d(capsys, problems):
    code, out, _ = _run(capsys, "check2d", problems / "plane-deg1-2pts.json")
    data = json.loads(out)
    assert code == 0 and data["rows"] == [dict(data["rows"][0], lhs=1, rhs=1, equal=True)]
    code, out, _ = _run(capsys, "check2d", problems / "plane-deg2-5pts.json")
    assert code == 0 and json.loads(out)["total"] == 1


def test_check2d_rejects_space_problems(capsys, problems):
    assert _run(capsys, "check2d", problems / "p3-quadric-4pts.json")[0] == EXIT_INVALID


def test_decompose(capsys, problems):
    code, out, _ = _run(capsys, "decompose", problems / "decompose-line.json")
    data = json.loads(out)
    assert code == 0 and all(data["checks"].values()) and data["rescale"] == 1


def test_decompose_missing_ray(capsys, problems, tmp_path):
    data = json.loads((problems / "decompose-line.json").read_text())
    data["fan"]["cones"] = [[[1, 0], [0, 1]], [[0, 1], [-1, -1]], [[-1, -1], [1, 0]]]
    f = tmp_path / "bad.json"
    f.write_text(json.dumps(data))
    code, _, err = _run(capsys, "decompose", f)
    assert code == EXIT_INVALID and "RayNotInFan" in err


def test_oracle(capsys):
    assert json.loads(_run(capsys, "oracle", 1)[1]) == [1]
    assert json.loads(_run(capsys, "oracle", 3)[1]) == [1, 1, 12]
    assert json.loads(_run(capsys, "oracle", 5)[1]) == [1, 1, 12, 620, 87304]
    assert "N_4 = 620" in _run(capsys, "oracle", 4, "--pretty")[1]


def test_parameter_substitution(capsys, problems, tmp_path):
    data = json.loads((problems / "plane-deg1-2pts.json").read_text())
    data["parameters"] = {"a": 5}
    data["constraints"][0]["base"] = ["a", "-a"]
    f = tmp_path / "param.json"
    f.write_text(json.dumps(data))
    code, out, _ = _run(capsys, "count", f, "--set", "a=7")
    assert code == 0
    assert json.loads(out)["constraints_used"][0]["base"] == ["7", "-7"]


def test_console_entry_point(problems):
    res = subprocess.run(
        [sys.executable, "-m", "tropicount.cli", "oracle", "2"], capture_output=True, text=True, check=False
    )
    assert res.returncode == 0 and json.loads(res.stdout) == [1, 1]


@pytest.mark.parametrize("name,total", [("p3-quadric-4pts", 0), ("p1p2-deg12-4pts", 1)])
def test_count_space_examples(capsys, problems, name, total):
    code, out, _ = _run(capsys, "count", problems / f"{name}.json")
    assert code == 0 and json.loads(out)["total"] == total
