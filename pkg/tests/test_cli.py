import json

import pytest

from ldtpolicy.cli import run


def _json(capsys):
    return json.loads(capsys.readouterr().out)


def test_gen_round_trips(tmp_path, capsys):
    out = tmp_path / "k4.txt"
    assert run(["gen", "--class", "knp", "--d", "4", "--out", str(out)]) == 0
    capsys.readouterr()
    assert run(["fan", "--in", str(out)]) == 0
    assert _json(capsys)["cones"] == 7


def test_fan_cut3(capsys):
    assert run(["fan", "--class", "cut", "--d", "3"]) == 0
    doc = _json(capsys)
    assert doc["cones"] == 4 and doc["flags"]["cls"] == "cut"


def test_synth_eval_export_pipeline(tmp_path, capsys):
    pol = tmp_path / "k5.json"
    assert run(["synth", "--class", "knp", "--d", "5", "--out", str(pol)]) == 0
    assert _json(capsys)["depth"] == 4
    costs = tmp_path / "c.txt"
    costs.write_text("1 1 1 1 1\n5 1 1 1 1  # item 1 plus one of items 2..4\n")
    assert run(["eval", "--policy", str(pol), "--costs", str(costs), "--show"]) == 0
    rows = _json(capsys)["results"]
    assert [r["objective"] for r in rows] == ["2", "6"]
    out_c = tmp_path / "k5.c"
    assert run(["export", "--policy", str(pol), "--out", str(out_c)]) == 0
    assert out_c.read_text().startswith("#define N 5")


def test_verify_passes(capsys):
    assert run(["verify", "--class", "cut", "--d", "4", "--queries", "200"]) == 0
    doc = _json(capsys)
    assert doc["ok"] and all(c["status"] == "pass" for c in doc["checks"].values())


def test_bench_reports_backends(capsys):
    assert run(["bench", "--class", "knp", "--d", "5", "--queries", "50"]) == 0
    assert set(_json(capsys)["nanos_per_query"]) == {"ldt", "brute", "baseline", "nns-kd", "nns-scan"}


@pytest.mark.parametrize("argv", [
    ["fan"],                                        # no instance
    ["fan", "--class", "tsp", "--d", "2"],          # invalid size
    ["eval", "--policy", "/nonexistent.json", "--random", "3"],
])
def test_runtime_errors_exit_one(argv, capsys):
    assert run(argv) == 1
    assert "error:" in capsys.readouterr().err


def test_usage_errors_exit_two():
    with pytest.raises(SystemExit) as exc:
        run(["frobnicate"])
    assert exc.value.code == 2
