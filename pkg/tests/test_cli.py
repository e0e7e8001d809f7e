import json
import math

import pytest

from app.main import main
from tests.conftest import EXAMPLE_A, PHI, RHO_A

FULL_3_2 = {"k": 2, "rules": [[[1, 1], [1, 1]]] * 3}


def run(argv, capsys):
    code = main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def test_check(write_problem, capsys):
    path = write_problem({"presentation": {"A": EXAMPLE_A}})
    code, out, _ = run(["check", path], capsys)
    assert code == 0
    assert "S_R={3}, finite: yes, xi=[1, 2, 1]" in out


def test_check_infinite(write_problem, capsys):
    path = write_problem({"presentation": {"A": [[0, 1], [1, 0]]}})
    code, out, _ = run(["check", path], capsys)
    assert code == 0
    assert "finite: no" in out
    assert "warning" in out


@pytest.mark.parametrize(
    "payload",
    [
        "{not json",
        {"presentation": {"A": [[0, 1], [1, 2]]}},
        {"presentation": {"A": EXAMPLE_A}, "automaton": {"states": ["q"], "initial": "q", "transitions": {}}},
        {"sft": FULL_3_2},
    ],
)
def test_malformed_input(payload, write_problem, capsys):
    code, out, err = run(["check", write_problem(payload)], capsys)
    assert code == 2
    assert "error:" in err
    assert out == ""


def test_missing_file(tmp_path, capsys):
    code, _, err = run(["check", str(tmp_path / "absent.json")], capsys)
    assert code == 2
    assert "cannot read" in err


def test_degree_json(write_problem, capsys):
    path = write_problem({"presentation": {"A": EXAMPLE_A}, "sft": FULL_3_2})
    code, out, _ = run(["degree", path, "--json"], capsys)
    assert code == 0
    report = json.loads(out)
    assert report["degree"] == pytest.approx(math.log(RHO_A), abs=1e-9)
    assert report["lambda"] == pytest.approx(2.147899, abs=1e-6)
    assert report["essential"] == [1, 2]
    assert report["live"] == [1, 2]
    assert report["full_degree"] is True
    assert report["xi"] == [1, 2, 1]
    assert report["case"] == "both-essential"
    assert report["residual"] <= 1e-6


def test_degree_needs_sft(write_problem, capsys):
    code, _, err = run(["degree", write_problem({"presentation": {"A": EXAMPLE_A}})], capsys)
    assert code == 2
    assert "sft" in err


def test_degree_automaton_flag(write_problem, capsys):
    path = write_problem({"presentation": {"A": [[1, 1], [1, 0]]}, "sft": {"k": 2, "rules": [[[1, 1], [1, 1]]] * 2}})
    code, out, _ = run(["degree", path, "--automaton", "--json"], capsys)
    assert code == 0
    assert json.loads(out)["degree"] == pytest.approx(math.log(PHI), abs=1e-9)


def test_degree_on_automaton_file(write_problem, capsys):
    path = write_problem({
        "automaton": {
            "states": ["qG", "qE", "qO"],
            "initial": "qG",
            "transitions": {"qG": {"1": "qG", "2": "qE"}, "qE": {"1": "qO", "2": "qE"}, "qO": {"1": "qE"}},
        },
        "sft": {"k": 2, "rules": [[[1, 1], [1, 1]]] * 2},
    })
    code, out, _ = run(["degree", path, "--json"], capsys)
    assert code == 0
    assert json.loads(out)["degree"] == pytest.approx(math.log(PHI), abs=1e-9)


def test_spectrum(write_problem, capsys):
    path = write_problem({"presentation": {"A": [[1] * 3] * 3}})
    code, out, _ = run(["spectrum", path, "--json"], capsys)
    assert code == 0
    degrees = [entry["degree"] for entry in json.loads(out)["entries"]]
    assert degrees == pytest.approx([0.0, math.log(2), math.log(3)], abs=1e-9)


def test_spectrum_general_cap(write_problem, capsys):
    path = write_problem({"presentation": {"A": EXAMPLE_A}})
    code, _, err = run(["spectrum", path, "--general", "--k", "2", "--cap", "100"], capsys)
    assert code == 3
    assert "100" in err


def test_count_with_oracle(write_problem, capsys):
    path = write_problem({"presentation": {"A": EXAMPLE_A}, "sft": FULL_3_2})
    code, out, _ = run(["count", path, "--n", "2", "--oracle", "--json"], capsys)
    assert code == 0
    report = json.loads(out)
    assert report["recurrence"] == [512, 512]
    assert report["oracle"] == [512, 512]
    assert report["verdict"] == "MATCH"


def test_count_oracle_cap(write_problem, capsys):
    path = write_problem({"presentation": {"A": EXAMPLE_A}, "sft": FULL_3_2})
    code, _, err = run(["count", path, "--n", "3", "--oracle", "--cap", "1000"], capsys)
    assert code == 3
    assert "error:" in err


def test_charpoly(write_problem, capsys):
    path = write_problem({"presentation": {"A": EXAMPLE_A}})
    code, out, _ = run(["charpoly", path], capsys)
    assert code == 0
    assert "λ^3 - λ^2 - 2λ - 1" in out
    assert out.strip().splitlines()[-1] == "MATCH"
    code, out, _ = run(["charpoly", path, "--json"], capsys)
    assert code == 0
    assert json.loads(out)["match"] is True


def test_partition(write_problem, capsys):
    path = write_problem({"presentation": {"A": EXAMPLE_A}})
    code, out, _ = run(["partition", path, "--n", "3", "--enumerate"], capsys)
    assert code == 0
    assert "tr(A^3) = 10 = 3 + 2 + 5 = 10: ok" in out
    assert "set partition of P_3: ok" in out


def test_essential(write_problem, capsys):
    path = write_problem({"presentation": {"A": EXAMPLE_A}, "sft": {"k": 2, "rules": [[[1, 1], [0, 1]]] * 3}})
    code, out, _ = run(["essential", path, "--json"], capsys)
    assert code == 0
    assert json.loads(out)["essential"] == [1]


def test_dot_output(write_problem, tmp_path, capsys):
    path = write_problem({"presentation": {"A": EXAMPLE_A}})
    target = tmp_path / "f.dot"
    code, _, _ = run(["check", path, "--dot", str(target)], capsys)
    assert code == 0
    assert target.read_text().startswith("digraph")


@pytest.mark.parametrize(
    "argv",
    [
        ["partition", "--n", "0"],
        ["partition", "--n", "-2", "--enumerate"],
        ["count", "--n", "-1"],
        ["count", "--n", "-1", "--oracle"],
    ],
)
def test_rejects_out_of_range_n(argv, write_problem, capsys):
    path = write_problem({"presentation": {"A": EXAMPLE_A}, "sft": FULL_3_2})
    code, out, err = run([argv[0], path] + argv[1:], capsys)
    assert code == 2
    assert "error:" in err
    assert "n >=" in err
    assert out == ""


def test_degree_reports_essential_apart_from_live(write_problem, capsys):
    # symbol 1 branches to 2 and 3 once, then only the loop at 3 survives
    rules = [[0, 1, 1], [0, 0, 0], [0, 0, 1]]
    path = write_problem({"presentation": {"A": [[1]]}, "sft": {"k": 3, "rules": [rules]}})
    code, out, _ = run(["degree", path, "--json"], capsys)
    assert code == 0
    report = json.loads(out)
    assert report["essential"] == [1]
    assert report["live"] == []
    assert report["degree"] == 0.0
