import json
import subprocess
import sys

import pytest

from qrouter.cli import main


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture
def write(tmp_path):
    def _write(name, obj):
        path = tmp_path / name
        path.write_text(obj if isinstance(obj, str) else json.dumps(obj, indent=2))
        return path
    return _write


def test_plan_table_has_a_b_two(capsys):
    code, out, _ = run(capsys, "plan", 5, "--format", "table")
    assert code == 0
    lines = out.splitlines()
    header = lines[0].split()
    row_a = lines[1].split()
    assert header == ["A", "B", "C", "D", "E"]
    assert row_a[0] == "A" and row_a[1] == "2"


def test_plan_dot_edges(capsys):
    code, out, _ = run(capsys, "plan", 4, "--format", "dot")
    assert code == 0
    assert out.count(" -- ") == 6
    assert 'A -- B [label="2"];' in out


def test_plan_json_colors(capsys):
    code, out, _ = run(capsys, "plan", 6)
    assert code == 0
    assert json.loads(out)["colors"] == 5


@pytest.mark.parametrize("argv", [["plan", "1"], ["plan", "0"], ["plan", "x"],
                                  ["plan", "4201"], ["nope"]])
def test_bad_plan_args_exit_1(capsys, argv):
    with pytest.raises(SystemExit) as info:
        code = main(argv)
        raise SystemExit(code)
    assert info.value.code == 1


def test_max_n_is_configurable(capsys):
    assert run(capsys, "plan", 30, "--max-n", 20)[0] == 1
    assert run(capsys, "plan", 30, "--max-n", 30)[0] == 0


def test_verify_round_trip(capsys, write):
    _, out, _ = run(capsys, "plan", 5)
    code, text, _ = run(capsys, "verify", write("p.json", out))
    assert code == 0 and text.startswith("valid")


def test_verify_duplicate_color(capsys, write):
    _, out, _ = run(capsys, "plan", 5)
    doc = json.loads(out)
    # A-C takes C's idle wavelength 5, which A already uses towards E.
    doc["table"][0][1] = 5
    code, text, _ = run(capsys, "verify", write("bad.json", doc))
    assert code == 2
    lines = text.splitlines()
    assert lines[0] == "invalid: 1 violation(s)"
    assert lines[1].startswith("duplicate-at-vertex [A,C,E]")


def test_verify_missing_pair(capsys, write):
    _, out, _ = run(capsys, "plan", 4)
    doc = json.loads(out)
    doc["table"][2][0] = None
    code, text, _ = run(capsys, "verify", write("m.json", doc))
    assert code == 2 and "missing-pair [C,D]" in text


@pytest.mark.parametrize("content", [
    '{"n": 5, "colors": 5, "table": [[2, 3, 4, 5], [4, 5',
    '{"n": 5, "colors": 5, "table": [[2, 3, 4, 5], [4, 5, 1]]}',
    '[]', '{"n": 5}', ''])
def test_verify_unparseable_exit_1(capsys, write, content):
    code, _, err = run(capsys, "verify", write("t.json", content))
    assert code == 1 and err.startswith("error:")


def test_verify_missing_file(capsys, tmp_path):
    assert run(capsys, "verify", tmp_path / "absent.json")[0] == 1


def test_export_dot(capsys, write):
    _, out, _ = run(capsys, "plan", 5)
    code, dot, _ = run(capsys, "export-dot", write("p.json", out))
    assert code == 0
    assert dot == run(capsys, "plan", 5, "--format", "dot")[1]


def test_budget_forty_users(capsys, write):
    code, out, err = run(capsys, "budget", write("c.json", {"network": {"users": [25.0] * 40}}))
    assert code == 0
    doc = json.loads(out)
    assert doc["summary"] == {"pairs": 780, "feasible": 780, "all_feasible": True,
                              "worst_pair": ["A", "B"], "worst_total_loss_db": 20.0}
    assert doc["reach"] == {"per_arm_km": 25.0, "end_to_end_km": 50.0}
    assert "780/780" in err


def test_budget_long_arm_exit_2(capsys, write):
    users = [25.0] * 5 + [200.0]
    assert run(capsys, "budget", write("c.json", {"network": {"users": users}}))[0] == 2


def test_budget_crosstalk_at_10db(capsys, write):
    code, out, _ = run(capsys, "budget", write("c.json", {"network": {"users": [50.0] * 40},
                                                          "policy": {"max_loss_budget_db": 40}}))
    assert code == 0
    doc = json.loads(out)
    xts = [p["crosstalk_sum"] for p in doc["pairs"]]
    assert any(abs(x - 5.7e-4) <= 1e-7 for x in xts)
    ref = doc["crosstalk_reference"]
    assert abs(ref["all_interferers"]["ratio"] - 5.7e-4) <= 1e-7
    assert abs(ref["index_below_channel_count"]["ratio"] - 5.6e-4) <= 1e-7


def test_budget_csv(capsys, write):
    code, out, _ = run(capsys, "budget", write("c.json", {"network": {"users": [1, 2, 3]}}),
                       "--format", "csv")
    rows = out.splitlines()
    assert rows[0] == "u,v,wavelength,loss_db,crosstalk,feasible"
    assert len(rows) == 4
    assert code == 0


def test_budget_config_error(capsys, write):
    code, _, err = run(capsys, "budget", write("c.json", '{\n "network": {"users": [1, -2]}\n}'))
    assert code == 1
    assert ":2:" in err
    assert run(capsys, "budget", write("d.json", "{}"))[0] == 1


SIM = {"sim": {"trials": 200_000, "seed": 42}}


def test_simulate_passes(capsys, write):
    code, out, _ = run(capsys, "simulate", write("s.json", SIM))
    doc = json.loads(out)
    assert code == 0
    assert doc["generator"] == "philox4x32-10"
    assert doc["verdict"]["passed"]


def test_simulate_byte_identical(capsys, write):
    path = write("s.json", SIM)
    a = run(capsys, "simulate", path)[1]
    b = run(capsys, "simulate", path, "--workers", 3)[1]
    assert a == b


def test_simulate_injected_bias_exit_2(capsys, write):
    code, _, err = run(capsys, "simulate", write("s.json", SIM), "--inject-analytic-bias", 1.5)
    assert code == 2 and "delivered" in err


def test_simulate_unphysical_exit_1(capsys, write):
    cfg = {"mux": {"insertion_loss_db": 0.0, "adjacent_crosstalk_db": -10,
                   "nonadjacent_crosstalk_db": -10}, "sim": {"trials": 10}}
    code, _, err = run(capsys, "simulate", write("s.json", cfg))
    assert code == 1 and "sum to" in err


def test_module_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "qrouter", "plan", "3", "--format", "table"],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert proc.stdout.splitlines()[1].split() == ["A", "2", "3"]


def test_plan_verify_round_trip_all_sizes(capsys, tmp_path):
    for n in range(2, 65):
        _, out, _ = run(capsys, "plan", n)
        path = tmp_path / f"p{n}.json"
        path.write_text(out)
        assert run(capsys, "verify", path)[0] == 0, n


GOLDEN_5 = """{
  "n": 5,
  "colors": 5,
  "table": [
    [2, 3, 4, 5],
    [4, 5, 1],
    [1, 2],
    [3]
  ]
}
"""


def test_plan_json_golden(capsys):
    assert run(capsys, "plan", 5)[1] == GOLDEN_5
