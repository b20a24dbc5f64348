import csv
import json

import pytest

from builtin_graphs import build
from cli import EXIT_FALSE, EXIT_INPUT_ERROR, EXIT_OK, EXIT_VERIFICATION_FAILED, run
from graph_core import parse_graph


@pytest.fixture
def potential_files(tmp_path):
    zero = tmp_path / "zero.pot"
    zero.write_text("vertices 2\n")
    partner = tmp_path / "mtwo-two.pot"
    partner.write_text("vertices 2\npotential 0 -2\npotential 1 2\n")
    return str(zero), str(partner)


def _json_output(capsys):
    return json.loads(capsys.readouterr().out)


def test_invariants_kagome(capsys):
    assert run(["invariants", "--graph", "kagome", "--max-n", "3", "--json"]) == EXIT_OK
    result = _json_output(capsys)
    entries = {(e["n"], tuple(e["m"])): e["poly"] for e in result["entries"]}
    assert entries[(3, (1, 0))] == [{"coeff": "1", "exps": [1, 0, 0]}, {"coeff": "1", "exps": [0, 1, 0]}]
    assert (1, (1, 0)) not in entries
    marginals = {m["n"]: m["poly"] for m in result["marginals"]}
    assert {"coeff": "8", "exps": [0, 0, 1]} in marginals[3]


def test_invariants_with_potential_and_index(capsys):
    code = run(["invariants", "--graph", "pendant", "--potential", "-2 2", "--index", "1", "--json"])
    assert code == EXIT_OK
    result = _json_output(capsys)
    assert {v["n"]: v["value"] for v in result["periodic_values"]} == {1: "0", 2: "0"}
    [lq] = result["linear_quadratic"]
    assert lq["shortest_length"] == 1
    assert lq["linear"]["poly"] == [{"coeff": "1", "exps": [1, 0]}]


def test_invariants_text_output(capsys):
    assert run(["invariants", "--graph", "pendant"]) == EXIT_OK
    out = capsys.readouterr().out
    assert "I_2^(1) = q0" in out


def test_json_output_is_deterministic(capsys):
    run(["invariants", "--graph", "kagome", "--max-n", "3", "--json"])
    first = capsys.readouterr().out
    run(["invariants", "--graph", "kagome", "--max-n", "3", "--json"])
    assert capsys.readouterr().out == first


def test_isospectral_periodic(capsys, potential_files):
    zero, partner = potential_files
    code = run(["isospectral", "--graph", "pendant", "--q1", zero, "--q2", partner, "--mode", "periodic"])
    assert code == EXIT_OK
    assert _json_output(capsys)["isospectral"] is True


def test_isospectral_floquet(capsys, potential_files):
    zero, partner = potential_files
    code = run(["isospectral", "--graph", "pendant", "--q1", zero, "--q2", partner, "--mode", "floquet"])
    assert code == EXIT_FALSE
    witness = _json_output(capsys)["witness"]
    assert (witness["n"], witness["m"]) == (2, [1])
    assert (witness["value_1"], witness["value_2"]) == ("0", "-2")


def test_cycles(capsys):
    assert run(["cycles", "--graph", "pendant", "--max-len", "2", "--index", "1", "--json"]) == EXIT_OK
    cycles = _json_output(capsys)
    assert [c["edges"] for c in cycles] == [[2, 4]]
    assert cycles[0]["weight"] == "q0^1"


def test_verify_trace_with_csv(tmp_path, capsys):
    pot = tmp_path / "q.pot"
    pot.write_text("vertices 3\npotential 0 1\npotential 1 2\npotential 2 3\n")
    out = tmp_path / "samples.csv"
    code = run(["verify-trace", "--graph", "kagome", "--potential", str(pot), "--grid", "2",
                "--samples", "3", "--csv", str(out), "--json"])
    assert code == EXIT_OK
    result = _json_output(capsys)
    assert result["passed"] is True
    assert "report" not in result
    with open(out, newline="") as f:
        rows = list(csv.reader(f))
    assert rows[0] == ["n", "k1", "k2", "lhs_re", "lhs_im", "rhs_re", "rhs_im", "residual"]
    assert len(rows) == 1 + 3 * (4 + 3)


def test_verify_trace_failure_exit_code(tmp_path):
    pot = tmp_path / "q.pot"
    pot.write_text("vertices 3\npotential 0 1\n")
    assert run(["verify-trace", "--graph", "kagome", "--potential", str(pot), "--grid", "2",
                "--samples", "0", "--tol", "-1"]) == EXIT_VERIFICATION_FAILED


def test_builtin_emit(tmp_path):
    target = tmp_path / "zd33.graph"
    assert run(["builtin", "zd", "3,3", "--emit", str(target)]) == EXIT_OK
    assert parse_graph(target.read_text()) == build("zd 3,3")


def test_builtin_prints_graph(capsys):
    assert run(["builtin", "pendant"]) == EXIT_OK
    assert parse_graph(capsys.readouterr().out) == build("pendant")


def test_zd_fourier(tmp_path, capsys):
    pot = tmp_path / "q.pot"
    pot.write_text("vertices 9\npotential 0 1/2\npotential 4 -3\npotential 8 7/3\n")
    assert run(["zd-fourier", "--p", "3,3", "--potential", str(pot), "--json"]) == EXIT_OK
    result = _json_output(capsys)
    assert result["max_residual"] <= 1e-9
    assert result["passed"] is True


def test_inspect(capsys):
    assert run(["inspect", "--graph", "kagome", "--json"]) == EXIT_OK
    result = _json_output(capsys)
    assert result["summary"]["regular_degree"] == 4
    assert result["summary"]["bipartite"] is False


def test_graph_file(tmp_path, capsys):
    path = tmp_path / "pendant.graph"
    path.write_text("dim 1\nvertices 2\nedge 0 1 0\nedge 0 0 1\n")
    assert run(["inspect", "--graph", str(path), "--json"]) == EXIT_OK
    assert _json_output(capsys)["summary"]["degrees"] == [3, 1]


def test_bad_graph(tmp_path, capsys):
    path = tmp_path / "bad.graph"
    path.write_text("dim 1\nvertices 1\nedge 0 0 0\n")
    assert run(["invariants", "--graph", str(path)]) == EXIT_INPUT_ERROR
    assert "error" in capsys.readouterr().err


def test_unknown_graph(capsys):
    assert run(["invariants", "--graph", "no-such-file.graph"]) == EXIT_INPUT_ERROR
    assert "error" in capsys.readouterr().err


def test_usage_errors():
    assert run([]) == EXIT_INPUT_ERROR
    assert run(["isospectral", "--graph", "pendant", "--q1", "zero", "--q2", "zero", "--mode", "both"]) \
        == EXIT_INPUT_ERROR
    assert run(["invariants", "--graph", "kagome", "--cap", "0"]) == EXIT_INPUT_ERROR


def test_cap_exceeded(capsys):
    assert run(["invariants", "--graph", "kagome", "--max-n", "5", "--cap", "4"]) == EXIT_INPUT_ERROR
    assert "cap" in capsys.readouterr().err
