import pytest

from builtin_graphs import build
from graph_core import serialize_graph
from models import GraphFormatError, Potential
from orchestrator import SpectralOrchestrator
from polynomial import ComplexRational


@pytest.fixture
def orch():
    return SpectralOrchestrator(grid=2, samples=2)


class TestResolution:
    def test_builtin_name(self, orch):
        graph, potential = orch.resolve_graph("kagome")
        assert graph == build("kagome")
        assert potential.is_zero()

    def test_inline_text_with_potential(self, orch):
        text = serialize_graph(build("pendant"), Potential.from_values([1, ComplexRational(0, 2)]))
        graph, potential = orch.resolve_graph(text)
        assert graph == build("pendant")
        assert potential.values == (ComplexRational(1), ComplexRational(0, 2))

    def test_graph_file(self, orch, tmp_path):
        path = tmp_path / "k.graph"
        path.write_text(serialize_graph(build("kagome")))
        graph, _ = orch.resolve_graph(str(path))
        assert graph == build("kagome")

    def test_unknown_source(self, orch):
        with pytest.raises(GraphFormatError):
            orch.resolve_graph("missing.graph")

    def test_potential_sources(self, orch, tmp_path, pendant):
        expected = Potential.from_values([-2, 2])
        assert orch.resolve_potential(["-2", "2"], pendant) == expected
        assert orch.resolve_potential("-2 2", pendant) == expected
        assert orch.resolve_potential("vertices 2\npotential 0 -2\npotential 1 2\n", pendant) == expected
        path = tmp_path / "q.pot"
        path.write_text("vertices 2\npotential 0 -2\npotential 1 2\n")
        assert orch.resolve_potential(str(path), pendant) == expected
        assert orch.resolve_potential("zero", pendant).is_zero()
        assert orch.resolve_potential(None, pendant, fallback=expected) == expected
        assert orch.resolve_potential(["1,2", "0"], pendant).values[0] == ComplexRational(1, 2)

    def test_potential_length(self, orch, pendant):
        with pytest.raises(GraphFormatError):
            orch.resolve_potential(["1"], pendant)


class TestOperations:
    def test_invariants_use_declared_potential(self, orch):
        text = serialize_graph(build("pendant"), Potential.from_values([-2, 2]))
        result = orch.compute_invariants(text, evaluate_values=True)
        assert result["success"]
        assert result["potential"]["values"] == ["-2", "2"]
        assert [v["value"] for v in result["periodic_values"]] == ["0", "0"]

    def test_failures_are_reported(self, orch):
        result = orch.compute_invariants("kagome", max_n=20)
        assert result["success"] is False
        assert result["error_type"] == "CapExceededError"
        result = orch.emit_builtin("hexagonal")
        assert result["error_type"] == "BuiltinError"

    def test_linear_quadratic_error(self, orch):
        result = orch.compute_invariants("zd 3,3", max_n=2, indices=[[2, 0]])
        assert result["success"] is False
        assert result["error_type"] == "InvariantError"

    def test_list_cycles(self, orch):
        result = orch.list_cycles("pendant", 2, index=[1])
        assert result["count"] == 1
        assert result["cycles"][0]["kind"] == "modified"

    def test_check_isospectral_modes(self, orch):
        assert orch.check_isospectral("pendant", "zero", "-2 2", "periodic")["isospectral"] is True
        assert orch.check_isospectral("pendant", "zero", "-2 2", "floquet")["isospectral"] is False
        assert orch.check_isospectral("pendant", "zero", "zero", "spectral")["success"] is False

    def test_pendant_partner(self, orch):
        result = orch.pendant_partner("-3 -1")
        assert result["solutions"][0] == result["solutions"][1]
        assert result["potential_files"][1] == "vertices 2\npotential 0 -3\npotential 1 -1\n"

    def test_verify_trace(self, orch):
        result = orch.verify_trace("kagome", ["1", "2", "3"])
        assert result["success"] and result["passed"]
        assert result["report"].passed
        assert result["samples"] == 3 * (4 + 2)

    def test_zd_fourier(self, orch):
        result = orch.zd_fourier("2,3", [str(v) for v in range(6)])
        assert result["success"] and result["passed"]
        complex_result = orch.zd_fourier([3, 3], ["0,1"] + ["0"] * 8)
        assert complex_result["error_type"] == "InvariantError"

    def test_status(self, orch):
        status = orch.status()
        assert status["grid"] == 2
        assert "pendant" in status["builtins"]
