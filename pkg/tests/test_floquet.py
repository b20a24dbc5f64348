import numpy as np
import pytest

from builtin_graphs import build, build_cycle
from floquet import (
    build_floquet, is_isospectral, isospectral_floquet, isospectral_periodic,
    pendant_isospectral_pair, periodic_trace_moments, quasimomentum_samples, trace_power,
    verify_trace_formula,
)
from graph_core import minus_degree_potential
from invariants import invariant_table
from models import GraphValidationError, InvariantError, Potential, SpectrumMode
from polynomial import ComplexRational

BUILTIN_CASES = ["cycle 5", "pendant", "kagome", "zd 3,3", "zd 2,2"]


class TestFloquetMatrix:
    def test_pendant_matrix(self, pendant):
        k = 0.7
        matrix = build_floquet(pendant, None, [k])
        expected = np.array([[2 * np.cos(k), 1], [1, 0]])
        assert np.allclose(matrix.entries, expected)

    def test_row_sums_are_degrees(self, builtin_graph):
        matrix = build_floquet(builtin_graph, None, np.zeros(builtin_graph.dim))
        assert np.allclose(matrix.entries.sum(axis=1), builtin_graph.degrees)

    def test_hermitian_for_real_potential(self, kagome, make_potential):
        matrix = build_floquet(kagome, make_potential(3, 5), [0.3, -1.1])
        assert matrix.is_hermitian()
        complex_q = Potential.from_values([ComplexRational(0, 1), 0, 0])
        assert not build_floquet(kagome, complex_q, [0.3, -1.1]).is_hermitian()

    def test_quasimomentum_dimension(self, kagome):
        with pytest.raises(GraphValidationError):
            build_floquet(kagome, None, [0.1])

    def test_second_moment(self, pendant):
        k = 1.3
        q = Potential.from_values([ComplexRational(2), ComplexRational(-1)])
        h = trace_power(build_floquet(pendant, q, [k]), 2)
        a = trace_power(build_floquet(pendant, None, [k]), 2)
        assert h - a == pytest.approx(4 + 1 + 4 * 2 * np.cos(k))

    def test_pendant_moments(self, pendant):
        for values in ([0, 0], [-2, 2]):
            moments = periodic_trace_moments(pendant, Potential.from_values(values), 2)
            assert moments == pytest.approx([2, 6])

    def test_sample_layout(self):
        ks = quasimomentum_samples(2, 4, 5, seed=3)
        assert ks.shape == (21, 2)
        assert np.all(np.abs(ks) <= np.pi)
        assert np.array_equal(ks, quasimomentum_samples(2, 4, 5, seed=3))


class TestTraceFormula:
    def test_zero_potential(self, builtin_graph):
        report = verify_trace_formula(builtin_graph, Potential.zero(builtin_graph.nu), grid=3, samples=2)
        assert report.passed
        assert report.max_lhs < 1e-9

    def test_kagome(self, kagome):
        report = verify_trace_formula(kagome, Potential.from_values([1, 2, 3]), max_n=3)
        assert report.passed
        assert report.max_residual <= 1e-9 * max(1.0, report.max_lhs)
        assert [s.n for s in report.samples] == sorted(s.n for s in report.samples)

    @pytest.mark.parametrize("name", BUILTIN_CASES)
    def test_random_potentials(self, name, make_potential):
        graph = build(name)
        for seed in range(20):
            potential = make_potential(graph.nu, seed, complex_values=seed % 2 == 1)
            report = verify_trace_formula(graph, potential, grid=8, samples=16, seed=seed)
            assert report.passed, f"{name} seed {seed}: residual {report.max_residual}"

    def test_imaginary_part_vanishes_for_real_potentials(self, kagome, make_potential):
        potential = make_potential(3, 11)
        report = verify_trace_formula(kagome, potential, grid=3, samples=3)
        for sample in report.samples:
            assert abs(sample.lhs.imag) <= 1e-10 * max(1.0, abs(sample.lhs))

    def test_wrong_potential_length(self, kagome):
        with pytest.raises(GraphValidationError):
            verify_trace_formula(kagome, Potential.zero(2))


class TestIsospectrality:
    def test_pendant_pair_from_zero(self, pendant):
        zero = Potential.zero(2)
        partner = Potential.from_values([-2, 2])
        floquet = isospectral_floquet(pendant, zero, partner)
        assert not floquet.isospectral
        assert (floquet.witness_n, floquet.witness_m) == (2, (1,))
        assert (floquet.value_1, floquet.value_2) == (ComplexRational(0), ComplexRational(-2))
        assert isospectral_periodic(pendant, zero, partner).isospectral

    def test_identical_potentials(self, kagome):
        q = Potential.from_values([1, 2, 3])
        assert is_isospectral(kagome, q, q, SpectrumMode.FLOQUET).isospectral
        assert is_isospectral(kagome, q, q, SpectrumMode.PERIODIC).isospectral

    def test_kagome_swap_is_detected(self, kagome):
        result = isospectral_floquet(kagome, Potential.from_values([1, 2, 3]), Potential.from_values([2, 1, 3]))
        assert not result.isospectral
        assert result.witness_n == 3

    def test_cycle_rotation(self, make_potential):
        graph = build_cycle(5)
        q = make_potential(5, 7)
        rotated = Potential.from_values(q.values[1:] + q.values[:1])
        assert isospectral_floquet(graph, q, rotated).isospectral
        assert isospectral_periodic(graph, q, rotated).isospectral

    def test_cycle_modes_agree(self, make_potential):
        graph = build_cycle(5)
        for seed in range(5):
            q1 = make_potential(5, 100 + seed)
            q2 = make_potential(5, 200 + seed)
            assert (isospectral_floquet(graph, q1, q2).isospectral
                    == isospectral_periodic(graph, q1, q2).isospectral)

    def test_floquet_implies_periodic(self, kagome, make_potential):
        q = make_potential(3, 9)
        assert isospectral_floquet(kagome, q, q).isospectral
        assert isospectral_periodic(kagome, q, q).isospectral


class TestPendantPartner:
    def test_known_pairs(self, pendant):
        _, partner = pendant_isospectral_pair(pendant, Potential.zero(2))
        assert partner == Potential.from_values([-2, 2])
        _, partner = pendant_isospectral_pair(pendant, Potential.from_values([1, 5]))
        assert partner == Potential.from_values([3, 3])

    def test_minus_degree_is_fixed(self, pendant):
        q = minus_degree_potential(pendant)
        assert q == Potential.from_values([-3, -1])
        _, partner = pendant_isospectral_pair(pendant, q)
        assert partner == q

    def test_random_pairs(self, pendant, make_potential):
        table = invariant_table(pendant, 2)
        for seed in range(20):
            q = make_potential(2, seed)
            first, partner = pendant_isospectral_pair(pendant, q)
            assert first == q
            assert isospectral_periodic(pendant, q, partner).isospectral
            assert table.marginal(2).evaluate(q.values) == table.marginal(2).evaluate(partner.values)

    def test_other_graphs_rejected(self, kagome):
        with pytest.raises(InvariantError):
            pendant_isospectral_pair(kagome, Potential.zero(3))


class TestZeroCharacterization:
    def test_nonzero_real_potentials(self, loop_free_graph, make_potential):
        graph = loop_free_graph
        zero = Potential.zero(graph.nu)
        for seed in range(20):
            q = make_potential(graph.nu, seed, nonzero=True)
            result = isospectral_periodic(graph, q, zero)
            assert not result.isospectral
            assert result.witness_n in (1, 2)

    def test_mean_zero_potentials_fail_at_second_order(self, loop_free_graph, make_potential):
        graph = loop_free_graph
        zero = Potential.zero(graph.nu)
        for seed in range(10):
            q = make_potential(graph.nu, 50 + seed, nonzero=True)
            mean = sum((v.re for v in q.values), 0) / graph.nu
            centred = Potential.from_values([ComplexRational(v.re - mean) for v in q.values])
            if centred.is_zero():
                continue
            result = isospectral_periodic(graph, centred, zero)
            assert not result.isospectral
            assert result.witness_n == 2

