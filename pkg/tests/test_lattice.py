from fractions import Fraction

import numpy as np
import pytest

from lattice import (
    box_points, build_zd, dft, fourier_invariants, fourier_linear_invariant, inverse_dft,
    lattice_point, make_spec, parse_periods, row_sum_square_invariant, vertex_id,
    zd_floquet_invariants, zd_fourier_comparison, zd_periodic_invariants,
)
from models import BuiltinError, InvariantError, Potential
from polynomial import ComplexRational


def _constant(spec, value):
    return Potential.from_values([value] * spec.volume)


class TestPeriodBox:
    def test_vertex_numbering(self):
        spec = make_spec((3, 2))
        assert [lattice_point(spec, v) for v in range(6)] == box_points(spec)
        assert box_points(spec)[:4] == [(0, 0), (1, 0), (2, 0), (0, 1)]
        assert all(vertex_id(spec, lattice_point(spec, v)) == v for v in range(6))

    def test_parse_periods(self):
        assert parse_periods("3,3").periods == (3, 3)
        assert parse_periods(" 2, 4 ").periods == (2, 4)
        with pytest.raises(BuiltinError):
            parse_periods("1,3")
        with pytest.raises(BuiltinError):
            parse_periods("a,b")
        with pytest.raises(BuiltinError):
            make_spec(())

    def test_zd_33(self):
        graph = build_zd(make_spec((3, 3)))
        assert graph.nu == 9
        assert len(graph.declared_edges) == 18
        assert set(graph.degrees) == {4}
        assert graph.is_periodic_simple
        assert not graph.has_multiple_edges
        assert graph.vertex_label(5) == "(2,1)"

    def test_zd_22_has_double_edges(self):
        graph = build_zd(make_spec((2, 2)))
        assert set(graph.degrees) == {4}
        assert graph.has_multiple_edges
        assert graph.is_periodic_simple

    def test_period_two_line(self):
        graph = build_zd(make_spec((2,)))
        assert [(e.tail, e.head, e.index) for e in graph.declared_edges] == [(0, 1, (0,)), (1, 0, (1,))]


class TestClosedForms:
    def test_zero_potential(self):
        spec = make_spec((3, 3))
        values = zd_periodic_invariants(spec, Potential.zero(9))
        assert (values.i1, values.i2, values.i3) == (0, 0, 0)

    def test_constant_potential(self):
        spec = make_spec((3, 3))
        values = zd_periodic_invariants(spec, _constant(spec, 1))
        assert (values.i1, values.i2, values.i3) == (9, Fraction(9, 2), 3 + 4 * 9)
        values = zd_periodic_invariants(make_spec((2, 2)), _constant(make_spec((2, 2)), 1))
        assert values.i3 == ComplexRational(Fraction(4, 3) + 8 * 4)

    def test_single_site(self):
        spec = make_spec((3, 3))
        potential = Potential.from_values([1] + [0] * 8)
        assert zd_floquet_invariants(spec, potential, 0) == (ComplexRational(1), ComplexRational(1))
        assert zd_floquet_invariants(spec, potential, 1) == (ComplexRational(1), ComplexRational(1))

    def test_row_sum_square(self, make_potential):
        spec = make_spec((3, 3))
        potential = make_potential(9, 4)
        values = zd_periodic_invariants(spec, potential)
        for axis in (0, 1):
            _, quadratic = zd_floquet_invariants(spec, potential, axis)
            assert row_sum_square_invariant(spec, potential, axis) == (quadratic - values.i2) * 2

    def test_axis_out_of_range(self):
        spec = make_spec((3, 3))
        with pytest.raises(InvariantError):
            zd_floquet_invariants(spec, Potential.zero(9), 2)


class TestFourier:
    def test_constant_potential(self):
        spec = make_spec((3, 3))
        fourier = dft(spec, _constant(spec, 2))
        expected = np.zeros((3, 3))
        expected[0, 0] = 2
        assert np.allclose(fourier.values, expected)
        result = fourier_invariants(spec, _constant(spec, 2))
        assert result["I1"] == pytest.approx(18)
        assert result["I2"] == pytest.approx(18)

    @pytest.mark.parametrize("periods", [(3, 3), (2, 3)])
    def test_parseval(self, periods, make_potential):
        spec = make_spec(periods)
        for seed in range(20):
            potential = make_potential(spec.volume, seed, complex_values=seed % 2 == 1)
            direct = sum(abs(complex(v)) ** 2 for v in potential.values)
            spectral = spec.volume * float(np.sum(np.abs(dft(spec, potential).values) ** 2))
            assert spectral == pytest.approx(direct, rel=1e-12, abs=1e-12)

    @pytest.mark.parametrize("periods", [(3, 3), (2, 3)])
    def test_matches_direct_closed_forms(self, periods, make_potential):
        spec = make_spec(periods)
        for seed in range(20):
            potential = make_potential(spec.volume, seed)
            comparison = zd_fourier_comparison(spec, potential)
            assert comparison["max_residual"] <= 1e-9
            assert len(comparison["axes"]) == spec.dim

    def test_fourier_row_form(self, make_potential):
        spec = make_spec((2, 3))
        potential = make_potential(6, 8)
        result = fourier_invariants(spec, potential)
        for axis in (0, 1):
            _, quadratic = zd_floquet_invariants(spec, potential, axis)
            assert result["floquet"][axis] == pytest.approx(float(quadratic.re), rel=1e-9, abs=1e-9)

    def test_linear_invariant_for_complex_potentials(self, make_potential):
        spec = make_spec((3, 3))
        for seed in range(5):
            potential = make_potential(9, seed, complex_values=True)
            total = complex(sum((v for v in potential.values), ComplexRational()))
            assert fourier_linear_invariant(spec, potential) == pytest.approx(total, abs=1e-12)

    def test_inverse(self, make_potential):
        spec = make_spec((2, 3))
        potential = make_potential(6, 3, complex_values=True)
        assert np.allclose(inverse_dft(dft(spec, potential)), potential.to_complex_array())

    def test_complex_potential_rejected(self):
        spec = make_spec((3, 3))
        potential = Potential.from_values([ComplexRational(0, 1)] + [0] * 8)
        with pytest.raises(InvariantError):
            fourier_invariants(spec, potential)
