"""Tests for six-vertex configurations, the transfer matrix and six-vertex sampling."""

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from emptiness.core.errors import BudgetExceededError, ValidationError
from emptiness.exact import build_hamiltonian, efp_ground_sector, restrict_to_sector
from emptiness.lattice import build_torus
from emptiness.sixvertex import (
    SixVertexConfig,
    TransferOperator,
    apply_transfer,
    component_ratio_finite_t,
    consistent_rows,
    delta_from_kappa,
    dense_transfer,
    efp_sixvertex,
    enumerate_configs,
    kappa_from_delta,
    log_weight,
    reflect_horizontal,
    reflect_vertical,
    row_structure_checks,
    sample_configs,
    sector_top_eigenvector,
    sink_source_indicator,
    sutherland_check,
    transfer_trace_power,
    validate_config,
    vertex_type,
    vertex_types,
    weight,
)

# Example configuration on the 6 x 6 torus; row y lists the spins at x = 0..5.
EXAMPLE_H_ROWS = [
    [-1, 1, 1, 1, 1, 1],
    [1, -1, -1, -1, 1, 1],
    [1, 1, -1, 1, -1, -1],
    [-1, -1, 1, -1, -1, -1],
    [-1, 1, -1, -1, 1, 1],
    [1, -1, 1, 1, -1, -1],
]
EXAMPLE_V_ROWS = [
    [1, -1, -1, 1, 1, 1],
    [1, 1, -1, 1, -1, 1],
    [-1, 1, 1, -1, 1, 1],
    [-1, 1, -1, 1, 1, 1],
    [1, -1, 1, 1, -1, 1],
    [-1, 1, -1, 1, 1, 1],
]
EXAMPLE_SINKS = {(0, 0), (1, 1), (2, 2), (4, 2), (3, 3), (0, 4), (2, 4), (1, 5), (4, 5)}
EXAMPLE_SOURCES = {(1, 0), (4, 1), (0, 2), (3, 2), (2, 3), (1, 4), (4, 4), (0, 5), (2, 5)}


@pytest.fixture
def example_config() -> SixVertexConfig:
    return SixVertexConfig(np.array(EXAMPLE_H_ROWS).T, np.array(EXAMPLE_V_ROWS).T)


@pytest.fixture(scope="module")
def configs_4x2():
    return enumerate_configs(4, 2)


class TestConfigurations:
    def test_reference_is_valid_and_all_type_one(self):
        reference = SixVertexConfig.reference(4, 4)
        assert validate_config(reference).valid
        assert np.all(vertex_types(reference) == 1)
        assert weight(reference, 1.7) == 1.0

    def test_isolated_vertical_flip_breaks_two_vertices(self):
        broken = SixVertexConfig.reference(4, 4).with_vertical_flipped(1, 2)
        report = validate_config(broken)
        assert not report.valid
        assert sorted(report.violations) == [(1, 2), (1, 3)]
        assert report.first_violation == (1, 2)

    def test_shape_mismatch_rejected(self):
        with pytest.raises(ValidationError):
            SixVertexConfig(np.ones((4, 2)), np.ones((4, 3)))
        with pytest.raises(ValidationError):
            validate_config(SixVertexConfig.reference(4, 2), shape=(4, 4))

    def test_example_configuration_is_valid(self, example_config):
        assert validate_config(example_config).valid

    def test_example_sinks_and_sources(self, example_config):
        types = vertex_types(example_config)
        assert {tuple(p) for p in np.argwhere(types == 6).tolist()} == EXAMPLE_SINKS
        assert {tuple(p) for p in np.argwhere(types == 5).tolist()} == EXAMPLE_SOURCES
        assert vertex_type(example_config, 0, 0) == 6
        assert sink_source_indicator(example_config)[0, 0] == 1

    def test_example_rows_have_even_sink_source_count(self, example_config):
        assert np.all(sink_source_indicator(example_config).sum(axis=0) % 2 == 0)

    def test_invalid_vertex_has_no_type(self):
        broken = SixVertexConfig.reference(4, 4).with_vertical_flipped(0, 0)
        with pytest.raises(ValidationError):
            vertex_type(broken, 0, 0)

    @given(kappa=st.floats(min_value=-3, max_value=3, allow_nan=False))
    @settings(max_examples=20, deadline=None)
    def test_weights_at_opposite_kappa_multiply_to_one(self, kappa):
        config = SixVertexConfig(np.array(EXAMPLE_H_ROWS).T, np.array(EXAMPLE_V_ROWS).T)
        assert weight(config, kappa) * weight(config, -kappa) == pytest.approx(1.0)
        assert weight(config, 0.0) == 1.0

    def test_json_roundtrip(self, example_config):
        assert SixVertexConfig.from_json(example_config.to_json()) == example_config


class TestEnumeration:
    def test_every_enumerated_config_is_valid_and_distinct(self, configs_4x2):
        assert all(validate_config(c).valid for c in configs_4x2)
        assert len(set(configs_4x2)) == len(configs_4x2)
        assert SixVertexConfig.reference(4, 2) in configs_4x2

    def test_count_matches_transfer_trace_at_uniform_point(self, configs_4x2):
        assert len(configs_4x2) == pytest.approx(transfer_trace_power(4, 0.0, 2))

    @pytest.mark.parametrize("n,t,kappa", [(4, 2, 0.7), (4, 3, -0.4), (4, 4, 0.25)])
    def test_partition_function_equals_transfer_trace(self, n, t, kappa):
        brute = sum(weight(c, kappa) for c in enumerate_configs(n, t))
        assert transfer_trace_power(n, kappa, t) == pytest.approx(brute, rel=1e-9)

    def test_enumeration_budget(self):
        with pytest.raises(BudgetExceededError):
            enumerate_configs(6, 6)

    def test_structure_checks_pass_on_all_configs(self, configs_4x2):
        for config in configs_4x2:
            report = row_structure_checks(config)
            assert report.ok, report.violations

    def test_structure_checks_refuse_invalid_config(self):
        with pytest.raises(ValidationError):
            row_structure_checks(SixVertexConfig.reference(4, 4).with_vertical_flipped(2, 2))

    def test_reference_passes_structure_checks(self):
        assert row_structure_checks(SixVertexConfig.reference(6, 4)).ok


class TestReflections:
    def test_odd_horizontal_reflection_preserves_validity_and_weight(self, configs_4x2):
        for config in configs_4x2:
            image = reflect_horizontal(config, 2, 1)
            assert validate_config(image).valid
            assert log_weight(image, 1.0) == log_weight(config, 1.0)
            assert reflect_horizontal(image, 2, 1) == config

    def test_odd_vertical_reflection_preserves_validity_and_weight(self, configs_4x2):
        for config in configs_4x2:
            image = reflect_vertical(config, 1, 1)
            assert validate_config(image).valid
            assert log_weight(image, -0.5) == log_weight(config, -0.5)

    def test_even_index_is_translation(self, example_config):
        image = reflect_horizontal(example_config, 1, 2)
        assert np.array_equal(image.v, np.roll(example_config.v, 2, axis=0))
        assert np.array_equal(image.h, np.roll(example_config.h, 2, axis=0))

    def test_tile_must_divide_side(self, example_config):
        with pytest.raises(ValidationError):
            reflect_horizontal(example_config, 4, 1)


class TestTransfer:
    def test_consistent_rows(self):
        assert consistent_rows(0b0011, 0b0011, 4) == [0, 0b1111]
        assert len(consistent_rows(0b0011, 0b0110, 4)) == 1
        assert consistent_rows(0b0011, 0b1100, 4) == []

    def test_dense_transfer_is_symmetric_nonnegative(self):
        a = dense_transfer(6, 0.4)
        assert np.allclose(a, a.T)
        assert np.all(a >= 0)
        assert np.allclose(np.diag(a), 2.0)

    @given(
        x=arrays(np.float64, 64, elements=st.floats(-1, 1)),
        y=arrays(np.float64, 64, elements=st.floats(-1, 1)),
    )
    @settings(max_examples=25, deadline=None)
    def test_matrix_free_application_is_symmetric(self, x, y):
        assert x @ apply_transfer(y, 0.3) == pytest.approx(apply_transfer(x, 0.3) @ y, abs=1e-10)

    def test_sectors_are_preserved(self):
        from emptiness.exact import sector_basis

        basis = sector_basis(8, 2)
        x = np.zeros(256)
        x[np.asarray(basis.states)] = np.random.default_rng(0).uniform(size=basis.dim)
        y = apply_transfer(x, -0.2)
        outside = np.setdiff1d(np.arange(256), basis.states)
        assert np.all(y[outside] == 0)

    def test_linear_operator_matches_dense(self):
        op = TransferOperator(4, 0.1).as_linear_operator()
        a = dense_transfer(4, 0.1)
        x = np.arange(16.0)
        assert np.allclose(op @ x, a @ x)

    @pytest.mark.parametrize("n", [2, 5])
    def test_bad_widths_rejected(self, n):
        with pytest.raises(ValidationError):
            apply_transfer(np.ones(1 << n), 0.0)

    def test_width_limit(self):
        with pytest.raises(ValidationError):
            TransferOperator(22, 0.0)

    def test_kappa_delta_conversion(self):
        assert delta_from_kappa(0.0) == 0.5
        assert delta_from_kappa(math.log(math.sqrt(2))) == pytest.approx(0.0)
        assert kappa_from_delta(delta_from_kappa(-0.37)) == pytest.approx(-0.37)
        with pytest.raises(ValidationError):
            kappa_from_delta(1.0)


class TestTopEigenvector:
    def test_fully_polarized_sector(self):
        top = sector_top_eigenvector(6, 0.5, 6)
        assert top.eigenvalue == 2.0
        assert top.basis.dim == 1

    def test_positive_and_normalized(self):
        top = sector_top_eigenvector(8, 0.3, 0)
        assert top.converged
        assert np.all(top.vector > 0)
        assert np.linalg.norm(top.vector) == pytest.approx(1.0)

    @pytest.mark.parametrize("kappa", [0.0, -0.5, 0.4])
    def test_eigenvector_of_matching_hamiltonian(self, kappa):
        top = sector_top_eigenvector(8, kappa, 0)
        h = restrict_to_sector(build_hamiltonian(build_torus(1, 8), delta_from_kappa(kappa)), top.basis).toarray()
        v = top.vector
        assert np.linalg.norm(h @ v - (v @ h @ v) * v) < 1e-8

    def test_finite_size_ratio_converges(self):
        top = sector_top_eigenvector(4, 0.0, 0)
        sigma = int(top.basis.states[0])
        limit = top.vector[0] ** 2
        errors = [abs(component_ratio_finite_t(4, 0.0, 0, sigma, t) - limit) for t in (2, 4, 8, 16)]
        assert all(later < earlier for earlier, later in zip(errors, errors[1:]))
        assert errors[-1] < 1e-6


class TestSutherland:
    @pytest.mark.parametrize("n,kappa", [(4, 0.0), (6, -0.5), (6, 0.35)])
    def test_commutes_at_matching_anisotropy(self, n, kappa):
        assert sutherland_check(n, kappa) < 1e-10

    def test_mismatched_anisotropy_does_not_commute(self):
        assert sutherland_check(4, 0.3, delta=0.0) > 1e-3


class TestSixVertexEfp:
    def test_empty_block(self):
        assert efp_sixvertex(8, 0.2, 0, 0) == 1.0

    @pytest.mark.parametrize("l", [1, 2, 3])
    def test_matches_exact_route_at_uniform_point(self, l):
        exact = efp_ground_sector(build_torus(1, 8), 0.5, 0, l)
        assert efp_sixvertex(8, 0.0, 0, l) == pytest.approx(exact, abs=1e-8)

    def test_matches_exact_route_at_free_fermion_point(self):
        exact = efp_ground_sector(build_torus(1, 8), 0.0, 0, 2)
        assert efp_sixvertex(8, math.log(math.sqrt(2)), 0, 2) == pytest.approx(exact, abs=1e-8)

    def test_block_longer_than_chain_rejected(self):
        with pytest.raises(ValidationError):
            efp_sixvertex(8, 0.0, 0, 9)


class TestSampling:
    def test_samples_are_valid_and_in_sector(self):
        for config in sample_configs(4, 3, 0.4, 0, 50, seed=3):
            assert validate_config(config).valid
            assert all(config.row_magnetization(j) == 0 for j in range(config.t))

    def test_sink_source_mean_matches_enumeration(self):
        kappa = 0.5
        sector = [c for c in enumerate_configs(4, 2) if c.row_magnetization(0) == 0]
        weights = np.array([weight(c, kappa) for c in sector])
        counts = np.array([sink_source_indicator(c).sum() for c in sector])
        mean = float(weights @ counts / weights.sum())
        variance = float(weights @ (counts - mean) ** 2 / weights.sum())

        samples = sample_configs(4, 2, kappa, 0, 3000, seed=11)
        observed = np.mean([sink_source_indicator(c).sum() for c in samples])
        assert abs(observed - mean) < 4 * math.sqrt(variance / len(samples))

    def test_same_seed_same_samples(self):
        assert sample_configs(4, 2, 0.1, 0, 5, seed=1) == sample_configs(4, 2, 0.1, 0, 5, seed=1)
