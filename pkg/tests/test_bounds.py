"""Tests for bound formulas, operator-inequality verifiers and scaling fits."""

import itertools
import json
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from emptiness.bounds import (
    boundary_volume_bound,
    boundary_volume_exact,
    chessboard_exponent,
    chessboard_exponent_2d,
    chessboard_report,
    chessboard_verify,
    combined_upper_bound,
    den_verify,
    entropy_bound,
    fit_scaling,
    holder_verify,
    num_bound,
    pf_lower_bound,
    pf_lower_bound_eta,
    rotated_hamiltonian,
    rp_expectation,
    rp_verify,
    tile_upper_bound,
    window_count,
    window_log_density,
)
from emptiness.core.errors import ValidationError
from emptiness.exact import (
    build_hamiltonian,
    efp_ground_sector,
    full_spectrum,
    identity_operator,
    projector_contour,
)
from emptiness.lattice import build_torus
from emptiness.opc import OscPathConfig, validate_opc
from emptiness.sixvertex import enumerate_configs, weight

LN2 = math.log(2.0)


def _brute_window_count(l, ell):
    """Enumerate every colouring of the window and keep the valid ones."""
    n_h, n_v = (l + 1) * 2 * ell, l * 2 * ell
    count = 0
    for bits in itertools.product([False, True], repeat=n_h + n_v):
        black_h = np.array(bits[:n_h]).reshape(l + 1, 2 * ell)
        free_v = np.array(bits[n_h:]).reshape(l, 2 * ell)
        black_v = np.insert(free_v, ell, False, axis=1)
        count += validate_opc(OscPathConfig(black_h, black_v)).valid
    return count


class TestChessboardExponent:
    @pytest.mark.parametrize("n,l,d,expected", [(8, 4, 1, 4), (16, 4, 2, 64), (8, 2, 1, 8), (4, 2, 1, 4)])
    def test_values(self, n, l, d, expected):
        assert chessboard_exponent(n, l, d) == expected
        assert chessboard_report(n, l, d).valid

    def test_non_power_of_two_rounds_up(self):
        report = chessboard_report(12, 4, 1)
        assert report.inputs["K"] == 8
        assert not report.valid

    @pytest.mark.parametrize("l", [0, 5])
    def test_rejects_block_sides(self, l):
        with pytest.raises(ValidationError):
            chessboard_exponent(8, l, 1)

    def test_two_dimensional_tiles(self):
        assert chessboard_exponent_2d(16, 16, 4, 4) == 4 * 16 * 16 // (4 * 4)
        assert chessboard_exponent_2d(8, 16, 2, 8) == 4 * 8 * 16 // (2 * 8)
        with pytest.raises(ValidationError):
            chessboard_exponent_2d(8, 8, 2, 5)


class TestNumBound:
    def test_degenerates_to_log_two(self):
        report = num_bound(1.0 - 1e-12, 1, 32, 24, 24 / 1536)
        assert report.inputs["M"] == pytest.approx(1.0)
        assert report.value == pytest.approx(LN2, abs=1e-9)
        assert report.valid

    def test_plug_in_at_m_equal_e(self):
        delta_t = 24 / (1536 * math.e)
        report = num_bound(0.0, 1, 32, 24, delta_t)
        first = -32 * delta_t / 64
        second = (0.25 - 1.0) * 32 * delta_t
        assert report.value == pytest.approx(np.logaddexp(first, second), rel=1e-12)
        assert report.valid

    def test_exponents_linear_in_volume(self):
        delta_t = 24 / (1536 * math.e)
        first = -32 * delta_t / 64
        second = (0.25 - 1.0) * 32 * delta_t
        doubled = num_bound(0.0, 1, 64, 24, delta_t)
        assert doubled.value == pytest.approx(np.logaddexp(2 * first, 2 * second), rel=1e-12)

    def test_monotone_in_delta_when_first_term_dominates(self):
        values = [num_bound(delta, 1, 64, 24, 1e-4).value for delta in (-2.0, -1.0, 0.0, 0.5, 0.9)]
        assert np.all(np.diff(values) > 0)

    def test_flags(self):
        report = num_bound(0.0, 1, 32, 10, 1.0)
        assert not report.flags["l_ge_24"]
        assert not report.flags["m_ge_1"]
        assert not report.valid
        assert math.isfinite(report.value)
        assert json.loads(report.to_json())["valid"] is False

    def test_rejects_nonpositive_time_slice(self):
        with pytest.raises(ValidationError):
            num_bound(0.0, 1, 32, 24, 0.0)


class TestEntropyAndWindows:
    def test_entropy_values(self):
        assert entropy_bound(0.5, 1) == pytest.approx(2 * LN2)
        assert entropy_bound(0.5, 10 ** 9) == pytest.approx(LN2, abs=1e-8)

    @pytest.mark.parametrize("epsilon", [0.0, 1.0, 1.2])
    def test_entropy_rejects_epsilon(self, epsilon):
        with pytest.raises(ValidationError):
            entropy_bound(epsilon, 4)

    def test_window_count(self):
        assert window_count(4, 1) == 36
        assert window_count(1, 1) == 9

    @pytest.mark.parametrize("l,ell", [(1, 1), (2, 1), (3, 1)])
    def test_window_count_matches_enumeration(self, l, ell):
        assert window_count(l, ell) == _brute_window_count(l, ell)

    @pytest.mark.parametrize("l,ell", [(4, 1), (6, 1), (6, 2), (8, 2), (8, 3), (10, 4)])
    def test_windows_respect_entropy_bound(self, l, ell):
        epsilon = (ell + 1) / l
        assert window_log_density(l, ell) <= entropy_bound(epsilon, l)

    def test_window_rejects_sizes(self):
        with pytest.raises(ValidationError):
            window_count(0, 1)
        with pytest.raises(ValidationError):
            window_count(13, 1)


class TestPartitionBounds:
    def test_formula(self):
        assert pf_lower_bound(8, 2, 0.0) == pytest.approx(2 / 8 * LN2)
        assert pf_lower_bound(8, 2, -5.0) < 0

    @pytest.mark.parametrize("r_tile", [1, 2])
    @pytest.mark.parametrize("kappa", [0.0, -0.5])
    def test_enumeration_respects_bound(self, r_tile, kappa):
        n, t = 4, 2
        z = sum(weight(c, kappa) for c in enumerate_configs(n, t) if c.row_magnetization(0) == 0)
        assert math.log(z) / (n * t) >= pf_lower_bound(n, r_tile, kappa)

    @pytest.mark.parametrize("n", [8, 16, 24])
    @pytest.mark.parametrize("r_tile", [1, 2, 3])
    @pytest.mark.parametrize("kappa", [0.0, -0.3])
    def test_eta_form_agrees(self, n, r_tile, kappa):
        assert pf_lower_bound_eta(n, 1 / (8 * r_tile), kappa) == pytest.approx(pf_lower_bound(n, r_tile, kappa))

    def test_rejects_tile(self):
        with pytest.raises(ValidationError):
            pf_lower_bound(8, 0, 0.0)

    def test_tile_upper_bound(self):
        report = tile_upper_bound(0.25, -0.5, 8, 1, 64, 64)
        expected = (
            -0.5 * math.log(0.25) - 1.5 * math.log(0.75) + 0.5 + 2 * LN2 / 8
            + (15 / 64 + 1 / 64) * (0.5 + 2 * LN2)
        )
        assert report.value == pytest.approx(expected)
        assert report.valid
        assert not tile_upper_bound(0.1, 0.0, 8, 1, 64, 64).valid

    def test_combined_bound_negative_for_small_epsilon(self):
        epsilon = 1e-3
        value = combined_upper_bound(epsilon, 2 * epsilon, 0.0, 10 ** 6)
        expected = 2 * epsilon * math.log(epsilon) + 4 * epsilon * LN2 - 2 * (1 - epsilon) * math.log(1 - epsilon)
        expected += 6 * epsilon * LN2 + 2 * LN2 / 10 ** 6
        assert value == pytest.approx(expected)
        assert value < 0


class TestBoundaryVolume:
    def test_formula(self):
        assert boundary_volume_bound(1, 8, 2, 1) == 24
        assert boundary_volume_bound(1, 8, 2, 3) == 3 * boundary_volume_bound(1, 8, 2, 1)

    def test_exact_count(self, chain8):
        assert boundary_volume_exact(chain8, 2, 1) == 8

    @pytest.mark.parametrize("d,n,l", [(1, 16, 4), (1, 16, 8), (2, 8, 2), (2, 8, 4)])
    @pytest.mark.parametrize("r", [1, 2])
    def test_exact_below_bound(self, d, n, l, r):
        assert boundary_volume_exact(build_torus(d, n), l, r) <= boundary_volume_bound(d, n, l, r)


class TestHolder:
    def test_identity_is_equality(self, chain4):
        h = build_hamiltonian(chain4, -0.5)
        lhs, rhs, passed = holder_verify(h, identity_operator(4), 2, 1.0)
        assert lhs == pytest.approx(1.0)
        assert rhs == pytest.approx(1.0)
        assert passed

    @pytest.mark.parametrize("n_half", [1, 2, 4])
    def test_contour_projector(self, chain4, n_half):
        h = build_hamiltonian(chain4, -0.5)
        assert holder_verify(h, projector_contour(chain4, 2), n_half, 1.0).passed

    def test_random_symmetric_operators(self, chain4, rng):
        h = build_hamiltonian(chain4, -0.5)
        for _ in range(20):
            raw = rng.uniform(-1, 1, size=(16, 16))
            assert holder_verify(h, (raw + raw.T) / 2, int(rng.integers(1, 5)), 1.0).passed

    def test_random_general_operators(self, chain4, rng):
        h = build_hamiltonian(chain4, 0.3)
        for _ in range(10):
            result = holder_verify(h, rng.uniform(-1, 1, size=(16, 16)), 2, 0.7)
            assert result.passed and not result.details["hermitian"]

    def test_rejects_mismatch(self, chain4):
        h = build_hamiltonian(chain4, -0.5)
        with pytest.raises(ValidationError):
            holder_verify(h, np.eye(8), 1, 1.0)
        with pytest.raises(ValidationError):
            holder_verify(h, np.eye(16), 0, 1.0)


class TestChessboard:
    @pytest.mark.parametrize("beta", [0.5, 1.0, 2.0])
    def test_small_chain(self, chain4, beta):
        assert chessboard_verify(chain4, -0.5, beta, 2).passed

    @pytest.mark.parametrize("l", [2, 4])
    def test_eight_sites(self, chain8, l):
        assert chessboard_verify(chain8, -1.0, 1.0, l).passed

    @pytest.mark.parametrize("n,l", [(4, 2), (8, 2), (8, 4)])
    def test_infinite_temperature(self, n, l):
        lhs, rhs, passed = chessboard_verify(build_torus(1, n), -0.5, 0.0, l)
        k = chessboard_exponent(n, l, 1)
        assert lhs == pytest.approx(2.0 ** -l)
        assert rhs == pytest.approx((2.0 ** -n) ** (1 / k))
        assert passed

    def test_rejects_positive_delta(self, chain4):
        with pytest.raises(ValidationError):
            chessboard_verify(chain4, 0.5, 1.0, 2)


class TestReflectionPositivity:
    def test_rotation_keeps_spectrum(self, chain4):
        plain = full_spectrum(build_hamiltonian(chain4, -0.7))
        assert np.allclose(full_spectrum(rotated_hamiltonian(chain4, -0.7)), plain)

    def test_identity_on_half(self, chain4):
        h = rotated_hamiltonian(chain4, -0.7)
        assert rp_expectation(chain4, h, np.eye(4), 1.0) == pytest.approx(1.0)

    def test_infinite_temperature_is_square_of_trace(self, chain4, rng):
        h = rotated_hamiltonian(chain4, -0.7)
        for a in (np.diag(rng.uniform(-1, 1, size=4)), rng.uniform(-1, 1, size=(4, 4))):
            a = (a + a.T) / 2
            assert rp_expectation(chain4, h, a, 0.0) * 16 == pytest.approx(np.trace(a) ** 2)

    def test_random_operators(self, chain4):
        report = rp_verify(chain4, -0.7, 1.0, trials=100, seed=7)
        assert report.trials == 100
        assert report.passed, report.minimum

    def test_deterministic_seed(self, chain4):
        first = rp_verify(chain4, -0.3, 0.5, trials=5, seed=11)
        second = rp_verify(chain4, -0.3, 0.5, trials=5, seed=11)
        assert first.values == second.values

    def test_rejects_positive_delta(self, chain4):
        with pytest.raises(ValidationError):
            rp_verify(chain4, 0.2, 1.0, trials=1)

    def test_rejects_wrong_shape(self, chain4):
        with pytest.raises(ValidationError):
            rp_expectation(chain4, rotated_hamiltonian(chain4, -0.5), np.eye(3), 1.0)


class TestDen:
    @pytest.mark.parametrize("delta", [-2.0, -1.0, 0.0, 0.5, 0.9])
    @pytest.mark.parametrize("beta", [0.0, 0.5, 2.0])
    def test_partition_lower_bound(self, chain6, delta, beta):
        result = den_verify(chain6, delta, beta)
        assert result.passed
        assert result.rhs >= 0.0

    @pytest.mark.slow
    def test_two_dimensions(self):
        assert den_verify(build_torus(2, 4), -0.5, 1.0).passed


def _gaussian_points(c=0.3, nu=2.0, prefactor=0.5):
    return [(l, prefactor * math.exp(-c * l ** nu)) for l in range(1, 7)]


class TestScaling:
    def test_recovers_noiseless_gaussian(self):
        fit = fit_scaling(_gaussian_points())
        assert fit.c == pytest.approx(0.3, abs=1e-6)
        assert fit.nu == pytest.approx(2.0, abs=1e-6)
        assert fit.log_c == pytest.approx(math.log(0.5), abs=1e-6)
        low, high = fit.nu_interval
        assert low - 1e-6 <= 2.0 <= high + 1e-6
        assert fit.decaying

    @pytest.mark.parametrize("d", [1, 2])
    def test_fixed_exponent(self, d):
        fit = fit_scaling(_gaussian_points(nu=d + 1.0), d=d, mode="fixed")
        assert fit.nu == d + 1
        assert fit.c == pytest.approx(0.3, rel=1e-9)
        assert fit.nu_interval is None

    @given(scale=st.floats(min_value=1e-6, max_value=1e6))
    @settings(max_examples=10, deadline=None)
    def test_rescaling_only_shifts_prefactor(self, scale):
        noise = np.random.default_rng(3).normal(0, 0.05, size=6)
        points = [(l, math.exp(-0.2 * l ** 1.8 + e)) for l, e in zip(range(1, 7), noise)]
        scaled = [(l, scale * value) for l, value in points]
        for mode, tol in (("fixed", 1e-9), ("free", 1e-8)):
            base = fit_scaling(points, mode=mode, resamples=20)
            moved = fit_scaling(scaled, mode=mode, resamples=20)
            assert moved.c == pytest.approx(base.c, rel=tol)
            assert moved.nu == pytest.approx(base.nu, rel=tol)
            assert moved.log_c - base.log_c == pytest.approx(math.log(scale), abs=1e-6)

    def test_constant_points_are_not_decaying(self):
        fit = fit_scaling([(l, 0.25) for l in range(1, 7)])
        assert fit.c == pytest.approx(0.0, abs=1e-9)
        assert not fit.decaying

    def test_nonpositive_points_excluded(self):
        fit = fit_scaling(_gaussian_points() + [(7, 0.0)])
        assert fit.excluded == 1
        assert len(fit.l_values) == 6

    def test_needs_four_points(self):
        with pytest.raises(ValidationError):
            fit_scaling(_gaussian_points()[:3])
        with pytest.raises(ValidationError):
            fit_scaling(_gaussian_points(), mode="cubic")

    def test_csv(self):
        lines = fit_scaling(_gaussian_points(), mode="fixed").to_csv().splitlines()
        assert lines[0] == "L,efp,fitted"
        assert len(lines) == 7
        assert float(lines[1].split(",")[1]) == pytest.approx(0.5 * math.exp(-0.3))

    def test_exact_xx_chain_exponent(self):
        torus = build_torus(1, 12)
        points = [(l, efp_ground_sector(torus, 0.0, 0, l)) for l in range(1, 7)]
        fit = fit_scaling(points, resamples=50)
        assert 1.5 <= fit.nu <= 2.5
