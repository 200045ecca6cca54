import numpy as np
import pytest

from conftest import random_correlation_matrix, random_hermitian
from physics.fock import density_matrix_from_correlations
from physics.gaussian import (
    CorrelationEvolution,
    CorrelationMatrix,
    SpectralDecomposition,
    evolve,
    evolve_many,
    fermi,
    gibbs_correlation_matrix,
    mean_occupation,
    reduce_modes,
)
from physics.model import BathSpec, ImpuritySpec, build_single_bath, initial_correlation_matrix_single


def two_level(hopping=1.0):
    return np.array([[0.0, hopping], [hopping, 0.0]])


class TestFermi:
    def test_half_at_chemical_potential(self):
        assert fermi(0.3, 2.0, 0.3) == 0.5

    def test_no_overflow_at_extreme_arguments(self):
        values = fermi(np.array([-1e6, 1e6]), 1.0)
        np.testing.assert_array_equal(values, [1.0, 0.0])

    def test_matches_closed_form(self):
        e = np.linspace(-3, 3, 13)
        np.testing.assert_allclose(fermi(e, 0.7, 0.2), 1 / (1 + np.exp(0.7 * (e - 0.2))), rtol=1e-14)


class TestCorrelationMatrix:
    def test_copy_is_read_only(self):
        source = np.eye(2)
        c = CorrelationMatrix(source)
        source[0, 0] = 0.0
        assert c.matrix[0, 0] == 1.0
        with pytest.raises(ValueError):
            c.matrix[0, 0] = 0.5

    def test_default_labels(self):
        assert CorrelationMatrix(np.eye(3)).mode_labels == ("0", "1", "2")

    def test_checked_eigenvalues(self):
        with pytest.raises(ValueError, match="outside"):
            CorrelationMatrix(np.diag([1.2, 0.1])).checked_eigenvalues()


class TestEvolution:
    def test_zero_time_returns_initial(self):
        c0 = CorrelationMatrix(np.diag([1.0, 0.0]))
        assert evolve(c0, two_level(), 0.0) is c0

    def test_two_level_oscillation(self):
        c0 = CorrelationMatrix(np.diag([1.0, 0.0]))
        for t in (0.3, 1.1, 2.5):
            c = evolve(c0, two_level(0.8), t)
            assert c.matrix[0, 0].real == pytest.approx(np.cos(0.8 * t) ** 2, abs=1e-13)

    def test_particle_number_and_spectrum_conserved(self, rng):
        h = random_hermitian(rng, 12, real=True)
        c0 = CorrelationMatrix(random_correlation_matrix(rng, 12))
        for c in evolve_many(c0, h, [0.1, 1.0, 17.0]):
            assert c.particle_number == pytest.approx(c0.particle_number, abs=1e-9)
            np.testing.assert_allclose(c.eigenvalues(), c0.eigenvalues(), atol=1e-10)
            assert np.max(np.abs(c.matrix - c.matrix.conj().T)) == 0.0

    def test_shared_evolution_matches_single_calls(self):
        bath = BathSpec(5.0, 30, 0.5)
        impurity = ImpuritySpec(0.2, 1.0)
        h = build_single_bath(impurity, bath)
        c0 = initial_correlation_matrix_single(impurity, bath)
        evolution = CorrelationEvolution(c0, h)
        for t in (0.5, 4.0):
            np.testing.assert_allclose(evolution.at(t).matrix, evolve(c0, h, t).matrix, atol=1e-14)

    def test_accepts_precomputed_decomposition(self):
        h = two_level()
        c0 = CorrelationMatrix(np.diag([1.0, 0.0]))
        decomposition = SpectralDecomposition.of(h)
        np.testing.assert_allclose(decomposition.reconstruct(), h, atol=1e-14)
        np.testing.assert_allclose(evolve(c0, decomposition, 1.0).matrix, evolve(c0, h, 1.0).matrix)

    @pytest.mark.parametrize("rate_times", [0.5, 1.0, 2.0, 4.0])
    def test_impurity_decays_at_the_golden_rule_rate(self, rate_times):
        gamma = 0.1
        impurity, bath = ImpuritySpec(0.0, 1.0), BathSpec(5.0, 400, gamma)
        t = rate_times / gamma
        c = evolve(initial_correlation_matrix_single(impurity, bath), build_single_bath(impurity, bath), t)
        assert mean_occupation(c) == pytest.approx(0.5 + 0.5 * np.exp(-gamma * t), abs=0.05)

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError, match="dimension"):
            CorrelationEvolution(CorrelationMatrix(np.eye(3)), two_level())

    def test_labels_carried(self):
        bath = BathSpec(2.0, 2, 1.0)
        c0 = initial_correlation_matrix_single(ImpuritySpec(), bath)
        assert evolve(c0, build_single_bath(ImpuritySpec(), bath), 1.0).mode_labels == ("S", "B1", "B2")


class TestGibbs:
    def test_eigenvalues_are_fermi_occupations(self):
        h = build_single_bath(ImpuritySpec(0.1), BathSpec(4.0, 9, 0.7))
        c = gibbs_correlation_matrix(h, 1.3, 0.2)
        energies = np.linalg.eigvalsh(h.matrix)
        np.testing.assert_allclose(np.sort(c.eigenvalues()), np.sort(fermi(energies, 1.3, 0.2)), atol=1e-12)

    def test_infinite_temperature(self):
        h = build_single_bath(ImpuritySpec(), BathSpec(4.0, 5, 1.0))
        c = gibbs_correlation_matrix(h, 0.0)
        np.testing.assert_allclose(c.matrix, 0.5 * np.eye(6), atol=1e-14)

    def test_negative_beta_rejected(self):
        with pytest.raises(ValueError, match="beta"):
            gibbs_correlation_matrix(two_level(), -1.0)

    def test_stationary_under_evolution(self):
        h = build_single_bath(ImpuritySpec(0.3), BathSpec(4.0, 15, 1.0))
        c = gibbs_correlation_matrix(h, 1.0)
        np.testing.assert_allclose(evolve(c, h, 7.0).matrix, c.matrix, atol=1e-12)


class TestReduction:
    def test_principal_submatrix(self, rng):
        c = CorrelationMatrix(random_correlation_matrix(rng, 6), tuple("abcdef"))
        reduced = reduce_modes(c, [0, 2, 5])
        np.testing.assert_array_equal(reduced.matrix, c.matrix[np.ix_([0, 2, 5], [0, 2, 5])])
        assert reduced.mode_labels == ("a", "c", "f")

    @pytest.mark.parametrize("indices", [[], [0, 0], [0, 9]])
    def test_invalid_indices(self, indices):
        with pytest.raises(ValueError):
            reduce_modes(CorrelationMatrix(np.eye(4) * 0.5), indices)

    def test_reduction_composes(self, rng):
        c = CorrelationMatrix(random_correlation_matrix(rng, 6))
        twice = reduce_modes(reduce_modes(c, [0, 2, 4]), [0, 2])
        once = reduce_modes(c, [0, 4])
        np.testing.assert_array_equal(twice.matrix, once.matrix)
        assert twice.mode_labels == once.mode_labels == ("0", "4")

    def test_pure_single_particle_state(self):
        a, b = np.sqrt(0.3), np.sqrt(0.7) * 1j
        v = np.array([a, b, 0.0])
        c = CorrelationMatrix(np.outer(v.conj(), v))
        pair = reduce_modes(c, [0, 1])
        np.testing.assert_allclose(pair.eigenvalues(), [0.0, 1.0], atol=1e-12)
        rho = density_matrix_from_correlations(pair).matrix
        assert np.trace(rho @ rho).real == pytest.approx(1.0, abs=1e-9)
        split = reduce_modes(c, [0, 2])
        np.testing.assert_allclose(split.eigenvalues(), [0.0, 0.3], atol=1e-12)
        mixed = density_matrix_from_correlations(split).matrix
        assert np.trace(mixed @ mixed).real < 0.9

    def test_mean_occupation(self):
        c = CorrelationMatrix(np.diag([0.25, 1.0 + 1e-13]))
        assert mean_occupation(c) == 0.25
        assert mean_occupation(c, 1) == 1.0
