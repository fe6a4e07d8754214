import numpy as np
import pytest

import channels
import matcore
from errors import DomainError, MapNotHermiticityPreservingError, ShapeError, UnsupportedDimensionError
from verification import random_pure_state

SWAP = np.eye(4)[[0, 2, 1, 3]]
R = 1 / np.sqrt(2)


class TestChoi:
    def test_transpose_choi_is_swap(self):
        np.testing.assert_array_equal(channels.choi(channels.transpose_map(2)).matrix, SWAP)

    def test_transpose_is_positive_not_completely_positive(self):
        phi = channels.transpose_map(2)
        report = channels.is_completely_positive(phi)
        np.testing.assert_allclose(report.spectrum, [-1, 1, 1, 1], atol=1e-12)
        assert not report.completely_positive
        assert channels.is_trace_preserving(phi)

    def test_identity_is_cptp(self):
        phi = channels.identity_map(3)
        report = channels.is_completely_positive(phi)
        assert report.completely_positive
        assert report.spectrum[-1] == pytest.approx(3.0)
        assert channels.is_trace_preserving(phi)

    def test_depolarizing_is_cptp(self):
        phi = channels.depolarizing_map(2)
        assert channels.is_completely_positive(phi).completely_positive
        assert channels.is_trace_preserving(phi)

    def test_scaling_breaks_trace_preservation(self):
        phi = channels.scaling_map(2, 2.0)
        assert channels.trace_preservation_defect(phi) == pytest.approx(1.0)
        assert not channels.is_trace_preserving(phi)

    def test_non_hermiticity_preserving_map(self):
        phi = channels.map_from_function(2, 2, lambda e: 1j * e)
        with pytest.raises(MapNotHermiticityPreservingError):
            channels.is_completely_positive(phi)

    def test_transpose_keeps_spectrum(self, random_density):
        rho = random_density(4)
        image = channels.apply_map(channels.transpose_map(4), rho)
        np.testing.assert_allclose(np.linalg.eigvalsh(image), np.linalg.eigvalsh(rho), atol=1e-12)


class TestComposition:
    def test_compose_with_identity(self):
        phi = channels.transpose_map(2)
        np.testing.assert_array_equal(channels.compose(phi, channels.identity_map(2)).matrix, phi.matrix)

    def test_transpose_twice_is_identity(self):
        phi = channels.transpose_map(3)
        np.testing.assert_array_equal(channels.compose(phi, phi).matrix, np.eye(9))

    def test_dimension_mismatch(self):
        with pytest.raises(ShapeError):
            channels.compose(channels.identity_map(2), channels.identity_map(3))


class TestBlochAction:
    def test_identity(self):
        action = channels.bloch_action(channels.identity_map(2))
        np.testing.assert_allclose(action.matrix, np.eye(3))
        np.testing.assert_allclose(action.translation, 0)
        assert action.is_rotation()

    def test_transpose_reflects_y(self):
        action = channels.bloch_action(channels.transpose_map(2))
        np.testing.assert_allclose(action.matrix, np.diag([1, -1, 1]))
        assert action.determinant == pytest.approx(-1.0)
        assert not action.is_rotation()

    def test_depolarizing_collapses_ball(self):
        action = channels.bloch_action(channels.depolarizing_map(2))
        np.testing.assert_allclose(action.matrix, 0, atol=1e-15)
        np.testing.assert_allclose(action.translation, 0, atol=1e-15)

    def test_qubits_only(self):
        with pytest.raises(UnsupportedDimensionError):
            channels.bloch_action(channels.identity_map(3))


class TestHeralding:
    def test_bell_state(self):
        np.testing.assert_allclose(channels.bell_state().amplitudes, [R, 0, 0, R])

    def test_ground_state_test(self):
        result = channels.herald([1, 0])
        assert result.probability == pytest.approx(0.5, abs=1e-15)
        np.testing.assert_allclose(result.bob_state.amplitudes, [1, 0], atol=1e-15)

    def test_bob_receives_mirror(self):
        psi = channels.StateVector([R, 1j * R])
        result = channels.herald(psi)
        assert channels.state_fidelity(result.bob_state, channels.StateVector([R, -1j * R])) == pytest.approx(1.0)
        assert channels.state_fidelity(result.bob_state, psi) == pytest.approx(0.0, abs=1e-15)

    def test_probability_is_one_half(self, rng):
        for _ in range(50):
            psi = channels.StateVector(random_pure_state(2, rng))
            result = channels.herald(psi)
            assert abs(result.probability - 0.5) <= 1e-12
            assert channels.state_fidelity(result.bob_state, channels.mirror(psi)) >= 1 - 1e-12

    def test_rejects_unnormalized(self):
        with pytest.raises(DomainError):
            channels.herald([1, 1])

    def test_qubits_only(self):
        with pytest.raises(UnsupportedDimensionError):
            channels.herald([1, 0, 0])

    def test_reconstruction_is_transposition(self):
        phi = channels.heralding_as_map()
        np.testing.assert_allclose(phi.matrix, channels.transpose_map(2).matrix, atol=1e-10)
        assert channels.is_completely_positive(phi).min_eigenvalue <= -1 + 1e-12
        assert channels.is_trace_preserving(phi)

    def test_no_unitary_implements_heralding(self):
        action = channels.bloch_action(channels.heralding_as_map())
        np.testing.assert_allclose(action.matrix, np.diag([1, -1, 1]), atol=1e-10)
        assert action.determinant == pytest.approx(-1.0)
        assert not action.is_rotation()


class TestSemigroup:
    def test_time_zero_is_identity(self, benchmark_model):
        np.testing.assert_array_equal(channels.semigroup_channel(benchmark_model, 0.0).matrix, np.eye(4))

    @pytest.mark.parametrize("t", [0.1, 1.0, 10.0])
    def test_cptp(self, benchmark_model, t):
        phi = channels.semigroup_channel(benchmark_model, t)
        assert channels.is_completely_positive(phi).min_eigenvalue >= -1e-10
        assert channels.trace_preservation_defect(phi) <= 1e-10

    def test_markov_composition(self, benchmark_model):
        joined = channels.semigroup_channel(benchmark_model, 2.0)
        split = channels.compose(
            channels.semigroup_channel(benchmark_model, 0.5), channels.semigroup_channel(benchmark_model, 1.5)
        )
        np.testing.assert_allclose(joined.matrix, split.matrix, atol=1e-10)

    def test_relaxes_to_stationary_bloch_vector(self, benchmark_model):
        action = channels.bloch_action(channels.semigroup_channel(benchmark_model, 60.0))
        np.testing.assert_allclose(action.matrix, 0, atol=1e-6)
        np.testing.assert_allclose(action.translation, [0, 0, 0.5], atol=1e-6)

    def test_excited_state_after_ten(self, benchmark_model):
        rho = channels.apply_map(channels.semigroup_channel(benchmark_model, 10.0), matcore.projector(2, 1))
        z = np.trace(rho @ matcore.pauli_z()).real
        assert z == pytest.approx(0.5 - 1.5 * np.exp(-4.0), abs=1e-10)

    def test_negative_time(self, benchmark_model):
        with pytest.raises(DomainError):
            channels.semigroup_channel(benchmark_model, -1.0)
