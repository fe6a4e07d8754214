import numpy as np
import pytest

import lindblad
import matcore
from currents import build_two_level
from errors import DomainError, HermiticityError, ShapeError
from lindblad import JumpChannel, LindbladModel
from verification import random_model

Z = matcore.pauli_z()
P0, P1 = matcore.projector(2, 0), matcore.projector(2, 1)
A = lindblad.transition_operator(2, 1, 0)


class TestDissipators:
    def test_dissipator_is_traceless(self, random_hermitian):
        b, rho = random_hermitian(3) + 1j * random_hermitian(3), random_hermitian(3)
        assert abs(np.trace(lindblad.dissipator(b, rho))) < 1e-12

    def test_dephasing_sign_invariance(self, random_density):
        rho = random_density(2)
        np.testing.assert_allclose(lindblad.dissipator(-Z, rho), lindblad.dissipator(Z, rho))
        np.testing.assert_allclose(lindblad.adjoint_dissipator(-Z, rho), lindblad.adjoint_dissipator(Z, rho))

    def test_adjoint_dissipator_annihilates_identity(self, random_hermitian):
        b = random_hermitian(4) + 1j * random_hermitian(4)
        np.testing.assert_allclose(lindblad.adjoint_dissipator(b, np.eye(4)), 0, atol=1e-13)

    def test_transition_operator_is_lowering(self):
        np.testing.assert_array_equal(A, [[0, 1], [0, 0]])
        np.testing.assert_array_equal(A @ matcore.ket(2, 1), matcore.ket(2, 0))


class TestGenerators:
    def test_decay_of_excited_state(self):
        model = build_two_level(0.0, 1.0, 0.0, 0.0)
        np.testing.assert_allclose(lindblad.lindbladian_apply(model, P1), Z)

    def test_adjoint_is_unital(self, benchmark_model):
        np.testing.assert_allclose(lindblad.adjoint_lindbladian_apply(benchmark_model, np.eye(2)), 0, atol=1e-15)

    def test_ground_population_rate_observable(self):
        model = build_two_level(1.0, 1.0, 0.0, 0.0)
        np.testing.assert_allclose(lindblad.adjoint_lindbladian_apply(model, P0), P1, atol=1e-15)

    def test_ground_observable_sums_decay_and_excitation(self, benchmark_model):
        expected = 0.3 * lindblad.adjoint_dissipator(A, P0) + 0.1 * lindblad.adjoint_dissipator(A.T, P0)
        np.testing.assert_allclose(lindblad.adjoint_lindbladian_apply(benchmark_model, P0), expected, atol=1e-15)

    def test_duality(self, rng):
        for _ in range(20):
            d = int(rng.integers(2, 5))
            model = random_model(d, rng)
            rho, m = (matcore.hermitize(rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))) for _ in range(2))
            lhs = np.trace(lindblad.lindbladian_apply(model, rho) @ m)
            rhs = np.trace(rho @ lindblad.adjoint_lindbladian_apply(model, m))
            assert abs(lhs - rhs) < 1e-11

    def test_zero_rate_channel_is_skipped(self, benchmark_model, random_density):
        rho = random_density(2)
        padded = benchmark_model.with_channel(JumpChannel(Z, 0.0, "idle"))
        np.testing.assert_array_equal(
            lindblad.lindbladian_apply(padded, rho), lindblad.lindbladian_apply(benchmark_model, rho)
        )

    def test_dimension_mismatch(self, benchmark_model):
        with pytest.raises(ShapeError):
            lindblad.lindbladian_apply(benchmark_model, np.eye(3))


class TestSuperoperator:
    def test_empty_model_is_zero(self):
        s = lindblad.to_superoperator(LindbladModel(np.zeros((3, 3))))
        np.testing.assert_array_equal(s.matrix, np.zeros((9, 9)))

    def test_faithfulness(self, rng, random_hermitian):
        model = random_model(3, rng)
        s = lindblad.to_superoperator(model)
        for _ in range(20):
            rho = random_hermitian(3)
            assert matcore.fro_norm(s.apply(rho) - lindblad.lindbladian_apply(model, rho)) <= 1e-12

    def test_has_stationary_eigenvalue(self, benchmark_model):
        eigenvalues = np.linalg.eigvals(lindblad.to_superoperator(benchmark_model).matrix)
        assert np.min(np.abs(eigenvalues)) < 1e-12

    def test_trace_row_is_left_fixed_point(self, benchmark_model):
        s = lindblad.to_superoperator(benchmark_model).matrix
        np.testing.assert_allclose(matcore.stack(np.eye(2)).conj() @ s, 0, atol=1e-15)

    def test_adjoint_superoperator(self, rng, random_hermitian):
        model = random_model(3, rng)
        m = random_hermitian(3)
        np.testing.assert_allclose(
            lindblad.adjoint_superoperator(model).apply(m),
            lindblad.adjoint_lindbladian_apply(model, m),
            atol=1e-12,
        )

    def test_rejects_wrong_shape(self):
        with pytest.raises(ShapeError):
            lindblad.Superoperator(dim=2, matrix=np.eye(3))


class TestStationaryState:
    def test_two_level_fixed_point(self, benchmark_model):
        rho = lindblad.stationary_state(benchmark_model)
        # z_inf = (mu - lambda)/(lambda + mu) = 0.5
        np.testing.assert_allclose(rho, np.diag([0.75, 0.25]), atol=1e-12)

    def test_is_annihilated(self, rng):
        model = random_model(3, rng)
        rho = lindblad.stationary_state(model)
        assert abs(np.trace(rho) - 1) < 1e-12
        np.testing.assert_allclose(lindblad.lindbladian_apply(model, rho), 0, atol=1e-10)


class TestModelValidation:
    def test_negative_rate(self):
        with pytest.raises(DomainError):
            JumpChannel(A, -1.0)

    def test_non_hermitian_hamiltonian(self):
        with pytest.raises(HermiticityError):
            LindbladModel(A)

    def test_channel_dimension(self):
        with pytest.raises(ShapeError):
            LindbladModel(np.eye(2), (JumpChannel(np.eye(3), 1.0),))

    def test_labels(self):
        assert JumpChannel(A, 1.0, "radiative").label(0) == "radiative"
        assert JumpChannel(A, 1.0).label(3) == "3"
