import numpy as np
import pytest

import matcore
import verification
from errors import DomainError


@pytest.fixture(scope="module")
def default_report():
    return verification.run_verification(verification.DEFAULT_SEED)


class TestRandomInputs:
    def test_generators(self, rng):
        for d in (2, 3, 4):
            assert matcore.is_hermitian(verification.random_hermitian(d, rng))
            matcore.validate_density_matrix(verification.random_density(d, rng))
            assert matcore.is_unitary(verification.random_unitary(d, rng))
            assert matcore.is_projection(verification.random_projection(d, rng))
            assert np.linalg.norm(verification.random_pure_state(d, rng)) == pytest.approx(1.0)

    def test_projection_rank(self, rng):
        p = verification.random_projection(4, rng, rank=2)
        assert np.trace(p).real == pytest.approx(2.0)

    def test_random_model(self, rng):
        model = verification.random_model(3, rng)
        assert model.dim == 3
        assert 1 <= len(model.channels) <= 3
        assert all(0 <= c.rate <= 1 for c in model.channels)

    def test_bloch_inside_ball(self, rng):
        for _ in range(20):
            assert np.linalg.norm(verification.random_bloch(rng).as_array()) < 1


class TestSuites:
    def test_default_seed_passes(self, default_report):
        assert default_report.passed, "\n".join(r.line() for r in default_report.failures)

    def test_every_suite_reports(self, default_report):
        suites = {r.suite for r in default_report.results}
        assert suites == {"matcore", "lindblad", "currents", "evolve", "channels", "validation"}

    def test_line_format(self, default_report):
        duality = next(r for r in default_report.results if r.invariant == "duality")
        assert duality.line().startswith("PASS lindblad: duality max_err=")
        assert duality.line().endswith("(limit 1e-12)")

    def test_deterministic(self):
        first = verification.check_lindblad(np.random.default_rng(5))
        second = verification.check_lindblad(np.random.default_rng(5))
        assert [r.line() for r in first] == [r.line() for r in second]


class TestNegativeControl:
    def test_injected_fault_fails_validation(self, rng):
        results = verification.check_validation(rng, "non_hermitian_hamiltonian")
        accepted = next(r for r in results if r.invariant == "model_accepted")
        assert not accepted.passed
        assert accepted.line().startswith("FAIL validation: model_accepted rejected:")
        assert all(r.passed for r in results if r.invariant != "model_accepted")

    def test_clean_validation(self, rng):
        assert all(r.passed for r in verification.check_validation(rng))

    def test_unknown_fault(self):
        with pytest.raises(DomainError):
            verification.run_verification(inject_fault="flipped_sign")
