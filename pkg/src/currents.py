"""
Relaxation Currents: Born-Rule Observables for Population Rates

The population rate of a projection P is the Born rule for the adjoint
Lindbladian:

    d/dt Tr(rho P) = Tr(L(rho) P) = Tr(rho L*(P))

Each channel contributes its own term rate * D*(B, P), the system observable for
the current carried by that process (radiation out, excitation in). Because
D*(B, I) = 0, the same observable is minus the current of the complement:
rate * D*(B, P) = -rate * D*(B, I - P).

Also ships the two prebuilt models:
- two-level atom: decay, excitation and dephasing
- three-level atom with nearly degenerate excited states, where energy and
  angular-momentum bases differ and the current is not a projection
"""

import logging
from dataclasses import dataclass

import numpy as np

import matcore
from errors import DomainError, HermiticityError, ShapeError
from lindblad import (
    JumpChannel,
    LindbladModel,
    adjoint_dissipator,
    adjoint_lindbladian_apply,
    transition_operator,
)
from matcore import ComplexMatrix, DensityMatrix

logger = logging.getLogger(__name__)

OBSERVABLE_TOL = 1e-12
REAL_TOL = 1e-12
UNITARY_LABEL = "unitary"


@dataclass(frozen=True, eq=False)
class CurrentObservable:
    """rate * D*(B_k, P) for channel k and target projection P."""

    observable: ComplexMatrix
    channel_index: int
    target_projection: ComplexMatrix


@dataclass(frozen=True, eq=False)
class BasisChange:
    """Unitary whose columns are the new basis vectors in old-basis components."""

    unitary: ComplexMatrix

    def __post_init__(self):
        object.__setattr__(self, 'unitary', matcore.require_unitary(self.unitary, name="basis"))

    @property
    def dim(self) -> int:
        return self.unitary.shape[0]


# ===== Current observables =====

def current_observable(channel: JumpChannel, p, channel_index: int = 0) -> CurrentObservable:
    """
    Build the current observable of one channel for projection p.

    Args:
        channel: Jump channel (operator and rate)
        p: Orthogonal projection of the same dimension
        channel_index: Position of the channel in its model

    Returns:
        CurrentObservable with observable = rate * D*(B, p)
    """
    p = matcore.require_projection(p)
    if p.shape[0] != channel.dim:
        raise ShapeError(f"projection is {p.shape[0]}-dimensional, channel is {channel.dim}-dimensional")

    observable = channel.rate * adjoint_dissipator(channel.operator, p)

    defect = matcore.hermiticity_defect(observable)
    if defect > OBSERVABLE_TOL * matcore.scale(observable):
        raise HermiticityError(f"current observable is not Hermitian (defect {defect:.3e})")

    return CurrentObservable(observable=observable, channel_index=channel_index, target_projection=p)


def current_observables(model: LindbladModel, p) -> list[CurrentObservable]:
    """One current observable per channel, in channel order."""
    return [current_observable(channel, p, k) for k, channel in enumerate(model.channels)]


def current_expectation(observable, rho) -> float:
    """Born-rule value Tr(rho J) of a Hermitian observable."""
    return _real_trace(np.asarray(rho) @ np.asarray(observable), "current expectation")


def _real_trace(m: ComplexMatrix, what: str) -> float:
    value = np.trace(m)
    if abs(value.imag) > REAL_TOL * max(1.0, abs(value.real)):
        raise HermiticityError(f"{what} has imaginary part {value.imag:.3e}; inputs are malformed")
    return float(value.real)


def _check_rate_inputs(model: LindbladModel, rho, p) -> tuple[DensityMatrix, ComplexMatrix]:
    rho = matcore.validate_density_matrix(rho)
    p = matcore.require_projection(p)
    if rho.shape[0] != model.dim or p.shape[0] != model.dim:
        raise ShapeError(
            f"model is {model.dim}-dimensional, rho is {rho.shape[0]}, projection is {p.shape[0]}"
        )
    return rho, p


def population_rate(model: LindbladModel, rho, p) -> float:
    """
    d/dt Tr(rho P) = Tr(rho L*(P)).

    Raises:
        HermiticityError: if the trace has an imaginary part above 1e-12
    """
    rho, p = _check_rate_inputs(model, rho, p)
    return _real_trace(rho @ adjoint_lindbladian_apply(model, p), "population rate")


def rate_decomposition(model: LindbladModel, rho, p) -> list[tuple[str, float]]:
    """
    Split the population rate into its unitary part and one term per channel.

    Labels are "unitary", then "channel[k]:<name or index>". The entries sum
    to population_rate(model, rho, p).
    """
    rho, p = _check_rate_inputs(model, rho, p)

    unitary = 1j * matcore.commutator(model.hamiltonian, p)
    entries = [(UNITARY_LABEL, _real_trace(rho @ unitary, "unitary rate"))]

    for k, channel in enumerate(model.channels):
        observable = channel.rate * adjoint_dissipator(channel.operator, p)
        entries.append((f"channel[{k}]:{channel.label(k)}", _real_trace(rho @ observable, "channel current")))

    return entries


# ===== Basis changes =====

def transform_observable(m, basis: BasisChange) -> ComplexMatrix:
    """Components U^dag M U of M in the new basis."""
    m = matcore.require_square(m, "observable")
    if m.shape[0] != basis.dim:
        raise ShapeError(f"observable is {m.shape[0]}-dimensional, basis is {basis.dim}-dimensional")
    u = basis.unitary
    return u.conj().T @ m @ u


def energy_basis(model: LindbladModel) -> BasisChange:
    """
    Eigenbasis of H in ascending energy.

    Each column's phase is fixed so its largest-magnitude component is real and
    positive, which makes the basis deterministic.
    """
    vectors = matcore.hermitian_eig(model.hamiltonian).eigenvectors.copy()
    for j in range(vectors.shape[1]):
        magnitudes = np.abs(vectors[:, j])
        # first component within rounding of the largest, so ties resolve the same way every run
        i = int(np.flatnonzero(magnitudes >= magnitudes.max() - 1e-12)[0])
        vectors[:, j] *= abs(vectors[i, j]) / vectors[i, j]
    return BasisChange(vectors)


def three_level_energy_basis() -> BasisChange:
    """|0) = |0>, |1) = (|1> - |2>)/sqrt2, |2) = (|1> + |2>)/sqrt2"""
    r = 1 / np.sqrt(2)
    u = np.array([
        [1, 0, 0],
        [0, r, r],
        [0, -r, r],
    ], dtype=np.complex128)
    return BasisChange(u)


# ===== Prebuilt models =====

def _check_rates(**rates: float):
    for name, value in rates.items():
        if not np.isfinite(value) or value < 0:
            raise DomainError(f"{name} must be >= 0, got {value}")


def build_two_level(eps: float, mu: float, lambda_: float, delta: float) -> LindbladModel:
    """
    Radiating two-level atom.

    H = -(eps/2) Z with ground state |0>; channels in order:
    radiative decay A = |0><1| (mu), excitation A^dag (lambda), dephasing Z (delta).
    """
    _check_rates(mu=mu, **{'lambda': lambda_}, delta=delta)
    a = transition_operator(2, 1, 0)
    return LindbladModel(
        hamiltonian=-(eps / 2) * matcore.pauli_z(),
        channels=(
            JumpChannel(a, mu, "radiative"),
            JumpChannel(a.conj().T, lambda_, "excitation"),
            # D(-Z, .) = D(Z, .), so Z stands in for H/|H| = -Z
            JumpChannel(matcore.pauli_z(), delta, "dephasing"),
        ),
    )


def build_three_level(eps: float, mu10: float, mu21: float) -> LindbladModel:
    """
    Three-level atom with nearly degenerate excited states.

    Basis |0>, |1>, |2> of definite angular momentum;
    H = (|1><1| + |2><2|) + eps (|1><2| + |2><1|), energies {0, 1 - eps, 1 + eps}.
    Channels: A_{1->0} = |0><1| (mu10) and A_{2->1} = |1><2| (mu21).
    """
    _check_rates(mu10=mu10, mu21=mu21)
    if not eps > 0:
        raise DomainError(f"eps must be > 0, got {eps}")
    if eps > 0.5:
        logger.warning("eps = %g is not small; excited levels are no longer nearly degenerate", eps)

    h = np.zeros((3, 3), dtype=np.complex128)
    h[1, 1] = h[2, 2] = 1.0
    h[1, 2] = h[2, 1] = eps

    return LindbladModel(
        hamiltonian=h,
        channels=(
            JumpChannel(transition_operator(3, 1, 0), mu10, "1→0"),
            JumpChannel(transition_operator(3, 2, 1), mu21, "2→1"),
        ),
    )
