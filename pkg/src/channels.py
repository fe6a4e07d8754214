"""
Channels: Linear Maps on Matrices and the Heralding Diagnostics

A quantum channel is a completely positive trace-preserving (CPTP) linear map.
This module treats maps as superoperators (column-stacking, shared with
lindblad) and checks them through their Choi matrices:

    C = sum_ij E_ij x Phi(E_ij)        (unnormalized, input slot first)

Phi is completely positive iff C >= 0. The heralding protocol (Alice tests her
half of a Bell pair, Bob receives the conjugate "mirror" state) is rebuilt by
tomography and turns out to be transposition: positive, trace preserving, not
completely positive, and a Bloch reflection (det -1) that no unitary undoes.
"""

import logging
from dataclasses import dataclass
from typing import Callable

import numpy as np

import matcore
from errors import (
    ConsistencyError,
    DomainError,
    HermiticityError,
    MapNotHermiticityPreservingError,
    ShapeError,
    UnsupportedDimensionError,
)
from evolve import superoperator_expm
from lindblad import LindbladModel, Superoperator, to_superoperator
from matcore import ComplexMatrix

logger = logging.getLogger(__name__)

NORM_TOL = 1e-12
CP_TOL = 1e-10
TP_TOL = 1e-10
RECONSTRUCTION_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class StateVector:
    """Normalized pure state."""

    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=np.complex128).reshape(-1)
        if amps.size < 1 or not np.all(np.isfinite(amps)):
            raise DomainError("state vector needs at least one finite amplitude")
        norm2 = float(np.vdot(amps, amps).real)
        if abs(norm2 - 1.0) > NORM_TOL:
            raise DomainError(f"state vector is not normalized (sum |a|^2 = {norm2:.15g})")
        object.__setattr__(self, 'amplitudes', amps)

    @property
    def dim(self) -> int:
        return self.amplitudes.size

    def density(self) -> ComplexMatrix:
        return matcore.outer(self.amplitudes, self.amplitudes)


@dataclass(frozen=True, eq=False)
class MatrixMap:
    """Linear map from dim_in x dim_in to dim_out x dim_out matrices."""

    dim_in: int
    dim_out: int
    superoperator: Superoperator

    def __post_init__(self):
        if self.superoperator.dim != self.dim_in or self.superoperator.dim_out != self.dim_out:
            raise ShapeError(
                f"superoperator maps {self.superoperator.dim} -> {self.superoperator.dim_out}, "
                f"map declares {self.dim_in} -> {self.dim_out}"
            )

    @classmethod
    def from_matrix(cls, matrix, dim_in: int, dim_out: int | None = None) -> 'MatrixMap':
        dim_out = dim_in if dim_out is None else dim_out
        return cls(dim_in, dim_out, Superoperator(dim=dim_in, matrix=matrix, dim_out=dim_out))

    @property
    def matrix(self) -> ComplexMatrix:
        return self.superoperator.matrix


@dataclass(frozen=True, eq=False)
class ChoiMatrix:
    """Unnormalized Choi matrix, (input x output) slot order."""

    matrix: ComplexMatrix
    dim_in: int
    dim_out: int


@dataclass(frozen=True)
class PositivityReport:
    completely_positive: bool
    min_eigenvalue: float
    spectrum: tuple[float, ...]


@dataclass(frozen=True, eq=False)
class BlochAction:
    """Affine action bloch(Phi(rho)) = matrix @ bloch(rho) + translation."""

    matrix: np.ndarray
    translation: np.ndarray

    @property
    def determinant(self) -> float:
        return float(np.linalg.det(self.matrix))

    def is_rotation(self, tol: float = 1e-10) -> bool:
        """Orthogonal with det +1: the only actions a unitary conjugation can have."""
        r = self.matrix
        return (
            np.linalg.norm(r.T @ r - np.eye(3)) <= tol
            and abs(self.determinant - 1.0) <= tol
            and np.linalg.norm(self.translation) <= tol
        )


@dataclass(frozen=True, eq=False)
class HeraldResult:
    probability: float
    bob_state: StateVector


# ===== Building maps =====

def map_from_function(dim_in: int, dim_out: int, f: Callable[[ComplexMatrix], ComplexMatrix]) -> MatrixMap:
    """Superoperator of a linear f, one column per basis matrix E_ij."""
    columns = np.zeros((dim_out * dim_out, dim_in * dim_in), dtype=np.complex128)
    for j in range(dim_in):
        for i in range(dim_in):
            image = matcore.as_matrix(f(matcore.basis_matrix(dim_in, i, j)), "map image")
            if image.shape != (dim_out, dim_out):
                raise ShapeError(f"map image has shape {image.shape}, expected {(dim_out, dim_out)}")
            columns[:, i + dim_in * j] = matcore.stack(image)
    return MatrixMap.from_matrix(columns, dim_in, dim_out)


def identity_map(d: int) -> MatrixMap:
    return MatrixMap.from_matrix(np.eye(d * d), d)


def transpose_map(d: int) -> MatrixMap:
    """rho -> rho^T in the computational basis."""
    return map_from_function(d, d, lambda e: e.T)


def depolarizing_map(d: int) -> MatrixMap:
    """rho -> Tr(rho) I/d"""
    return map_from_function(d, d, lambda e: np.trace(e) * np.eye(d) / d)


def scaling_map(d: int, c: float) -> MatrixMap:
    """rho -> c rho"""
    return MatrixMap.from_matrix(c * np.eye(d * d), d)


def compose(phi: MatrixMap, psi: MatrixMap) -> MatrixMap:
    """phi o psi (psi acts first)."""
    if psi.dim_out != phi.dim_in:
        raise ShapeError(f"cannot compose: inner map outputs {psi.dim_out}, outer map expects {phi.dim_in}")
    return MatrixMap.from_matrix(phi.matrix @ psi.matrix, psi.dim_in, phi.dim_out)


def semigroup_channel(model: LindbladModel, t: float) -> MatrixMap:
    """e^{tL}: the channel generated by the Lindbladian over time t."""
    if t < 0:
        raise DomainError(f"t must be >= 0, got {t}")
    if t == 0:
        return identity_map(model.dim)
    propagator, _ = superoperator_expm(to_superoperator(model), t)
    return MatrixMap.from_matrix(propagator, model.dim)


def apply_map(phi: MatrixMap, rho) -> ComplexMatrix:
    """unstack(S_Phi stack(rho))"""
    return phi.superoperator.apply(rho)


# ===== Choi matrix tests =====

def choi(phi: MatrixMap) -> ChoiMatrix:
    """C = sum_ij E_ij x Phi(E_ij)"""
    d = phi.dim_in
    c = np.zeros((d * phi.dim_out, d * phi.dim_out), dtype=np.complex128)
    for i in range(d):
        for j in range(d):
            e = matcore.basis_matrix(d, i, j)
            c += np.kron(e, apply_map(phi, e))
    return ChoiMatrix(matrix=c, dim_in=d, dim_out=phi.dim_out)


def is_completely_positive(phi: MatrixMap, tol: float = CP_TOL) -> PositivityReport:
    """
    Spectral test of the Choi matrix.

    Returns:
        PositivityReport; completely_positive is True iff min eigenvalue >= -tol

    Raises:
        MapNotHermiticityPreservingError: Choi matrix is not Hermitian
    """
    c = choi(phi).matrix
    try:
        spectrum = matcore.hermitian_eig(c).eigenvalues
    except HermiticityError as e:
        raise MapNotHermiticityPreservingError(f"map is not Hermiticity preserving: {e}") from e
    lowest = float(spectrum[0])
    return PositivityReport(
        completely_positive=lowest >= -tol,
        min_eigenvalue=lowest,
        spectrum=tuple(float(v) for v in spectrum),
    )


def trace_preservation_defect(phi: MatrixMap) -> float:
    """max_ij |Tr Phi(E_ij) - Tr E_ij|"""
    d = phi.dim_in
    worst = 0.0
    for i in range(d):
        for j in range(d):
            e = matcore.basis_matrix(d, i, j)
            worst = max(worst, abs(np.trace(apply_map(phi, e)) - np.trace(e)))
    return float(worst)


def is_trace_preserving(phi: MatrixMap, tol: float = TP_TOL) -> bool:
    return trace_preservation_defect(phi) <= tol


# ===== Bloch ball =====

def bloch_action(phi: MatrixMap, tol: float = 1e-10) -> BlochAction:
    """
    Affine Bloch-ball action of a qubit map from Pauli expectations:
    R_ij = Tr(s_i Phi(s_j))/2, t_i = Tr(s_i Phi(I))/2.
    """
    if phi.dim_in != 2 or phi.dim_out != 2:
        raise UnsupportedDimensionError(f"Bloch action needs a qubit map, got {phi.dim_in} -> {phi.dim_out}")
    paulis = (matcore.pauli_x(), matcore.pauli_y(), matcore.pauli_z())

    r = np.array([[np.trace(si @ apply_map(phi, sj)) / 2 for sj in paulis] for si in paulis])
    t = np.array([np.trace(si @ apply_map(phi, matcore.identity(2))) / 2 for si in paulis])

    imaginary = max(np.abs(r.imag).max(), np.abs(t.imag).max())
    if imaginary > tol:
        raise MapNotHermiticityPreservingError(f"Bloch action has imaginary part {imaginary:.3e}")
    return BlochAction(matrix=r.real, translation=t.real)


# ===== Heralding =====

def bell_state() -> StateVector:
    """(|00> + |11>)/sqrt2, Alice x Bob."""
    return StateVector(np.array([1, 0, 0, 1]) / np.sqrt(2))


def mirror(psi: StateVector) -> StateVector:
    """Componentwise complex conjugate."""
    return StateVector(psi.amplitudes.conj())


def state_fidelity(a: StateVector, b: StateVector) -> float:
    """|<a|b>|^2"""
    if a.dim != b.dim:
        raise ShapeError(f"states have dimensions {a.dim} and {b.dim}")
    return float(abs(np.vdot(a.amplitudes, b.amplitudes)) ** 2)


def herald(psi) -> HeraldResult:
    """
    Alice's successful projective test onto psi on her half of the Bell pair.

    Bob's unnormalized vector is (<psi| x I)|beta> = conj(psi)/sqrt2, so the
    test succeeds with probability 1/2 and leaves Bob in conj(psi).

    Args:
        psi: Qubit StateVector (or normalized amplitudes)

    Returns:
        HeraldResult with the success probability and Bob's normalized state
    """
    if not isinstance(psi, StateVector):
        psi = StateVector(psi)
    if psi.dim != 2:
        raise UnsupportedDimensionError(f"heralding uses a qubit Bell pair, got dim {psi.dim}")

    # beta as a matrix: rows index Alice, columns index Bob
    pair = bell_state().amplitudes.reshape(2, 2)
    bob = pair.T @ psi.amplitudes.conj()
    probability = float(np.vdot(bob, bob).real)
    bob = bob / np.sqrt(probability)
    return HeraldResult(probability=probability, bob_state=StateVector(bob))


def tomography_states() -> list[StateVector]:
    """|0>, |1>, |+>, |+i>"""
    r = 1 / np.sqrt(2)
    return [
        StateVector([1, 0]),
        StateVector([0, 1]),
        StateVector([r, r]),
        StateVector([r, 1j * r]),
    ]


def heralding_as_map() -> MatrixMap:
    """
    Reconstruct Alice-state -> Bob-state by tomography over |0>, |1>, |+>, |+i>.

    The four input densities span all 2x2 matrices, so S is the exact solution
    of S [stack(rho_in)] = [stack(rho_out)].

    Raises:
        ConsistencyError: residual of the solve, or distance to transposition,
            above 1e-10
    """
    inputs = []
    outputs = []
    for psi in tomography_states():
        result = herald(psi)
        inputs.append(matcore.stack(psi.density()))
        outputs.append(matcore.stack(result.bob_state.density()))
    rin = np.column_stack(inputs)
    rout = np.column_stack(outputs)

    # S rin = rout  <=>  rin^T S^T = rout^T
    s = np.linalg.solve(rin.T, rout.T).T

    residual = matcore.fro_norm(s @ rin - rout)
    if residual > RECONSTRUCTION_TOL:
        raise ConsistencyError(f"tomographic solve residual {residual:.3e}", residual)
    distance = matcore.fro_norm(s - transpose_map(2).matrix)
    if distance > RECONSTRUCTION_TOL:
        raise ConsistencyError(f"reconstructed heralding map differs from transposition by {distance:.3e}", distance)
    logger.debug("heralding map reconstructed, residual %.3e, distance to transpose %.3e", residual, distance)

    return MatrixMap.from_matrix(s, 2)


def test_channels():
    """Print the heralding diagnostics."""
    phi = heralding_as_map()
    report = is_completely_positive(phi)
    action = bloch_action(phi)
    print(f"Choi spectrum: {report.spectrum}")
    print(f"completely positive: {report.completely_positive}")
    print(f"trace preserving: {is_trace_preserving(phi)}")
    print(f"Bloch action:\n{action.matrix}\ndet = {action.determinant:+.3f}")


if __name__ == "__main__":
    test_channels()
