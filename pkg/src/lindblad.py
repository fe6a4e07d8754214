"""
Lindblad Models: Generators of Open-System Dynamics

Defines the model (Hamiltonian plus rate-weighted jump channels) and its
generators:
- D(B, rho)  = B rho B^dag - 1/2 {B^dag B, rho}      (dissipator)
- D*(B, M)   = B^dag M B - 1/2 {B^dag B, M}          (adjoint dissipator)
- L(rho)     = -i[H, rho] + sum_k rate_k D(B_k, rho)  (Schroedinger picture)
- L*(M)      = +i[H, M]   + sum_k rate_k D*(B_k, M)   (Heisenberg picture)

Superoperators act on column-stacked matrices, stack(A rho B) = (B^T x A) stack(rho),
the convention fixed in matcore. Rates live on the channel and are never folded
into the operator, so contributions can be reported per physical process.
"""

import logging
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

import matcore
from errors import DomainError, NumericError, ShapeError
from matcore import ComplexMatrix

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class JumpChannel:
    """One dissipative process: jump operator B with rate (1/time)."""

    operator: ComplexMatrix
    rate: float
    name: Optional[str] = None

    def __post_init__(self):
        object.__setattr__(self, 'operator', matcore.require_square(self.operator, "jump operator"))
        rate = float(self.rate)
        if not np.isfinite(rate) or rate < 0:
            raise DomainError(f"channel rate must be finite and >= 0, got {self.rate}")
        object.__setattr__(self, 'rate', rate)

    @property
    def dim(self) -> int:
        return self.operator.shape[0]

    def label(self, index: int) -> str:
        """Stable report label: the user-supplied name, else the index."""
        return self.name if self.name else str(index)


@dataclass(frozen=True, eq=False)
class LindbladModel:
    """Hamiltonian (hbar = 1) plus an ordered list of jump channels."""

    hamiltonian: ComplexMatrix
    channels: tuple[JumpChannel, ...] = field(default_factory=tuple)

    def __post_init__(self):
        h = matcore.require_hermitian(self.hamiltonian, matcore.HERMITIAN_TOL, "hamiltonian")
        object.__setattr__(self, 'hamiltonian', h)
        channels = tuple(self.channels)
        for k, channel in enumerate(channels):
            if channel.dim != h.shape[0]:
                raise ShapeError(
                    f"channel {k} operator is {channel.dim}x{channel.dim}, "
                    f"model dimension is {h.shape[0]}"
                )
        object.__setattr__(self, 'channels', channels)

    @property
    def dim(self) -> int:
        return self.hamiltonian.shape[0]

    def with_channel(self, channel: JumpChannel) -> 'LindbladModel':
        """Copy of this model with one more channel appended."""
        return LindbladModel(self.hamiltonian, self.channels + (channel,))


@dataclass(frozen=True, eq=False)
class Superoperator:
    """
    Matrix acting on column-stacked matrices.

    For maps between different dimensions the matrix is dim_out^2 x dim^2.
    """

    dim: int
    matrix: ComplexMatrix
    dim_out: Optional[int] = None

    def __post_init__(self):
        if self.dim_out is None:
            object.__setattr__(self, 'dim_out', self.dim)
        m = matcore.as_matrix(self.matrix, "superoperator")
        expected = (self.dim_out ** 2, self.dim ** 2)
        if m.shape != expected:
            raise ShapeError(f"superoperator must be {expected[0]}x{expected[1]}, got {m.shape}")
        object.__setattr__(self, 'matrix', m)

    def apply(self, rho) -> ComplexMatrix:
        rho = matcore.require_square(rho, "rho")
        if rho.shape[0] != self.dim:
            raise ShapeError(f"input is {rho.shape[0]}-dimensional, superoperator expects {self.dim}")
        return matcore.unstack(self.matrix @ matcore.stack(rho), self.dim_out)


# ===== Dissipators =====

def dissipator(b, rho) -> ComplexMatrix:
    """D(B, rho) = B rho B^dag - 1/2 (B^dag B rho + rho B^dag B); always traceless."""
    b, rho = matcore.require_same_dim(b, rho, ("b", "rho"))
    bd = b.conj().T
    bdb = bd @ b
    return b @ rho @ bd - 0.5 * (bdb @ rho + rho @ bdb)


def adjoint_dissipator(b, m) -> ComplexMatrix:
    """D*(B, M) = B^dag M B - 1/2 (B^dag B M + M B^dag B); D*(B, I) = 0."""
    b, m = matcore.require_same_dim(b, m, ("b", "m"))
    bd = b.conj().T
    bdb = bd @ b
    return bd @ m @ b - 0.5 * (bdb @ m + m @ bdb)


# ===== Generators =====

def _check_dim(model: LindbladModel, m: ComplexMatrix, name: str) -> ComplexMatrix:
    m = matcore.require_square(m, name)
    if m.shape[0] != model.dim:
        raise ShapeError(f"{name} is {m.shape[0]}-dimensional, model is {model.dim}-dimensional")
    return m


def lindbladian_apply(model: LindbladModel, rho) -> ComplexMatrix:
    """
    L(rho) = -i[H, rho] + sum_k rate_k D(B_k, rho).

    Traceless for every input; maps Hermitian matrices to Hermitian matrices.
    """
    rho = _check_dim(model, rho, "rho")
    out = -1j * matcore.commutator(model.hamiltonian, rho)
    for channel in model.channels:
        if channel.rate:
            out = out + channel.rate * dissipator(channel.operator, rho)
    return out


def adjoint_lindbladian_apply(model: LindbladModel, m) -> ComplexMatrix:
    """L*(M) = +i[H, M] + sum_k rate_k D*(B_k, M); unital, L*(I) = 0."""
    m = _check_dim(model, m, "m")
    out = 1j * matcore.commutator(model.hamiltonian, m)
    for channel in model.channels:
        if channel.rate:
            out = out + channel.rate * adjoint_dissipator(channel.operator, m)
    return out


def _left(a: ComplexMatrix) -> ComplexMatrix:
    """stack(a X) = (I x a) stack(X)"""
    return np.kron(np.eye(a.shape[0]), a)


def _right(a: ComplexMatrix) -> ComplexMatrix:
    """stack(X a) = (a^T x I) stack(X)"""
    return np.kron(a.T, np.eye(a.shape[0]))


def to_superoperator(model: LindbladModel) -> Superoperator:
    """
    Column-stacked matrix S of L: unstack(S stack(rho)) = L(rho).

    Built term by term from stack(A rho B) = (B^T x A) stack(rho).
    """
    h = model.hamiltonian
    s = -1j * (_left(h) - _right(h))
    for channel in model.channels:
        if not channel.rate:
            continue
        b = channel.operator
        bdb = b.conj().T @ b
        # stack(B rho B^dag) = (conj(B) x B) stack(rho)
        s = s + channel.rate * (np.kron(b.conj(), b) - 0.5 * (_left(bdb) + _right(bdb)))
    return Superoperator(dim=model.dim, matrix=s)


def adjoint_superoperator(model: LindbladModel) -> Superoperator:
    """Column-stacked matrix of L*; the conjugate transpose of S."""
    s = to_superoperator(model).matrix
    return Superoperator(dim=model.dim, matrix=s.conj().T)


def transition_operator(dim: int, source: int, target: int) -> ComplexMatrix:
    """Jump A_{source -> target} = |target><source|; lowering when target < source."""
    return matcore.basis_matrix(dim, target, source)


def stationary_state(model: LindbladModel) -> ComplexMatrix:
    """
    Unit-trace fixed point of L.

    Solves S v = 0 together with Tr(v) = 1 in the least-squares sense; when the
    kernel is degenerate (e.g. no dissipation) the minimum-norm solution is
    returned.
    """
    d = model.dim
    s = to_superoperator(model).matrix
    trace_row = matcore.stack(np.eye(d)).reshape(1, -1)
    system = np.vstack([s, trace_row])
    rhs = np.zeros(d * d + 1, dtype=np.complex128)
    rhs[-1] = 1.0
    v, *_ = np.linalg.lstsq(system, rhs, rcond=None)
    residual = float(np.linalg.norm(s @ v))
    logger.debug("stationary state residual ||S v|| = %.3e", residual)
    if not np.all(np.isfinite(v)):
        raise NumericError("stationary state solve produced non-finite entries")
    return matcore.hermitize(matcore.unstack(v))


def test_lindblad():
    """Quick check: decay of the excited two-level state."""
    a = transition_operator(2, 1, 0)
    model = LindbladModel(-0.5 * matcore.pauli_z(), (JumpChannel(a, 1.0, "radiative"),))
    print("L(|1><1|) =")
    print(lindbladian_apply(model, matcore.projector(2, 1)))
    print("L*(|0><0|) =")
    print(adjoint_lindbladian_apply(model, matcore.projector(2, 0)))
    print("stationary state =")
    print(stationary_state(model))


if __name__ == "__main__":
    test_lindblad()
