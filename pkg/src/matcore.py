"""
Matrix Core: Dense Complex Matrix Primitives

Shared arithmetic for every other module:
- Validation (shape, finiteness, Hermiticity, density matrices, projections)
- Commutators, anticommutators, Kronecker products
- Hermitian eigendecomposition and spectral projections
- Column-stacking vectorization used by all superoperators
- Fixed operators of the computational basis (Z = diag(1, -1), |0> = (1, 0))

All systems here are small (d <= 4, superoperators 16x16), so everything is
dense numpy. Matrices are plain complex128 ndarrays.
"""

from dataclasses import dataclass
from typing import Sequence

import numpy as np
import numpy.typing as npt

from errors import (
    DomainError,
    HermiticityError,
    ProjectionError,
    ShapeError,
    UnitarityError,
)

ComplexMatrix = npt.NDArray[np.complex128]
DensityMatrix = ComplexMatrix

# Default tolerances, all relative to max(1, ||M||_F)
HERMITIAN_TOL = 1e-10
PSD_TOL = 1e-10
PROJECTION_TOL = 1e-10
TRACE_TOL = 1e-9
UNITARY_TOL = 1e-12


@dataclass(frozen=True)
class HermitianEigenResult:
    """Ascending eigenvalues with orthonormal eigenvectors as columns."""

    eigenvalues: npt.NDArray[np.float64]
    eigenvectors: ComplexMatrix

    def reconstruct(self) -> ComplexMatrix:
        v = self.eigenvectors
        return (v * self.eigenvalues) @ v.conj().T


# ===== Validation =====

def as_matrix(m, name: str = "matrix") -> ComplexMatrix:
    """
    Coerce to a 2-D complex array and check every entry is finite.

    Args:
        m: Array-like input
        name: Label used in error messages

    Returns:
        complex128 ndarray
    """
    arr = np.asarray(m, dtype=np.complex128)
    if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
        raise ShapeError(f"{name} must be a non-empty 2-D matrix, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise DomainError(f"{name} has non-finite entries")
    return arr


def require_square(m, name: str = "matrix") -> ComplexMatrix:
    arr = as_matrix(m, name)
    if arr.shape[0] != arr.shape[1]:
        raise ShapeError(f"{name} must be square, got shape {arr.shape}")
    return arr


def require_same_dim(a, b, names: Sequence[str] = ("a", "b")) -> tuple[ComplexMatrix, ComplexMatrix]:
    """Both square and of equal dimension."""
    a = require_square(a, names[0])
    b = require_square(b, names[1])
    if a.shape != b.shape:
        raise ShapeError(f"dimension mismatch: {names[0]} is {a.shape}, {names[1]} is {b.shape}")
    return a, b


def fro_norm(m) -> float:
    return float(np.linalg.norm(m, 'fro'))


def scale(m) -> float:
    """Tolerance scale max(1, ||m||_F)."""
    return max(1.0, fro_norm(m))


def dagger(m) -> ComplexMatrix:
    return np.asarray(m).conj().T


def hermitize(m) -> ComplexMatrix:
    m = np.asarray(m)
    return 0.5 * (m + m.conj().T)


def hermiticity_defect(m) -> float:
    m = np.asarray(m)
    return fro_norm(m - m.conj().T)


def is_hermitian(m, tol: float = HERMITIAN_TOL) -> bool:
    m = require_square(m)
    return hermiticity_defect(m) <= tol * scale(m)


def require_hermitian(m, tol: float = HERMITIAN_TOL, name: str = "matrix") -> ComplexMatrix:
    m = require_square(m, name)
    defect = hermiticity_defect(m)
    if defect > tol * scale(m):
        raise HermiticityError(f"{name} is not Hermitian (||M - M^dag||_F = {defect:.3e})")
    return m


# ===== Algebra =====

def commutator(a, b) -> ComplexMatrix:
    """[a, b] = ab - ba"""
    a, b = require_same_dim(a, b)
    return a @ b - b @ a


def anticommutator(a, b) -> ComplexMatrix:
    """{a, b} = ab + ba"""
    a, b = require_same_dim(a, b)
    return a @ b + b @ a


def kron(a, b) -> ComplexMatrix:
    """
    Kronecker product with block convention
    (a x b)[i*rb + k, j*cb + l] = a[i, j] * b[k, l].
    """
    return np.kron(as_matrix(a, "a"), as_matrix(b, "b"))


def hermitian_eig(m, tol: float = HERMITIAN_TOL) -> HermitianEigenResult:
    """
    Eigendecomposition of a Hermitian matrix.

    Args:
        m: Square matrix, Hermitian within tol * max(1, ||m||_F)
        tol: Relative Hermiticity tolerance

    Returns:
        HermitianEigenResult with ascending eigenvalues
    """
    m = require_hermitian(m, tol)
    # eigh reads one triangle only; symmetrize so both contribute
    values, vectors = np.linalg.eigh(hermitize(m))
    return HermitianEigenResult(eigenvalues=values, eigenvectors=vectors)


def min_eigenvalue(m, tol: float = HERMITIAN_TOL) -> float:
    m = require_hermitian(m, tol)
    return float(np.linalg.eigvalsh(hermitize(m))[0])


def is_psd(m, tol: float = PSD_TOL) -> bool:
    m = require_square(m)
    return min_eigenvalue(m) >= -tol * scale(m)


def validate_density_matrix(rho, name: str = "rho") -> DensityMatrix:
    """
    Check rho is Hermitian, positive semidefinite and has unit trace.

    Returns:
        rho as a complex ndarray
    """
    rho = require_hermitian(rho, HERMITIAN_TOL, name)
    trace = np.trace(rho)
    if abs(trace - 1.0) > TRACE_TOL:
        raise DomainError(f"{name} must have unit trace, got {trace.real:.12g}")
    lowest = min_eigenvalue(rho)
    if lowest < -PSD_TOL * scale(rho):
        raise DomainError(f"{name} is not positive semidefinite (min eigenvalue {lowest:.3e})")
    return rho


def is_projection(p, tol: float = PROJECTION_TOL) -> bool:
    p = require_square(p)
    return fro_norm(p @ p - p) <= tol and hermiticity_defect(p) <= tol


def require_projection(p, tol: float = PROJECTION_TOL, name: str = "p") -> ComplexMatrix:
    p = require_square(p, name)
    idempotency = fro_norm(p @ p - p)
    defect = hermiticity_defect(p)
    if idempotency > tol or defect > tol:
        raise ProjectionError(
            f"{name} is not an orthogonal projection "
            f"(||P^2 - P||_F = {idempotency:.3e}, ||P - P^dag||_F = {defect:.3e})"
        )
    return p


def is_unitary(u, tol: float = UNITARY_TOL) -> bool:
    u = require_square(u)
    return fro_norm(u.conj().T @ u - np.eye(u.shape[0])) <= tol * scale(u)


def require_unitary(u, tol: float = UNITARY_TOL, name: str = "unitary") -> ComplexMatrix:
    u = require_square(u, name)
    defect = fro_norm(u.conj().T @ u - np.eye(u.shape[0]))
    if defect > tol * scale(u):
        raise UnitarityError(f"{name} is not unitary (||U^dag U - I||_F = {defect:.3e})")
    return u


def spectral_projection(h, level: int, tol: float = 1e-9) -> ComplexMatrix:
    """
    Projector onto the level-th distinct eigenvalue of h (0 = lowest).

    Eigenvalues closer than tol * max(1, |value|) belong to the same level.
    """
    result = hermitian_eig(h)
    values = result.eigenvalues
    groups: list[list[int]] = [[0]]
    for k in range(1, len(values)):
        previous = values[groups[-1][-1]]
        if values[k] - previous > tol * max(1.0, abs(previous)):
            groups.append([k])
        else:
            groups[-1].append(k)
    if not 0 <= level < len(groups):
        raise DomainError(f"energy level {level} out of range (0..{len(groups) - 1})")
    v = result.eigenvectors[:, groups[level]]
    return v @ v.conj().T


# ===== Vectorization =====

def stack(m) -> npt.NDArray[np.complex128]:
    """Column-stacking: stack(m)[i + d*j] = m[i, j]."""
    return np.asarray(m, dtype=np.complex128).reshape(-1, order='F')


def unstack(v, rows: int | None = None) -> ComplexMatrix:
    """Inverse of stack; square unless rows is given."""
    v = np.asarray(v, dtype=np.complex128)
    if rows is None:
        rows = int(round(np.sqrt(v.size)))
    if rows < 1 or v.size % rows:
        raise ShapeError(f"cannot unstack vector of length {v.size} into {rows} rows")
    return v.reshape((rows, v.size // rows), order='F')


# ===== Fixed operators =====

def identity(d: int) -> ComplexMatrix:
    return np.eye(d, dtype=np.complex128)


def pauli_x() -> ComplexMatrix:
    return np.array([[0, 1], [1, 0]], dtype=np.complex128)


def pauli_y() -> ComplexMatrix:
    return np.array([[0, -1j], [1j, 0]], dtype=np.complex128)


def pauli_z() -> ComplexMatrix:
    return np.array([[1, 0], [0, -1]], dtype=np.complex128)


def ket(d: int, i: int) -> ComplexMatrix:
    """Basis column vector |i> as a d x 1 matrix."""
    if not 0 <= i < d:
        raise DomainError(f"basis index {i} out of range for dimension {d}")
    v = np.zeros((d, 1), dtype=np.complex128)
    v[i, 0] = 1.0
    return v


def outer(u, v) -> ComplexMatrix:
    """|u><v| for column vectors (or 1-D arrays)."""
    u = np.asarray(u, dtype=np.complex128).reshape(-1, 1)
    v = np.asarray(v, dtype=np.complex128).reshape(-1, 1)
    return u @ v.conj().T


def basis_matrix(d: int, i: int, j: int) -> ComplexMatrix:
    """E_ij = |i><j|"""
    e = np.zeros((d, d), dtype=np.complex128)
    e[i, j] = 1.0
    return e


def projector(d: int, i: int) -> ComplexMatrix:
    """|i><i|"""
    return basis_matrix(d, i, i)
