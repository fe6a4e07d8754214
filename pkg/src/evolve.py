"""
Time Evolution: Integrators and the Two-Level Closed Form

Three ways to get rho(t) for rho' = L(rho):
- evolve_rk4: classic fixed-step Runge-Kutta with per-step diagnostics
- evolve_exact: expm(t S) applied to stack(rho0)
- two_level_analytic: Bloch-vector closed form, the oracle for both

Bloch conventions: rho = (I + xX + yY + zZ)/2, Z = diag(1, -1), so |0><0| is
z = +1. For H = -(eps/2)Z, decay |0><1| at mu, excitation |1><0| at lambda and
dephasing Z at delta the generator gives

    x' = -beta x + eps y
    y' = -eps x - beta y
    z' = (mu - lambda) - (lambda + mu) z

with beta = 2 delta + (lambda + mu)/2: an exponential spiral (clockwise in the
x-y plane) towards the axis while z relaxes to z_inf = (mu - lambda)/(lambda + mu).
"""

import logging
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
import scipy.linalg

import matcore
from errors import (
    DegenerateModelError,
    DomainError,
    ExpmError,
    StabilityError,
    UnsupportedDimensionError,
)
from lindblad import LindbladModel, Superoperator, adjoint_superoperator, to_superoperator
from matcore import ComplexMatrix, DensityMatrix

logger = logging.getLogger(__name__)

BLOCH_TOL = 1e-9
STABILITY_TOL = 1e-6
EIG_CONDITION_LIMIT = 1e4
EXPM_METHODS = ('pade', 'eig', 'auto')


@dataclass(frozen=True)
class BlochState:
    """Bloch coordinates (x, y, z); pure states lie on the unit sphere."""

    x: float
    y: float
    z: float

    def __post_init__(self):
        norm2 = self.x ** 2 + self.y ** 2 + self.z ** 2
        if not np.isfinite(norm2) or norm2 > 1 + BLOCH_TOL:
            raise DomainError(f"Bloch vector ({self.x}, {self.y}, {self.z}) lies outside the unit ball")

    @property
    def zeta(self) -> complex:
        """zeta = x + iy"""
        return complex(self.x, self.y)

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z])


@dataclass(frozen=True)
class TwoLevelParams:
    """Rates and gap of the two-level model (units 1/time, hbar = 1)."""

    eps: float
    mu: float
    lambda_: float
    delta: float

    def __post_init__(self):
        for name, value in (('mu', self.mu), ('lambda', self.lambda_), ('delta', self.delta)):
            if not np.isfinite(value) or value < 0:
                raise DomainError(f"{name} must be >= 0, got {value}")

    @property
    def beta(self) -> float:
        """Transverse decay rate 2 delta + (lambda + mu)/2."""
        return 2 * self.delta + (self.lambda_ + self.mu) / 2

    @property
    def z_inf(self) -> float:
        """Stationary z = (mu - lambda)/(lambda + mu)."""
        total = self.lambda_ + self.mu
        if total == 0:
            raise DegenerateModelError("z_inf is undefined when lambda + mu = 0")
        return (self.mu - self.lambda_) / total


@dataclass
class Trajectory:
    """Sampled states with per-state diagnostics."""

    times: np.ndarray
    states: list[DensityMatrix]
    trace_errors: np.ndarray
    min_eigenvalues: np.ndarray
    method: str
    diagnostics: dict = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.states)


# ===== Bloch parametrization =====

def _require_qubit(rho: ComplexMatrix):
    if rho.shape != (2, 2):
        raise UnsupportedDimensionError(f"Bloch coordinates need a 2x2 matrix, got {rho.shape}")


def bloch_from_rho(rho) -> BlochState:
    """x = Tr(rho X), y = Tr(rho Y), z = Tr(rho Z)"""
    rho = matcore.validate_density_matrix(rho)
    _require_qubit(rho)
    x, y, z = (float(np.real(np.trace(rho @ p))) for p in (matcore.pauli_x(), matcore.pauli_y(), matcore.pauli_z()))
    return BlochState(x, y, z)


def rho_from_bloch(b: BlochState) -> DensityMatrix:
    """(I + xX + yY + zZ) / 2"""
    return 0.5 * (
        matcore.identity(2)
        + b.x * matcore.pauli_x()
        + b.y * matcore.pauli_y()
        + b.z * matcore.pauli_z()
    )


def two_level_params(eps: float, mu: float, lambda_: float, delta: float) -> TwoLevelParams:
    return TwoLevelParams(eps=eps, mu=mu, lambda_=lambda_, delta=delta)


def params_from_model(model: LindbladModel, tol: float = 1e-12) -> TwoLevelParams:
    """
    Read (eps, mu, lambda, delta) back from a two-level model.

    The Hamiltonian must be diagonal; every channel with nonzero rate must be a
    multiple of |0><1| (decay), |1><0| (excitation) or Z (dephasing). A channel
    c*B contributes rate * |c|^2 to its process.
    """
    if model.dim != 2:
        raise UnsupportedDimensionError(f"two-level parameters need dim 2, got {model.dim}")
    h = model.hamiltonian
    if abs(h[0, 1]) > tol:
        raise DomainError("Hamiltonian is not diagonal in the computational basis")
    eps = float(np.real(h[1, 1] - h[0, 0]))

    rates = {'mu': 0.0, 'lambda': 0.0, 'delta': 0.0}
    shapes = {
        'mu': matcore.basis_matrix(2, 0, 1),
        'lambda': matcore.basis_matrix(2, 1, 0),
        'delta': matcore.pauli_z(),
    }
    for k, channel in enumerate(model.channels):
        if channel.rate == 0:
            continue
        b = channel.operator
        for process, shape in shapes.items():
            # coefficient of b along shape (all shapes have unit-modulus nonzero entries)
            c = np.vdot(shape, b) / np.vdot(shape, shape)
            if matcore.fro_norm(b - c * shape) <= tol * matcore.scale(b):
                rates[process] += channel.rate * abs(c) ** 2
                break
        else:
            raise DomainError(f"channel {k} is not a decay, excitation or dephasing operator")

    return TwoLevelParams(eps=eps, mu=rates['mu'], lambda_=rates['lambda'], delta=rates['delta'])


def bloch_derivative(params: TwoLevelParams, b: BlochState) -> np.ndarray:
    """Right-hand side (x', y', z') of the two-level Bloch equations."""
    beta = params.beta
    return np.array([
        -beta * b.x + params.eps * b.y,
        -params.eps * b.x - beta * b.y,
        (params.mu - params.lambda_) - (params.lambda_ + params.mu) * b.z,
    ])


def two_level_analytic(params: TwoLevelParams, b0: BlochState, t: float) -> BlochState:
    """
    Closed-form Bloch state at time t.

    z(t) = (z(0) - z_inf) e^{-(lambda + mu) t} + z_inf
    zeta(t) = zeta(0) e^{(-i eps - beta) t}

    Raises:
        DegenerateModelError: if lambda + mu = 0 (use evolve_exact instead)
    """
    if t < 0:
        raise DomainError(f"t must be >= 0, got {t}")
    z_inf = params.z_inf
    if t == 0:
        return b0

    z = (b0.z - z_inf) * np.exp(-(params.lambda_ + params.mu) * t) + z_inf
    zeta = b0.zeta * np.exp(complex(-params.beta, -params.eps) * t)
    return BlochState(zeta.real, zeta.imag, float(z))


# ===== Exact evolution =====

def superoperator_expm(superop: Superoperator, t: float, method: str = 'pade') -> tuple[ComplexMatrix, str]:
    """
    expm(t S) and the path used to compute it.

    Args:
        superop: Generator S
        t: Time (>= 0)
        method: 'pade' (scipy scaling-and-squaring), 'eig' (S = V diag(w) V^-1,
            only when cond(V) <= 1e4) or 'auto' (eig when well conditioned,
            else pade)

    Returns:
        Tuple of (propagator matrix, path name)
    """
    if method not in EXPM_METHODS:
        raise DomainError(f"expm method must be one of {EXPM_METHODS}, got {method!r}")
    if t < 0:
        raise DomainError(f"t must be >= 0, got {t}")

    s = superop.matrix
    path = 'pade'
    result = None

    if method in ('eig', 'auto'):
        w, v = np.linalg.eig(s)
        condition = np.linalg.cond(v)
        if condition <= EIG_CONDITION_LIMIT:
            result = (v * np.exp(t * w)) @ np.linalg.inv(v)
            path = 'eig'
        elif method == 'eig':
            raise ExpmError(f"generator is not diagonalizable within tolerance (cond(V) = {condition:.3e})")
        else:
            logger.debug("eigenvector condition %.3e too large, using pade", condition)

    if result is None:
        result = scipy.linalg.expm(t * s)

    if not np.all(np.isfinite(result)):
        raise ExpmError(f"expm({path}) produced non-finite entries at t = {t}")
    logger.debug("expm path %s at t = %g", path, t)
    return result, path


def evolve_exact(superop: Superoperator, rho0, t: float, method: str = 'pade') -> DensityMatrix:
    """unstack(expm(t S) stack(rho0)), re-Hermitized; t = 0 returns rho0 unchanged."""
    rho0 = matcore.validate_density_matrix(rho0, "rho0")
    if rho0.shape[0] != superop.dim:
        raise DomainError(f"rho0 is {rho0.shape[0]}-dimensional, superoperator is {superop.dim}")
    if t == 0:
        return rho0.copy()
    propagator, _ = superoperator_expm(superop, t, method)
    return matcore.hermitize(matcore.unstack(propagator @ matcore.stack(rho0)))


def exact_trajectory(model: LindbladModel, rho0, times, method: str = 'pade') -> Trajectory:
    """evolve_exact at each requested time, with diagnostics."""
    rho0 = matcore.validate_density_matrix(rho0, "rho0")
    if rho0.shape[0] != model.dim:
        raise DomainError(f"rho0 is {rho0.shape[0]}-dimensional, model is {model.dim}")
    superop = to_superoperator(model)
    times = np.asarray(times, dtype=float)
    states = []
    paths = set()
    for t in times:
        if t == 0:
            states.append(rho0.copy())
            continue
        propagator, path = superoperator_expm(superop, float(t), method)
        paths.add(path)
        states.append(matcore.hermitize(matcore.unstack(propagator @ matcore.stack(rho0))))

    trace_errors, min_eigs = _diagnose(states)
    return Trajectory(
        times=times,
        states=states,
        trace_errors=trace_errors,
        min_eigenvalues=min_eigs,
        method='exact',
        diagnostics={'expm_path': ','.join(sorted(paths)) or 'none'},
    )


def heisenberg_evolve(model: LindbladModel, m, t: float) -> ComplexMatrix:
    """M(t) = e^{t L*}(M), so that Tr(rho(t) M) = Tr(rho0 M(t))."""
    m = matcore.require_square(m, "m")
    propagator, _ = superoperator_expm(adjoint_superoperator(model), t)
    return matcore.unstack(propagator @ matcore.stack(m))


def finite_difference_rate(model: LindbladModel, rho0, p, t: float, h: float = 1e-5) -> float:
    """Central difference of Tr(rho(t) P) from the exact propagator; needs t >= h."""
    if t < h:
        raise DomainError(f"central difference needs t >= h, got t = {t}, h = {h}")
    superop = to_superoperator(model)
    p = np.asarray(p)
    ahead = evolve_exact(superop, rho0, t + h)
    behind = evolve_exact(superop, rho0, t - h)
    return float(np.real(np.trace(ahead @ p) - np.trace(behind @ p)) / (2 * h))


# ===== Runge-Kutta =====

def step_count(t_final: float, dt: float) -> tuple[int, float]:
    """
    Number of full dt steps in [0, t_final] and the leftover time.

    Ratios within 1e-9 of an integer count as exact.
    """
    if not dt > 0:
        raise DomainError(f"dt must be > 0, got {dt}")
    if not t_final >= 0:
        raise DomainError(f"t_final must be >= 0, got {t_final}")
    ratio = t_final / dt
    n = int(np.floor(ratio + 1e-9))
    remainder = t_final - n * dt
    if remainder <= 1e-9 * dt:
        remainder = 0.0
    return n, remainder


def _diagnose(states: list[DensityMatrix]) -> tuple[np.ndarray, np.ndarray]:
    trace_errors = np.array([abs(np.trace(s) - 1.0) for s in states])
    min_eigs = np.array([np.linalg.eigvalsh(s)[0] for s in states])
    return trace_errors, min_eigs


def evolve_rk4(model: LindbladModel, rho0, t_final: float, dt: float = 1e-3) -> Trajectory:
    """
    Fixed-step classic RK4 on rho' = L(rho).

    The generator is applied through its superoperator matrix. Each state is
    re-Hermitized with (rho + rho^dag)/2; the trace is never renormalized and
    negative eigenvalues are never clipped, both are reported instead. A
    shorter final step lands exactly on t_final.

    Raises:
        StabilityError: trace error or negative eigenvalue beyond 1e-6
    """
    rho0 = matcore.validate_density_matrix(rho0, "rho0")
    if rho0.shape[0] != model.dim:
        raise DomainError(f"rho0 is {rho0.shape[0]}-dimensional, model is {model.dim}")
    n_steps, remainder = step_count(t_final, dt)
    s = to_superoperator(model).matrix
    d = model.dim

    steps = [dt] * n_steps + ([remainder] if remainder else [])
    times = np.empty(len(steps) + 1)
    times[0] = 0.0
    states = [rho0.copy()]
    trace_errors = np.empty(len(steps) + 1)
    min_eigs = np.empty(len(steps) + 1)
    trace_errors[0] = abs(np.trace(rho0) - 1.0)
    min_eigs[0] = np.linalg.eigvalsh(rho0)[0]

    v = matcore.stack(rho0)
    for k, h in enumerate(steps, start=1):
        k1 = s @ v
        k2 = s @ (v + 0.5 * h * k1)
        k3 = s @ (v + 0.5 * h * k2)
        k4 = s @ (v + h * k3)
        rho = matcore.hermitize(matcore.unstack(v + (h / 6) * (k1 + 2 * k2 + 2 * k3 + k4), d))
        v = matcore.stack(rho)

        if not np.all(np.isfinite(rho)):
            raise StabilityError(k, "state overflowed to non-finite entries")
        trace_error = abs(np.trace(rho) - 1.0)
        lowest = np.linalg.eigvalsh(rho)[0]
        if not trace_error <= STABILITY_TOL:
            raise StabilityError(k, f"trace error {trace_error:.3e} exceeds {STABILITY_TOL:g}")
        if not lowest >= -STABILITY_TOL:
            raise StabilityError(k, f"min eigenvalue {lowest:.3e} below -{STABILITY_TOL:g}")

        times[k] = t_final if (remainder and k == len(steps)) else k * dt
        states.append(rho)
        trace_errors[k] = trace_error
        min_eigs[k] = lowest

    logger.debug("rk4: %d steps, max trace error %.3e, min eigenvalue %.3e",
                 len(steps), trace_errors.max(), min_eigs.min())
    return Trajectory(
        times=times,
        states=states,
        trace_errors=trace_errors,
        min_eigenvalues=min_eigs,
        method='rk4',
        diagnostics={'steps': len(steps), 'dt': dt},
    )
