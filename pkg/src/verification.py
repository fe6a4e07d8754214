"""
Verification Suites: Invariants and Oracles

Every property the library promises, checked numerically and reported one line
per invariant:

    PASS lindblad: duality max_err=2.1e-16 (limit 1e-12)

Suites run in a fixed order from a single seeded generator, so the same seed
always gives the same lines. A failing check is report content, never an
exception; only the exit code of the command changes.

The random generators here are shared with the test suite.
"""

import logging
import time
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

import channels
import currents
import evolve
import lindblad
import matcore
from errors import CurrentLabError, DomainError, HermiticityError
from lindblad import JumpChannel, LindbladModel
from report_generator import ReportGenerator

logger = logging.getLogger(__name__)

DEFAULT_SEED = 42
FAULTS = ('non_hermitian_hamiltonian',)

# standard two-level benchmark
BENCHMARK = {'eps': 1.0, 'mu': 0.3, 'lambda_': 0.1, 'delta': 0.05}


@dataclass(frozen=True)
class CheckResult:
    suite: str
    invariant: str
    passed: bool
    metric: str

    def line(self) -> str:
        return ReportGenerator.format_check(self.suite, self.invariant, self.passed, self.metric)


@dataclass
class VerificationReport:
    seed: int
    results: list[CheckResult] = field(default_factory=list)
    elapsed: float = 0.0

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.results)

    @property
    def failures(self) -> list[CheckResult]:
        return [r for r in self.results if not r.passed]

    def lines(self) -> list[str]:
        return [r.line() for r in self.results]


# ===== Random inputs =====

def _complex_gaussian(rng: np.random.Generator, shape) -> np.ndarray:
    return rng.normal(size=shape) + 1j * rng.normal(size=shape)


def random_hermitian(d: int, rng: np.random.Generator) -> np.ndarray:
    g = _complex_gaussian(rng, (d, d))
    return (g + g.conj().T) / 2


def random_density(d: int, rng: np.random.Generator) -> np.ndarray:
    g = _complex_gaussian(rng, (d, d))
    rho = g @ g.conj().T
    return matcore.hermitize(rho / np.trace(rho).real)


def random_unitary(d: int, rng: np.random.Generator) -> np.ndarray:
    q, r = np.linalg.qr(_complex_gaussian(rng, (d, d)))
    phases = np.diag(r) / np.abs(np.diag(r))
    return q * phases


def random_pure_state(d: int, rng: np.random.Generator) -> np.ndarray:
    v = _complex_gaussian(rng, d)
    return v / np.linalg.norm(v)


def random_projection(d: int, rng: np.random.Generator, rank: Optional[int] = None) -> np.ndarray:
    """Orthogonal projection of the given (else random) rank."""
    rank = int(rng.integers(0, d + 1)) if rank is None else rank
    q = random_unitary(d, rng)[:, :rank]
    return matcore.hermitize(q @ q.conj().T)


def random_model(d: int, rng: np.random.Generator) -> LindbladModel:
    """Random Hamiltonian with one to three random channels, rates in [0, 1]."""
    n_channels = int(rng.integers(1, 4))
    chans = tuple(
        JumpChannel(_complex_gaussian(rng, (d, d)) / np.sqrt(d), float(rng.uniform(0, 1)), f"b{k}")
        for k in range(n_channels)
    )
    return LindbladModel(random_hermitian(d, rng), chans)


def random_two_level_params(rng: np.random.Generator) -> evolve.TwoLevelParams:
    """eps in [0, 2], rates in [0, 1] with mu bounded away from 0."""
    return evolve.two_level_params(
        eps=float(rng.uniform(0, 2)),
        mu=float(rng.uniform(0.05, 1)),
        lambda_=float(rng.uniform(0, 1)),
        delta=float(rng.uniform(0, 1)),
    )


def random_bloch(rng: np.random.Generator) -> evolve.BlochState:
    """Uniform in the ball (slightly shrunk away from the surface)."""
    v = rng.normal(size=3)
    v *= 0.999 * rng.uniform() ** (1 / 3) / np.linalg.norm(v)
    return evolve.BlochState(*v)


# ===== Helpers =====

def _check(suite: str, invariant: str, value: float, limit: float, metric: str = "max_err") -> CheckResult:
    return CheckResult(suite, invariant, bool(value <= limit), f"{metric}={value:.3e} (limit {limit:g})")


def _check_min(suite: str, invariant: str, value: float, floor: float, metric: str) -> CheckResult:
    return CheckResult(suite, invariant, bool(value >= floor), f"{metric}={value:.3e} (floor {floor:g})")


def _flag(suite: str, invariant: str, passed: bool, metric: str) -> CheckResult:
    return CheckResult(suite, invariant, bool(passed), metric)


def _generator_norm(model: LindbladModel) -> float:
    return matcore.fro_norm(model.hamiltonian) + sum(c.rate * matcore.fro_norm(c.operator) ** 2 for c in model.channels)


def _bloch(rho) -> np.ndarray:
    return np.array([
        np.trace(rho @ s).real for s in (matcore.pauli_x(), matcore.pauli_y(), matcore.pauli_z())
    ])


def _benchmark_model() -> LindbladModel:
    b = BENCHMARK
    return currents.build_two_level(b['eps'], b['mu'], b['lambda_'], b['delta'])


def _benchmark_params() -> evolve.TwoLevelParams:
    return evolve.two_level_params(**BENCHMARK)


# ===== Suites =====

def check_matcore(rng: np.random.Generator) -> list[CheckResult]:
    suite = "matcore"
    results = []

    worst = 0.0
    for d in range(2, 7):
        for _ in range(4):
            m = random_hermitian(d, rng)
            eig = matcore.hermitian_eig(m)
            worst = max(worst, matcore.fro_norm(m - eig.reconstruct()) / matcore.scale(m))
    results.append(_check(suite, "eig_reconstruction", worst, 1e-10))

    anti = traceless = 0.0
    for _ in range(20):
        d = int(rng.integers(2, 7))
        a, b = _complex_gaussian(rng, (d, d)), _complex_gaussian(rng, (d, d))
        norm = matcore.fro_norm(a) * matcore.fro_norm(b)
        anti = max(anti, matcore.fro_norm(matcore.commutator(a, b) + matcore.commutator(b, a)) / norm)
        traceless = max(traceless, abs(np.trace(matcore.commutator(a, b))) / norm)
    results.append(_check(suite, "commutator_antisymmetry", anti, 1e-14))
    results.append(_check(suite, "commutator_traceless", traceless, 1e-12))

    # small Gaussian integers keep every product exact, so reassociation must be bitwise
    worst = 0.0
    for _ in range(10):
        a, b, c = (
            rng.integers(-4, 5, size=(2, 2)) + 1j * rng.integers(-4, 5, size=(2, 2))
            for _ in range(3)
        )
        lhs = matcore.kron(matcore.kron(a, b), c)
        rhs = matcore.kron(a, matcore.kron(b, c))
        worst = max(worst, matcore.fro_norm(lhs - rhs))
    results.append(_check(suite, "kron_associativity", worst, 0.0))

    return results


def check_lindblad(rng: np.random.Generator) -> list[CheckResult]:
    suite = "lindblad"
    duality = annihilation = unitality = hermiticity = faithfulness = 0.0

    for _ in range(100):
        d = int(rng.integers(2, 5))
        model = random_model(d, rng)
        rho = random_hermitian(d, rng)
        m = random_hermitian(d, rng)
        g = _generator_norm(model)

        l_rho = lindblad.lindbladian_apply(model, rho)
        lhs = np.trace(l_rho @ m)
        rhs = np.trace(rho @ lindblad.adjoint_lindbladian_apply(model, m))
        duality = max(duality, abs(lhs - rhs) / max(1.0, g * matcore.fro_norm(rho) * matcore.fro_norm(m)))

        scale = max(1.0, g * matcore.fro_norm(rho))
        annihilation = max(annihilation, abs(np.trace(l_rho)) / scale)
        hermiticity = max(hermiticity, np.abs(l_rho - l_rho.conj().T).max() / scale)

        unit = lindblad.adjoint_lindbladian_apply(model, np.eye(d))
        unitality = max(unitality, np.abs(unit).max() / max(1.0, g))

        vectorized = lindblad.to_superoperator(model).apply(rho)
        faithfulness = max(faithfulness, matcore.fro_norm(vectorized - l_rho) / scale)

    return [
        _check(suite, "duality", duality, 1e-12),
        _check(suite, "trace_annihilation", annihilation, 1e-13),
        _check(suite, "unitality", unitality, 1e-13),
        _check(suite, "hermiticity_preservation", hermiticity, 1e-13),
        _check(suite, "superoperator_faithfulness", faithfulness, 1e-12),
    ]


def check_currents(rng: np.random.Generator) -> list[CheckResult]:
    suite = "currents"
    results = []

    sign = annihilated = completeness = covariance = 0.0
    for _ in range(50):
        d = int(rng.integers(2, 5))
        model = random_model(d, rng)
        p = random_projection(d, rng)
        complement = np.eye(d) - p
        for channel in model.channels:
            scale = max(1.0, channel.rate * matcore.fro_norm(channel.operator) ** 2)
            j = currents.current_observable(channel, p).observable
            j_bar = channel.rate * lindblad.adjoint_dissipator(channel.operator, complement)
            sign = max(sign, np.abs(j + j_bar).max() / scale)
            annihilated = max(annihilated, np.abs(lindblad.adjoint_dissipator(channel.operator, np.eye(d))).max() / scale)

        rho = random_density(d, rng)
        total = currents.population_rate(model, rho, p)
        parts = sum(value for _, value in currents.rate_decomposition(model, rho, p))
        completeness = max(completeness, abs(total - parts) / max(1.0, _generator_norm(model)))

        m = random_hermitian(d, rng)
        u = currents.BasisChange(random_unitary(d, rng))
        direct = np.trace(rho @ m)
        moved = np.trace(currents.transform_observable(rho, u) @ currents.transform_observable(m, u))
        covariance = max(covariance, abs(direct - moved) / max(1.0, matcore.fro_norm(m)))

    results.append(_check(suite, "sign_identity", sign, 1e-13))
    results.append(_check(suite, "identity_annihilation", annihilated, 1e-13))
    results.append(_check(suite, "decomposition_completeness", completeness, 1e-12))
    results.append(_check(suite, "basis_covariance", covariance, 1e-12))

    # two-level: radiation mu|1><1|, excitation -lambda|0><0|, dephasing 0
    model = _benchmark_model()
    p0 = matcore.projector(2, 0)
    radiative, excitation, dephasing = currents.current_observables(model, p0)
    b = BENCHMARK
    err = max(
        np.abs(radiative.observable - b['mu'] * matcore.projector(2, 1)).max(),
        np.abs(excitation.observable + b['lambda_'] * p0).max(),
        np.abs(dephasing.observable).max(),
    )
    results.append(_check(suite, "two_level_specialization", err, 1e-15))

    # derivative balance along the benchmark trajectory from |1><1|
    superop = lindblad.to_superoperator(model)
    rho0 = matcore.projector(2, 1)
    fd_err = sum_err = 0.0
    for t in (0.5, 1.0, 2.0, 5.0, 9.0):
        rho_t = evolve.evolve_exact(superop, rho0, t)
        rate = currents.population_rate(model, rho_t, p0)
        fd_err = max(fd_err, abs(evolve.finite_difference_rate(model, rho0, p0, t) - rate))
        channel_sum = sum(currents.current_expectation(c.observable, rho_t) for c in currents.current_observables(model, p0))
        sum_err = max(sum_err, abs(rate - channel_sum))
    results.append(_check(suite, "derivative_consistency", fd_err, 1e-6))
    results.append(_check(suite, "channel_current_sum", sum_err, 1e-12))

    results.extend(_three_level_checks())
    return results


def _three_level_checks() -> list[CheckResult]:
    suite = "currents"
    eps, mu10, mu21 = 0.1, 0.2, 0.2
    model = currents.build_three_level(eps, mu10, mu21)
    a10, a21 = (c.operator for c in model.channels)

    s_err = np.abs(lindblad.adjoint_dissipator(a10, matcore.projector(3, 0)) - matcore.projector(3, 1)).max()

    p1 = 0.5 * (
        matcore.basis_matrix(3, 1, 1) + matcore.basis_matrix(3, 2, 2)
        - matcore.basis_matrix(3, 1, 2) - matcore.basis_matrix(3, 2, 1)
    )
    expected = 0.25 * (matcore.basis_matrix(3, 1, 2) + matcore.basis_matrix(3, 2, 1))
    f_err = np.abs(lindblad.adjoint_dissipator(a21, p1) - expected).max()
    p1_err = np.abs(matcore.spectral_projection(model.hamiltonian, 1) - p1).max()

    basis = currents.three_level_energy_basis()
    j = mu21 * expected
    transformed = currents.transform_observable(j, basis)
    u = basis.unitary
    brute = np.array([[np.vdot(u[:, a], j @ u[:, b]) for b in range(3)] for a in range(3)])
    oracle_err = np.abs(transformed - brute).max()
    # population leaves the upper level |2): weight +mu/4 there, -mu/4 on |1)
    sign_err = np.abs(transformed - (mu21 / 4) * np.diag([0, -1, 1])).max()

    return [
        _check(suite, "three_level_ground_current", s_err, 1e-15),
        _check(suite, "three_level_p1_current", f_err, 1e-15),
        _check(suite, "three_level_p1_spectral", p1_err, 1e-12),
        _check(suite, "energy_basis_oracle", oracle_err, 1e-14),
        _check(suite, "energy_basis_sign", sign_err, 1e-14),
    ]


def check_evolve(rng: np.random.Generator) -> list[CheckResult]:
    suite = "evolve"
    results = []
    sample_times = (0.5, 1.0, 5.0)

    exact_err = rk4_err = 0.0
    exact_trace = rk4_trace = 0.0
    lowest = np.inf
    for _ in range(20):
        params = random_two_level_params(rng)
        b0 = random_bloch(rng)
        model = currents.build_two_level(params.eps, params.mu, params.lambda_, params.delta)
        rho0 = evolve.rho_from_bloch(b0)

        exact = evolve.exact_trajectory(model, rho0, sample_times)
        rk4 = evolve.evolve_rk4(model, rho0, sample_times[-1], dt=1e-3)
        for t, rho in zip(sample_times, exact.states):
            oracle = evolve.two_level_analytic(params, b0, t).as_array()
            exact_err = max(exact_err, np.abs(_bloch(rho) - oracle).max())
            rho_rk4 = rk4.states[int(round(t / 1e-3))]
            rk4_err = max(rk4_err, np.abs(_bloch(rho_rk4) - oracle).max())
        exact_trace = max(exact_trace, exact.trace_errors.max())
        rk4_trace = max(rk4_trace, rk4.trace_errors.max())
        lowest = min(lowest, exact.min_eigenvalues.min(), rk4.min_eigenvalues.min())

    results.append(_check(suite, "oracle_exact", exact_err, 1e-10))
    results.append(_check(suite, "oracle_rk4", rk4_err, 1e-6))

    # benchmark from |1><1| over [0, 10]
    params = _benchmark_params()
    model = _benchmark_model()
    rho0 = matcore.projector(2, 1)
    b0 = evolve.BlochState(0.0, 0.0, -1.0)
    times = np.linspace(0.0, 10.0, 101)
    exact = evolve.exact_trajectory(model, rho0, times)
    rk4 = evolve.evolve_rk4(model, rho0, 10.0, dt=1e-3)
    bench_exact = bench_rk4 = 0.0
    for t, rho in zip(times, exact.states):
        oracle = evolve.two_level_analytic(params, b0, t).as_array()
        bench_exact = max(bench_exact, np.abs(_bloch(rho) - oracle).max())
        bench_rk4 = max(bench_rk4, np.abs(_bloch(rk4.states[int(round(t / 1e-3))]) - oracle).max())
    results.append(_check(suite, "benchmark_exact", bench_exact, 1e-10))
    results.append(_check(suite, "benchmark_rk4", bench_rk4, 1e-6))

    results.append(_check(suite, "trace_conservation_exact", max(exact_trace, exact.trace_errors.max()), 1e-12))
    results.append(_check(suite, "trace_conservation_rk4", max(rk4_trace, rk4.trace_errors.max()), 1e-9))
    lowest = min(lowest, exact.min_eigenvalues.min(), rk4.min_eigenvalues.min())
    results.append(_check_min(suite, "positivity", float(lowest), -1e-10, "min_eig"))

    late = evolve.evolve_exact(lindblad.to_superoperator(model), rho0, 40.0)
    results.append(_check(suite, "relaxation_to_z_inf", abs(_bloch(late)[2] - params.z_inf), 1e-3, "abs_err"))

    # transverse decay rate from a log-linear fit of |zeta(t)|
    start = evolve.BlochState(0.6, 0.3, -0.5)
    fit_times = np.linspace(0.0, 10.0, 51)
    spiral = evolve.exact_trajectory(model, evolve.rho_from_bloch(start), fit_times)
    magnitudes = [abs(complex(*_bloch(rho)[:2])) for rho in spiral.states]
    slope = np.polyfit(fit_times, np.log(magnitudes), 1)[0]
    results.append(_check(suite, "transverse_decay_rate", abs(-slope - params.beta) / params.beta, 0.01, "rel_err"))

    # fourth order: halving dt divides the error by about 16
    errors = []
    for dt in (0.1, 0.05):
        traj = evolve.evolve_rk4(model, rho0, 10.0, dt=dt)
        errors.append(max(
            np.abs(_bloch(rho) - evolve.two_level_analytic(params, b0, t).as_array()).max()
            for t, rho in zip(traj.times, traj.states)
        ))
    ratio = errors[0] / errors[1]
    results.append(_flag(suite, "rk4_convergence_order", 12 <= ratio <= 20, f"ratio={ratio:.3f} (range [12, 20])"))

    monotone = True
    grid = np.linspace(0.0, 20.0, 201)
    for candidate in (params, *(random_two_level_params(rng) for _ in range(5))):
        if candidate.delta <= 0:
            continue
        radii = [abs(evolve.two_level_analytic(candidate, start, t).zeta) for t in grid]
        monotone &= bool(np.all(np.diff(radii) < 0))
    results.append(_flag(suite, "spiral_monotone", monotone, f"strictly_decreasing={monotone}"))

    return results


def check_channels(rng: np.random.Generator) -> list[CheckResult]:
    suite = "channels"
    results = []

    transpose = channels.transpose_map(2)
    report = channels.is_completely_positive(transpose)
    spectrum_err = np.abs(np.array(report.spectrum) - np.array([-1.0, 1.0, 1.0, 1.0])).max()
    results.append(_check(suite, "transpose_choi_spectrum", spectrum_err, 1e-12))
    results.append(_flag(
        suite, "transpose_not_cp_but_tp",
        not report.completely_positive and channels.is_trace_preserving(transpose),
        f"cp={report.completely_positive} tp={channels.is_trace_preserving(transpose)}",
    ))
    action = channels.bloch_action(transpose)
    results.append(_check(suite, "transpose_bloch_reflection", np.abs(action.matrix - np.diag([1.0, -1.0, 1.0])).max(), 1e-12))

    try:
        heralded = channels.heralding_as_map()
        distance = matcore.fro_norm(heralded.matrix - transpose.matrix)
        herald_report = channels.is_completely_positive(heralded)
        herald_action = channels.bloch_action(heralded)
        results.append(_check(suite, "heralding_is_transposition", distance, 1e-10))
        results.append(_check(suite, "heralding_choi_negative", herald_report.min_eigenvalue, -1 + 1e-12, "min_eig"))
        results.append(_flag(
            suite, "heralding_not_unitary",
            abs(herald_action.determinant + 1) <= 1e-12 and not herald_action.is_rotation(),
            f"det={herald_action.determinant:+.15f}",
        ))
    except CurrentLabError as e:
        results.append(_flag(suite, "heralding_is_transposition", False, f"error={e}"))

    prob_err = fidelity_gap = 0.0
    for _ in range(50):
        psi = channels.StateVector(random_pure_state(2, rng))
        result = channels.herald(psi)
        prob_err = max(prob_err, abs(result.probability - 0.5))
        fidelity_gap = max(fidelity_gap, 1 - channels.state_fidelity(result.bob_state, channels.mirror(psi)))
    results.append(_check(suite, "herald_probability", prob_err, 1e-12))
    results.append(_check(suite, "herald_mirror_fidelity", fidelity_gap, 1e-12, "max_gap"))

    positivity = 0.0
    for _ in range(50):
        d = int(rng.integers(2, 5))
        rho = random_density(d, rng)
        image = channels.apply_map(channels.transpose_map(d), rho)
        positivity = max(positivity, np.abs(np.linalg.eigvalsh(image) - np.linalg.eigvalsh(rho)).max())
    results.append(_check(suite, "transpose_positivity", positivity, 1e-12))

    model = _benchmark_model()
    lowest = np.inf
    tp_defect = 0.0
    for t in (0.1, 1.0, 10.0):
        phi = channels.semigroup_channel(model, t)
        lowest = min(lowest, channels.is_completely_positive(phi).min_eigenvalue)
        tp_defect = max(tp_defect, channels.trace_preservation_defect(phi))
    results.append(_check_min(suite, "semigroup_cp", float(lowest), -1e-10, "min_eig"))
    results.append(_check(suite, "semigroup_tp", tp_defect, 1e-10, "tp_defect"))

    composition = 0.0
    for m in (model, random_model(2, rng), random_model(3, rng)):
        s, t = 0.7, 1.3
        joined = channels.semigroup_channel(m, s + t).matrix
        split = channels.compose(channels.semigroup_channel(m, s), channels.semigroup_channel(m, t)).matrix
        composition = max(composition, matcore.fro_norm(joined - split))
    results.append(_check(suite, "semigroup_composition", composition, 1e-10))

    late = channels.bloch_action(channels.semigroup_channel(model, 60.0))
    target = np.array([0.0, 0.0, _benchmark_params().z_inf])
    drift = max(np.abs(late.matrix).max(), np.abs(late.translation - target).max())
    results.append(_check(suite, "semigroup_long_time", drift, 1e-6))

    return results


def check_validation(rng: np.random.Generator, inject_fault: Optional[str] = None) -> list[CheckResult]:
    """Model validation, with an optional corrupted input as a negative control."""
    suite = "validation"
    results = []

    base = _benchmark_model()
    h = base.hamiltonian.copy()
    if inject_fault == 'non_hermitian_hamiltonian':
        h[0, 1] += 0.1
        logger.warning("injected fault: non-Hermitian Hamiltonian")
    try:
        LindbladModel(h, base.channels)
        results.append(_flag(suite, "model_accepted", True, "hamiltonian=hermitian"))
    except HermiticityError as e:
        results.append(_flag(suite, "model_accepted", False, f"rejected: {e}"))

    def rejects(build: Callable[[], object]) -> bool:
        try:
            build()
        except CurrentLabError:
            return True
        return False

    a = lindblad.transition_operator(2, 1, 0)
    checks = (
        ("rejects_negative_rate", lambda: JumpChannel(a, -0.1)),
        ("rejects_non_projection", lambda: currents.current_observable(JumpChannel(a, 1.0), a)),
        ("rejects_outside_bloch_ball", lambda: evolve.BlochState(1.0, 1.0, 0.0)),
        ("rejects_dimension_mismatch", lambda: LindbladModel(np.eye(2), (JumpChannel(np.eye(3), 1.0),))),
        ("rejects_non_unitary_basis", lambda: currents.BasisChange(2 * np.eye(2))),
    )
    for name, build in checks:
        ok = rejects(build)
        results.append(_flag(suite, name, ok, f"rejected={ok}"))

    return results


SUITES: list[tuple[str, Callable[[np.random.Generator], list[CheckResult]]]] = [
    ("matcore", check_matcore),
    ("lindblad", check_lindblad),
    ("currents", check_currents),
    ("evolve", check_evolve),
    ("channels", check_channels),
]


def run_verification(seed: int = DEFAULT_SEED, inject_fault: Optional[str] = None) -> VerificationReport:
    """
    Run every suite in order from one seeded generator.

    Args:
        seed: Seed for np.random.default_rng
        inject_fault: Name of a fault in FAULTS to corrupt the validation suite

    Returns:
        VerificationReport (passed iff every check passed)
    """
    if inject_fault is not None and inject_fault not in FAULTS:
        raise DomainError(f"unknown fault {inject_fault!r}, expected one of {FAULTS}")

    rng = np.random.default_rng(seed)
    report = VerificationReport(seed=seed)
    start = time.perf_counter()

    for name, suite in SUITES:
        logger.info("running suite %s", name)
        report.results.extend(suite(rng))
    report.results.extend(check_validation(rng, inject_fault))

    report.elapsed = time.perf_counter() - start
    logger.info("verification finished in %.2f s, %d failures", report.elapsed, len(report.failures))
    return report
