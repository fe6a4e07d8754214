"""
Commands: The Four CLI Workflows

CurrentLab runs each workflow end to end, prints console progress and returns
the process exit code (0 success, 1 validation/verification failure, 2 numeric
failure). The computations behind it (run_evolution, currents_report,
choi_report, herald_report, semigroup_report) return plain values so they can
be tested without touching the console or the disk.
"""

import logging
from pathlib import Path
from typing import Callable, Optional, Sequence

import numpy as np
import pandas as pd

import channels
import currents
import evolve
import matcore
from errors import CurrentLabError, DomainError
from lindblad import stationary_state
from report_generator import ReportGenerator, RunReport, csv_columns
from scenario_config import ScenarioConfig, load_basis, load_config, with_overrides
from verification import DEFAULT_SEED, run_verification

logger = logging.getLogger(__name__)

MAPS = ('identity', 'transpose', 'depolarizing', 'semigroup')
CHANNEL_SUBCOMMANDS = ('choi', 'herald', 'semigroup')


def configure_logging(verbose: bool = False):
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.WARNING,
        format='%(levelname)s %(name)s: %(message)s',
    )


def _banner(title: str):
    print("\n" + "=" * 70)
    print(title)
    print("=" * 70)


def _guarded(action: Callable[[], int]) -> int:
    """Run a workflow, turning lab errors into exit codes."""
    try:
        return action()
    except CurrentLabError as e:
        print(f"\n❌ {type(e).__name__}: {e}")
        return e.exit_code
    except KeyboardInterrupt:
        print("\n\n⚠️  Cancelled by user")
        return 1


def _bloch(rho) -> tuple[float, float, float]:
    x, y, z = (float(np.trace(rho @ s).real) for s in (matcore.pauli_x(), matcore.pauli_y(), matcore.pauli_z()))
    return x, y, z


def _verdict(completely_positive: bool, trace_preserving: bool) -> dict:
    return {
        'cp': 'CP' if completely_positive else 'NOT-CP',
        'tp': 'TP' if trace_preserving else 'NOT-TP',
    }


# ===== evolve =====

def run_evolution(config: ScenarioConfig) -> RunReport:
    """
    Evolve the configured initial state and sample it every sample_every steps.

    Returns:
        RunReport with floor(t_final/dt/sample_every) + 1 rows and a summary
        (final state, stationary state, diagnostics)
    """
    model = config.build_model()
    rho0 = config.initial_state.density()
    schedule = config.schedule

    n_steps, _ = evolve.step_count(schedule.t_final, schedule.dt)
    indices = np.arange(0, n_steps + 1, schedule.sample_every)
    times = indices * schedule.dt

    if config.method == 'rk4':
        trajectory = evolve.evolve_rk4(model, rho0, schedule.t_final, schedule.dt)
        states = [trajectory.states[i] for i in indices]
        trace_errors = trajectory.trace_errors[indices]
        min_eigs = trajectory.min_eigenvalues[indices]
    else:
        trajectory = evolve.exact_trajectory(model, rho0, times)
        states = trajectory.states
        trace_errors = trajectory.trace_errors
        min_eigs = trajectory.min_eigenvalues

    # one observable per (projection, channel), projection-major
    tracked = []
    for name, p in config.projections:
        for k, observable in enumerate(currents.current_observables(model, p)):
            tracked.append((f"{model.channels[k].label(k)}:{name}", observable.observable))

    columns = csv_columns(model.dim, [name for name, _ in config.projections], [label for label, _ in tracked])
    rows = []
    for t, rho, trace_error, lowest in zip(times, states, trace_errors, min_eigs):
        row = [float(t)]
        if model.dim == 2:
            row.extend(_bloch(rho))
        row.extend(float(np.trace(rho @ p).real) for _, p in config.projections)
        row.extend(currents.current_expectation(j, rho) for _, j in tracked)
        row.extend([float(trace_error), float(lowest)])
        rows.append(row)
    frame = pd.DataFrame(rows, columns=columns)

    fixed_point = stationary_state(model)
    summary = {
        'final_time': float(times[-1]),
        'final_state': states[-1],
        'final_bloch': _bloch(states[-1]) if model.dim == 2 else None,
        'stationary_state': fixed_point,
        'stationary_bloch': _bloch(fixed_point) if model.dim == 2 else None,
        'stationary_populations': {
            name: float(np.trace(fixed_point @ p).real) for name, p in config.projections
        },
        'max_trace_error': float(np.max(trace_errors)),
        'min_eigenvalue': float(np.min(min_eigs)),
        'analytic_max_error': _analytic_error(model, rho0, times, states),
        'diagnostics': {'method': trajectory.method, **trajectory.diagnostics},
    }
    return RunReport(rows=frame, summary=summary)


def _analytic_error(model, rho0, times, states) -> Optional[float]:
    """Max Bloch deviation from the closed form, when the model has one."""
    if model.dim != 2:
        return None
    try:
        params = evolve.params_from_model(model)
        b0 = evolve.bloch_from_rho(rho0)
    except CurrentLabError as e:
        logger.debug("no closed form for this model: %s", e)
        return None
    if params.lambda_ + params.mu == 0:
        return None
    return max(
        float(np.abs(np.array(_bloch(rho)) - evolve.two_level_analytic(params, b0, float(t)).as_array()).max())
        for t, rho in zip(times, states)
    )


# ===== currents =====

def currents_report(config: ScenarioConfig, basis: Optional[currents.BasisChange] = None) -> dict:
    """Current observable of every channel for every tracked projection."""
    model = config.build_model()
    if basis is not None and basis.dim != model.dim:
        raise DomainError(f"basis is {basis.dim}-dimensional, model is {model.dim}")

    entries = []
    for k, channel in enumerate(model.channels):
        for name, p in config.projections:
            j = currents.current_observable(channel, p, k).observable
            entries.append({
                'channel': channel.label(k),
                'channel_index': k,
                'rate': channel.rate,
                'projection': name,
                'observable': ReportGenerator.encode_matrix(j),
                'observable_in_basis': (
                    ReportGenerator.encode_matrix(currents.transform_observable(j, basis)) if basis else None
                ),
            })

    return {
        'scenario': config.name,
        'dim': model.dim,
        'basis': ReportGenerator.encode_matrix(basis.unitary) if basis else None,
        'currents': entries,
    }


# ===== channel =====

def _positivity(phi: channels.MatrixMap) -> dict:
    report = channels.is_completely_positive(phi)
    defect = channels.trace_preservation_defect(phi)
    return {
        'choi_spectrum': list(report.spectrum),
        'min_eigenvalue': report.min_eigenvalue,
        'tp_defect': defect,
        'verdict': _verdict(report.completely_positive, defect <= channels.TP_TOL),
    }


def _action_dict(action: channels.BlochAction) -> dict:
    return {
        'matrix': action.matrix.tolist(),
        'translation': action.translation.tolist(),
        'determinant': action.determinant,
        'rotation': action.is_rotation(),
    }


def choi_report(map_name: str, dim: int = 2, config: Optional[ScenarioConfig] = None, t: Optional[float] = None) -> dict:
    """Choi spectrum and CP/TP verdict for a named map."""
    if map_name not in MAPS:
        raise DomainError(f"unknown map {map_name!r}, expected one of {MAPS}")
    if map_name == 'semigroup':
        if config is None or t is None:
            raise DomainError("the semigroup map needs --config and --t")
        phi = channels.semigroup_channel(config.build_model(), t)
    else:
        if dim < 1:
            raise DomainError(f"--dim must be >= 1, got {dim}")
        phi = {
            'identity': channels.identity_map,
            'transpose': channels.transpose_map,
            'depolarizing': channels.depolarizing_map,
        }[map_name](dim)

    document = {'map': map_name, 'dim_in': phi.dim_in, 'dim_out': phi.dim_out}
    if map_name == 'semigroup':
        document['t'] = t
    document.update(_positivity(phi))
    return document


def herald_report(psi: Sequence[float]) -> dict:
    """
    Herald Alice's test state psi = (re0, im0, re1, im1) and reconstruct the map.

    Raises:
        DomainError: not four finite reals, or not normalized
    """
    values = np.asarray(psi, dtype=float).reshape(-1)
    if values.size != 4 or not np.all(np.isfinite(values)):
        raise DomainError(f"--psi expects 4 finite reals (re0 im0 re1 im1), got {list(psi)}")
    state = channels.StateVector(np.array([complex(values[0], values[1]), complex(values[2], values[3])]))

    result = channels.herald(state)
    phi = channels.heralding_as_map()
    reconstructed = {'distance_to_transpose': matcore.fro_norm(phi.matrix - channels.transpose_map(2).matrix)}
    reconstructed.update(_positivity(phi))
    reconstructed['bloch_action'] = _action_dict(channels.bloch_action(phi))

    return {
        'psi': state.amplitudes,
        'probability': result.probability,
        'bob_state': result.bob_state.amplitudes,
        'mirror_fidelity': channels.state_fidelity(result.bob_state, channels.mirror(state)),
        'reconstructed_map': reconstructed,
    }


def semigroup_report(config: ScenarioConfig, t: float) -> dict:
    """CPTP verdict and (for qubits) Bloch action of e^{tL}."""
    phi = channels.semigroup_channel(config.build_model(), t)
    document = {'scenario': config.name, 't': t}
    document.update(_positivity(phi))
    document['bloch_action'] = _action_dict(channels.bloch_action(phi)) if phi.dim_in == 2 else None
    return document


# ===== Workflows =====

class CurrentLab:
    """
    The four CLI workflows.

    Each method runs one workflow end to end, prints console progress and
    returns the process exit code. Every file the lab writes goes through
    its ReportGenerator.
    """

    def __init__(self, generator: Optional[ReportGenerator] = None):
        """
        Args:
            generator: Output writer (default: ReportGenerator over reports/)
        """
        self.generator = generator or ReportGenerator()

    def evolve(
        self,
        config_path,
        out: Optional[str] = None,
        method: Optional[str] = None,
        dt: Optional[float] = None,
        t_final: Optional[float] = None,
        report: bool = False,
    ) -> int:
        """Evolve a scenario and write its CSV (and optionally the Markdown summary)."""

        def action() -> int:
            _banner("⚛️  RELAXATION CURRENT LAB - EVOLVE")

            print("\n📂 STEP 1: Loading scenario...")
            config = with_overrides(load_config(config_path), method=method, dt=dt, t_final=t_final, output=out)
            print(f"   ✅ {config.name}: dim {config.model.dim}, {len(config.model.channels)} channels, method {config.method}")

            print("\n🔬 STEP 2: Evolving...")
            run = run_evolution(config)
            s = run.summary
            print(f"   ✅ {len(run.rows)} samples up to t = {s['final_time']:g}")
            trace_ok = s['max_trace_error'] <= 1e-9
            positive = s['min_eigenvalue'] >= -1e-10
            print(f"   {'✅' if trace_ok else '⚠️ '} max trace error {s['max_trace_error']:.3e}")
            print(f"   {'✅' if positive else '⚠️ '} min eigenvalue {s['min_eigenvalue']:.3e}")
            if s['final_bloch'] is not None:
                x, y, z = s['final_bloch']
                print(f"   Final Bloch vector: ({x:.6f}, {y:.6f}, {z:.6f})")

            print("\n💾 STEP 3: Writing CSV...")
            csv_path = Path(config.output) if config.output else self.generator.default_csv_path(config)
            self.generator.write_csv(run, csv_path)
            print(f"   ✅ {csv_path}")

            if report:
                print("\n📝 STEP 4: Writing run summary...")
                content = self.generator.generate_run_report(run, config, csv_path)
                md_path = self.generator.save_report(content, csv_path.with_suffix('.md'))
                print(f"   ✅ {md_path}")

            _banner("✅ EVOLUTION COMPLETE")
            return 0

        return _guarded(action)

    def currents(self, config_path, basis_path=None, out: Optional[str] = None) -> int:
        """Print (or save) the current observables as JSON."""

        def action() -> int:
            config = load_config(config_path)
            basis = load_basis(basis_path) if basis_path else None
            text = ReportGenerator.render_json(currents_report(config, basis))
            if out is None:
                print(text, end='')
                return 0
            _banner("⚛️  RELAXATION CURRENT LAB - CURRENTS")
            path = self.generator.save_report(text, out)
            print(f"   ✅ {len(config.model.channels)} channels x {len(config.projections)} projections")
            print(f"   ✅ Saved to {path}")
            return 0

        return _guarded(action)

    def channel(
        self,
        subcommand: str,
        map_name: str = 'transpose',
        dim: int = 2,
        config_path=None,
        t: Optional[float] = None,
        psi: Optional[Sequence[float]] = None,
        out: Optional[str] = None,
    ) -> int:
        """Channel diagnostics: choi, herald or semigroup; prints JSON."""

        def action() -> int:
            config = load_config(config_path) if config_path else None
            if subcommand == 'choi':
                document = choi_report(map_name, dim, config, t)
            elif subcommand == 'herald':
                if psi is None:
                    raise DomainError("herald needs --psi re0 im0 re1 im1")
                document = herald_report(psi)
            elif subcommand == 'semigroup':
                if config is None or t is None:
                    raise DomainError("semigroup needs --config and --t")
                document = semigroup_report(config, t)
            else:
                raise DomainError(f"unknown channel subcommand {subcommand!r}, expected one of {CHANNEL_SUBCOMMANDS}")

            text = ReportGenerator.render_json(document)
            print(text, end='')
            if out is not None:
                self.generator.save_report(text, out)
                logger.info("channel report saved to %s", out)
            return 0

        return _guarded(action)

    def verify(self, seed: int = DEFAULT_SEED, inject_fault: Optional[str] = None) -> int:
        """Run every invariant suite; exit 0 iff all pass."""

        def action() -> int:
            _banner(f"🔍 RELAXATION CURRENT LAB - VERIFY (seed {seed})")
            report = run_verification(seed, inject_fault)

            suite = None
            for result in report.results:
                if result.suite != suite:
                    suite = result.suite
                    print(f"\n📋 {suite}")
                print(result.line())

            _banner("📋 VERIFICATION SUMMARY")
            total = len(report.results)
            print(f"{total - len(report.failures)}/{total} checks passed in {report.elapsed:.2f} s")
            if report.passed:
                print("🎉 ALL CHECKS PASSED!")
                return 0
            print("❌ FAILURES:")
            for result in report.failures:
                print(f"   {result.line()}")
            return 1

        return _guarded(action)


def test_lab():
    """Run the bundled two-level scenario into a scratch directory."""
    import tempfile

    data = Path(__file__).parent.parent / 'data'
    with tempfile.TemporaryDirectory() as scratch:
        lab = CurrentLab(ReportGenerator(scratch))
        lab.evolve(data / 'two_level.json', out=str(Path(scratch) / 'two_level.csv'), method='exact', report=True)
        lab.channel('choi', map_name='transpose', out=str(Path(scratch) / 'transpose.json'))


if __name__ == "__main__":
    test_lab()
