"""
Scenario Config: JSON Scenario Files

A scenario bundles everything one run needs:
- model: explicit (dim, hamiltonian, channels) or a builder shorthand
- initial state: Bloch triple (qubits) or density matrix
- schedule: t_final, dt, sample_every
- method: "rk4" or "exact"
- projections to track, by name
- output path for the CSV

Complex numbers are [re, im] pairs. Everything is validated field by field
before any computation; errors name the offending field. The canonical form
(to_dict / serialize_config) expands every shorthand, so
serialize(parse(serialize(parse(c)))) == serialize(parse(c)).
"""

import json
import logging
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Any, Optional

import numpy as np

import matcore
from currents import BasisChange, build_three_level, build_two_level
from errors import ConfigError, CurrentLabError
from evolve import BlochState, rho_from_bloch
from lindblad import JumpChannel, LindbladModel
from matcore import ComplexMatrix

logger = logging.getLogger(__name__)

METHODS = ('rk4', 'exact')
BUILDERS = {
    'two_level': ('eps', 'mu', 'lambda', 'delta'),
    'three_level': ('eps', 'mu10', 'mu21'),
}


@dataclass(frozen=True, eq=False)
class ChannelSpec:
    name: str
    rate: float
    operator: ComplexMatrix


@dataclass(frozen=True, eq=False)
class ModelSpec:
    dim: int
    hamiltonian: ComplexMatrix
    channels: tuple[ChannelSpec, ...]


@dataclass(frozen=True, eq=False)
class InitialState:
    """kind is 'bloch' (value is a BlochState) or 'density_matrix'."""

    kind: str
    value: Any

    def density(self) -> ComplexMatrix:
        if self.kind == 'bloch':
            return rho_from_bloch(self.value)
        return self.value


@dataclass(frozen=True)
class Schedule:
    t_final: float
    dt: float
    sample_every: int = 1


@dataclass(frozen=True, eq=False)
class ScenarioConfig:
    name: str
    model: ModelSpec
    initial_state: InitialState
    schedule: Schedule
    method: str
    projections: tuple[tuple[str, ComplexMatrix], ...]
    output: Optional[str] = None

    def build_model(self) -> LindbladModel:
        return LindbladModel(
            hamiltonian=self.model.hamiltonian,
            channels=tuple(JumpChannel(c.operator, c.rate, c.name) for c in self.model.channels),
        )


# ===== Complex encoding =====

def _number(value, field: str) -> complex:
    if isinstance(value, bool):
        raise ConfigError(field, "expected a number or [re, im] pair, got a boolean")
    if isinstance(value, (int, float)):
        return complex(value, 0.0)
    if isinstance(value, (list, tuple)) and len(value) == 2 and all(
        isinstance(p, (int, float)) and not isinstance(p, bool) for p in value
    ):
        return complex(value[0], value[1])
    raise ConfigError(field, f"expected a number or [re, im] pair, got {value!r}")


def parse_matrix(value, field: str, dim: Optional[int] = None) -> ComplexMatrix:
    """Nested rows of [re, im] pairs (plain reals also accepted)."""
    if not isinstance(value, list) or not value or not all(isinstance(row, list) for row in value):
        raise ConfigError(field, "expected a non-empty list of rows")
    rows = len(value)
    if any(len(row) != rows for row in value):
        raise ConfigError(field, f"expected a square matrix, row lengths are {[len(r) for r in value]}")
    if dim is not None and rows != dim:
        raise ConfigError(field, f"expected {dim}x{dim}, got {rows}x{rows}")
    m = np.array(
        [[_number(entry, f"{field}[{i}][{j}]") for j, entry in enumerate(row)] for i, row in enumerate(value)],
        dtype=np.complex128,
    )
    if not np.all(np.isfinite(m)):
        raise ConfigError(field, "entries must be finite")
    return m


def _clean(x: float) -> float:
    # folds -0.0 into 0.0 so equal matrices serialize identically
    return float(x) + 0.0


def encode_matrix(m) -> list:
    m = np.asarray(m, dtype=np.complex128)
    return [[[_clean(z.real), _clean(z.imag)] for z in row] for row in m]


def decode_matrix(value) -> ComplexMatrix:
    return parse_matrix(value, "matrix")


# ===== Parsing =====

def _require(section: dict, key: str, field: str):
    if not isinstance(section, dict):
        raise ConfigError(field, "expected an object")
    if key not in section:
        raise ConfigError(f"{field}.{key}" if field else key, "missing required field")
    return section[key]


def _real(value, field: str, minimum: Optional[float] = None, strict: bool = False) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(field, f"expected a real number, got {value!r}")
    value = float(value)
    if not np.isfinite(value):
        raise ConfigError(field, "must be finite")
    if minimum is not None and (value <= minimum if strict else value < minimum):
        raise ConfigError(field, f"must be {'>' if strict else '>='} {minimum:g}, got {value:g}")
    return value


def _parse_model(section) -> ModelSpec:
    if not isinstance(section, dict):
        raise ConfigError("model", "expected an object")

    if 'builder' in section:
        builder = section['builder']
        if builder not in BUILDERS:
            raise ConfigError("model.builder", f"unknown builder {builder!r}, expected one of {sorted(BUILDERS)}")
        args = {key: _real(_require(section, key, "model"), f"model.{key}") for key in BUILDERS[builder]}
        try:
            if builder == 'two_level':
                model = build_two_level(args['eps'], args['mu'], args['lambda'], args['delta'])
            else:
                model = build_three_level(args['eps'], args['mu10'], args['mu21'])
        except CurrentLabError as e:
            raise ConfigError("model", str(e)) from e
        return ModelSpec(
            dim=model.dim,
            hamiltonian=model.hamiltonian,
            channels=tuple(ChannelSpec(c.label(k), c.rate, c.operator) for k, c in enumerate(model.channels)),
        )

    dim = _require(section, 'dim', "model")
    if isinstance(dim, bool) or not isinstance(dim, int) or dim < 1:
        raise ConfigError("model.dim", f"expected a positive integer, got {dim!r}")

    h = parse_matrix(_require(section, 'hamiltonian', "model"), "model.hamiltonian", dim)
    if not matcore.is_hermitian(h):
        raise ConfigError("model.hamiltonian", f"must be Hermitian (defect {matcore.hermiticity_defect(h):.3e})")

    raw_channels = section.get('channels', [])
    if not isinstance(raw_channels, list):
        raise ConfigError("model.channels", "expected a list")
    channels = []
    for k, entry in enumerate(raw_channels):
        field = f"model.channels[{k}]"
        operator = parse_matrix(_require(entry, 'operator', field), f"{field}.operator", dim)
        rate = _real(_require(entry, 'rate', field), f"{field}.rate", minimum=0.0)
        name = entry.get('name', str(k))
        if not isinstance(name, str) or not name:
            raise ConfigError(f"{field}.name", "expected a non-empty string")
        channels.append(ChannelSpec(name, rate, operator))

    names = [c.name for c in channels]
    if len(set(names)) != len(names):
        raise ConfigError("model.channels", f"channel names must be unique, got {names}")

    return ModelSpec(dim=dim, hamiltonian=h, channels=tuple(channels))


def _parse_initial_state(section, dim: int) -> InitialState:
    if not isinstance(section, dict) or len(section) != 1:
        raise ConfigError("initial_state", "expected exactly one of 'bloch', 'density_matrix'")
    if 'bloch' in section:
        if dim != 2:
            raise ConfigError("initial_state.bloch", f"Bloch coordinates need dim 2, model has dim {dim}")
        triple = section['bloch']
        if not isinstance(triple, list) or len(triple) != 3:
            raise ConfigError("initial_state.bloch", "expected [x, y, z]")
        values = [_real(v, f"initial_state.bloch[{i}]") for i, v in enumerate(triple)]
        try:
            return InitialState('bloch', BlochState(*values))
        except CurrentLabError as e:
            raise ConfigError("initial_state.bloch", str(e)) from e
    if 'density_matrix' in section:
        rho = parse_matrix(section['density_matrix'], "initial_state.density_matrix", dim)
        try:
            matcore.validate_density_matrix(rho)
        except CurrentLabError as e:
            raise ConfigError("initial_state.density_matrix", str(e)) from e
        return InitialState('density_matrix', rho)
    raise ConfigError("initial_state", f"unknown form {sorted(section)}, expected 'bloch' or 'density_matrix'")


def _parse_schedule(section) -> Schedule:
    t_final = _real(_require(section, 't_final', "schedule"), "schedule.t_final", minimum=0.0)
    dt = _real(_require(section, 'dt', "schedule"), "schedule.dt", minimum=0.0, strict=True)
    sample_every = section.get('sample_every', 1)
    if isinstance(sample_every, bool) or not isinstance(sample_every, int) or sample_every < 1:
        raise ConfigError("schedule.sample_every", f"expected a positive integer, got {sample_every!r}")
    return Schedule(t_final=t_final, dt=dt, sample_every=sample_every)


def _parse_projection(value, field: str, model: ModelSpec) -> ComplexMatrix:
    if isinstance(value, dict):
        if 'ket' in value:
            if not isinstance(value['ket'], list) or not value['ket']:
                raise ConfigError(f"{field}.ket", f"expected a non-empty list of amplitudes, got {value['ket']!r}")
            vector = np.array(
                [_number(a, f"{field}.ket[{i}]") for i, a in enumerate(value['ket'])], dtype=np.complex128
            )
            if vector.size != model.dim:
                raise ConfigError(f"{field}.ket", f"expected {model.dim} amplitudes, got {vector.size}")
            norm = np.linalg.norm(vector)
            if norm == 0:
                raise ConfigError(f"{field}.ket", "vector must be nonzero")
            vector = vector / norm
            return matcore.outer(vector, vector)
        if 'energy_level' in value:
            level = value['energy_level']
            if isinstance(level, bool) or not isinstance(level, int):
                raise ConfigError(f"{field}.energy_level", f"expected an integer, got {level!r}")
            try:
                return matcore.spectral_projection(model.hamiltonian, level)
            except CurrentLabError as e:
                raise ConfigError(f"{field}.energy_level", str(e)) from e
        raise ConfigError(field, "expected a matrix or one of 'ket', 'energy_level'")

    p = parse_matrix(value, field, model.dim)
    if not matcore.is_projection(p):
        raise ConfigError(field, "must be an orthogonal projection (P^2 = P, P^dag = P)")
    return p


def _parse_projections(section, model: ModelSpec) -> tuple[tuple[str, ComplexMatrix], ...]:
    if section is None:
        return ()
    if not isinstance(section, dict):
        raise ConfigError("projections", "expected an object of name -> matrix")
    return tuple(
        (name, _parse_projection(value, f"projections.{name}", model)) for name, value in section.items()
    )


def parse_config(data: dict) -> ScenarioConfig:
    """
    Validate a decoded JSON object into a ScenarioConfig.

    Raises:
        ConfigError: naming the first offending field
    """
    if not isinstance(data, dict):
        raise ConfigError("<root>", "expected a JSON object")

    name = data.get('name', 'scenario')
    if not isinstance(name, str):
        raise ConfigError("name", "expected a string")

    model = _parse_model(_require(data, 'model', ""))
    initial_state = _parse_initial_state(_require(data, 'initial_state', ""), model.dim)
    schedule = _parse_schedule(_require(data, 'schedule', ""))

    method = data.get('method', 'exact')
    if method not in METHODS:
        raise ConfigError("method", f"expected one of {METHODS}, got {method!r}")

    output = data.get('output')
    if output is not None and not isinstance(output, str):
        raise ConfigError("output", "expected a path string")

    return ScenarioConfig(
        name=name,
        model=model,
        initial_state=initial_state,
        schedule=schedule,
        method=method,
        projections=_parse_projections(data.get('projections'), model),
        output=output,
    )


def load_config(path) -> ScenarioConfig:
    """Read and validate a scenario file."""
    path = Path(path)
    try:
        with open(path, 'r', encoding='utf-8') as f:
            data = json.load(f)
    except FileNotFoundError as e:
        raise ConfigError("<file>", f"config not found: {path}") from e
    except json.JSONDecodeError as e:
        raise ConfigError("<file>", f"{path} is not valid JSON: {e}") from e
    config = parse_config(data)
    logger.info("loaded scenario %s from %s", config.name, path)
    return config


def with_overrides(
    config: ScenarioConfig,
    method: Optional[str] = None,
    dt: Optional[float] = None,
    t_final: Optional[float] = None,
    output: Optional[str] = None,
) -> ScenarioConfig:
    """Apply CLI flag overrides, re-validating the touched fields."""
    schedule = config.schedule
    if dt is not None:
        schedule = replace(schedule, dt=_real(dt, "--dt", minimum=0.0, strict=True))
    if t_final is not None:
        schedule = replace(schedule, t_final=_real(t_final, "--t-final", minimum=0.0))
    if method is not None and method not in METHODS:
        raise ConfigError("--method", f"expected one of {METHODS}, got {method!r}")
    return replace(
        config,
        schedule=schedule,
        method=method or config.method,
        output=output if output is not None else config.output,
    )


# ===== Canonical form =====

def to_dict(config: ScenarioConfig) -> dict:
    """Canonical object: builders and projection shorthands expanded, fixed key order."""
    if config.initial_state.kind == 'bloch':
        b = config.initial_state.value
        initial = {'bloch': [_clean(b.x), _clean(b.y), _clean(b.z)]}
    else:
        initial = {'density_matrix': encode_matrix(config.initial_state.value)}

    data = {
        'name': config.name,
        'model': {
            'dim': config.model.dim,
            'hamiltonian': encode_matrix(config.model.hamiltonian),
            'channels': [
                {'name': c.name, 'rate': _clean(c.rate), 'operator': encode_matrix(c.operator)}
                for c in config.model.channels
            ],
        },
        'initial_state': initial,
        'schedule': {
            't_final': _clean(config.schedule.t_final),
            'dt': _clean(config.schedule.dt),
            'sample_every': config.schedule.sample_every,
        },
        'method': config.method,
        'projections': {name: encode_matrix(p) for name, p in config.projections},
    }
    if config.output is not None:
        data['output'] = config.output
    return data


def serialize_config(config: ScenarioConfig) -> str:
    return json.dumps(to_dict(config), indent=2, ensure_ascii=False) + "\n"


def save_config(config: ScenarioConfig, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(serialize_config(config), encoding='utf-8')
    return path


# ===== Basis files =====

def load_basis(path) -> BasisChange:
    """
    Read a unitary basis change: {"unitary": [[...]]} with columns as the new
    basis vectors in computational components.
    """
    path = Path(path)
    try:
        with open(path, 'r', encoding='utf-8') as f:
            data = json.load(f)
    except FileNotFoundError as e:
        raise ConfigError("--basis", f"basis file not found: {path}") from e
    except json.JSONDecodeError as e:
        raise ConfigError("--basis", f"{path} is not valid JSON: {e}") from e
    u = parse_matrix(_require(data, 'unitary', ""), "unitary")
    try:
        return BasisChange(u)
    except CurrentLabError as e:
        raise ConfigError("unitary", str(e)) from e
