import copy
import json

import numpy as np
import pytest

import matcore
from errors import ConfigError
from scenario_config import (
    load_basis,
    load_config,
    parse_config,
    save_config,
    serialize_config,
    to_dict,
    with_overrides,
)

R = 1 / np.sqrt(2)


def explicit_scenario() -> dict:
    return {
        "name": "explicit",
        "model": {
            "dim": 2,
            "hamiltonian": [[[-0.5, 0], [0, 0]], [[0, 0], [0.5, 0]]],
            "channels": [
                {"name": "down", "rate": 0.3, "operator": [[0, 1], [0, 0]]},
                {"name": "up", "rate": 0.1, "operator": [[0, 0], [1, 0]]},
            ],
        },
        "initial_state": {"density_matrix": [[0, 0], [0, 1]]},
        "schedule": {"t_final": 2.0, "dt": 0.01, "sample_every": 10},
        "method": "exact",
        "projections": {"ground": [[1, 0], [0, 0]]},
    }


class TestBundledScenarios:
    def test_two_level(self, two_level_path):
        config = load_config(two_level_path)
        assert config.name == "two_level"
        assert config.method == "rk4"
        assert [c.name for c in config.model.channels] == ["radiative", "excitation", "dephasing"]
        assert [c.rate for c in config.model.channels] == [0.3, 0.1, 0.05]
        np.testing.assert_array_equal(config.model.hamiltonian, np.diag([-0.5, 0.5]))
        np.testing.assert_array_equal(config.initial_state.density(), matcore.projector(2, 1))
        names = [name for name, _ in config.projections]
        assert names == ["ground", "excited"]
        np.testing.assert_array_equal(config.projections[0][1], matcore.projector(2, 0))

    def test_three_level_energy_projection(self, three_level_path):
        config = load_config(three_level_path)
        projections = dict(config.projections)
        expected = 0.5 * np.array([[0, 0, 0], [0, 1, -1], [0, -1, 1]])
        np.testing.assert_allclose(projections["P1"], expected, atol=1e-12)

    def test_energy_basis_file(self, energy_basis_path):
        basis = load_basis(energy_basis_path)
        assert basis.dim == 3
        np.testing.assert_allclose(basis.unitary[:, 1], [0, R, -R])

    def test_build_model(self, two_level_path):
        model = load_config(two_level_path).build_model()
        assert model.dim == 2
        assert model.channels[0].label(0) == "radiative"


class TestCanonicalForm:
    def test_builder_is_expanded(self, two_level_path):
        data = to_dict(load_config(two_level_path))
        assert "builder" not in data["model"]
        assert data["model"]["dim"] == 2
        assert data["projections"]["ground"] == [[[1.0, 0.0], [0.0, 0.0]], [[0.0, 0.0], [0.0, 0.0]]]

    @pytest.mark.parametrize("source", ["two_level_path", "three_level_path"])
    def test_round_trip_is_idempotent(self, request, source):
        first = serialize_config(load_config(request.getfixturevalue(source)))
        second = serialize_config(parse_config(json.loads(first)))
        assert first == second

    def test_save_and_reload(self, tmp_path):
        config = parse_config(explicit_scenario())
        path = save_config(config, tmp_path / "saved.json")
        assert serialize_config(load_config(path)) == serialize_config(config)


class TestValidation:
    def test_negative_rate_names_field(self):
        data = explicit_scenario()
        data["model"]["channels"][1]["rate"] = -0.1
        with pytest.raises(ConfigError) as info:
            parse_config(data)
        assert info.value.field == "model.channels[1].rate"

    def test_non_hermitian_hamiltonian(self):
        data = explicit_scenario()
        data["model"]["hamiltonian"][0][1] = [1, 0]
        with pytest.raises(ConfigError) as info:
            parse_config(data)
        assert info.value.field == "model.hamiltonian"

    def test_wrong_shape(self):
        data = explicit_scenario()
        data["model"]["channels"][0]["operator"] = [[0, 1, 0], [0, 0, 0], [0, 0, 0]]
        with pytest.raises(ConfigError) as info:
            parse_config(data)
        assert info.value.field == "model.channels[0].operator"

    def test_missing_schedule(self):
        data = explicit_scenario()
        del data["schedule"]
        with pytest.raises(ConfigError) as info:
            parse_config(data)
        assert info.value.field == "schedule"

    def test_missing_builder_argument(self):
        data = explicit_scenario()
        data["model"] = {"builder": "two_level", "eps": 1.0, "mu": 0.3, "lambda": 0.1}
        with pytest.raises(ConfigError) as info:
            parse_config(data)
        assert info.value.field == "model.delta"

    @pytest.mark.parametrize("field, value", [
        ("method", "euler"),
        ("schedule", {"t_final": 1.0, "dt": 0.0}),
        ("schedule", {"t_final": 1.0, "dt": 0.1, "sample_every": 0}),
        ("initial_state", {"density_matrix": [[1, 0], [0, 1]]}),
        ("initial_state", {"bloch": [1, 1, 0]}),
        ("projections", {"half": [[0.5, 0], [0, 0.5]]}),
        ("projections", {"ground": {"ket": 5}}),
        ("projections", {"ground": {"ket": None}}),
    ])
    def test_rejected_values(self, field, value):
        data = explicit_scenario()
        data[field] = value
        with pytest.raises(ConfigError):
            parse_config(data)

    @pytest.mark.parametrize("ket", [5, None, []])
    def test_malformed_ket_names_field(self, ket):
        data = explicit_scenario()
        data["projections"] = {"ground": {"ket": ket}}
        with pytest.raises(ConfigError) as info:
            parse_config(data)
        assert info.value.field == "projections.ground.ket"

    def test_duplicate_channel_names(self):
        data = explicit_scenario()
        data["model"]["channels"][1]["name"] = "down"
        with pytest.raises(ConfigError, match="unique"):
            parse_config(data)

    def test_bloch_needs_qubit(self, three_level_path):
        data = json.loads(three_level_path.read_text(encoding="utf-8"))
        data["initial_state"] = {"bloch": [0, 0, 1]}
        with pytest.raises(ConfigError) as info:
            parse_config(data)
        assert info.value.field == "initial_state.bloch"

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigError):
            load_config(tmp_path / "absent.json")

    def test_invalid_json(self, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text("{", encoding="utf-8")
        with pytest.raises(ConfigError):
            load_config(path)

    def test_non_unitary_basis(self, tmp_path):
        path = tmp_path / "basis.json"
        path.write_text(json.dumps({"unitary": [[1, 0], [0, 2]]}), encoding="utf-8")
        with pytest.raises(ConfigError):
            load_basis(path)


class TestOverrides:
    def test_flags_override_config(self):
        config = parse_config(explicit_scenario())
        changed = with_overrides(config, method="rk4", dt=0.02, t_final=4.0, output="out.csv")
        assert (changed.method, changed.schedule.dt, changed.schedule.t_final, changed.output) == ("rk4", 0.02, 4.0, "out.csv")
        assert changed.schedule.sample_every == 10

    def test_untouched_fields_kept(self):
        config = parse_config(explicit_scenario())
        assert with_overrides(config).schedule == config.schedule

    def test_bad_override(self):
        config = parse_config(copy.deepcopy(explicit_scenario()))
        with pytest.raises(ConfigError) as info:
            with_overrides(config, dt=-1.0)
        assert info.value.field == "--dt"
