import pytest

from errors import (
    ConfigError,
    ConsistencyError,
    CurrentLabError,
    DomainError,
    ExpmError,
    ShapeError,
    StabilityError,
    ValidationError,
)


@pytest.mark.parametrize("error, code", [
    (ShapeError("x"), 1),
    (DomainError("x"), 1),
    (ConfigError("model.dim", "x"), 1),
    (StabilityError(3, "x"), 2),
    (ExpmError("x"), 2),
    (ConsistencyError("x", 1e-3), 2),
])
def test_exit_codes(error, code):
    assert isinstance(error, CurrentLabError)
    assert error.exit_code == code


def test_config_error_names_field():
    error = ConfigError("model.channels[1].rate", "must be >= 0")
    assert isinstance(error, ValidationError)
    assert error.field == "model.channels[1].rate"
    assert str(error) == "model.channels[1].rate: must be >= 0"


def test_stability_error_carries_step():
    error = StabilityError(17, "trace error too large")
    assert error.step == 17
    assert str(error) == "step 17: trace error too large"
