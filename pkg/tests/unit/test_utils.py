"""Unit tests for validators and the error-to-exit-code mapping."""

import logging
import math

import numpy as np
import pytest

from dipolar.utils.exceptions import (
    EXIT_FAILURE,
    EXIT_USAGE,
    ConfigurationError,
    FlowAbortedError,
    GeometryError,
    ResolutionError,
    ValidationError,
    VerificationError,
    handle_cli_error,
)
from dipolar.utils.validators import (
    parse_range,
    validate_grid,
    validate_interval,
    validate_node_count,
    validate_positive,
    validate_radii,
)


@pytest.mark.unit
class TestValidators:
    def test_validate_positive(self):
        assert validate_positive("2.5", "x") == 2.5
        assert validate_positive(0, "x", allow_zero=True) == 0.0
        for bad in (0, -1, math.nan, math.inf, "abc", None):
            with pytest.raises(ValidationError):
                validate_positive(bad, "x")

    def test_validate_interval(self):
        assert validate_interval(0.5, "t", 0.0, 1.0) == 0.5
        assert validate_interval(0.0, "t", 0.0, 1.0, closed_low=True) == 0.0
        with pytest.raises(ValidationError, match=r"\(0.0, 1.0\)"):
            validate_interval(1.0, "t", 0.0, 1.0)

    def test_validate_radii(self):
        np.testing.assert_array_equal(validate_radii([1.0, 2.0]), [1.0, 2.0])
        with pytest.raises(ValidationError, match="coincident"):
            validate_radii([1.0, 0.0])

    @pytest.mark.parametrize("bad", [15, 16.0, True, "32"])
    def test_validate_node_count(self, bad):
        assert validate_node_count(np.int64(32)) == 32
        with pytest.raises(ValidationError):
            validate_node_count(bad)

    def test_validate_grid(self):
        assert validate_grid(["0.3", 1], "ell") == [0.3, 1.0]
        with pytest.raises(ValidationError):
            validate_grid([0.3, 0.0], "ell")


@pytest.mark.unit
class TestParseRange:
    def test_inclusive_stop(self):
        values = parse_range("0.275:0.3:0.005")
        assert values == [0.275, 0.28, 0.285, 0.29, 0.295, 0.3]

    def test_comma_list(self):
        assert parse_range("0.28, 0.3,") == [0.28, 0.3]

    def test_empty(self):
        assert parse_range("") == []

    @pytest.mark.parametrize("text", ["1:2", "2:1:0.1", "0:1:0", "a,b"])
    def test_invalid(self, text):
        with pytest.raises(ValidationError):
            parse_range(text)


@pytest.mark.unit
class TestHandleCliError:
    @pytest.mark.parametrize("error, code", [
        (ConfigurationError("bad file"), EXIT_USAGE),
        (ValidationError("bad input"), EXIT_FAILURE),
        (GeometryError("crossing"), EXIT_FAILURE),
        (ResolutionError("coarse", hint="refine"), EXIT_FAILURE),
        (FlowAbortedError("stuck"), EXIT_FAILURE),
        (RuntimeError("boom"), EXIT_FAILURE),
        (SystemExit(2), 2),
        (SystemExit(None), 0),
    ])
    def test_exit_codes(self, error, code):
        assert handle_cli_error(error) == code

    def test_verification_failures_are_logged(self, caplog):
        error = VerificationError("1 of 2 checks failed", ["phase: DISK"])
        with caplog.at_level(logging.ERROR):
            assert handle_cli_error(error) == EXIT_FAILURE
        assert "phase: DISK" in caplog.text

    def test_resolution_hint_in_message(self):
        error = ResolutionError("grid too coarse", hint="use h <= delta/4")
        assert "hint: use h <= delta/4" in str(error)
        assert isinstance(error, GeometryError)
