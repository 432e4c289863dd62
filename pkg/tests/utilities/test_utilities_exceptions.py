# -*- coding: utf-8 -*-
"""Test PQS exception types."""
from pathlib import Path

import pytest

from pqs.exceptions import (
    PQSError,
    PQSValueError,
    PQSTypeError,
    PQSKeyError,
    PQSDegenerateBasisError,
    PQSSortMismatchError,
    PQSMissingSampleError,
    PQSNotExpressibleError,
    PQSDegenerateSystemError,
    PQSStructureError,
    PQSScenarioError,
)


BASIC_ERROR_MESSAGE = "An error message"


def test_exceptions_log_error(caplog, assert_message_was_logged):
    """Test that a raised exception logs message, if any."""

    try:
        raise PQSError
    except PQSError:
        pass

    assert not caplog.records

    try:
        raise PQSError(BASIC_ERROR_MESSAGE)
    except PQSError:
        pass

    assert_message_was_logged(BASIC_ERROR_MESSAGE, "ERROR")


def test_exceptions_log_uncaught_error(assert_message_was_logged):
    """Test that a raised exception logs message if uncaught."""

    with pytest.raises(PQSError):
        raise PQSError(BASIC_ERROR_MESSAGE)

    assert_message_was_logged(BASIC_ERROR_MESSAGE, "ERROR")


@pytest.mark.parametrize(
    "raise_type, catch_types",
    [
        (PQSValueError, [PQSError, ValueError, PQSValueError]),
        (PQSTypeError, [PQSError, TypeError, PQSTypeError]),
        (PQSKeyError, [PQSError, KeyError, PQSKeyError]),
        (
            PQSDegenerateBasisError,
            [PQSError, ValueError, PQSValueError, PQSDegenerateBasisError],
        ),
        (
            PQSSortMismatchError,
            [PQSError, TypeError, PQSTypeError, PQSSortMismatchError],
        ),
        (
            PQSMissingSampleError,
            [PQSError, KeyError, PQSKeyError, PQSMissingSampleError],
        ),
        (
            PQSNotExpressibleError,
            [PQSError, ValueError, PQSNotExpressibleError],
        ),
        (
            PQSDegenerateSystemError,
            [PQSError, ValueError, PQSDegenerateSystemError],
        ),
        (PQSStructureError, [PQSError, ValueError, PQSStructureError]),
    ],
)
def test_catching_error_by_type(
    raise_type, catch_types, assert_message_was_logged
):
    """Test that PQS exceptions are caught correctly."""
    for catch_type in catch_types:
        with pytest.raises(catch_type) as exc_info:
            raise raise_type(BASIC_ERROR_MESSAGE)

        assert BASIC_ERROR_MESSAGE in str(exc_info.value)
        assert_message_was_logged(BASIC_ERROR_MESSAGE, "ERROR")


def test_scenario_error_location():
    """Test that scenario errors report where the problem is."""
    with pytest.raises(PQSScenarioError) as exc_info:
        raise PQSScenarioError(BASIC_ERROR_MESSAGE, "$.frames[0]")

    assert exc_info.value.location == "$.frames[0]"
    assert "(at $.frames[0])" in str(exc_info.value)

    with pytest.raises(ValueError) as exc_info:
        raise PQSScenarioError(BASIC_ERROR_MESSAGE)

    assert exc_info.value.location is None
    assert str(exc_info.value) == BASIC_ERROR_MESSAGE


if __name__ == "__main__":
    pytest.main(["-q", "--show-capture=all", Path(__file__), "-rapP"])
