# -*- coding: utf-8 -*-
"""Custom Exceptions and Errors for PQS. """
import logging


logger = logging.getLogger("pqs")


class PQSError(Exception):
    """Generic PQS Error."""

    def __init__(self, *args, **kwargs):
        """Init exception and broadcast message to logger."""
        super().__init__(*args, **kwargs)
        if args:
            logger.error(str(args[0]), stacklevel=2)


class PQSValueError(PQSError, ValueError):
    """PQS ValueError."""


class PQSTypeError(PQSError, TypeError):
    """PQS TypeError."""


class PQSKeyError(PQSError, KeyError):
    """PQS KeyError."""


class PQSDegenerateBasisError(PQSValueError):
    """A list of tangent vectors is not a basis of the tangent space."""


class PQSSortMismatchError(PQSTypeError):
    """Objects of different tensor sorts (or wrong arity) were combined."""


class PQSMissingSampleError(PQSKeyError):
    """A field was evaluated at a point where it carries no sample."""


class PQSNotExpressibleError(PQSValueError):
    """A d.o.f. is not a linear combination of the d.o.f. of a frame."""


class PQSDegenerateSystemError(PQSValueError):
    """An operator space and a d.o.f. set do not form a non-degenerate
    pair."""


class PQSStructureError(PQSValueError):
    """Structural mismatch: dimension products, non-directed index sets or
    non-monotone slot assignments."""


class PQSScenarioError(PQSValueError):
    """Malformed scenario file."""

    def __init__(self, msg, location=None):
        """
        Parameters
        ----------
        msg : str
            Error message.
        location : str, optional
            JSON-path like location of the offending entry,
            e.g. ``"$.frames[0].entries[1].point"``. By default, ``None``.
        """
        self.location = location
        if location is not None:
            msg = f"{msg} (at {location})"
        super().__init__(msg)
