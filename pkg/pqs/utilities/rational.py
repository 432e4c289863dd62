# -*- coding: utf-8 -*-
"""PQS exact rational arithmetic utilities."""
import logging
import numbers
from fractions import Fraction

import numpy as np
import sympy

from pqs.exceptions import PQSTypeError, PQSValueError


logger = logging.getLogger(__name__)


def as_rational(value):
    """Convert a value to an exact sympy rational.

    Parameters
    ----------
    value : int | str | fractions.Fraction | sympy.Rational
        Value to convert. Strings may be of the form ``"p/q"`` or
        ``"p"``. Floats are rejected because they are not exact.

    Returns
    -------
    sympy.Rational
        Exact rational representation of the input.
    """
    if isinstance(value, sympy.Rational):
        return value
    if isinstance(value, (bool, float, complex)) or (
        isinstance(value, numbers.Number)
        and not isinstance(value, (numbers.Integral, Fraction))
    ):
        msg = (f"Cannot convert {value!r} of type {type(value)} to an "
               "exact rational; pass an int, a Fraction or a 'p/q' string")
        raise PQSTypeError(msg)
    if isinstance(value, Fraction):
        return sympy.Rational(value.numerator, value.denominator)
    try:
        out = sympy.Rational(value)
    except (TypeError, ValueError) as e:
        msg = f"Cannot convert {value!r} to an exact rational"
        raise PQSValueError(msg) from e
    return out


def as_rational_tuple(values):
    """Convert an iterable of values to a tuple of sympy rationals.

    Parameters
    ----------
    values : iterable
        Values accepted by :func:`as_rational`.

    Returns
    -------
    tuple of sympy.Rational
    """
    return tuple(as_rational(v) for v in values)


def rational_to_str(value):
    """Serialize a rational as ``"p/q"`` (or ``"p"`` for integers).

    Parameters
    ----------
    value : sympy.Rational | int
        Rational to serialize.

    Returns
    -------
    str
    """
    return str(as_rational(value))


def rational_array(values, shape=None):
    """Build a numpy object array of exact rationals.

    Parameters
    ----------
    values : array-like
        Nested lists (or scalars) of values accepted by
        :func:`as_rational`.
    shape : tuple of int, optional
        Target shape. If given, the flattened values are reshaped.
        By default, ``None``, which keeps the nesting of `values`.

    Returns
    -------
    np.ndarray
        Read-only array with ``dtype=object`` holding sympy rationals.
    """
    arr = np.array(values, dtype=object)
    flat = [as_rational(v) for v in arr.reshape(-1)]
    out = np.empty(len(flat), dtype=object)
    out[:] = flat
    out = out.reshape(arr.shape if shape is None else shape)
    out.flags.writeable = False
    return out


def array_to_nested(array):
    """Serialize an object array of rationals into nested lists of str.

    Parameters
    ----------
    array : np.ndarray
        Object array holding sympy rationals.

    Returns
    -------
    str | list
        ``"p/q"`` strings in the nesting of the array.
    """
    array = np.asarray(array, dtype=object)
    if array.ndim == 0:
        return rational_to_str(array[()])
    return [array_to_nested(sub) for sub in array]


def exact_matrix(rows, n_cols=None):
    """Build an immutable sympy matrix from rows of rationals.

    Parameters
    ----------
    rows : list of sequence
        Matrix rows.
    n_cols : int, optional
        Number of columns, only needed when `rows` is empty.
        By default, ``None``.

    Returns
    -------
    sympy.ImmutableMatrix
    """
    rows = [[as_rational(v) for v in row] for row in rows]
    if not rows:
        return sympy.ImmutableMatrix.zeros(0, n_cols or 0)
    return sympy.ImmutableMatrix(rows)


def exact_rank(matrix):
    """Exact rank of a rational matrix (0 for empty matrices)."""
    if 0 in matrix.shape:
        return 0
    return sympy.Matrix(matrix).rank(iszerofunc=lambda x: x == 0)


def exact_det(matrix):
    """Exact determinant of a square rational matrix.

    Uses the fraction-free Bareiss algorithm.
    """
    if matrix.shape[0] != matrix.shape[1]:
        msg = f"Determinant needs a square matrix, got shape {matrix.shape}"
        raise PQSValueError(msg)
    if matrix.shape[0] == 0:
        return sympy.Integer(1)
    return sympy.Matrix(matrix).det(method="bareiss")


def reduce_rows(matrix):
    """Reduced row echelon form with the row-operation bookkeeping.

    Elimination is fraction-free until the final normalization of the
    pivots; the pivot of each column is the first non-zero entry, so
    pivots land on the leftmost (lowest point id) columns first.

    Parameters
    ----------
    matrix : sympy.Matrix
        ``M x N`` rational matrix of full row rank ``M``.

    Returns
    -------
    reduced : sympy.ImmutableMatrix
        Reduced row echelon form ``R = E * matrix``.
    basis_change : sympy.ImmutableMatrix
        Invertible ``M x M`` matrix ``E`` of accumulated row operations.
    pivots : tuple of int
        Pivot columns of ``R`` (in increasing order).
    """
    n_rows, n_cols = matrix.shape
    augmented = sympy.Matrix(matrix).row_join(sympy.eye(n_rows))
    rref, pivots = augmented.rref(iszerofunc=lambda x: x == 0,
                                  normalize_last=True)
    pivots = tuple(p for p in pivots if p < n_cols)
    if len(pivots) != n_rows:
        msg = (f"Row reduction needs full row rank {n_rows}, got rank "
               f"{len(pivots)}")
        raise PQSValueError(msg)
    reduced = sympy.ImmutableMatrix(rref[:, :n_cols])
    basis_change = sympy.ImmutableMatrix(rref[:, n_cols:])
    return reduced, basis_change, pivots


def independent_rows(matrix):
    """Indices of a maximal set of linearly independent rows.

    Rows are scanned in order and kept if they raise the rank, so the
    result is deterministic and favors early rows.

    Parameters
    ----------
    matrix : sympy.Matrix
        Rational matrix.

    Returns
    -------
    tuple of int
    """
    if 0 in matrix.shape:
        return ()
    _, pivots = sympy.Matrix(matrix).T.rref(iszerofunc=lambda x: x == 0)
    return tuple(pivots)
