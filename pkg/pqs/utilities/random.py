# -*- coding: utf-8 -*-
"""PQS seeded random generators.

All randomness in PQS flows through a single
:class:`numpy.random.Generator` created by :func:`make_rng`, so a seed
fully determines every generated object.
"""
import logging

import numpy as np
import sympy
from scipy.stats import unitary_group


logger = logging.getLogger(__name__)

DEFAULT_SEED = 8675309
"""Seed used when neither the scenario nor the caller provides one."""


def make_rng(seed=None):
    """Create the seeded random generator.

    Parameters
    ----------
    seed : int, optional
        64-bit seed. By default, ``None``, which uses
        :obj:`DEFAULT_SEED`.

    Returns
    -------
    np.random.Generator
    """
    seed = DEFAULT_SEED if seed is None else int(seed)
    logger.debug("Initializing random generator with seed %d", seed)
    return np.random.default_rng(seed)


def random_rational(rng, max_num=5, max_den=4, nonzero=False):
    """Draw a random small rational ``p/q``.

    Parameters
    ----------
    rng : np.random.Generator
        Random generator.
    max_num : int, optional
        Numerators are drawn from ``[-max_num, max_num]``.
        By default, ``5``.
    max_den : int, optional
        Denominators are drawn from ``[1, max_den]``. By default, ``4``.
    nonzero : bool, optional
        Redraw until the value is non-zero. By default, ``False``.

    Returns
    -------
    sympy.Rational
    """
    while True:
        num = int(rng.integers(-max_num, max_num + 1))
        den = int(rng.integers(1, max_den + 1))
        if num or not nonzero:
            return sympy.Rational(num, den)


def random_rationals(rng, count, **kwargs):
    """Draw a tuple of random rationals (see :func:`random_rational`)."""
    return tuple(random_rational(rng, **kwargs) for _ in range(count))


def random_invertible_matrix(rng, dim, **kwargs):
    """Draw a random invertible rational matrix.

    Parameters
    ----------
    rng : np.random.Generator
        Random generator.
    dim : int
        Matrix size.
    **kwargs
        Keyword arguments passed to :func:`random_rational`.

    Returns
    -------
    sympy.ImmutableMatrix
        Matrix with non-zero exact determinant.
    """
    while True:
        matrix = sympy.ImmutableMatrix(
            dim, dim, list(random_rationals(rng, dim * dim, **kwargs)))
        if matrix.det(method="bareiss") != 0:
            return matrix


def random_unitary(rng, dim, exact=False):
    """Draw a random unitary matrix.

    Parameters
    ----------
    rng : np.random.Generator
        Random generator.
    dim : int
        Matrix size.
    exact : bool, optional
        If ``True``, draw a signed permutation matrix so that all
        products are bit-exact. By default, ``False``, which draws a
        Haar-random unitary.

    Returns
    -------
    np.ndarray
        Complex ``dim x dim`` unitary.
    """
    if dim == 1 and exact:
        return np.ones((1, 1), dtype=complex)
    if exact:
        perm = rng.permutation(dim)
        signs = rng.choice([-1.0, 1.0], size=dim)
        out = np.zeros((dim, dim), dtype=complex)
        out[perm, np.arange(dim)] = signs
        return out
    if dim == 1:
        return np.exp(2j * np.pi * rng.random()) * np.ones((1, 1))
    return unitary_group.rvs(dim, random_state=rng)


def random_density_matrix(rng, dim):
    """Draw a random full-rank density matrix (Ginibre ensemble).

    Parameters
    ----------
    rng : np.random.Generator
        Random generator.
    dim : int
        Hilbert space dimension.

    Returns
    -------
    np.ndarray
        Hermitian positive definite matrix with unit trace.
    """
    ginibre = (rng.standard_normal((dim, dim))
               + 1j * rng.standard_normal((dim, dim)))
    rho = ginibre @ ginibre.conj().T
    return rho / np.trace(rho).real


def random_vector(rng, dim):
    """Draw a random normalized complex vector."""
    vec = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return vec / np.linalg.norm(vec)
