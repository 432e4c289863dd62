# -*- coding: utf-8 -*-
"""Fixtures for use across all tests."""
import pytest

from pqs.geometry import (Point, TangentVector, Covector, OneForm,
                          VectorField, TensorSort, DiscreteMeasure)
from pqs.dof import MomentumDof
from pqs.utilities.random import make_rng


LOGGING_META_FILES = {"exceptions.py"}


@pytest.fixture
def assert_message_was_logged(caplog):
    """Assert that a particular (partial) message was logged."""
    caplog.clear()

    def assert_message(msg, log_level=None, clear_records=False):
        """Assert that a message was logged."""
        assert caplog.records

        for record in caplog.records:
            if msg in record.message:
                break
        else:
            raise AssertionError(f"{msg!r} not found in log records")

        # record guaranteed to be defined b/c of "assert caplog.records"
        # pylint: disable=undefined-loop-variable
        if log_level:
            assert record.levelname == log_level
        assert record.filename not in LOGGING_META_FILES
        assert record.funcName != "__init__"
        assert "pqs" in record.name

        if clear_records:
            caplog.clear()

    return assert_message


@pytest.fixture
def rng():
    """Seeded random generator"""
    return make_rng(42)


@pytest.fixture
def point():
    """Point at the origin of a 3D chart"""
    return Point("y", (0, 0, 0))


@pytest.fixture
def points():
    """Small pool of points in a 3D chart"""
    return [Point("y1", (0, 0, 0)), Point("y2", (1, 0, 0)),
            Point("y3", (0, 1, 0)), Point("y4", (0, 0, 1))]


@pytest.fixture
def metric_sort():
    """Symmetric (0, 2) sort"""
    return TensorSort("q", 0, 2, symmetric=((0, 1),))


@pytest.fixture
def scalar_sort():
    """Scalar sort"""
    return TensorSort("s")


@pytest.fixture
def vector_sort():
    """Contravariant (1, 0) sort"""
    return TensorSort("v", 1, 0)


@pytest.fixture
def two_form_sort():
    """Antisymmetric (0, 2) sort"""
    return TensorSort("F", 0, 2, antisymmetric=((0, 1),))


@pytest.fixture
def phi_t1t2(point, metric_sort):
    """Momentum d.o.f. with forms theta^1 and theta^2 at a single point"""
    forms = [OneForm([Covector(point, (1, 0, 0))]),
             OneForm([Covector(point, (0, 1, 0))])]
    return MomentumDof(metric_sort, forms, DiscreteMeasure.uniform([point]))


@pytest.fixture
def vector_phi(point, vector_sort):
    """Momentum d.o.f. of a contravariant sort with form e_1"""
    forms = [VectorField([TangentVector(point, (1, 0, 0))])]
    return MomentumDof(vector_sort, forms, DiscreteMeasure.uniform([point]))


def pytest_configure(config):
    """Register custom markers."""
    config.addinivalue_line("markers",
                            "slow: randomized runs over many instances")
