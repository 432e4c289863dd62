# -*- coding: utf-8 -*-
"""PQS geometry tests"""
from pathlib import Path

import numpy as np
import hypothesis
import hypothesis.strategies as strat
import pytest
import sympy

from pqs.exceptions import (PQSValueError, PQSTypeError, PQSKeyError,
                            PQSDegenerateBasisError, PQSSortMismatchError,
                            PQSMissingSampleError)
from pqs.geometry import (Point, TangentVector, Covector, OneForm,
                          VectorField, ScalarFunction, TensorSort,
                          DiscreteMeasure, ConfigField, MomentumField,
                          evaluate_tensor, standard_basis, dual_basis,
                          integrate_density, fresh_points, contract, outer)
from pqs.utilities.rational import rational_array


def test_point_coordinates_are_exact():
    """Test that point coordinates are stored as rationals"""
    point = Point("a", ("1/2", 0, 3))
    assert point.dim == 3
    assert point.coords[0] == sympy.Rational(1, 2)
    assert Point.from_dict(point.to_dict()) == point

    with pytest.raises(PQSValueError):
        Point("empty", ())


def test_vectors_and_covectors(point):
    """Test vector arithmetic and covector evaluation"""
    v = TangentVector(point, (1, 2, 0))
    w = TangentVector(point, (0, 1, "1/2"))
    theta = Covector(point, (1, 1, 2))

    assert (v + w).components == (1, 3, sympy.Rational(1, 2))
    assert (2 * v - w).components == (2, 3, sympy.Rational(-1, 2))
    assert (-v).components == (-1, -2, 0)
    assert theta(v + w) == theta(v) + theta(w) == 5
    assert TangentVector.zero(point).is_zero

    other = Point("z", (1, 1, 1))
    with pytest.raises(PQSTypeError):
        theta(TangentVector(other, (1, 0, 0)))
    with pytest.raises(PQSTypeError):
        v + theta
    with pytest.raises(PQSValueError):
        TangentVector(point, (1, 2))


def test_finite_sections(points):
    """Test supports of finitely supported sections"""
    y1, y2, y3, _ = points
    form = OneForm([Covector(y1, (1, 0, 0)), Covector(y2, (0, 0, 0))])
    assert form.support == frozenset({"y1"})
    assert form.at(y3).is_zero
    assert form.at(y1).components == (1, 0, 0)

    field = VectorField([TangentVector(y3, (0, 2, 0))])
    assert field.points == [y3]

    func = ScalarFunction([(y1, "1/3"), (y2, 0)])
    assert func.value(y1) == sympy.Rational(1, 3)
    assert func.value(y2) == 0
    assert func.support == frozenset({"y1"})

    with pytest.raises(PQSValueError):
        OneForm([Covector(y1, (0, 0, 0))])
    with pytest.raises(PQSValueError):
        OneForm([Covector(y1, (1, 0, 0)), Covector(y1, (0, 1, 0))])
    with pytest.raises(PQSTypeError):
        OneForm([TangentVector(y1, (1, 0, 0))])


def test_sort_validation():
    """Test that malformed symmetry declarations are rejected"""
    with pytest.raises(PQSValueError):
        TensorSort("bad", 0, 2, symmetric=((0, 2),))
    with pytest.raises(PQSValueError):
        TensorSort("mixed", 1, 1, symmetric=((0, 1),))
    with pytest.raises(PQSValueError):
        TensorSort("overlap", 0, 3, symmetric=((0, 1),),
                   antisymmetric=((1, 2),))
    with pytest.raises(PQSValueError):
        TensorSort("single", 0, 1, symmetric=((0,),))


@pytest.mark.parametrize(
    "sort, dim, n_canonical",
    [(TensorSort("s"), 3, 1),
     (TensorSort("v", 1, 0), 3, 3),
     (TensorSort("T", 1, 1), 2, 4),
     (TensorSort("q", 0, 2, symmetric=((0, 1),)), 3, 6),
     (TensorSort("F", 0, 2, antisymmetric=((0, 1),)), 3, 3),
     (TensorSort("E", 0, 3, antisymmetric=((0, 1, 2),)), 3, 1)])
def test_canonical_indices(sort, dim, n_canonical):
    """Test the number of independent components per sort"""
    assert len(sort.canonical_indices(dim)) == n_canonical
    orbits = sort.orbits(dim)
    assert len(orbits) == n_canonical
    total = sum(len(orbit) for orbit in orbits.values())
    assert total <= dim ** sort.rank


def test_symmetry_group(metric_sort, two_form_sort):
    """Test group elements and characters"""
    assert metric_sort.group_order == 2
    assert sorted(metric_sort.symmetry_group) == [((0, 1), 1), ((1, 0), 1)]
    assert sorted(two_form_sort.symmetry_group) == [((0, 1), 1),
                                                    ((1, 0), -1)]
    assert two_form_sort.canonical_index((1, 0)) == ((0, 1), -1)
    assert two_form_sort.canonical_index((1, 1)) == ((1, 1), 0)
    assert metric_sort.canonical_index((2, 0)) == ((0, 2), 1)


def test_project_and_symmetry(metric_sort, two_form_sort):
    """Test projection onto the declared symmetry type"""
    array = np.array([[sympy.Integer(1), sympy.Integer(2)],
                      [sympy.Integer(0), sympy.Integer(3)]], dtype=object)
    sym = metric_sort.project(array)
    assert sym[0, 1] == sym[1, 0] == 1
    assert metric_sort.satisfies_symmetry(sym)
    assert not metric_sort.satisfies_symmetry(array)

    anti = two_form_sort.project(array)
    assert anti[0, 1] == 1
    assert anti[1, 0] == -1
    assert anti[0, 0] == anti[1, 1] == 0


@hypothesis.settings(max_examples=25, deadline=None)
@hypothesis.given(
    strat.sampled_from([
        TensorSort("q", 0, 2, symmetric=((0, 1),)),
        TensorSort("F", 0, 2, antisymmetric=((0, 1),)),
        TensorSort("c", 0, 3, symmetric=((0, 1, 2),)),
        TensorSort("R", 0, 3, antisymmetric=((1, 2),))]),
    strat.lists(strat.fractions(max_denominator=20), min_size=27,
                max_size=27))
def test_projection_is_idempotent(sort, values):
    """Test that projecting twice changes nothing"""
    array = rational_array(values[:3 ** sort.rank], shape=(3,) * sort.rank)
    once = sort.project(array)
    assert sort.satisfies_symmetry(once)
    assert np.array_equal(sort.project(once), once)


def test_sort_round_trip(two_form_sort):
    """Test sort serialization"""
    assert TensorSort.from_dict(two_form_sort.to_dict()) == two_form_sort


def test_discrete_measure(points):
    """Test measure weights and extension"""
    y1, y2, y3, _ = points
    measure = DiscreteMeasure({y1: "1/2", "y2": 3})
    assert measure.weight(y1) == sympy.Rational(1, 2)
    assert measure.weight("y2") == 3
    assert measure.domain == frozenset({"y1", "y2"})
    with pytest.raises(PQSKeyError):
        measure.weight(y3)

    extended = measure.extended([y2, y3])
    assert extended.weight(y2) == 3
    assert extended.weight(y3) == 1
    assert integrate_density({y1: 4, y2: 1}, measure) == 5

    with pytest.raises(PQSValueError):
        DiscreteMeasure({y1: 0})


def test_sampled_fields(point, metric_sort):
    """Test sampled field validation and evaluation"""
    q = ConfigField(metric_sort, {point: [[1, 2, 0], [2, 0, 0], [0, 0, 5]]})
    e1, e2, e3 = standard_basis(point)
    assert evaluate_tensor(q, point, [e1, e2]) == 2
    assert evaluate_tensor(q, point, [e3, e3]) == 5
    assert evaluate_tensor(q, point, [e1 + e2, e2]) == 2
    assert q.has_sample(point)
    assert q.to_dict()["samples"]["y"][0] == ["1", "2", "0"]

    with pytest.raises(PQSValueError):
        ConfigField(metric_sort, {point: [[0, 1, 0], [0, 0, 0], [0, 0, 0]]})
    with pytest.raises(PQSValueError):
        ConfigField(metric_sort, {point: [[1, 0], [0, 1]]})
    with pytest.raises(PQSMissingSampleError):
        q.sample("elsewhere")
    with pytest.raises(PQSSortMismatchError):
        evaluate_tensor(q, point, [e1])
    with pytest.raises(PQSSortMismatchError):
        evaluate_tensor(q, point, [Covector(point, (1, 0, 0)), e2])

    zero = MomentumField.zero(metric_sort, [point])
    assert all(v == 0 for v in zero.sample(point).reshape(-1))
    assert MomentumField.WEIGHT == 1


def test_contract_and_outer():
    """Test full contraction against outer products"""
    array = outer([(1, 2), (3, 4)], 2)
    assert array[1, 0] == 6
    assert contract(array, [(1, 0), (0, 1)]) == 4
    assert contract(outer([], 2), []) == 1


def test_dual_basis(point):
    """Test exact duality of the dual basis"""
    basis = [TangentVector(point, (1, 1, 0)),
             TangentVector(point, (0, 1, 0)),
             TangentVector(point, (0, "1/2", 2))]
    dual = dual_basis(basis)
    for i, theta in enumerate(dual):
        for j, vec in enumerate(basis):
            assert theta(vec) == (1 if i == j else 0)

    with pytest.raises(PQSDegenerateBasisError):
        dual_basis(basis[:2])
    with pytest.raises(PQSDegenerateBasisError):
        dual_basis([basis[0], basis[0], basis[2]])
    with pytest.raises(PQSDegenerateBasisError):
        dual_basis([])


def test_fresh_points(points):
    """Test that fresh points avoid taken ids and coordinates"""
    taken = points + [Point("fresh1", (5, 5, 5)), Point("x", (-2, 4, -8))]
    fresh = fresh_points(taken, 3, 2)
    assert [p.id for p in fresh] == ["fresh3", "fresh4"]
    assert fresh[0].coords == (-3, 9, -27)
    assert fresh_points([], 2, 1)[0] == Point("fresh1", (-1, 1))


if __name__ == "__main__":
    pytest.main(["-q", "--show-capture=all", Path(__file__), "-rapP"])
