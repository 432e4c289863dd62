# -*- coding: utf-8 -*-
"""PQS coupling tests"""
from pathlib import Path

import networkx as nx
import numpy as np
import pytest

from pqs.exceptions import PQSStructureError, PQSValueError
from pqs.frames import DiscreteFrame
from pqs.hilbert import generate_family, verify_family, check_projective
from pqs.systems import (SystemRelation, system_from_frame, random_system,
                         is_nondegenerate)
from pqs.coupling import (Graph, Surface, SurfaceSet, LQGSystem,
                          CoupledSystem, in_theta, disjoint_support,
                          theta_cover, theta_join, random_lqg_system,
                          random_theta_member, flip_matrix, flip,
                          product_fragment, combine_families,
                          check_flip_identity, check_theta)


SLOT_DIMS = {"a": 2, "c": 2, "d": 2}


def _chain(names, slots):
    shape = nx.DiGraph()
    for name, slot_set in zip(names, slots):
        shape.add_node(name, slots=slot_set)
    shape.add_edges_from(zip(names[1:], names[:-1]))
    return shape


@pytest.fixture
def families(rng):
    """Two small families: l1 >= l0 and m1 >= m0"""
    first = generate_family(_chain(["l0", "l1"], [[], ["a"]]), SLOT_DIMS,
                            rng)
    second = generate_family(_chain(["m0", "m1"], [["c"], ["c", "d"]]),
                             SLOT_DIMS, rng)
    return first, second


@pytest.fixture
def tensor_system(points, metric_sort):
    """Tensor system dual to the coordinate frame at y1"""
    return system_from_frame(DiscreteFrame.standard(points[:1]),
                             [metric_sort], system_id="s1")


def test_graph(points):
    """Test graph construction, order and serialization"""
    y1, y2, y3, _ = points
    graph = Graph([y1, y2, y3], [(y1, y2, "e"), (y2, y1, "e"),
                                 (y2, y1, "f"), (y3, y2)])
    assert graph.vertex_ids == frozenset({"y1", "y2", "y3"})
    assert len(graph.edges) == 3
    nx_graph = graph.to_networkx()
    assert nx_graph.number_of_edges() == 3
    assert nx_graph.number_of_edges("y1", "y2") == 2

    smaller = Graph([y1, y2], [(y1, y2, "e")])
    assert graph.geq(smaller)
    assert not smaller.geq(graph)
    assert smaller.union(Graph([y3])).vertex_ids == graph.vertex_ids
    assert smaller.with_vertices([y3]).edges == smaller.edges

    table = {p.id: p for p in points}
    assert Graph.from_dict(graph.to_dict(), table) == graph

    with pytest.raises(PQSStructureError):
        Graph([y1, y1])
    with pytest.raises(PQSStructureError):
        Graph([y1], [(y1, y1)])
    with pytest.raises(PQSStructureError):
        Graph([y1], [(y1, y2)])
    with pytest.raises(PQSStructureError):
        Graph(["y1"])


def test_surfaces(points):
    """Test surface collections"""
    y1, y2, y3, y4 = points
    first = Surface("S1", [y1, y2])
    second = Surface("S2", [y4])
    surfaces = SurfaceSet([second, first])
    assert [s.id for s in surfaces] == ["S1", "S2"]
    assert len(surfaces) == 2
    assert surfaces.points == frozenset({y1, y2, y4})
    assert surfaces.contains(y4)
    assert not surfaces.contains(y3)
    assert surfaces.geq(SurfaceSet([first]))
    assert not SurfaceSet([first]).geq(surfaces)
    assert SurfaceSet([first]).union(SurfaceSet([second])) == surfaces

    table = {p.id: p for p in points}
    assert SurfaceSet.from_dict(surfaces.to_dict(), table) == surfaces


def test_lqg_system_order(points):
    """Test the componentwise order of LQG systems"""
    y1, y2, y3, y4 = points
    first = LQGSystem(Graph([y1, y2], [(y1, y2, "e")]),
                      SurfaceSet([Surface("S", [y4])]), "a")
    second = LQGSystem(Graph([y3]), system_id="b")
    joined = first.join(second, "ab")
    assert joined.geq(first)
    assert joined.geq(second)
    assert not second.geq(joined)
    assert joined.points == frozenset(points)
    assert joined.to_dict()["graph"]["vertices"] == ["y1", "y2", "y3"]


def test_theta_membership(points, tensor_system):
    """Test membership of pairs in Theta"""
    y1, y2, y3, y4 = points
    member = CoupledSystem(tensor_system, LQGSystem(Graph([y1])))
    assert member.in_theta
    assert member.to_dict()["in_theta"]

    outside = LQGSystem(Graph([y2, y3], [(y2, y3, "e")]),
                        SurfaceSet([Surface("S", [y4])]))
    assert not in_theta(tensor_system, outside)
    with pytest.raises(PQSStructureError):
        CoupledSystem(tensor_system, outside)
    pair = CoupledSystem(tensor_system, outside, require_theta=False)
    assert not pair.in_theta

    assert disjoint_support(tensor_system, outside)
    assert not disjoint_support(tensor_system, LQGSystem(Graph([y1])))


def test_theta_cover_adds_fresh_vertex(points, tensor_system):
    """Test the cover of a pair whose graph equals the frame"""
    y1, _, _, y4 = points
    lqg = LQGSystem(Graph([y1]), SurfaceSet([Surface("S", [y4])]), "G")
    original = CoupledSystem(tensor_system, lqg)
    cover = theta_cover(tensor_system, lqg)
    assert cover.in_theta
    assert cover.geq(original)
    assert cover.lqg_side.graph.vertex_ids == frozenset({"y1", "fresh1"})
    assert cover.lqg_side.surfaces == lqg.surfaces
    assert len(cover.tensor_side.kset) == 12


def test_theta_cover_extends_frame(points, tensor_system):
    """Test the cover of a pair outside Theta"""
    y1, y2, y3, _ = points
    lqg = LQGSystem(Graph([y2, y3], [(y2, y3, "e")]))
    pair = CoupledSystem(tensor_system, lqg, require_theta=False)
    cover = theta_cover(tensor_system, lqg)
    assert cover.in_theta
    assert cover.geq(pair)
    assert cover.tensor_side.frame.point_ids == frozenset({"y1", "y2",
                                                           "y3"})
    assert cover.lqg_side.graph.edges == lqg.graph.edges
    assert SystemRelation.geq(cover.tensor_side, tensor_system)


def test_theta_join(points, metric_sort, tensor_system):
    """Test that Theta is directed"""
    y1, y2, y3, y4 = points
    first = CoupledSystem(tensor_system, LQGSystem(Graph([y1]), system_id="a"))
    second_tensor = system_from_frame(DiscreteFrame.standard([y2, y3]),
                                      [metric_sort], system_id="s2")
    second = CoupledSystem(
        second_tensor,
        LQGSystem(Graph([y2, y3], [(y2, y3, "e")]),
                  SurfaceSet([Surface("S1", [y4])]), "b"))
    joined = theta_join(first, second)
    assert joined.in_theta
    assert joined.geq(first)
    assert joined.geq(second)
    assert joined.lqg_side.graph.vertex_ids >= {"y1", "y2", "y3"}

    report = check_theta([first, second], joined)
    assert report["passed"]
    assert [c["check"] for c in report["checks"]] == ["in_theta",
                                                      "upper_bound"]

    failing = check_theta([joined], first)
    assert not failing["passed"]
    assert failing["checks"][1]["witness"] == {"members": [0]}

    with pytest.raises(PQSValueError):
        check_theta([], joined)


def test_random_theta_members(rng, points, metric_sort):
    """Test random members of Theta and random LQG systems"""
    member = random_theta_member(rng, [metric_sort], points, system_id="t")
    assert member.in_theta

    lqg = random_lqg_system(rng, points, n_edges=3, n_surfaces=2)
    assert lqg.graph.vertex_ids == frozenset(p.id for p in points)
    assert len(lqg.graph.edges) <= 3
    assert [s.id for s in lqg.surfaces] == ["S0", "S1"]
    single = random_lqg_system(rng, points[:1])
    assert not single.graph.edges


def test_flip():
    """Test the flip of the two middle factors"""
    dims = (2, 3, 2, 1)
    vectors = [np.arange(1, d + 1, dtype=float) * (k + 1)
               for k, d in enumerate(dims)]
    product = vectors[0]
    for vec in vectors[1:]:
        product = np.kron(product, vec)
    expected = np.kron(np.kron(np.kron(vectors[0], vectors[2]), vectors[1]),
                       vectors[3])
    assert np.array_equal(flip(product, dims), expected)
    assert np.array_equal(flip_matrix(dims) @ product, expected)

    matrix = flip_matrix(dims)
    assert np.array_equal(matrix.T @ matrix, np.eye(12))

    with pytest.raises(PQSStructureError):
        flip_matrix((2, 2, 2))
    with pytest.raises(PQSStructureError):
        flip(product, (2, 3, 2, 2))


def test_product_fragment(families):
    """Test the product order on index pairs"""
    first, second = families
    order = product_fragment(first, second)
    assert order.number_of_nodes() == 4
    assert order.has_edge(("l1", "m1"), ("l0", "m0"))
    assert not order.has_edge(("l1", "m0"), ("l0", "m1"))

    with pytest.raises(PQSStructureError):
        product_fragment(first, second, [("l1", "missing")])


def test_combine_families(rng, families):
    """Test the family over the product built with the flip"""
    first, second = families
    combined = combine_families(first, second)
    assert combined.first is first
    assert combined.second is second
    assert combined.dim(("l1", "m1")) == 8
    assert combined.factor_dim(("l1", "m1"), ("l0", "m0")) == 4
    assert len(combined.comparable_triples()) == 16

    report = verify_family(combined)
    assert report["passed"]
    assert check_projective(combined, rng=rng)["passed"]

    flip_report = check_flip_identity(combined, n_samples=5, rng=rng)
    assert flip_report["passed"]
    assert flip_report["checks"][0]["checked"] == 16 * 5
    assert flip_report["max_deviation"] < 1e-12


def test_combine_families_on_subset(rng, families):
    """Test combining over a directed subset of the product"""
    first, second = families
    pairs = [("l0", "m0"), ("l1", "m1")]
    combined = combine_families(first, second, pairs)
    assert combined.indices == sorted(pairs, key=str)
    assert verify_family(combined)["passed"]
    assert check_flip_identity(combined, n_samples=3, rng=rng)["passed"]

    with pytest.raises(PQSStructureError):
        combine_families(first, second, [("l1", "m0"), ("l0", "m1")])


def test_flip_identity_detects_tampering(rng, families):
    """Test that a broken combined isomorphism is caught"""
    first, second = families
    combined = combine_families(first, second)
    key = (("l1", "m1"), ("l0", "m0"))
    tampered = combined.iso(*key).copy()
    tampered[0] *= -1
    combined.isos[key].matrix = tampered

    report = check_flip_identity(combined, n_samples=3, rng=rng)
    assert not report["passed"]
    witness = report["checks"][0]["witness"]
    assert witness["triple"][0] == str(("l1", "m1"))


@pytest.mark.slow
def test_flip_identity_on_many_tensors(rng, families):
    """Test the factorization identity on over 1000 simple tensors"""
    combined = combine_families(*families)
    report = check_flip_identity(combined, n_samples=63, rng=rng)
    assert report["checks"][0]["checked"] >= 1000
    assert report["passed"]
    assert report["max_deviation"] < 1e-12


@pytest.mark.slow
def test_random_theta_joins(rng, points, scalar_sort, vector_sort):
    """Test 100 joins of random Theta members"""
    sorts = [scalar_sort, vector_sort]
    for i in range(100):
        first = random_theta_member(rng, sorts, points, system_id=f"a{i}")
        second = random_theta_member(rng, sorts, points, system_id=f"b{i}")
        joined = theta_join(first, second)
        report = check_theta([first, second], joined)
        assert report["passed"], report


@pytest.mark.slow
def test_theta_is_cofinal(rng, points, scalar_sort, vector_sort):
    """Test that random product elements are dominated by Theta members"""
    sorts = [scalar_sort, vector_sort]
    n_outside = 0
    for i in range(100):
        tensor_side = random_system(rng, sorts, points, system_id=f"t{i}")
        size = int(rng.integers(1, len(points) + 1))
        vertices = [points[j] for j in sorted(rng.choice(len(points), size,
                                                         replace=False))]
        lqg_side = random_lqg_system(rng, vertices, system_id=f"g{i}")
        pair = CoupledSystem(tensor_side, lqg_side, require_theta=False)
        n_outside += not pair.in_theta

        cover = theta_cover(tensor_side, lqg_side)
        assert cover.in_theta
        assert cover.geq(pair)
        assert is_nondegenerate(cover.tensor_side.operators,
                                cover.tensor_side.kset)
    assert n_outside > 0


if __name__ == "__main__":
    pytest.main(["-q", "--show-capture=all", Path(__file__), "-rapP"])
