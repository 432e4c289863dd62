# -*- coding: utf-8 -*-
"""PQS factorized Hilbert space family tests"""
from pathlib import Path

import networkx as nx
import numpy as np
import pytest

from pqs.exceptions import PQSStructureError, PQSValueError, PQSKeyError
from pqs.hilbert import (FiniteHilbert, AlgebraState, FactorizedFamily,
                         order_closure, is_directed, slot_permutation,
                         generate_family, random_directed_shape,
                         verify_family, embed_operator, check_embedding,
                         check_inductive, pullback_state, projective_net,
                         check_projective, family_to_dict, family_from_dict,
                         max_deviation, DEFAULT_TOLERANCE, PSD_TOLERANCE)
from pqs.utilities.parallel import CheckRunner
from pqs.utilities.random import random_density_matrix


SLOT_DIMS = {"a": 2, "b": 3}


@pytest.fixture
def chain():
    """Chain l2 >= l1 >= l0 with growing slot sets"""
    shape = nx.DiGraph()
    shape.add_node("l0", slots=[])
    shape.add_node("l1", slots=["a"])
    shape.add_node("l2", slots=["a", "b"])
    shape.add_edges_from([("l1", "l0"), ("l2", "l1")])
    return shape


@pytest.fixture
def diamond():
    """Directed set with two incomparable middle indices"""
    shape = nx.DiGraph()
    shape.add_node("bottom", slots=[])
    shape.add_node("left", slots=["a"])
    shape.add_node("right", slots=["b"])
    shape.add_node("top", slots=["a", "b"])
    shape.add_edges_from([("top", "left"), ("top", "right"),
                          ("left", "bottom"), ("right", "bottom")])
    return shape


def test_finite_hilbert():
    """Test space validation and default labels"""
    space = FiniteHilbert(3)
    assert space.labels == ("0", "1", "2")
    assert FiniteHilbert(2, ("up", "down")).labels == ("up", "down")
    with pytest.raises(PQSStructureError):
        FiniteHilbert(0)
    with pytest.raises(PQSStructureError):
        FiniteHilbert(2, ("only",))


@pytest.mark.parametrize(
    "rho",
    [np.ones((2, 3)) / 2,
     np.array([[0.5, 1], [0, 0.5]]),
     np.eye(2),
     np.diag([1.5, -0.5])])
def test_algebra_state_validation(rho):
    """Test rejection of matrices that are not density matrices"""
    with pytest.raises(PQSValueError):
        AlgebraState(rho)


def test_algebra_state(rng):
    """Test expectation values of states"""
    state = AlgebraState.maximally_mixed(4)
    assert state.dim == 4
    assert np.isclose(state.expectation(np.eye(4)), 1)
    rho = AlgebraState(random_density_matrix(rng, 3))
    assert np.isclose(rho.expectation(np.diag([1, 1, 1])), 1)


def test_order_closure_and_direction(chain):
    """Test the reflexive-transitive closure and directedness"""
    order = order_closure(chain)
    assert order.has_edge("l2", "l0")
    assert all(order.has_edge(n, n) for n in order.nodes)
    assert is_directed(order)

    split = nx.DiGraph()
    split.add_nodes_from(["x", "y"])
    assert not is_directed(order_closure(split))


def test_slot_permutation():
    """Test that slot reordering swaps tensor factors"""
    u = np.array([1.0, 2.0])
    v = np.array([3.0, 5.0, 7.0])
    swap = slot_permutation(["a", "b"], ["b", "a"], SLOT_DIMS)
    assert np.array_equal(swap @ np.kron(u, v), np.kron(v, u))
    assert np.array_equal(slot_permutation(["a", "b"], ["a", "b"],
                                           SLOT_DIMS), np.eye(6))
    with pytest.raises(PQSStructureError):
        slot_permutation(["a"], ["b"], SLOT_DIMS)


def test_generate_family_structure(rng, chain):
    """Test dimensions and comparable pairs of a generated family"""
    fam = generate_family(chain, SLOT_DIMS, rng)
    assert fam.indices == ["l0", "l1", "l2"]
    assert [fam.dim(i) for i in fam.indices] == [1, 2, 6]
    assert fam.factor_dim("l2", "l0") == 6
    assert fam.factor_dim("l2", "l1") == 3
    assert fam.factor_dim("l1", "l1") == 1
    assert len(fam.comparable_pairs()) == 6
    assert len(fam.comparable_triples()) == 10
    assert fam.tops() == ["l2"]
    assert fam.is_directed
    assert fam.geq("l2", "l0")
    assert not fam.geq("l0", "l2")
    assert fam.iso("l2", "l1").shape == (6, 6)
    assert fam.triple_iso("l2", "l1", "l0").shape == (6, 6)

    with pytest.raises(PQSKeyError):
        fam.iso("l0", "l2")
    with pytest.raises(PQSKeyError):
        fam.triple_iso("l0", "l1", "l2")


@pytest.mark.parametrize("shape_name", ["chain", "diamond"])
def test_generated_family_verifies(rng, request, shape_name):
    """Test that generated families satisfy every defining property"""
    shape = request.getfixturevalue(shape_name)
    fam = generate_family(shape, SLOT_DIMS, rng)
    report = verify_family(fam, runner=CheckRunner(parallel=True))
    assert report["passed"]
    assert report["max_deviation"] < 1e-12
    assert [c["check"] for c in report["checks"]] == [
        "directed", "dimensions", "unitarity", "triviality", "diagram"]

    assert check_embedding(fam, rng)["passed"]
    assert check_inductive(fam)["passed"]
    assert check_projective(fam, rng=rng)["passed"]


def test_exact_family_has_zero_deviation(rng, diamond):
    """Test that signed-permutation families verify bit-exactly"""
    fam = generate_family(diamond, SLOT_DIMS, rng, exact=True)
    report = verify_family(fam)
    assert report["passed"]
    assert report["max_deviation"] == 0.0


def test_generate_family_rejects_bad_shapes(rng, chain):
    """Test structural errors of the slot data"""
    split = nx.DiGraph()
    split.add_node("x", slots=["a"])
    split.add_node("y", slots=["b"])
    with pytest.raises(PQSStructureError):
        generate_family(split, SLOT_DIMS, rng)

    backwards = chain.copy()
    backwards.add_edge("l0", "l2")
    backwards.add_node("l3", slots=["a"])
    backwards.add_edge("l3", "l2")
    with pytest.raises(PQSStructureError):
        generate_family(backwards, SLOT_DIMS, rng)

    unknown = chain.copy()
    unknown.nodes["l1"]["slots"] = ["c"]
    with pytest.raises(PQSStructureError):
        generate_family(unknown, SLOT_DIMS, rng)

    bare = chain.copy()
    del bare.nodes["l0"]["slots"]
    with pytest.raises(PQSStructureError):
        generate_family(bare, SLOT_DIMS, rng)


def test_family_structure_errors(rng, chain):
    """Test that families with missing or misshaped data are rejected"""
    fam = generate_family(chain, SLOT_DIMS, rng)
    isos = {k: v.matrix for k, v in fam.isos.items()}
    triples = {k: v.matrix for k, v in fam.triple_isos.items()}

    bad_shape = dict(isos)
    bad_shape[("l2", "l1")] = np.eye(5)
    with pytest.raises(PQSStructureError):
        FactorizedFamily(chain, fam.spaces, fam.factors, bad_shape, triples)

    missing = dict(isos)
    del missing[("l1", "l0")]
    with pytest.raises(PQSStructureError):
        FactorizedFamily(chain, fam.spaces, fam.factors, missing, triples)

    no_triple = dict(triples)
    del no_triple[("l2", "l1", "l0")]
    with pytest.raises(PQSStructureError):
        FactorizedFamily(chain, fam.spaces, fam.factors, isos, no_triple)

    spaces = dict(fam.spaces)
    del spaces["l0"]
    with pytest.raises(PQSStructureError):
        FactorizedFamily(chain, spaces, fam.factors, isos, triples)


def test_tampered_family_fails_diagram(rng, chain):
    """Test that a broken isomorphism is reported with a witness"""
    fam = generate_family(chain, SLOT_DIMS, rng)
    tampered = fam.iso("l2", "l0").copy()
    tampered[0] *= -1
    fam.isos[("l2", "l0")].matrix = tampered

    report = verify_family(fam)
    assert not report["passed"]
    by_name = {c["check"]: c for c in report["checks"]}
    assert by_name["unitarity"]["passed"]
    assert not by_name["diagram"]["passed"]
    assert "l0" in by_name["diagram"]["witness"]["triple"]
    assert report["max_deviation"] > 1e-3


def test_embedding_and_pullback(rng, chain):
    """Test embeddings, pull-backs and their duality"""
    fam = generate_family(chain, SLOT_DIMS, rng)
    assert np.allclose(embed_operator(fam, "l2", "l1", np.eye(2)),
                       np.eye(6))

    a = rng.standard_normal((2, 2))
    b = rng.standard_normal((2, 2))
    lifted = embed_operator(fam, "l2", "l1", a @ b)
    assert np.allclose(lifted, embed_operator(fam, "l2", "l1", a)
                       @ embed_operator(fam, "l2", "l1", b))

    mixed = pullback_state(fam, "l2", "l1", AlgebraState.maximally_mixed(6))
    assert np.allclose(mixed.rho, np.eye(2) / 2)

    rho = AlgebraState(random_density_matrix(rng, 6))
    pulled = pullback_state(fam, "l2", "l1", rho)
    assert np.isclose(rho.expectation(embed_operator(fam, "l2", "l1", a)),
                      pulled.expectation(a))
    trivial = pullback_state(fam, "l2", "l0", rho)
    assert trivial.dim == 1
    assert np.isclose(trivial.rho[0, 0], 1)

    with pytest.raises(PQSStructureError):
        embed_operator(fam, "l2", "l1", np.eye(3))
    with pytest.raises(PQSStructureError):
        pullback_state(fam, "l2", "l1", AlgebraState.maximally_mixed(2))


def test_projective_net(rng, diamond):
    """Test that the net built from a top state is consistent"""
    fam = generate_family(diamond, SLOT_DIMS, rng)
    top = random_density_matrix(rng, fam.dim("top"))
    net = projective_net(fam, top)
    assert set(net) == set(fam.indices)
    assert np.allclose(net["top"].rho, top)
    for larger, smaller in fam.comparable_pairs():
        pulled = pullback_state(fam, larger, smaller, net[larger])
        assert max_deviation(pulled.rho, net[smaller].rho) < 1e-12

    report = check_projective(fam, top_state=top, rng=rng)
    assert report["passed"]
    assert [c["check"] for c in report["checks"]] == ["composition",
                                                      "duality", "net"]


@pytest.mark.parametrize("n_nodes", [1, 3, 5])
def test_random_directed_shape(rng, n_nodes):
    """Test random slot-inclusion shapes"""
    shape = random_directed_shape(rng, n_nodes, SLOT_DIMS)
    assert 1 <= shape.number_of_nodes() <= n_nodes
    assert sorted(shape.nodes["l0"]["slots"]) == ["a", "b"]
    assert is_directed(order_closure(shape))
    fam = generate_family(shape, SLOT_DIMS, rng)
    assert verify_family(fam)["passed"]


def test_family_serialization(rng, diamond):
    """Test that a serialized family loads back with the same matrices"""
    fam = generate_family(diamond, SLOT_DIMS, rng)
    data = family_to_dict(fam)
    assert data["indices"] == ["bottom", "left", "right", "top"]
    assert data["spaces"] == {"bottom": 1, "left": 2, "right": 3, "top": 6}
    assert ["top", "bottom"] in data["edges"]

    loaded = family_from_dict(data)
    assert loaded.indices == fam.indices
    for pair in fam.comparable_pairs():
        assert np.allclose(loaded.iso(*pair), fam.iso(*pair))
    assert verify_family(loaded)["passed"]


def test_algebra_state_tolerances():
    """Test the positivity slack of states and pulled-back states"""
    tiny = AlgebraState(np.diag([1 + 1e-13, -1e-13]))
    assert tiny.psd_tolerance == DEFAULT_TOLERANCE

    rho = np.diag([1 + 1e-11, -1e-11])
    with pytest.raises(PQSValueError) as error:
        AlgebraState(rho)
    assert "positive semi-definite" in str(error.value)
    assert AlgebraState(rho, psd_tolerance=PSD_TOLERANCE).dim == 2

    with pytest.raises(PQSValueError):
        AlgebraState(np.diag([1 + 1e-9, -1e-9]), psd_tolerance=PSD_TOLERANCE)


@pytest.mark.slow
def test_random_families_verify(rng):
    """Test 50 random families and the detection of a corrupted iso"""
    slot_dims = {"a": 2, "b": 2, "c": 2, "d": 2}
    n_tampered = 0
    for _ in range(50):
        shape = random_directed_shape(rng, int(rng.integers(2, 11)),
                                      slot_dims)
        fam = generate_family(shape, slot_dims, rng)
        assert verify_family(fam)["passed"]
        assert check_embedding(fam, rng)["passed"]
        assert check_inductive(fam)["passed"]
        assert check_projective(fam, rng=rng)["passed"]

        strict = [t for t in fam.comparable_triples() if len(set(t)) == 3]
        if not strict:
            continue
        top, _, bottom = strict[int(rng.integers(len(strict)))]
        tampered = fam.iso(top, bottom).copy()
        tampered[0] *= -1
        fam.isos[(top, bottom)].matrix = tampered
        report = verify_family(fam)
        assert not report["passed"]
        by_name = {c["check"]: c for c in report["checks"]}
        assert by_name["unitarity"]["passed"]
        assert not by_name["diagram"]["passed"]
        n_tampered += 1
    assert n_tampered > 0


if __name__ == "__main__":
    pytest.main(["-q", "--show-capture=all", Path(__file__), "-rapP"])
