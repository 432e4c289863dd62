# -*- coding: utf-8 -*-
"""
PQS coupling of a tensor field theory to loop quantum gravity.

Two families of factorized Hilbert spaces over directed sets ``Lambda``
and ``Lambda_bar`` combine into a family over any directed subset
``Theta`` of the product via the flip isomorphism. For the coupling to
LQG the subset ``Theta`` consists of pairs whose frame points coincide
with the vertices of the graph; it is cofinal in the product, which is
shown constructively by :func:`theta_cover`.
"""
import logging
import itertools
from dataclasses import dataclass, field

import numpy as np
import networkx as nx

from pqs.exceptions import PQSStructureError, PQSValueError
from pqs.frames import extend_frame
from pqs.geometry import Point, fresh_points
from pqs.hilbert import (DEFAULT_TOLERANCE, FactorizedFamily, FiniteHilbert,
                         order_closure, is_directed, slot_permutation,
                         max_deviation)
from pqs.systems import SystemRelation, enlarge, join, random_system
from pqs.utilities.random import make_rng, random_vector


logger = logging.getLogger(__name__)


def _canonical_edge(first, second, label):
    if first == second:
        msg = f"Edges need two distinct vertices, got loop at {first.id!r}"
        raise PQSStructureError(msg)
    a, b = sorted((first, second), key=lambda p: p.id)
    return (a, b, None if label is None else str(label))


class Graph:
    """Finite graph with points of the manifold as vertices.

    Edges are unordered vertex pairs carrying an optional label; two
    edges between the same vertices with different labels are distinct.
    """

    def __init__(self, vertices, edges=()):
        """
        Parameters
        ----------
        vertices : iterable of pqs.geometry.Point
            Pairwise distinct vertices.
        edges : iterable, optional
            ``(a, b)`` or ``(a, b, label)`` tuples of vertices.
            By default, ``()``.
        """
        vertices = list(vertices)
        if not all(isinstance(v, Point) for v in vertices):
            raise PQSStructureError("Graph vertices must be Points")
        ids = [v.id for v in vertices]
        if len(set(ids)) != len(ids) or len(set(vertices)) != len(vertices):
            raise PQSStructureError(f"Graph has repeated vertices: {ids}")
        self.vertices = frozenset(vertices)
        canonical = set()
        for edge in edges:
            first, second, *label = edge
            if first not in self.vertices or second not in self.vertices:
                msg = (f"Edge ({first.id!r}, {second.id!r}) has an endpoint "
                       "that is not a vertex")
                raise PQSStructureError(msg)
            canonical.add(_canonical_edge(first, second,
                                          label[0] if label else None))
        self.edges = frozenset(canonical)

    def __repr__(self):
        return (f"Graph(vertices={sorted(self.vertex_ids)}, "
                f"n_edges={len(self.edges)})")

    def __eq__(self, other):
        if not isinstance(other, Graph):
            return NotImplemented
        return self.vertices == other.vertices and self.edges == other.edges

    def __hash__(self):
        return hash((self.vertices, self.edges))

    @property
    def vertex_ids(self):
        """frozenset: Ids of the vertices."""
        return frozenset(v.id for v in self.vertices)

    def geq(self, other):
        """Whether this graph contains ``other`` (vertices and edges)."""
        return (other.vertices <= self.vertices
                and other.edges <= self.edges)

    def union(self, other):
        """Smallest graph containing both graphs."""
        return Graph(self.vertices | other.vertices,
                     self.edges | other.edges)

    def with_vertices(self, points):
        """Copy of the graph with extra (isolated) vertices."""
        return Graph(self.vertices | frozenset(points), self.edges)

    def to_networkx(self):
        """The graph as a :class:`networkx.MultiGraph` keyed by point id."""
        graph = nx.MultiGraph()
        graph.add_nodes_from(sorted(self.vertex_ids))
        for a, b, label in self.edges:
            graph.add_edge(a.id, b.id, label=label)
        return graph

    def to_dict(self):
        """Serialize vertex ids and edges."""
        edges = sorted(([a.id, b.id] + ([label] if label is not None else [])
                        for a, b, label in self.edges), key=str)
        return {"vertices": sorted(self.vertex_ids), "edges": edges}

    @classmethod
    def from_dict(cls, data, points):
        """Load a graph; ``points`` maps point ids to points."""
        vertices = [points[pid] for pid in data.get("vertices", [])]
        edges = [(points[e[0]], points[e[1]], *e[2:])
                 for e in data.get("edges", [])]
        return cls(vertices, edges)


@dataclass(frozen=True)
class Surface:
    """A surface of the manifold, sampled as a finite set of points."""

    id: str
    points: frozenset = field(default=frozenset())

    def __post_init__(self):
        object.__setattr__(self, "id", str(self.id))
        object.__setattr__(self, "points", frozenset(self.points))

    def contains(self, point):
        """Membership predicate of the surface."""
        return point in self.points


class SurfaceSet:
    """Finite collection of surfaces, ordered by containment."""

    def __init__(self, surfaces=()):
        self.surfaces = frozenset(surfaces)

    def __repr__(self):
        return f"SurfaceSet({sorted(s.id for s in self.surfaces)})"

    def __eq__(self, other):
        if not isinstance(other, SurfaceSet):
            return NotImplemented
        return self.surfaces == other.surfaces

    def __hash__(self):
        return hash(self.surfaces)

    def __iter__(self):
        return iter(sorted(self.surfaces, key=lambda s: s.id))

    def __len__(self):
        return len(self.surfaces)

    @property
    def points(self):
        """frozenset: All points lying on some surface."""
        return frozenset().union(*(s.points for s in self.surfaces))

    def contains(self, point):
        """Whether a point lies on any surface of the collection."""
        return any(s.contains(point) for s in self.surfaces)

    def geq(self, other):
        """Whether this collection contains every surface of ``other``."""
        return other.surfaces <= self.surfaces

    def union(self, other):
        """Smallest collection containing both collections."""
        return SurfaceSet(self.surfaces | other.surfaces)

    def to_dict(self):
        """Serialize as a list of ``{"id", "points"}`` dicts."""
        return [{"id": s.id, "points": sorted(p.id for p in s.points)}
                for s in self]

    @classmethod
    def from_dict(cls, data, points):
        """Load surfaces; ``points`` maps point ids to points."""
        return cls(Surface(s["id"], [points[pid] for pid in s["points"]])
                   for s in data)


class LQGSystem:
    """Finite LQG system given by a graph and a collection of surfaces.

    The LQG side is modeled by the full product of graphs and surface
    collections, ordered componentwise.
    """

    def __init__(self, graph, surfaces=None, system_id=None):
        self.graph = graph
        self.surfaces = surfaces if surfaces is not None else SurfaceSet()
        self.id = system_id

    def __repr__(self):
        return (f"LQGSystem(id={self.id!r}, graph={self.graph!r}, "
                f"surfaces={self.surfaces!r})")

    @property
    def points(self):
        """frozenset: Graph vertices and surface points."""
        return self.graph.vertices | self.surfaces.points

    def geq(self, other):
        """Componentwise order: graph and surface containment."""
        return (self.graph.geq(other.graph)
                and self.surfaces.geq(other.surfaces))

    def join(self, other, system_id=None):
        """Upper bound of two LQG systems (componentwise union)."""
        return LQGSystem(self.graph.union(other.graph),
                         self.surfaces.union(other.surfaces), system_id)

    def to_dict(self):
        """Serialize graph and surfaces."""
        return {"id": self.id, "graph": self.graph.to_dict(),
                "surfaces": self.surfaces.to_dict()}


class CoupledSystem:
    """Pair ``theta = (lambda, lambda_bar)`` of a tensor and an LQG system.
    """

    def __init__(self, tensor_side, lqg_side, require_theta=True):
        """
        Parameters
        ----------
        tensor_side : pqs.systems.FiniteSystem
            Finite system of the tensor field theory.
        lqg_side : LQGSystem
            Finite LQG system.
        require_theta : bool, optional
            Reject pairs outside ``Theta``. By default, ``True``.
        """
        self.tensor_side = tensor_side
        self.lqg_side = lqg_side
        if require_theta and not in_theta(tensor_side, lqg_side):
            msg = (f"Frame points {sorted(tensor_side.frame.point_ids)} do "
                   "not coincide with graph vertices "
                   f"{sorted(lqg_side.graph.vertex_ids)}")
            raise PQSStructureError(msg)

    def __repr__(self):
        return (f"CoupledSystem(tensor={self.tensor_side!r}, "
                f"lqg={self.lqg_side!r})")

    @property
    def in_theta(self):
        """bool: Whether the pair belongs to ``Theta``."""
        return in_theta(self.tensor_side, self.lqg_side)

    def geq(self, other):
        """Product order on pairs."""
        return (SystemRelation.geq(self.tensor_side, other.tensor_side)
                and self.lqg_side.geq(other.lqg_side))

    def to_dict(self):
        """Serialize both sides."""
        return {"tensor_side": self.tensor_side.to_dict(),
                "lqg_side": self.lqg_side.to_dict(),
                "in_theta": self.in_theta}


def in_theta(tensor_side, lqg_side):
    """Whether the frame points coincide with the vertices of the graph.

    Parameters
    ----------
    tensor_side : pqs.systems.FiniteSystem
        Tensor-side system.
    lqg_side : LQGSystem
        LQG-side system.

    Returns
    -------
    bool
    """
    return frozenset(tensor_side.frame.points) == lqg_side.graph.vertices


def _tensor_points(system):
    points = set(system.frame.points)
    for operator in system.operators:
        points.update(operator.form_points)
    return points


def disjoint_support(tensor_side, lqg_side):
    """Whether the two systems live on disjoint subsets of the manifold.

    Frame points and the supports of the operator forms must avoid the
    graph vertices and every surface.
    """
    return not (_tensor_points(tensor_side) & set(lqg_side.points))


def theta_cover(tensor_side, lqg_side, measure=None):
    """Member of ``Theta`` dominating an arbitrary product element.

    The frame points are made a proper subset of the vertices of a graph
    containing the given one (adding a fresh vertex when needed); the
    frame is extended to all vertices and the operator space is enlarged
    on it.

    Parameters
    ----------
    tensor_side : pqs.systems.FiniteSystem
        Tensor-side system.
    lqg_side : LQGSystem
        LQG-side system.
    measure : pqs.geometry.DiscreteMeasure, optional
        Measure for the dual operators added by the enlargement.
        By default, ``None``.

    Returns
    -------
    CoupledSystem
    """
    frame_points = frozenset(tensor_side.frame.points)
    vertices = set(lqg_side.graph.vertices) | frame_points
    fresh = []
    if vertices == frame_points:
        taken = (vertices | set(lqg_side.points)
                 | _tensor_points(tensor_side))
        fresh = fresh_points(taken, tensor_side.frame.dim, 1)
        vertices |= set(fresh)

    graph = lqg_side.graph.with_vertices(vertices)
    frame = extend_frame(tensor_side.frame,
                         sorted(vertices - frame_points, key=lambda p: p.id))
    record = enlarge(tensor_side.operators, frame, tensor_side.sorts,
                     measure, tensor_side.id)
    logger.debug("Covered (%r, %r) by a Theta member on %d vertices "
                 "(fresh %s)", tensor_side.id, lqg_side.id, len(vertices),
                 [p.id for p in fresh])
    return CoupledSystem(record.system,
                         LQGSystem(graph, lqg_side.surfaces, lqg_side.id))


def theta_join(first, second, measure=None):
    """Member of ``Theta`` dominating two members of ``Theta``.

    Both sides are joined in their own directed sets and the resulting
    product element is covered by :func:`theta_cover`.

    Parameters
    ----------
    first, second : CoupledSystem
        Pairs to join.
    measure : pqs.geometry.DiscreteMeasure, optional
        Measure for dual operators. By default, ``None``.

    Returns
    -------
    CoupledSystem
    """
    tensor_side = join(first.tensor_side, second.tensor_side, measure)
    lqg_side = first.lqg_side.join(second.lqg_side)
    out = theta_cover(tensor_side, lqg_side, measure)
    logger.info("Theta join produced %d vertices and %d d.o.f.",
                len(out.lqg_side.graph.vertices), len(out.tensor_side.kset))
    return out


def random_lqg_system(rng, points, n_edges=2, n_surfaces=1, system_id=None):
    """Random graph on given vertices plus random surfaces.

    Parameters
    ----------
    rng : np.random.Generator
        Random generator.
    points : sequence of pqs.geometry.Point
        Graph vertices; surfaces sample points from the same pool.
    n_edges : int, optional
        Number of random edges (when at least two vertices).
        By default, ``2``.
    n_surfaces : int, optional
        Number of surfaces. By default, ``1``.
    system_id : str, optional
        Label. By default, ``None``.

    Returns
    -------
    LQGSystem
    """
    points = sorted(points, key=lambda p: p.id)
    edges = []
    if len(points) > 1:
        for k in range(n_edges):
            i, j = rng.choice(len(points), 2, replace=False)
            edges.append((points[i], points[j], f"e{k}"))
    surfaces = []
    for k in range(n_surfaces):
        size = int(rng.integers(1, len(points) + 1))
        chosen = rng.choice(len(points), size, replace=False)
        surfaces.append(Surface(f"S{k}", [points[i] for i in chosen]))
    return LQGSystem(Graph(points, edges), SurfaceSet(surfaces), system_id)


def random_theta_member(rng, sorts, points, measure=None, system_id=None):
    """Random member of ``Theta`` drawn from a point pool."""
    tensor_side = random_system(rng, sorts, points, measure=measure,
                                system_id=system_id)
    lqg_side = random_lqg_system(rng, tensor_side.frame.points,
                                 system_id=system_id)
    return CoupledSystem(tensor_side, lqg_side)


def flip_matrix(dims):
    """Unitary ``v1 (x) v2 (x) v3 (x) v4 -> v1 (x) v3 (x) v2 (x) v4``.

    Parameters
    ----------
    dims : sequence of int
        Dimensions of the four factors.

    Returns
    -------
    np.ndarray
    """
    dims = _check_flip_dims(dims)
    return slot_permutation(range(4), (0, 2, 1, 3), dict(enumerate(dims)))


def flip(vector, dims):
    """Apply the flip isomorphism to a vector of the four-fold product."""
    dims = _check_flip_dims(dims)
    vector = np.asarray(vector)
    if vector.shape != (int(np.prod(dims)),):
        msg = (f"Vector of shape {vector.shape} does not live in a product "
               f"of dimensions {dims}")
        raise PQSStructureError(msg)
    return vector.reshape(dims).transpose(0, 2, 1, 3).reshape(-1)


def _check_flip_dims(dims):
    dims = tuple(int(d) for d in dims)
    if len(dims) != 4 or min(dims) < 1:
        msg = f"Flip needs four positive dimensions, got {dims}"
        raise PQSStructureError(msg)
    return dims


class CombinedFamily(FactorizedFamily):
    """Family over ``Theta`` built from two factorized families.

    Indices are pairs ``(l, l_bar)``; ``first`` and ``second`` hold the
    component families.
    """

    def __init__(self, first, second, order, spaces, factors, isos,
                 triple_isos):
        self.first = first
        self.second = second
        super().__init__(order, spaces, factors, isos, triple_isos)


def product_fragment(first, second, pairs=None):
    """Product order on a set of index pairs.

    Parameters
    ----------
    first, second : pqs.hilbert.FactorizedFamily
        Component families.
    pairs : iterable, optional
        ``(l, l_bar)`` pairs. By default, ``None``, which uses the full
        product of the index sets.

    Returns
    -------
    nx.DiGraph
        Order with an edge ``a -> b`` whenever ``a >= b``.
    """
    if pairs is None:
        pairs = itertools.product(first.indices, second.indices)
    pairs = list(dict.fromkeys(tuple(p) for p in pairs))
    for a, b in pairs:
        if a not in first.spaces or b not in second.spaces:
            msg = f"Pair ({a!r}, {b!r}) is not in the product index set"
            raise PQSStructureError(msg)
    order = nx.DiGraph()
    order.add_nodes_from(pairs)
    for (a1, b1), (a2, b2) in itertools.product(pairs, repeat=2):
        if first.geq(a1, a2) and second.geq(b1, b2):
            order.add_edge((a1, b1), (a2, b2))
    return order


def combine_families(first, second, pairs=None):
    """Combine two families of factorized spaces over a product subset.

    With ``theta = (l, l_bar)``: ``H_theta = H_l (x) H_l_bar``, the
    complement factors are products of the component factors, and the
    isomorphisms are the products of the component isomorphisms
    followed by the flip of the middle factors.

    Parameters
    ----------
    first, second : pqs.hilbert.FactorizedFamily
        Component families.
    pairs : iterable, optional
        Directed subset of the product index set. By default, ``None``,
        which uses the full product.

    Returns
    -------
    CombinedFamily
    """
    order = product_fragment(first, second, pairs)
    closure = order_closure(order)
    if not is_directed(closure):
        raise PQSStructureError("Index pairs do not form a directed set")

    spaces = {(a, b): FiniteHilbert(first.dim(a) * second.dim(b))
              for a, b in order.nodes}
    factors, isos = {}, {}
    for (a1, b1), (a2, b2) in closure.edges:
        fa, fb = first.factor_dim(a1, a2), second.factor_dim(b1, b2)
        factors[((a1, b1), (a2, b2))] = FiniteHilbert(fa * fb)
        flipped = flip_matrix((fa, first.dim(a2), fb, second.dim(b2)))
        isos[((a1, b1), (a2, b2))] = flipped @ np.kron(first.iso(a1, a2),
                                                       second.iso(b1, b2))

    triple_isos = {}
    for top, middle in closure.edges:
        for bottom in closure.successors(middle):
            (a1, b1), (a2, b2), (a3, b3) = top, middle, bottom
            flipped = flip_matrix((first.factor_dim(a1, a2),
                                   first.factor_dim(a2, a3),
                                   second.factor_dim(b1, b2),
                                   second.factor_dim(b2, b3)))
            triple_isos[(top, middle, bottom)] = flipped @ np.kron(
                first.triple_iso(a1, a2, a3), second.triple_iso(b1, b2, b3))

    logger.debug("Combined families over %d index pairs", len(spaces))
    return CombinedFamily(first, second, order, spaces, factors, isos,
                          triple_isos)


def _random_simple_tensor(rng, dims):
    vectors = [random_vector(rng, d) for d in dims]
    out = vectors[0]
    for vec in vectors[1:]:
        out = np.kron(out, vec)
    return vectors, out


def _componentwise_side(family, top, middle, bottom, first_factor,
                        second_factor, state):
    """``Phi_{top,bottom}^-1 (Phi_{top,middle,bottom}^-1 (v1 (x) v2) (x) s)``
    computed in one component family."""
    inner = family.triple_iso(top, middle, bottom).conj().T @ np.kron(
        first_factor, second_factor)
    return family.iso(top, bottom).conj().T @ np.kron(inner, state)


def check_flip_identity(combined, n_samples=100, rng=None,
                        tol=DEFAULT_TOLERANCE):
    """Check the factorization identity of a combined family directly.

    For every comparable triple ``theta'' >= theta' >= theta`` and random
    simple tensors ``v1 (x) ... (x) v6`` of
    ``Ht_{l''l'} (x) Ht_{lb''lb'} (x) Ht_{l'l} (x) Ht_{lb'lb} (x) H_l
    (x) H_lb``, the right side
    ``Phi_{theta''theta'}^-1 (1 (x) Phi_{theta'theta}^-1)`` computed in
    the combined family is compared with the left side
    ``Phi_{theta''theta}^-1 (Phi_{theta''theta'theta}^-1 (x) 1)``
    evaluated factor by factor in the component families.

    Parameters
    ----------
    combined : CombinedFamily
        Output of :func:`combine_families`.
    n_samples : int, optional
        Simple tensors per triple. By default, ``100``.
    rng : np.random.Generator, optional
        Random generator. By default, ``None``.
    tol : float, optional
        Identity tolerance. By default, :obj:`DEFAULT_TOLERANCE`.

    Returns
    -------
    dict
        Report with a single ``flip_identity`` check.
    """
    rng = rng or make_rng()
    first, second = combined.first, combined.second
    worst, witness, checked = 0.0, None, 0
    for top, middle, bottom in combined.comparable_triples():
        (a1, b1), (a2, b2), (a3, b3) = top, middle, bottom
        dims = (first.factor_dim(a1, a2), second.factor_dim(b1, b2),
                first.factor_dim(a2, a3), second.factor_dim(b2, b3),
                first.dim(a3), second.dim(b3))
        inverse_top = combined.iso(top, middle).conj().T
        inverse_lower = combined.iso(middle, bottom).conj().T
        for _ in range(n_samples):
            vectors, simple = _random_simple_tensor(rng, dims)
            v1, v2, v3, v4, v5, v6 = vectors
            rhs = inverse_top @ np.kron(np.eye(combined.factor_dim(top,
                                                                   middle)),
                                        inverse_lower) @ simple
            lhs = np.kron(
                _componentwise_side(first, a1, a2, a3, v1, v3, v5),
                _componentwise_side(second, b1, b2, b3, v2, v4, v6))
            deviation = max_deviation(lhs, rhs)
            checked += 1
            if deviation > worst:
                worst = deviation
                witness = {"triple": [str(top), str(middle), str(bottom)]}
    passed = worst <= tol
    logger.info("Flip identity checked on %d simple tensors (max deviation "
                "%.3g)", checked, worst)
    return {"passed": passed, "max_deviation": worst,
            "checks": [{"check": "flip_identity", "passed": passed,
                        "max_deviation": worst, "checked": checked,
                        "witness": None if passed else witness}]}


def check_theta(members, joined):
    """Check that a joined pair is in ``Theta`` and dominates the inputs.

    Parameters
    ----------
    members : sequence of CoupledSystem
        Input pairs.
    joined : CoupledSystem
        Candidate upper bound.

    Returns
    -------
    dict
        Report with ``in_theta`` and ``upper_bound`` checks.
    """
    if not members:
        raise PQSValueError("Need at least one pair to compare against")
    dominated = [i for i, m in enumerate(members) if not joined.geq(m)]
    checks = [{"check": "in_theta", "passed": joined.in_theta,
               "max_deviation": 0.0, "witness": None},
              {"check": "upper_bound", "passed": not dominated,
               "max_deviation": 0.0,
               "witness": {"members": dominated} if dominated else None}]
    return {"passed": all(c["passed"] for c in checks), "max_deviation": 0.0,
            "checks": checks}
