# -*- coding: utf-8 -*-
"""
PQS families of factorized Hilbert spaces.

A family over a finite directed set assigns a Hilbert space to every
index, a complement factor to every comparable pair and isomorphisms
``Phi_{l'l}: H_{l'} -> Ht_{l'l} (x) H_l`` plus three-factor isomorphisms
``Phi_{l''l'l}: Ht_{l''l} -> Ht_{l''l'} (x) Ht_{l'l}`` that make the
factorization diagram commute. The family induces an inductive family of
operator algebras (embeddings) and a projective family of states
(pull-backs). Spaces are finite-dimensional with complex matrices;
tensor products follow :func:`numpy.kron`.
"""
import math
import logging
import itertools
from dataclasses import dataclass, field

import numpy as np
import networkx as nx

from pqs.exceptions import PQSStructureError, PQSValueError, PQSKeyError
from pqs.utilities.parallel import CheckRunner
from pqs.utilities.random import (make_rng, random_unitary,
                                  random_density_matrix)


logger = logging.getLogger(__name__)

DEFAULT_TOLERANCE = 1e-12
"""Tolerance of floating-point identity checks."""

PSD_TOLERANCE = 1e-10
"""Positivity slack accepted for pulled-back density matrices."""


def max_deviation(first, second):
    """Largest absolute entry of ``first - second`` (0 for empty arrays)."""
    diff = np.abs(np.asarray(first) - np.asarray(second))
    return float(diff.max()) if diff.size else 0.0


@dataclass(frozen=True)
class FiniteHilbert:
    """Finite-dimensional Hilbert space with labeled basis vectors."""

    dim: int
    labels: tuple = ()

    def __post_init__(self):
        if int(self.dim) < 1:
            msg = f"Hilbert spaces need dimension >= 1, got {self.dim}"
            raise PQSStructureError(msg)
        object.__setattr__(self, "dim", int(self.dim))
        labels = tuple(self.labels) or tuple(str(i) for i in range(self.dim))
        if len(labels) != self.dim:
            msg = (f"Got {len(labels)} basis labels for a space of "
                   f"dimension {self.dim}")
            raise PQSStructureError(msg)
        object.__setattr__(self, "labels", labels)


@dataclass
class FactorIso:
    """Isomorphism ``Phi_{l'l}: H_{l'} -> Ht_{l'l} (x) H_l``."""

    larger: object
    smaller: object
    matrix: np.ndarray


@dataclass
class ThreeFactorIso:
    """Isomorphism ``Phi_{l''l'l}: Ht_{l''l} -> Ht_{l''l'} (x) Ht_{l'l}``."""

    top: object
    middle: object
    bottom: object
    matrix: np.ndarray


@dataclass
class AlgebraState:
    """State on the algebra of a finite space, as a density matrix.

    Hermiticity and unit trace are checked to `tolerance`, positivity
    to `psd_tolerance` (smallest eigenvalue ``>= -psd_tolerance``).
    """

    rho: np.ndarray
    tolerance: float = field(default=DEFAULT_TOLERANCE, repr=False)
    psd_tolerance: float = field(default=DEFAULT_TOLERANCE, repr=False)

    def __post_init__(self):
        rho = np.asarray(self.rho, dtype=complex)
        if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
            msg = f"Density matrices must be square, got shape {rho.shape}"
            raise PQSValueError(msg)
        if max_deviation(rho, rho.conj().T) > self.tolerance:
            raise PQSValueError("Density matrix is not Hermitian")
        trace = np.trace(rho)
        if abs(trace - 1) > self.tolerance:
            msg = f"Density matrix has trace {trace}, expected 1"
            raise PQSValueError(msg)
        smallest = float(np.linalg.eigvalsh((rho + rho.conj().T) / 2).min())
        if smallest < -self.psd_tolerance:
            msg = ("Density matrix is not positive semi-definite (smallest "
                   f"eigenvalue {smallest})")
            raise PQSValueError(msg)
        self.rho = rho

    @classmethod
    def maximally_mixed(cls, dim):
        """The state ``1 / dim``."""
        return cls(np.eye(dim, dtype=complex) / dim)

    @property
    def dim(self):
        """int: Dimension of the underlying space."""
        return self.rho.shape[0]

    def expectation(self, operator):
        """``tr(rho a)``."""
        return complex(np.trace(self.rho @ operator))


def order_closure(shape):
    """Reflexive-transitive closure of a generating order.

    Parameters
    ----------
    shape : nx.DiGraph
        Edge ``a -> b`` means ``a >= b``.

    Returns
    -------
    nx.DiGraph
    """
    return nx.transitive_closure(shape, reflexive=True)


def is_directed(order):
    """Whether every pair of indices has a common upper bound."""
    for a, b in itertools.combinations(order.nodes, 2):
        if not set(order.predecessors(a)) & set(order.predecessors(b)):
            return False
    return True


class FactorizedFamily:
    """Family of factorized Hilbert spaces over a finite directed set."""

    def __init__(self, order, spaces, factors, isos, triple_isos):
        """
        Parameters
        ----------
        order : nx.DiGraph
            Generating order; edge ``a -> b`` means ``a >= b``. Closed
            reflexively and transitively on construction.
        spaces : dict
            Index -> :class:`FiniteHilbert` ``H_l``.
        factors : dict
            ``(l', l)`` -> :class:`FiniteHilbert` ``Ht_{l'l}`` for every
            comparable pair ``l' >= l``.
        isos : dict
            ``(l', l)`` -> complex matrix of ``Phi_{l'l}``.
        triple_isos : dict
            ``(l'', l', l)`` -> complex matrix of ``Phi_{l''l'l}`` for
            every comparable triple ``l'' >= l' >= l``.
        """
        self.order = order_closure(order)
        self.spaces = dict(spaces)
        self.factors = dict(factors)
        self.isos = {k: FactorIso(k[0], k[1], np.asarray(v, dtype=complex))
                     for k, v in isos.items()}
        self.triple_isos = {k: ThreeFactorIso(*k, np.asarray(v,
                                                             dtype=complex))
                            for k, v in triple_isos.items()}
        self._check_structure()

    def _check_structure(self):
        missing = set(self.order.nodes) - set(self.spaces)
        if missing:
            msg = f"Indices {sorted(map(str, missing))} have no Hilbert space"
            raise PQSStructureError(msg)
        for larger, smaller in self.comparable_pairs():
            try:
                factor = self.factors[(larger, smaller)]
                matrix = self.isos[(larger, smaller)].matrix
            except KeyError:
                msg = (f"Comparable pair ({larger!r}, {smaller!r}) lacks a "
                       "factor space or isomorphism")
                raise PQSStructureError(msg) from None
            expected = (factor.dim * self.spaces[smaller].dim,
                        self.spaces[larger].dim)
            if matrix.shape != expected:
                msg = (f"Isomorphism ({larger!r}, {smaller!r}) has shape "
                       f"{matrix.shape}, expected {expected} "
                       "(factor dim x space dim, source dim)")
                raise PQSStructureError(msg)
        for top, middle, bottom in self.comparable_triples():
            try:
                matrix = self.triple_isos[(top, middle, bottom)].matrix
            except KeyError:
                msg = (f"Comparable triple ({top!r}, {middle!r}, {bottom!r}) "
                       "lacks a three-factor isomorphism")
                raise PQSStructureError(msg) from None
            expected = (self.factors[(top, middle)].dim
                        * self.factors[(middle, bottom)].dim,
                        self.factors[(top, bottom)].dim)
            if matrix.shape != expected:
                msg = (f"Three-factor isomorphism ({top!r}, {middle!r}, "
                       f"{bottom!r}) has shape {matrix.shape}, expected "
                       f"{expected}")
                raise PQSStructureError(msg)

    def __repr__(self):
        return (f"FactorizedFamily(n_indices={len(self.indices)}, "
                f"dims={[self.spaces[i].dim for i in self.indices]})")

    @property
    def indices(self):
        """list: Indices in a deterministic order."""
        return sorted(self.order.nodes, key=str)

    def geq(self, larger, smaller):
        """Whether ``larger >= smaller``."""
        return self.order.has_edge(larger, smaller)

    def comparable_pairs(self):
        """All ``(l', l)`` with ``l' >= l``, in deterministic order."""
        return sorted(self.order.edges, key=lambda e: tuple(map(str, e)))

    def comparable_triples(self):
        """All ``(l'', l', l)`` with ``l'' >= l' >= l``."""
        return [(top, middle, bottom)
                for top, middle in self.comparable_pairs()
                for bottom in sorted(self.order.successors(middle), key=str)]

    @property
    def is_directed(self):
        """bool: Whether the index set is directed."""
        return is_directed(self.order)

    def tops(self):
        """Indices that dominate every index."""
        nodes = set(self.order.nodes)
        return [n for n in self.indices
                if set(self.order.successors(n)) == nodes]

    def iso(self, larger, smaller):
        """Matrix of ``Phi_{l'l}``."""
        try:
            return self.isos[(larger, smaller)].matrix
        except KeyError:
            msg = f"Indices {larger!r} >= {smaller!r} are not comparable"
            raise PQSKeyError(msg) from None

    def triple_iso(self, top, middle, bottom):
        """Matrix of ``Phi_{l''l'l}``."""
        try:
            return self.triple_isos[(top, middle, bottom)].matrix
        except KeyError:
            msg = (f"Indices {top!r} >= {middle!r} >= {bottom!r} are not a "
                   "comparable triple")
            raise PQSKeyError(msg) from None

    def factor_dim(self, larger, smaller):
        """Dimension of ``Ht_{l'l}``."""
        return self.factors[(larger, smaller)].dim

    def dim(self, index):
        """Dimension of ``H_l``."""
        return self.spaces[index].dim


def slot_permutation(source, target, dims):
    """Permutation matrix reordering tensor factors labeled by slots.

    Parameters
    ----------
    source : sequence
        Slot order of the source product space.
    target : sequence
        Slot order of the target product space (same slots).
    dims : dict
        Slot -> dimension.

    Returns
    -------
    np.ndarray
        Real permutation matrix mapping source to target layout.
    """
    source, target = list(source), list(target)
    if sorted(map(str, source)) != sorted(map(str, target)):
        msg = f"Slot orders {source} and {target} differ as sets"
        raise PQSStructureError(msg)
    shape = [dims[s] for s in source]
    total = math.prod(shape)
    axes = [source.index(s) for s in target]
    basis = np.eye(total).reshape([total] + shape)
    moved = np.transpose(basis, [0] + [a + 1 for a in axes])
    return moved.reshape(total, total).T


def _slot_order(slots):
    return sorted(slots, key=str)


def generate_family(shape, slot_dims, rng=None, exact=False):
    """Generate a family of factorized Hilbert spaces from slot data.

    Every index carries a finite set of slots; ``H_l`` is the product of
    per-slot spaces and ``Ht_{l'l}`` the product over the slots of ``l'``
    missing from ``l``. Each space and factor is related to its sorted
    slot product by a random unitary, and the isomorphisms are slot
    reorderings conjugated by those unitaries, so the factorization
    diagram commutes by construction.

    Parameters
    ----------
    shape : nx.DiGraph
        Generating order (edge ``a -> b`` means ``a >= b``); every node
        has a ``"slots"`` attribute.
    slot_dims : dict
        Slot -> dimension (>= 1).
    rng : np.random.Generator, optional
        Random generator. By default, ``None``, which seeds a new one.
    exact : bool, optional
        Use signed permutation unitaries so every product is exact.
        By default, ``False``.

    Returns
    -------
    FactorizedFamily
    """
    rng = rng or make_rng()
    order = order_closure(shape)
    if not is_directed(order):
        raise PQSStructureError("Index set of the family is not directed")
    slots = {}
    for node, data in shape.nodes(data=True):
        if "slots" not in data:
            msg = f"Index {node!r} has no 'slots' attribute"
            raise PQSStructureError(msg)
        slots[node] = frozenset(data["slots"])
        unknown = slots[node] - set(slot_dims)
        if unknown:
            msg = f"Index {node!r} uses slots {sorted(unknown)} without dims"
            raise PQSStructureError(msg)
    for larger, smaller in order.edges:
        if not slots[smaller] <= slots[larger]:
            msg = (f"Slots are not monotone: {larger!r} >= {smaller!r} but "
                   f"{sorted(slots[smaller] - slots[larger])} are missing")
            raise PQSStructureError(msg)

    def _dim(slot_set):
        return math.prod(int(slot_dims[s]) for s in slot_set)

    nodes = sorted(order.nodes, key=str)
    spaces = {n: FiniteHilbert(_dim(slots[n])) for n in nodes}
    unitaries = {n: random_unitary(rng, spaces[n].dim, exact) for n in nodes}

    pairs = sorted(order.edges, key=lambda e: tuple(map(str, e)))
    factors, complements = {}, {}
    for larger, smaller in pairs:
        extra = slots[larger] - slots[smaller]
        factors[(larger, smaller)] = FiniteHilbert(_dim(extra))
        complements[(larger, smaller)] = (
            np.eye(1, dtype=complex) if larger == smaller
            else random_unitary(rng, _dim(extra), exact))

    isos = {}
    for larger, smaller in pairs:
        extra = _slot_order(slots[larger] - slots[smaller])
        reorder = slot_permutation(_slot_order(slots[larger]),
                                   extra + _slot_order(slots[smaller]),
                                   slot_dims)
        inverse = np.kron(complements[(larger, smaller)].conj().T,
                          unitaries[smaller].conj().T)
        isos[(larger, smaller)] = inverse @ reorder @ unitaries[larger]

    triple_isos = {}
    for top, middle in pairs:
        for bottom in sorted(order.successors(middle), key=str):
            upper = _slot_order(slots[top] - slots[middle])
            lower = _slot_order(slots[middle] - slots[bottom])
            reorder = slot_permutation(
                _slot_order(slots[top] - slots[bottom]), upper + lower,
                slot_dims)
            inverse = np.kron(complements[(top, middle)].conj().T,
                              complements[(middle, bottom)].conj().T)
            triple_isos[(top, middle, bottom)] = (
                inverse @ reorder @ complements[(top, bottom)])

    logger.debug("Generated family over %d indices (dims %s)", len(nodes),
                 [spaces[n].dim for n in nodes])
    return FactorizedFamily(shape, spaces, factors, isos, triple_isos)


def random_directed_shape(rng, n_nodes, slot_dims):
    """Random directed set of slot sets ordered by inclusion.

    Parameters
    ----------
    rng : np.random.Generator
        Random generator.
    n_nodes : int
        Number of indices (>= 1); the last one carries every slot and
        dominates the others.
    slot_dims : dict
        Slot -> dimension.

    Returns
    -------
    nx.DiGraph
        Generating order with a ``"slots"`` attribute per node.
    """
    all_slots = frozenset(slot_dims)
    chosen = [all_slots]
    attempts = 0
    while len(chosen) < n_nodes and attempts < 100 * n_nodes:
        attempts += 1
        mask = rng.random(len(all_slots)) < 0.5
        subset = frozenset(s for s, keep in zip(sorted(all_slots, key=str),
                                                 mask) if keep)
        if subset not in chosen:
            chosen.append(subset)
    shape = nx.DiGraph()
    names = [f"l{i}" for i in range(len(chosen))]
    for name, subset in zip(names, chosen):
        shape.add_node(name, slots=sorted(subset, key=str))
    for (a, sa), (b, sb) in itertools.permutations(zip(names, chosen), 2):
        if sb < sa:
            shape.add_edge(a, b)
    return shape


def _triviality_deviation(matrix):
    """Distance of a matrix from ``c * 1`` with ``|c| = 1``."""
    if matrix.shape[0] != matrix.shape[1]:
        return float("inf")
    c = matrix[0, 0]
    return max(max_deviation(matrix, c * np.eye(matrix.shape[0])),
               abs(abs(c) - 1))


def _check(name, deviations, tol):
    """Aggregate ``(deviation, witness)`` pairs into a check result."""
    worst, witness = 0.0, None
    for deviation, where in deviations:
        if deviation > worst:
            worst, witness = deviation, where
    passed = worst <= tol
    return {"check": name, "passed": passed, "max_deviation": worst,
            "witness": None if passed else witness}


def _report(checks):
    return {"passed": all(c["passed"] for c in checks),
            "max_deviation": max((c["max_deviation"] for c in checks),
                                 default=0.0),
            "checks": checks}


def _diagram_deviation(fam, triple):
    top, middle, bottom = triple
    lhs = np.kron(fam.triple_iso(top, middle, bottom),
                  np.eye(fam.dim(bottom))) @ fam.iso(top, bottom)
    rhs = np.kron(np.eye(fam.factor_dim(top, middle)),
                  fam.iso(middle, bottom)) @ fam.iso(top, middle)
    return max_deviation(lhs, rhs)


def verify_family(fam, tol=DEFAULT_TOLERANCE, runner=None):
    """Check the defining properties of a family of factorized spaces.

    Parameters
    ----------
    fam : FactorizedFamily
        Family to check.
    tol : float, optional
        Identity tolerance. By default, :obj:`DEFAULT_TOLERANCE`.
    runner : pqs.utilities.parallel.CheckRunner, optional
        Runner for the per-triple diagram checks. By default, ``None``.

    Returns
    -------
    dict
        Report with one entry per check (``directed``, ``dimensions``,
        ``unitarity``, ``triviality``, ``diagram``) and the overall
        maximal deviation.
    """
    runner = runner or CheckRunner()
    pairs = fam.comparable_pairs()
    triples = fam.comparable_triples()

    directed = {"check": "directed", "passed": fam.is_directed,
                "max_deviation": 0.0, "witness": None}

    dims = []
    for index in fam.indices:
        if fam.factor_dim(index, index) != 1:
            dims.append((float(fam.factor_dim(index, index)),
                         {"pair": [str(index), str(index)]}))

    unitarity = []
    for pair in pairs:
        matrix = fam.iso(*pair)
        unitarity.append((max_deviation(matrix.conj().T @ matrix,
                                     np.eye(matrix.shape[1])),
                          {"pair": list(map(str, pair))}))
    for triple in triples:
        matrix = fam.triple_iso(*triple)
        unitarity.append((max_deviation(matrix.conj().T @ matrix,
                                     np.eye(matrix.shape[1])),
                          {"triple": list(map(str, triple))}))

    trivial = [(_triviality_deviation(fam.iso(i, i)), {"pair": [str(i)] * 2})
               for i in fam.indices]
    for top, middle, bottom in triples:
        if top == middle or middle == bottom:
            trivial.append((_triviality_deviation(
                fam.triple_iso(top, middle, bottom)),
                {"triple": [str(top), str(middle), str(bottom)]}))

    diagram = zip(runner.map(lambda t: _diagram_deviation(fam, t), triples),
                  [{"triple": list(map(str, t))} for t in triples])

    checks = [directed, _check("dimensions", dims, 0),
              _check("unitarity", unitarity, tol),
              _check("triviality", trivial, tol),
              _check("diagram", diagram, tol)]
    report = _report(checks)
    logger.info("Family verification %s (max deviation %.3g over %d "
                "triples)", "passed" if report["passed"] else "FAILED",
                report["max_deviation"], len(triples))
    return report


def embed_operator(fam, larger, smaller, operator):
    """Embed an operator on ``H_l`` into ``H_{l'}``.

    Parameters
    ----------
    fam : FactorizedFamily
        Family.
    larger, smaller : hashable
        Indices with ``larger >= smaller``.
    operator : np.ndarray
        Square matrix on ``H_smaller``.

    Returns
    -------
    np.ndarray
        ``Phi^-1 (1 (x) a) Phi`` on ``H_larger``.
    """
    operator = np.asarray(operator, dtype=complex)
    dim = fam.dim(smaller)
    if operator.shape != (dim, dim):
        msg = (f"Operator of shape {operator.shape} does not act on a space "
               f"of dimension {dim}")
        raise PQSStructureError(msg)
    phi = fam.iso(larger, smaller)
    lifted = np.kron(np.eye(fam.factor_dim(larger, smaller)), operator)
    return phi.conj().T @ lifted @ phi


def _matrix_units(dim):
    for i, j in itertools.product(range(dim), repeat=2):
        unit = np.zeros((dim, dim), dtype=complex)
        unit[i, j] = 1
        yield (i, j), unit


def _random_operator(rng, dim):
    return rng.standard_normal((dim, dim)) + 1j * rng.standard_normal(
        (dim, dim))


def check_embedding(fam, rng=None, tol=DEFAULT_TOLERANCE):
    """Check that every embedding is an injective unital *-homomorphism.

    Parameters
    ----------
    fam : FactorizedFamily
        Family.
    rng : np.random.Generator, optional
        Random generator for test operators. By default, ``None``.
    tol : float, optional
        Identity tolerance. By default, :obj:`DEFAULT_TOLERANCE`.

    Returns
    -------
    dict
        Report with ``multiplicative``, ``star``, ``unital`` and
        ``injective`` checks.
    """
    rng = rng or make_rng()
    multiplicative, star, unital, injective = [], [], [], []
    for larger, smaller in fam.comparable_pairs():
        where = {"pair": [str(larger), str(smaller)]}
        dim = fam.dim(smaller)
        a, b = _random_operator(rng, dim), _random_operator(rng, dim)
        scale = max(1.0, float(np.abs(a).max() * np.abs(b).max() * dim))

        def iota(x):
            return embed_operator(fam, larger, smaller, x)

        multiplicative.append((max_deviation(iota(a @ b), iota(a) @ iota(b))
                               / scale, where))
        star.append((max_deviation(iota(a.conj().T), iota(a).conj().T), where))
        unital.append((max_deviation(iota(np.eye(dim)),
                                  np.eye(fam.dim(larger))), where))
        images = np.array([iota(unit).reshape(-1)
                           for _, unit in _matrix_units(dim)])
        rank = np.linalg.matrix_rank(images)
        injective.append((float(dim * dim - rank), where))
    return _report([_check("multiplicative", multiplicative, tol),
                    _check("star", star, tol),
                    _check("unital", unital, tol),
                    _check("injective", injective, 0)])


def _inductive_deviation(fam, triple):
    top, middle, bottom = triple
    worst = 0.0
    for _, unit in _matrix_units(fam.dim(bottom)):
        twice = embed_operator(fam, top, middle,
                               embed_operator(fam, middle, bottom, unit))
        once = embed_operator(fam, top, bottom, unit)
        worst = max(worst, max_deviation(twice, once))
    return worst


def check_inductive(fam, tol=DEFAULT_TOLERANCE, runner=None):
    """Check ``i_{l''l'} o i_{l'l} = i_{l''l}`` on matrix units.

    Parameters
    ----------
    fam : FactorizedFamily
        Family.
    tol : float, optional
        Identity tolerance. By default, :obj:`DEFAULT_TOLERANCE`.
    runner : pqs.utilities.parallel.CheckRunner, optional
        Runner for the per-triple checks. By default, ``None``.

    Returns
    -------
    dict
        Report with a single ``inductive`` check.
    """
    runner = runner or CheckRunner()
    triples = fam.comparable_triples()
    deviations = runner.map(lambda t: _inductive_deviation(fam, t), triples)
    where = [{"triple": list(map(str, t))} for t in triples]
    return _report([_check("inductive", zip(deviations, where), tol)])


def _as_state(state):
    return state if isinstance(state, AlgebraState) else AlgebraState(state)


def pullback_state(fam, larger, smaller, state):
    """Pull a state on ``H_{l'}`` back to ``H_l``.

    The pulled-back density matrix is the partial trace over the
    complement factor of ``Phi rho Phi^-1``, so that
    ``tr(rho i(a)) = tr(Pi(rho) a)``.

    Parameters
    ----------
    fam : FactorizedFamily
        Family.
    larger, smaller : hashable
        Indices with ``larger >= smaller``.
    state : AlgebraState | np.ndarray
        State on ``H_larger``.

    Returns
    -------
    AlgebraState
    """
    state = _as_state(state)
    if state.dim != fam.dim(larger):
        msg = (f"State of dimension {state.dim} does not live on index "
               f"{larger!r} of dimension {fam.dim(larger)}")
        raise PQSStructureError(msg)
    phi = fam.iso(larger, smaller)
    moved = phi @ state.rho @ phi.conj().T
    factor, dim = fam.factor_dim(larger, smaller), fam.dim(smaller)
    reduced = np.einsum("ijik->jk", moved.reshape(factor, dim, factor, dim))
    return AlgebraState(reduced, psd_tolerance=PSD_TOLERANCE)


def projective_net(fam, top_state):
    """Consistent net of states determined by a state at a top index.

    Parameters
    ----------
    fam : FactorizedFamily
        Family over a finite directed set (which has a top index).
    top_state : AlgebraState | np.ndarray
        State on ``H_top`` for the first top index.

    Returns
    -------
    dict
        Index -> :class:`AlgebraState`.
    """
    tops = fam.tops()
    if not tops:
        raise PQSStructureError("Family has no index dominating all others")
    top = tops[0]
    return {index: pullback_state(fam, top, index, top_state)
            for index in fam.indices}


def _composition_deviation(fam, triple, rho):
    top, middle, bottom = triple
    twice = pullback_state(fam, middle, bottom,
                           pullback_state(fam, top, middle, rho))
    once = pullback_state(fam, top, bottom, rho)
    return max_deviation(twice.rho, once.rho)


def check_projective(fam, top_state=None, rng=None, tol=DEFAULT_TOLERANCE):
    """Check the pull-back composition law and the consistency of nets.

    Parameters
    ----------
    fam : FactorizedFamily
        Family.
    top_state : AlgebraState | np.ndarray, optional
        State at the first top index used to build the net.
        By default, ``None``, which draws a random density matrix.
    rng : np.random.Generator, optional
        Random generator. By default, ``None``.
    tol : float, optional
        Identity tolerance. By default, :obj:`DEFAULT_TOLERANCE`.

    Returns
    -------
    dict
        Report with ``composition``, ``duality`` and ``net`` checks.
    """
    rng = rng or make_rng()
    composition = []
    for triple in fam.comparable_triples():
        rho = random_density_matrix(rng, fam.dim(triple[0]))
        composition.append((_composition_deviation(fam, triple, rho),
                            {"triple": list(map(str, triple))}))

    duality = []
    for larger, smaller in fam.comparable_pairs():
        rho = AlgebraState(random_density_matrix(rng, fam.dim(larger)))
        a = _random_operator(rng, fam.dim(smaller))
        lhs = rho.expectation(embed_operator(fam, larger, smaller, a))
        rhs = pullback_state(fam, larger, smaller, rho).expectation(a)
        duality.append((abs(lhs - rhs) / max(1.0, abs(lhs)),
                        {"pair": [str(larger), str(smaller)]}))

    tops = fam.tops()
    if top_state is None and tops:
        top_state = random_density_matrix(rng, fam.dim(tops[0]))
    net_checks = []
    if tops:
        net = projective_net(fam, top_state)
        for larger, smaller in fam.comparable_pairs():
            pulled = pullback_state(fam, larger, smaller, net[larger])
            net_checks.append((max_deviation(pulled.rho, net[smaller].rho),
                               {"pair": [str(larger), str(smaller)]}))
    else:
        net_checks.append((float("inf"), {"tops": []}))

    return _report([_check("composition", composition, tol),
                    _check("duality", duality, tol),
                    _check("net", net_checks, tol)])


def _complex_to_dict(matrix):
    matrix = np.asarray(matrix, dtype=complex)
    return {"shape": list(matrix.shape),
            "real": matrix.real.reshape(-1).tolist(),
            "imag": matrix.imag.reshape(-1).tolist()}


def _complex_from_dict(data):
    real = np.asarray(data["real"], dtype=float)
    imag = np.asarray(data.get("imag", [0.0] * len(real)), dtype=float)
    return (real + 1j * imag).reshape(data["shape"])


def family_to_dict(fam):
    """Serialize a family (unitaries as row-major complex arrays)."""
    pairs = fam.comparable_pairs()
    return {"indices": [str(i) for i in fam.indices],
            "edges": [[str(a), str(b)] for a, b in pairs if a != b],
            "spaces": {str(i): fam.dim(i) for i in fam.indices},
            "isos": [{"larger": str(a), "smaller": str(b),
                      "factor_dim": fam.factor_dim(a, b),
                      "matrix": _complex_to_dict(fam.iso(a, b))}
                     for a, b in pairs],
            "triple_isos": [{"indices": [str(i) for i in t],
                             "matrix": _complex_to_dict(fam.triple_iso(*t))}
                            for t in fam.comparable_triples()]}


def family_from_dict(data):
    """Load a family from the output of :func:`family_to_dict`."""
    order = nx.DiGraph()
    order.add_nodes_from(data["indices"])
    order.add_edges_from(tuple(e) for e in data.get("edges", []))
    spaces = {i: FiniteHilbert(int(d)) for i, d in data["spaces"].items()}
    factors, isos = {}, {}
    for entry in data.get("isos", []):
        key = (entry["larger"], entry["smaller"])
        factors[key] = FiniteHilbert(int(entry["factor_dim"]))
        isos[key] = _complex_from_dict(entry["matrix"])
    triples = {tuple(e["indices"]): _complex_from_dict(e["matrix"])
               for e in data.get("triple_isos", [])}
    return FactorizedFamily(order, spaces, factors, isos, triples)
