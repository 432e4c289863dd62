# -*- coding: utf-8 -*-
"""
PQS finite physical systems.

A finite physical system is a pair of a finite-dimensional space of
momentum operators (given by an ordered basis) and a d.o.f. set
``K_gamma``, non-degenerate in the sense that the pairing matrix is
square and invertible. This module provides the order relation on such
systems, the constructive join proving that they form a directed set,
and the verification suite for the six admissibility conditions.
"""
import logging
from dataclasses import dataclass, field
from itertools import product

import networkx as nx
import sympy

from pqs.dof import (MomentumDof, MomentumOperator, pairing,
                     apply_momentum_operator, poisson_oracle, standard_dofs,
                     CylindricalFunction, dof_pairing)
from pqs.exceptions import (PQSDegenerateSystemError, PQSValueError,
                            PQSNotExpressibleError)
from pqs.frames import (DiscreteFrame, build_K_gamma, frame_leq,
                        join_frames, extend_frame, express_in_frame,
                        reconstruct_config, mutually_expressible)
from pqs.geometry import (OneForm, VectorField, ScalarFunction,
                          DiscreteMeasure, TangentVector, fresh_points)
from pqs.utilities.parallel import CheckRunner
from pqs.utilities.random import (make_rng, random_rationals,
                                  random_invertible_matrix)
from pqs.utilities.rational import (exact_matrix, exact_rank, exact_det,
                                    reduce_rows, independent_rows,
                                    rational_to_str)


logger = logging.getLogger(__name__)


def _matrix_to_list(matrix):
    return [[rational_to_str(v) for v in matrix.row(i)]
            for i in range(matrix.rows)]


class PairingMatrix:
    """Exact matrix ``G[beta, alpha] = pairing(op_beta, kappa_alpha)``."""

    def __init__(self, operators, dofs):
        """
        Parameters
        ----------
        operators : sequence of pqs.dof.MomentumOperator
            Row operators.
        dofs : sequence of pqs.dof.ConfigDof
            Column d.o.f.
        """
        rows = [[pairing(op, kappa, strict=False) for kappa in dofs]
                for op in operators]
        self.matrix = exact_matrix(rows, n_cols=len(dofs))

    def __repr__(self):
        return f"PairingMatrix(shape={self.shape})"

    def __eq__(self, other):
        return isinstance(other, PairingMatrix) and self.matrix == other.matrix

    __hash__ = None

    @property
    def shape(self):
        """tuple: ``(n_operators, n_dofs)``."""
        return self.matrix.shape

    @property
    def rank(self):
        """int: Exact rank."""
        return exact_rank(self.matrix)

    @property
    def det(self):
        """sympy.Rational | None: Determinant (``None`` if not square)."""
        if self.matrix.rows != self.matrix.cols:
            return None
        return exact_det(self.matrix)

    @property
    def is_identity(self):
        """bool: ``True`` for the exact identity matrix."""
        return (self.matrix.rows == self.matrix.cols
                and self.matrix == sympy.eye(self.matrix.rows))

    def zero_rows(self):
        """Indices of rows that vanish identically."""
        return [i for i in range(self.matrix.rows)
                if all(v == 0 for v in self.matrix.row(i))]

    def to_list(self):
        """Entries as nested lists of ``"p/q"`` strings."""
        return _matrix_to_list(self.matrix)


def operator_matrix(operators, sorts=None):
    """Pairing of operators against coordinate d.o.f. on their supports.

    Rows represent the operators extensionally: two rows agree iff the
    operators are equal.

    Parameters
    ----------
    operators : sequence of pqs.dof.MomentumOperator
        Operators.
    sorts : sequence of pqs.geometry.TensorSort, optional
        Sorts to pair against. By default, ``None``, which uses every
        sort the operators mention.

    Returns
    -------
    sympy.ImmutableMatrix
    """
    operators = list(operators)
    if sorts is None:
        sorts = list(dict.fromkeys(s for op in operators for s in op.sorts))
    points = {p.id: p for op in operators for p in op.support_points}
    dofs = standard_dofs([points[k] for k in sorted(points)], sorts)
    return PairingMatrix(operators, dofs).matrix


def operator_rank(operators, sorts=None):
    """Dimension of the span of a list of momentum operators."""
    operators = list(operators)
    if not operators:
        return 0
    return exact_rank(operator_matrix(operators, sorts))


def is_nondegenerate(operators, kset):
    """Whether an operator basis and a d.o.f. set form a non-degenerate pair.

    Parameters
    ----------
    operators : sequence of pqs.dof.MomentumOperator
        Candidate basis of the operator space.
    kset : pqs.frames.KGamma
        D.o.f. set.

    Returns
    -------
    bool
        ``True`` iff the operators span a space of dimension ``|K|``
        and the pairing matrix has non-zero determinant.
    """
    operators = list(operators)
    if len(operators) != len(kset):
        return False
    if operator_rank(operators) != len(kset):
        return False
    return PairingMatrix(operators, kset.dofs).det != 0


class FiniteSystem:
    """Finite physical system ``(F_hat, K_gamma)``."""

    def __init__(self, operators, kset, system_id=None, validate=True):
        """
        Parameters
        ----------
        operators : sequence of pqs.dof.MomentumOperator
            Ordered basis of the operator space ``F_hat``.
        kset : pqs.frames.KGamma
            D.o.f. set.
        system_id : str, optional
            Label used in reports. By default, ``None``.
        validate : bool, optional
            Reject degenerate pairs. Only verification code that injects
            defects on purpose should disable this. By default, ``True``.
        """
        self.operators = tuple(operators)
        self.kset = kset
        self.id = system_id
        self.validate = bool(validate)
        self._pairing_matrix = None
        if validate and not is_nondegenerate(self.operators, kset):
            msg = (f"System {system_id!r} is degenerate: "
                   f"{len(self.operators)} operators for {len(kset)} d.o.f., "
                   f"pairing matrix {self.pairing_matrix.to_list()}")
            raise PQSDegenerateSystemError(msg)

    def __repr__(self):
        return (f"FiniteSystem(id={self.id!r}, frame={self.frame!r}, "
                f"n={len(self.kset)})")

    @property
    def frame(self):
        """pqs.frames.DiscreteFrame: Frame generating ``K_gamma``."""
        return self.kset.frame

    @property
    def sorts(self):
        """tuple: Sorts of the d.o.f. set."""
        return self.kset.sorts

    @property
    def pairing_matrix(self):
        """PairingMatrix: ``G`` of the system (computed once)."""
        if self._pairing_matrix is None:
            self._pairing_matrix = PairingMatrix(self.operators,
                                                 self.kset.dofs)
        return self._pairing_matrix

    def contains_operator(self, operator):
        """Whether an operator lies in the span ``F_hat``."""
        return operators_contained([operator], self.operators)

    def to_dict(self):
        """Serialize operators, frame and pairing matrix."""
        return {"id": self.id, "frame": self.frame.to_dict(),
                "sorts": [s.label for s in self.sorts],
                "operators": [op.to_dict() for op in self.operators],
                "pairing_matrix": self.pairing_matrix.to_list()}


def pairing_matrix(system):
    """Pairing matrix ``G`` of a finite system."""
    return system.pairing_matrix


def operators_contained(smaller, larger):
    """Whether ``span(smaller)`` is a subspace of ``span(larger)``."""
    smaller, larger = list(smaller), list(larger)
    if not smaller:
        return True
    sorts = list(dict.fromkeys(s for op in smaller + larger
                               for s in op.sorts))
    return (operator_rank(larger + smaller, sorts)
            == operator_rank(larger, sorts))


class SystemRelation:
    """The order on finite systems.

    ``larger >= smaller`` iff the frame of ``larger`` dominates the frame
    of ``smaller`` and ``F_hat`` of ``smaller`` is a subspace of ``F_hat``
    of ``larger``.
    """

    def __call__(self, larger, smaller):
        return self.geq(larger, smaller)

    @staticmethod
    def geq(larger, smaller):
        """Decide ``larger >= smaller``."""
        return (frame_leq(smaller.frame, larger.frame)
                and operators_contained(smaller.operators, larger.operators))

    def graph(self, systems):
        """Relation graph with an edge ``a -> b`` whenever ``a >= b``.

        Parameters
        ----------
        systems : sequence of FiniteSystem
            Systems; nodes are their positions in the sequence.

        Returns
        -------
        nx.DiGraph
        """
        graph = nx.DiGraph()
        graph.add_nodes_from(range(len(systems)))
        for i, j in product(range(len(systems)), repeat=2):
            if self.geq(systems[i], systems[j]):
                graph.add_edge(i, j)
        return graph


def check_preorder(systems, relation=None):
    """Check reflexivity and transitivity of ``>=`` on a finite sample.

    Parameters
    ----------
    systems : sequence of FiniteSystem
        Sample of systems.
    relation : SystemRelation, optional
        Relation to check. By default, ``None``, which uses
        :class:`SystemRelation`.

    Returns
    -------
    dict
        Report with ``passed`` and the failing nodes/triples.
    """
    relation = relation or SystemRelation()
    graph = relation.graph(list(systems))
    not_reflexive = [n for n in graph.nodes if not graph.has_edge(n, n)]
    not_transitive = [(a, b, c) for a, b in graph.edges
                      for c in graph.successors(b)
                      if not graph.has_edge(a, c)]
    return {"passed": not not_reflexive and not not_transitive,
            "n_systems": graph.number_of_nodes(),
            "n_relations": graph.number_of_edges(),
            "not_reflexive": not_reflexive,
            "not_transitive": not_transitive}


def dual_operators(frame, sorts, measure=None):
    """Operators dual to ``K_gamma``: the pairing matrix is the identity.

    Each operator is a rescaled momentum d.o.f. whose forms are supported
    at one frame point only, built from the frame basis (contravariant
    slots) and its dual basis (covariant slots).

    Parameters
    ----------
    frame : pqs.frames.DiscreteFrame
        Frame.
    sorts : sequence of pqs.geometry.TensorSort
        Sorts of the theory.
    measure : pqs.geometry.DiscreteMeasure, optional
        Measure of the momentum d.o.f.; extended with unit weight to the
        frame points. By default, ``None``, which uses unit weights.

    Returns
    -------
    list of pqs.dof.MomentumOperator
        One operator per d.o.f. of ``build_K_gamma(frame, sorts)``, in
        the same order.
    """
    measure = (DiscreteMeasure.uniform(frame.points) if measure is None
               else measure.extended(frame.points))
    kset = build_K_gamma(frame, sorts)
    out = []
    for kappa in kset:
        phi = _single_point_dof(frame, kappa, measure)
        raw = dof_pairing(phi, kappa)
        out.append(MomentumOperator.from_dof(phi, 1 / raw))
    logger.debug("Built %d dual operators on %d points", len(out),
                 frame.n_points)
    return out


def _single_point_dof(frame, kappa, measure):
    """Momentum d.o.f. at the point of ``kappa`` aligned with its args."""
    sort = kappa.sort
    point = kappa.point
    if sort.is_scalar:
        return MomentumDof(sort, [ScalarFunction([(point, 1)])], measure)
    basis = frame.basis(point)
    dual = frame.dual(point)
    forms = []
    for slot, arg in enumerate(kappa.args):
        if sort.is_contravariant(slot):
            index = dual.index(arg)
            forms.append(VectorField([basis[index]]))
        else:
            index = basis.index(arg)
            forms.append(OneForm([dual[index]]))
    return MomentumDof(sort, forms, measure)


@dataclass
class IndependenceCertificate:
    """Frame on which a list of operators restricts to full rank."""

    frame: DiscreteFrame
    rank: int
    seeded: list = field(default_factory=list)
    """Point ids placed inside each operator's support."""
    added: list = field(default_factory=list)
    """Point ids added greedily to raise the rank."""


def independence_frame(operators, sorts, frame_id=None):
    """Find a frame on which independent operators stay independent.

    One point is placed inside the support of each operator; further
    support points are added greedily (lowest id first) while they raise
    the rank, until the restricted pairing matrix has full row rank.

    Parameters
    ----------
    operators : sequence of pqs.dof.MomentumOperator
        Linearly independent operators.
    sorts : sequence of pqs.geometry.TensorSort
        Sorts of the theory.
    frame_id : str, optional
        Label of the frame. By default, ``None``.

    Returns
    -------
    IndependenceCertificate
    """
    operators = list(operators)
    candidates = {p.id: p for op in operators for p in op.support_points}
    if not operators:
        msg = "Cannot search an independence frame for no operators"
        raise PQSValueError(msg)

    chosen = {}
    seeded = []
    for op in operators:
        if not op.support_points:
            msg = f"Operator {op!r} pairs to zero with every d.o.f."
            raise PQSDegenerateSystemError(msg)
        if not any(p.id in chosen for p in op.support_points):
            point = op.support_points[0]
            chosen[point.id] = point
            seeded.append(point.id)

    def _rank(points):
        frame = DiscreteFrame.standard(points)
        return PairingMatrix(operators,
                             build_K_gamma(frame, sorts).dofs).rank

    rank = _rank(chosen.values())
    added = []
    for pid in sorted(candidates):
        if rank == len(operators):
            break
        if pid in chosen:
            continue
        trial = _rank(list(chosen.values()) + [candidates[pid]])
        if trial > rank:
            chosen[pid] = candidates[pid]
            added.append(pid)
            rank = trial

    if rank < len(operators):
        msg = (f"Operators are linearly dependent: rank {rank} on all "
               f"{len(candidates)} support points for {len(operators)} "
               "operators")
        raise PQSDegenerateSystemError(msg)

    logger.debug("Independence frame: seeded %s, added %s", seeded, added)
    frame = DiscreteFrame.standard(sorted(chosen.values(),
                                          key=lambda p: p.id), frame_id)
    return IndependenceCertificate(frame, rank, seeded, added)


@dataclass
class JoinRecord:
    """Bookkeeping of the constructive join."""

    system: FiniteSystem
    """The joined system."""
    independent: tuple = ()
    """Positions (in ``first.operators + second.operators``) of the
    operators kept as a basis of the spanned space."""
    certificate: IndependenceCertificate = None
    fresh: tuple = ()
    """Ids of fresh points added to make ``N > M``."""
    initial_matrix: sympy.ImmutableMatrix = None
    """``G0``: pairing of the spanning basis against ``K_gamma''``."""
    basis_change: sympy.ImmutableMatrix = None
    """Row operations ``E`` with ``E * G0`` in reduced echelon form."""
    pivots: tuple = ()
    column_order: tuple = ()
    """Column permutation putting pivot columns first."""
    reduced_block: sympy.ImmutableMatrix = None
    """``E * G0`` with permuted columns; of the form ``[1 | G']``."""
    final_block: sympy.ImmutableMatrix = None
    """Final pairing matrix with permuted columns;
    ``[[1, G'], [0, 1']]``."""

    @property
    def has_block_form(self):
        """bool: Whether the recorded matrices have the expected blocks."""
        m = self.reduced_block.rows
        n = self.final_block.cols
        upper_ok = self.reduced_block[:, :m] == sympy.eye(m)
        final = self.final_block
        lower_ok = (final[m:, :m] == sympy.zeros(n - m, m)
                    and final[m:, m:] == sympy.eye(n - m)
                    and final[:m, :] == self.reduced_block)
        return bool(upper_ok and lower_ok)

    def to_dict(self):
        """Serialize the bookkeeping (matrices as ``"p/q"`` strings)."""
        certificate = None
        if self.certificate is not None:
            certificate = {"points": sorted(self.certificate.frame.point_ids),
                           "rank": self.certificate.rank,
                           "seeded": self.certificate.seeded,
                           "added": self.certificate.added}
        return {"system": self.system.to_dict(),
                "independent": list(self.independent),
                "certificate": certificate,
                "fresh": list(self.fresh),
                "initial_matrix": _matrix_to_list(self.initial_matrix),
                "basis_change": _matrix_to_list(self.basis_change),
                "pivots": list(self.pivots),
                "column_order": list(self.column_order),
                "reduced_block": _matrix_to_list(self.reduced_block),
                "final_block": _matrix_to_list(self.final_block),
                "block_form": self.has_block_form}


def enlarge(operators, frame, sorts, measure=None, system_id=None):
    """Complete an independent operator list to a system on a frame.

    The pairing matrix ``G0`` of the operators against ``K_gamma`` is
    brought to reduced echelon form ``[1 | G']`` (pivot columns first) by
    recombining the operators; the operators dual to the non-pivot d.o.f.
    are then appended, which gives the invertible block matrix
    ``[[1, G'], [0, 1']]``.

    Parameters
    ----------
    operators : sequence of pqs.dof.MomentumOperator
        Linearly independent operators whose restriction to
        ``K_gamma`` has full row rank.
    frame : pqs.frames.DiscreteFrame
        Frame of the enlarged system.
    sorts : sequence of pqs.geometry.TensorSort
        Sorts of the theory.
    measure : pqs.geometry.DiscreteMeasure, optional
        Measure for the appended dual operators. By default, ``None``.
    system_id : str, optional
        Label of the output system. By default, ``None``.

    Returns
    -------
    JoinRecord
        Record whose ``system`` spans the input operators.
    """
    operators = list(operators)
    kset = build_K_gamma(frame, sorts)
    initial = PairingMatrix(operators, kset.dofs).matrix
    if exact_rank(initial) < len(operators):
        msg = (f"{len(operators)} operators have rank "
               f"{exact_rank(initial)} on frame {frame!r}; cannot enlarge")
        raise PQSDegenerateSystemError(msg)

    reduced, basis_change, pivots = reduce_rows(initial)
    rest = tuple(a for a in range(len(kset)) if a not in pivots)
    column_order = tuple(pivots) + rest

    recombined = []
    for i in range(basis_change.rows):
        recombined.append(sum((operators[j] * basis_change[i, j]
                               for j in range(len(operators))
                               if basis_change[i, j] != 0),
                              MomentumOperator()))
    duals = dual_operators(frame, sorts, measure)
    new_ops = recombined + [duals[a] for a in rest]
    system = FiniteSystem(new_ops, kset, system_id)

    final = system.pairing_matrix.matrix
    permuted = sympy.ImmutableMatrix.hstack(*[final[:, a]
                                              for a in column_order])
    reduced_block = sympy.ImmutableMatrix.hstack(*[reduced[:, a]
                                                   for a in column_order])
    logger.debug("Enlarged %d operators to a system of size %d (%d "
                 "pivots)", len(operators), len(kset), len(pivots))
    return JoinRecord(system, initial_matrix=initial,
                      basis_change=basis_change, pivots=tuple(pivots),
                      column_order=column_order,
                      reduced_block=reduced_block, final_block=permuted)


def join_with_record(first, second, measure=None, system_id=None):
    """Join two finite systems, keeping the construction bookkeeping.

    Parameters
    ----------
    first, second : FiniteSystem
        Non-degenerate systems over the same sorts.
    measure : pqs.geometry.DiscreteMeasure, optional
        Measure for dual operators added by the construction.
        By default, ``None``.
    system_id : str, optional
        Label of the output system. By default, ``None``.

    Returns
    -------
    JoinRecord
        Record whose ``system`` dominates both inputs.
    """
    if set(first.sorts) != set(second.sorts):
        msg = (f"Cannot join systems over different sorts "
               f"{[s.label for s in first.sorts]} and "
               f"{[s.label for s in second.sorts]}")
        raise PQSValueError(msg)
    sorts = first.sorts

    combined = list(first.operators) + list(second.operators)
    independent = independent_rows(operator_matrix(combined, sorts))
    basis = [combined[i] for i in independent]
    certificate = independence_frame(basis, sorts)

    frame = join_frames(join_frames(first.frame, second.frame),
                        certificate.frame)
    taken = list(frame.points) + [p for op in combined for p in op.form_points]
    fresh = []
    while len(build_K_gamma(frame, sorts)) <= len(basis):
        point = fresh_points(taken, frame.dim, 1)[0]
        taken.append(point)
        fresh.append(point.id)
        frame = extend_frame(frame, [point])

    record = enlarge(basis, frame, sorts, measure, system_id)
    record.independent = tuple(independent)
    record.certificate = certificate
    record.fresh = tuple(fresh)
    logger.info("Joined systems %r and %r into a system with %d d.o.f. on "
                "%d points", first.id, second.id, len(record.system.kset),
                frame.n_points)
    return record


def join(first, second, measure=None, system_id=None):
    """Finite system dominating both inputs (see :func:`join_with_record`).
    """
    return join_with_record(first, second, measure, system_id).system


def system_from_frame(frame, sorts, measure=None, system_id=None):
    """System of the operators dual to the d.o.f. of a frame."""
    kset = build_K_gamma(frame, sorts)
    return FiniteSystem(dual_operators(frame, sorts, measure), kset,
                        system_id)


def system_containing(operator, sorts, measure=None, system_id=None):
    """Non-degenerate single-point system whose ``F_hat`` holds an operator.

    At the first support point where the operator pairs non-zero with a
    coordinate-frame d.o.f. ``kappa``, the dual operator of ``kappa`` is
    exchanged for the given operator.

    Parameters
    ----------
    operator : pqs.dof.MomentumOperator | pqs.dof.MomentumDof
        Operator to contain.
    sorts : sequence of pqs.geometry.TensorSort
        Sorts of the theory.
    measure : pqs.geometry.DiscreteMeasure, optional
        Measure for the dual operators. By default, ``None``.
    system_id : str, optional
        Label of the output system. By default, ``None``.

    Returns
    -------
    FiniteSystem
    """
    if isinstance(operator, MomentumDof):
        operator = MomentumOperator.from_dof(operator)
    for point in operator.support_points:
        frame = DiscreteFrame.standard([point])
        kset = build_K_gamma(frame, sorts)
        for alpha, kappa in enumerate(kset):
            if pairing(operator, kappa, strict=False) != 0:
                ops = dual_operators(frame, sorts, measure)
                ops[alpha] = operator
                return FiniteSystem(ops, kset, system_id)
    msg = f"Operator {operator!r} pairs to zero with every d.o.f."
    raise PQSDegenerateSystemError(msg)


def rebase_system(system, rng, system_id=None):
    """Same operators over a frame with random bases at the same points."""
    entries = []
    for point in system.frame.points:
        matrix = random_invertible_matrix(rng, point.dim)
        entries.append((point, [TangentVector(point, list(matrix.col(i)))
                                for i in range(point.dim)]))
    frame = DiscreteFrame(entries, system.frame.id)
    return FiniteSystem(system.operators, build_K_gamma(frame, system.sorts),
                        system_id or system.id)


def random_system(rng, sorts, points, n_points=None, recombine=True,
                  measure=None, system_id=None):
    """Random non-degenerate system on a subset of a point pool.

    Parameters
    ----------
    rng : np.random.Generator
        Random generator.
    sorts : sequence of pqs.geometry.TensorSort
        Sorts of the theory.
    points : sequence of pqs.geometry.Point
        Point pool.
    n_points : int, optional
        Number of frame points. By default, ``None``, which draws
        between 1 and 2.
    recombine : bool, optional
        Replace the dual operators by a random invertible recombination.
        By default, ``True``.
    measure : pqs.geometry.DiscreteMeasure, optional
        Measure for the operators. By default, ``None``.
    system_id : str, optional
        Label of the system. By default, ``None``.

    Returns
    -------
    FiniteSystem
    """
    points = list(points)
    if n_points is None:
        n_points = int(rng.integers(1, 3))
    chosen = [points[i] for i in sorted(rng.choice(len(points), n_points,
                                                   replace=False))]
    entries = []
    for point in chosen:
        matrix = random_invertible_matrix(rng, point.dim)
        entries.append((point, [TangentVector(point, list(matrix.col(i)))
                                for i in range(point.dim)]))
    frame = DiscreteFrame(entries)
    kset = build_K_gamma(frame, sorts)
    ops = dual_operators(frame, sorts, measure)
    if recombine:
        mix = random_invertible_matrix(rng, len(ops), max_num=2, max_den=1)
        ops = [sum((ops[j] * mix[i, j] for j in range(len(ops))
                    if mix[i, j] != 0), MomentumOperator())
               for i in range(len(ops))]
    return FiniteSystem(ops, kset, system_id)


CONDITION_DESCRIPTIONS = {
    "1a": "every configurational d.o.f. is cylindrical over some K",
    "1b": "every momentum d.o.f. lies in some F_hat",
    "2": "K_tilde maps onto R^N",
    "3a": "momentum operators act as derivations (Leibniz rule)",
    "3b": "pairings are constant functions on configuration space",
    "4": "dim F_hat = N and G is non-degenerate",
    "5": "equal reduced configuration spaces imply >= both ways",
    "6a": "lambda' >= lambda implies K is expressible in K'",
    "6b": "lambda' >= lambda implies F_hat is a subspace of F_hat'",
}
"""Admissibility conditions checked by :func:`check_conditions`."""


def _result(name, failures, checked):
    witness = failures[0] if failures else None
    return {"condition": name, "description": CONDITION_DESCRIPTIONS[name],
            "passed": not failures, "checked": checked,
            "n_failures": len(failures), "witness": witness}


def _check_1a(kappa, sorts, measure):
    frame = DiscreteFrame.standard([kappa.point])
    try:
        combination = express_in_frame(kappa, frame)
        system = system_from_frame(frame, sorts, measure)
    except (PQSNotExpressibleError, PQSDegenerateSystemError):
        return {"dof": kappa.to_dict()}
    kset = system.kset
    if not all(k in kset for _, k in combination):
        return {"dof": kappa.to_dict()}
    return None


def _check_1b(phi, sorts, measure):
    try:
        system = system_containing(phi, sorts, measure)
    except PQSDegenerateSystemError:
        return {"dof": phi.to_dict()}
    if not system.contains_operator(MomentumOperator.from_dof(phi)):
        return {"dof": phi.to_dict()}
    return None


def random_cylindrical_function(rng, base, n_terms=3, max_degree=2):
    """Random polynomial cylindrical function over a d.o.f. base.

    Parameters
    ----------
    rng : np.random.Generator
        Random generator.
    base : sequence of pqs.dof.ConfigDof
        Independent d.o.f. the function depends on.
    n_terms : int, optional
        Number of monomials drawn. By default, ``3``.
    max_degree : int, optional
        Maximal degree of each monomial. By default, ``2``.

    Returns
    -------
    pqs.dof.CylindricalFunction
    """
    terms = []
    for _ in range(n_terms):
        exps = [0] * len(base)
        for _ in range(int(rng.integers(1, max_degree + 1))):
            exps[int(rng.integers(len(base)))] += 1
        terms.append((random_rationals(rng, 1, nonzero=True)[0], exps))
    return CylindricalFunction.from_terms(base, terms)


def _system_checks(system, rng):
    """Conditions 2, 3a, 3b and 4 for one system; failures per condition."""
    failures = {"2": [], "3a": [], "3b": [], "4": []}
    label = system.id
    kset = system.kset

    if not is_nondegenerate(system.operators, kset):
        failures["4"].append({
            "system": label, "n_operators": len(system.operators),
            "n_dofs": len(kset),
            "zero_rows": system.pairing_matrix.zero_rows(),
            "pairing_matrix": system.pairing_matrix.to_list()})

    for target in ([0] * len(kset), random_rationals(rng, len(kset))):
        q = reconstruct_config(kset, target)
        if list(kset.coordinates(q)) != list(target):
            failures["2"].append({"system": label,
                                  "target": [str(t) for t in target]})

    psi_1 = random_cylindrical_function(rng, kset.dofs)
    psi_2 = random_cylindrical_function(rng, kset.dofs)
    for beta, op in enumerate(system.operators):
        lhs = apply_momentum_operator(op, psi_1 * psi_2)
        rhs = (apply_momentum_operator(op, psi_1) * psi_2
               + psi_1 * apply_momentum_operator(op, psi_2))
        if lhs != rhs:
            failures["3a"].append({"system": label, "operator": beta})

        alpha = int(rng.integers(len(kset)))
        for column in sorted({beta % len(kset), alpha}):
            kappa = kset[column]
            value = poisson_oracle(op, kappa)
            expected = pairing(op, kappa, strict=False)
            if not isinstance(value, sympy.Rational) or value != expected:
                failures["3b"].append({"system": label, "operator": beta,
                                       "dof": column, "bracket": str(value),
                                       "pairing": str(expected)})
    return failures


def check_conditions(systems, config_dofs=(), momentum_dofs=(), sorts=None,
                     measure=None, rng=None, runner=None, relation=None):
    """Verify the six admissibility conditions on a finite sample.

    Parameters
    ----------
    systems : sequence of FiniteSystem
        Sample of the directed set (may include injected defects built
        with ``validate=False``).
    config_dofs : sequence of pqs.dof.ConfigDof, optional
        Elementary configurational d.o.f. to check for Condition 1a.
        By default, ``()``; the d.o.f. of every system are always
        checked too.
    momentum_dofs : sequence of pqs.dof.MomentumDof, optional
        Elementary momentum d.o.f. to check for Condition 1b.
        By default, ``()``; the d.o.f. in the operator terms of every
        system are always checked too.
    sorts : sequence of pqs.geometry.TensorSort, optional
        Sorts of the theory. By default, ``None``, which takes the sorts
        of the first system.
    measure : pqs.geometry.DiscreteMeasure, optional
        Measure for constructed dual operators. By default, ``None``.
    rng : np.random.Generator, optional
        Random generator for targets, polynomials and rebased frames.
        By default, ``None``, which seeds a new one.
    runner : pqs.utilities.parallel.CheckRunner, optional
        Runner for the per-system checks. By default, ``None``, which
        runs sequentially.
    relation : SystemRelation, optional
        Order the sample is checked against. Conditions 5 and 6 compare
        it with mutual expressibility, frame expressibility and operator
        containment, which are decided independently of it.
        By default, ``None``, which uses :class:`SystemRelation`.

    Returns
    -------
    dict
        ``{"passed": bool, "conditions": [per-condition results]}``; each
        failing condition carries the first counterexample as
        ``witness``.
    """
    systems = list(systems)
    rng = rng or make_rng()
    runner = runner or CheckRunner()
    if sorts is None:
        sorts = systems[0].sorts if systems else ()
    relation = relation or SystemRelation()

    kappas = list(dict.fromkeys(list(config_dofs)
                                + [k for s in systems for k in s.kset]))
    phis = list(momentum_dofs)
    seen = {id(p) for p in phis}
    for system in systems:
        for op in system.operators:
            for _, phi in op.terms:
                if id(phi) not in seen:
                    seen.add(id(phi))
                    phis.append(phi)
    logger.info("Checking conditions on %d systems, %d config d.o.f. and "
                "%d momentum d.o.f.", len(systems), len(kappas), len(phis))

    fail_1a = [w for w in runner.map(lambda k: _check_1a(k, sorts, measure),
                                     kappas) if w]
    fail_1b = [w for w in runner.map(lambda p: _check_1b(p, sorts, measure),
                                     phis) if w]

    seeds = rng.integers(0, 2 ** 32, size=len(systems))
    per_system = runner.map(lambda item: _system_checks(item[0],
                                                        make_rng(item[1])),
                            list(zip(systems, seeds)))
    merged = {"2": [], "3a": [], "3b": [], "4": []}
    for failures in per_system:
        for key, values in failures.items():
            merged[key].extend(values)

    valid = [s for s in systems if is_nondegenerate(s.operators, s.kset)]
    fail_5 = []
    for system in valid:
        other = rebase_system(system, rng)
        if not mutually_expressible(system.kset, other.kset):
            continue
        if not (relation.geq(system, other) and relation.geq(other, system)):
            fail_5.append({"system": system.id,
                           "rebased_frame": other.frame.to_dict()})
    for first, second in product(valid, repeat=2):
        if first is second or not mutually_expressible(first.kset,
                                                       second.kset):
            continue
        same_space = (operators_contained(first.operators, second.operators)
                      and operators_contained(second.operators,
                                              first.operators))
        if same_space and not relation.geq(first, second):
            fail_5.append({"systems": [first.id, second.id]})

    fail_6a, fail_6b, n_pairs = [], [], 0
    for larger, smaller in product(valid, repeat=2):
        if not relation.geq(larger, smaller):
            continue
        n_pairs += 1
        for kappa in smaller.kset:
            try:
                express_in_frame(kappa, larger.frame)
            except PQSNotExpressibleError:
                fail_6a.append({"larger": larger.id, "smaller": smaller.id,
                                "dof": kappa.to_dict()})
                break
        if not operators_contained(smaller.operators, larger.operators):
            fail_6b.append({"larger": larger.id, "smaller": smaller.id})

    results = [_result("1a", fail_1a, len(kappas)),
               _result("1b", fail_1b, len(phis)),
               _result("2", merged["2"], len(systems)),
               _result("3a", merged["3a"], len(systems)),
               _result("3b", merged["3b"], len(systems)),
               _result("4", merged["4"], len(systems)),
               _result("5", fail_5, len(valid)),
               _result("6a", fail_6a, n_pairs),
               _result("6b", fail_6b, n_pairs)]
    passed = all(r["passed"] for r in results)
    logger.info("Conditions %s", "passed" if passed else "FAILED")
    return {"passed": passed, "conditions": results}
