# -*- coding: utf-8 -*-
"""
PQS discrete frames and the induced configurational d.o.f. sets.

A discrete frame is a finite set of points, each carrying a basis of the
tangent space. Every frame generates the finite d.o.f. set ``K_gamma``
whose values coordinatize the reduced configuration space.
"""
import logging

import numpy as np
import sympy

from pqs.dof import ConfigDof, dofs_at, eval_config_dof
from pqs.exceptions import (PQSValueError, PQSNotExpressibleError,
                            PQSSortMismatchError, PQSTypeError)
from pqs.geometry import (Point, TangentVector, ConfigField, dual_basis,
                          standard_basis, basis_matrix)
from pqs.utilities.rational import (as_rational, rational_array,
                                    rational_to_str)


logger = logging.getLogger(__name__)


class DiscreteFrame:
    """Finite set of pairwise distinct points with tangent-space bases."""

    def __init__(self, entries, frame_id=None):
        """
        Parameters
        ----------
        entries : iterable
            ``(Point, basis)`` pairs; each basis is a sequence of ``D``
            linearly independent :class:`~pqs.geometry.TangentVector`
            at the point.
        frame_id : str, optional
            Label used in reports and scenario files. By default,
            ``None``.
        """
        self.id = frame_id
        table = {}
        coords = set()
        for point, basis in entries:
            if not isinstance(point, Point):
                raise PQSTypeError(f"Frame entries need Points, got {point!r}")
            if point.id in table or point.coords in coords:
                msg = (f"Frame {frame_id!r} has repeated point "
                       f"{point.id!r}; underlying points must be pairwise "
                       "distinct")
                raise PQSValueError(msg)
            basis = tuple(basis)
            dual = dual_basis(basis)
            table[point.id] = (point, basis, dual)
            coords.add(point.coords)
        if not table:
            raise PQSValueError(f"Frame {frame_id!r} has no points")
        self._entries = dict(sorted(table.items()))

    @classmethod
    def standard(cls, points, frame_id=None):
        """Frame with the coordinate basis at every point."""
        return cls([(p, standard_basis(p)) for p in points], frame_id)

    @classmethod
    def from_matrices(cls, bases, frame_id=None):
        """Frame from ``{Point: matrix}`` with basis vectors as columns."""
        entries = []
        for point, matrix in bases.items():
            columns = np.array(matrix, dtype=object).T
            entries.append((point, [TangentVector(point, list(col))
                                    for col in columns]))
        return cls(entries, frame_id)

    def __repr__(self):
        return f"DiscreteFrame(id={self.id!r}, points={sorted(self.point_ids)})"

    def __eq__(self, other):
        return (isinstance(other, DiscreteFrame)
                and self._entries.keys() == other._entries.keys()
                and all(self.basis(k) == other.basis(k)
                        and self.point(k) == other.point(k)
                        for k in self._entries))

    def __hash__(self):
        return hash(tuple((k, v[1]) for k, v in self._entries.items()))

    @property
    def points(self):
        """list: Underlying points sorted by id."""
        return [v[0] for v in self._entries.values()]

    @property
    def point_ids(self):
        """frozenset: Ids of the underlying points."""
        return frozenset(self._entries)

    @property
    def n_points(self):
        """int: Number ``N_gamma`` of underlying points."""
        return len(self._entries)

    @property
    def dim(self):
        """int: Dimension of the tangent spaces."""
        return self.points[0].dim

    def point(self, point):
        """Underlying point with a given id (or matching Point)."""
        return self._lookup(point)[0]

    def basis(self, point):
        """Tangent-space basis at an underlying point."""
        return self._lookup(point)[1]

    def dual(self, point):
        """Dual basis at an underlying point."""
        return self._lookup(point)[2]

    def contains(self, point):
        """Whether a point (or id) underlies the frame."""
        pid = point.id if isinstance(point, Point) else str(point)
        return pid in self._entries

    def _lookup(self, point):
        pid = point.id if isinstance(point, Point) else str(point)
        try:
            return self._entries[pid]
        except KeyError:
            msg = f"Point {pid!r} does not underlie frame {self.id!r}"
            raise PQSNotExpressibleError(msg) from None

    def to_dict(self):
        """Serialize as ``{"id", "entries": [{"point", "basis"}]}``.

        Each basis is written as a list of vectors (rows are the basis
        vectors' components).
        """
        return {"id": self.id,
                "entries": [{"point": pid,
                             "basis": [[rational_to_str(c)
                                        for c in v.components]
                                       for v in basis]}
                            for pid, (_, basis, _) in self._entries.items()]}


class KGamma:
    """The ordered d.o.f. set ``K_gamma`` generated by a frame."""

    def __init__(self, frame, sorts, dofs):
        """
        Parameters
        ----------
        frame : DiscreteFrame
            Generating frame.
        sorts : sequence of pqs.geometry.TensorSort
            Sorts of the theory.
        dofs : sequence of pqs.dof.ConfigDof
            Ordered, pairwise distinct d.o.f.
        """
        self.frame = frame
        self.sorts = tuple(sorts)
        self.dofs = tuple(dofs)
        if len(set(self.dofs)) != len(self.dofs):
            raise PQSValueError("K_gamma d.o.f. must be pairwise distinct")
        self._index = {kappa: i for i, kappa in enumerate(self.dofs)}

    def __repr__(self):
        return (f"KGamma(frame={self.frame.id!r}, "
                f"sorts={[s.label for s in self.sorts]}, size={len(self)})")

    def __len__(self):
        return len(self.dofs)

    def __iter__(self):
        return iter(self.dofs)

    def __getitem__(self, index):
        return self.dofs[index]

    def __contains__(self, kappa):
        return kappa in self._index

    def index(self, kappa):
        """Position of a d.o.f. in the canonical ordering."""
        return self._index[kappa]

    def sort(self, label):
        """Sort with the given label."""
        for sort in self.sorts:
            if sort.label == label:
                return sort
        raise PQSSortMismatchError(f"K_gamma has no sort {label!r}")

    def coordinates(self, q):
        """The map ``q -> (kappa_1(q), ..., kappa_N(q))``.

        Parameters
        ----------
        q : pqs.geometry.ConfigField | dict
            Configuration field, or a mapping of sort label to field when
            ``K_gamma`` spans several sorts.

        Returns
        -------
        tuple of sympy.Rational
        """
        fields = _fields_by_label(q)
        out = []
        for kappa in self.dofs:
            try:
                field = fields[kappa.sort.label]
            except KeyError:
                msg = f"No configuration field of sort {kappa.sort.label!r}"
                raise PQSSortMismatchError(msg) from None
            out.append(eval_config_dof(kappa, field))
        return tuple(out)


def _fields_by_label(q):
    if isinstance(q, ConfigField):
        return {q.sort.label: q}
    return dict(q)


def build_K_gamma(frame, sorts):
    """Build the d.o.f. set generated by a frame.

    Parameters
    ----------
    frame : DiscreteFrame
        Frame.
    sorts : sequence of pqs.geometry.TensorSort
        Sorts of the theory; labels must be unique.

    Returns
    -------
    KGamma
        D.o.f. ordered by point id, then sort label, then orbit
        representative of the index tuple.
    """
    sorts = sorted(sorts, key=lambda s: s.label)
    labels = [s.label for s in sorts]
    if len(set(labels)) != len(labels):
        raise PQSValueError(f"Sort labels must be unique, got {labels}")
    dofs = []
    for point in frame.points:
        for sort in sorts:
            dofs.extend(dofs_at(point, frame.basis(point), sort))
    logger.trace("Built K_gamma with %d d.o.f. on %d points", len(dofs),
                 frame.n_points)
    return KGamma(frame, sorts, dofs)


def _slot_transforms(frame, point, sort):
    """Per-slot matrices taking frame components to coordinate ones."""
    matrix = basis_matrix(frame.basis(point))
    inverse = matrix.inv()
    contravariant = rational_array(matrix.T.tolist())
    covariant = rational_array(inverse.tolist())
    return [contravariant if sort.is_contravariant(k) else covariant
            for k in range(sort.rank)]


def reconstruct_config(kgamma, target):
    """Configuration on which ``K_gamma`` takes prescribed values.

    Parameters
    ----------
    kgamma : KGamma
        D.o.f. set.
    target : sequence
        One rational per d.o.f.

    Returns
    -------
    pqs.geometry.ConfigField | dict
        Field sampled at the frame points with
        ``kgamma.coordinates(q) == target``. When ``K_gamma`` spans
        several sorts a mapping of sort label to field is returned.
    """
    target = [as_rational(v) for v in target]
    if len(target) != len(kgamma):
        msg = (f"Target has {len(target)} values but K_gamma has "
               f"{len(kgamma)} d.o.f.")
        raise PQSValueError(msg)

    frame = kgamma.frame
    fields = {}
    for sort in kgamma.sorts:
        samples = {}
        for point in frame.points:
            frame_components = np.full((point.dim,) * sort.rank,
                                       sympy.Integer(0), dtype=object)
            for rep, orbit in sort.orbits(point.dim).items():
                kappa = ConfigDof(sort, point, _frame_args(frame, point,
                                                           sort, rep))
                value = target[kgamma.index(kappa)]
                for index, sign in orbit:
                    frame_components[index] = sign * value
            out = frame_components
            for slot, transform in enumerate(_slot_transforms(frame, point,
                                                              sort)):
                out = np.moveaxis(np.tensordot(out, transform,
                                               axes=([slot], [0])), -1, slot)
            samples[point] = out
        fields[sort.label] = ConfigField(sort, samples)

    if len(fields) == 1:
        return next(iter(fields.values()))
    return fields


def _frame_args(frame, point, sort, index):
    basis = frame.basis(point)
    dual = frame.dual(point)
    return [dual[i] if sort.is_contravariant(slot) else basis[i]
            for slot, i in enumerate(index)]


def express_in_frame(kappa, frame):
    """Expand a configurational d.o.f. in the d.o.f. generated by a frame.

    Parameters
    ----------
    kappa : pqs.dof.ConfigDof
        D.o.f. at an underlying point of `frame`.
    frame : DiscreteFrame
        Frame.

    Returns
    -------
    list
        ``(coefficient, ConfigDof)`` pairs with non-zero coefficients,
        the d.o.f. drawn from ``K_gamma`` in canonical order.

    Raises
    ------
    pqs.exceptions.PQSNotExpressibleError
        If the d.o.f. point does not underlie the frame.
    """
    point = kappa.point
    if not frame.contains(point) or frame.point(point) != point:
        msg = (f"{kappa!r} is not a linear combination of the d.o.f. of "
               f"frame {frame.id!r}: point {point.id!r} does not underlie "
               "the frame")
        raise PQSNotExpressibleError(msg)

    sort = kappa.sort
    basis = frame.basis(point)
    dual = frame.dual(point)
    expansions = []
    for slot, arg in enumerate(kappa.args):
        if sort.is_contravariant(slot):
            expansions.append([arg(e) for e in basis])
        else:
            expansions.append([theta(arg) for theta in dual])

    targets = {rep: ConfigDof(sort, point, _frame_args(frame, point, sort,
                                                       rep))
               for rep in sort.canonical_indices(point.dim)}
    coefficients = dict.fromkeys(targets, 0)
    for rep, orbit in sort.orbits(point.dim).items():
        for index, sign in orbit:
            term = sign
            for slot, i in enumerate(index):
                term *= expansions[slot][i]
            coefficients[rep] += term
    out = [(as_rational(c), targets[rep]) for rep, c in coefficients.items()
           if c != 0]
    logger.trace("Expressed %r as %d frame d.o.f.", kappa, len(out))
    return out


def expressible(kappa, kgamma):
    """Whether a d.o.f. is a linear combination of the d.o.f. of a set."""
    if kappa.sort not in kgamma.sorts:
        return False
    try:
        express_in_frame(kappa, kgamma.frame)
    except PQSNotExpressibleError:
        return False
    return True


def frame_leq(first, second):
    """Frame order: ``second >= first`` iff its points contain ``first``'s.

    Parameters
    ----------
    first, second : DiscreteFrame
        Frames to compare.

    Returns
    -------
    bool
    """
    return first.point_ids <= second.point_ids


def frame_leq_by_expressibility(first, second, sorts):
    """Frame order decided through d.o.f. expressibility.

    ``second >= first`` iff every d.o.f. of ``K_first`` is a linear
    combination of d.o.f. of ``K_second``; equivalent to
    :func:`frame_leq`.
    """
    k_first = build_K_gamma(first, sorts)
    k_second = build_K_gamma(second, sorts)
    return all(expressible(kappa, k_second) for kappa in k_first)


def mutually_expressible(first, second):
    """Whether two d.o.f. sets are linear combinations of each other.

    This is how equality of reduced configuration spaces is decided.
    """
    return (all(expressible(kappa, second) for kappa in first)
            and all(expressible(kappa, first) for kappa in second))


def join_frames(first, second, frame_id=None):
    """Frame on the union of the underlying points of two frames.

    At shared points the bases of the frame with more points are kept
    (``first`` on ties).
    """
    larger, smaller = ((second, first) if second.n_points > first.n_points
                       else (first, second))
    entries = [(p, larger.basis(p)) for p in larger.points]
    entries += [(p, smaller.basis(p)) for p in smaller.points
                if not larger.contains(p)]
    return DiscreteFrame(entries, frame_id)


def extend_frame(frame, points, frame_id=None):
    """Frame with extra points carrying the coordinate basis."""
    entries = [(p, frame.basis(p)) for p in frame.points]
    entries += [(p, standard_basis(p)) for p in points
                if not frame.contains(p)]
    return DiscreteFrame(entries, frame_id)
