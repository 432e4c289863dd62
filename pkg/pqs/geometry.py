# -*- coding: utf-8 -*-
"""
PQS desk-scale geometry.

The spatial manifold is modeled as a finite set of labeled points with
rational chart coordinates. Tangent vectors, covectors, finitely
supported sections (one-forms, vector fields, functions), tensor sorts
and sampled tensor fields are all exact: every component is a sympy
rational and no floating point is involved.
"""
import math
import logging
import itertools
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
import sympy
from sympy.combinatorics import Permutation

from pqs.exceptions import (PQSValueError, PQSTypeError,
                            PQSDegenerateBasisError, PQSSortMismatchError,
                            PQSMissingSampleError, PQSKeyError)
from pqs.utilities.rational import (as_rational, as_rational_tuple,
                                    rational_array, rational_to_str,
                                    array_to_nested, exact_det)


logger = logging.getLogger(__name__)

FRESH_POINT_PREFIX = "fresh"
"""Id prefix of points drawn from the deterministic fresh-point sequence."""


def _point_id(point):
    """Id of a point given as :class:`Point` or as a plain id."""
    return point.id if isinstance(point, Point) else str(point)


@dataclass(frozen=True)
class Point:
    """A labeled point of the manifold with rational chart coordinates."""

    id: str
    """Opaque point label."""

    coords: tuple
    """``D`` rational chart coordinates."""

    def __post_init__(self):
        object.__setattr__(self, "id", str(self.id))
        object.__setattr__(self, "coords", as_rational_tuple(self.coords))
        if not self.coords:
            msg = f"Point {self.id!r} needs at least one coordinate"
            raise PQSValueError(msg)

    @property
    def dim(self):
        """int: Dimension of the chart the point lives in."""
        return len(self.coords)

    def to_dict(self):
        """Serialize the point to a JSON-compatible dict."""
        return {"id": self.id,
                "coords": [rational_to_str(c) for c in self.coords]}

    @classmethod
    def from_dict(cls, data):
        """Load a point from the output of :meth:`to_dict`."""
        return cls(data["id"], data["coords"])


@dataclass(frozen=True)
class _PointVector:
    """Vector-like object attached to a base point."""

    base: Point
    components: tuple

    def __post_init__(self):
        object.__setattr__(self, "components",
                           as_rational_tuple(self.components))
        if len(self.components) != self.base.dim:
            msg = (f"{type(self).__name__} at {self.base.id!r} needs "
                   f"{self.base.dim} components, got "
                   f"{len(self.components)}")
            raise PQSValueError(msg)

    def _check_same_base(self, other):
        if not isinstance(other, type(self)) or other.base != self.base:
            msg = (f"Cannot combine {self!r} with {other!r}: objects "
                   "must be of the same kind at the same point")
            raise PQSTypeError(msg)

    def __add__(self, other):
        self._check_same_base(other)
        return type(self)(self.base, tuple(a + b for a, b in
                                           zip(self.components,
                                               other.components)))

    def __sub__(self, other):
        return self + (-1) * other

    def __mul__(self, scalar):
        scalar = as_rational(scalar)
        return type(self)(self.base,
                          tuple(scalar * c for c in self.components))

    __rmul__ = __mul__

    def __neg__(self):
        return (-1) * self

    @property
    def is_zero(self):
        """bool: ``True`` if every component vanishes."""
        return all(c == 0 for c in self.components)

    @classmethod
    def zero(cls, base):
        """Zero element at the given point."""
        return cls(base, (0,) * base.dim)


class TangentVector(_PointVector):
    """Element of the tangent space at a point."""


class Covector(_PointVector):
    """Element of the cotangent space at a point."""

    def __call__(self, vector):
        """Evaluate the covector on a tangent vector at the same point.

        Parameters
        ----------
        vector : TangentVector
            Tangent vector at :attr:`base`.

        Returns
        -------
        sympy.Rational
        """
        if not isinstance(vector, TangentVector) or vector.base != self.base:
            msg = (f"Covector at {self.base.id!r} can only be evaluated on "
                   f"tangent vectors at the same point, got {vector!r}")
            raise PQSTypeError(msg)
        return sum((a * b for a, b in zip(self.components,
                                          vector.components)),
                   sympy.Integer(0))


class _FiniteSection:
    """Finitely supported section: one value per point of a finite set.

    Values that vanish identically are dropped, so the support is exactly
    the set of points carrying a non-zero value.
    """

    VALUE_TYPE = None
    """Type of the point-wise values."""

    def __init__(self, values):
        """
        Parameters
        ----------
        values : iterable
            Point-wise values. Each value must carry its own base point
            (see :meth:`_value_base`). Duplicate base points are
            rejected.
        """
        table = {}
        for value in values:
            value = self._check_value(value)
            base = self._value_base(value)
            if base.id in table:
                msg = (f"{type(self).__name__} has two values at point "
                       f"{base.id!r}")
                raise PQSValueError(msg)
            if not self._value_is_zero(value):
                table[base.id] = value
        if not table:
            msg = f"{type(self).__name__} must have a non-empty support"
            raise PQSValueError(msg)
        self._values = dict(sorted(table.items()))

    def _check_value(self, value):
        if not isinstance(value, self.VALUE_TYPE):
            msg = (f"{type(self).__name__} values must be "
                   f"{self.VALUE_TYPE.__name__}, got {value!r}")
            raise PQSTypeError(msg)
        return value

    @staticmethod
    def _value_base(value):
        return value.base

    @staticmethod
    def _value_is_zero(value):
        return value.is_zero

    def __repr__(self):
        return f"{type(self).__name__}(support={sorted(self.support)})"

    def __eq__(self, other):
        return type(self) is type(other) and self._values == other._values

    def __hash__(self):
        return hash((type(self).__name__, tuple(self._values.items())))

    @property
    def support(self):
        """frozenset: Ids of the points where the section is non-zero."""
        return frozenset(self._values)

    @property
    def points(self):
        """list: Base points of the support, sorted by id."""
        return [self._value_base(v) for v in self._values.values()]

    def at(self, point):
        """Value of the section at a point (zero outside the support).

        Parameters
        ----------
        point : Point
            Point to evaluate at.

        Returns
        -------
        object
            Value of :attr:`VALUE_TYPE` at the point.
        """
        value = self._values.get(point.id)
        if value is None:
            return self._zero_at(point)
        return value

    def _zero_at(self, point):
        return self.VALUE_TYPE.zero(point)


class OneForm(_FiniteSection):
    """Finitely supported one-form (a covector at each support point)."""

    VALUE_TYPE = Covector

    def to_dict(self):
        """Serialize as ``{point_id: [components]}``."""
        return {pid: [rational_to_str(c) for c in v.components]
                for pid, v in self._values.items()}


class VectorField(_FiniteSection):
    """Finitely supported vector field."""

    VALUE_TYPE = TangentVector

    def to_dict(self):
        """Serialize as ``{point_id: [components]}``."""
        return {pid: [rational_to_str(c) for c in v.components]
                for pid, v in self._values.items()}


class ScalarFunction(_FiniteSection):
    """Finitely supported rational function on the manifold."""

    VALUE_TYPE = tuple

    def _check_value(self, value):
        try:
            point, number = value
        except (TypeError, ValueError) as e:
            msg = ("ScalarFunction values must be (Point, rational) pairs, "
                   f"got {value!r}")
            raise PQSTypeError(msg) from e
        if not isinstance(point, Point):
            msg = f"ScalarFunction value needs a Point, got {point!r}"
            raise PQSTypeError(msg)
        return (point, as_rational(number))

    @staticmethod
    def _value_base(value):
        return value[0]

    @staticmethod
    def _value_is_zero(value):
        return value[1] == 0

    def _zero_at(self, point):
        return (point, sympy.Integer(0))

    def value(self, point):
        """Rational value of the function at a point."""
        return self.at(point)[1]

    def to_dict(self):
        """Serialize as ``{point_id: "p/q"}``."""
        return {pid: rational_to_str(v[1]) for pid, v in self._values.items()}


@dataclass(frozen=True)
class TensorSort:
    """Sort of a tensor field: ranks plus declared slot symmetries.

    Slots ``0 .. m-1`` are contravariant and slots ``m .. m+n-1`` are
    covariant. Each declared group is a set of same-variance slots in
    which the tensor is fully symmetric (``symmetric``) or fully
    antisymmetric (``antisymmetric``).
    """

    label: str
    contravariant: int = 0
    covariant: int = 0
    symmetric: tuple = ()
    antisymmetric: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "label", str(self.label))
        sym = tuple(tuple(sorted(int(s) for s in g)) for g in self.symmetric)
        anti = tuple(tuple(sorted(int(s) for s in g))
                     for g in self.antisymmetric)
        object.__setattr__(self, "symmetric", sym)
        object.__setattr__(self, "antisymmetric", anti)
        if self.contravariant < 0 or self.covariant < 0:
            msg = f"Sort {self.label!r} has a negative rank"
            raise PQSValueError(msg)
        seen = set()
        for group in sym + anti:
            if len(group) < 2:
                msg = (f"Sort {self.label!r}: symmetry groups need at "
                       f"least two slots, got {group}")
                raise PQSValueError(msg)
            if any(s < 0 or s >= self.rank for s in group):
                msg = (f"Sort {self.label!r}: slots {group} out of range "
                       f"for rank {self.rank}")
                raise PQSValueError(msg)
            if seen.intersection(group):
                msg = f"Sort {self.label!r}: symmetry groups overlap"
                raise PQSValueError(msg)
            if len({self.is_contravariant(s) for s in group}) != 1:
                msg = (f"Sort {self.label!r}: slots {group} mix "
                       "contravariant and covariant indices")
                raise PQSValueError(msg)
            seen.update(group)

    @property
    def rank(self):
        """int: Total number of slots ``m + n``."""
        return self.contravariant + self.covariant

    @property
    def is_scalar(self):
        """bool: ``True`` for functions (``m = n = 0``)."""
        return self.rank == 0

    def is_contravariant(self, slot):
        """Whether a slot is contravariant (takes a covector argument)."""
        return slot < self.contravariant

    @cached_property
    def symmetry_group(self):
        """tuple: Pairs ``(permutation, sign)`` of the slot group.

        Each permutation is a tuple ``g`` of slot images; the sign is the
        character value (parity of the antisymmetric part).
        """
        factors = []
        for group, anti in ([(g, False) for g in self.symmetric]
                            + [(g, True) for g in self.antisymmetric]):
            factor = []
            for image in itertools.permutations(group):
                perm = dict(zip(group, image))
                sign = 1
                if anti:
                    order = [group.index(s) for s in image]
                    sign = Permutation(order).signature()
                factor.append((perm, sign))
            factors.append(factor)

        out = []
        for combo in itertools.product(*factors):
            perm = list(range(self.rank))
            sign = 1
            for mapping, factor_sign in combo:
                for src, dst in mapping.items():
                    perm[src] = dst
                sign *= factor_sign
            out.append((tuple(perm), sign))
        return tuple(out)

    @property
    def group_order(self):
        """int: Order of the slot symmetry group."""
        return math.prod(math.factorial(len(g))
                         for g in self.symmetric + self.antisymmetric)

    def canonical_index(self, index):
        """Orbit representative of an index tuple under the slot symmetry.

        Parameters
        ----------
        index : tuple of int
            One index value per slot.

        Returns
        -------
        canonical : tuple of int
            Index tuple sorted within each symmetry group.
        sign : int
            ``+1``/``-1`` such that the component at `index` equals
            ``sign`` times the component at `canonical`; ``0`` if the
            component is forced to vanish (repeated antisymmetric index).
        """
        index = list(index)
        sign = 1
        for group in self.symmetric:
            values = sorted(index[s] for s in group)
            for slot, value in zip(group, values):
                index[slot] = value
        for group in self.antisymmetric:
            values = [index[s] for s in group]
            if len(set(values)) < len(values):
                return tuple(index), 0
            order = sorted(range(len(values)), key=values.__getitem__)
            sign *= Permutation(order).signature()
            for slot, value in zip(group, sorted(values)):
                index[slot] = value
        return tuple(index), sign

    def canonical_indices(self, dim):
        """All orbit representatives with non-vanishing components.

        Parameters
        ----------
        dim : int
            Dimension of the manifold.

        Returns
        -------
        list of tuple
            Representatives in lexicographic order (``i <= j`` within
            symmetric groups, ``i < j`` within antisymmetric groups).
        """
        out = []
        for index in itertools.product(range(dim), repeat=self.rank):
            canonical, sign = self.canonical_index(index)
            if sign != 0 and canonical == index:
                out.append(index)
        return out

    def orbits(self, dim):
        """Index tuples grouped by their orbit representative.

        Parameters
        ----------
        dim : int
            Dimension of the manifold.

        Returns
        -------
        dict
            Mapping of each representative from
            :meth:`canonical_indices` to the list of ``(index, sign)``
            pairs in its orbit. Vanishing orbits are omitted.
        """
        out = {index: [] for index in self.canonical_indices(dim)}
        for index in itertools.product(range(dim), repeat=self.rank):
            canonical, sign = self.canonical_index(index)
            if sign != 0:
                out[canonical].append((index, sign))
        return out

    def project(self, array):
        """Project a component array onto the declared symmetry type.

        Parameters
        ----------
        array : np.ndarray
            Object array of shape ``(D,) * rank``.

        Returns
        -------
        np.ndarray
            Symmetrized (and antisymmetrized) object array.
        """
        if not self.symmetry_group or self.rank < 2:
            return array
        total = None
        for perm, sign in self.symmetry_group:
            term = np.transpose(array, axes=perm) * sign
            total = term if total is None else total + term
        return total * sympy.Rational(1, self.group_order)

    def satisfies_symmetry(self, array):
        """Whether an array obeys the declared symmetries exactly."""
        return bool(np.array_equal(self.project(array), array))

    def to_dict(self):
        """Serialize the sort to a JSON-compatible dict."""
        return {"label": self.label, "m": self.contravariant,
                "n": self.covariant,
                "sym": [list(g) for g in self.symmetric],
                "antisym": [list(g) for g in self.antisymmetric]}

    @classmethod
    def from_dict(cls, data):
        """Load a sort from the output of :meth:`to_dict`."""
        return cls(data["label"], int(data.get("m", 0)),
                   int(data.get("n", 0)),
                   tuple(tuple(g) for g in data.get("sym", ())),
                   tuple(tuple(g) for g in data.get("antisym", ())))


@dataclass(frozen=True)
class DiscreteMeasure:
    """Per-point positive weights modeling integration over the manifold.

    Points listed without an explicit weight get weight 1.
    """

    weights: tuple = field(default=())
    """Sorted pairs ``(point_id, weight)``; the domain of the measure."""

    def __post_init__(self):
        items = (self.weights.items() if isinstance(self.weights, dict)
                 else self.weights)
        table = {}
        for key, weight in items:
            weight = as_rational(weight)
            if weight <= 0:
                msg = (f"Measure weights must be positive, got {weight} at "
                       f"{_point_id(key)!r}")
                raise PQSValueError(msg)
            table[_point_id(key)] = weight
        object.__setattr__(self, "weights", tuple(sorted(table.items())))

    @classmethod
    def uniform(cls, points):
        """Unit-weight measure on the given points (or ids)."""
        return cls(tuple((_point_id(p), 1) for p in points))

    @property
    def domain(self):
        """frozenset: Ids of the points the measure is defined on."""
        return frozenset(pid for pid, _ in self.weights)

    def weight(self, point):
        """Weight of a point.

        Parameters
        ----------
        point : Point | str
            Point or point id.

        Returns
        -------
        sympy.Rational
        """
        pid = _point_id(point)
        for key, weight in self.weights:
            if key == pid:
                return weight
        msg = f"Point {pid!r} is outside the measure domain"
        raise PQSKeyError(msg)

    def extended(self, points):
        """Copy of the measure extended with unit weight on new points."""
        table = dict(self.weights)
        for point in points:
            table.setdefault(_point_id(point), sympy.Integer(1))
        return type(self)(tuple(table.items()))

    def to_dict(self):
        """Serialize as ``{point_id: "p/q"}``."""
        return {pid: rational_to_str(w) for pid, w in self.weights}


class _SampledField:
    """Tensor field sampled at finitely many points."""

    def __init__(self, sort, samples):
        """
        Parameters
        ----------
        sort : TensorSort
            Sort of the field.
        samples : dict
            Mapping of :class:`Point` to component arrays (nested lists
            or object arrays) of shape ``(D,) * sort.rank``.
        """
        self.sort = sort
        self._samples = {}
        for point, values in samples.items():
            if not isinstance(point, Point):
                msg = f"Sample keys must be Points, got {point!r}"
                raise PQSTypeError(msg)
            shape = (point.dim,) * sort.rank
            array = rational_array(values)
            if array.shape != shape:
                msg = (f"Sample of sort {sort.label!r} at {point.id!r} has "
                       f"shape {array.shape}, expected {shape}")
                raise PQSValueError(msg)
            if not sort.satisfies_symmetry(array):
                msg = (f"Sample of sort {sort.label!r} at {point.id!r} "
                       "violates the declared slot symmetries")
                raise PQSValueError(msg)
            self._samples[point.id] = (point, array)
        self._samples = dict(sorted(self._samples.items()))

    def __repr__(self):
        return (f"{type(self).__name__}(sort={self.sort.label!r}, "
                f"points={sorted(self._samples)})")

    def __eq__(self, other):
        if type(self) is not type(other) or self.sort != other.sort:
            return False
        if self._samples.keys() != other._samples.keys():
            return False
        return all(p == other._samples[k][0]
                   and np.array_equal(a, other._samples[k][1])
                   for k, (p, a) in self._samples.items())

    __hash__ = None

    @classmethod
    def zero(cls, sort, points):
        """Field of the given sort vanishing at every given point."""
        return cls(sort, {p: np.zeros((p.dim,) * sort.rank, dtype=int)
                          for p in points})

    @property
    def points(self):
        """list: Sample points sorted by id."""
        return [p for p, _ in self._samples.values()]

    def has_sample(self, point):
        """Whether the field is sampled at a point."""
        return _point_id(point) in self._samples

    def sample(self, point):
        """Component array at a point.

        Parameters
        ----------
        point : Point | str
            Sample point or its id.

        Returns
        -------
        np.ndarray
            Read-only object array of shape ``(D,) * sort.rank``.
        """
        pid = _point_id(point)
        try:
            return self._samples[pid][1]
        except KeyError:
            msg = (f"{type(self).__name__} of sort {self.sort.label!r} has "
                   f"no sample at point {pid!r}")
            raise PQSMissingSampleError(msg) from None

    def to_dict(self):
        """Serialize to ``{"sort": label, "samples": {id: array}}``."""
        return {"sort": self.sort.label,
                "samples": {pid: array_to_nested(a)
                            for pid, (_, a) in self._samples.items()}}


class ConfigField(_SampledField):
    """Sampled configuration tensor field ``q`` of a given sort."""


class MomentumField(_SampledField):
    """Sampled momentum tensor density ``p`` (weight 1) of a given sort.

    Slot ``k`` of a momentum sample has the variance dual to slot ``k`` of
    the configuration sort, so sample arrays share the configuration
    shape and symmetries.
    """

    WEIGHT = 1
    """Density weight of momentum fields."""


def contract(array, component_vectors):
    """Fully contract an array with one component vector per slot.

    Parameters
    ----------
    array : np.ndarray
        Object array of shape ``(D,) * r``.
    component_vectors : sequence
        ``r`` sequences of ``D`` rationals, consumed slot by slot.

    Returns
    -------
    sympy.Rational
    """
    out = array
    for components in component_vectors:
        out = np.tensordot(rational_array(list(components)), out,
                           axes=(0, 0))
    if isinstance(out, np.ndarray):
        out = out[()]
    return as_rational(out)


def outer(component_vectors, dim):
    """Outer product of component vectors as an object array.

    Parameters
    ----------
    component_vectors : sequence
        Sequences of ``dim`` rationals, one per slot.
    dim : int
        Dimension, used for the rank-0 case.

    Returns
    -------
    np.ndarray
        Object array of shape ``(dim,) * len(component_vectors)``.
    """
    values = []
    for index in itertools.product(range(dim),
                                   repeat=len(component_vectors)):
        values.append(math.prod((vec[i] for vec, i in
                                 zip(component_vectors, index)),
                                start=sympy.Integer(1)))
    return rational_array(values, shape=(dim,) * len(component_vectors))


def check_arguments(sort, point, args):
    """Validate evaluation arguments against a sort and a base point.

    Parameters
    ----------
    sort : TensorSort
        Sort being evaluated.
    point : Point
        Evaluation point.
    args : sequence
        One :class:`Covector` per contravariant slot followed by one
        :class:`TangentVector` per covariant slot.
    """
    args = tuple(args)
    if len(args) != sort.rank:
        msg = (f"Sort {sort.label!r} of type ({sort.contravariant}, "
               f"{sort.covariant}) needs {sort.rank} arguments, got "
               f"{len(args)}")
        raise PQSSortMismatchError(msg)
    for slot, arg in enumerate(args):
        expected = Covector if sort.is_contravariant(slot) else TangentVector
        if not isinstance(arg, expected):
            msg = (f"Slot {slot} of sort {sort.label!r} takes a "
                   f"{expected.__name__}, got {type(arg).__name__}")
            raise PQSSortMismatchError(msg)
        if arg.base != point:
            msg = (f"Argument {slot} is based at {arg.base.id!r} but the "
                   f"evaluation point is {point.id!r}")
            raise PQSSortMismatchError(msg)
    return args


def evaluate_tensor(field, point, args):
    """Evaluate a sampled field on tangent/cotangent arguments at a point.

    Parameters
    ----------
    field : ConfigField | MomentumField
        Sampled field.
    point : Point
        Evaluation point; must be a sample point of `field`.
    args : sequence
        One :class:`Covector` per contravariant slot followed by one
        :class:`TangentVector` per covariant slot, all based at `point`.

    Returns
    -------
    sympy.Rational
        Full contraction of the component array with the arguments.
    """
    array = field.sample(point)
    args = check_arguments(field.sort, point, args)
    return contract(array, [a.components for a in args])


def standard_basis(point):
    """Coordinate basis ``(e_1, ..., e_D)`` of the tangent space."""
    eye = sympy.eye(point.dim)
    return tuple(TangentVector(point, tuple(eye.row(i)))
                 for i in range(point.dim))


def basis_matrix(basis):
    """Matrix whose columns are the components of the basis vectors."""
    return sympy.ImmutableMatrix([list(v.components) for v in basis]).T


def dual_basis(basis):
    """Dual basis of a tangent space basis.

    Parameters
    ----------
    basis : sequence of TangentVector
        ``D`` linearly independent tangent vectors at one point.

    Returns
    -------
    tuple of Covector
        Covectors ``theta^i`` with ``theta^i(e_j) = delta^i_j`` exactly.
    """
    basis = tuple(basis)
    if not basis:
        raise PQSDegenerateBasisError("Cannot dualize an empty basis")
    point = basis[0].base
    if any(not isinstance(v, TangentVector) or v.base != point
           for v in basis):
        msg = "Basis vectors must be tangent vectors at one common point"
        raise PQSDegenerateBasisError(msg)
    if len(basis) != point.dim:
        msg = (f"A basis at {point.id!r} needs {point.dim} vectors, got "
               f"{len(basis)}")
        raise PQSDegenerateBasisError(msg)
    matrix = basis_matrix(basis)
    if exact_det(matrix) == 0:
        msg = f"Vectors at {point.id!r} are linearly dependent"
        raise PQSDegenerateBasisError(msg)
    inverse = matrix.inv()
    return tuple(Covector(point, tuple(inverse.row(i)))
                 for i in range(point.dim))


def integrate_density(density, measure):
    """Integrate a scalar density against a discrete measure.

    Parameters
    ----------
    density : dict
        Mapping of :class:`Point` (or point id) to rational values.
    measure : DiscreteMeasure
        Measure whose domain must contain the density support.

    Returns
    -------
    sympy.Rational
        Weighted sum over points.
    """
    total = sympy.Integer(0)
    for point, value in density.items():
        total += measure.weight(point) * as_rational(value)
    return total


def fresh_points(taken, dim, count):
    """Deterministic fresh points disjoint from a set of taken points.

    Candidates ``fresh1, fresh2, ...`` sit on the moment curve
    ``(-k, k^2, -k^3, ...)``; candidates whose id or coordinates collide
    with a taken point are skipped.

    Parameters
    ----------
    taken : iterable of Point
        Points that must be avoided.
    dim : int
        Dimension of the new points.
    count : int
        Number of points to produce.

    Returns
    -------
    list of Point
    """
    taken = list(taken)
    ids = {p.id for p in taken}
    coords = {p.coords for p in taken}
    out = []
    k = 0
    while len(out) < count:
        k += 1
        pid = f"{FRESH_POINT_PREFIX}{k}"
        candidate = tuple(sympy.Integer((-k) ** (i + 1)) for i in range(dim))
        if pid in ids or candidate in coords:
            continue
        out.append(Point(pid, candidate))
    logger.trace("Drew fresh points %s", [p.id for p in out])
    return out
