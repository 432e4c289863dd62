# -*- coding: utf-8 -*-
"""
PQS elementary degrees of freedom.

Configurational d.o.f. evaluate a configuration field at tangent and
cotangent arguments; momentum d.o.f. integrate a contracted momentum
density against the discrete measure. Momentum operators act on
cylindrical functions through the Poisson bracket, which is computed
here in closed form (:func:`pairing`) and independently on a discretized
phase space (:func:`poisson_oracle`).
"""
import logging
from itertools import chain

import numpy as np
import sympy

from sympy.polys.polyerrors import BasePolynomialError

from pqs.exceptions import (PQSValueError, PQSTypeError,
                            PQSSortMismatchError)
from pqs.geometry import (Point, Covector, TangentVector, OneForm,
                          VectorField, ScalarFunction, MomentumField,
                          check_arguments, contract, outer, standard_basis,
                          dual_basis)
from pqs.utilities.rational import as_rational, rational_to_str


logger = logging.getLogger(__name__)


def _components_key(args):
    return tuple((type(a).__name__, a.components) for a in args)


class ConfigDof:
    """Configurational d.o.f. ``kappa(q) = q(args)`` at one point.

    Two d.o.f. whose arguments differ by a slot permutation under which
    the sort is invariant (even permutations of antisymmetric groups
    included) compare equal.
    """

    def __init__(self, sort, point, args=()):
        """
        Parameters
        ----------
        sort : pqs.geometry.TensorSort
            Sort of the configuration field the d.o.f. evaluates.
        point : pqs.geometry.Point
            Evaluation point.
        args : sequence, optional
            One :class:`~pqs.geometry.Covector` per contravariant slot
            followed by one :class:`~pqs.geometry.TangentVector` per
            covariant slot, all based at `point`. Empty for scalar sorts.
            By default, ``()``.
        """
        self.sort = sort
        self.point = point
        self.args = check_arguments(sort, point, args)

    def __repr__(self):
        args = ", ".join(str(list(map(str, a.components))) for a in self.args)
        return f"ConfigDof({self.sort.label!r}, {self.point.id!r}, [{args}])"

    @property
    def key(self):
        """tuple: Hashable identity invariant under declared symmetries."""
        base = _components_key(self.args)
        options = [tuple(base[g[k]] for k in range(len(base)))
                   for g, sign in self.sort.symmetry_group if sign == 1]
        return (self.sort, self.point, min(options, default=base))

    def __eq__(self, other):
        return isinstance(other, ConfigDof) and self.key == other.key

    def __hash__(self):
        return hash(self.key)

    @property
    def tensor(self):
        """np.ndarray: Outer product of the argument components."""
        return outer([a.components for a in self.args], self.point.dim)

    def __call__(self, q):
        return eval_config_dof(self, q)

    def to_dict(self):
        """Serialize by reference to the point id."""
        return {"sort": self.sort.label, "point": self.point.id,
                "args": [[rational_to_str(c) for c in a.components]
                         for a in self.args]}


class MomentumDof:
    """Momentum d.o.f. ``phi(p) = sum_y w(y) p(forms)(y)``.

    The forms are one :class:`~pqs.geometry.VectorField` per
    contravariant slot of the sort followed by one
    :class:`~pqs.geometry.OneForm` per covariant slot; scalar sorts take
    a single :class:`~pqs.geometry.ScalarFunction`.
    """

    def __init__(self, sort, forms, measure):
        """
        Parameters
        ----------
        sort : pqs.geometry.TensorSort
            Sort of the configuration field dual to the momentum.
        forms : sequence
            Finitely supported sections, one per slot (see class
            docstring).
        measure : pqs.geometry.DiscreteMeasure
            Measure the contracted density is integrated against.
        """
        self.sort = sort
        self.forms = tuple(forms)
        self.measure = measure
        self._check_forms()
        missing = self.form_support - measure.domain
        if missing:
            msg = (f"Momentum d.o.f. forms are supported at {sorted(missing)} "
                   "outside the measure domain")
            raise PQSValueError(msg)
        if self.witness() is None:
            msg = (f"Momentum d.o.f. of sort {sort.label!r} vanishes on every "
                   "momentum field")
            raise PQSValueError(msg)

    def _check_forms(self):
        if self.sort.is_scalar:
            expected = [ScalarFunction]
        else:
            expected = [VectorField if self.sort.is_contravariant(k)
                        else OneForm for k in range(self.sort.rank)]
        if len(self.forms) != len(expected):
            msg = (f"Momentum d.o.f. of sort {self.sort.label!r} needs "
                   f"{len(expected)} forms, got {len(self.forms)}")
            raise PQSSortMismatchError(msg)
        for slot, (form, kind) in enumerate(zip(self.forms, expected)):
            if not isinstance(form, kind):
                msg = (f"Slot {slot} of a momentum d.o.f. of sort "
                       f"{self.sort.label!r} takes a {kind.__name__}, got "
                       f"{type(form).__name__}")
                raise PQSSortMismatchError(msg)

    def __repr__(self):
        return (f"MomentumDof({self.sort.label!r}, "
                f"support={sorted(self.support)})")

    @property
    def form_support(self):
        """frozenset: Ids of points where any of the forms is non-zero."""
        return frozenset(chain.from_iterable(f.support for f in self.forms))

    @property
    def support(self):
        """frozenset: Ids of points where the integrand can be non-zero."""
        return frozenset.intersection(*(f.support for f in self.forms))

    @property
    def support_points(self):
        """list: Points of :attr:`support`, sorted by id."""
        return [p for p in self.forms[0].points if p.id in self.support]

    @property
    def form_points(self):
        """list: Points of :attr:`form_support`, sorted by id."""
        table = {p.id: p for f in self.forms for p in f.points}
        return [table[k] for k in sorted(table)]

    def slot_components(self, point):
        """Components of every form at a point, slot by slot."""
        if self.sort.is_scalar:
            return []
        return [form.at(point).components for form in self.forms]

    def tensor(self, point):
        """Outer product of the form components at a point."""
        if self.sort.is_scalar:
            return np.array(self.forms[0].value(point), dtype=object)
        return outer(self.slot_components(point), point.dim)

    def density(self, p):
        """Contracted scalar density ``p(forms)`` on the support.

        Parameters
        ----------
        p : pqs.geometry.MomentumField
            Momentum field of the same sort.

        Returns
        -------
        dict
            Mapping of support point ids to rationals. Points where `p`
            carries no sample contribute nothing.
        """
        out = {}
        for point in self.support_points:
            if not p.has_sample(point):
                continue
            sample = p.sample(point)
            if self.sort.is_scalar:
                out[point.id] = self.forms[0].value(point) * sample[()]
            else:
                out[point.id] = contract(sample, self.slot_components(point))
        return out

    def witness(self):
        """Momentum field on which the d.o.f. evaluates to a non-zero value.

        Returns
        -------
        pqs.geometry.MomentumField | None
            Field sampled at the first support point where the projected
            form tensor is non-zero, or ``None`` if the d.o.f. vanishes
            on every field of its sort.
        """
        for point in self.support_points:
            projected = self.sort.project(self.tensor(point))
            if any(v != 0 for v in np.asarray(projected).reshape(-1)):
                return MomentumField(self.sort, {point: projected})
        return None

    def __call__(self, p):
        return eval_momentum_dof(self, p)

    def to_dict(self):
        """Serialize the forms (measure by reference)."""
        kinds = [type(f).__name__ for f in self.forms]
        return {"sort": self.sort.label, "kinds": kinds,
                "forms": [f.to_dict() for f in self.forms]}


class MomentumOperator:
    """Finite linear combination of momentum d.o.f. acting as derivations.

    Operator equality is extensional (see :func:`operators_equal`); the
    ``==`` operator is not overloaded.
    """

    def __init__(self, terms=()):
        """
        Parameters
        ----------
        terms : iterable, optional
            ``(coefficient, MomentumDof)`` pairs. Terms with a zero
            coefficient are dropped. By default, ``()``, which is the
            zero operator.
        """
        self.terms = tuple((as_rational(c), phi) for c, phi in terms
                           if as_rational(c) != 0)
        for _, phi in self.terms:
            if not isinstance(phi, MomentumDof):
                msg = f"Operator terms need MomentumDof, got {phi!r}"
                raise PQSTypeError(msg)

    @classmethod
    def from_dof(cls, phi, coefficient=1):
        """Operator ``coefficient * phi_hat``."""
        return cls([(coefficient, phi)])

    def __repr__(self):
        return f"MomentumOperator(n_terms={len(self.terms)})"

    def __add__(self, other):
        return type(self)(self.terms + other.terms)

    def __mul__(self, scalar):
        scalar = as_rational(scalar)
        return type(self)((scalar * c, phi) for c, phi in self.terms)

    __rmul__ = __mul__

    def __neg__(self):
        return (-1) * self

    def __sub__(self, other):
        return self + (-other)

    @property
    def sorts(self):
        """list: Distinct sorts of the terms, in first-seen order."""
        return list(dict.fromkeys(phi.sort for _, phi in self.terms))

    @property
    def support(self):
        """frozenset: Ids of points where the operator can pair non-zero."""
        return frozenset(chain.from_iterable(phi.support
                                             for _, phi in self.terms))

    @property
    def support_points(self):
        """list: Points of :attr:`support`, sorted by id."""
        table = {p.id: p for _, phi in self.terms for p in phi.support_points}
        return [table[k] for k in sorted(table)]

    @property
    def form_points(self):
        """list: Points where any form of any term is non-zero."""
        table = {p.id: p for _, phi in self.terms for p in phi.form_points}
        return [table[k] for k in sorted(table)]

    def __call__(self, psi):
        return apply_momentum_operator(self, psi)

    def to_dict(self):
        """Serialize as ``{"terms": [{"coef", "dof"}]}``."""
        return {"terms": [{"coef": rational_to_str(c), "dof": phi.to_dict()}
                          for c, phi in self.terms]}


class CylindricalFunction:
    """Polynomial in the values of a finite set of configuration d.o.f.

    ``Psi(q) = poly(kappa_1(q), ..., kappa_N(q))`` with rational
    coefficients.
    """

    def __init__(self, base, poly):
        """
        Parameters
        ----------
        base : sequence of ConfigDof
            Ordered, non-empty set ``K`` of d.o.f.
        poly : sympy.Poly | sympy.Expr | int
            Polynomial in :meth:`generators` of ``len(base)`` with
            rational coefficients.
        """
        self.base = tuple(base)
        if not self.base:
            raise PQSValueError("Cylindrical functions need a non-empty base")
        if len(set(self.base)) != len(self.base):
            raise PQSValueError("Cylindrical function base has duplicates")
        gens = self.generators(len(self.base))
        if isinstance(poly, sympy.Poly):
            poly = poly.as_expr()
        try:
            self.poly = sympy.Poly(sympy.sympify(poly), *gens,
                                   domain=sympy.QQ)
        except BasePolynomialError as e:
            msg = (f"Cannot read {poly!r} as a rational polynomial in "
                   f"{len(gens)} variables")
            raise PQSValueError(msg) from e

    @staticmethod
    def generators(n_vars):
        """Coordinate symbols ``x1 .. xN``."""
        return sympy.symbols(f"x1:{n_vars + 1}")

    @classmethod
    def from_terms(cls, base, terms):
        """Build from ``(coefficient, exponents)`` pairs."""
        gens = cls.generators(len(base))
        expr = sympy.Integer(0)
        for coefficient, exps in terms:
            if len(exps) != len(gens):
                msg = (f"Monomial exponents {exps} do not match "
                       f"{len(gens)} variables")
                raise PQSValueError(msg)
            expr += as_rational(coefficient) * sympy.prod(
                [g ** int(e) for g, e in zip(gens, exps)])
        return cls(base, expr)

    @classmethod
    def coordinate(cls, base, alpha):
        """The coordinate function ``x_alpha`` (0-based index)."""
        return cls(base, cls.generators(len(base))[alpha])

    def __repr__(self):
        return f"CylindricalFunction({self.poly.as_expr()}, N={len(self.base)})"

    def _check_same_base(self, other):
        if not isinstance(other, CylindricalFunction) or \
                other.base != self.base:
            msg = "Cylindrical functions must share the same base"
            raise PQSValueError(msg)

    def __eq__(self, other):
        return (isinstance(other, CylindricalFunction)
                and self.base == other.base and self.poly == other.poly)

    __hash__ = None

    def __add__(self, other):
        self._check_same_base(other)
        return type(self)(self.base, self.poly + other.poly)

    def __mul__(self, other):
        if isinstance(other, CylindricalFunction):
            self._check_same_base(other)
            return type(self)(self.base, self.poly * other.poly)
        return type(self)(self.base, self.poly * as_rational(other))

    __rmul__ = __mul__

    @property
    def is_zero(self):
        """bool: ``True`` for the zero polynomial."""
        return self.poly.is_zero

    def coordinates(self, q):
        """Values ``(kappa_1(q), ..., kappa_N(q))``."""
        return tuple(eval_config_dof(kappa, q) for kappa in self.base)

    def __call__(self, q):
        gens = self.poly.gens
        values = dict(zip(gens, self.coordinates(q)))
        return as_rational(self.poly.as_expr().xreplace(values))

    def to_dict(self):
        """Serialize as ``{"vars": N, "terms": [{"coef", "exps"}]}``."""
        return {"vars": len(self.base),
                "terms": [{"coef": rational_to_str(c), "exps": list(m)}
                          for m, c in self.poly.terms()
                          if c != 0]}

    @classmethod
    def from_dict(cls, data, base):
        """Load from the output of :meth:`to_dict`."""
        if int(data["vars"]) != len(base):
            msg = (f"Polynomial has {data['vars']} variables but the base "
                   f"has {len(base)} d.o.f.")
            raise PQSValueError(msg)
        return cls.from_terms(base, [(t["coef"], t["exps"])
                                     for t in data.get("terms", [])])


def eval_config_dof(kappa, q):
    """Evaluate a configurational d.o.f. on a configuration field.

    Parameters
    ----------
    kappa : ConfigDof
        Configurational d.o.f.
    q : pqs.geometry.ConfigField
        Configuration field of the same sort, sampled at the d.o.f. point.

    Returns
    -------
    sympy.Rational
    """
    if q.sort != kappa.sort:
        msg = (f"Cannot evaluate a d.o.f. of sort {kappa.sort.label!r} on a "
               f"field of sort {q.sort.label!r}")
        raise PQSSortMismatchError(msg)
    sample = q.sample(kappa.point)
    return contract(sample, [a.components for a in kappa.args])


def eval_momentum_dof(phi, p):
    """Evaluate a momentum d.o.f. on a momentum field.

    Parameters
    ----------
    phi : MomentumDof
        Momentum d.o.f.
    p : pqs.geometry.MomentumField
        Momentum field of the same sort.

    Returns
    -------
    sympy.Rational
        Integral of the contracted density against ``phi.measure``.
    """
    if p.sort != phi.sort:
        msg = (f"Cannot evaluate a d.o.f. of sort {phi.sort.label!r} on a "
               f"field of sort {p.sort.label!r}")
        raise PQSSortMismatchError(msg)
    total = sympy.Integer(0)
    for pid, value in phi.density(p).items():
        total += phi.measure.weight(pid) * value
    return total


def dof_pairing(phi, kappa):
    """Pairing of a single momentum d.o.f. with a configurational d.o.f.

    D.o.f. of different sorts, or whose point lies outside the support
    of the momentum d.o.f., pair to zero.
    """
    if phi.sort != kappa.sort or kappa.point.id not in phi.support:
        return sympy.Integer(0)
    sort = phi.sort
    point = kappa.point
    if sort.is_scalar:
        return -phi.forms[0].value(point)

    forms = phi.slot_components(point)
    args = [a.components for a in kappa.args]
    total = sympy.Integer(0)
    for perm, sign in sort.symmetry_group:
        product = sympy.Integer(1)
        for slot in range(sort.rank):
            product *= sum((a * f for a, f in zip(args[perm[slot]],
                                                   forms[slot])),
                           sympy.Integer(0))
        total += sign * product
    return -total / sort.group_order


def pairing(operator, kappa, strict=True):
    """Action ``phi_hat kappa`` of a momentum operator on a config d.o.f.

    The value is the constant function ``-(1/|S|) sum_s chi(s)
    prod_k <a_s(k), f_k(y)>`` summed linearly over operator terms, where
    ``S`` is the slot symmetry group with character ``chi``, ``a`` are
    the d.o.f. arguments and ``f`` the forms evaluated at the d.o.f.
    point ``y``. For the symmetric ``(0, 2)`` sort this is
    ``-1/2 (w(Y) w'(Y') + w(Y') w'(Y))``.

    Parameters
    ----------
    operator : MomentumOperator | MomentumDof
        Momentum operator (a bare d.o.f. is promoted).
    kappa : ConfigDof
        Configurational d.o.f.
    strict : bool, optional
        Raise :class:`~pqs.exceptions.PQSSortMismatchError` if no term
        of the operator has the sort of `kappa`. Otherwise terms of other
        sorts simply pair to zero. By default, ``True``.

    Returns
    -------
    sympy.Rational
    """
    if isinstance(operator, MomentumDof):
        operator = MomentumOperator.from_dof(operator)
    if strict and operator.terms and kappa.sort not in operator.sorts:
        msg = (f"Operator of sorts {[s.label for s in operator.sorts]} "
               f"cannot act on a d.o.f. of sort {kappa.sort.label!r}")
        raise PQSSortMismatchError(msg)
    total = sympy.Integer(0)
    for coefficient, phi in operator.terms:
        total += coefficient * dof_pairing(phi, kappa)
    logger.trace("Pairing of %r with %r: %s", operator, kappa, total)
    return total


def apply_momentum_operator(operator, psi):
    """Act with a momentum operator on a cylindrical function.

    Parameters
    ----------
    operator : MomentumOperator | MomentumDof
        Momentum operator.
    psi : CylindricalFunction
        Cylindrical function over an independent d.o.f. set ``K``.

    Returns
    -------
    CylindricalFunction
        ``sum_a (d poly / d x_a) * pairing(operator, kappa_a)`` over the
        same base ``K``.
    """
    if isinstance(operator, MomentumDof):
        operator = MomentumOperator.from_dof(operator)
    if not isinstance(psi, CylindricalFunction):
        msg = f"Momentum operators act on cylindrical functions, got {psi!r}"
        raise PQSTypeError(msg)
    out = sympy.Poly(0, *psi.poly.gens, domain=sympy.QQ)
    for gen, kappa in zip(psi.poly.gens, psi.base):
        value = pairing(operator, kappa, strict=False)
        if value != 0:
            out += psi.poly.diff(gen) * value
    return CylindricalFunction(psi.base, out)


def dofs_at(point, basis, sort):
    """Configurational d.o.f. of a sort built from one basis at a point.

    Contravariant slots take covectors of the dual basis and covariant
    slots take basis vectors; one d.o.f. per non-vanishing symmetry
    orbit of index tuples, in lexicographic order.

    Parameters
    ----------
    point : pqs.geometry.Point
        Base point.
    basis : sequence of pqs.geometry.TangentVector
        Basis of the tangent space at `point`.
    sort : pqs.geometry.TensorSort
        Sort of the d.o.f.

    Returns
    -------
    list of ConfigDof
    """
    dual = dual_basis(basis)
    out = []
    for index in sort.canonical_indices(point.dim):
        args = [dual[i] if sort.is_contravariant(slot) else basis[i]
                for slot, i in enumerate(index)]
        out.append(ConfigDof(sort, point, args))
    return out


def standard_dofs(points, sorts):
    """D.o.f. built from the coordinate basis at each point, per sort."""
    return [kappa for point in points for sort in sorts
            for kappa in dofs_at(point, standard_basis(point), sort)]


def operators_equal(first, second):
    """Extensional equality of two momentum operators.

    Two operators are equal iff they pair identically with every
    coordinate-basis d.o.f. at the points where either can pair
    non-zero; by linearity of the pairing in the d.o.f. arguments this
    decides equality against every configurational d.o.f.

    Parameters
    ----------
    first, second : MomentumOperator
        Operators to compare.

    Returns
    -------
    bool
    """
    points = {p.id: p for p in first.support_points + second.support_points}
    sorts = list(dict.fromkeys(first.sorts + second.sorts))
    for kappa in standard_dofs([points[k] for k in sorted(points)], sorts):
        if pairing(first, kappa, strict=False) != pairing(second, kappa,
                                                          strict=False):
            return False
    return True


class PhaseSpace:
    """Discretized canonical phase space of sampled tensor fields.

    Each independent component ``a`` (orbit representative) of each sort
    at each point ``y`` carries a canonical pair ``(q_a(y), p_a(y))``
    with ``{q_a(y), p_b(y')} = delta_yy' delta_ab / (|orbit a| w(y))``,
    so that full components obey the symmetry projector normalization.
    """

    def __init__(self, measure=None):
        """
        Parameters
        ----------
        measure : pqs.geometry.DiscreteMeasure, optional
            Measure providing the bracket weights. By default, ``None``,
            which uses unit weights.
        """
        self.measure = measure
        self._coordinates = {}
        self._by_symbol = {}
        self._sorts = {}

    def _weight(self, pid):
        return (sympy.Integer(1) if self.measure is None
                else self.measure.weight(pid))

    def coordinate(self, sort, point, representative, orbit_size):
        """Symbols ``(q, p)`` of one independent component."""
        known = self._sorts.setdefault(sort.label, sort)
        if known != sort:
            msg = (f"Two different sorts share the label {sort.label!r}: "
                   f"{known!r} and {sort!r}")
            raise PQSValueError(msg)
        key = (sort, point.id, representative)
        if key not in self._coordinates:
            suffix = "_".join(map(str, (sort.label, point.id)
                                  + tuple(representative)))
            q_sym, p_sym = sympy.symbols(f"q_{suffix} p_{suffix}")
            self._coordinates[key] = (q_sym, p_sym, orbit_size, point.id)
            self._by_symbol[q_sym] = key
            self._by_symbol[p_sym] = key
        return self._coordinates[key][:2]

    def _field_expression(self, sort, point, tensor, momentum):
        """Linear expression ``sum_I tensor[I] * field_I(y)``."""
        tensor = np.asarray(tensor, dtype=object)
        expr = sympy.Integer(0)
        for rep, orbit in sort.orbits(point.dim).items():
            symbol = self.coordinate(sort, point, rep, len(orbit))[
                1 if momentum else 0]
            coefficient = sum((sign * tensor[index] for index, sign in orbit),
                              sympy.Integer(0))
            expr += coefficient * symbol
        return expr

    def expression(self, functional):
        """Promote a functional to an expression in phase-space symbols.

        Parameters
        ----------
        functional : ConfigDof | MomentumDof | MomentumOperator | \
CylindricalFunction
            Functional to promote.

        Returns
        -------
        sympy.Expr
        """
        if isinstance(functional, ConfigDof):
            return self._field_expression(functional.sort, functional.point,
                                          functional.tensor, momentum=False)
        if isinstance(functional, MomentumDof):
            expr = sympy.Integer(0)
            for point in functional.support_points:
                weight = functional.measure.weight(point)
                expr += weight * self._field_expression(
                    functional.sort, point, functional.tensor(point),
                    momentum=True)
            return expr
        if isinstance(functional, MomentumOperator):
            return sum((c * self.expression(phi)
                        for c, phi in functional.terms), sympy.Integer(0))
        if isinstance(functional, CylindricalFunction):
            values = {g: self.expression(kappa) for g, kappa
                      in zip(functional.poly.gens, functional.base)}
            return functional.poly.as_expr().xreplace(values)
        msg = f"Unsupported functional kind: {type(functional).__name__}"
        raise PQSTypeError(msg)

    def bracket(self, first, second):
        """Canonical Poisson bracket of two phase-space expressions."""
        symbols = first.free_symbols | second.free_symbols
        keys = sorted({self._by_symbol[s] for s in symbols
                       if s in self._by_symbol}, key=str)
        total = sympy.Integer(0)
        for key in keys:
            q_sym, p_sym, orbit_size, pid = self._coordinates[key]
            term = (sympy.diff(first, q_sym) * sympy.diff(second, p_sym)
                    - sympy.diff(second, q_sym) * sympy.diff(first, p_sym))
            if term != 0:
                total += term / (orbit_size * self._weight(pid))
        return sympy.expand(total)


def _functional_measure(functional):
    if isinstance(functional, MomentumDof):
        return functional.measure
    return None


def poisson_oracle(first, second):
    """Poisson bracket ``{first, second}`` on the discretized phase space.

    Operators are expanded linearly over their terms, each term using the
    measure of its own momentum d.o.f. as bracket weights.

    Parameters
    ----------
    first, second : ConfigDof | MomentumDof | MomentumOperator | \
CylindricalFunction
        Functionals to bracket.

    Returns
    -------
    sympy.Rational | sympy.Expr
        Rational when the bracket is constant on phase space, otherwise
        the bracket as an expression in the phase-space symbols.
    """
    if isinstance(first, MomentumOperator):
        out = sum((c * poisson_oracle(phi, second)
                   for c, phi in first.terms), sympy.Integer(0))
        return _finalize(out)
    if isinstance(second, MomentumOperator):
        out = sum((c * poisson_oracle(first, phi)
                   for c, phi in second.terms), sympy.Integer(0))
        return _finalize(out)

    space = PhaseSpace(_functional_measure(first)
                       or _functional_measure(second))
    out = space.bracket(space.expression(first), space.expression(second))
    return _finalize(out)


def _finalize(expr):
    expr = sympy.expand(expr)
    if expr.is_Rational:
        return as_rational(expr)
    return expr


def make_config_dof(point, sort, args):
    """Convenience constructor for :class:`ConfigDof` from raw components.

    Parameters
    ----------
    point : pqs.geometry.Point
        Base point.
    sort : pqs.geometry.TensorSort
        Sort of the d.o.f.
    args : sequence
        Component lists, one per slot; contravariant slots become
        covectors and covariant slots become tangent vectors.

    Returns
    -------
    ConfigDof
    """
    if not isinstance(point, Point):
        raise PQSTypeError(f"Expected a Point, got {point!r}")
    made = [Covector(point, comps) if sort.is_contravariant(slot)
            else TangentVector(point, comps)
            for slot, comps in enumerate(args)]
    return ConfigDof(sort, point, made)


def oracle_agrees(operator, functional):
    """Compare the action of an operator with the Poisson-bracket oracle.

    Parameters
    ----------
    operator : MomentumOperator | MomentumDof
        Momentum operator.
    functional : ConfigDof | CylindricalFunction
        Functional acted on: a d.o.f. is compared through
        :func:`pairing`, a cylindrical function through
        :func:`apply_momentum_operator`.

    Returns
    -------
    bool
        Whether both sides agree exactly.
    """
    if isinstance(functional, ConfigDof):
        return poisson_oracle(operator, functional) == pairing(
            operator, functional, strict=False)
    acted = apply_momentum_operator(operator, functional)
    expected = PhaseSpace().expression(acted)
    return sympy.expand(poisson_oracle(operator, functional) - expected) == 0
