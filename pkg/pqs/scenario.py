# -*- coding: utf-8 -*-
"""
PQS scenario files.

A scenario is a JSON document describing the objects a command works
on: points, a measure, tensor sorts, frames, configurational and
momentum d.o.f., momentum operators, finite systems, family shapes,
graphs, surfaces and coupled systems. Every reference between entries
is by id and is checked on load; problems raise
:class:`~pqs.exceptions.PQSScenarioError` carrying the JSON location.
"""
import json
import logging
from pathlib import Path

import networkx as nx

from pqs.coupling import Graph, SurfaceSet, LQGSystem, CoupledSystem
from pqs.dof import MomentumDof, MomentumOperator, make_config_dof
from pqs.exceptions import PQSError, PQSScenarioError
from pqs.frames import DiscreteFrame, build_K_gamma
from pqs.geometry import (Point, TensorSort, TangentVector, OneForm,
                          VectorField, ScalarFunction, Covector,
                          DiscreteMeasure)
from pqs.systems import FiniteSystem, dual_operators
from pqs.utilities.rational import rational_to_str


logger = logging.getLogger(__name__)

KNOWN_KEYS = ("seed", "dim", "points", "measure", "sorts", "frames",
              "config_dofs", "momentum_dofs", "operators", "systems",
              "pairings", "families", "combine", "graphs", "surfaces",
              "coupled", "generate")
"""Top-level keys understood in scenario files."""


def _wrap(location):
    """Re-raise construction errors as scenario errors at a location."""
    def decorator(func):
        def wrapped(*args, **kwargs):
            try:
                return func(*args, **kwargs)
            except PQSScenarioError:
                raise
            except (PQSError, ValueError, TypeError, KeyError,
                    IndexError) as e:
                raise PQSScenarioError(str(e), location) from e
        return wrapped
    return decorator


def _require(data, key, location):
    if not isinstance(data, dict):
        raise PQSScenarioError(f"Expected an object, got {data!r}",
                               location)
    if key not in data:
        raise PQSScenarioError(f"Missing key {key!r}", location)
    return data[key]


def _lookup(table, key, kind, location):
    try:
        return table[key]
    except (KeyError, TypeError):
        msg = f"Unknown {kind} {key!r}"
        raise PQSScenarioError(msg, location) from None


def _as_list(value, location):
    if not isinstance(value, list):
        raise PQSScenarioError(f"Expected a list, got {value!r}", location)
    return value


class Scenario:
    """Objects loaded from (or collected for) a scenario file."""

    def __init__(self, seed=None):
        self.seed = seed
        self.dim = None
        self.points = {}
        self.measure = None
        self.sorts = {}
        self.frames = {}
        self.config_dofs = {}
        self.momentum_dofs = {}
        self.operators = {}
        self.systems = {}
        self.pairings = []
        self.families = {}
        self.combine = None
        self.graphs = {}
        self.surfaces = {}
        self.coupled = {}
        self.generate = {}

    def __repr__(self):
        counts = {key: len(getattr(self, key)) for key in
                  ("points", "sorts", "frames", "systems", "families",
                   "coupled")}
        return f"Scenario(seed={self.seed}, {counts})"

    @property
    def is_empty(self):
        """bool: Whether the scenario defines no objects at all."""
        return not (self.points or self.sorts or self.families
                    or self.generate)

    @property
    def sort_list(self):
        """list: Sorts in declaration order."""
        return list(self.sorts.values())

    def point_measure(self):
        """Scenario measure, or unit weights on every declared point."""
        if self.measure is not None:
            return self.measure
        return DiscreteMeasure.uniform(self.points.values())

    def add_point(self, point):
        """Register a point (idempotent for equal points)."""
        known = self.points.get(point.id)
        if known is not None and known != point:
            raise PQSScenarioError(f"Point id {point.id!r} is reused with "
                                   "different coordinates")
        self.points[point.id] = point
        return point

    def add_operator(self, operator, op_id):
        """Register an operator and the momentum d.o.f. of its terms."""
        terms = []
        for k, (coef, phi) in enumerate(operator.terms):
            phi_id = f"{op_id}.phi{k}"
            for point in phi.form_points:
                self.add_point(point)
            self.momentum_dofs[phi_id] = phi
            terms.append((coef, phi_id))
        self.operators[op_id] = (operator, terms)
        return op_id

    def system(self, system_id):
        """Finite system by id."""
        return self.systems[system_id][0]

    def operator(self, op_id):
        """Momentum operator by id."""
        return self.operators[op_id][0]

    def coupled_system(self, coupled_id):
        """Coupled system by id."""
        return self.coupled[coupled_id][0]

    def to_dict(self):
        """Serialize the scenario; :func:`scenario_from_dict` reloads it.
        """
        out = {}
        if self.seed is not None:
            out["seed"] = int(self.seed)
        out["points"] = [p.to_dict() for p in self.points.values()]
        if self.measure is not None:
            out["measure"] = self.measure.to_dict()
        out["sorts"] = [s.to_dict() for s in self.sorts.values()]
        out["frames"] = [_frame_to_dict(fid, f)
                         for fid, f in self.frames.items()]
        out["config_dofs"] = [dict(kappa.to_dict(), id=kid)
                              for kid, kappa in self.config_dofs.items()]
        out["momentum_dofs"] = [_momentum_dof_to_dict(pid, phi)
                                for pid, phi in self.momentum_dofs.items()]
        out["operators"] = [{"id": oid,
                             "terms": [{"coef": rational_to_str(c),
                                        "dof": phi_id}
                                       for c, phi_id in terms]}
                            for oid, (_, terms) in self.operators.items()]
        out["systems"] = [{"id": sid, "frame": fid,
                           "sorts": [s.label for s in system.sorts],
                           "operators": ops, "validate": system.validate}
                          for sid, (system, fid, ops) in self.systems.items()]
        if self.pairings:
            out["pairings"] = [{"operator": o, "config_dof": k}
                               for o, k in self.pairings]
        if self.families:
            out["families"] = [_family_spec_to_dict(fid, spec)
                               for fid, spec in self.families.items()]
        if self.combine:
            out["combine"] = self.combine
        if self.graphs:
            out["graphs"] = [dict(g.to_dict(), id=gid)
                             for gid, g in self.graphs.items()]
        if self.surfaces:
            out["surfaces"] = SurfaceSet(self.surfaces.values()).to_dict()
        if self.coupled:
            out["coupled"] = [dict(spec) for _, spec in self.coupled.values()]
        if self.generate:
            out["generate"] = dict(self.generate)
        return out


def _frame_to_dict(frame_id, frame):
    return {"id": frame_id,
            "entries": [{"point": p.id,
                         "basis": [[rational_to_str(c) for c in v.components]
                                   for v in frame.basis(p)]}
                        for p in frame.points]}


def _momentum_dof_to_dict(phi_id, phi):
    return {"id": phi_id, "sort": phi.sort.label,
            "forms": [f.to_dict() for f in phi.forms],
            "measure": phi.measure.to_dict()}


def _family_spec_to_dict(family_id, spec):
    shape = spec["shape"]
    out = {"id": family_id, "slot_dims": dict(spec["slot_dims"]),
           "nodes": [{"id": n, "slots": list(d.get("slots", []))}
                     for n, d in shape.nodes(data=True)],
           "edges": [list(e) for e in shape.edges]}
    if spec.get("exact"):
        out["exact"] = True
    return out


def load_scenario(path):
    """Load a scenario file.

    Parameters
    ----------
    path : path-like
        Path to a JSON scenario.

    Returns
    -------
    Scenario

    Raises
    ------
    PQSScenarioError
        If the file cannot be read or parsed, or the content is
        malformed.
    """
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise PQSScenarioError(f"Cannot read scenario {str(path)!r}: {e}",
                               "$") from e
    if not text.strip():
        raise PQSScenarioError(f"Scenario {str(path)!r} is empty", "$")
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise PQSScenarioError(f"Invalid JSON: {e.msg}",
                               f"line {e.lineno}, column {e.colno}") from e
    logger.debug("Loaded scenario %s", path)
    return scenario_from_dict(data)


def scenario_from_dict(data):
    """Build a :class:`Scenario` from parsed JSON.

    Parameters
    ----------
    data : dict
        Parsed scenario.

    Returns
    -------
    Scenario
    """
    if not isinstance(data, dict):
        raise PQSScenarioError("Scenario must be a JSON object", "$")
    if not data:
        raise PQSScenarioError("Scenario is empty", "$")
    unknown = sorted(set(data) - set(KNOWN_KEYS))
    if unknown:
        raise PQSScenarioError(f"Unknown keys {unknown}", "$")

    seed = data.get("seed")
    if seed is not None and (not isinstance(seed, int) or seed < 0
                             or seed >= 2 ** 64):
        raise PQSScenarioError("Seed must be an unsigned 64-bit integer",
                               "$.seed")
    scenario = Scenario(seed)
    _load_points(scenario, data)
    _load_measure(scenario, data)
    _load_sorts(scenario, data)
    _load_frames(scenario, data)
    _load_config_dofs(scenario, data)
    _load_momentum_dofs(scenario, data)
    _load_operators(scenario, data)
    _load_systems(scenario, data)
    _load_pairings(scenario, data)
    _load_families(scenario, data)
    _load_graphs(scenario, data)
    _load_surfaces(scenario, data)
    _load_coupled(scenario, data)
    generate = data.get("generate", {})
    if not isinstance(generate, dict):
        raise PQSScenarioError("Expected an object", "$.generate")
    scenario.generate = generate
    if scenario.is_empty:
        raise PQSScenarioError("Scenario defines no objects", "$")
    logger.info("Scenario: %r", scenario)
    return scenario


def _load_points(scenario, data):
    for i, entry in enumerate(_as_list(data.get("points", []), "$.points")):
        loc = f"$.points[{i}]"
        pid = _require(entry, "id", loc)
        if str(pid) in scenario.points:
            raise PQSScenarioError(f"Duplicate point id {pid!r}", loc)
        point = _wrap(loc)(Point)(pid, _require(entry, "coords", loc))
        if scenario.dim is None:
            scenario.dim = point.dim
        elif point.dim != scenario.dim:
            msg = (f"Point {point.id!r} has dimension {point.dim}, expected "
                   f"{scenario.dim}")
            raise PQSScenarioError(msg, f"{loc}.coords")
        scenario.points[point.id] = point
    dim = data.get("dim")
    if dim is not None and scenario.dim is not None and dim != scenario.dim:
        raise PQSScenarioError(f"Declared dimension {dim} does not match "
                               f"points of dimension {scenario.dim}", "$.dim")
    scenario.dim = scenario.dim or dim


def _load_measure(scenario, data):
    if "measure" not in data:
        return
    weights = data["measure"]
    if not isinstance(weights, dict):
        raise PQSScenarioError("Expected an object", "$.measure")
    for pid in weights:
        _lookup(scenario.points, pid, "point", f"$.measure.{pid}")
    scenario.measure = _wrap("$.measure")(DiscreteMeasure)(
        tuple(weights.items()))


def _load_sorts(scenario, data):
    for i, entry in enumerate(_as_list(data.get("sorts", []), "$.sorts")):
        loc = f"$.sorts[{i}]"
        label = _require(entry, "label", loc)
        if label in scenario.sorts:
            raise PQSScenarioError(f"Duplicate sort {label!r}", loc)
        scenario.sorts[label] = _wrap(loc)(TensorSort.from_dict)(entry)


def _load_frames(scenario, data):
    for i, entry in enumerate(_as_list(data.get("frames", []), "$.frames")):
        loc = f"$.frames[{i}]"
        fid = _require(entry, "id", loc)
        frame_entries = []
        for j, item in enumerate(_as_list(_require(entry, "entries", loc),
                                          f"{loc}.entries")):
            item_loc = f"{loc}.entries[{j}]"
            point = _lookup(scenario.points, _require(item, "point",
                                                      item_loc),
                            "point", f"{item_loc}.point")
            basis = item.get("basis")
            if basis is None:
                basis = [[int(r == c) for c in range(point.dim)]
                         for r in range(point.dim)]
            vectors = [_wrap(f"{item_loc}.basis[{k}]")(TangentVector)(
                point, comps) for k, comps in enumerate(basis)]
            frame_entries.append((point, vectors))
        scenario.frames[fid] = _wrap(loc)(DiscreteFrame)(frame_entries, fid)


def _load_config_dofs(scenario, data):
    entries = _as_list(data.get("config_dofs", []), "$.config_dofs")
    for i, entry in enumerate(entries):
        loc = f"$.config_dofs[{i}]"
        kid = str(entry.get("id", f"kappa{i}"))
        sort = _lookup(scenario.sorts, _require(entry, "sort", loc), "sort",
                       f"{loc}.sort")
        point = _lookup(scenario.points, _require(entry, "point", loc),
                        "point", f"{loc}.point")
        scenario.config_dofs[kid] = _wrap(loc)(make_config_dof)(
            point, sort, entry.get("args", []))


def _load_form(scenario, kind, values, loc):
    if not isinstance(values, dict):
        raise PQSScenarioError("Forms are objects keyed by point id", loc)
    points = {pid: _lookup(scenario.points, pid, "point", f"{loc}.{pid}")
              for pid in values}
    if kind is ScalarFunction:
        return _wrap(loc)(ScalarFunction)([(points[pid], v)
                                           for pid, v in values.items()])
    value_type = Covector if kind is OneForm else TangentVector
    made = [_wrap(f"{loc}.{pid}")(value_type)(points[pid], comps)
            for pid, comps in values.items()]
    return _wrap(loc)(kind)(made)


def _load_momentum_dofs(scenario, data):
    entries = _as_list(data.get("momentum_dofs", []), "$.momentum_dofs")
    for i, entry in enumerate(entries):
        loc = f"$.momentum_dofs[{i}]"
        pid = str(_require(entry, "id", loc))
        sort = _lookup(scenario.sorts, _require(entry, "sort", loc), "sort",
                       f"{loc}.sort")
        if sort.is_scalar:
            kinds = [ScalarFunction]
        else:
            kinds = [VectorField if sort.is_contravariant(k) else OneForm
                     for k in range(sort.rank)]
        raw = _as_list(_require(entry, "forms", loc), f"{loc}.forms")
        if len(raw) != len(kinds):
            msg = (f"Sort {sort.label!r} needs {len(kinds)} forms, got "
                   f"{len(raw)}")
            raise PQSScenarioError(msg, f"{loc}.forms")
        forms = [_load_form(scenario, kind, values, f"{loc}.forms[{k}]")
                 for k, (kind, values) in enumerate(zip(kinds, raw))]
        if "measure" in entry:
            measure = _wrap(f"{loc}.measure")(DiscreteMeasure)(
                tuple(entry["measure"].items()))
        else:
            measure = scenario.point_measure()
        scenario.momentum_dofs[pid] = _wrap(loc)(MomentumDof)(sort, forms,
                                                              measure)


def _load_operators(scenario, data):
    entries = _as_list(data.get("operators", []), "$.operators")
    for i, entry in enumerate(entries):
        loc = f"$.operators[{i}]"
        oid = str(_require(entry, "id", loc))
        terms = []
        for j, term in enumerate(_as_list(_require(entry, "terms", loc),
                                          f"{loc}.terms")):
            term_loc = f"{loc}.terms[{j}]"
            phi_id = _require(term, "dof", term_loc)
            _lookup(scenario.momentum_dofs, phi_id, "momentum d.o.f.",
                    f"{term_loc}.dof")
            terms.append((term.get("coef", "1"), phi_id))
        operator = _wrap(loc)(MomentumOperator)(
            [(c, scenario.momentum_dofs[p]) for c, p in terms])
        scenario.operators[oid] = (operator, terms)
    for pid, phi in scenario.momentum_dofs.items():
        if pid not in scenario.operators:
            scenario.operators[pid] = (MomentumOperator.from_dof(phi),
                                       [(1, pid)])


def _load_systems(scenario, data):
    entries = _as_list(data.get("systems", []), "$.systems")
    for i, entry in enumerate(entries):
        loc = f"$.systems[{i}]"
        sid = str(_require(entry, "id", loc))
        fid = _require(entry, "frame", loc)
        frame = _lookup(scenario.frames, fid, "frame", f"{loc}.frame")
        labels = entry.get("sorts", list(scenario.sorts))
        sorts = [_lookup(scenario.sorts, s, "sort", f"{loc}.sorts")
                 for s in labels]
        ops = entry.get("operators", "dual")
        if ops == "dual":
            operators = dual_operators(frame, sorts, scenario.measure)
            op_ids = [scenario.add_operator(op, f"{sid}.dual{beta}")
                      for beta, op in enumerate(operators)]
        else:
            op_ids = [str(o) for o in _as_list(ops, f"{loc}.operators")]
            operators = [_lookup(scenario.operators, o, "operator",
                                 f"{loc}.operators[{k}]")[0]
                         for k, o in enumerate(op_ids)]
        validate = entry.get("validate", True)
        system = _wrap(loc)(FiniteSystem)(
            operators, build_K_gamma(frame, sorts), sid, validate)
        scenario.systems[sid] = (system, fid, op_ids)


def _load_pairings(scenario, data):
    entries = _as_list(data.get("pairings", []), "$.pairings")
    for i, entry in enumerate(entries):
        loc = f"$.pairings[{i}]"
        oid = str(_require(entry, "operator", loc))
        kid = str(_require(entry, "config_dof", loc))
        _lookup(scenario.operators, oid, "operator", f"{loc}.operator")
        _lookup(scenario.config_dofs, kid, "configurational d.o.f.",
                f"{loc}.config_dof")
        scenario.pairings.append((oid, kid))


def _load_families(scenario, data):
    entries = _as_list(data.get("families", []), "$.families")
    for i, entry in enumerate(entries):
        loc = f"$.families[{i}]"
        fid = str(_require(entry, "id", loc))
        slot_dims = _require(entry, "slot_dims", loc)
        if not isinstance(slot_dims, dict) or not all(
                isinstance(d, int) and d >= 1 for d in slot_dims.values()):
            raise PQSScenarioError("Slot dimensions must be positive "
                                   "integers", f"{loc}.slot_dims")
        shape = nx.DiGraph()
        for j, node in enumerate(_as_list(_require(entry, "nodes", loc),
                                          f"{loc}.nodes")):
            node_loc = f"{loc}.nodes[{j}]"
            slots = _as_list(node.get("slots", []), f"{node_loc}.slots")
            for slot in slots:
                _lookup(slot_dims, slot, "slot", f"{node_loc}.slots")
            shape.add_node(str(_require(node, "id", node_loc)),
                           slots=slots)
        for j, edge in enumerate(_as_list(entry.get("edges", []),
                                          f"{loc}.edges")):
            if len(edge) != 2 or not all(str(e) in shape for e in edge):
                raise PQSScenarioError(f"Bad edge {edge!r}",
                                       f"{loc}.edges[{j}]")
            shape.add_edge(str(edge[0]), str(edge[1]))
        scenario.families[fid] = {"shape": shape, "slot_dims": slot_dims,
                                  "exact": bool(entry.get("exact", False))}
    combine = data.get("combine")
    if combine is not None:
        for key in ("first", "second"):
            _lookup(scenario.families, _require(combine, key, "$.combine"),
                    "family", f"$.combine.{key}")
        scenario.combine = combine


def _load_graphs(scenario, data):
    for i, entry in enumerate(_as_list(data.get("graphs", []), "$.graphs")):
        loc = f"$.graphs[{i}]"
        gid = str(_require(entry, "id", loc))
        for pid in entry.get("vertices", []):
            _lookup(scenario.points, pid, "point", f"{loc}.vertices")
        for edge in entry.get("edges", []):
            for pid in edge[:2]:
                _lookup(scenario.points, pid, "point", f"{loc}.edges")
        scenario.graphs[gid] = _wrap(loc)(Graph.from_dict)(entry,
                                                           scenario.points)


def _load_surfaces(scenario, data):
    entries = _as_list(data.get("surfaces", []), "$.surfaces")
    for i, entry in enumerate(entries):
        loc = f"$.surfaces[{i}]"
        _require(entry, "id", loc)
        for pid in entry.get("points", []):
            _lookup(scenario.points, pid, "point", f"{loc}.points")
    loaded = SurfaceSet.from_dict(
        [{"id": str(e["id"]), "points": e.get("points", [])}
         for e in entries], scenario.points)
    scenario.surfaces = {s.id: s for s in loaded}


def _load_coupled(scenario, data):
    entries = _as_list(data.get("coupled", []), "$.coupled")
    for i, entry in enumerate(entries):
        loc = f"$.coupled[{i}]"
        cid = str(_require(entry, "id", loc))
        system = _lookup(scenario.systems, _require(entry, "system", loc),
                         "system", f"{loc}.system")[0]
        graph = _lookup(scenario.graphs, _require(entry, "graph", loc),
                        "graph", f"{loc}.graph")
        surfaces = SurfaceSet(
            _lookup(scenario.surfaces, s, "surface", f"{loc}.surfaces")
            for s in entry.get("surfaces", []))
        lqg = LQGSystem(graph, surfaces, str(entry["graph"]))
        pair = _wrap(loc)(CoupledSystem)(system, lqg,
                                         entry.get("require_theta", True))
        scenario.coupled[cid] = (pair, dict(entry, id=cid))
