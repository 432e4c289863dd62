# -*- coding: utf-8 -*-
"""PQS scenario loading tests"""
import os
import json
from pathlib import Path

import pytest

from pqs import DATA_DIR
from pqs.exceptions import PQSScenarioError
from pqs.scenario import KNOWN_KEYS, load_scenario, scenario_from_dict


POINTS = [{"id": "y1", "coords": [0, 0, 0]},
          {"id": "y2", "coords": [1, 0, 0]}]
METRIC = {"label": "q", "m": 0, "n": 2, "sym": [[0, 1]]}


def _write(tmp_path, data):
    path = tmp_path / "scenario.json"
    text = data if isinstance(data, str) else json.dumps(data)
    path.write_text(text, encoding="utf-8")
    return path


@pytest.mark.parametrize("name", ["dual_pairing", "symmetric_metric",
                                  "families", "theta"])
def test_bundled_scenarios_load(name):
    """Test that every bundled scenario loads"""
    scenario = load_scenario(os.path.join(DATA_DIR, f"{name}.json"))
    assert not scenario.is_empty
    assert scenario.seed is not None


def test_dual_pairing_scenario():
    """Test the objects of the single-point pairing scenario"""
    scenario = load_scenario(os.path.join(DATA_DIR, "dual_pairing.json"))
    assert scenario.seed == 1
    assert scenario.dim == 3
    assert set(scenario.points) == {"y"}
    assert set(scenario.config_dofs) == {"kappa_e1e2", "kappa_e1e1"}
    assert "phi_t1t2" in scenario.operators
    assert scenario.pairings == [("phi_t1t2", "kappa_e1e2"),
                                 ("phi_t1t2", "kappa_e1e1")]


def test_symmetric_metric_scenario():
    """Test frames and dual systems loaded from a scenario"""
    scenario = load_scenario(os.path.join(DATA_DIR,
                                          "symmetric_metric.json"))
    assert set(scenario.frames) == {"g1", "g2"}
    assert scenario.frames["g1"].point_ids == frozenset({"y1", "y2"})
    system = scenario.system("s1")
    assert len(system.kset) == 12
    assert system.pairing_matrix.is_identity
    assert len(scenario.systems["s1"][2]) == 12
    assert scenario.point_measure().domain == frozenset(scenario.points)


def test_families_and_theta_scenarios():
    """Test family shapes and coupled systems loaded from scenarios"""
    families = load_scenario(os.path.join(DATA_DIR, "families.json"))
    assert families.families["A"]["shape"].number_of_nodes() == 3
    assert families.families["B"]["slot_dims"] == {"c": 2, "d": 2}
    assert families.combine["first"] == "A"
    assert families.generate["n_families"] == 2

    theta = load_scenario(os.path.join(DATA_DIR, "theta.json"))
    first = theta.coupled_system("t1")
    assert first.in_theta
    assert theta.coupled_system("t2").in_theta
    assert [s.id for s in first.lqg_side.surfaces] == ["S1"]
    assert first.lqg_side.id == "G1"


def test_scenario_serialization():
    """Test that a serialized scenario loads back unchanged"""
    scenario = load_scenario(os.path.join(DATA_DIR, "dual_pairing.json"))
    data = scenario.to_dict()
    assert set(data) <= set(KNOWN_KEYS)
    assert data["pairings"][0] == {"operator": "phi_t1t2",
                                   "config_dof": "kappa_e1e2"}
    assert scenario_from_dict(data).to_dict() == data


@pytest.mark.parametrize(
    "data, location",
    [("", "$"),
     ("   \n", "$"),
     ({}, "$"),
     ([], "$"),
     ({"seed": 3}, "$"),
     ({"points": POINTS, "colour": "red"}, "$"),
     ({"seed": -1, "points": POINTS}, "$.seed"),
     ({"seed": "abc", "points": POINTS}, "$.seed"),
     ({"points": POINTS + [{"id": "y1", "coords": [0, 0, 1]}]},
      "$.points[2]"),
     ({"points": POINTS + [{"id": "y3", "coords": [0, 0]}]},
      "$.points[2].coords"),
     ({"points": [{"id": "y1", "coords": [0.5, 0, 0]}]}, "$.points[0]"),
     ({"points": [{"coords": [0, 0, 0]}]}, "$.points[0]"),
     ({"points": POINTS, "sorts": [METRIC],
       "frames": [{"id": "g", "entries": [{"point": "zz"}]}]},
      "$.frames[0].entries[0].point"),
     ({"points": POINTS, "sorts": [METRIC],
       "momentum_dofs": [{"id": "phi", "sort": "q",
                          "forms": [{"y1": [1, 0, 0]}]}]},
      "$.momentum_dofs[0].forms"),
     ({"points": POINTS, "sorts": [METRIC],
       "config_dofs": [{"sort": "missing", "point": "y1"}]},
      "$.config_dofs[0].sort"),
     ({"families": [{"id": "A", "slot_dims": {"a": 0},
                     "nodes": [{"id": "l0"}]}]},
      "$.families[0].slot_dims"),
     ({"families": [{"id": "A", "slot_dims": {"a": 2},
                     "nodes": [{"id": "l0", "slots": ["b"]}]}]},
      "$.families[0].nodes[0].slots"),
     ({"points": POINTS, "sorts": [METRIC],
       "frames": [{"id": "g", "entries": [{"point": "y1"}]}],
       "systems": [{"id": "s", "frame": "g"}],
       "graphs": [{"id": "G", "vertices": ["y2"]}],
       "coupled": [{"id": "t", "system": "s", "graph": "G"}]},
      "$.coupled[0]")])
def test_malformed_scenarios(tmp_path, data, location):
    """Test that malformed scenarios raise with the offending location"""
    with pytest.raises(PQSScenarioError) as error:
        load_scenario(_write(tmp_path, data))
    assert error.value.location == location
    assert location in str(error.value)


def test_invalid_json_location(tmp_path):
    """Test that JSON syntax errors report line and column"""
    path = _write(tmp_path, '{\n  "seed": 1,\n  "points": [\n}')
    with pytest.raises(PQSScenarioError) as error:
        load_scenario(path)
    assert error.value.location.startswith("line 4, column")


def test_unreadable_scenario(tmp_path):
    """Test that a missing scenario file raises a scenario error"""
    with pytest.raises(PQSScenarioError) as error:
        load_scenario(tmp_path / "missing.json")
    assert error.value.location == "$"


def test_coupled_outside_theta_allowed_on_request():
    """Test that pairs outside Theta load when explicitly allowed"""
    scenario = scenario_from_dict(
        {"points": POINTS, "sorts": [METRIC],
         "frames": [{"id": "g", "entries": [{"point": "y1"}]}],
         "systems": [{"id": "s", "frame": "g"}],
         "graphs": [{"id": "G", "vertices": ["y2"]}],
         "coupled": [{"id": "t", "system": "s", "graph": "G",
                      "require_theta": False}]})
    assert not scenario.coupled_system("t").in_theta


def test_system_sorts_and_validation_round_trip():
    """Test that system sorts, validation flags and surfaces survive"""
    data = {"points": POINTS,
            "sorts": [METRIC, {"label": "v", "m": 1, "n": 0}],
            "frames": [{"id": "g", "entries": [{"point": "y1"}]}],
            "systems": [{"id": "s", "frame": "g", "sorts": ["q"],
                         "validate": False}],
            "surfaces": [{"id": "S", "points": ["y2", "y1"]}]}
    scenario = scenario_from_dict(data)
    assert [s.label for s in scenario.system("s").sorts] == ["q"]
    assert len(scenario.system("s").kset) == 6
    assert [p.id for p in sorted(scenario.surfaces["S"].points,
                                 key=lambda p: p.id)] == ["y1", "y2"]

    out = scenario.to_dict()
    assert out["systems"][0]["sorts"] == ["q"]
    assert out["systems"][0]["validate"] is False
    assert out["surfaces"] == [{"id": "S", "points": ["y1", "y2"]}]

    loaded = scenario_from_dict(out)
    system = loaded.system("s")
    assert [s.label for s in system.sorts] == ["q"]
    assert len(system.kset) == 6
    assert system.validate is False
    assert loaded.to_dict()["systems"] == out["systems"]


if __name__ == "__main__":
    pytest.main(["-q", "--show-capture=all", Path(__file__), "-rapP"])
