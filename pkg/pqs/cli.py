# -*- coding: utf-8 -*-
"""PQS command line interface.

Every command reads a scenario file, runs a construction or a
verification suite and prints a JSON report to stdout, with a summary
table on stderr. Exit status is 0 when every check passes, 1 when a
check fails and 2 on malformed input.
"""
import sys
import json
import logging
from pathlib import Path

import click
import networkx as nx
from tabulate import tabulate

from pqs.coupling import (CoupledSystem, theta_join, theta_cover,
                          check_theta, combine_families, check_flip_identity,
                          random_theta_member, random_lqg_system)
from pqs.dof import pairing, poisson_oracle, oracle_agrees
from pqs.exceptions import PQSError
from pqs.geometry import fresh_points
from pqs.hilbert import (generate_family, random_directed_shape,
                         verify_family, check_embedding, check_inductive,
                         check_projective, family_to_dict)
from pqs.scenario import load_scenario
from pqs.systems import (SystemRelation, join_with_record, is_nondegenerate,
                         check_conditions, random_system,
                         random_cylindrical_function)
from pqs.utilities.parallel import CheckRunner
from pqs.utilities.random import make_rng, DEFAULT_SEED
from pqs.version import __version__


logger = logging.getLogger(__name__)

EXIT_PASSED, EXIT_FAILED, EXIT_INPUT_ERROR = 0, 1, 2


@click.group()
@click.version_option(version=__version__)
@click.pass_context
def main(ctx):
    """Projective quantum states command line interface."""
    ctx.ensure_object(dict)


def _common_options(func):
    """Options shared by every scenario command."""
    options = [
        click.option("--scenario", "-s", required=True,
                     type=click.Path(exists=True, dir_okay=False),
                     help="Path to the scenario JSON file."),
        click.option("--seed", type=click.IntRange(0, 2 ** 64 - 1),
                     default=None,
                     help="Seed of the random generator. Overrides the "
                          "scenario seed."),
        click.option("--mode", type=click.Choice(["exact", "float"]),
                     default="float", show_default=True,
                     help="Use signed-permutation unitaries ('exact') or "
                          "Haar-random unitaries ('float') for Hilbert "
                          "space families."),
        click.option("--parallel", is_flag=True,
                     help="Run independent checks on a thread pool."),
        click.option("--out", "-o", type=click.Path(dir_okay=False),
                     default=None, help="Also write the report here."),
        click.option("-v", "--verbose", is_flag=True,
                     help="Flag to show logging on the terminal (stderr). "
                          "Default is not to show any logs."),
        click.option("--log-level", default="INFO", show_default=True,
                     type=click.Choice(["TRACE", "DEBUG", "INFO",
                                        "WARNING", "ERROR"]),
                     help="Log level used with --verbose."),
    ]
    for option in reversed(options):
        func = option(func)
    return func


def _scenario_command(name):
    """Wrap a report builder into a click command of the main group."""
    def decorator(builder):
        @main.command(name=name, help=builder.__doc__)
        @_common_options
        @click.pass_context
        def command(ctx, scenario, seed, mode, parallel, out, verbose,
                    log_level):
            if verbose:
                _add_stream_handler(log_level)
            try:
                loaded = load_scenario(scenario)
                seed = seed if seed is not None else loaded.seed
                seed = DEFAULT_SEED if seed is None else seed
                body = builder(loaded, make_rng(seed),
                               CheckRunner(parallel=parallel), mode)
            except PQSError as e:
                click.echo(f"Error: {e}", err=True)
                ctx.exit(EXIT_INPUT_ERROR)
            report = {"command": name, "seed": seed, "mode": mode,
                      "passed": bool(body.pop("passed")),
                      "max_deviation": body.pop("max_deviation", 0.0)}
            report.update(body)
            _emit(report, out)
            ctx.exit(EXIT_PASSED if report["passed"] else EXIT_FAILED)
        return command
    return decorator


def _add_stream_handler(log_level):
    pqs_logger = logging.getLogger("pqs")
    if not any(getattr(h, "_pqs_cli", False) for h in pqs_logger.handlers):
        handler = logging.StreamHandler(stream=sys.stderr)
        handler._pqs_cli = True
        pqs_logger.addHandler(handler)
    pqs_logger.setLevel(log_level)


def _emit(report, out):
    text = json.dumps(report, indent=2, default=str)
    click.echo(text)
    if out:
        Path(out).write_text(text + "\n", encoding="utf-8")
    rows = [[c.get("check", c.get("condition")),
             "pass" if c["passed"] else "FAIL", c.get("max_deviation", "")]
            for c in _all_checks(report)]
    if rows:
        click.echo(tabulate(rows, headers=["check", "status",
                                           "max deviation"]), err=True)
    status = "PASSED" if report["passed"] else "FAILED"
    click.echo(f"{report['command']}: {status} (seed {report['seed']})",
               err=True)


def _all_checks(report):
    return list(report.get("checks", [])) + list(report.get("conditions",
                                                            []))


def _merge(*reports, prefix=None):
    """Concatenate check reports, optionally prefixing check names."""
    checks = []
    for report in reports:
        for check in _all_checks(report):
            check = dict(check)
            if prefix is not None:
                key = "check" if "check" in check else "condition"
                check["check"] = f"{prefix}:{check.pop(key)}"
            checks.append(check)
    return {"passed": all(c["passed"] for c in checks),
            "max_deviation": max((c.get("max_deviation", 0.0)
                                  for c in checks), default=0.0),
            "checks": checks}


def _point_pool(scenario):
    if scenario.points:
        return list(scenario.points.values())
    count = int(scenario.generate.get("n_points", 6))
    return fresh_points([], scenario.dim or 3, count)


def _generated_systems(scenario, rng, key):
    count = int(scenario.generate.get(key, 0))
    pool = _point_pool(scenario)
    return [random_system(rng, scenario.sort_list, pool,
                          measure=scenario.measure, system_id=f"gen{i}")
            for i in range(count)]


@_scenario_command("pairing")
def pairing_command(scenario, rng, runner, mode):
    """Evaluate operator/d.o.f. pairings and compare with the oracle."""
    pairs = list(scenario.pairings)
    if not pairs:
        pairs = [(o, k) for o, (op, _) in scenario.operators.items()
                 for k, kappa in scenario.config_dofs.items()
                 if kappa.sort in op.sorts]

    def _evaluate(pair):
        op_id, kappa_id = pair
        operator = scenario.operator(op_id)
        kappa = scenario.config_dofs[kappa_id]
        value = pairing(operator, kappa, strict=False)
        oracle = poisson_oracle(operator, kappa)
        return {"operator": op_id, "config_dof": kappa_id,
                "value": str(value), "oracle": str(oracle),
                "passed": bool(value == oracle)}

    results = runner.map(_evaluate, pairs)
    matrices = {sid: system.pairing_matrix.to_list()
                for sid, (system, _, _) in scenario.systems.items()}
    failed = [r for r in results if not r["passed"]]
    check = {"check": "pairing_vs_oracle", "passed": not failed,
             "max_deviation": 0.0, "checked": len(results),
             "witness": failed[0] if failed else None}
    return {"passed": check["passed"], "checks": [check],
            "pairings": results, "pairing_matrices": matrices}


def _join_checks(first, second, record):
    joined = record.system
    return {"upper_bound": (SystemRelation.geq(joined, first)
                            and SystemRelation.geq(joined, second)),
            "nondegenerate": is_nondegenerate(joined.operators,
                                              joined.kset),
            "block_form": record.has_block_form}


@_scenario_command("join")
def join_command(scenario, rng, runner, mode):
    """Join the scenario systems (and random generated pairs)."""
    systems = [s for s, _, _ in scenario.systems.values()]
    records, outcomes = [], []
    if systems:
        current = systems[0]
        for other in systems[1:] or systems[:1]:
            record = join_with_record(current, other, scenario.measure,
                                      f"join({current.id},{other.id})")
            outcomes.append(_join_checks(current, other, record))
            records.append(record.to_dict())
            current = record.system

    generated = _generated_systems(scenario, rng, "join_pairs")
    partners = _generated_systems(scenario, rng, "join_pairs")

    def _random_join(pair):
        record = join_with_record(*pair, scenario.measure)
        return _join_checks(*pair, record)

    outcomes += runner.map(_random_join, list(zip(generated, partners)))
    checks = []
    for name in ("upper_bound", "nondegenerate", "block_form"):
        failures = [i for i, o in enumerate(outcomes) if not o[name]]
        checks.append({"check": name, "passed": not failures,
                       "max_deviation": 0.0, "checked": len(outcomes),
                       "witness": {"joins": failures} if failures else None})
    return {"passed": bool(outcomes) and all(c["passed"] for c in checks),
            "checks": checks, "joins": records}


@_scenario_command("check-conditions")
def check_conditions_command(scenario, rng, runner, mode):
    """Verify the admissibility conditions on a sample of systems."""
    systems = [s for s, _, _ in scenario.systems.values()]
    systems += _generated_systems(scenario, rng, "n_systems")
    report = check_conditions(systems, list(scenario.config_dofs.values()),
                              list(scenario.momentum_dofs.values()),
                              scenario.sort_list or None, scenario.measure,
                              rng, runner)
    report["max_deviation"] = 0.0
    report["n_systems"] = len(systems)
    return report


def _families(scenario, rng, exact):
    families = {}
    for fid, spec in scenario.families.items():
        families[fid] = generate_family(spec["shape"], spec["slot_dims"],
                                        rng, exact or spec["exact"])
    count = int(scenario.generate.get("n_families", 0))
    slot_dims = scenario.generate.get("slot_dims", {"a": 2, "b": 2, "c": 2})
    n_nodes = int(scenario.generate.get("n_nodes", 4))
    for i in range(count):
        shape = random_directed_shape(rng, n_nodes, slot_dims)
        families[f"random{i}"] = generate_family(shape, slot_dims, rng,
                                                 exact)
    return families


def _family_report(family, rng, runner):
    return _merge(verify_family(family, runner=runner),
                  check_embedding(family, rng),
                  check_inductive(family, runner=runner),
                  check_projective(family, rng=rng))


@_scenario_command("verify-family")
def verify_family_command(scenario, rng, runner, mode):
    """Generate families of factorized spaces and verify all their laws."""
    families = _families(scenario, rng, mode == "exact")
    reports = {fid: _family_report(f, rng, runner)
               for fid, f in families.items()}
    merged = _merge(*[_merge(r, prefix=fid) for fid, r in reports.items()])
    merged["passed"] = bool(reports) and merged["passed"]
    return merged


@_scenario_command("generate-family")
def generate_family_command(scenario, rng, runner, mode):
    """Generate families of factorized spaces and serialize them."""
    families = _families(scenario, rng, mode == "exact")
    merged = _merge(*[verify_family(f, runner=runner)
                      for f in families.values()])
    merged["passed"] = bool(families) and merged["passed"]
    merged["families"] = {fid: family_to_dict(f)
                          for fid, f in families.items()}
    return merged


@_scenario_command("combine")
def combine_command(scenario, rng, runner, mode):
    """Combine two families over a product index set and verify it."""
    if not scenario.combine:
        raise PQSError("Scenario has no 'combine' entry")
    families = _families(scenario, rng, mode == "exact")
    spec = scenario.combine
    pairs = spec.get("pairs")
    combined = combine_families(families[spec["first"]],
                                families[spec["second"]],
                                None if pairs is None
                                else [tuple(p) for p in pairs])
    report = _merge(_family_report(combined, rng, runner),
                    check_flip_identity(combined,
                                        int(spec.get("n_samples", 100)),
                                        rng))
    report["indices"] = [list(i) for i in combined.indices]
    return report


@_scenario_command("theta-join")
def theta_join_command(scenario, rng, runner, mode):
    """Join coupled systems in Theta and check cofinality."""
    members = [scenario.coupled_system(c) for c in scenario.coupled]
    reports, joined = [], None
    if members:
        joined = members[0]
        for other in members[1:] or members[:1]:
            joined = theta_join(joined, other, scenario.measure)
        reports.append(check_theta(members, joined))

    pool = _point_pool(scenario)
    for _ in range(int(scenario.generate.get("theta_pairs", 0))):
        first = random_theta_member(rng, scenario.sort_list, pool,
                                    scenario.measure)
        second = random_theta_member(rng, scenario.sort_list, pool,
                                     scenario.measure)
        reports.append(check_theta([first, second],
                                   theta_join(first, second,
                                              scenario.measure)))
    for _ in range(int(scenario.generate.get("cover_pairs", 0))):
        tensor_side = random_system(rng, scenario.sort_list, pool,
                                    measure=scenario.measure)
        lqg_side = random_lqg_system(rng, pool[:max(1, len(pool) // 2)])
        product = CoupledSystem(tensor_side, lqg_side, require_theta=False)
        reports.append(check_theta([product],
                                   theta_cover(tensor_side, lqg_side,
                                               scenario.measure)))
    report = _merge(*reports)
    report["passed"] = bool(reports) and report["passed"]
    if joined is not None:
        report["joined"] = {
            "vertices": sorted(joined.lqg_side.graph.vertex_ids),
            "n_dofs": len(joined.tensor_side.kset),
            "graph_components": _n_components(joined)}
    return report


def _n_components(coupled):
    return nx.number_connected_components(
        coupled.lqg_side.graph.to_networkx())


@_scenario_command("oracle")
def oracle_command(scenario, rng, runner, mode):
    """Compare operator actions with the Poisson-bracket oracle."""
    items = [(op_id, kappa_id, scenario.operator(op_id), kappa)
             for op_id in scenario.operators
             for kappa_id, kappa in scenario.config_dofs.items()]
    n_samples = int(scenario.generate.get("oracle_samples", 2))
    for sid, (system, _, _) in scenario.systems.items():
        for k in range(n_samples):
            psi = random_cylindrical_function(rng, system.kset.dofs,
                                              max_degree=3)
            for beta, operator in enumerate(system.operators):
                items.append((f"{sid}.op{beta}", f"{sid}.psi{k}", operator,
                              psi))

    outcomes = runner.map(lambda item: oracle_agrees(item[2], item[3]),
                          items)
    failures = [{"operator": i[0], "functional": i[1]}
                for i, ok in zip(items, outcomes) if not ok]
    check = {"check": "oracle", "passed": bool(items) and not failures,
             "max_deviation": 0.0, "checked": len(items),
             "witness": failures[0] if failures else None}
    return {"passed": check["passed"], "checks": [check]}


if __name__ == "__main__":
    # pylint: disable=no-value-for-parameter
    main(obj={})
