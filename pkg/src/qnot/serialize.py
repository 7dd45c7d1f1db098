"""JSON serialization of states, machines, verdicts, and reports.

Complex numbers travel as ``[re, im]`` pairs.  Floats are emitted with
Python's shortest round-trip repr, so parsing a written file reproduces
every amplitude bit-for-bit (well inside the 1e-12 contract).
"""
from __future__ import annotations

import json

import numpy as np

from .errors import QnotError
from .feasibility import FeasibilityVerdict
from .simulator import SimulationReport
from .states import QuditState, StateSet, TargetMap
from .synthesis import Machine


class SchemaError(QnotError):
    """Input document does not match the expected JSON shape."""


def _pair(z) -> list:
    z = complex(z)
    return [float(z.real), float(z.imag)]


def _unpair(item) -> complex:
    if (not isinstance(item, (list, tuple)) or len(item) != 2
            or not all(isinstance(x, (int, float)) for x in item)):
        raise SchemaError(f"expected [re, im], got {item!r}")
    return complex(item[0], item[1])


def state_to_dict(state: QuditState) -> dict:
    return {"dim": state.dim, "amps": [_pair(a) for a in state.amps]}


def state_from_dict(doc) -> QuditState:
    if not isinstance(doc, dict) or "dim" not in doc or "amps" not in doc:
        raise SchemaError("state document needs 'dim' and 'amps'")
    amps = np.array([_unpair(a) for a in doc["amps"]])
    if int(doc["dim"]) != amps.size:
        raise SchemaError(
            f"declared dim {doc['dim']} but {amps.size} amplitudes")
    return QuditState(amps)


def state_set_to_dict(state_set: StateSet) -> dict:
    return {"target": state_set.target.value,
            "states": [state_to_dict(s) for s in state_set]}


def state_set_from_dict(doc) -> StateSet:
    if not isinstance(doc, dict) or "target" not in doc or "states" not in doc:
        raise SchemaError("state set document needs 'target' and 'states'")
    try:
        target = TargetMap(doc["target"])
    except ValueError:
        raise SchemaError(f"unknown target {doc['target']!r}") from None
    states = doc["states"]
    if not isinstance(states, list) or not states:
        raise SchemaError("'states' must be a nonempty list")
    return StateSet(tuple(state_from_dict(s) for s in states), target)


def _matrix_to_lists(m: np.ndarray) -> list:
    return [[_pair(z) for z in row] for row in np.asarray(m, dtype=complex)]


def _matrix_from_lists(rows) -> np.ndarray:
    if not isinstance(rows, list) or not rows:
        raise SchemaError("expected a nonempty nested list matrix")
    return np.array([[_unpair(z) for z in row] for row in rows])


def machine_to_dict(machine: Machine) -> dict:
    return {
        "system_dim": machine.system_dim,
        "probe_dim": machine.probe_dim,
        "target": machine.target.value,
        "unitary": _matrix_to_lists(machine.unitary),
        "gammas": [float(g) for g in machine.gammas],
        "phases": [float(p) for p in machine.branch_phases],
    }


def machine_from_dict(doc) -> Machine:
    needed = ("system_dim", "probe_dim", "target", "unitary", "gammas",
              "phases")
    if not isinstance(doc, dict) or any(k not in doc for k in needed):
        raise SchemaError(f"machine document needs keys {needed}")
    try:
        target = TargetMap(doc["target"])
    except ValueError:
        raise SchemaError(f"unknown target {doc['target']!r}") from None
    return Machine(
        int(doc["system_dim"]), int(doc["probe_dim"]), target,
        _matrix_from_lists(doc["unitary"]),
        np.asarray(doc["gammas"], dtype=float),
        np.asarray(doc["phases"], dtype=float))


def verdict_to_dict(verdict: FeasibilityVerdict) -> dict:
    phases = None
    if verdict.witness is not None and verdict.witness.phases is not None:
        phases = [float(p) for p in verdict.witness.phases]
    return {"feasible": verdict.feasible,
            "witness_phases": phases,
            "violation": verdict.violation}


def report_to_dict(report: SimulationReport) -> dict:
    doc = {
        "mode": report.mode,
        "seed": report.seed,
        "shots": report.shots,
        "unitary_error": report.unitary_error,
        "all_ok": report.all_ok,
        "states": [
            {"i": r.index, "p": r.success_prob, "fidelity": r.fidelity,
             "global_phase": r.global_phase, "ok": r.ok}
            for r in report.records
        ],
    }
    for mc in report.mc_records:
        entry = doc["states"][mc.index]
        entry["mc_successes"] = mc.successes
        entry["mc_empirical"] = mc.empirical
        entry["rng"] = mc.rng
    return doc


def dump(doc, path) -> None:
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=2)
        fh.write("\n")


def load(path):
    with open(path) as fh:
        return json.load(fh)
