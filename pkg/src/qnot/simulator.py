"""Exact and sampled runs of a machine on input states.

The exact path applies the machine unitary to ``state x probe_0``,
projects on the success outcome (probe back in state 0) and compares the
postselected system state against the target map.  Monte Carlo runs draw
the success counter from the exact probability with numpy's PCG64
generator, seeded explicitly, so every report is reproducible.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import DimensionMismatch, ZeroSuccess
from .states import QuditState, StateSet, target_state
from .synthesis import Machine

FIDELITY_TOL = 1e-8
PROB_TOL = 1e-8
UNITARITY_TOL = 1e-9
RNG_ALGORITHM = "pcg64"


@dataclass
class ExactRecord:
    index: Optional[int]
    success_prob: float
    fidelity: float
    global_phase: float
    output_state: np.ndarray
    ok: bool = True


@dataclass
class MonteCarloRecord:
    index: Optional[int]
    exact_prob: float
    shots: int
    successes: int
    empirical: float
    seed: int
    rng: str = RNG_ALGORITHM


@dataclass
class SimulationReport:
    mode: str
    records: list
    unitary_error: float
    seed: Optional[int] = None
    shots: Optional[int] = None
    mc_records: list = field(default_factory=list)

    @property
    def all_ok(self) -> bool:
        return (self.unitary_error <= UNITARITY_TOL
                and all(r.ok for r in self.records))

    def flagged(self) -> list:
        return [r.index for r in self.records if not r.ok]


def run_exact(machine: Machine, state: QuditState,
              index: Optional[int] = None) -> ExactRecord:
    """Success probability and postselected output for one input state."""
    if state.dim != machine.system_dim:
        raise DimensionMismatch(
            f"state dim {state.dim} vs machine system dim {machine.system_dim}")
    v = machine.unitary @ machine.embed_input(state.amps)
    block = v.reshape(machine.system_dim, machine.probe_dim)[:, 0]
    prob = float(np.linalg.norm(block) ** 2)
    if prob < 1e-14:
        raise ZeroSuccess("success probability vanished; no output state")
    out = block / np.sqrt(prob)
    tgt = target_state(state, machine.target)
    ov = complex(np.vdot(tgt.amps, out))
    return ExactRecord(index, prob, abs(ov), float(np.angle(ov)),
                       out)


def run_monte_carlo(machine: Machine, state: QuditState, shots: int = 100_000,
                    seed: int = 42, index: Optional[int] = None) -> MonteCarloRecord:
    """Sample the success outcome ``shots`` times at the exact probability."""
    if shots <= 0:
        raise ValueError("shots must be positive")
    exact = run_exact(machine, state, index)
    rng = np.random.default_rng(seed)
    successes = int(rng.binomial(shots, min(exact.success_prob, 1.0)))
    return MonteCarloRecord(index, exact.success_prob, shots, successes,
                            successes / shots, seed)


def verify_machine(machine: Machine, state_set: StateSet,
                   fidelity_tol: float = FIDELITY_TOL,
                   prob_tol: float = PROB_TOL,
                   shots: Optional[int] = None,
                   seed: int = 42) -> SimulationReport:
    """Exact check of every member against the machine's design values.

    A member is flagged when its postselected fidelity drops below
    ``1 - fidelity_tol`` or its success probability differs from the
    designed ``gamma_i`` by more than ``prob_tol``.  The report also
    carries the machine's unitarity error; failures never raise, they are
    entries in the report.  With ``shots`` set, a Monte Carlo record per
    member is appended (one shared seed, members sampled in order).
    """
    if state_set.dim != machine.system_dim:
        raise DimensionMismatch(
            f"set dim {state_set.dim} vs machine system dim {machine.system_dim}")
    records = []
    for i, s in enumerate(state_set):
        try:
            rec = run_exact(machine, s, index=i)
        except ZeroSuccess:
            rec = ExactRecord(i, 0.0, 0.0, 0.0,
                              np.zeros(machine.system_dim, complex), ok=False)
            records.append(rec)
            continue
        gamma = machine.gammas[i] if i < machine.gammas.size else None
        rec.ok = rec.fidelity >= 1.0 - fidelity_tol
        if gamma is not None and abs(rec.success_prob - gamma) > prob_tol:
            rec.ok = False
        records.append(rec)
    report = SimulationReport("exact", records, machine.unitarity_error())
    if shots:
        rng = np.random.default_rng(seed)
        report.mode = "monte_carlo"
        report.seed = seed
        report.shots = shots
        for rec in records:
            p = min(max(rec.success_prob, 0.0), 1.0)
            successes = int(rng.binomial(shots, p))
            report.mc_records.append(
                MonteCarloRecord(rec.index, rec.success_prob, shots,
                                 successes, successes / shots, seed))
    return report
