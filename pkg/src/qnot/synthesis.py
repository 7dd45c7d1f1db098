"""Construction of postselecting machines for the target maps.

A machine acts with one unitary on system x probe, both prepared with the
probe in its first basis state.  Reading the probe back in that state is
"success"; conditioned on success the system carries the target state.
For a family with Gram matrix ``G``, probe phases ``phi`` and efficiencies
``gamma_i``, the machine exists iff

    M = G - sqrt(Gamma) (conj(G) * P) sqrt(Gamma)   is PSD,

and an explicit unitary follows from Gram-matched completion: the image of
the i-th prepared input is

    sqrt(gamma_i) e^{i phi_i} (target_i x P_0)  +  sum_j C*_ij (fill x P_j)

with ``C`` the PSD square root of ``M`` (so the failure branches restore
exactly the missing Gram mass) and ``fill`` a fixed system state.

:func:`synthesize` picks safe equal efficiencies for linearly independent
families: ``epsilon = min(0.999 * lambda_min(G) / lambda_max(conj(G)), 1)``,
which keeps ``M = G - epsilon conj(G)`` strictly positive.  Families whose
Gram is entrywise real skip the probe entirely and get an exact unitary
with unit efficiency.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import GramMismatch, InfeasibleGamma, InvalidProbe, LinearlyDependent
from .feasibility import (
    EfficiencyMatrix,
    ProbeKind,
    ProbeSpec,
    build_exact_unitary,
    check_exact_unitary,
    constraint_matrix,
)
from .linalg import psd_sqrt, unitary_completion
from .states import StateSet, TargetMap, gram

ETA = 0.999
INDEPENDENCE_TOL = 1e-9
ASSEMBLY_TOL = 1e-8


@dataclass
class Machine:
    """Postselecting target-map machine.

    ``unitary`` acts on the Kronecker product system x probe with the
    system index major (component ``i * probe_dim + j``).  Success means
    finding the probe in basis state 0; the projector onto that event is
    ``I_system x |0><0|``.  ``gammas`` are the designed per-member success
    probabilities and ``branch_phases`` the designed success-branch phases.
    """

    system_dim: int
    probe_dim: int
    target: TargetMap
    unitary: np.ndarray
    gammas: np.ndarray
    branch_phases: np.ndarray
    fill_states: Optional[np.ndarray] = None

    def __post_init__(self):
        self.unitary = np.asarray(self.unitary, dtype=complex)
        self.gammas = np.asarray(self.gammas, dtype=float).ravel()
        self.branch_phases = np.asarray(self.branch_phases, dtype=float).ravel()
        d = self.system_dim * self.probe_dim
        if self.unitary.shape != (d, d):
            raise InvalidProbe(
                f"unitary shape {self.unitary.shape} does not match "
                f"system_dim * probe_dim = {d}")

    @property
    def total_dim(self) -> int:
        return self.system_dim * self.probe_dim

    def success_projector(self) -> np.ndarray:
        e0 = np.zeros((self.probe_dim, self.probe_dim))
        e0[0, 0] = 1.0
        return np.kron(np.eye(self.system_dim), e0)

    def embed_input(self, amps: np.ndarray) -> np.ndarray:
        probe0 = np.zeros(self.probe_dim)
        probe0[0] = 1.0
        return np.kron(np.asarray(amps, dtype=complex), probe0)

    def unitarity_error(self) -> float:
        u = self.unitary
        return float(np.abs(u.conj().T @ u - np.eye(u.shape[0])).max())


@dataclass
class SynthesisReport:
    epsilon: float
    c: float
    d_max: float
    c_matrix: np.ndarray
    residual: float
    path: str = "general"


def _assemble(state_set: StateSet, eff: EfficiencyMatrix,
              phases: np.ndarray, m_matrix: np.ndarray):
    """Build the machine unitary from the success/failure branch targets."""
    n = len(state_set)
    d = state_set.dim
    probe_dim = n + 1
    c_matrix = psd_sqrt(m_matrix, tol=1e-9)
    r_matrix = np.conj(c_matrix)

    fill = np.zeros(d, complex)
    fill[0] = 1.0
    probe = np.eye(probe_dim)

    targets = state_set.targets()
    inputs, outputs = [], []
    for i, (s, t) in enumerate(zip(state_set, targets)):
        inputs.append(np.kron(s.amps, probe[0]))
        w = (np.sqrt(eff.gammas[i]) * np.exp(1j * phases[i])
             * np.kron(t.amps, probe[0]))
        for j in range(n):
            w = w + r_matrix[i, j] * np.kron(fill, probe[j + 1])
        outputs.append(w)

    # assembly self-check: the branch bookkeeping must reproduce the Gram
    g = gram(state_set).matrix
    out_mat = np.stack(outputs, axis=1)
    dev = np.abs(out_mat.conj().T @ out_mat - g)
    if dev.max() > ASSEMBLY_TOL:
        i, j = np.unravel_index(int(np.argmax(dev)), dev.shape)
        raise GramMismatch(int(i), int(j), float(dev[i, j]))

    unitary = unitary_completion(inputs, outputs)
    fill_states = np.tile(fill, (n, 1))
    machine = Machine(d, probe_dim, state_set.target, unitary,
                      eff.gammas.copy(), phases.copy(), fill_states)
    return machine, c_matrix, float(dev.max())


def synthesize(state_set: StateSet, eta: float = ETA,
               exact_when_real: bool = True):
    """Machine with safe equal efficiencies for an independent family.

    Returns ``(machine, report)``.  When the Gram matrix is entrywise real
    (and ``exact_when_real`` holds) the probe is skipped and the machine is
    an exact system-only unitary with ``gamma = 1``; otherwise efficiencies
    are ``epsilon = min(eta * c / d_max, 1)`` with ``c`` the smallest and
    ``d_max`` the largest eigenvalue of the Gram and its conjugate.

    Raises :class:`LinearlyDependent` when the family has Gram rank below
    its size.
    """
    n = len(state_set)
    g = gram(state_set).matrix
    eigs = np.linalg.eigvalsh(g)
    c = float(eigs.min())
    d_max = float(np.linalg.eigvalsh(np.conj(g)).max())
    if c <= INDEPENDENCE_TOL:
        raise LinearlyDependent(
            f"Gram rank is below {n} (smallest eigenvalue {c:.3e})")

    if exact_when_real and check_exact_unitary(state_set).feasible:
        unitary = build_exact_unitary(state_set)
        targets = state_set.targets()
        residual = max(
            float(np.abs(unitary @ s.amps - t.amps).max())
            for s, t in zip(state_set, targets))
        machine = Machine(state_set.dim, 1, state_set.target, unitary,
                          np.ones(n), np.zeros(n))
        report = SynthesisReport(1.0, c, d_max, np.zeros((n, n)), residual,
                                 path="exact")
        return machine, report

    epsilon = min(eta * c / d_max, 1.0)
    eff = EfficiencyMatrix.coerce(epsilon, n)
    phases = np.zeros(n)
    m_matrix = g - epsilon * np.conj(g)
    machine, c_matrix, residual = _assemble(state_set, eff, phases, m_matrix)
    report = SynthesisReport(epsilon, c, d_max, c_matrix, residual)
    return machine, report


def synthesize_with(state_set: StateSet, gammas, probe: ProbeSpec) -> Machine:
    """Machine with caller-chosen efficiencies and probe phases.

    The probe must be of phase-vector kind and the requested point must be
    feasible (constraint matrix PSD), otherwise :class:`InfeasibleGamma`
    is raised.  Dependent families are fine here; the completion handles
    rank deficiency.
    """
    if probe.kind is not ProbeKind.PHASE_VECTOR:
        raise InvalidProbe("synthesis needs a phase-vector probe")
    n = len(state_set)
    eff = EfficiencyMatrix.coerce(gammas, n)
    phases = probe.phases
    if phases.size != n:
        raise InvalidProbe(f"probe has {phases.size} phases for {n} states")
    m_matrix = constraint_matrix(gram(state_set), eff, probe)
    lam_min = float(np.linalg.eigvalsh(m_matrix).min())
    if lam_min < -1e-9:
        raise InfeasibleGamma(
            f"constraint matrix has eigenvalue {lam_min:.3e}")
    machine, _, _ = _assemble(state_set, eff, phases, m_matrix)
    return machine
