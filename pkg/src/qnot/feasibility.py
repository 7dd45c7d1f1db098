"""Feasibility tests for exact and probabilistic target machines.

Three nested regimes are decided here, each on a finite state family:

* a plain unitary realizes the target map exactly iff the Gram matrix is
  entrywise real (:func:`check_exact_unitary`);
* a unitary on system plus probe realizes it exactly iff the Gram phases
  satisfy the congruence ``theta_lj - theta_li = theta_ij  (mod pi)`` for
  every index triple (:func:`check_exact_with_probe`), with witness probe
  phases ``phi_j = 2 * theta_1j``;
* with per-state efficiencies ``gamma_i`` and a probe Gram ``P``, a
  postselecting machine exists iff
  ``G - sqrt(Gamma) (conj(G) * P) sqrt(Gamma)`` is positive semidefinite
  (:func:`check_probabilistic`).

The constructive companions :func:`build_exact_unitary` and
:func:`build_probe_unitary` return explicit unitaries for the first two
regimes via Gram-matched unitary completion.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Optional, Sequence

import numpy as np

from .errors import (
    InvalidProbe,
    InvalidProbeGram,
    LinearlyDependentPair,
    WrongDimension,
    ZeroOverlap,
)
from .linalg import is_psd, unitary_completion
from .states import GramMatrix, QuditState, StateSet, gram, orthogonal_complement

IMAG_TOL = 1e-9
PHASE_TOL = 1e-8
PSD_TOL = 1e-9
PARALLEL_TOL = 1e-8


class ProbeKind(Enum):
    PHASE_VECTOR = "phase_vector"
    FULL_GRAM = "full_gram"


@dataclass(frozen=True)
class ProbeSpec:
    """Probe state family, given either by phases or by a full Gram matrix.

    A phase-vector probe uses a single probe direction per state,
    ``|P_i> = exp(i phi_i) |P_1>``, so only the phases matter and the
    probe Gram is ``P[i, j] = exp(i (phi_j - phi_i))``.  A full-Gram probe
    specifies ``P`` directly; it must be Hermitian PSD with unit diagonal.
    """

    kind: ProbeKind
    phases: Optional[np.ndarray] = None
    matrix: Optional[np.ndarray] = None

    @classmethod
    def phase_vector(cls, phases) -> "ProbeSpec":
        ph = np.asarray(phases, dtype=float).ravel()
        if ph.size == 0:
            raise InvalidProbe("phase vector must be nonempty")
        # only phase differences are observable; pin the first phase to 0
        ph = np.mod(ph - ph[0], 2.0 * np.pi)
        return cls(ProbeKind.PHASE_VECTOR, phases=ph)

    @classmethod
    def full_gram(cls, matrix) -> "ProbeSpec":
        m = np.asarray(matrix, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise InvalidProbeGram(f"probe Gram must be square, got {m.shape}")
        if np.abs(m - m.conj().T).max() > 1e-10:
            raise InvalidProbeGram("probe Gram must be Hermitian")
        if np.abs(np.diag(m) - 1.0).max() > 1e-10:
            raise InvalidProbeGram("probe Gram must have unit diagonal")
        if float(np.linalg.eigvalsh(m).min()) < -PSD_TOL:
            raise InvalidProbeGram("probe Gram must be positive semidefinite")
        return cls(ProbeKind.FULL_GRAM, matrix=m)

    @property
    def n(self) -> int:
        if self.kind is ProbeKind.PHASE_VECTOR:
            return self.phases.size
        return self.matrix.shape[0]

    def gram_matrix(self) -> np.ndarray:
        if self.kind is ProbeKind.PHASE_VECTOR:
            u = np.exp(1j * self.phases)
            return np.outer(np.conj(u), u)
        return self.matrix

    def phase_vector_phases(self) -> np.ndarray:
        """Phases of a pure phase family; rank-one full Grams are accepted."""
        if self.kind is ProbeKind.PHASE_VECTOR:
            return self.phases
        vals, vecs = np.linalg.eigh(self.matrix)
        if vals.size > 1 and vals[-2] > 1e-9:
            raise InvalidProbeGram("probe Gram is not rank one")
        w = vecs[:, -1]
        if np.abs(np.abs(w) * np.sqrt(vals[-1]) - 1.0).max() > 1e-8:
            raise InvalidProbeGram("probe Gram is not a pure phase family")
        ph = np.mod(-(np.angle(w) - np.angle(w[0])), 2.0 * np.pi)
        return ph


@dataclass(frozen=True)
class EfficiencyMatrix:
    """Per-state success probabilities ``gamma_i``, each in ``(0, 1]``."""

    gammas: np.ndarray

    def __post_init__(self):
        g = np.asarray(self.gammas, dtype=float).ravel()
        object.__setattr__(self, "gammas", g)
        if g.size == 0:
            raise ValueError("need at least one efficiency")
        if np.any(g <= 0.0) or np.any(g > 1.0 + 1e-12):
            raise ValueError("efficiencies must lie in (0, 1]")

    @classmethod
    def coerce(cls, gammas, n: int) -> "EfficiencyMatrix":
        if isinstance(gammas, EfficiencyMatrix):
            g = gammas.gammas
        elif np.isscalar(gammas):
            g = np.full(n, float(gammas))
        else:
            g = np.asarray(gammas, dtype=float).ravel()
        if g.size != n:
            raise ValueError(f"expected {n} efficiencies, got {g.size}")
        return cls(g)

    def sqrt_diag(self) -> np.ndarray:
        return np.diag(np.sqrt(self.gammas))


@dataclass(frozen=True)
class FeasibilityVerdict:
    feasible: bool
    witness: Optional[ProbeSpec] = None
    violation: Optional[dict] = None
    lambda_min: Optional[float] = None


def check_exact_unitary(state_set: StateSet, tol: float = IMAG_TOL) -> FeasibilityVerdict:
    """Exact target map by a plain unitary exists iff the Gram is real."""
    g = gram(state_set).matrix
    imag = np.abs(g.imag)
    worst = float(imag.max())
    if worst <= tol:
        return FeasibilityVerdict(True)
    i, j = np.unravel_index(int(np.argmax(imag)), imag.shape)
    return FeasibilityVerdict(
        False, violation={"indices": [int(i), int(j)], "residual": worst})


def check_exact_with_probe(state_set: StateSet,
                           tol: float = PHASE_TOL) -> FeasibilityVerdict:
    """Exact target map by a unitary with probe: Gram phase congruence.

    Requires every pairwise overlap to be nonzero (otherwise the criterion
    does not apply and :class:`ZeroOverlap` is raised).  Feasibility is
    ``|sin(theta_lj - theta_li - theta_ij)| <= tol`` for all triples; the
    witness probe phases are ``phi_j = 2 theta_1j`` (mod ``2 pi``).
    """
    gm = gram(state_set)
    n = gm.n
    for i in range(n):
        for j in range(i + 1, n):
            if gm.magnitudes[i, j] < 1e-12:
                raise ZeroOverlap(i, j)
    th = gm.phases
    worst = 0.0
    worst_idx = None
    for l in range(n):
        for i in range(n):
            for j in range(n):
                r = abs(np.sin(th[l, j] - th[l, i] - th[i, j]))
                if r > worst:
                    worst = r
                    worst_idx = [i, j, l]
    witness = ProbeSpec.phase_vector(np.mod(2.0 * th[0, :], 2.0 * np.pi))
    if worst <= tol:
        return FeasibilityVerdict(True, witness=witness)
    return FeasibilityVerdict(
        False, violation={"indices": worst_idx, "residual": float(worst)})


def build_exact_unitary(state_set: StateSet) -> np.ndarray:
    """System-only unitary sending every member to its target state.

    Propagates :class:`GramMismatch` when the Gram matrix is not real,
    i.e. when :func:`check_exact_unitary` is infeasible.
    """
    ins = [s.amps for s in state_set]
    outs = [t.amps for t in state_set.targets()]
    return unitary_completion(ins, outs)


def build_probe_unitary(state_set: StateSet, probe: ProbeSpec) -> np.ndarray:
    """Unitary on system x probe realizing the target map exactly.

    The probe is two-dimensional; ``U (psi_i x |0>) = target(psi_i) x
    exp(i phi_i)|0>`` where ``phi`` are the probe phases (typically the
    witness of :func:`check_exact_with_probe`).  Success probability is 1
    for every member.  Propagates :class:`GramMismatch` when the phases do
    not actually compensate the Gram conjugation.
    """
    phases = probe.phase_vector_phases()
    n = len(state_set)
    if phases.size != n:
        raise InvalidProbe(f"probe has {phases.size} phases for {n} states")
    e0 = np.array([1.0, 0.0])
    ins = [np.kron(s.amps, e0) for s in state_set]
    outs = [np.exp(1j * phases[k]) * np.kron(t.amps, e0)
            for k, t in enumerate(state_set.targets())]
    return unitary_completion(ins, outs)


def constraint_matrix(gram_matrix: GramMatrix | np.ndarray, gammas,
                      probe: ProbeSpec) -> np.ndarray:
    """Success-branch constraint matrix ``G - sqrt(Gamma) (conj(G) * P) sqrt(Gamma)``.

    Positive semidefiniteness of this matrix is exactly feasibility of a
    probabilistic machine with efficiencies ``gamma_i`` and probe Gram ``P``.
    """
    g = gram_matrix.matrix if isinstance(gram_matrix, GramMatrix) else np.asarray(gram_matrix)
    n = g.shape[0]
    eff = EfficiencyMatrix.coerce(gammas, n)
    p = probe.gram_matrix()
    if p.shape != g.shape:
        raise InvalidProbe(f"probe Gram shape {p.shape} does not match {g.shape}")
    sq = eff.sqrt_diag()
    return g - sq @ (np.conj(g) * p) @ sq


def check_probabilistic(state_set: StateSet, gammas, probe: ProbeSpec,
                        tol: float = PSD_TOL) -> FeasibilityVerdict:
    """Probabilistic machine with efficiencies ``gamma_i`` and given probe."""
    m = constraint_matrix(gram(state_set), gammas, probe)
    lam_min = float(np.linalg.eigvalsh(m).min())
    if lam_min >= -tol:
        return FeasibilityVerdict(True, witness=probe, lambda_min=lam_min)
    return FeasibilityVerdict(
        False, witness=probe, violation={"lambda_min": lam_min},
        lambda_min=lam_min)


def solve_dependent_triple(s1: QuditState, s2: QuditState, s3: QuditState,
                           gamma1: float, gamma2: float, phase: float,
                           tol: float = PARALLEL_TOL):
    """Forced efficiency and branch phase of a dependent third qubit state.

    With ``s3 = alpha s1 + beta s2`` and the first two states flipped with
    efficiencies ``gamma1, gamma2`` and relative branch phase ``phase``,
    linearity forces the third branch: the combination

    ``v = alpha sqrt(gamma1) s1_perp + beta exp(i phase) sqrt(gamma2) s2_perp``

    must be parallel to ``s3_perp`` with norm at most 1.  Returns the pair
    ``(gamma3, chi)`` with ``v = sqrt(gamma3) exp(i chi) s3_perp``, or
    ``None`` when the constraint cannot be met.
    """
    for s in (s1, s2, s3):
        if s.dim != 2:
            raise WrongDimension("dependent-triple analysis is for qubits")
    for gname, gval in (("gamma1", gamma1), ("gamma2", gamma2)):
        if not (0.0 < gval <= 1.0 + 1e-12):
            raise ValueError(f"{gname} must lie in (0, 1]")
    basis = np.stack([s1.amps, s2.amps], axis=1)
    if np.linalg.svd(basis, compute_uv=False)[-1] < 1e-9:
        raise LinearlyDependentPair("reference states are parallel")
    alpha, beta = np.linalg.solve(basis, s3.amps)
    v = (alpha * np.sqrt(gamma1) * orthogonal_complement(s1).amps
         + beta * np.exp(1j * phase) * np.sqrt(gamma2) * orthogonal_complement(s2).amps)
    t3 = orthogonal_complement(s3).amps
    lam = np.vdot(t3, v)
    if np.linalg.norm(v - lam * t3) > tol:
        return None
    if abs(lam) > 1.0 + 1e-12:
        return None
    gamma3 = min(float(abs(lam) ** 2), 1.0)
    return gamma3, float(np.angle(lam))


def feasible_gamma_region_empty(state_set: StateSet, probe: ProbeSpec,
                                tol: float = PSD_TOL) -> bool:
    """True when not even vanishing efficiencies are feasible (never, for
    genuine state sets: the constraint matrix tends to the PSD Gram)."""
    eps = 1e-12
    verdict = check_probabilistic(state_set, np.full(len(state_set), eps),
                                  probe, tol)
    return not verdict.feasible
