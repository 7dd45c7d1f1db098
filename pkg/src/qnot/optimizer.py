"""Largest achievable efficiencies for probabilistic machines.

For a triple with overlap magnitudes ``t_ij`` and phases ``theta_ij`` and
the doubled-phase probe (``<P_1|P_2> = e^{2i theta_12}``,
``<P_1|P_3> = e^{2i theta_13}``), equal efficiencies ``gamma`` are feasible
on an interval ``(0, gamma_max]``.  Writing ``delta = theta_12 - theta_13 +
theta_23``, ``s = t_23^2 sin^2(delta)`` and

    a = -1 + t12^2 + t13^2 + t23^2 - 2 t12 t13 t23 cos(delta)
    b = t23^2 - 1

(``a`` is minus the Gram determinant, negative for independent triples),
the boundary is a root of ``q g^2 + 2 g (2 s - q) + q = 0`` for ``q`` in
``{a, b}``.  :func:`gamma_max_triple` evaluates every root of both
quadratics and keeps the largest one certified feasible by the PSD test,
rather than trusting any single printed branch.  :func:`grid_oracle_triple`
is the independent check: pure bisection against the PSD criterion.

For general families :func:`search_gamma` runs the same bisection with a
shared efficiency (policy ``EQUAL``), optionally followed by cyclic
per-state coordinate ascent (policy ``COORDINATE``).  The doubled-phase
probe makes these certified lower bounds on what an optimal probe could do.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import DegenerateDeterminant, NoFeasiblePoint, NotPSD
from .feasibility import ProbeSpec, constraint_matrix
from .states import GramMatrix, StateSet, gram

PSD_TOL = 1e-9
DET_TOL = 1e-12
BISECTION_STEPS = 60
COORDINATE_CONVERGENCE = 1e-6


def standard_probe(gram_matrix: GramMatrix) -> ProbeSpec:
    """Doubled-phase probe ``phi_j = 2 theta_1j`` for a given Gram."""
    return ProbeSpec.phase_vector(np.mod(2.0 * gram_matrix.phases[0, :],
                                         2.0 * np.pi))


@dataclass(frozen=True)
class TripleBoundInput:
    """Polar overlap data of three pairwise nonorthogonal states."""

    t12: float
    t13: float
    t23: float
    theta12: float
    theta13: float
    theta23: float

    def __post_init__(self):
        for name in ("t12", "t13", "t23"):
            t = getattr(self, name)
            if not (0.0 < t <= 1.0):
                raise ValueError(f"{name} = {t!r} must lie in (0, 1]")

    @classmethod
    def from_gram(cls, gram_matrix: GramMatrix) -> "TripleBoundInput":
        if gram_matrix.n != 3:
            raise ValueError("triple bound needs exactly three states")
        t = gram_matrix.magnitudes
        th = gram_matrix.phases
        return cls(t[0, 1], t[0, 2], t[1, 2], th[0, 1], th[0, 2], th[1, 2])

    @property
    def delta(self) -> float:
        return self.theta12 - self.theta13 + self.theta23

    @property
    def a(self) -> float:
        return (-1.0 + self.t12 ** 2 + self.t13 ** 2 + self.t23 ** 2
                - 2.0 * self.t12 * self.t13 * self.t23 * np.cos(self.delta))

    @property
    def b(self) -> float:
        return self.t23 ** 2 - 1.0

    def gram_matrix(self) -> GramMatrix:
        g12 = self.t12 * np.exp(1j * self.theta12)
        g13 = self.t13 * np.exp(1j * self.theta13)
        g23 = self.t23 * np.exp(1j * self.theta23)
        return GramMatrix(np.array([
            [1.0, g12, g13],
            [np.conj(g12), 1.0, g23],
            [np.conj(g13), np.conj(g23), 1.0]]))

    def probe(self) -> ProbeSpec:
        return ProbeSpec.phase_vector([0.0, 2.0 * self.theta12,
                                       2.0 * self.theta13])


def _equal_gamma_feasible(g: np.ndarray, p: np.ndarray, value: float,
                          tol: float) -> bool:
    m = g - value * (np.conj(g) * p)
    return float(np.linalg.eigvalsh(m).min()) >= -tol


def gamma_max_triple(inp: TripleBoundInput, tol: float = PSD_TOL) -> float:
    """Closed-form largest equal efficiency for a triple, oracle-arbitrated.

    Raises :class:`DegenerateDeterminant` when the Gram determinant sits
    below 1e-12 in magnitude (nearly dependent triple), and :class:`NotPSD`
    when the overlap data is not a valid Gram at all.
    """
    gm = inp.gram_matrix()
    lam = np.linalg.eigvalsh(gm.matrix)
    if float(lam.min()) < -1e-9:
        raise NotPSD("overlap data is not a positive semidefinite Gram")
    a = inp.a
    if abs(a) < DET_TOL:
        raise DegenerateDeterminant(
            f"|det| = {abs(a):.3e} is below {DET_TOL:.1e}")
    s = inp.t23 ** 2 * np.sin(inp.delta) ** 2
    candidates = []
    for q in (a, inp.b):
        if abs(q) < DET_TOL:
            continue
        disc = s * s - q * s
        root = np.sqrt(max(disc, 0.0))
        for sign in (1.0, -1.0):
            val = 1.0 + (sign * 2.0 * root - 2.0 * s) / q
            if 0.0 < val <= 1.0 + 1e-9:
                candidates.append(min(val, 1.0))
    g = gm.matrix
    p = inp.probe().gram_matrix()
    for val in sorted(set(candidates), reverse=True):
        if _equal_gamma_feasible(g, p, max(val - 1e-9, 0.0), tol):
            return float(val)
    # no candidate certified: fall back to the analytic branch
    return float(min(max(1.0 + (2.0 * np.sqrt(s * s - a * s) - 2.0 * s) / a,
                         0.0), 1.0))


def _bisect_boundary(feasible, resolution: int) -> float:
    """Largest feasible value in (0, 1] of a monotone predicate."""
    if feasible(1.0):
        return 1.0
    lo, hi = 0.0, 1.0
    while hi - lo > 1.0 / resolution:
        mid = 0.5 * (lo + hi)
        if feasible(mid):
            lo = mid
        else:
            hi = mid
    for _ in range(BISECTION_STEPS):
        mid = 0.5 * (lo + hi)
        if feasible(mid):
            lo = mid
        else:
            hi = mid
    return lo


def grid_oracle_triple(gram_matrix: GramMatrix, probe: ProbeSpec,
                       resolution: int = 1000, tol: float = PSD_TOL) -> float:
    """Bisection boundary of equal-efficiency feasibility; no closed form."""
    g = gram_matrix.matrix
    p = probe.gram_matrix()
    return _bisect_boundary(lambda v: _equal_gamma_feasible(g, p, v, tol),
                            resolution)


class GammaPolicy(Enum):
    EQUAL = "equal"
    COORDINATE = "coordinate"


@dataclass
class GammaSearchResult:
    gammas: np.ndarray
    probe: ProbeSpec
    mean_gamma: float
    iterations: int
    boundary_lambda_min: float


def search_gamma(state_set: StateSet, policy: GammaPolicy = GammaPolicy.EQUAL,
                 probe: ProbeSpec | None = None,
                 tol: float = PSD_TOL) -> GammaSearchResult:
    """Feasible efficiency vector found by bisection and coordinate ascent.

    ``EQUAL`` bisects one shared efficiency; ``COORDINATE`` then raises
    each ``gamma_i`` in turn (holding the others) until a full sweep moves
    no coordinate by more than 1e-6.  The result is always verified
    feasible before it is returned.  When even the smallest efficiencies
    fail (which no genuine Gram produces), the safe equal-efficiency point
    of :func:`synthesize` is returned instead, or
    :class:`NoFeasiblePoint` is raised for dependent families.
    """
    gm = gram(state_set)
    if probe is None:
        probe = standard_probe(gm)
    g = gm.matrix
    p = probe.gram_matrix()
    n = gm.n
    evals = 0

    def feasible_vec(vec) -> bool:
        nonlocal evals
        evals += 1
        sq = np.diag(np.sqrt(vec))
        m = g - sq @ (np.conj(g) * p) @ sq
        return float(np.linalg.eigvalsh(m).min()) >= -tol

    equal = _bisect_boundary(lambda v: feasible_vec(np.full(n, v)), 1000)
    if equal <= 0.0:
        return _fallback_point(state_set, probe, evals)
    gammas = np.full(n, equal)

    if policy is GammaPolicy.COORDINATE:
        for _ in range(200):
            biggest_move = 0.0
            for i in range(n):
                lo = gammas[i]
                hi = 1.0
                trial = gammas.copy()
                trial[i] = 1.0
                if feasible_vec(trial):
                    lo = 1.0
                else:
                    for _ in range(BISECTION_STEPS):
                        mid = 0.5 * (lo + hi)
                        trial[i] = mid
                        if feasible_vec(trial):
                            lo = mid
                        else:
                            hi = mid
                biggest_move = max(biggest_move, lo - gammas[i])
                gammas[i] = lo
            if biggest_move < COORDINATE_CONVERGENCE:
                break

    sq = np.diag(np.sqrt(gammas))
    lam_min = float(np.linalg.eigvalsh(g - sq @ (np.conj(g) * p) @ sq).min())
    return GammaSearchResult(gammas, probe, float(gammas.mean()), evals,
                             lam_min)


def _fallback_point(state_set: StateSet, probe: ProbeSpec,
                    evals: int) -> GammaSearchResult:
    from .synthesis import synthesize  # local import to avoid a cycle

    gm = gram(state_set)
    if float(np.linalg.eigvalsh(gm.matrix).min()) <= 1e-9:
        raise NoFeasiblePoint("no feasible efficiencies certified")
    _, report = synthesize(state_set, exact_when_real=False)
    n = gm.n
    gammas = np.full(n, report.epsilon)
    sq = np.diag(np.sqrt(gammas))
    p = probe.gram_matrix()
    lam_min = float(np.linalg.eigvalsh(
        gm.matrix - sq @ (np.conj(gm.matrix) * p) @ sq).min())
    return GammaSearchResult(gammas, probe, float(gammas.mean()), evals,
                             lam_min)
