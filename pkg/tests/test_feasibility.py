import numpy as np
import pytest

from conftest import (
    qubit,
    random_independent_set,
    random_overlapping_pair,
    random_set,
    random_state,
    worked_triple,
)
from oracles import parallel_fit, phase_grid_min_residual, quadratic_roots
from qnot import (
    EfficiencyMatrix,
    GramMismatch,
    InvalidProbeGram,
    LinearlyDependentPair,
    ProbeSpec,
    QuditState,
    StateSet,
    TargetMap,
    ZeroOverlap,
    build_exact_unitary,
    build_probe_unitary,
    check_exact_unitary,
    check_exact_with_probe,
    check_probabilistic,
    constraint_matrix,
    gram,
    orthogonal_complement,
    solve_dependent_triple,
)


def states_for_gram(g, dim, target):
    """Any family of dim-level states realizing the Gram matrix g."""
    vals, vecs = np.linalg.eigh(g)
    factor = np.diag(np.sqrt(np.clip(vals, 0, None))) @ vecs.conj().T
    n = g.shape[0]
    assert dim >= n
    cols = np.zeros((dim, n), dtype=complex)
    cols[:n, :] = factor
    return StateSet(tuple(QuditState.normalized(cols[:, i])
                          for i in range(n)), target)


def phased_real_set(rng, n, dim, target):
    """Real-amplitude family with a per-state phase: always probe-feasible."""
    rows = []
    for _ in range(n):
        amps = rng.normal(size=dim)
        amps = amps / np.linalg.norm(amps)
        rows.append(np.exp(1j * rng.uniform(0, 2 * np.pi)) * amps)
    return StateSet(tuple(QuditState(r) for r in rows), target)


class TestExactUnitary:
    def test_real_pair_feasible(self):
        ss = StateSet((qubit(1, 0), qubit(1, 1)), TargetMap.NOT)
        assert check_exact_unitary(ss).feasible

    def test_singleton_feasible(self):
        ss = StateSet((qubit(1, 1j),), TargetMap.NOT)
        assert check_exact_unitary(ss).feasible

    def test_complex_pair_infeasible_with_location(self):
        ss = StateSet((qubit(1, 1), qubit(1, 1j)), TargetMap.NOT)
        verdict = check_exact_unitary(ss)
        assert not verdict.feasible
        assert sorted(verdict.violation["indices"]) == [0, 1]
        assert verdict.violation["residual"] == pytest.approx(0.5)

    def test_build_maps_members_to_complements(self):
        rng = np.random.default_rng(51)
        for n in (1, 2, 4):
            ss = random_set(rng, n, 2, TargetMap.NOT, real=True)
            u = build_exact_unitary(ss)
            for s in ss:
                out = u @ s.amps
                tgt = orthogonal_complement(s).amps
                assert abs(np.vdot(tgt, out)) > 1 - 1e-10

    def test_build_rejects_complex_gram(self):
        ss = StateSet((qubit(1, 1), qubit(1, 1j)), TargetMap.NOT)
        with pytest.raises(GramMismatch):
            build_exact_unitary(ss)


class TestExactWithProbe:
    def test_any_overlapping_pair_is_feasible(self):
        rng = np.random.default_rng(52)
        for _ in range(50):
            ss = random_overlapping_pair(rng)
            verdict = check_exact_with_probe(ss)
            assert verdict.feasible
            theta = gram(ss).phases[0, 1]
            expected = np.mod(2 * theta, 2 * np.pi)
            assert verdict.witness.phases[1] == pytest.approx(expected,
                                                              abs=1e-12)

    def test_witness_phase_for_known_pair(self):
        ss = StateSet((qubit(1, 1), qubit(1, 1j)), TargetMap.NOT)
        verdict = check_exact_with_probe(ss)
        assert verdict.feasible
        np.testing.assert_allclose(verdict.witness.phases, [0, np.pi / 2],
                                   atol=1e-12)

    def test_real_triple_feasible(self):
        rng = np.random.default_rng(53)
        ss = random_set(rng, 3, 2, TargetMap.NOT, real=True)
        assert check_exact_with_probe(ss).feasible

    def test_phased_real_sets_feasible(self):
        rng = np.random.default_rng(54)
        for _ in range(20):
            ss = phased_real_set(rng, 4, 3, TargetMap.CONJUGATE)
            try:
                assert check_exact_with_probe(ss).feasible
            except ZeroOverlap:
                pass  # a random real overlap can vanish; the check opts out

    def test_engineered_qutrit_triple_infeasible(self):
        # overlap phases pi/7, pi/3, pi/5 break the congruence:
        # theta_13 - theta_12 - theta_23 = -pi/105 is not a multiple of pi
        t = 0.3
        g = np.array([
            [1, t * np.exp(1j * np.pi / 7), t * np.exp(1j * np.pi / 3)],
            [t * np.exp(-1j * np.pi / 7), 1, t * np.exp(1j * np.pi / 5)],
            [t * np.exp(-1j * np.pi / 3), t * np.exp(-1j * np.pi / 5), 1]])
        ss = states_for_gram(g, 3, TargetMap.CONJUGATE)
        verdict = check_exact_with_probe(ss)
        assert not verdict.feasible
        assert verdict.violation["residual"] == pytest.approx(
            abs(np.sin(np.pi / 105)), abs=1e-9)
        # independent confirmation: no probe phase pair comes close to
        # compensating the Gram conjugation (1e-3 grid over both phases)
        assert phase_grid_min_residual(g) > 0.005

    def test_zero_overlap_marks_inapplicable(self):
        ss = StateSet((qubit(1, 0), qubit(0, 1)), TargetMap.NOT)
        with pytest.raises(ZeroOverlap):
            check_exact_with_probe(ss)

    def test_witness_compensates_gram_conjugation(self):
        # G_ij == conj(G_ij) e^{i (phi_j - phi_i)} for feasible families
        rng = np.random.default_rng(55)
        for _ in range(20):
            ss = phased_real_set(rng, 3, 2, TargetMap.NOT)
            try:
                verdict = check_exact_with_probe(ss)
            except ZeroOverlap:
                continue
            assert verdict.feasible
            g = gram(ss).matrix
            p = verdict.witness.gram_matrix()
            assert np.abs(g - np.conj(g) * p).max() < 1e-8


class TestBuildProbeUnitary:
    def test_maps_with_phase_and_unit_success(self):
        rng = np.random.default_rng(56)
        for _ in range(20):
            ss = random_overlapping_pair(rng)
            witness = check_exact_with_probe(ss).witness
            u = build_probe_unitary(ss, witness)
            d = ss.dim
            e0 = np.array([1.0, 0.0])
            for k, (s, t) in enumerate(zip(ss, ss.targets())):
                out = u @ np.kron(s.amps, e0)
                want = np.exp(1j * witness.phases[k]) * np.kron(t.amps, e0)
                assert np.linalg.norm(out - want) < 1e-8

    def test_infeasible_family_raises_gram_mismatch(self):
        ss = worked_triple(0.3)  # congruence violated for this phase
        assert not check_exact_with_probe(ss).feasible
        with pytest.raises(GramMismatch):
            build_probe_unitary(ss, ProbeSpec.phase_vector([0.0, 0.3, 0.0]))

    def test_rank_one_full_gram_probe_accepted(self):
        ss = StateSet((qubit(1, 1), qubit(1, 1j)), TargetMap.NOT)
        phases = check_exact_with_probe(ss).witness.phases
        full = ProbeSpec.full_gram(
            np.outer(np.exp(-1j * phases), np.exp(1j * phases)))
        u1 = build_probe_unitary(ss, full)
        u2 = build_probe_unitary(ss, ProbeSpec.phase_vector(phases))
        np.testing.assert_allclose(u1, u2, atol=1e-10)


class TestProbeSpec:
    def test_phase_vector_pins_first_phase(self):
        p = ProbeSpec.phase_vector([0.4, 1.0, 2.0])
        np.testing.assert_allclose(p.phases, [0.0, 0.6, 1.6], atol=1e-12)

    def test_full_gram_validation(self):
        with pytest.raises(InvalidProbeGram):
            ProbeSpec.full_gram(np.array([[1.0, 1.0], [0.0, 1.0]]))
        with pytest.raises(InvalidProbeGram):
            ProbeSpec.full_gram(np.array([[2.0, 0.0], [0.0, 1.0]]))
        with pytest.raises(InvalidProbeGram):
            ProbeSpec.full_gram(np.array([[1.0, 2.0], [2.0, 1.0]]))

    def test_gram_matrix_of_phase_vector(self):
        p = ProbeSpec.phase_vector([0.0, np.pi / 2])
        g = p.gram_matrix()
        assert g[0, 1] == pytest.approx(1j)
        assert np.linalg.eigvalsh(g).min() > -1e-12


class TestEfficiencyMatrix:
    def test_bounds(self):
        with pytest.raises(ValueError):
            EfficiencyMatrix(np.array([0.0, 0.5]))
        with pytest.raises(ValueError):
            EfficiencyMatrix(np.array([1.5]))
        assert EfficiencyMatrix.coerce(0.5, 3).gammas.tolist() == [0.5] * 3


class TestProbabilistic:
    def test_vanishing_efficiencies_always_feasible(self):
        # the constraint matrix tends to the PSD Gram; the first-order dip
        # is -gamma * lambda_max of the subtracted part, so gammas well
        # below the PSD tolerance are always accepted
        rng = np.random.default_rng(57)
        for _ in range(20):
            ss = random_set(rng, 3, 2, TargetMap.NOT)
            probe = ProbeSpec.phase_vector(rng.uniform(0, 2 * np.pi, 3))
            verdict = check_probabilistic(ss, np.full(3, 1e-10), probe)
            assert verdict.feasible

    def test_exact_regime_embeds_at_unit_efficiency(self):
        # probe-feasible family + witness probe => gamma = 1 feasible with
        # the constraint matrix collapsing to zero
        rng = np.random.default_rng(58)
        for _ in range(10):
            ss = random_overlapping_pair(rng)
            witness = check_exact_with_probe(ss).witness
            m = constraint_matrix(gram(ss), np.ones(2), witness)
            assert np.abs(m).max() < 1e-10
            assert check_probabilistic(ss, np.ones(2), witness).feasible

    def test_real_gram_perfect_with_trivial_probe(self):
        rng = np.random.default_rng(59)
        ss = random_set(rng, 2, 2, TargetMap.NOT, real=True)
        probe = ProbeSpec.phase_vector(np.zeros(2))
        assert check_probabilistic(ss, np.ones(2), probe).feasible

    def test_worked_triple_boundary_matches_inequality(self):
        # with branch phases (0, phi, 0) the triple is feasible exactly on
        # the gamma-interval cut out by 1/2 - 2g + g^2/2 + g sin(phi) >= 0
        for phi in (0.0, 0.9, np.pi / 2):
            ss = worked_triple(phi)
            probe = ProbeSpec.phase_vector([0.0, phi, 0.0])
            roots = quadratic_roots(0.5, -2.0 + np.sin(phi), 0.5)
            in_range = [r for r in roots if 0 < r <= 1]
            bound = min(in_range) if in_range else 1.0
            ok = check_probabilistic(ss, np.full(3, bound - 1e-9), probe)
            assert ok.feasible
            if bound < 1:
                bad = check_probabilistic(ss, np.full(3, bound + 1e-6), probe)
                assert not bad.feasible
                assert bad.violation["lambda_min"] < 0

    def test_scalar_scaling_preserves_feasibility(self):
        rng = np.random.default_rng(60)
        for _ in range(20):
            ss = random_set(rng, 3, 2, TargetMap.NOT)
            probe = ProbeSpec.phase_vector(rng.uniform(0, 2 * np.pi, 3))
            gammas = rng.uniform(0.05, 1.0, 3)
            if not check_probabilistic(ss, gammas, probe).feasible:
                continue
            for s in (0.9, 0.5, 0.1):
                assert check_probabilistic(ss, s * gammas, probe).feasible


class TestDependentTriple:
    def test_repeated_state_forces_same_gamma(self):
        rng = np.random.default_rng(61)
        s1 = random_state(rng, 2)
        s2 = random_state(rng, 2)
        got = solve_dependent_triple(s1, s2, s1, 0.7, 0.4, 1.3)
        assert got is not None
        gamma3, chi = got
        assert gamma3 == pytest.approx(0.7, abs=1e-12)
        assert chi == pytest.approx(0.0, abs=1e-12)

    def test_worked_family_gets_equal_gamma_and_zero_phase(self):
        rng = np.random.default_rng(62)
        for _ in range(10):
            phi = rng.uniform(0, 2 * np.pi)
            gamma = rng.uniform(0.1, 1.0)
            ss = worked_triple(phi)
            got = solve_dependent_triple(*ss.states, gamma, gamma, phi)
            assert got is not None
            gamma3, chi = got
            assert gamma3 == pytest.approx(gamma, abs=1e-10)
            assert chi == pytest.approx(0.0, abs=1e-10)

    def test_matches_least_squares_oracle(self):
        rng = np.random.default_rng(63)
        hits = 0
        for _ in range(200):
            s1, s2 = random_state(rng, 2), random_state(rng, 2)
            s3 = random_state(rng, 2)
            gamma = rng.uniform(0.1, 1.0)
            # equal efficiencies with the phase that aligns the branches
            basis = np.stack([s1.amps, s2.amps], axis=1)
            alpha, beta = np.linalg.solve(basis, s3.amps)
            phi = float(np.mod(2 * (np.angle(alpha) - np.angle(beta)),
                               2 * np.pi))
            got = solve_dependent_triple(s1, s2, s3, gamma, gamma, phi)
            v = (alpha * np.sqrt(gamma) * orthogonal_complement(s1).amps
                 + beta * np.exp(1j * phi) * np.sqrt(gamma)
                 * orthogonal_complement(s2).amps)
            lam, resid = parallel_fit(v, orthogonal_complement(s3).amps)
            assert resid < 1e-8
            assert got is not None
            assert got[0] == pytest.approx(abs(lam) ** 2, abs=1e-10)
            assert got[1] == pytest.approx(np.angle(lam), abs=1e-8)
            hits += 1
        assert hits == 200

    def test_generic_unequal_gammas_fail(self):
        # parallel alignment forces equal efficiencies, so mismatched ones
        # must come back empty (checked against the least-squares fit)
        rng = np.random.default_rng(64)
        for _ in range(50):
            s1, s2, s3 = (random_state(rng, 2) for _ in range(3))
            got = solve_dependent_triple(s1, s2, s3, 0.9, 0.3,
                                         rng.uniform(0, 2 * np.pi))
            assert got is None

    def test_parallel_pair_rejected(self):
        s = qubit(1, 1)
        with pytest.raises(LinearlyDependentPair):
            solve_dependent_triple(s, QuditState(-s.amps), s, 1.0, 1.0, 0.0)

    def test_gamma_bounds_validated(self):
        s1, s2 = qubit(1, 0), qubit(1, 1)
        with pytest.raises(ValueError):
            solve_dependent_triple(s1, s2, s1, 0.0, 1.0, 0.0)
