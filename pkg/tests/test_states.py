import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cohdist.errors import (
    DimMismatch,
    IncompleteKrausSet,
    StateValidationError,
    ZeroProbability,
)
from cohdist.oracle import random_mixed, random_pure
from cohdist.states import (
    DEFAULT_TOL,
    GENERAL,
    INCOHERENT,
    STRICTLY_INCOHERENT,
    KrausSet,
    PureState,
    ToleranceConfig,
    apply_channel,
    apply_stochastic,
    classify_kraus,
    dephase,
    fidelity_general,
    fidelity_pure_mixed,
    fidelity_pure_pure,
    validate_density,
)

from conftest import counterexample_matrix

seeds = st.integers(min_value=0, max_value=2**32 - 1)
dims = st.integers(min_value=1, max_value=6)


class TestValidateDensity:
    def test_maximally_mixed(self):
        rho = validate_density(np.eye(2) / 2)
        assert rho.dim == 2

    def test_counterexample_state_is_valid(self):
        rho = validate_density(counterexample_matrix())
        np.testing.assert_allclose(rho.diagonal, [0.25] * 4)

    def test_negative_eigenvalue_with_unit_trace(self):
        # 0.6 + 0.6 - 0.2 = 1, so only positivity fails
        with pytest.raises(StateValidationError) as info:
            validate_density(np.diag([0.6, 0.6, -0.2]))
        assert info.value.kinds == {"NotPSD"}
        assert info.value.violations[0].magnitude == pytest.approx(0.2)

    def test_reports_trace_and_psd_together(self):
        with pytest.raises(StateValidationError) as info:
            validate_density(np.diag([0.7, 0.6, -0.2]))
        assert info.value.kinds == {"TraceNotOne", "NotPSD"}

    def test_trace_violation_magnitude(self):
        with pytest.raises(StateValidationError) as info:
            validate_density(np.diag([0.7, 0.6, -0.2]))
        by_kind = {v.kind: v for v in info.value.violations}
        assert by_kind["TraceNotOne"].magnitude == pytest.approx(0.1)

    def test_not_hermitian(self):
        with pytest.raises(StateValidationError) as info:
            validate_density(np.array([[0.5, 0.1], [0.0, 0.5]]))
        assert "NotHermitian" in info.value.kinds

    def test_not_square(self):
        with pytest.raises(DimMismatch):
            validate_density(np.ones((2, 3)) / 2)

    def test_tolerance_config_rejects_negative(self):
        with pytest.raises(ValueError):
            ToleranceConfig(psd=-1.0)


class TestDephase:
    def test_diagonal_is_fixed_point(self):
        rho = validate_density(np.diag([0.2, 0.3, 0.5]))
        np.testing.assert_array_equal(dephase(rho).entries, rho.entries)

    def test_uniform_superposition(self):
        v = np.array([1, 1]) / np.sqrt(2)
        out = dephase(PureState(v).density())
        np.testing.assert_allclose(out.entries, np.diag([0.5, 0.5]))

    def test_counterexample_state(self):
        out = dephase(validate_density(counterexample_matrix()))
        np.testing.assert_allclose(out.entries, np.eye(4) / 4)

    @given(dims, seeds)
    def test_idempotent(self, d, seed):
        rho = random_mixed(d, seed)
        once = dephase(rho)
        np.testing.assert_allclose(dephase(once).entries, once.entries, atol=DEFAULT_TOL.hermitian)


class TestFidelities:
    def test_pure_pure_examples(self):
        e0, e1 = PureState.basis(2, 0), PureState.basis(2, 1)
        plus = PureState(np.array([1, 1]) / np.sqrt(2))
        assert fidelity_pure_pure(e0, e0) == 1.0
        assert fidelity_pure_pure(e0, e1) == 0.0
        assert fidelity_pure_pure(plus, e0) == pytest.approx(0.70710678, abs=1e-8)

    def test_pure_pure_dim_mismatch(self):
        with pytest.raises(DimMismatch):
            fidelity_pure_pure(PureState.basis(2, 0), PureState.basis(3, 0))

    def test_pure_mixed_examples(self):
        e0 = PureState.basis(2, 0)
        assert fidelity_pure_mixed(e0, validate_density(np.diag([1.0, 0.0]))) == 1.0
        for d in (2, 3, 5):
            assert fidelity_pure_mixed(PureState.basis(d, 0), validate_density(np.eye(d) / d)) == pytest.approx(1 / d)

    def test_pure_mixed_is_squared_root_fidelity(self):
        a = random_pure(3, 1)
        rho = random_mixed(3, 2)
        assert fidelity_pure_mixed(a, rho) == pytest.approx(fidelity_general(a.density(), rho) ** 2, abs=1e-10)

    def test_general_self(self):
        rho = random_mixed(4, 3)
        assert fidelity_general(rho, rho) == pytest.approx(1.0, abs=1e-9)

    def test_general_matches_pure_overlap(self):
        a, b = random_pure(4, 5), random_pure(4, 6)
        assert fidelity_general(a.density(), b.density()) == pytest.approx(fidelity_pure_pure(a, b), abs=1e-10)

    @pytest.mark.parametrize("p,q", [(0.7, 0.5), (0.1, 0.9), (0.5, 0.5), (1.0, 0.3)])
    def test_general_classical_bhattacharyya(self, p, q):
        expected = np.sqrt(p * q) + np.sqrt((1 - p) * (1 - q))
        r1 = validate_density(np.diag([p, 1 - p]))
        r2 = validate_density(np.diag([q, 1 - q]))
        assert fidelity_general(r1, r2) == pytest.approx(expected, abs=1e-12)

    def test_bhattacharyya_frozen_value(self):
        r1 = validate_density(np.diag([0.7, 0.3]))
        r2 = validate_density(np.diag([0.5, 0.5]))
        assert fidelity_general(r1, r2) == pytest.approx(0.9789063129307033, abs=1e-12)

    @settings(max_examples=50)
    @given(dims, seeds, seeds)
    def test_general_symmetric(self, d, s1, s2):
        r1, r2 = random_mixed(d, s1), random_mixed(d, s2)
        assert fidelity_general(r1, r2) == pytest.approx(fidelity_general(r2, r1), abs=DEFAULT_TOL.fidelity)

    @settings(max_examples=50)
    @given(st.integers(2, 5), seeds, seeds)
    def test_general_one_only_for_equal(self, d, s1, s2):
        r1, r2 = random_mixed(d, s1), random_mixed(d, s2)
        same = np.allclose(r1.entries, r2.entries)
        assert (fidelity_general(r1, r2) >= 1 - 1e-9) == same


def _perm_matrix(perm):
    d = len(perm)
    m = np.zeros((d, d))
    m[list(perm), range(d)] = 1.0
    return m


class TestKraus:
    def test_permutation_is_strictly_incoherent(self):
        assert classify_kraus(_perm_matrix([2, 0, 1])) == STRICTLY_INCOHERENT

    def test_counterexample_operators_are_incoherent_only(self, counterexample_kraus):
        assert counterexample_kraus.classifications == [INCOHERENT, INCOHERENT]
        assert counterexample_kraus.classification == INCOHERENT

    def test_all_ones_is_general(self):
        assert classify_kraus(np.ones((2, 2)) / 2) == GENERAL

    def test_small_entries_count_as_zero(self):
        k = np.zeros((3, 3))
        k[0, 0] = 1.0
        k[0, 1] = 1e-12
        assert classify_kraus(k) == STRICTLY_INCOHERENT
        k[0, 1] = 1e-6
        assert classify_kraus(k) == INCOHERENT

    @given(st.integers(1, 6), seeds)
    def test_adjoint_of_strictly_incoherent(self, d, seed):
        rng = np.random.default_rng(seed)
        k = _perm_matrix(rng.permutation(d)) * (rng.normal(size=d) + 1j * rng.normal(size=d))
        k[:, rng.random(d) < 0.3] = 0.0
        assert classify_kraus(k) == STRICTLY_INCOHERENT
        assert classify_kraus(k.conj().T) == STRICTLY_INCOHERENT

    def test_counterexample_completeness(self, counterexample_kraus):
        np.testing.assert_allclose(counterexample_kraus.gram, np.eye(4), atol=1e-12)
        assert counterexample_kraus.complete

    def test_identity_channel(self):
        rho = random_mixed(3, 4)
        out = apply_channel(rho, KrausSet([np.eye(3)]))
        np.testing.assert_allclose(out.entries, rho.entries, atol=1e-15)

    def test_dephasing_channel(self):
        rho = random_mixed(4, 5)
        ks = KrausSet([np.diag(np.eye(4)[i]) for i in range(4)])
        assert ks.classification == STRICTLY_INCOHERENT
        np.testing.assert_allclose(apply_channel(rho, ks).entries, dephase(rho).entries, atol=1e-15)

    def test_counterexample_channel_reaches_target(self, counterexample_rho, counterexample_kraus, psi_12):
        out = apply_channel(counterexample_rho, counterexample_kraus)
        assert fidelity_pure_mixed(psi_12, out) == pytest.approx(1.0, abs=1e-9)

    def test_incomplete_set_rejected(self):
        with pytest.raises(IncompleteKrausSet):
            apply_channel(random_mixed(2, 0), KrausSet([np.diag([1.0, 0.0])]))

    @settings(max_examples=50)
    @given(st.integers(1, 5), seeds)
    def test_sio_keeps_diagonal_states_diagonal(self, d, seed):
        rng = np.random.default_rng(seed)
        # random SIO: K_n = P_n D_n with sum |D_n|^2 = I per column
        n = int(rng.integers(1, 4))
        amps = rng.normal(size=(n, d)) + 1j * rng.normal(size=(n, d))
        amps /= np.linalg.norm(amps, axis=0)
        ks = KrausSet([_perm_matrix(rng.permutation(d)) @ np.diag(a) for a in amps])
        assert ks.complete and ks.classification == STRICTLY_INCOHERENT
        rho = validate_density(np.diag(rng.dirichlet(np.ones(d))))
        out = apply_channel(rho, ks).entries
        np.testing.assert_allclose(out, np.diag(np.diag(out)), atol=1e-12)


class TestStochastic:
    def test_complete_set_has_unit_probability(self, counterexample_rho, counterexample_kraus):
        out, p = apply_stochastic(counterexample_rho, counterexample_kraus)
        assert p == pytest.approx(1.0)
        np.testing.assert_allclose(out.entries, apply_channel(counterexample_rho, counterexample_kraus).entries)

    @pytest.mark.parametrize("d", [2, 3, 4])
    def test_single_projector_on_mixed(self, d):
        proj = np.zeros((d, d))
        proj[0, 0] = 1.0
        out, p = apply_stochastic(validate_density(np.eye(d) / d), KrausSet([proj]))
        assert p == pytest.approx(1 / d)
        np.testing.assert_allclose(out.entries, proj)

    def test_block_projector_on_counterexample(self, counterexample_rho):
        proj = np.diag([1.0, 1.0, 0.0, 0.0])
        out, p = apply_stochastic(counterexample_rho, KrausSet([proj]))
        assert p == pytest.approx(0.5, abs=1e-12)
        np.testing.assert_allclose(out.entries, np.diag([0.5, 0.5, 0, 0]), atol=1e-12)

    def test_zero_probability(self):
        proj = np.diag([0.0, 1.0])
        with pytest.raises(ZeroProbability):
            apply_stochastic(validate_density(np.diag([1.0, 0.0])), KrausSet([proj]))
