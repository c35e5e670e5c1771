import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fockpipe import fock, metrics, oracle, scheme
from fockpipe.oracle import AnalyticState, CoherentTerm

from conftest import random_amplitude, series_coherent

CASES = [(0, 0), (0, 1), (1, 0), (1, 1)]

amplitude = st.builds(
    lambda r, t: r * cmath.exp(1j * t),
    st.floats(0, 2.5),
    st.floats(0, 2 * math.pi),
)


def series_overlap(x, ma, y, mb, cutoff=80):
    return np.vdot(series_coherent(x, cutoff, ma), series_coherent(y, cutoff, mb))


def random_terms(rng, modes, count):
    return [
        CoherentTerm(
            tuple(random_amplitude(rng, 2.0) for _ in range(modes)),
            tuple(int(m) for m in rng.integers(0, 2, modes)),
            complex(rng.normal(), rng.normal()),
        )
        for _ in range(count)
    ]


class TestOverlaps:
    def test_self_overlap(self):
        assert oracle.overlap_single_mode(1.3j, 0, 1.3j, 0) == pytest.approx(1.0, abs=1e-15)
        assert oracle.overlap_single_mode(1.5, 1, 1.5, 1) == pytest.approx(1 + 1.5**2, abs=1e-14)

    def test_known_value(self):
        value = oracle.overlap_single_mode(1.0, 1, 2.0, 1)
        assert value == pytest.approx(3 * math.exp(-0.5), abs=1e-14)
        assert value == pytest.approx(series_overlap(1.0, 1, 2.0, 1, cutoff=60), abs=1e-12)

    @pytest.mark.parametrize("ma,mb", CASES)
    def test_against_series_fixed(self, ma, mb, rng):
        for _ in range(6):
            x, y = random_amplitude(rng, 2.5), random_amplitude(rng, 2.5)
            assert abs(oracle.overlap_single_mode(x, ma, y, mb) - series_overlap(x, ma, y, mb)) <= 1e-10

    @settings(max_examples=40, deadline=None)
    @given(x=amplitude, y=amplitude, case=st.sampled_from(CASES))
    def test_against_series(self, x, y, case):
        ma, mb = case
        assert abs(oracle.overlap_single_mode(x, ma, y, mb) - series_overlap(x, ma, y, mb)) <= 1e-10

    @settings(max_examples=50, deadline=None)
    @given(x=amplitude, y=amplitude, case=st.sampled_from(CASES))
    def test_conjugate_symmetry(self, x, y, case):
        ma, mb = case
        forward = oracle.overlap_single_mode(x, ma, y, mb)
        backward = oracle.overlap_single_mode(y, mb, x, ma)
        assert abs(forward - backward.conjugate()) <= 1e-14 * max(1.0, abs(forward))

    def test_rejects_double_addition(self):
        with pytest.raises(ValueError):
            CoherentTerm((1.0,), (2,))


class TestGram:
    def test_hermitian_psd_many_modes(self, rng):
        for _ in range(5):
            terms = random_terms(rng, 11, 7)
            gram = oracle.gram_matrix(terms)
            np.testing.assert_allclose(gram, gram.conj().T, atol=1e-14)
            assert np.linalg.eigvalsh(gram).min() >= -1e-12

    def test_norm_matches_fock(self, rng):
        terms = random_terms(rng, 2, 4)
        state = AnalyticState(tuple(terms), 2)
        dense = oracle.to_fock(state, 30)
        assert oracle.norm_squared(state) == pytest.approx(dense.norm_squared(), rel=1e-10)

    def test_cat_norm(self):
        alpha = 2.0
        cat = (cmath.exp(-1j * math.pi / 4) / math.sqrt(2)) * AnalyticState.coherent(alpha) + (
            cmath.exp(1j * math.pi / 4) / math.sqrt(2)
        ) * AnalyticState.coherent(-alpha)
        exact = 1 + (1j * math.exp(-2 * alpha**2)).real
        assert oracle.norm_squared(cat) == pytest.approx(exact, abs=1e-14)
        assert oracle.norm_squared(cat) == pytest.approx(oracle.to_fock(cat, 40).norm_squared(), abs=1e-12)

    def test_zero_norm_fidelity_rejected(self):
        zero = AnalyticState.coherent(1.0) - AnalyticState.coherent(1.0)
        with pytest.raises(ValueError):
            oracle.fidelity_analytic(zero, AnalyticState.coherent(1.0))

    def test_self_fidelity(self, rng):
        state = AnalyticState(tuple(random_terms(rng, 3, 5)), 3)
        assert oracle.fidelity_analytic(state, state) == pytest.approx(1.0, abs=1e-12)


class TestToFock:
    def test_vacuum(self):
        dense = oracle.to_fock(AnalyticState.coherent(0.0), 5)
        np.testing.assert_array_equal(dense.amplitudes, [1, 0, 0, 0, 0, 0])

    def test_spacs_matches_photon_add(self):
        cutoff = 30
        spacs = AnalyticState.coherent(1.0).add_photon(0)
        out, factor = fock.photon_add(fock.coherent_fock(1.0, cutoff), 0)
        np.testing.assert_allclose(oracle.to_fock(spacs, cutoff).amplitudes, factor * out.amplitudes, atol=1e-10)

    def test_norm_matches_analytic(self, rng):
        for _ in range(5):
            state = AnalyticState(tuple(random_terms(rng, 2, 3)), 2)
            dense = oracle.to_fock(state)
            assert dense.norm_squared() == pytest.approx(oracle.norm_squared(state), rel=1e-8)

    def test_fidelity_matches_analytic(self, rng):
        for _ in range(10):
            a = AnalyticState(tuple(random_terms(rng, 2, 2)), 2)
            b = AnalyticState(tuple(random_terms(rng, 2, 3)), 2)
            cutoff = 30
            numeric = metrics.fidelity_fock(oracle.to_fock(a, cutoff), oracle.to_fock(b, cutoff))
            assert numeric == pytest.approx(oracle.fidelity_analytic(a, b), abs=1e-8)

    def test_truncation_guard(self):
        with pytest.raises(fock.TruncationError):
            oracle.to_fock(AnalyticState.coherent(4.0), 10)

    def test_sanders_against_simulation(self):
        from fockpipe.validation import mz_circuit
        from fockpipe.circuit import evolve

        out = evolve(mz_circuit(1.2, 0.7))
        target = oracle.to_fock(scheme.sanders_ecs(1.2, 0.7), out.cutoff)
        assert metrics.fidelity_fock(out, target) >= 1 - 1e-8


class TestSchmidt:
    def test_orthogonal_pair(self):
        bell = (1 / math.sqrt(2)) * (
            AnalyticState.fock01(0).tensor(AnalyticState.fock01(0))
            + AnalyticState.fock01(1).tensor(AnalyticState.fock01(1))
        )
        weights = oracle.schmidt_two_term(bell, (0,))
        assert weights == pytest.approx((0.5, 0.5), abs=1e-14)
        assert oracle.entanglement_entropy(weights) == pytest.approx(1.0, abs=1e-12)

    def test_product_state(self):
        weights = oracle.schmidt_weights(AnalyticState.coherent(1.0, 2.0), (0,))
        assert weights[0] == pytest.approx(1.0, abs=1e-14)
        assert oracle.entanglement_entropy(weights) == pytest.approx(0.0, abs=1e-12)

    def test_ecs_against_partial_trace(self):
        ecs = scheme.sanders_ecs(2.0, 2.0)
        analytic = oracle.entanglement_entropy(oracle.schmidt_two_term(ecs, (0,)))
        numeric = metrics.entanglement_entropy(oracle.to_fock(ecs, 50), (0,))
        assert abs(analytic - numeric) <= 1e-6

    def test_espacs_is_one_ebit(self):
        params = scheme.SchemeParams(3.0, 2.0, 0.05)
        branch = scheme.expected_branch(params, (1, 1))
        entropy = oracle.entanglement_entropy(oracle.schmidt_two_term(branch, (0,)))
        assert abs(entropy - 1.0) <= 1e-3

    def test_weights_sum_to_one(self, rng):
        for _ in range(5):
            state = AnalyticState(tuple(random_terms(rng, 3, 2)), 3)
            weights = oracle.schmidt_two_term(state, (0, 2))
            assert sum(weights) == pytest.approx(1.0, abs=1e-12)
            numeric = metrics.entanglement_entropy(oracle.to_fock(state, 30), (0, 2))
            assert oracle.entanglement_entropy(weights) == pytest.approx(numeric, abs=1e-8)

    def test_more_terms_rejected(self):
        state = AnalyticState(tuple(random_terms(np.random.default_rng(1), 2, 3)), 2)
        with pytest.raises(ValueError, match="numeric path"):
            oracle.schmidt_two_term(state, (0,))

    def test_bad_split(self):
        with pytest.raises(ValueError):
            oracle.schmidt_weights(AnalyticState.coherent(1.0, 1.0), (3,))


class TestDevices:
    def test_beamsplitter_matches_simulation(self, rng):
        a, b = random_amplitude(rng, 1.5), random_amplitude(rng, 1.5)
        state = AnalyticState.coherent(a, b)
        analytic = oracle.beamsplitter_coherent(state, 0.6, 1.1, (0, 1))
        numeric = fock.apply_beamsplitter(oracle.to_fock(state, 30), 0.6, 1.1, (0, 1))
        assert metrics.fidelity_fock(numeric, oracle.to_fock(analytic, 30)) >= 1 - 1e-10

    def test_kerr_matches_simulation(self):
        state = AnalyticState.coherent(1.4 - 0.3j)
        analytic = oracle.kerr_half_pi(state, 0)
        numeric = fock.apply_kerr(oracle.to_fock(state, 30), math.pi / 2, 0)
        assert metrics.fidelity_fock(numeric, oracle.to_fock(analytic, 30)) >= 1 - 1e-10

    def test_photon_added_terms_rejected(self):
        with pytest.raises(ValueError):
            oracle.kerr_half_pi(AnalyticState.coherent(1.0).add_photon(0), 0)
