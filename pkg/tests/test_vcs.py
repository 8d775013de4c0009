import math

import numpy as np
import pytest

from vcslab import errors, hilbert, spectra, vcs


def eds_linear_pair(dim=60):
    return [
        spectra.linear_sequence(dim, 1.0, offset=0.3),
        spectra.linear_sequence(dim, math.sqrt(2.0), offset=0.55),
    ]


def eds_quon_pair(dim=50):
    # nonlinear spectra with positive, pairwise disjoint eigenvalues;
    # bounded quon values saturate in float64 near n ~ 53 at q = 0.5
    return [
        spectra.quon_sequence(dim, 0.5, offset=0.3),
        spectra.quon_sequence(dim, 0.7, offset=0.55),
    ]


def zero_ground_pair(dim=60):
    return [spectra.linear_sequence(dim), spectra.linear_sequence(dim, 1.0)]


class TestSeriesNorm:
    def test_exponential_series(self):
        shifted = spectra.shift(spectra.linear_sequence(40))
        value, tail = vcs.series_norm(shifted, 1.0)
        assert value == pytest.approx(math.e, rel=1e-14)
        assert tail < 1e-12

    def test_zero_intensity(self):
        shifted = spectra.shift(spectra.linear_sequence(10))
        value, tail = vcs.series_norm(shifted, 0.0)
        assert value == 1.0
        assert tail == 0.0

    def test_scaled_exponential(self):
        omega, j = 2.0, 3.0
        shifted = spectra.shift(spectra.linear_sequence(60, omega))
        value, _ = vcs.series_norm(shifted, j)
        assert value == pytest.approx(math.exp(j / omega), rel=1e-13)

    def test_out_of_disc_for_bounded_spectrum(self):
        shifted = spectra.shift(spectra.quon_sequence(50, 0.5))  # radius 2
        with pytest.raises(errors.OutOfDiscError):
            vcs.series_norm(shifted, 2.5)

    def test_tail_too_large_near_disc_edge(self):
        shifted = spectra.shift(spectra.quon_sequence(50, 0.5))
        with pytest.raises(errors.TailTooLargeError):
            vcs.series_norm(shifted, 1.9)

    def test_negative_intensity(self):
        shifted = spectra.shift(spectra.linear_sequence(10))
        with pytest.raises(errors.OutOfDiscError):
            vcs.series_norm(shifted, -0.1)


class TestDeltaFamilyState:
    def test_zero_intensity_closed_form(self):
        gamma, delta = 1.3, 0.7
        state = vcs.delta_family_state(
            zero_ground_pair(12), vcs.VcsParams((0.0, 0.0), gamma, delta)
        )
        assert state.norm_const == pytest.approx(2.0)
        expected_b = np.exp(-1j * delta * gamma) / math.sqrt(2.0)
        expected_f = np.exp(+1j * delta * gamma) / math.sqrt(2.0)
        assert state.vector.block(0)[0] == pytest.approx(expected_b, abs=1e-15)
        assert state.vector.block(1)[0] == pytest.approx(expected_f, abs=1e-15)
        assert np.abs(state.vector.block(0)[1:]).max() == 0

    def test_unit_norm(self):
        state = vcs.delta_family_state(
            zero_ground_pair(), vcs.VcsParams((1.5, 2.5), 0.8, 0.3)
        )
        assert state.vector.norm() == pytest.approx(1.0, abs=1e-13)
        assert state.tail_bound < 1e-10

    def test_norm_constant_closed_form(self):
        state = vcs.delta_family_state(
            zero_ground_pair(), vcs.VcsParams((1.0, 4.0), 0.0, 0.1)
        )
        assert state.norm_const == pytest.approx(math.e + math.exp(4.0), rel=1e-12)

    def test_requires_positive_delta(self):
        with pytest.raises(errors.RegimeError):
            vcs.delta_family_state(zero_ground_pair(12), vcs.VcsParams((1, 1), 0.0, 0.0))

    def test_requires_zero_ground(self):
        with pytest.raises(errors.RegimeError):
            vcs.delta_family_state(eds_linear_pair(12), vcs.VcsParams((1, 1), 0.0, 0.5))


class TestEdsFamilyState:
    def test_zero_intensity_closed_form(self):
        gamma = 2.1
        seqs = eds_linear_pair(12)
        state = vcs.eds_family_state(seqs, vcs.VcsParams((0.0, 0.0), gamma))
        for j, s in enumerate(seqs):
            expected = np.exp(-1j * s.ground * gamma) / math.sqrt(2.0)
            assert state.vector.block(j)[0] == pytest.approx(expected, abs=1e-15)

    def test_real_positive_at_zero_gamma(self):
        seqs = eds_linear_pair(40)
        state = vcs.eds_family_state(seqs, vcs.VcsParams((1.2, 0.8), 0.0))
        coeffs = state.vector.data
        assert np.abs(coeffs.imag).max() == 0
        assert coeffs.real.min() > 0
        # sector weight J^(n/2)/sqrt(e~[n]! N~)
        fact = spectra.factorials(spectra.shift(seqs[0])).products
        expected = 1.2 ** (np.arange(40) / 2.0) / np.sqrt(fact * state.norm_const)
        np.testing.assert_allclose(state.vector.block(0).real, expected, rtol=1e-13)

    def test_unit_norm_random_params(self):
        rng = np.random.default_rng(3)
        seqs = eds_linear_pair()
        for _ in range(10):
            params = vcs.VcsParams(rng.uniform(0, 4, size=2), rng.uniform(-5, 5))
            state = vcs.eds_family_state(seqs, params)
            assert abs(state.vector.norm() - 1.0) <= state.tail_bound + 1e-13

    def test_single_sector_state(self):
        # one sector: the classic single-Hamiltonian coherent state
        seq = spectra.linear_sequence(50)
        state = vcs.eds_family_state([seq], vcs.VcsParams((1.0,), 0.5))
        assert state.norm_const == pytest.approx(math.e, rel=1e-13)
        assert state.vector.norm() == pytest.approx(1.0, abs=1e-13)

    def test_rejects_colliding_spectra(self):
        seqs = [
            spectra.linear_sequence(12, offset=0.3),
            spectra.linear_sequence(12, offset=0.3),
        ]
        with pytest.raises(errors.SpectraNotDisjointError):
            vcs.eds_family_state(seqs, vcs.VcsParams((1, 1), 0.0))

    def test_rejects_zero_ground_multi_sector(self):
        with pytest.raises(errors.RegimeError):
            vcs.eds_family_state(zero_ground_pair(12), vcs.VcsParams((1, 1), 0.0))


class TestActionIdentity:
    def test_zero_intensities(self):
        seqs = eds_linear_pair(12)
        state = vcs.eds_family_state(seqs, vcs.VcsParams((0.0, 0.0), 0.9))
        h_tau = hilbert.shifted_hamiltonian(seqs)
        assert vcs.action_identity_residual(state, h_tau) <= 1e-15

    def test_equal_intensities_linear(self):
        # both sectors e~[n] = n: closed form reduces to <H_tau> = J
        seqs = [
            spectra.linear_sequence(60, offset=0.3),
            spectra.linear_sequence(60, offset=0.7),
        ]
        j = 1.7
        state = vcs.eds_family_state(seqs, vcs.VcsParams((j, j), 1.1))
        h_tau = hilbert.shifted_hamiltonian(seqs)
        lhs = state.vector.inner(h_tau.apply(state.vector)).real
        assert lhs == pytest.approx(j, rel=1e-12)
        assert vcs.action_identity_residual(state, h_tau) <= 1e-12

    def test_random_in_disc(self):
        rng = np.random.default_rng(11)
        seqs = eds_linear_pair()
        h_tau = hilbert.shifted_hamiltonian(seqs)
        for _ in range(20):
            params = vcs.VcsParams(rng.uniform(0, 4, size=2), rng.uniform(-3, 3))
            state = vcs.eds_family_state(seqs, params)
            resid = vcs.action_identity_residual(state, h_tau)
            assert resid <= max(10 * state.tail_bound, 5e-13)

    def test_delta_family_variant(self):
        seqs = zero_ground_pair()
        state = vcs.delta_family_state(seqs, vcs.VcsParams((2.0, 1.0), 0.6, 0.4))
        h = hilbert.susy_hamiltonian(seqs)
        assert vcs.action_identity_residual(state, h) <= 5e-13

    def test_dimension_mismatch(self):
        seqs = eds_linear_pair(20)
        state = vcs.eds_family_state(seqs, vcs.VcsParams((1.0, 1.0), 0.0))
        other = hilbert.shifted_hamiltonian(eds_linear_pair(21))
        with pytest.raises(errors.DimensionMismatchError):
            vcs.action_identity_residual(state, other)


class TestTemporalStability:
    def test_zero_time(self):
        seqs = eds_linear_pair(20)
        params = vcs.VcsParams((1.0, 2.0), 0.7)
        assert vcs.temporal_stability_residual(seqs, params, 0.0, "eds-family") == 0

    def test_eds_family_physical_evolution(self):
        seqs = eds_linear_pair()
        params = vcs.VcsParams((1.5, 2.0), 0.4)
        for t in (0.1, 1.0, 10.0, 2 * math.pi):
            resid = vcs.temporal_stability_residual(seqs, params, t, "eds-family")
            assert resid <= 1e-10

    def test_delta_family_own_evolution(self):
        seqs = zero_ground_pair()
        params = vcs.VcsParams((1.0, 2.0), 0.7, 0.5)
        for t in (0.1, 1.0, 10.0):
            resid = vcs.temporal_stability_residual(seqs, params, t, "delta-family")
            assert resid <= 1e-10

    def test_delta_family_fails_under_physical_evolution(self):
        # exp(-iHt) does not map the delta family to shifted gamma
        seqs = zero_ground_pair()
        params = vcs.VcsParams((1.0, 1.0), 0.7, 0.5)
        resid = vcs.temporal_stability_residual(
            seqs, params, 1.0, "delta-family", evolution="physical"
        )
        assert resid > 1e-2


class TestEigenstateRelation:
    def test_zero_intensities(self):
        seqs = eds_linear_pair(12)
        state = vcs.eds_family_state(seqs, vcs.VcsParams((0.0, 0.0), 0.9))
        lowering = hilbert.eds_lowering_operator([spectra.shift(s) for s in seqs], 0.9)
        assert vcs.eigenstate_residual(state, lowering) <= 1e-15

    def test_matched_gamma(self):
        rng = np.random.default_rng(5)
        seqs = eds_linear_pair()
        shifted = [spectra.shift(s) for s in seqs]
        for _ in range(10):
            params = vcs.VcsParams(rng.uniform(0, 4, size=2), rng.uniform(-3, 3))
            state = vcs.eds_family_state(seqs, params)
            lowering = hilbert.eds_lowering_operator(shifted, params.gamma)
            resid = vcs.eigenstate_residual(state, lowering)
            assert resid <= max(10 * state.tail_bound, 5e-13)

    def test_matched_gamma_delta_family(self):
        seqs = zero_ground_pair()
        params = vcs.VcsParams((1.3, 0.6), 1.9, 0.8)
        state = vcs.delta_family_state(seqs, params)
        lowering = hilbert.delta_lowering_operator(seqs, params.gamma)
        assert vcs.eigenstate_residual(state, lowering) <= 5e-13

    def test_single_sector_reduces_to_plain_coherent_state(self):
        # one sector: the classic construction, eigenstate of its own ladder
        seq = spectra.linear_sequence(50)
        params = vcs.VcsParams((1.5,), 0.8)
        state = vcs.eds_family_state([seq], params)
        lowering = hilbert.lowering_operator([spectra.shift(seq)], params.gamma)
        assert vcs.eigenstate_residual(state, lowering) <= 5e-13

    def test_mismatched_gamma_nonlinear_witness(self):
        seqs = eds_quon_pair()
        shifted = [spectra.shift(s) for s in seqs]
        gamma = 0.4
        state = vcs.eds_family_state(seqs, vcs.VcsParams((1.0, 1.0), gamma))
        matched = vcs.eigenstate_residual(
            state, hilbert.eds_lowering_operator(shifted, gamma)
        )
        mismatched = vcs.eigenstate_residual(
            state, hilbert.eds_lowering_operator(shifted, gamma + 1.0)
        )
        assert matched <= 5e-13
        assert mismatched > 1e-2


class TestContinuity:
    def test_lipschitz_ratio_bounded(self):
        seqs = eds_linear_pair()
        base = vcs.VcsParams((1.0, 2.0), 0.7)
        state0 = vcs.eds_family_state(seqs, base)
        direction = np.array([0.3, -0.2, 0.5])
        ratios = []
        for h in (1e-1, 1e-2, 1e-3, 1e-4):
            params = vcs.VcsParams(
                (base.intensities[0] + h * direction[0], base.intensities[1] + h * direction[1]),
                base.gamma + h * direction[2],
            )
            dist = (vcs.eds_family_state(seqs, params).vector - state0.vector).norm()
            ratios.append(dist / h)
        ratios = np.asarray(ratios)
        assert ratios.max() / ratios.min() < 1.5  # state distance is ~linear in h


class TestCoefficientExport:
    def test_table_format(self, tmp_path):
        seqs = eds_linear_pair(20)
        state = vcs.eds_family_state(seqs, vcs.VcsParams((1.0, 0.5), 0.3))
        path = tmp_path / "state.tsv"
        vcs.write_coefficients(state, path)
        lines = path.read_text().splitlines()
        assert lines[0].startswith("#")
        assert len(lines) == 1 + 40
        sector, level, re, im = lines[1].split("\t")
        assert (sector, level) == ("0", "0")
        assert complex(float(re), float(im)) == state.vector.block(0)[0]
