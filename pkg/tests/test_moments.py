import math

import numpy as np
import pytest

from vcslab import errors, moments, spectra, vcs


def eds_pair(dim=16):
    # e1[n] = n + 0.3, e2[n] = sqrt(2) (n + 0.5): positive grounds, disjoint
    return [
        spectra.linear_sequence(dim, 1.0, offset=0.3),
        spectra.linear_sequence(dim, math.sqrt(2.0), offset=math.sqrt(2.0) / 2),
    ]


def eds_weights():
    return [
        moments.MomentWeight.gamma_family(1.0),
        moments.MomentWeight.gamma_family(math.sqrt(2.0)),
    ]


class TestVerifyMoments:
    def test_unit_scale_exactness(self):
        # int_0^inf u^k e^-u du = k!, reproduced to quadrature exactness
        weight = moments.MomentWeight.gamma_family(1.0)
        errs = moments.verify_moments(weight, spectra.linear_sequence(30), k_max=20)
        assert errs.max() <= 1e-12

    def test_scaled_moments(self):
        # weight scale 2 against e~[n] = 2n: moments 2^k k!
        weight = moments.MomentWeight.gamma_family(2.0)
        seq = spectra.linear_sequence(16, 2.0)
        errs = moments.verify_moments(weight, seq, k_max=12)
        assert errs.max() <= 1e-12
        for k in range(5):
            assert weight.analytic_moment(k) == pytest.approx(2.0**k * math.factorial(k))

    def test_zeroth_moment_is_one(self):
        weight = moments.MomentWeight.gamma_family(3.7)
        errs = moments.verify_moments(weight, spectra.linear_sequence(8, 3.7), k_max=0)
        assert errs[0] <= 1e-14

    def test_mismatched_weight_detected(self):
        weight = moments.MomentWeight.gamma_family(2.0)
        seq = spectra.linear_sequence(12, 1.0)
        errs = moments.verify_moments(weight, seq, k_max=6)
        assert errs.max() > 0.5

    def test_tabulated_weight_verifies(self):
        u = np.linspace(0.0, 80.0, 400_001)
        rho = np.exp(-u)
        weight = moments.MomentWeight.tabulated(u, rho)
        errs = moments.verify_moments(weight, spectra.linear_sequence(10), k_max=6)
        assert errs.max() <= 1e-8

    def test_tabulated_insufficient_coverage(self):
        u = np.linspace(0.0, 1.0, 2001)  # integrand has not decayed by u = 1
        weight = moments.MomentWeight.tabulated(u, np.exp(-u))
        with pytest.raises(errors.UnverifiableWeightError):
            moments.verify_moments(weight, spectra.linear_sequence(10), k_max=6)

    def test_negative_weight_rejected(self):
        with pytest.raises(errors.UnverifiableWeightError):
            moments.MomentWeight.tabulated(np.linspace(0, 1, 20), -np.ones(20))


class TestCesaroAverage:
    def test_zero_frequency(self):
        out = moments.cesaro_phase_average(np.array([0.0]), 100.0, 0.01)
        assert out[0] == pytest.approx(1.0)

    def test_matches_direct_summation(self):
        thetas = np.array([0.0, 0.13, 0.9, -2.4])
        closed = moments.cesaro_phase_average(thetas, 5.0, 0.05)
        direct = moments.cesaro_phase_average(thetas, 5.0, 0.05, method="direct")
        np.testing.assert_allclose(closed, direct, atol=1e-12)

    def test_single_mode_oracle(self):
        # the large-horizon average of exp(i theta gamma) is sin(tG)/(tG)
        theta, horizon = 0.8, 2000.0
        out = moments.cesaro_phase_average(np.array([theta]), horizon, 1e-3)
        expected = math.sin(theta * horizon) / (theta * horizon)
        assert out[0] == pytest.approx(expected, abs=1e-6)

    def test_step_must_resolve_phases(self):
        with pytest.raises(errors.ConfigError):
            moments.cesaro_phase_average(np.array([50.0]), 10.0, 1.0)


class TestResolutionCheck:
    def test_eds_family_small(self):
        quad = moments.QuadratureSpec(n_nodes=40, gamma_horizon=1e4)
        report = moments.resolution_check("eds", eds_pair(), eds_weights(), quad)
        assert report.diag_error <= 1e-8
        assert report.offdiag_error <= 1e-2
        assert report.hermiticity_defect <= 1e-12
        assert report.k_check == 15

    def test_offdiag_shrinks_with_horizon(self):
        errs, diags = [], []
        for horizon in (1e2, 1e3, 1e4):
            quad = moments.QuadratureSpec(n_nodes=40, gamma_horizon=horizon)
            report = moments.resolution_check("eds", eds_pair(), eds_weights(), quad)
            errs.append(report.offdiag_error)
            diags.append(report.diag_error)
        assert errs[0] > errs[1] > errs[2]
        # full-window residual trends down toward the quadrature floor
        assert errs[2] <= errs[0] / 30
        # the diagonal error is quadrature-limited: horizon independent
        assert max(diags) - min(diags) <= 1e-13

    def test_delta_family(self):
        seqs = [spectra.linear_sequence(16), spectra.linear_sequence(16)]
        weights = [moments.MomentWeight.gamma_family(1.0)] * 2
        quad = moments.QuadratureSpec(n_nodes=40, gamma_horizon=1e4)
        report = moments.resolution_check("delta", seqs, weights, quad, delta=0.5)
        assert report.diag_error <= 1e-8
        assert report.offdiag_error <= 1e-2

    def test_delta_family_rejects_nonpositive_delta(self):
        seqs = [spectra.linear_sequence(16), spectra.linear_sequence(16)]
        weights = [moments.MomentWeight.gamma_family(1.0)] * 2
        with pytest.raises(errors.NonPositiveDeltaError):
            moments.resolution_check("delta", seqs, weights, delta=0.0)

    def test_eds_family_requires_disjoint_spectra(self):
        seqs = [
            spectra.linear_sequence(12, offset=0.3),
            spectra.linear_sequence(12, offset=0.3),
        ]
        with pytest.raises(errors.SpectraNotDisjointError):
            moments.resolution_check("eds", seqs, [moments.MomentWeight.gamma_family(1.0)] * 2)

    def test_bad_weight_rejected(self):
        seqs = eds_pair()
        weights = [moments.MomentWeight.gamma_family(2.0)] * 2  # wrong scales
        with pytest.raises(errors.UnverifiableWeightError):
            moments.resolution_check("eds", seqs, weights)

    def test_quadrature_spec_node_floor(self):
        quad = moments.QuadratureSpec(n_nodes=4, gamma_horizon=1e3)
        with pytest.raises(errors.ConfigError):
            moments.resolution_check("eds", eds_pair(), eds_weights(), quad)


class TestLiteralAssemblyOracle:
    """Brute-force duplicate of the resolution assembly from actual states.

    Builds every coherent state on the (J1, J2, gamma) product grid, sums the
    weighted projectors literally, and compares against the factorized
    assembly used by resolution_check (same nodes, same trapezoid grid).
    """

    def literal_identity(self, family, seqs, weights, n_nodes, horizon, step, delta):
        dim = seqs[0].dim
        m = max(16, int(np.ceil(2.0 * horizon / step)))
        s = 2.0 * horizon / m
        gammas = -horizon + s * np.arange(m + 1)
        g_weights = np.full(m + 1, s / (2.0 * horizon))
        g_weights[0] *= 0.5
        g_weights[-1] *= 0.5
        nodes1, w1 = weights[0].quadrature(n_nodes)
        nodes2, w2 = weights[1].quadrature(n_nodes)

        out = np.zeros((2 * dim, 2 * dim), dtype=complex)
        for j1, wj1 in zip(nodes1, w1):
            for j2, wj2 in zip(nodes2, w2):
                for gamma, wg in zip(gammas, g_weights):
                    params = vcs.VcsParams((j1, j2), gamma, delta)
                    if family == "eds":
                        state = vcs.eds_family_state(seqs, params, tail_tol=None)
                    else:
                        state = vcs.delta_family_state(seqs, params, tail_tol=None)
                    c = state.vector.data
                    out += (wj1 * wj2 * wg * state.norm_const) * np.outer(c, c.conj())
        return out

    @pytest.mark.parametrize("family,delta", [("eds", 0.0), ("delta", 0.7)])
    def test_factorized_assembly_matches_literal(self, family, delta):
        # every quadrature node must sit inside the truncation's disc so the
        # literal route can build actual states at it
        dim, n_nodes, horizon, step = 20, 6, 5.0, 0.05
        if family == "eds":
            seqs = eds_pair(dim)
            wts = eds_weights()
        else:
            seqs = [spectra.linear_sequence(dim), spectra.linear_sequence(dim)]
            wts = [moments.MomentWeight.gamma_family(1.0)] * 2
        quad = moments.QuadratureSpec(
            n_nodes=n_nodes, gamma_horizon=horizon, gamma_step=step, k_check=8
        )
        report = moments.resolution_check(
            family, seqs, wts, quad, delta=delta, keep_matrix=True
        )
        literal = self.literal_identity(family, seqs, wts, n_nodes, horizon, step, delta)
        np.testing.assert_allclose(report.matrix, literal, atol=5e-12)


class TestDeltaZeroFailure:
    def seqs_and_weights(self, dim=16):
        seqs = [spectra.linear_sequence(dim), spectra.linear_sequence(dim)]
        weights = [moments.MomentWeight.gamma_family(1.0)] * 2
        return seqs, weights

    def test_cross_entry_is_order_one_and_horizon_stable(self):
        seqs, weights = self.seqs_and_weights()
        mags = []
        for horizon in (1e2, 1e4):
            quad = moments.QuadratureSpec(n_nodes=40, gamma_horizon=horizon)
            report = moments.delta_zero_failure(seqs, weights, quad)
            mags.append(report.magnitude)
        assert mags[0] == pytest.approx(1.0, abs=1e-10)
        assert abs(mags[1] - mags[0]) / mags[0] < 0.05

    def test_positive_delta_restores_decay(self):
        seqs, weights = self.seqs_and_weights()
        mags = []
        for horizon in (1e2, 1e4):
            quad = moments.QuadratureSpec(n_nodes=40, gamma_horizon=horizon)
            report = moments.delta_zero_failure(seqs, weights, quad, delta=0.5)
            mags.append(report.magnitude)
        # envelope of the phase average decays like 1/horizon
        assert 50 < mags[0] / mags[1] < 200

    def test_entry_factorizes(self):
        seqs, weights = self.seqs_and_weights()
        quad = moments.QuadratureSpec(n_nodes=40, gamma_horizon=1e3)
        for delta in (0.0, 0.5):
            report = moments.delta_zero_failure(seqs, weights, quad, delta=delta)
            assert report.magnitude == pytest.approx(
                abs(report.j_integral * report.cesaro_factor), rel=1e-12
            )


class TestResidualTable:
    def test_written_format(self, tmp_path):
        path = tmp_path / "residuals.tsv"
        moments.write_residual_table(path, [1e2, 1e3], [1e-11, 1e-11], [3e-4, 3e-5])
        lines = path.read_text().splitlines()
        assert lines[0].startswith("#")
        assert len(lines) == 3
        assert float(lines[1].split("\t")[0]) == 1e2
