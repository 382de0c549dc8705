import math

import numpy as np
import pytest

from estlab.covmodel import (
    CovSpec,
    WeightSpectrum,
    build,
    solvable_inverse,
    solvable_spectrum,
    spectrum_from_matrix,
)
from estlab.errors import InvalidSpec, InvalidSpectrum, NotPositiveDefinite
from estlab.matkernel import SymMatrix, eigendecompose

from conftest import random_spd


class TestCovSpec:
    def test_unknown_kind(self):
        with pytest.raises(InvalidSpec):
            CovSpec("gaussian", 1.0, 0.0, 4)

    def test_solvable_c_bound(self):
        CovSpec("solvable", 1.0, -1.0 / 4, 4)  # boundary itself is representable
        with pytest.raises(InvalidSpec):
            CovSpec("solvable", 1.0, -0.3, 4)

    def test_solvable_rejects_eta(self):
        with pytest.raises(InvalidSpec):
            CovSpec("solvable", 1.0, 0.1, 4, eta=1.0)

    def test_exponential_requires_eta(self):
        with pytest.raises(InvalidSpec):
            CovSpec("exponential", 1.0, 0.1, 4)

    def test_exponential_rejects_negative_c(self):
        with pytest.raises(InvalidSpec):
            CovSpec("exponential", 1.0, -0.1, 4, eta=1.0)

    def test_white_rejects_negative_c(self):
        with pytest.raises(InvalidSpec):
            CovSpec("white", 1.0, -0.1, 4)

    def test_negative_a(self):
        with pytest.raises(InvalidSpec):
            CovSpec("solvable", -1.0, 0.1, 4)

    def test_bad_n(self):
        with pytest.raises(InvalidSpec):
            CovSpec("solvable", 1.0, 0.1, 0)


class TestBuild:
    def test_solvable_small(self):
        m = build(CovSpec("solvable", 1.0, 2.0, 2))
        assert np.array_equal(m.entries, [[3.0, 2.0], [2.0, 3.0]])

    def test_exponential_entries(self):
        m = build(CovSpec("exponential", 1.0, 0.05, 3, eta=1.0))
        expected = np.array(
            [
                [1.05, 0.05 * math.exp(-1.0), 0.05 * math.exp(-2.0)],
                [0.05 * math.exp(-1.0), 1.05, 0.05 * math.exp(-1.0)],
                [0.05 * math.exp(-2.0), 0.05 * math.exp(-1.0), 1.05],
            ]
        )
        assert np.allclose(m.entries, expected, rtol=1e-15)

    def test_exponential_eta_zero_is_white(self):
        m = build(CovSpec("exponential", 1.0, 0.5, 4, eta=0.0))
        assert np.array_equal(m.entries, 1.5 * np.eye(4))

    def test_white_kind(self):
        m = build(CovSpec("white", 1.0, 0.05, 3))
        assert np.array_equal(m.entries, 1.05 * np.eye(3))


class TestSolvableSpectrum:
    def test_example(self):
        ws = solvable_spectrum(1.0, 2.0, 3)
        assert np.array_equal(ws.sigmasq, [7.0, 1.0, 1.0])
        assert np.array_equal(ws.weights, [1.0, 0.0, 0.0])

    def test_white_case(self):
        ws = solvable_spectrum(2.0, 0.0, 5)
        assert np.array_equal(ws.sigmasq, np.full(5, 2.0))
        assert ws.weights[0] == 1.0

    def test_boundary_rejected(self):
        with pytest.raises(InvalidSpec):
            solvable_spectrum(1.0, -1.0 / 8, 8)

    def test_weights_sum_exactly(self):
        ws = solvable_spectrum(1.0, 0.3, 64)
        assert abs(ws.weights.sum() - 1.0) <= 1e-12


class TestSpectrumFromMatrix:
    def test_identity(self):
        ws = spectrum_from_matrix(SymMatrix.identity(4))
        assert abs(ws.weights.sum() - 1.0) <= 1e-10
        assert np.allclose(ws.sigmasq, 1.0)
        # Fisher check: N * sum(w / sigma^2) = N.
        assert 4 * (ws.weights / ws.sigmasq).sum() == pytest.approx(4.0)

    def test_matches_solvable_closed_form(self):
        m = build(CovSpec("solvable", 1.0, 2.0, 3))
        ws = spectrum_from_matrix(m)
        closed = solvable_spectrum(1.0, 2.0, 3)
        assert np.allclose(np.sort(ws.sigmasq), np.sort(closed.sigmasq), rtol=1e-9)
        assert ws.weights[0] == pytest.approx(1.0, abs=1e-10)

    def test_random_spd_equal_weight_identity(self):
        # sum_k sigma^2_k w_k / N equals the variance of the plain mean,
        # (1/N^2) * sum_ij C_ij.
        m = random_spd(16, seed=3)
        ws = spectrum_from_matrix(m)
        lhs = (ws.sigmasq * ws.weights).sum() / 16
        rhs = m.entries.sum() / 256
        assert lhs == pytest.approx(rhs, rel=1e-10)

    def test_rejects_singular(self):
        with pytest.raises(NotPositiveDefinite):
            spectrum_from_matrix(SymMatrix([[1.0, 1.0], [1.0, 1.0]]))


class TestSolvableInverse:
    def test_white_is_identity_scaled(self):
        m = solvable_inverse(1.0, 0.0, 5)
        assert np.allclose(m.entries, np.eye(5), atol=0.0)

    def test_closed_form_entries(self):
        m = solvable_inverse(1.0, 0.5, 4)
        expected = (3.0 * np.eye(4) - 0.5) / 3.0
        assert np.allclose(m.entries, expected, rtol=1e-15)

    def test_multiply_back(self):
        inv = solvable_inverse(2.0, 0.1, 10)
        cov = build(CovSpec("solvable", 2.0, 0.1, 10))
        assert np.abs(inv.entries @ cov.entries - np.eye(10)).max() <= 1e-12

    def test_boundary_rejected(self):
        with pytest.raises(InvalidSpec):
            solvable_inverse(1.0, -0.25, 4)


class TestWeightSpectrumValidation:
    def test_rejects_zero_eigenvalue(self):
        with pytest.raises(InvalidSpectrum):
            WeightSpectrum(np.array([1.0, 0.0]), np.array([1.0, 0.0]))

    def test_rejects_unnormalized_weights(self):
        with pytest.raises(InvalidSpectrum):
            WeightSpectrum(np.array([1.0, 2.0]), np.array([0.7, 0.7]))

    def test_rejects_shape_mismatch(self):
        with pytest.raises(InvalidSpectrum):
            WeightSpectrum(np.array([1.0, 2.0]), np.array([1.0]))


class TestModelProperties:
    @pytest.mark.parametrize("n", [2, 17, 128, 512])
    def test_solvable_eigenvalues_match_closed_form(self, n):
        a, c = 1.3, 0.21
        eig = eigendecompose(build(CovSpec("solvable", a, c, n)))
        expected = np.full(n, a)
        expected[0] = n * c + a
        assert np.allclose(eig.eigenvalues, expected, rtol=1e-9)

    @pytest.mark.parametrize("n", [2, 17, 128])
    def test_solvable_negative_c_eigenvalues(self, n):
        a, c = 1.0, -0.5 / n
        eig = eigendecompose(build(CovSpec("solvable", a, c, n)))
        expected = np.sort(np.append(np.full(n - 1, a), n * c + a))[::-1]
        assert np.allclose(eig.eigenvalues, expected, rtol=1e-9)

    @pytest.mark.parametrize(
        "a,c,n", [(1.0, 0.05, 8), (2.0, 0.3, 33), (0.7, 0.0, 12), (1.0, -0.01, 50)]
    )
    def test_summed_inverse_identity(self, a, c, n):
        total = solvable_inverse(a, c, n).entries.sum()
        assert total == pytest.approx(n / (n * c + a), rel=1e-10)

    @pytest.mark.parametrize("eta", [0.0, 0.3, 1.0, 7.5, 200.0])
    @pytest.mark.parametrize("a,c", [(1.0, 0.05), (0.5, 2.0), (1.0, 0.0)])
    def test_exponential_is_psd(self, a, c, eta):
        m = build(CovSpec("exponential", a, c, 40, eta=eta))
        eig = eigendecompose(m)
        assert eig.eigenvalues[-1] >= -1e-10 * eig.eigenvalues[0]

    def test_summed_exponential_inverse_monotone_in_eta(self):
        # More correlation time means less information in the plain sum.
        from estlab.matkernel import solve_spd

        etas = np.logspace(-2, 4, 25)
        ones = np.ones(64)
        values = []
        for eta in etas:
            m = build(CovSpec("exponential", 1.0, 0.05, 64, eta=float(eta)))
            values.append(float(ones @ solve_spd(m, ones)))
        values = np.array(values)
        assert (np.diff(values) <= 1e-12 * values[:-1]).all()
