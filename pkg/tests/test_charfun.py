import numpy as np
import pytest

from clarklab import charfun, gallery, matfun, opmodel
from clarklab.errors import DomainError, NumericalError


class TestNagyFoias:
    def test_full_shift(self):
        frame = opmodel.build_frame(gallery.shift_power(1, 1), 10)
        series = charfun.nagy_foias_coeffs(frame, 5)
        got = [c[0, 0] for c in series.coeffs]
        assert abs(got[0] - 1.0) < 1e-12
        assert all(abs(v) < 1e-12 for v in got[1:])

    def test_square(self):
        frame = opmodel.build_frame(gallery.shift_power(2, 1), 10)
        series = charfun.nagy_foias_coeffs(frame, 5)
        got = [c[0, 0] for c in series.coeffs]
        assert np.allclose(got, [0, 1, 0, 0, 0], atol=1e-12)

    def test_matches_taylor_coefficients(self, small_corpus):
        for theta in small_corpus:
            frame = opmodel.build_frame(theta, 12)
            series = charfun.nagy_foias_coeffs(frame, 6)
            cs = matfun.taylor(theta, 6)
            worst = max(np.linalg.norm(series.coeffs[k] - cs[k], 2) for k in range(6))
            assert worst < 1e-6

    def test_band_guard(self):
        frame = opmodel.build_frame(gallery.shift_power(1, 1), 4)
        with pytest.raises(DomainError):
            charfun.nagy_foias_coeffs(frame, 4)

    def test_band_ladder_stabilises(self):
        theta = gallery.random_inner(2, 3, seed=23)
        small = charfun.nagy_foias_coeffs(opmodel.build_frame(theta, 8), 2)
        large = charfun.nagy_foias_coeffs(opmodel.build_frame(theta, 16), 2)
        assert small.max_gap(large) < 1e-8


class TestGamma:
    def test_zero_parameter_reduces_to_symbol(self, small_corpus):
        for theta in small_corpus:
            frame = opmodel.build_frame(theta, 12)
            series = charfun.gamma_coeffs(frame, np.zeros((theta.dim, theta.dim)), 6)
            cs = matfun.taylor(theta, 6)
            worst = max(np.linalg.norm(series.coeffs[k] - cs[k], 2) for k in range(6))
            assert worst < 1e-6

    def test_full_shift_geometric(self):
        frame = opmodel.build_frame(gallery.shift_power(1, 1), 12)
        a = np.array([[0.45 - 0.25j]])
        series = charfun.gamma_coeffs(frame, a, 6)
        abar = np.conj(a[0, 0])
        for k, c in enumerate(series.coeffs):
            assert abs(c[0, 0] - abar ** k) < 1e-11

    def test_frame_and_series_agree(self, small_corpus, rng):
        for theta in small_corpus:
            frame = opmodel.build_frame(theta, 12)
            for a in (gallery.haar_unitary(theta.dim, rng),
                      gallery.random_contraction(theta.dim, rng)):
                lhs = charfun.gamma_coeffs(frame, a, 6)
                rhs = charfun.gamma_series_coeffs(theta, a, 6)
                assert lhs.max_gap(rhs) < 1e-6

    def test_transfer_recurrence(self, small_corpus, rng):
        for theta in small_corpus:
            a = gallery.random_contraction(theta.dim, rng)
            assert charfun.transfer_series_recurrence_gap(theta, a, 8) < 1e-10

    def test_both_identities_share_one_frame(self):
        theta = gallery.random_inner(2, 3, seed=31)
        frame = opmodel.build_frame(theta, 12)
        cs = matfun.taylor(theta, 6)
        nf = charfun.nagy_foias_coeffs(frame, 6)
        a = gallery.haar_unitary(2, np.random.default_rng(7))
        gamma_frame = charfun.gamma_coeffs(frame, a, 6)
        gamma_series = charfun.gamma_series_coeffs(theta, a, 6)
        assert max(np.linalg.norm(nf.coeffs[k] - cs[k], 2) for k in range(6)) < 1e-8
        assert gamma_frame.max_gap(gamma_series) < 1e-8


class TestLifschitz:
    def test_full_shift_midpoint(self):
        frame = opmodel.build_frame(gallery.shift_power(1, 1), 8)
        val = charfun.lifschitz_charfun(frame, np.eye(1), 0.5)
        assert abs(val[0, 0] - 0.5) < 1e-9

    def test_square_imaginary_point(self):
        frame = opmodel.build_frame(gallery.shift_power(2, 1), 8)
        val = charfun.lifschitz_charfun(frame, np.eye(1), 0.4j)
        assert abs(val[0, 0] + 0.16) < 1e-9

    def test_blaschke_probes(self):
        theta = gallery.scalar_blaschke([0.0, 0.4, -0.3 + 0.2j])
        frame = opmodel.build_frame(theta, 12)
        rng = np.random.default_rng(1)
        for _ in range(10):
            z = 0.7 * np.sqrt(rng.random()) * np.exp(2j * np.pi * rng.random())
            val = charfun.lifschitz_charfun(frame, np.eye(1), z)
            assert abs(val[0, 0] - matfun.evaluate(theta, z)[0, 0]) < 1e-7

    def test_matrix_symbol_equality_with_identity_reference(self):
        theta = gallery.random_inner(2, 3, seed=12)
        frame = opmodel.build_frame(theta, 12)
        for z in (0.3, 0.2 - 0.4j):
            val = charfun.lifschitz_charfun(frame, np.eye(2), z)
            assert np.linalg.norm(val - matfun.evaluate(theta, z), 2) < 1e-9

    def test_other_references_coincide(self, rng):
        # a different unitary reference changes the function only by constant
        # unitary factors, so the singular values must match
        theta = gallery.random_inner(2, 3, seed=12)
        frame = opmodel.build_frame(theta, 12)
        u_ref = gallery.haar_unitary(2, rng)
        val = charfun.lifschitz_charfun(frame, u_ref, 0.3)
        sv = np.linalg.svd(val, compute_uv=False)
        sv_ref = np.linalg.svd(matfun.evaluate(theta, 0.3), compute_uv=False)
        assert np.max(np.abs(sv - sv_ref)) < 1e-9

    def test_eigenvalue_proximity_rejected(self):
        frame = opmodel.build_frame(gallery.shift_power(1, 1), 8)
        with pytest.raises(NumericalError):
            charfun.lifschitz_charfun(frame, np.eye(1), 1.0)
