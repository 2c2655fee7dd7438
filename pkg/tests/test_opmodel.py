import json

import numpy as np
import pytest

from clarklab import gallery, matfun, moments, opmodel
from clarklab.errors import DomainError, NumericalError


class TestBuildFrame:
    def test_zero_symbol_gives_identity(self):
        frame = opmodel.build_frame(gallery.zero_function(2), 3)
        assert np.allclose(frame.gram, np.eye(14))
        assert frame.rank == 14

    def test_full_shift_rank_one(self):
        frame = opmodel.build_frame(gallery.shift_power(1, 1), 2)
        assert np.allclose(frame.gram, np.ones((5, 5)))
        assert frame.rank == 1

    def test_square_parity_gram(self):
        frame = opmodel.build_frame(gallery.shift_power(2, 1), 2)
        want = np.array([[1.0 if (i - j) % 2 == 0 else 0.0 for j in range(5)]
                         for i in range(5)])
        assert np.allclose(frame.gram, want)
        assert frame.rank == 2

    def test_gram_hermitian_psd(self, small_corpus):
        for theta in small_corpus:
            frame = opmodel.build_frame(theta, 8)
            assert np.linalg.norm(frame.gram - frame.gram.conj().T, 2) < 1e-13
            assert np.linalg.eigvalsh(frame.gram).min() > -1e-10

    def test_rank_stabilises_at_model_dimension(self):
        theta = gallery.random_inner(2, 3, seed=12)
        ranks = [opmodel.build_frame(theta, band).rank for band in (6, 10, 16)]
        assert ranks[0] == ranks[1] == ranks[2] == 3

    def test_flag_required(self):
        with pytest.raises(DomainError):
            opmodel.build_frame(gallery.polynomial([0.5, 0.5]), 4)


class TestClarkOperator:
    def test_rank_one_frame_scalar(self):
        frame = opmodel.build_frame(gallery.shift_power(1, 1), 6)
        a = np.array([[0.3 - 0.4j]])
        op = opmodel.clark_operator(frame, a)
        assert op.whitened.shape == (1, 1)
        assert abs(op.whitened[0, 0] - a[0, 0]) < 1e-12

    def test_identity_parameter_is_pure_shift(self):
        frame = opmodel.build_frame(gallery.shift_power(2, 1), 5)
        op = opmodel.clark_operator(frame, np.eye(1))
        shift = opmodel._shift_coeff_matrix(frame)
        assert np.allclose(op.coeff_matrix, shift)

    def test_zero_parameter_partial_isometry(self):
        frame = opmodel.build_frame(gallery.shift_power(2, 1), 8)
        op = opmodel.clark_operator(frame, np.zeros((1, 1)))
        zw = op.whitened
        bp = frame.basis_plus()
        qplus = bp @ np.linalg.solve(bp.conj().T @ bp, bp.conj().T)
        gap = np.linalg.norm(zw.conj().T @ zw - (np.eye(zw.shape[0]) - qplus), 2)
        assert gap < 1e-10

    def test_unitary_parameter_isometric_on_interior(self, small_corpus, rng):
        for theta in small_corpus:
            frame = opmodel.build_frame(theta, 8)
            u = gallery.haar_unitary(theta.dim, rng)
            op = opmodel.clark_operator(frame, u)
            # exact matrix elements: ||Z(U) f||^2 == ||f||^2 for interior monomials
            gm = op.gram_matrix
            for k in (-4, 0, 3):
                for i in range(theta.dim):
                    idx = frame.index(k, i)
                    image = op.coeff_matrix[:, idx]
                    norm_img = np.real(image.conj() @ frame.gram @ image)
                    norm_src = np.real(frame.gram[idx, idx])
                    assert abs(norm_img - norm_src) < 1e-10
            assert opmodel.unitarity_deviation(op) < 1e-10

    def test_gram_adjoint_involution(self, small_corpus):
        for theta in small_corpus:
            frame = opmodel.build_frame(theta, 6)
            op = opmodel.clark_operator(frame, np.zeros((theta.dim, theta.dim)))
            m = op.coeff_matrix
            twice = frame.gram_adjoint(frame.gram_adjoint(m))
            # equality holds after projecting onto the retained subspace
            lam = frame.eigenvalues[: frame.rank]
            vec = frame.eigenvectors[:, : frame.rank]
            proj = vec @ vec.conj().T
            assert np.linalg.norm(twice - proj @ m @ proj, 2) < 1e-9


class TestCompressedMoments:
    def test_full_shift_exact(self):
        frame = opmodel.build_frame(gallery.shift_power(1, 1), 8)
        a = np.array([[0.5 + 0.2j]])
        ds = opmodel.compressed_moment_sweep(frame, a, 4)
        for k, d in enumerate(ds, start=1):
            assert abs(d[0, 0] - np.conj(a[0, 0]) ** k) < 1e-12

    def test_square_identity_parameter(self):
        frame = opmodel.build_frame(gallery.shift_power(2, 1), 8)
        d2 = opmodel.compressed_moment(frame, np.eye(1), 2)
        assert abs(d2[0, 0] - 1.0) < 1e-12

    def test_matches_recurrence(self, small_corpus, rng):
        for theta in small_corpus:
            frame = opmodel.build_frame(theta, 20)
            for a in (gallery.haar_unitary(theta.dim, rng),
                      gallery.random_contraction(theta.dim, rng)):
                ls = moments.recurrence_moments(theta, a, 6)
                ds = opmodel.compressed_moment_sweep(frame, a, 6)
                worst = max(np.linalg.norm(ds[k] - ls[k], 2) for k in range(6))
                assert worst < 1e-6

    def test_band_guard(self):
        frame = opmodel.build_frame(gallery.shift_power(1, 1), 4)
        with pytest.raises(DomainError):
            opmodel.compressed_moment(frame, np.eye(1), 4)


class TestSpectralMeasure:
    def test_full_shift_single_atom(self):
        frame = opmodel.build_frame(gallery.shift_power(1, 1), 8)
        u = np.array([[np.exp(0.7j)]])
        measure, eta = opmodel.spectral_measure(frame, u)
        assert eta < 1e-10
        assert len(measure.atoms) == 1
        point, weight = measure.atoms[0]
        assert abs(point - u[0, 0]) < 1e-9
        assert abs(weight[0, 0] - 1.0) < 1e-9

    def test_square_atoms(self):
        frame = opmodel.build_frame(gallery.shift_power(2, 1), 8)
        measure, _ = opmodel.spectral_measure(frame, np.eye(1))
        points = sorted(round(p.real) for p, _ in measure.atoms)
        assert points == [-1, 1]
        assert all(abs(w[0, 0] - 0.5) < 1e-9 for _, w in measure.atoms)
        measure2, _ = opmodel.spectral_measure(frame, -np.eye(1))
        points2 = sorted(round(p.imag) for p, _ in measure2.atoms)
        assert points2 == [-1, 1]
        assert all(abs(w[0, 0] - 0.5) < 1e-9 for _, w in measure2.atoms)

    def test_matrix_weights_are_eigenprojections(self, rng):
        frame = opmodel.build_frame(gallery.shift_power(1, 2), 8)
        u = gallery.haar_unitary(2, rng)
        evals, evecs = np.linalg.eig(u)
        measure, _ = opmodel.spectral_measure(frame, u)
        assert len(measure.atoms) == 2
        for point, weight in measure.atoms:
            j = int(np.argmin(np.abs(evals - point)))
            x = evecs[:, j:j + 1]
            assert np.linalg.norm(weight - x @ x.conj().T, 2) < 1e-8

    def test_atoms_match_radial_point_mass(self, small_corpus, rng):
        for theta in small_corpus:
            u = gallery.haar_unitary(theta.dim, rng)
            frame = opmodel.build_frame(theta, 16)
            measure, _ = opmodel.spectral_measure(frame, u)
            for point, weight in measure.atoms:
                pm = moments.point_mass(theta, u, point)
                assert pm.is_atom
                assert np.linalg.norm(pm.weight - weight, 2) < 1e-5

    def test_total_mass_is_identity(self, small_corpus, rng):
        for theta in small_corpus:
            frame = opmodel.build_frame(theta, 16)
            measure, _ = opmodel.spectral_measure(
                frame, gallery.haar_unitary(theta.dim, rng))
            assert np.linalg.norm(measure.total() - np.eye(theta.dim), 2) < 1e-9

    def test_arc_bins_aggregate(self):
        frame = opmodel.build_frame(gallery.shift_power(2, 1), 8)
        bins = [(-np.pi / 2, np.pi / 2), (np.pi / 2, 3 * np.pi / 2)]
        measure, _ = opmodel.spectral_measure(frame, np.eye(1), bins=bins)
        weights = [w[0, 0].real for _, w in measure.atoms]
        assert np.allclose(sorted(weights), [0.5, 0.5])

    def test_refuses_nonunitary_parameter(self):
        frame = opmodel.build_frame(gallery.shift_power(1, 1), 4)
        with pytest.raises(DomainError):
            opmodel.spectral_measure(frame, 0.5 * np.eye(1))


def test_export_binary_layout(tmp_path):
    theta = gallery.shift_power(2, 1)
    frame = opmodel.build_frame(theta, 3)
    base = str(tmp_path / "frame")
    sidecar = opmodel.export_frame(frame, base)
    raw = np.fromfile(base + ".bin", dtype="<f8")
    size = frame.size
    assert raw.size == 2 * size * size
    rebuilt = raw[0::2].reshape(size, size) + 1j * raw[1::2].reshape(size, size)
    assert np.allclose(rebuilt, frame.gram)
    meta = json.loads(open(base + ".json").read())
    assert meta == sidecar
    assert meta["rank"] == frame.rank and meta["eta"] < 1e-10
