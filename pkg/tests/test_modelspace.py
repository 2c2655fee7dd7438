import numpy as np
import pytest
import scipy.integrate

from clarklab import gallery, matfun, modelspace, moments
from clarklab.errors import DomainError


def kernel_pair_series(theta, a, b, i, j, cutoff=160):
    """(khat_a^i, khat_b^j) from the moment series, independent of kernel()."""
    n = theta.dim
    ls = moments.elliott_negative_moments(theta, np.eye(n, dtype=complex), cutoff)
    geo = 1.0 / (1.0 - np.conj(a) * b)
    acc = moments.moment_matrix(ls, 0, n).astype(complex)
    for r in range(1, cutoff + 1):
        acc = acc + np.conj(a) ** r * moments.moment_matrix(ls, r, n)
        acc = acc + b ** r * moments.moment_matrix(ls, -r, n)
    acc = geo * acc
    xi = (np.eye(n) - matfun.evaluate(theta, a).conj().T)[:, i]
    yj = (np.eye(n) - matfun.evaluate(theta, b).conj().T)[:, j]
    return complex(yj.conj() @ acc @ xi)


class TestKernel:
    def test_szegoe_for_zero_symbol(self):
        theta = gallery.zero_function(2)
        w, z = 0.3 + 0.1j, -0.2j
        val = modelspace.kernel(theta, w, z)
        assert np.allclose(val, np.eye(2) / (1 - z * np.conj(w)))

    def test_origin_base_point_gives_identity(self, small_corpus):
        for theta in small_corpus:
            val = modelspace.kernel(theta, 0.0, 0.37 - 0.11j)
            assert np.allclose(val, np.eye(theta.dim), atol=1e-12)

    def test_boundary_diagonal_square(self):
        val = modelspace.kernel(gallery.shift_power(2, 1), 1.0, 1.0)
        assert abs(val[0, 0] - 2.0) < 1e-12

    def test_boundary_diagonal_is_defect_limit(self, small_corpus):
        for theta in small_corpus:
            zeta = np.exp(1.3j)
            diag = modelspace.kernel(theta, zeta, zeta)
            r = 1 - 2.0 ** -22
            v = matfun.evaluate(theta, r * zeta)
            ladder = (np.eye(theta.dim) - v @ v.conj().T) / (1 - r ** 2)
            assert np.linalg.norm(diag - ladder, 2) < 1e-5
            assert np.linalg.eigvalsh(diag).min() > -1e-10

    def test_boundary_without_certificate_rejected(self):
        theta = gallery.polynomial([0.5, 0.5])
        with pytest.raises(DomainError):
            modelspace.kernel(theta, -1.0, 0.2)  # |Theta(-1)| = 0, no derivative

    def test_kernel_gram_positive(self, small_corpus, rng):
        for theta in small_corpus:
            pts = 0.8 * np.sqrt(rng.random(10)) * np.exp(2j * np.pi * rng.random(10))
            dirs = rng.standard_normal((10, theta.dim)) \
                + 1j * rng.standard_normal((10, theta.dim))
            gram = np.zeros((10, 10), dtype=complex)
            for ii in range(10):
                for jj in range(10):
                    mat = modelspace.kernel(theta, pts[ii], pts[jj])
                    gram[jj, ii] = dirs[jj].conj() @ mat @ dirs[ii]
            assert np.linalg.eigvalsh(0.5 * (gram + gram.conj().T)).min() > -1e-10


class TestCauchyTransform:
    def test_identity_on_constants_for_zero_symbol(self):
        theta = gallery.zero_function(2)
        out = modelspace.cauchy_transform(theta, {0: np.array([1.0, 0.0])}, 0.4j)
        assert np.allclose(out, [1.0, 0.0])

    def test_modified_kernel_maps_to_point_evaluation(self, small_corpus):
        for theta in small_corpus:
            a = 0.45 - 0.2j
            blocks = modelspace.modified_cauchy_kernel_coeffs(theta, a, 90)
            for i in range(theta.dim):
                coeffs = {k: v[:, i] for k, v in blocks.items()}
                for z in (0.2, -0.3j):
                    got = modelspace.cauchy_transform(theta, coeffs, z)
                    want = modelspace.kernel(theta, a, z)[:, i]
                    assert np.linalg.norm(got - want) < 1e-9

    def test_isometry_on_modified_kernels(self, small_corpus, rng):
        # 20 random pairs: the frame inner product of modified kernels equals
        # the kernel matrix element (series route, independent of kernel())
        count = 0
        for theta in small_corpus:
            for _ in range(7):
                a, b = 0.6 * np.sqrt(rng.random(2)) * np.exp(2j * np.pi * rng.random(2))
                i = int(rng.integers(theta.dim))
                j = int(rng.integers(theta.dim))
                lhs = kernel_pair_series(theta, a, b, i, j)
                rhs = modelspace.kernel(theta, a, b)[j, i]
                assert abs(lhs - rhs) < 1e-8
                count += 1
        assert count >= 20

    def test_interior_only(self):
        with pytest.raises(DomainError):
            modelspace.cauchy_transform(gallery.shift_power(1, 1), {0: [1.0]}, 1.0)


class TestIntertwining:
    def test_zero_symbol(self):
        assert modelspace.intertwine_residual(gallery.zero_function(1), band=12) < 1e-12

    def test_square(self):
        assert modelspace.intertwine_residual(gallery.shift_power(2, 1), band=24) < 1e-9

    def test_matrix_product(self):
        theta = gallery.random_inner(2, 3, seed=14)
        assert modelspace.intertwine_residual(theta, band=40) < 1e-7


class TestExtreme:
    def test_inner_symbols_are_extreme(self):
        for theta in (gallery.shift_power(1, 1), gallery.shift_power(2, 1),
                      gallery.random_inner(2, 3, seed=5)):
            res = modelspace.extreme_test(theta)
            assert res.classification == "extreme"
            assert res.integral == float("-inf")

    def test_zero_symbol(self):
        res = modelspace.extreme_test(gallery.zero_function(2))
        assert res.classification == "non_extreme"
        assert abs(res.integral) < 1e-12

    def test_half_sum_against_quadrature_reference(self):
        res = modelspace.extreme_test(gallery.polynomial([0.5, 0.5]))
        assert res.classification == "non_extreme"
        ref = scipy.integrate.quad(lambda t: np.log(1 - np.cos(t / 2)),
                                   0, np.pi, limit=400)[0] / np.pi
        assert abs(res.integral - ref) < 5e-2

    def test_scaled_inner_not_extreme(self):
        inner = gallery.random_inner(2, 3, seed=8)
        scaled = gallery.polynomial(
            [0.5 * matfun.evaluate(inner, 0.0)]
            + [0.5 * c for c in matfun.taylor(inner, 20)], dim=2)
        res = modelspace.extreme_test(scaled)
        assert res.classification == "non_extreme"
        assert abs(res.integral - 2 * np.log(0.5)) < 1e-2  # two singular values of 1/2


class TestCad:
    def test_full_shift_has_derivative(self):
        res = modelspace.cad_test(gallery.shift_power(1, 1), 1.0)
        assert res.exists is True
        assert abs(res.derivative[0, 0] - 1.0) < 1e-12

    def test_half_sum_fails_at_minus_one(self):
        res = modelspace.cad_test(gallery.polynomial([0.5, 0.5]), -1.0)
        assert res.exists is False

    def test_half_sum_exists_at_plus_one(self):
        res = modelspace.cad_test(gallery.polynomial([0.5, 0.5]), 1.0)
        assert res.exists is True
        assert abs(res.derivative[0, 0] - 0.5) < 1e-12

    def test_singular_atom_ladder_doubles(self):
        res = modelspace.cad_test(gallery.singular_inner(((1.0, 1.0),)), 1.0)
        assert res.exists is False
        ratios = res.ladder[1:] / res.ladder[:-1]
        assert np.all(ratios[-4:] > 1.99)

    def test_directional_split(self):
        theta = gallery.shift_oplus_singular()
        assert modelspace.cad_test(theta, 1.0, direction=[1, 0]).exists is True
        assert modelspace.cad_test(theta, 1.0, direction=[0, 1]).exists is False


class TestDenselyDefined:
    def test_full_shift(self):
        assert modelspace.densely_defined_test(gallery.shift_power(1, 1)) is False

    def test_singular(self):
        assert modelspace.densely_defined_test(gallery.singular_inner(((1.0, 1.0),))) is True

    def test_direct_sum(self):
        assert modelspace.densely_defined_test(gallery.shift_oplus_singular()) is False


class TestRegularPoints:
    def test_full_shift_all_regular(self):
        labels = modelspace.regular_points(gallery.shift_power(1, 1), [1.0, 1j, -1.0])
        assert labels == ["regular"] * 3

    def test_singular_atom_only_defect(self):
        theta = gallery.singular_inner(((1.0, 1.0),))
        labels = modelspace.regular_points(theta, [np.exp(0.5j), 1.0, np.exp(3.0j)])
        assert labels == ["regular", "spectrum", "regular"]

    def test_half_sum_nowhere_regular(self):
        labels = modelspace.regular_points(gallery.polynomial([0.5, 0.5]),
                                           [1.0, 1j, -1.0, np.exp(0.1j)])
        assert labels == ["spectrum"] * 4


class TestClarkSystem:
    def test_square_identity_parameter(self):
        system = modelspace.clark_eigensystem(gallery.shift_power(2, 1), np.eye(1))
        assert system.dim == 2
        points = sorted(round(p.real) for p in system.points)
        assert points == [-1, 1]
        for node in system.nodes:
            assert abs(node.norm_sq - 2.0) < 1e-9
        for w in system.weights:
            assert abs(w[0, 0] - 0.5) < 1e-9

    def test_full_shift_single_atom(self):
        u = np.array([[np.exp(1.1j)]])
        system = modelspace.clark_eigensystem(gallery.shift_power(1, 1), u)
        assert system.dim == 1
        assert abs(system.points[0] - u[0, 0]) < 1e-12

    def test_diag_full_shift_matches_parameter_spectrum(self, rng):
        u = gallery.haar_unitary(2, rng)
        system = modelspace.clark_eigensystem(gallery.shift_power(1, 2), u)
        evals = np.linalg.eigvals(u)
        assert system.dim == 2
        for p in system.points:
            assert min(abs(evals - p)) < 1e-9

    def test_eigen_direction_residual(self, small_corpus, rng):
        for theta in small_corpus:
            u = gallery.haar_unitary(theta.dim, rng)
            system = modelspace.clark_eigensystem(theta, u)
            for node in system.nodes:
                res = (matfun.evaluate(theta, node.point).conj().T - u.conj().T) \
                    @ node.direction
                assert np.linalg.norm(res) < 1e-9

    def test_kernel_gram_orthogonal(self, small_corpus, rng):
        for theta in small_corpus:
            u = gallery.haar_unitary(theta.dim, rng)
            system = modelspace.clark_eigensystem(theta, u)
            gram = modelspace.kernel_gram(system)
            off = gram - np.diag(np.diag(gram))
            assert np.max(np.abs(off)) < 1e-8
            assert np.allclose(np.diag(gram).real,
                               [n.norm_sq for n in system.nodes], atol=1e-9)

    def test_weights_sum_to_identity(self, small_corpus, rng):
        for theta in small_corpus:
            u = gallery.haar_unitary(theta.dim, rng)
            system = modelspace.clark_eigensystem(theta, u)
            assert np.linalg.norm(system.weight_total() - np.eye(theta.dim), 2) < 1e-8

    def test_cluster_multiplicity_counts(self):
        # diag(z, z) with U = 1 has a single eigenvalue of multiplicity two
        system = modelspace.clark_eigensystem(gallery.shift_power(1, 2), np.eye(2))
        assert system.dim == 2
        assert len(system.points) == 1
        assert len(system.nodes) == 2
        assert np.allclose(system.weights[0], np.eye(2), atol=1e-9)

    def test_requires_rational_inner(self):
        with pytest.raises(DomainError):
            modelspace.clark_eigensystem(gallery.singular_inner(((1.0, 0.5),)), np.eye(1))
        with pytest.raises(DomainError):
            modelspace.clark_eigensystem(gallery.polynomial([0.0, 0.5]), np.eye(1))


class TestReconstruct:
    def test_constant_recovery(self, small_corpus, rng):
        for theta in small_corpus:
            u = gallery.haar_unitary(theta.dim, rng)
            system = modelspace.clark_eigensystem(theta, u)
            x = rng.standard_normal(theta.dim) + 1j * rng.standard_normal(theta.dim)
            samples = modelspace.sample_of(
                system, [x for _ in system.nodes])
            got = modelspace.reconstruct(system, samples, 0.23 - 0.41j)
            assert np.linalg.norm(got - x) < 1e-9

    def test_kernel_element_recovery(self):
        theta = gallery.shift_power(2, 1)
        system = modelspace.clark_eigensystem(theta, np.eye(1))
        w, y = 0.3 + 0.1j, np.array([1.0])
        fvals = [modelspace.kernel(theta, w, n.point) @ y for n in system.nodes]
        samples = modelspace.sample_of(system, fvals)
        for z in (0.5, -0.2j):
            got = modelspace.reconstruct(system, samples, z)
            want = modelspace.kernel(theta, w, z) @ y
            assert np.linalg.norm(got - want) < 1e-9

    def test_sample_count_enforced(self):
        system = modelspace.clark_eigensystem(gallery.shift_power(2, 1), np.eye(1))
        with pytest.raises(DomainError):
            modelspace.reconstruct(system, [1.0], 0.1)


class TestHalfPlane:
    def test_minus_one_maps_to_origin(self):
        assert abs(matfun.mobius_to_halfplane(-1.0)) < 1e-14

    def test_square_nodes(self):
        system = modelspace.clark_eigensystem(gallery.shift_power(2, 1), -np.eye(1))
        hp = modelspace.to_halfplane(system)
        assert sorted(round(t) for t in hp.points) == [-1, 1]

    def test_phi_vanishes_at_i(self, small_corpus):
        for theta in small_corpus:
            assert np.linalg.norm(matfun.cayley_compose(theta, 1j), 2) < 1e-13

    def test_node_at_one_rejected(self):
        system = modelspace.clark_eigensystem(gallery.shift_power(2, 1), np.eye(1))
        with pytest.raises(DomainError):
            modelspace.to_halfplane(system)

    def test_reconstruction_transfers(self, rng):
        theta = gallery.random_inner(2, 3, seed=12)
        u = gallery.haar_unitary(2, np.random.default_rng(3))
        system = modelspace.clark_eigensystem(theta, u)
        assert all(abs(p - 1.0) > 1e-3 for p in system.points)
        hp = modelspace.to_halfplane(system)
        w0, y = 0.3 + 0.1j, np.array([0.6, -0.8j])

        def f_disc(z):
            return modelspace.kernel(theta, w0, z) @ y

        def reweight(z, vals):
            return (1 - matfun.mobius_to_disc(z)) / np.sqrt(np.pi) * vals

        hp_samples = np.array([
            np.vdot(nh.direction, reweight(nh.point, f_disc(nd.point)))
            for nd, nh in zip(system.nodes, hp.nodes)])
        disc_samples = modelspace.sample_of(
            system, [f_disc(n.point) for n in system.nodes])
        for z in (0.3 + 1.2j, -1.1 + 0.7j, 2.0 + 0.4j):
            hp_val = modelspace.halfplane_reconstruct(hp, hp_samples, z)
            disc_val = modelspace.reconstruct(system, disc_samples,
                                              complex(matfun.mobius_to_disc(z)))
            assert np.max(np.abs(hp_val - reweight(z, disc_val))) < 1e-8

    def test_halfplane_kernel_norms_positive(self, small_corpus, rng):
        for theta in small_corpus:
            u = gallery.haar_unitary(theta.dim, np.random.default_rng(8))
            system = modelspace.clark_eigensystem(theta, u)
            if any(abs(p - 1.0) < 1e-6 for p in system.points):
                continue
            hp = modelspace.to_halfplane(system)
            for node in hp.nodes:
                assert node.norm_sq > 0


def test_system_json_round_trip(rng):
    theta = gallery.random_inner(2, 3, seed=12)
    u = gallery.haar_unitary(2, rng)
    system = modelspace.clark_eigensystem(theta, u)
    doc = modelspace.system_to_json(system)
    back = modelspace.system_from_json(doc)
    assert back.dim == system.dim
    samples = modelspace.sample_of(system, [np.ones(2) for _ in system.nodes])
    z = 0.3 - 0.2j
    assert np.allclose(modelspace.reconstruct(back, samples, z),
                       modelspace.reconstruct(system, samples, z))
