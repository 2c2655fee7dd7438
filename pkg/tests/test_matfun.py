import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from clarklab import gallery, matfun
from clarklab.errors import DomainError
from clarklab.matfun import BlaschkePotapovFactor, MatFunction


def bp_scalar_series(w, order):
    # (z - w) / (1 - conj(w) z) expanded as a truncated power series
    geo = np.array([np.conj(w) ** k for k in range(order + 1)])
    lin = np.zeros(order + 2, dtype=complex)
    lin[0], lin[1] = -w, 1.0
    return np.convolve(lin, geo)[: order + 1]


def product_series(theta, order):
    """Truncated matrix power series of a rational product, by convolution."""
    n = theta.dim
    acc = np.zeros((order + 1, n, n), dtype=complex)
    acc[0] = np.eye(n)

    def mul(a, b):
        out = np.zeros_like(a)
        for k in range(order + 1):
            for j in range(k + 1):
                out[k] += a[j] @ b[k - j]
        return out

    for f in theta.bp_factors:
        b = bp_scalar_series(f.zero, order)
        fac = np.zeros((order + 1, n, n), dtype=complex)
        fac[0] = np.eye(n) - f.projection
        for k in range(order + 1):
            fac[k] = fac[k] + b[k] * f.projection
        acc = mul(acc, fac)
    if theta.const_unitary is not None:
        acc = acc @ theta.const_unitary
    return acc


class TestEvaluate:
    def test_full_shift(self):
        theta = gallery.shift_power(1, 3)
        assert np.allclose(matfun.evaluate(theta, 0.5), 0.5 * np.eye(3))

    def test_zero_function(self):
        theta = gallery.zero_function(2)
        assert np.allclose(matfun.evaluate(theta, 0.3 - 0.2j), 0.0)

    def test_diag_monomials(self):
        theta = gallery.diag_inner([1, 2])
        val = matfun.evaluate(theta, 0.5j)
        assert np.allclose(val, np.diag([0.5j, -0.25]))

    def test_outside_disc_rejected(self):
        theta = gallery.shift_power(1, 1)
        with pytest.raises(DomainError):
            matfun.evaluate(theta, 1.5)

    def test_singular_atom_rejected(self):
        theta = gallery.singular_inner(((1.0, 1.0),))
        with pytest.raises(DomainError):
            matfun.evaluate(theta, 1.0)
        # interior and off-atom boundary points are fine
        matfun.evaluate(theta, 0.9)
        val = matfun.evaluate(theta, -1.0)
        assert abs(abs(val[0, 0]) - 1.0) < 1e-12

    def test_not_purely_contractive_rejected(self):
        proj = np.diag([1.0, 0.0])
        with pytest.raises(DomainError):
            MatFunction(dim=2, bp_factors=(BlaschkePotapovFactor(0.3, proj),))


class TestTaylor:
    def test_full_shift(self):
        cs = matfun.taylor(gallery.shift_power(1, 2), 3)
        assert np.allclose(cs[0], np.eye(2), atol=1e-13)
        assert np.allclose(cs[1], 0.0, atol=1e-13)
        assert np.allclose(cs[2], 0.0, atol=1e-13)

    def test_square(self):
        cs = matfun.taylor(gallery.shift_power(2, 1), 4)
        got = np.array([c[0, 0] for c in cs])
        assert np.allclose(got, [0, 1, 0, 0], atol=1e-13)

    def test_random_product_matches_series_expansion(self):
        theta = gallery.random_inner(2, 4, seed=3)
        cs = matfun.taylor(theta, 5)
        ref = product_series(theta, 5)
        worst = max(np.linalg.norm(cs[k - 1] - ref[k], 2) for k in range(1, 6))
        assert worst < 1e-10

    def test_partial_sums_approximate_evaluation(self):
        theta = gallery.random_inner(2, 4, seed=9)
        order = 12
        cs = matfun.taylor(theta, order)
        r = 0.4
        for z in r * np.exp(1j * np.array([0.3, 1.7, 4.1])):
            acc = matfun.evaluate(theta, 0.0).astype(complex)
            for k, c in enumerate(cs, start=1):
                acc = acc + c * z ** k
            gap = np.linalg.norm(acc - matfun.evaluate(theta, z), 2)
            assert gap < 5 * r ** (order + 1)


class TestDerivative:
    def test_square_at_boundary(self):
        theta = gallery.shift_power(2, 1)
        assert abs(matfun.derivative(theta, 1.0)[0, 0] - 2.0) < 1e-13

    def test_full_shift(self):
        theta = gallery.shift_power(1, 2)
        assert np.allclose(matfun.derivative(theta, 0.3 + 0.1j), np.eye(2))

    def test_blaschke_matches_finite_difference_on_circle(self):
        theta = gallery.scalar_blaschke([0.0, 0.4, -0.3 + 0.2j])
        zeta = np.exp(0.8j)
        h = 1e-5
        fd = (matfun.evaluate(theta, zeta * np.exp(1j * h))
              - matfun.evaluate(theta, zeta * np.exp(-1j * h))) / (2j * h * zeta)
        assert np.linalg.norm(matfun.derivative(theta, zeta) - fd, 2) < 1e-7

    def test_product_rule_with_singular_factor(self):
        theta = gallery.shift_oplus_singular(mass=0.7)
        z = 0.4 + 0.2j
        h = 1e-6
        fd = (matfun.evaluate(theta, z + h) - matfun.evaluate(theta, z - h)) / (2 * h)
        assert np.linalg.norm(matfun.derivative(theta, z) - fd, 2) < 1e-7


class TestHerglotz:
    def test_zero_parameter(self):
        theta = gallery.random_inner(2, 3, seed=4)
        for z in (0.0, 0.5j, -0.7):
            assert np.allclose(matfun.herglotz(theta, np.zeros((2, 2)), z), np.eye(2))

    def test_scalar_full_shift(self):
        theta = gallery.shift_power(1, 1)
        val = matfun.herglotz(theta, np.eye(1), 0.5)
        assert abs(val[0, 0] - 3.0) < 1e-13

    def test_hermitian_part_positive(self, rng):
        theta = gallery.random_inner(2, 3, seed=6)
        u = gallery.haar_unitary(2, rng)
        b = matfun.herglotz(theta, u, 0.3j)
        herm = 0.5 * (b + b.conj().T)
        assert np.linalg.eigvalsh(herm).min() >= -1e-12


class TestCayley:
    def test_at_i_gives_origin_value(self):
        theta = gallery.random_inner(2, 3, seed=8)
        assert np.allclose(matfun.cayley_compose(theta, 1j),
                           matfun.evaluate(theta, 0.0), atol=1e-14)

    def test_real_axis_maps_to_circle(self):
        theta = gallery.shift_power(1, 1)
        val = matfun.cayley_compose(theta, 1.0)
        assert abs(abs(val[0, 0]) - 1.0) < 1e-13
        assert abs(val[0, 0] + 1j) < 1e-13

    def test_square_at_i(self):
        theta = gallery.shift_power(2, 1)
        assert abs(matfun.cayley_compose(theta, 1j)[0, 0]) < 1e-14

    def test_lower_halfplane_rejected(self):
        with pytest.raises(DomainError):
            matfun.cayley_compose(gallery.shift_power(1, 1), -1j)


@settings(max_examples=15, deadline=None)
@given(st.integers(min_value=0, max_value=10_000))
def test_contractivity_sweep(seed):
    theta = gallery.random_inner(2, 3, seed=seed)
    assert gallery and matfun.contractivity_report(theta, samples=200, seed=seed) <= 1.0 + 1e-12


def test_inner_defect_small_on_circle(small_corpus):
    for theta in small_corpus:
        assert matfun.inner_defect(theta, samples=200) <= 1e-10


def test_det_degree_by_argument_principle(small_corpus):
    # winding number of det Theta around a circle just inside the boundary
    for theta in small_corpus:
        degree = sum(f.rank for f in theta.bp_factors)
        zs = matfun.unit_circle_nodes(8192, radius=0.995)
        dets = np.linalg.det(matfun.evaluate(theta, zs))
        phases = np.unwrap(np.angle(dets))
        closing = np.angle(dets[0] / dets[-1])  # segment back to the first node
        winding = (phases[-1] - phases[0] + closing) / (2 * np.pi)
        assert round(winding) == degree


def test_json_round_trip(small_corpus):
    for theta in small_corpus:
        doc = matfun.to_json(theta)
        back = matfun.from_json(doc)
        z = 0.3 - 0.45j
        assert np.allclose(matfun.evaluate(back, z), matfun.evaluate(theta, z))
        assert back.flags == theta.flags


def test_json_rejects_garbage():
    with pytest.raises(DomainError):
        matfun.from_json({"bp": "nope"})
