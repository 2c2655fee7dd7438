"""Ready-made functions used by the self tests and the examples.

Every constructor here returns a :class:`~clarklab.matfun.MatFunction` whose
flags are set consistently, so downstream preconditions (``vanishes_at_zero``
for moment work, ``inner`` for Clark systems) hold by construction.
"""

from __future__ import annotations

import numpy as np

from .matfun import BlaschkePotapovFactor, MatFunction


def shift_power(power: int = 1, dim: int = 1) -> MatFunction:
    """Theta(z) = z^power * 1_n."""
    eye = np.eye(dim)
    factors = tuple(BlaschkePotapovFactor(0.0, eye) for _ in range(power))
    return MatFunction(dim=dim, bp_factors=factors,
                       flags=frozenset({"inner", "vanishes_at_zero"}))


def zero_function(dim: int = 1) -> MatFunction:
    return MatFunction(dim=dim, taylor_tail=(np.zeros((dim, dim)),),
                       flags=frozenset({"vanishes_at_zero"}))


def polynomial(coeffs, dim: int | None = None) -> MatFunction:
    """Theta given by matrix Taylor coefficients c_0..c_K."""
    mats = [np.atleast_2d(np.asarray(c, dtype=complex)) for c in coeffs]
    n = dim or mats[0].shape[0]
    mats = [c * np.eye(n) if c.shape == (1, 1) else c for c in mats]
    flags = set()
    if np.linalg.norm(mats[0]) == 0.0:
        flags.add("vanishes_at_zero")
    return MatFunction(dim=n, taylor_tail=tuple(mats), flags=frozenset(flags))


def scalar_blaschke(zeros) -> MatFunction:
    """Scalar Blaschke product with the given zero list (n = 1)."""
    one = np.eye(1)
    factors = tuple(BlaschkePotapovFactor(w, one) for w in zeros)
    flags = {"inner"}
    if any(w == 0 for w in zeros):
        flags.add("vanishes_at_zero")
    return MatFunction(dim=1, bp_factors=factors, flags=frozenset(flags))


def diag_inner(powers) -> MatFunction:
    """diag(z^{p_1}, ..., z^{p_n}) built from rank-one factors."""
    n = len(powers)
    factors = []
    for i, p in enumerate(powers):
        proj = np.zeros((n, n))
        proj[i, i] = 1.0
        factors.extend(BlaschkePotapovFactor(0.0, proj) for _ in range(int(p)))
    flags = {"inner"}
    if all(p >= 1 for p in powers):
        flags.add("vanishes_at_zero")
    return MatFunction(dim=n, bp_factors=tuple(factors), flags=frozenset(flags))


def singular_inner(atoms_masses=((1.0, 1.0),), dim: int = 1) -> MatFunction:
    """Purely singular inner function exp(-sum t (zeta+z)/(zeta-z)) * 1_n."""
    return MatFunction(dim=dim, singular_factors=tuple(atoms_masses),
                       flags=frozenset({"inner"}))


def shift_oplus_singular(mass: float = 1.0, atom: complex = 1.0) -> MatFunction:
    """diag(z, exp(-mass (atom+z)/(atom-z))): one rational and one singular slot."""
    p_top = np.diag([1.0, 0.0])
    p_bot = np.diag([0.0, 1.0])
    return MatFunction(dim=2,
                       bp_factors=(BlaschkePotapovFactor(0.0, p_top),),
                       singular_factors=((atom, mass, p_bot),),
                       flags=frozenset({"inner"}))


def haar_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    z = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / np.sqrt(2.0)
    q, r = np.linalg.qr(z)
    d = np.diagonal(r)
    return q * (d / np.abs(d))


def random_projection(dim: int, rank: int, rng: np.random.Generator) -> np.ndarray:
    u = haar_unitary(dim, rng)
    cols = u[:, :rank]
    return cols @ cols.conj().T


def random_inner(dim: int, det_degree: int, seed: int = 0,
                 with_unitary: bool = True) -> MatFunction:
    """Random rational inner function with Theta(0) = 0 exactly.

    The product starts with the full shift ``z * 1_n`` (det degree ``n``) and
    appends rank-one Blaschke-Potapov factors until the determinant degree is
    reached, so the result is inner and vanishes at the origin.
    """
    if det_degree < dim:
        raise ValueError("det degree must be at least dim to keep Theta(0) = 0")
    rng = np.random.default_rng(seed)
    eye = np.eye(dim)
    factors = [BlaschkePotapovFactor(0.0, eye)]
    for _ in range(det_degree - dim):
        w = 0.7 * np.sqrt(rng.random()) * np.exp(2j * np.pi * rng.random())
        factors.append(BlaschkePotapovFactor(w, random_projection(dim, 1, rng)))
    unitary = haar_unitary(dim, rng) if with_unitary and dim > 1 else None
    return MatFunction(dim=dim, bp_factors=tuple(factors), const_unitary=unitary,
                       flags=frozenset({"inner", "vanishes_at_zero"}))


def random_contraction(dim: int, rng: np.random.Generator, norm: float | None = None) -> np.ndarray:
    a = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    top = np.linalg.norm(a, ord=2)
    target = rng.uniform(0.2, 0.95) if norm is None else norm
    return a * (target / top)


def contraction_suite(dim: int, seed: int = 0) -> list:
    """Mix of parameters used by the cross-check suites: 0, 1, a Haar unitary,
    and two strict contractions."""
    rng = np.random.default_rng(seed)
    return [
        np.zeros((dim, dim), dtype=complex),
        np.eye(dim, dtype=complex),
        haar_unitary(dim, rng),
        random_contraction(dim, rng),
        random_contraction(dim, rng),
    ]
