"""Purely contractive matrix-valued analytic functions on the unit disc.

A function is represented as a finite product

    Theta(z) = B_1(z) ... B_m(z) * T(z) * s(z) * U_c

where the ``B_j`` are Blaschke-Potapov factors, ``T`` is an optional matrix
polynomial (truncated Taylor tail), ``s`` is a scalar product of atomic
singular inner factors and ``U_c`` an optional constant unitary.  Rational
parts extend analytically across the unit circle, so boundary evaluation is
direct except at singular atoms.

All evaluation routines broadcast over array-valued arguments: ``z`` of shape
``S`` yields values of shape ``S + (n, n)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, NumericalError

BOUNDARY_TOL = 1e-9
ATOM_TOL = 1e-9
PROJECTION_TOL = 1e-10
UNITARY_TOL = 1e-10
PURE_CONTRACTION_TOL = 1e-9

VALID_FLAGS = frozenset({"inner", "vanishes_at_zero"})


def _coerce_matrix(a, dim: int, what: str) -> np.ndarray:
    m = np.array(a, dtype=complex)
    if m.shape != (dim, dim):
        raise DomainError(f"{what} must be {dim}x{dim}, got shape {m.shape}")
    m.setflags(write=False)
    return m


def operator_norm(a: np.ndarray) -> float:
    """Largest singular value; the matrix norm used throughout."""
    return float(np.linalg.norm(a, ord=2))


@dataclass(frozen=True, eq=False)
class BlaschkePotapovFactor:
    """Elementary factor ``1 - P + b_w(z) P`` with ``b_w(z) = (z-w)/(1-conj(w) z)``.

    ``P`` must be an orthogonal projection; the factor is unitary on the
    circle and analytic on a neighbourhood of the closed disc (pole at
    ``1/conj(w)``).
    """

    zero: complex
    projection: np.ndarray

    def __post_init__(self):
        w = complex(self.zero)
        object.__setattr__(self, "zero", w)
        if abs(w) >= 1.0:
            raise DomainError(f"Blaschke zero must lie in the open disc, got |w|={abs(w)}")
        p = np.array(self.projection, dtype=complex)
        if p.ndim != 2 or p.shape[0] != p.shape[1]:
            raise DomainError("projection must be a square matrix")
        if operator_norm(p @ p - p) > PROJECTION_TOL or operator_norm(p - p.conj().T) > PROJECTION_TOL:
            raise DomainError("projection must satisfy P*P = P = P^2")
        p.setflags(write=False)
        object.__setattr__(self, "projection", p)

    @property
    def dim(self) -> int:
        return self.projection.shape[0]

    @property
    def rank(self) -> int:
        return int(round(np.trace(self.projection).real))

    def scalar_value(self, z):
        w = self.zero
        return (z - w) / (1.0 - np.conj(w) * z)

    def scalar_deriv(self, z):
        w = self.zero
        return (1.0 - abs(w) ** 2) / (1.0 - np.conj(w) * z) ** 2

    def value(self, z):
        z = np.asarray(z, dtype=complex)
        b = self.scalar_value(z)
        eye = np.eye(self.dim, dtype=complex)
        return (eye - self.projection) + b[..., None, None] * self.projection

    def deriv(self, z):
        z = np.asarray(z, dtype=complex)
        db = self.scalar_deriv(z)
        return db[..., None, None] * np.broadcast_to(self.projection, z.shape + (self.dim, self.dim))


@dataclass(frozen=True, eq=False)
class MatFunction:
    """A purely contractive ``n x n`` matrix analytic function on the disc.

    Attributes
    ----------
    dim : matrix size n.
    bp_factors : ordered Blaschke-Potapov factors.
    taylor_tail : optional polynomial factor, coefficients ``c_0..c_K``.
    singular_factors : atoms ``(zeta_i, t_i)`` of the scalar singular inner
        factor ``exp(-sum t_i (zeta_i + z)/(zeta_i - z))``.
    const_unitary : optional constant unitary post-factor.
    flags : subset of ``{"inner", "vanishes_at_zero"}``.
    """

    dim: int
    bp_factors: tuple = ()
    taylor_tail: tuple | None = None
    singular_factors: tuple = ()
    const_unitary: np.ndarray | None = None
    flags: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        n = int(self.dim)
        if n < 1:
            raise DomainError("dim must be a positive integer")
        object.__setattr__(self, "dim", n)
        factors = tuple(self.bp_factors)
        for f in factors:
            if not isinstance(f, BlaschkePotapovFactor):
                raise DomainError("bp_factors must contain BlaschkePotapovFactor instances")
            if f.dim != n:
                raise DomainError("Blaschke-Potapov factor size does not match dim")
        object.__setattr__(self, "bp_factors", factors)
        if self.taylor_tail is not None:
            tail = tuple(_coerce_matrix(c, n, "taylor coefficient") for c in self.taylor_tail)
            if not tail:
                raise DomainError("taylor_tail, when given, must be non-empty")
            object.__setattr__(self, "taylor_tail", tail)
        sing = []
        for item in self.singular_factors:
            if len(item) == 2:
                atom, mass = item
                proj = None
            else:
                atom, mass, proj = item
            atom = complex(atom)
            mass = float(mass)
            if abs(abs(atom) - 1.0) > 1e-12:
                raise DomainError("singular atoms must lie on the unit circle")
            if mass <= 0:
                raise DomainError("singular masses must be positive")
            if proj is not None:
                proj = _coerce_matrix(proj, n, "singular projection")
                if (operator_norm(proj @ proj - proj) > PROJECTION_TOL
                        or operator_norm(proj - proj.conj().T) > PROJECTION_TOL):
                    raise DomainError("singular projection must satisfy P*P = P = P^2")
            sing.append((atom / abs(atom), mass, proj))
        object.__setattr__(self, "singular_factors", tuple(sing))
        if self.const_unitary is not None:
            u = _coerce_matrix(self.const_unitary, n, "const_unitary")
            if operator_norm(u.conj().T @ u - np.eye(n)) > UNITARY_TOL:
                raise DomainError("const_unitary must be unitary")
            object.__setattr__(self, "const_unitary", u)
        flags = frozenset(self.flags)
        if not flags <= VALID_FLAGS:
            raise DomainError(f"unknown flags {sorted(flags - VALID_FLAGS)}")
        object.__setattr__(self, "flags", flags)

        at_zero = evaluate(self, 0.0)
        if operator_norm(at_zero) > 1.0 - PURE_CONTRACTION_TOL:
            raise DomainError("function is not purely contractive: ||Theta(0)|| >= 1")
        if "vanishes_at_zero" in flags and operator_norm(at_zero) > 1e-13:
            raise DomainError("flag vanishes_at_zero set but Theta(0) != 0")
        if "inner" in flags and self.taylor_tail is not None:
            raise DomainError("a function with a Taylor tail cannot be flagged inner")

    @property
    def vanishes_at_zero(self) -> bool:
        return "vanishes_at_zero" in self.flags

    @property
    def is_inner(self) -> bool:
        return "inner" in self.flags

    @property
    def is_rational(self) -> bool:
        return not self.singular_factors

    def __call__(self, z):
        return evaluate(self, z)

    def matrix_factors(self):
        """The ordered matrix factors as (value, deriv) callables."""
        out = [(f.value, f.deriv) for f in self.bp_factors]
        if self.taylor_tail is not None:
            tail = self.taylor_tail
            n = self.dim

            def tail_value(z, tail=tail, n=n):
                z = np.asarray(z, dtype=complex)
                acc = np.zeros(z.shape + (n, n), dtype=complex)
                for c in reversed(tail):
                    acc = acc * z[..., None, None] + c
                return acc

            def tail_deriv(z, tail=tail, n=n):
                z = np.asarray(z, dtype=complex)
                acc = np.zeros(z.shape + (n, n), dtype=complex)
                for k in range(len(tail) - 1, 0, -1):
                    acc = acc * z[..., None, None] + k * tail[k]
                return acc

            out.append((tail_value, tail_deriv))
        for atom, mass, proj in self.singular_factors:
            n = self.dim
            p = np.eye(n, dtype=complex) if proj is None else proj

            def sing_value(z, atom=atom, mass=mass, p=p, n=n):
                z = np.asarray(z, dtype=complex)
                s = np.exp(-mass * (atom + z) / (atom - z))
                eye = np.eye(n, dtype=complex)
                return (eye - p) + s[..., None, None] * p

            def sing_deriv(z, atom=atom, mass=mass, p=p, n=n):
                z = np.asarray(z, dtype=complex)
                s = np.exp(-mass * (atom + z) / (atom - z))
                ds = s * (-mass * 2.0 * atom / (atom - z) ** 2)
                return ds[..., None, None] * np.broadcast_to(p, z.shape + (n, n))

            out.append((sing_value, sing_deriv))
        if self.const_unitary is not None:
            u = self.const_unitary
            n = self.dim

            def const_value(z, u=u, n=n):
                z = np.asarray(z, dtype=complex)
                return np.broadcast_to(u, z.shape + (n, n))

            def const_deriv(z, n=n):
                z = np.asarray(z, dtype=complex)
                return np.zeros(z.shape + (n, n), dtype=complex)

            out.append((const_value, const_deriv))
        return out


def _check_points(theta: MatFunction, z: np.ndarray) -> None:
    r = np.abs(z)
    if np.any(r > 1.0 + BOUNDARY_TOL):
        raise DomainError("evaluation point outside the closed unit disc")
    if theta.singular_factors and np.any(r > 1.0 - BOUNDARY_TOL):
        zb = np.asarray(z)[..., None]
        atoms = np.array([a for a, _, _ in theta.singular_factors])
        near = (np.abs(zb - atoms) < ATOM_TOL) & (np.abs(zb) > 1.0 - BOUNDARY_TOL)
        if np.any(near):
            raise DomainError("evaluation at a singular-inner atom on the circle")


def evaluate(theta: MatFunction, z, check: bool = True) -> np.ndarray:
    """Evaluate Theta at ``z`` (scalar or array, |z| <= 1 off singular atoms)."""
    z = np.asarray(z, dtype=complex)
    scalar_input = z.ndim == 0
    if scalar_input:
        z = z.reshape(1)
    if check:
        _check_points(theta, z)
    n = theta.dim
    out = np.broadcast_to(np.eye(n, dtype=complex), z.shape + (n, n)).copy()
    for value, _ in theta.matrix_factors():
        out = out @ value(z)
    return out[0] if scalar_input else out


def derivative(theta: MatFunction, z, check: bool = True) -> np.ndarray:
    """Theta'(z) by the product rule over the factor list."""
    z = np.asarray(z, dtype=complex)
    scalar_input = z.ndim == 0
    if scalar_input:
        z = z.reshape(1)
    if check:
        _check_points(theta, z)
    n = theta.dim
    factors = theta.matrix_factors()
    vals = [value(z) for value, _ in factors]
    ders = [deriv(z) for _, deriv in factors]
    eye = np.broadcast_to(np.eye(n, dtype=complex), z.shape + (n, n)).copy()
    total = np.zeros(z.shape + (n, n), dtype=complex)
    # prefix[j] = F_1 ... F_{j-1}; walk once, keeping suffix products on the right
    suffix = [eye] * (len(factors) + 1)
    for j in range(len(factors) - 1, -1, -1):
        suffix[j] = vals[j] @ suffix[j + 1]
    prefix = eye
    for j in range(len(factors)):
        total = total + prefix @ ders[j] @ suffix[j + 1]
        prefix = prefix @ vals[j]
    return total[0] if scalar_input else total


def unit_circle_nodes(count: int, radius: float = 1.0, offset: bool = True) -> np.ndarray:
    """Equispaced quadrature nodes on the circle; offset dodges axis atoms."""
    shift = 0.5 if offset else 0.0
    return radius * np.exp(2j * np.pi * (np.arange(count) + shift) / count)


def _taylor_at_radius(theta: MatFunction, order: int, radius: float, nodes: int) -> np.ndarray:
    zs = unit_circle_nodes(nodes, radius=radius, offset=False)
    vals = evaluate(theta, zs, check=False)
    coeffs = np.fft.fft(vals, axis=0) / nodes
    ks = np.arange(order + 1)
    return coeffs[: order + 1] / (radius ** ks)[:, None, None]


def taylor(theta: MatFunction, order: int, nodes: int = 4096,
           radii: tuple | None = None, tol: float = 1e-9) -> list:
    """Maclaurin coefficients ``c_1..c_order`` by two-radius contour quadrature.

    The trapezoid rule on an interior circle is spectrally accurate; the
    second radius is a self-check.  Default radii are (0.7, 0.8) but move
    toward the circle for high orders, where the ``r^{-k}`` rescaling would
    otherwise amplify roundoff.  Persistent disagreement between the radii
    raises a :class:`NumericalError`.
    """
    if order < 1:
        raise DomainError("order must be >= 1")
    if nodes <= 2 * order:
        raise DomainError("need more quadrature nodes than twice the order")
    if radii is None:
        r1 = max(0.7, np.exp(-9.0 / order))
        r2 = max(0.8, np.exp(-4.5 / order))
    else:
        r1, r2 = radii
    for _ in range(4):
        a = _taylor_at_radius(theta, order, r1, nodes)
        b = _taylor_at_radius(theta, order, r2, nodes)
        gap = max(operator_norm(a[k] - b[k]) for k in range(1, order + 1))
        if gap <= tol:
            avg = 0.5 * (a + b)
            return [avg[k] for k in range(1, order + 1)]
        r1 = 0.5 * (r1 + 1.0)
        r2 = 0.5 * (r2 + 1.0)
    raise NumericalError(f"Taylor coefficients did not stabilise (last gap {gap:.3e})")


def herglotz(theta: MatFunction, a: np.ndarray, z) -> np.ndarray:
    """The Herglotz transform ``(1 + Theta(z) A*) (1 - Theta(z) A*)^{-1}``.

    Its Hermitian part is positive semidefinite on the disc.
    """
    n = theta.dim
    a = _coerce_matrix(a, n, "contraction A")
    if operator_norm(a) > 1.0 + 1e-10:
        raise DomainError("A must be a contraction")
    z = np.asarray(z, dtype=complex)
    if np.any(np.abs(z) >= 1.0):
        raise DomainError("Herglotz transform is taken at interior points only")
    x = evaluate(theta, z) @ a.conj().T
    eye = np.eye(n, dtype=complex)
    try:
        return np.linalg.solve(eye - x, eye + x)
    except np.linalg.LinAlgError as exc:  # impossible for ||A||<=1, |z|<1
        raise NumericalError("1 - Theta(z)A* is numerically singular") from exc


def mobius_to_disc(z_up):
    """The Cayley map ``mu(z) = (z - i)/(z + i)`` from the upper half-plane."""
    z_up = np.asarray(z_up, dtype=complex)
    return (z_up - 1j) / (z_up + 1j)


def mobius_to_halfplane(w):
    """Inverse Cayley map ``mu^{-1}(w) = i (1 + w)/(1 - w)``."""
    w = np.asarray(w, dtype=complex)
    return 1j * (1.0 + w) / (1.0 - w)


def cayley_compose(theta: MatFunction, z_up) -> np.ndarray:
    """Evaluate the half-plane transfer ``Phi(z) = Theta(mu(z))``."""
    z_up = np.asarray(z_up, dtype=complex)
    if np.any(np.imag(z_up) < -BOUNDARY_TOL):
        raise DomainError("point must lie in the closed upper half-plane")
    w = mobius_to_disc(z_up)
    return evaluate(theta, w)


def contractivity_report(theta: MatFunction, samples: int = 200, seed: int = 0):
    """Largest singular value of Theta over quasi-random interior points."""
    rng = np.random.default_rng(seed)
    r = np.sqrt(rng.random(samples))
    phi = 2.0 * np.pi * rng.random(samples)
    zs = r * np.exp(1j * phi)
    vals = evaluate(theta, zs)
    sv = np.linalg.svd(vals, compute_uv=False)
    return float(np.max(sv))


def inner_defect(theta: MatFunction, samples: int = 200) -> float:
    """max over boundary samples of ||Theta(zeta)* Theta(zeta) - 1||."""
    zs = unit_circle_nodes(samples)
    vals = evaluate(theta, zs)
    eye = np.eye(theta.dim)
    defect = vals.conj().swapaxes(-1, -2) @ vals - eye
    return float(np.max(np.linalg.norm(defect, ord=2, axis=(-2, -1))))


# ---------------------------------------------------------------------------
# JSON wire format
# ---------------------------------------------------------------------------

def _cx_to_pair(z: complex):
    return [float(np.real(z)), float(np.imag(z))]


def _pair_to_cx(p) -> complex:
    return complex(float(p[0]), float(p[1]))


def matrix_to_json(m: np.ndarray):
    return [[_cx_to_pair(v) for v in row] for row in np.asarray(m, dtype=complex)]


def matrix_from_json(rows, dim: int | None = None) -> np.ndarray:
    m = np.array([[_pair_to_cx(v) for v in row] for row in rows], dtype=complex)
    if dim is not None and m.shape != (dim, dim):
        raise DomainError(f"matrix must be {dim}x{dim}")
    return m


def to_json(theta: MatFunction) -> dict:
    doc = {"dim": theta.dim, "flags": sorted(theta.flags)}
    doc["bp"] = [{"w": _cx_to_pair(f.zero), "proj": matrix_to_json(f.projection)}
                 for f in theta.bp_factors]
    if theta.taylor_tail is not None:
        doc["taylor"] = [matrix_to_json(c) for c in theta.taylor_tail]
    doc["singular"] = []
    for a, t, p in theta.singular_factors:
        item = {"atom": _cx_to_pair(a), "mass": t}
        if p is not None:
            item["proj"] = matrix_to_json(p)
        doc["singular"].append(item)
    if theta.const_unitary is not None:
        doc["unitary"] = matrix_to_json(theta.const_unitary)
    return doc


def from_json(doc: dict) -> MatFunction:
    try:
        dim = int(doc["dim"])
        bp = tuple(
            BlaschkePotapovFactor(_pair_to_cx(item["w"]), matrix_from_json(item["proj"], dim))
            for item in doc.get("bp", [])
        )
        tail = doc.get("taylor")
        if tail is not None:
            tail = tuple(matrix_from_json(c, dim) for c in tail)
        singular = tuple(
            (_pair_to_cx(item["atom"]), float(item["mass"]),
             matrix_from_json(item["proj"], dim) if "proj" in item else None)
            for item in doc.get("singular", [])
        )
        unitary = doc.get("unitary")
        if unitary is not None:
            unitary = matrix_from_json(unitary, dim)
        flags = frozenset(doc.get("flags", []))
    except (KeyError, TypeError, IndexError) as exc:
        raise DomainError(f"malformed function spec: {exc!r}") from exc
    return MatFunction(dim=dim, bp_factors=bp, taylor_tail=tail,
                       singular_factors=singular, const_unitary=unitary, flags=flags)
