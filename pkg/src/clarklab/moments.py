"""Moments and structure of the matrix Aleksandrov-Clark measures.

Two independent routes to the negative moments ``l_k(A) = int z^{-k} dOmega``
are provided: circle quadrature of the power sums (:func:`elliott_moment`)
and the algebraic recurrence driven by the Taylor coefficients of the symbol
(:func:`recurrence_moments`).  Their agreement is the basic correctness check
for everything built on top.

Index convention: ``l_k(A) := int z^{-k} Omega_{Theta A*}(dz)`` for k >= 1,
``m_k := int z^k Omega(dz)`` with ``m_{-k} = m_k^*`` and ``m_0 = 1`` whenever
``Theta(0) = 0``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError, NumericalError
from .matfun import MatFunction, evaluate, herglotz, operator_norm, taylor, unit_circle_nodes

QUAD_NODES = 4096
SINGULAR_SKIP_TOL = 1e-8
ATOM_STABLE_RTOL = 1e-4
ATOM_DECAY_TOL = 1e-6


def _require_vanishing(theta: MatFunction) -> None:
    if not theta.vanishes_at_zero:
        raise DomainError("operation requires the vanishes_at_zero flag (Theta(0) = 0)")


def _contraction(a, dim: int) -> np.ndarray:
    a = np.asarray(a, dtype=complex)
    if a.shape != (dim, dim):
        raise DomainError(f"parameter matrix must be {dim}x{dim}")
    if operator_norm(a) > 1.0 + 1e-10:
        raise DomainError("parameter matrix must be a contraction")
    return a


def elliott_moment(theta: MatFunction, a, k: int, nodes: int = QUAD_NODES) -> np.ndarray:
    """Moment ``int z^k dOmega_{Theta_A}`` by trapezoid quadrature of power sums.

    The integrand is the cumulative sum of ``(Theta A*)^j`` (k <= -1) or
    ``(A Theta*)^j`` (k >= 1) for ``j = 1..|k|``, weighted by ``z^{-|k|}``.
    """
    _require_vanishing(theta)
    a = _contraction(a, theta.dim)
    if k == 0:
        return np.eye(theta.dim, dtype=complex)
    q = abs(k)
    zs = unit_circle_nodes(nodes)
    vals = evaluate(theta, zs, check=False)
    if k <= -1:
        base = vals @ a.conj().T
    else:
        base = a @ vals.conj().swapaxes(-1, -2)
    power = base.copy()
    cum = base.copy()
    for _ in range(q - 1):
        power = power @ base
        cum = cum + power
    weight = zs ** k
    return np.mean(weight[:, None, None] * cum, axis=0)


def elliott_negative_moments(theta: MatFunction, a, order: int,
                             nodes: int = QUAD_NODES) -> list:
    """All ``l_1(A)..l_order(A)`` in one sweep (FFT over the quadrature grid)."""
    _require_vanishing(theta)
    a = _contraction(a, theta.dim)
    if order < 1:
        return []
    if nodes <= order + 1:
        raise DomainError("quadrature grid too small for the requested order")
    zs = unit_circle_nodes(nodes)
    vals = evaluate(theta, zs, check=False)
    base = vals @ a.conj().T
    # mean(z^{-q} X) on the half-offset grid is a phased FFT bin
    qs = np.arange(order + 1)
    phases = np.exp(-1j * np.pi * qs / nodes)
    out = [np.zeros((theta.dim, theta.dim), dtype=complex) for _ in range(order + 1)]
    power = base.copy()
    for j in range(1, order + 1):
        spectrum = np.fft.fft(power, axis=0) / nodes
        for q in range(j, order + 1):
            out[q] = out[q] + phases[q] * spectrum[q]
        if j < order:
            power = power @ base
    return out[1:]


def recurrence_from_coeffs(coeffs, a, order: int | None = None) -> list:
    """``l_k(A)`` from Taylor coefficients: l_k = c_k A* + sum c_j A* l_{k-j}.

    ``a`` may carry leading batch dimensions; the recurrence broadcasts.
    """
    order = len(coeffs) if order is None else order
    if order > len(coeffs):
        raise DomainError("not enough Taylor coefficients for the requested order")
    astar = np.asarray(a, dtype=complex).conj().swapaxes(-1, -2)
    ca = [c @ astar for c in coeffs]
    ls = []
    for k in range(1, order + 1):
        acc = ca[k - 1].copy()
        for j in range(1, k):
            acc = acc + ca[j - 1] @ ls[k - j - 1]
        ls.append(acc)
    return ls


def _recurrence_second_form(coeffs, a, ls) -> float:
    astar = np.asarray(a, dtype=complex).conj().swapaxes(-1, -2)
    worst = 0.0
    for k in range(1, len(ls) + 1):
        acc = coeffs[k - 1] @ astar
        for j in range(1, k):
            acc = acc + ls[j - 1] @ (coeffs[k - j - 1] @ astar)
        worst = max(worst, operator_norm(acc - ls[k - 1]))
    return worst


def recurrence_moments(theta: MatFunction, a, order: int,
                       validate: bool = True, form_tol: float = 1e-12) -> list:
    """``l_1(A)..l_order(A)`` computed algebraically from the Taylor series.

    The two equivalent forms of the recurrence are cross-validated to
    ``form_tol`` unless ``validate`` is switched off.
    """
    _require_vanishing(theta)
    a = _contraction(a, theta.dim)
    coeffs = taylor(theta, order)
    ls = recurrence_from_coeffs(coeffs, a, order)
    if validate:
        gap = _recurrence_second_form(coeffs, a, ls)
        scale = max(1.0, max(operator_norm(l) for l in ls))
        if gap > form_tol * scale * 10:
            raise NumericalError(f"recurrence forms disagree by {gap:.3e}")
    return ls


def crosscheck_mixed_recurrence(theta: MatFunction, a, order: int) -> float:
    """Max residual of ``l_k(A) = l_k A* + sum l_j(1)[A* - 1] l_{k-j}(A)``."""
    _require_vanishing(theta)
    a = _contraction(a, theta.dim)
    coeffs = taylor(theta, order)
    eye = np.eye(theta.dim, dtype=complex)
    l_one = recurrence_from_coeffs(coeffs, eye, order)
    l_a = recurrence_from_coeffs(coeffs, a, order)
    astar = a.conj().T
    worst = 0.0
    for k in range(1, order + 1):
        rhs = l_one[k - 1] @ astar
        for j in range(1, k):
            rhs = rhs + l_one[j - 1] @ (astar - eye) @ l_a[k - j - 1]
        worst = max(worst, operator_norm(l_a[k - 1] - rhs))
    return worst


def theta_coeffs_from_moments(ls) -> list:
    """Invert the A = 1 recurrence: ``c_n = l_n - sum l_i c_{n-i}``."""
    cs = []
    for n in range(1, len(ls) + 1):
        acc = np.array(ls[n - 1], dtype=complex, copy=True)
        for i in range(1, n):
            acc = acc - ls[i - 1] @ cs[n - i - 1]
        cs.append(acc)
    return cs


def moment_matrix(ls, k: int, dim: int) -> np.ndarray:
    """``m_k`` from the negative-moment list (``m_{-q} = l_q``, ``m_q = l_q^*``)."""
    if k == 0:
        return np.eye(dim, dtype=complex)
    q = abs(k)
    if q > len(ls):
        raise DomainError(f"moment index {k} beyond the computed range {len(ls)}")
    return ls[q - 1] if k < 0 else ls[q - 1].conj().T


def trig_poly_integral(ls, coeffs, dim: int) -> np.ndarray:
    """``int f dOmega`` for a trig polynomial with centred coefficient list.

    ``coeffs`` has odd length ``2d+1`` ordered ``a_{-d}..a_d``; ``ls`` must
    hold at least ``d`` negative moments of the measure.
    """
    coeffs = np.asarray(coeffs, dtype=complex)
    if coeffs.ndim != 1 or coeffs.size % 2 == 0:
        raise DomainError("trig polynomial must be a centred odd-length coefficient list")
    d = coeffs.size // 2
    acc = coeffs[d] * np.eye(dim, dtype=complex)
    for q in range(1, d + 1):
        acc = acc + coeffs[d - q] * moment_matrix(ls, -q, dim)
        acc = acc + coeffs[d + q] * moment_matrix(ls, q, dim)
    return acc


def total_mass(theta: MatFunction, a) -> np.ndarray:
    """``Omega_{Theta_A}(T)``, i.e. the Hermitian part of the transform at 0."""
    b0 = herglotz(theta, a, 0.0)
    return 0.5 * (b0 + b0.conj().T)


# ---------------------------------------------------------------------------
# Absolutely continuous density and point masses
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class AcDensity:
    """Sampled density of the absolutely continuous part on the circle."""

    angles: np.ndarray
    values: np.ndarray
    valid: np.ndarray
    status: str

    def integral(self) -> np.ndarray:
        """Trapezoid value of ``int W dm`` over the valid grid points."""
        good = self.values[self.valid]
        if good.shape[0] == 0:
            return np.zeros_like(self.values[0])
        return np.mean(good, axis=0)


def ac_density(theta: MatFunction, u, grid_size: int = 2048) -> AcDensity:
    """Density ``(1 - Theta U*)^{-1} (1 - Theta Theta*) (1 - U Theta*)^{-1}``.

    Grid points where ``1 - Theta U*`` is nearly singular are flagged invalid;
    more than 5% of them downgrades the status to "warning".
    """
    u = _contraction(u, theta.dim)
    zs = unit_circle_nodes(grid_size)
    angles = np.angle(zs)
    vals = evaluate(theta, zs, check=False)
    n = theta.dim
    eye = np.eye(n, dtype=complex)
    front = eye - vals @ u.conj().T
    sv = np.linalg.svd(front, compute_uv=False)
    valid = sv[:, -1] > SINGULAR_SKIP_TOL
    mid = eye - vals @ vals.conj().swapaxes(-1, -2)
    out = np.zeros_like(vals)
    if np.any(valid):
        f = front[valid]
        m = mid[valid]
        y = np.linalg.solve(f, m)
        # right-divide by f*: W f* = y  <=>  W^T = solve(conj(f), y^T)
        w = np.linalg.solve(f.conj(), y.swapaxes(-1, -2)).swapaxes(-1, -2)
        out[valid] = 0.5 * (w + w.conj().swapaxes(-1, -2))
    frac_bad = 1.0 - float(np.count_nonzero(valid)) / grid_size
    status = "ok" if frac_bad <= 0.05 else "warning"
    return AcDensity(angles=angles, values=out, valid=valid, status=status)


@dataclass(frozen=True)
class PointMass:
    """Radial-limit estimate of ``Omega_{Theta_U}({lambda})``."""

    weight: np.ndarray
    status: str  # "atom" | "zero" | "indeterminate"
    ladder: np.ndarray

    @property
    def is_atom(self) -> bool:
        return self.status == "atom"


def _neville_to_zero(ts, fs):
    """Polynomial extrapolation of matrix samples f(t) to t = 0."""
    work = [np.array(f, dtype=complex) for f in fs]
    k = len(work)
    for level in range(1, k):
        for i in range(k - level):
            t0, t1 = ts[i], ts[i + level]
            work[i] = (t0 * work[i + 1] - t1 * work[i]) / (t0 - t1)
    return work[0]


def point_mass(theta: MatFunction, u, lam, m_min: int = 4, m_max: int = 20,
               stable_rtol: float = ATOM_STABLE_RTOL) -> PointMass:
    """Estimate ``lim (1 - z conj(lam)) U (U - Theta(z))^{-1}`` along ``z = r lam``.

    The radial ladder uses ``r_m = 1 - 2^{-m}``; an atom is declared when the
    ladder stabilises (relative change below ``stable_rtol`` over three
    consecutive rungs), in which case the value is Richardson-extrapolated.
    """
    u = _contraction(u, theta.dim)
    lam = complex(lam)
    if abs(abs(lam) - 1.0) > 1e-9:
        raise DomainError("point mass is only defined for points on the circle")
    lam = lam / abs(lam)
    ms = np.arange(m_min, m_max + 1)
    ts = 2.0 ** (-ms.astype(float))
    rs = 1.0 - ts
    vals = evaluate(theta, rs * lam, check=False)
    eye = np.eye(theta.dim, dtype=complex)
    ladder = np.linalg.solve(np.broadcast_to(u, vals.shape) - vals, eye)
    ladder = ts[:, None, None] * (u @ ladder)
    norms = np.linalg.norm(ladder, ord=2, axis=(-2, -1))

    if norms[-1] < ATOM_DECAY_TOL and norms[-1] <= norms[-2] <= norms[-3]:
        zero = np.zeros((theta.dim, theta.dim), dtype=complex)
        return PointMass(weight=zero, status="zero", ladder=norms)

    rel = np.abs(np.diff(norms)) / np.maximum(norms[1:], 1e-300)
    if np.all(rel[-3:] < stable_rtol):
        tail = slice(-5, None)
        est = _neville_to_zero(ts[tail], ladder[tail])
        est = 0.5 * (est + est.conj().T)
        return PointMass(weight=est, status="atom", ladder=norms)

    zero = np.zeros((theta.dim, theta.dim), dtype=complex)
    return PointMass(weight=zero, status="indeterminate", ladder=norms)


# ---------------------------------------------------------------------------
# Measure container and serialization
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class MatMeasure:
    """Positive matrix measure: atoms, optional sampled AC density, moments."""

    dim: int
    atoms: tuple = ()
    density: AcDensity | None = None
    moments: tuple = ()

    def atom_total(self) -> np.ndarray:
        acc = np.zeros((self.dim, self.dim), dtype=complex)
        for _, weight in self.atoms:
            acc = acc + weight
        return acc

    def total(self) -> np.ndarray:
        acc = self.atom_total()
        if self.density is not None:
            acc = acc + self.density.integral()
        return acc

    def to_json(self) -> dict:
        from .matfun import matrix_to_json

        doc = {
            "dim": self.dim,
            "atoms": [
                {"point": [float(np.real(p)), float(np.imag(p))],
                 "weight": matrix_to_json(w)}
                for p, w in self.atoms
            ],
            "moments": [matrix_to_json(m) for m in self.moments],
        }
        return doc

    def density_csv(self) -> str:
        """Column-major CSV: header row of grid angles, one row per flattened
        matrix entry (Fortran order), cells formatted ``re+imj``."""
        if self.density is None:
            raise DomainError("measure carries no sampled density")
        angles = self.density.angles
        vals = self.density.values
        lines = [",".join(f"{a:.17g}" for a in angles)]
        n = self.dim
        for col in range(n):
            for row in range(n):
                cells = (f"{v.real:.17g}{v.imag:+.17g}j" for v in vals[:, row, col])
                lines.append(",".join(cells))
        return "\n".join(lines) + "\n"
