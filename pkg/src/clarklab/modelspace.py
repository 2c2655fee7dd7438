"""Reproducing kernels, Clark eigensystems, boundary regularity, sampling.

The model space attached to a symbol carries the kernel
``D_w(z) = (1 - Theta(z) Theta(w)^*)/(1 - z conj(w))``.  For rational inner
symbols the space is finite dimensional; unitary Clark parameters then yield
total orthogonal families of boundary kernels and perfect reconstruction
from point samples, on the disc and, through the Cayley transform, on the
real line.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError, InternalError, NumericalError
from .matfun import (
    MatFunction,
    derivative,
    evaluate,
    mobius_to_disc,
    mobius_to_halfplane,
    operator_norm,
    unit_circle_nodes,
)
from .moments import elliott_negative_moments, moment_matrix, _contraction

BOUNDARY_RING = 1e-9
UNITARY_VALUE_TOL = 1e-7
LADDER_STABLE_RTOL = 1e-3
LADDER_GROWTH = 1.5
LADDER_BOUND = 1e6
CLUSTER_MERGE_TOL = 1e-9
ROOT_ON_CIRCLE_TOL = 1e-8


def _on_circle(z, tol: float = 1e-9) -> bool:
    return abs(abs(complex(z)) - 1.0) <= tol


def boundary_kernel_diagonal(theta: MatFunction, zeta: complex) -> np.ndarray:
    """The finite boundary value ``D_zeta(zeta) = zeta Theta'(zeta) Theta(zeta)^*``.

    Equals the positive matrix that the normalised defect
    ``(1 - Theta(z)Theta(z)^*)/(1 - |z|^2)`` converges to when the symbol has
    an angular derivative at ``zeta``.
    """
    zeta = complex(zeta)
    val = evaluate(theta, zeta)
    der = derivative(theta, zeta)
    a = zeta * der @ val.conj().T
    return 0.5 * (a + a.conj().T)


def kernel(theta: MatFunction, w, z) -> np.ndarray:
    """Matrix kernel ``D_w(z)``; boundary base points need an angular derivative."""
    w = complex(w)
    z = np.asarray(z, dtype=complex)
    if _on_circle(w, BOUNDARY_RING):
        w = w / abs(w)
        if not _has_boundary_certificate(theta, w):
            raise DomainError("boundary base point without an angular-derivative certificate")
    elif abs(w) > 1.0:
        raise DomainError("base point outside the closed disc")
    scalar_input = z.ndim == 0
    zz = z.reshape(-1) if scalar_input else z
    zv = evaluate(theta, zz)
    wv = evaluate(theta, w)
    n = theta.dim
    denom = 1.0 - zz * np.conj(w)
    out = np.empty(zz.shape + (n, n), dtype=complex)
    sing = np.abs(denom) < 1e-12
    reg = ~sing
    num = np.eye(n, dtype=complex) - zv @ wv.conj().T
    out[reg] = num[reg] / denom[reg, None, None]
    if np.any(sing):
        diag = boundary_kernel_diagonal(theta, w)
        out[sing] = diag
    return out[0] if scalar_input else out


def _has_boundary_certificate(theta: MatFunction, zeta: complex) -> bool:
    for atom, _, _ in theta.singular_factors:
        if abs(atom - zeta) < 1e-9:
            return cad_test(theta, zeta).exists is True
    val = evaluate(theta, zeta)
    defect = operator_norm(val.conj().T @ val - np.eye(theta.dim))
    if defect <= UNITARY_VALUE_TOL:
        return True
    return cad_test(theta, zeta).exists is True


# ---------------------------------------------------------------------------
# Cauchy transform of the weighted space
# ---------------------------------------------------------------------------

def cauchy_transform(theta: MatFunction, coeffs: dict, z, tol: float = 1e-12) -> np.ndarray:
    """``V f(z) = (1 - Theta(z)) int (1 - conj(w) z)^{-1} Omega(dw) f(w)``.

    ``coeffs`` maps monomial exponents to coefficient vectors of ``f``.  The
    integral expands in measure moments with geometric weights; the series is
    truncated once the tail bound ``|z|^M`` falls below ``tol``.
    """
    z = complex(z)
    if abs(z) >= 1.0:
        raise DomainError("the transform is evaluated at interior points only")
    n = theta.dim
    items = [(int(k), np.asarray(v, dtype=complex).reshape(n)) for k, v in coeffs.items()]
    if not items:
        return np.zeros(n, dtype=complex)
    r = abs(z)
    if r < 1e-14:
        terms = 1
    else:
        terms = int(np.ceil(np.log(tol * (1.0 - r)) / np.log(r))) + 1
        terms = min(max(terms, 4), 4000)
    k_min = min(k for k, _ in items)
    k_max = max(k for k, _ in items)
    order = max(terms - k_min, k_max, 1)
    ls = elliott_negative_moments(theta, np.eye(n, dtype=complex), order)
    acc = np.zeros(n, dtype=complex)
    zp = np.array([z ** m for m in range(terms)])
    for k, x in items:
        s = np.zeros(n, dtype=complex)
        for m in range(terms):
            s = s + zp[m] * (moment_matrix(ls, k - m, n) @ x)
        acc = acc + s
    return (np.eye(n, dtype=complex) - evaluate(theta, z)) @ acc


def modified_cauchy_kernel_coeffs(theta: MatFunction, a: complex, terms: int) -> dict:
    """Truncated frame coefficients of ``(1 - conj(a) z)^{-1} (1 - Theta(a)^*) e_i``.

    Returns a dict ``exponent -> n x n`` block whose column ``i`` transforms
    onto the kernel direction ``e_i``.
    """
    a = complex(a)
    if abs(a) >= 1.0:
        raise DomainError("kernel base point must be interior")
    front = np.eye(theta.dim, dtype=complex) - evaluate(theta, a).conj().T
    return {k: (np.conj(a) ** k) * front for k in range(terms)}


def intertwine_residual(theta: MatFunction, band: int = 40, probes: int = 20,
                        seed: int = 0) -> float:
    """Two-sided check of the shift intertwining through the transform.

    For each analytic-side frame monomial ``f`` compares the backward shift
    of ``V f`` against ``V (Y^# (1 - P) f)`` at interior probe points and
    returns the largest mismatch.
    """
    if not theta.vanishes_at_zero:
        raise DomainError("intertwining check requires Theta(0) = 0")
    n = theta.dim
    size = (band + 1) * n
    ls = elliott_negative_moments(theta, np.eye(n, dtype=complex), 2 * band + 2)
    gram = np.zeros((size, size), dtype=complex)
    for kk in range(band + 1):
        for jj in range(band + 1):
            gram[kk * n:(kk + 1) * n, jj * n:(jj + 1) * n] = moment_matrix(ls, jj - kk, n)
    gram = 0.5 * (gram + gram.conj().T)
    evals, evecs = np.linalg.eigh(gram)
    evals = evals[::-1]
    evecs = evecs[:, ::-1]
    rank = int(np.count_nonzero(evals > 1e-10 * evals[0]))
    gpinv = (evecs[:, :rank] / evals[:rank][None, :]) @ evecs[:, :rank].conj().T

    # exact matrix elements <Z f_b, f_a> = m_{k_b + 1 - k_a}: no band-edge defect
    gy = np.zeros((size, size), dtype=complex)
    for kk in range(band + 1):
        for jj in range(band + 1):
            gy[kk * n:(kk + 1) * n, jj * n:(jj + 1) * n] = moment_matrix(ls, jj + 1 - kk, n)
    ystar = gpinv @ gy.conj().T
    proj = np.zeros((size, size), dtype=complex)
    proj[:n, :n] = np.eye(n)
    pgram = proj @ gram  # P f = constants picked in the frame inner product
    rhs_map = ystar @ (np.eye(size) - pgram)

    rng = np.random.default_rng(seed)
    radii = 0.2 + 0.4 * rng.random(probes)
    angles = 2.0 * np.pi * rng.random(probes)
    zs = radii * np.exp(1j * angles)

    terms = int(np.ceil(np.log(1e-14 * 0.4) / np.log(0.6))) + 2
    order = max(terms + 1, band + 2)
    ls_long = elliott_negative_moments(theta, np.eye(n, dtype=complex), order)

    def v_matrix(z: complex) -> np.ndarray:
        front = np.eye(n, dtype=complex) - evaluate(theta, z)
        cols = np.zeros((n, size), dtype=complex)
        zp = np.array([z ** m for m in range(terms)])
        for k in range(band + 1):
            s = np.zeros((n, n), dtype=complex)
            for m in range(terms):
                s = s + zp[m] * moment_matrix(ls_long, k - m, n)
            cols[:, k * n:(k + 1) * n] = front @ s
        return cols

    v0 = v_matrix(0.0)
    worst = 0.0
    for z in zs:
        vz = v_matrix(complex(z))
        lhs = (vz - v0) / z
        rhs = vz @ rhs_map
        worst = max(worst, float(np.max(np.abs(lhs - rhs))))
    return worst


# ---------------------------------------------------------------------------
# Extreme points
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ExtremeResult:
    classification: str  # "extreme" | "non_extreme"
    integral: float      # -inf for divergent trace-log integral


def _singular_value_gaps(theta: MatFunction, angles) -> np.ndarray:
    vals = evaluate(theta, np.exp(1j * np.asarray(angles)), check=False)
    sv = np.linalg.svd(vals, compute_uv=False)
    return 1.0 - sv


def extreme_test(theta: MatFunction, coarse: int = 4096) -> ExtremeResult:
    """Classify by integrability of ``tr log(1 - |Theta|)`` on the circle.

    Unitary values on a positive fraction of the grid mean the integrand is
    ``-inf`` on a set of positive measure.  Otherwise isolated zeros of the
    top singular-value gap are analysed on dyadic shells; non-decaying shell
    sums signal divergence.
    """
    thetas = 2.0 * np.pi * (np.arange(coarse) + 0.5) / coarse
    gaps = _singular_value_gaps(theta, thetas)
    top_gap = gaps[:, -1]
    frac_unitary = float(np.mean(top_gap < 1e-10))
    if frac_unitary > 0.01:
        return ExtremeResult("extreme", float("-inf"))

    # locate isolated touch points of the unit sphere
    hot = np.where(top_gap < 0.05)[0]
    zeros = []
    if hot.size:
        groups = np.split(hot, np.where(np.diff(hot) > 1)[0] + 1)
        if len(groups) > 1 and groups[0][0] == 0 and groups[-1][-1] == coarse - 1:
            groups[0] = np.concatenate([groups[-1] - coarse, groups[0]])
            groups.pop()
        for g in groups:
            j = g[np.argmin(top_gap[g])]
            centre = thetas[j] if j >= 0 else thetas[j + coarse] - 2 * np.pi
            lo, hi = centre - 2 * np.pi / coarse, centre + 2 * np.pi / coarse
            zeros.append(_refine_touch(theta, lo, hi))
    zeros = sorted(t % (2 * np.pi) for t, gap in zeros if gap < 1e-9)
    deduped = []
    for t in zeros:
        if not deduped or min(abs(t - deduped[-1]),
                              2 * np.pi - abs(t - deduped[-1])) > 1e-6:
            deduped.append(t)
    if len(deduped) > 1:
        wrap = min(abs(deduped[0] + 2 * np.pi - deduped[-1]), abs(deduped[0] - deduped[-1]))
        if wrap <= 1e-6:
            deduped.pop()
    zeros = deduped

    window = 0.125
    total = 0.0
    # smooth part: trapezoid over segments away from the touch points
    mask = np.ones(coarse, dtype=bool)
    for t in zeros:
        d = np.abs((thetas - t + np.pi) % (2 * np.pi) - np.pi)
        mask &= d > window
    g_smooth = np.sum(np.log(np.maximum(gaps, 1e-300)), axis=1)
    total += float(np.mean(np.where(mask, g_smooth, 0.0)))

    for t in zeros:
        shell_sum, decayed = _shell_integral(theta, t, window)
        if not decayed:
            return ExtremeResult("extreme", float("-inf"))
        total += shell_sum
    if total < -1e3:
        return ExtremeResult("extreme", float("-inf"))
    return ExtremeResult("non_extreme", total)


def _refine_touch(theta: MatFunction, lo: float, hi: float):
    import scipy.optimize

    def gap(t):
        return float(_singular_value_gaps(theta, [t])[0, -1])

    res = scipy.optimize.minimize_scalar(gap, bounds=(lo, hi), method="bounded",
                                         options={"xatol": 1e-13})
    return float(res.x), float(res.fun)


def _shell_integral(theta: MatFunction, centre: float, window: float,
                    levels: int = 45, per_shell: int = 16):
    """Integral of the trace-log over ``|t - centre| <= window`` by dyadic shells.

    Returns ``(value, decayed)`` where ``decayed`` reports whether the shell
    contributions die out (integrable singularity).
    """
    total = 0.0
    contributions = []
    for j in range(1, levels + 1):
        inner = window * 2.0 ** (-j)
        outer = window * 2.0 ** (-(j - 1))
        offs = np.linspace(inner, outer, per_shell)
        contrib = 0.0
        for sign in (+1.0, -1.0):
            gaps = _singular_value_gaps(theta, centre + sign * offs)
            vals = np.sum(np.log(np.maximum(gaps, 1e-300)), axis=1)
            contrib += float(np.trapezoid(vals, sign * offs)) * np.sign(sign)
        contributions.append(contrib / (2 * np.pi))
        total += contributions[-1]
        if total < -1e3:
            return total, False
    tail = abs(contributions[-1])
    decayed = tail < 1e-10
    return total, decayed


# ---------------------------------------------------------------------------
# Angular derivatives and dense definedness
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CadResult:
    exists: bool | None           # None = indeterminate
    derivative: np.ndarray | None
    c_liminf: float
    boundary_value: np.ndarray
    ladder: np.ndarray


def _radial_boundary_value(theta: MatFunction, zeta: complex) -> np.ndarray:
    for atom, _, _ in theta.singular_factors:
        if abs(atom - zeta) < 1e-9:
            # radial limit exists; the singular scalar crushes it super-fast
            r = 1.0 - 2.0 ** -40
            return evaluate(theta, r * zeta, check=False)
    return evaluate(theta, zeta)


def cad_test(theta: MatFunction, zeta, direction=None,
             m_min: int = 4, m_max: int = 20) -> CadResult:
    """Angular-derivative test at a boundary point via a radial ladder.

    Without a direction the matrix criterion
    ``liminf || (1 - Theta(z) Theta(zeta)^*) / (1 - |z|^2) ||`` is used; for a
    direction ``x`` the Hermitian diagonal quadratic form (the squared norm of
    the moving kernel in that direction) replaces it.
    """
    zeta = complex(zeta)
    if not _on_circle(zeta, 1e-6):
        raise DomainError("cad_test needs a boundary point")
    zeta = zeta / abs(zeta)
    bval = _radial_boundary_value(theta, zeta)
    n = theta.dim
    ms = np.arange(m_min, m_max + 1)
    rs = 1.0 - 2.0 ** (-ms.astype(float))
    vals = evaluate(theta, rs * zeta, check=False)
    eye = np.eye(n, dtype=complex)
    if direction is None:
        mats = (eye - vals @ bval.conj().T) / (1.0 - rs ** 2)[:, None, None]
        ladder = np.linalg.norm(mats, ord=2, axis=(-2, -1))
        unitary_ok = operator_norm(bval.conj().T @ bval - eye) <= UNITARY_VALUE_TOL
    else:
        x = np.asarray(direction, dtype=complex).reshape(n)
        x = x / np.linalg.norm(x)
        defect = (eye - vals @ vals.conj().swapaxes(-1, -2)) / (1.0 - rs ** 2)[:, None, None]
        ladder = np.real(np.einsum("i,kij,j->k", x.conj(), defect, x))
        unitary_ok = abs(np.linalg.norm(bval @ x) - 1.0) <= UNITARY_VALUE_TOL

    c_liminf = float(np.min(ladder[-4:]))
    rel = np.abs(np.diff(ladder)) / np.maximum(ladder[1:], 1e-300)
    stable = bool(np.all(rel[-3:] < LADDER_STABLE_RTOL)) and ladder[-1] < LADDER_BOUND
    ratios = ladder[1:] / np.maximum(ladder[:-1], 1e-300)
    growing = bool(np.all(ratios[-4:] > LADDER_GROWTH)) or ladder[-1] > LADDER_BOUND

    deriv = None
    exists: bool | None
    if not unitary_ok:
        exists = False
    elif stable:
        exists = True
    elif growing:
        exists = False
    else:
        exists = None
    if exists and _analytic_at(theta, zeta):
        deriv = derivative(theta, zeta)
        if direction is None:
            # the derivative factors as zeta-bar times a positive matrix
            pos = zeta * deriv @ bval.conj().T
            herm_gap = operator_norm(pos - pos.conj().T)
            psd_min = float(np.linalg.eigvalsh(0.5 * (pos + pos.conj().T))[0])
            if herm_gap > 1e-7 * max(1.0, operator_norm(pos)) or psd_min < -1e-8:
                raise InternalError(
                    "boundary derivative does not factor through a positive matrix")
    return CadResult(exists=exists, derivative=deriv, c_liminf=c_liminf,
                     boundary_value=bval, ladder=ladder)


def _analytic_at(theta: MatFunction, zeta: complex) -> bool:
    return all(abs(atom - zeta) > 1e-9 for atom, _, _ in theta.singular_factors)


def densely_defined_test(theta: MatFunction, m_min: int = 4, m_max: int = 20) -> bool:
    """True when no direction admits an angular derivative at ``z = 1``.

    Implemented as divergence of the smallest eigenvalue of the normalised
    boundary defect along the radial ladder; an inconclusive ladder raises
    :class:`NumericalError`.
    """
    n = theta.dim
    ms = np.arange(m_min, m_max + 1)
    rs = 1.0 - 2.0 ** (-ms.astype(float))
    vals = evaluate(theta, rs.astype(complex), check=False)
    eye = np.eye(n, dtype=complex)
    defect = (eye - vals @ vals.conj().swapaxes(-1, -2)) / (1.0 - rs ** 2)[:, None, None]
    lam_min = np.linalg.eigvalsh(0.5 * (defect + defect.conj().swapaxes(-1, -2)))[:, 0]
    lam_min = np.maximum(lam_min, 1e-300)
    rel = np.abs(np.diff(lam_min)) / lam_min[1:]
    if np.all(rel[-3:] < LADDER_STABLE_RTOL) and lam_min[-1] < LADDER_BOUND:
        return False
    ratios = lam_min[1:] / lam_min[:-1]
    if np.all(ratios[-4:] > LADDER_GROWTH) or lam_min[-1] > LADDER_BOUND:
        return True
    raise NumericalError("dense-definedness ladder is inconclusive")


def regular_points(theta: MatFunction, zetas) -> list:
    """Label boundary samples "regular" or "spectrum".

    Regular needs analyticity at the point (no singular atom there) and
    unitary values on a neighbouring arc; the latter is probed at shrinking
    angular offsets on both sides.
    """
    out = []
    offsets = np.array([1.0, 0.5, 0.25, 0.125]) * 1e-2
    eye = np.eye(theta.dim)
    for zeta in np.asarray(zetas, dtype=complex).ravel():
        zeta = zeta / abs(zeta)
        if not _analytic_at(theta, zeta):
            out.append("spectrum")
            continue
        probe_angles = np.concatenate([offsets, -offsets, [0.0]])
        points = zeta * np.exp(1j * probe_angles)
        ok = True
        for p in points:
            if not _analytic_at(theta, p):
                continue  # a neighbouring atom does not spoil unitarity a.e.
            val = evaluate(theta, p, check=False)
            if operator_norm(val.conj().T @ val - eye) > 1e-8:
                ok = False
                break
        out.append("regular" if ok else "spectrum")
    return out


# ---------------------------------------------------------------------------
# Clark eigensystems and reconstruction
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ClarkNode:
    point: complex
    direction: np.ndarray
    norm_sq: float
    cluster: int


@dataclass(frozen=True, eq=False)
class ClarkSystem:
    """Eigensystem of a unitary perturbation for a rational inner symbol."""

    theta: MatFunction
    unitary: np.ndarray
    nodes: tuple                 # flattened ClarkNode list, one per kernel
    points: tuple                # distinct eigenvalues
    weights: tuple               # measure atom per distinct eigenvalue
    dim: int

    def weight_total(self) -> np.ndarray:
        acc = np.zeros((self.theta.dim, self.theta.dim), dtype=complex)
        for w in self.weights:
            acc = acc + w
        return acc


def _rational_data(theta: MatFunction):
    if theta.taylor_tail is not None or theta.singular_factors:
        raise DomainError("Clark eigensystems need a rational inner symbol")
    if not theta.is_inner:
        raise DomainError("Clark eigensystems need an inner symbol")
    n = theta.dim
    num = [np.eye(n, dtype=complex)]
    den = np.array([1.0 + 0.0j])
    reflections = []
    det_degree = 0
    for f in theta.bp_factors:
        p = f.projection
        w = f.zero
        a0 = (np.eye(n) - p) - w * p
        a1 = p - np.conj(w) * (np.eye(n) - p)
        new = [np.zeros((n, n), dtype=complex) for _ in range(len(num) + 1)]
        for k, c in enumerate(num):
            new[k] = new[k] + c @ a0
            new[k + 1] = new[k + 1] + c @ a1
        num = new
        den = np.convolve(den, np.array([1.0, -np.conj(w)]))
        det_degree += f.rank
        if w != 0 and f.rank < n:
            reflections.append((1.0 / np.conj(w), n - f.rank))
    if theta.const_unitary is not None:
        num = [c @ theta.const_unitary for c in num]
    return num, den, reflections, det_degree


def _det_poly_roots(num, den, u: np.ndarray):
    """Roots of ``det(N(z) - q(z) U)`` via FFT interpolation of the determinant."""
    n = u.shape[0]
    deg = (len(num) - 1) * n + 1
    m = 1
    while m < 2 * (deg + 1):
        m *= 2
    zs = np.exp(2j * np.pi * np.arange(m) / m)
    npow = np.stack([zs ** k for k in range(len(num))], axis=0)
    nv = np.einsum("ks,kij->sij", npow, np.stack(num))
    qv = np.polyval(den[::-1], zs)
    dets = np.linalg.det(nv - qv[:, None, None] * np.asarray(u))
    coeffs = np.fft.fft(dets) / m  # z^k coefficient in bin k (unit radius)
    coeffs = coeffs[: deg * 2]
    mags = np.abs(coeffs)
    top = mags.max()
    last = int(np.max(np.nonzero(mags > 1e-12 * top)[0])) if top > 0 else 0
    poly = coeffs[: last + 1]
    if last == 0:
        return np.array([], dtype=complex), poly
    roots = np.roots(poly[::-1])
    return roots, poly


def _polish_on_circle(poly: np.ndarray, root: complex, multiplicity: int = 1) -> complex:
    """Newton step adapted to the root multiplicity, then circle projection."""
    dpoly = np.polynomial.polynomial.polyder(poly)
    z = root
    for _ in range(3):
        pv = np.polynomial.polynomial.polyval(z, poly)
        dv = np.polynomial.polynomial.polyval(z, dpoly)
        if abs(dv) < 1e-300:
            break
        z = z - multiplicity * pv / dv
    return z / abs(z)


def _group_circular(roots, tol: float):
    """Group a list of near-circle points whose pairwise gaps are below tol."""
    roots = sorted(roots, key=np.angle)
    groups = []
    for r in roots:
        if groups and abs(groups[-1][-1] - r) <= tol:
            groups[-1].append(r)
        else:
            groups.append([r])
    if len(groups) > 1 and abs(groups[0][0] - groups[-1][-1]) <= tol:
        groups[0] = groups.pop() + groups[0]
    return groups


def clark_eigensystem(theta: MatFunction, u) -> ClarkSystem:
    """Spectral data of the unitary perturbation with parameter ``u``.

    Roots of ``det(Theta - U)`` on the circle give the eigenvalues; kernel
    directions come from the smallest singular vectors of
    ``Theta(lambda)^* - U^*``, orthogonalised inside clusters against the
    boundary kernel diagonal so that the kernel family is orthogonal.
    """
    if not theta.vanishes_at_zero:
        raise DomainError("Clark systems are built for symbols with Theta(0) = 0")
    n = theta.dim
    u = _contraction(u, n)
    if operator_norm(u.conj().T @ u - np.eye(n)) > 1e-9:
        raise DomainError("Clark parameter must be unitary")
    num, den, reflections, det_degree = _rational_data(theta)
    roots, poly = _det_poly_roots(num, den, u)
    roots = list(roots)
    for point, mult in reflections:
        for _ in range(mult):
            if not roots:
                raise InternalError("missing structural reflected root")
            j = int(np.argmin(np.abs(np.array(roots) - point)))
            if abs(roots[j] - point) > 1e-6 * max(1.0, abs(point)):
                raise InternalError("expected reflected root not found")
            roots.pop(j)
    if len(roots) != det_degree:
        raise InternalError(
            f"root count {len(roots)} does not match determinant degree {det_degree}")
    offsets = [abs(abs(r) - 1.0) for r in roots]
    if offsets and max(offsets) > ROOT_ON_CIRCLE_TOL:
        raise InternalError(f"eigenvalue root off the circle by {max(offsets):.3e}")
    # multiple roots come back split by ~sqrt(eps); average each coarse group
    # before polishing with the multiplicity-aware Newton step
    polished = []
    for group in _group_circular(roots, 1e-6):
        centre = complex(np.mean(group))
        lam = _polish_on_circle(poly, centre / abs(centre), multiplicity=len(group))
        polished.extend([lam] * len(group))
    clusters = _group_circular(polished, CLUSTER_MERGE_TOL)

    nodes = []
    points = []
    weights = []
    for cid, group in enumerate(clusters):
        lam = complex(np.mean(group))
        lam = lam / abs(lam)
        mult = len(group)
        val = evaluate(theta, lam)
        _, sv, vh = np.linalg.svd(val.conj().T - u.conj().T)
        small = sv[-mult:]
        if np.any(small > 1e-7):
            raise InternalError("kernel of Theta(lambda)* - U* thinner than root multiplicity")
        basis = vh.conj().T[:, n - mult:]
        diag = boundary_kernel_diagonal(theta, lam)
        gram = basis.conj().T @ diag @ basis
        gram = 0.5 * (gram + gram.conj().T)
        mu, vecs = np.linalg.eigh(gram)
        directions = basis @ vecs
        weights.append(directions @ np.diag(1.0 / mu) @ directions.conj().T)
        points.append(lam)
        for c in range(mult):
            x = directions[:, c]
            x = x / np.linalg.norm(x)
            nsq = float(np.real(x.conj() @ diag @ x))
            nodes.append(ClarkNode(point=lam, direction=x, norm_sq=nsq, cluster=cid))
    return ClarkSystem(theta=theta, unitary=u, nodes=tuple(nodes),
                       points=tuple(points), weights=tuple(weights), dim=det_degree)


def system_to_json(system: ClarkSystem) -> dict:
    from .matfun import matrix_to_json, to_json as theta_to_json

    def pair(z):
        return [float(np.real(z)), float(np.imag(z))]

    return {
        "theta": theta_to_json(system.theta),
        "unitary": matrix_to_json(system.unitary),
        "dim": system.dim,
        "points": [pair(p) for p in system.points],
        "weights": [matrix_to_json(w) for w in system.weights],
        "nodes": [
            {
                "point": pair(node.point),
                "direction": [pair(v) for v in node.direction],
                "norm_sq": float(node.norm_sq),
                "cluster": int(node.cluster),
            }
            for node in system.nodes
        ],
    }


def system_from_json(doc: dict) -> ClarkSystem:
    from .matfun import from_json as theta_from_json, matrix_from_json

    def cx(p):
        return complex(float(p[0]), float(p[1]))

    try:
        theta = theta_from_json(doc["theta"])
        unitary = matrix_from_json(doc["unitary"], theta.dim)
        nodes = tuple(
            ClarkNode(point=cx(item["point"]),
                      direction=np.array([cx(p) for p in item["direction"]]),
                      norm_sq=float(item["norm_sq"]),
                      cluster=int(item["cluster"]))
            for item in doc["nodes"]
        )
        points = tuple(cx(p) for p in doc["points"])
        weights = tuple(matrix_from_json(w, theta.dim) for w in doc["weights"])
        dim = int(doc["dim"])
    except (KeyError, TypeError, IndexError) as exc:
        raise DomainError(f"malformed Clark system document: {exc!r}") from exc
    return ClarkSystem(theta=theta, unitary=unitary, nodes=nodes,
                       points=points, weights=weights, dim=dim)


def kernel_gram(system: ClarkSystem) -> np.ndarray:
    """Gram matrix of the system's kernel family (orthogonal by theory)."""
    k = len(system.nodes)
    g = np.zeros((k, k), dtype=complex)
    for i, ni in enumerate(system.nodes):
        for j, nj in enumerate(system.nodes):
            if ni.cluster == nj.cluster:
                diag = boundary_kernel_diagonal(system.theta, ni.point)
                g[i, j] = nj.direction.conj() @ diag @ ni.direction
            else:
                mat = kernel(system.theta, ni.point, nj.point)
                g[i, j] = nj.direction.conj() @ mat @ ni.direction
    return g


def reconstruct(system: ClarkSystem, samples, z) -> np.ndarray:
    """Rebuild a model-space element from its kernel samples.

    ``samples[j]`` must equal ``(f(lambda_j), x_j)``; the result is
    ``sum_j samples_j * D_{lambda_j}(z) x_j / ||delta_j||^2``.
    """
    samples = np.asarray(samples, dtype=complex).ravel()
    if samples.size != len(system.nodes):
        raise DomainError(f"need {len(system.nodes)} samples, got {samples.size}")
    z = np.asarray(z, dtype=complex)
    scalar_input = z.ndim == 0
    zz = z.reshape(-1) if scalar_input else z
    n = system.theta.dim
    acc = np.zeros(zz.shape + (n,), dtype=complex)
    for s, node in zip(samples, system.nodes):
        mat = kernel(system.theta, node.point, zz)
        acc = acc + (s / node.norm_sq) * (mat @ node.direction)
    return acc[0] if scalar_input else acc


def sample_of(system: ClarkSystem, fvals) -> np.ndarray:
    """Samples ``(f(lambda_j), x_j)`` from function values at the nodes."""
    return np.array([np.vdot(node.direction, fv)
                     for node, fv in zip(system.nodes, fvals)], dtype=complex)


# ---------------------------------------------------------------------------
# Half-plane transfer
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class HalfPlaneSystem:
    """Cayley image of a Clark system: real nodes and line kernels."""

    theta: MatFunction
    points: tuple                # real sampling nodes
    nodes: tuple                 # ClarkNode list with real points
    dim: int

    def phi(self, z) -> np.ndarray:
        return evaluate(self.theta, mobius_to_disc(z))

    def phi_deriv(self, z) -> np.ndarray:
        z = np.asarray(z, dtype=complex)
        w = mobius_to_disc(z)
        mu_prime = 2j / (z + 1j) ** 2
        der = derivative(self.theta, w)
        return der * mu_prime[..., None, None] if z.ndim else der * mu_prime


def halfplane_kernel(theta: MatFunction, t: float, z) -> np.ndarray:
    """Line kernel ``(i/2 pi)(1 - Phi(z) Phi(t)^*)/(z - t)`` for real ``t``."""
    t = float(t)
    z = np.asarray(z, dtype=complex)
    scalar_input = z.ndim == 0
    zz = z.reshape(-1) if scalar_input else z
    phi_t = evaluate(theta, mobius_to_disc(t))
    phi_z = evaluate(theta, mobius_to_disc(zz))
    n = theta.dim
    num = np.eye(n, dtype=complex) - phi_z @ phi_t.conj().T
    denom = zz - t
    out = np.empty(zz.shape + (n, n), dtype=complex)
    sing = np.abs(denom) < 1e-12
    out[~sing] = (1j / (2 * np.pi)) * num[~sing] / denom[~sing, None, None]
    if np.any(sing):
        out[sing] = halfplane_kernel_diagonal(theta, t)
    return out[0] if scalar_input else out


def halfplane_kernel_diagonal(theta: MatFunction, t: float) -> np.ndarray:
    """Limit of the line kernel on its diagonal: ``(-i/2 pi) Phi'(t) Phi(t)^*``."""
    t = float(t)
    w = complex(mobius_to_disc(t))
    mu_prime = 2j / (t + 1j) ** 2
    phi_t = evaluate(theta, w)
    phi_d = derivative(theta, w) * mu_prime
    a = (-1j / (2 * np.pi)) * phi_d @ phi_t.conj().T
    return 0.5 * (a + a.conj().T)


def to_halfplane(system: ClarkSystem) -> HalfPlaneSystem:
    """Transfer a Clark system through the Cayley map; nodes land on the line."""
    nodes = []
    points = []
    for node in system.nodes:
        if abs(node.point - 1.0) < 1e-9:
            raise DomainError("node at infinity: lambda = 1 has no finite image")
        t = complex(mobius_to_halfplane(node.point))
        if abs(t.imag) > 1e-9 * max(1.0, abs(t)):
            raise InternalError("Cayley image of a circle node is not real")
        t = float(t.real)
        diag = halfplane_kernel_diagonal(system.theta, t)
        nsq = float(np.real(node.direction.conj() @ diag @ node.direction))
        nodes.append(ClarkNode(point=t, direction=node.direction,
                               norm_sq=nsq, cluster=node.cluster))
        points.append(t)
    return HalfPlaneSystem(theta=system.theta, points=tuple(points),
                           nodes=tuple(nodes), dim=system.dim)


def halfplane_reconstruct(system: HalfPlaneSystem, samples, z) -> np.ndarray:
    """Reconstruction on the half-plane from samples ``(g(t_j), x_j)``."""
    samples = np.asarray(samples, dtype=complex).ravel()
    if samples.size != len(system.nodes):
        raise DomainError(f"need {len(system.nodes)} samples, got {samples.size}")
    z = np.asarray(z, dtype=complex)
    scalar_input = z.ndim == 0
    zz = z.reshape(-1) if scalar_input else z
    n = system.theta.dim
    acc = np.zeros(zz.shape + (n,), dtype=complex)
    for s, node in zip(samples, system.nodes):
        mat = halfplane_kernel(system.theta, node.point, zz)
        acc = acc + (s / node.norm_sq) * (mat @ node.direction)
    return acc[0] if scalar_input else acc
