"""Finite monomial-frame truncations of the weighted space and its shift.

The space is spanned by the monomials ``z^k e_i`` for ``|k| <= K``; its Gram
matrix is block Toeplitz in the measure moments.  Because atomic measures make
the monomials linearly dependent, every operator question is answered on the
*retained* subspace (Gram eigenvalues above a relative threshold), in whitened
coordinates where the ambient inner product is the plain one.

Matrix elements of multiplication-type operators are assembled from moments
directly, so no information is lost at the band edge when the underlying
space is finite dimensional.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import json
import numpy as np
import scipy.linalg

from .errors import DomainError, NumericalError
from .matfun import MatFunction, operator_norm
from .moments import (
    elliott_negative_moments,
    moment_matrix,
    recurrence_from_coeffs,
    _contraction,
    _require_vanishing,
)
from .matfun import taylor

RANK_THRESHOLD_REL = 1e-8
ORACLE_TOL = 1e-6
UNITARITY_REFUSE = 0.1
CLUSTER_TOL = 1e-8


@dataclass(frozen=True, eq=False)
class FrameSpace:
    """Truncated monomial frame of the weighted space for one symbol."""

    theta: MatFunction
    band: int
    tau: float
    gram: np.ndarray
    eigenvalues: np.ndarray        # descending
    eigenvectors: np.ndarray       # columns match eigenvalues
    rank: int
    neg_moments: tuple             # l_1 .. l_{2K+2} at A = 1

    @property
    def dim(self) -> int:
        return self.theta.dim

    @property
    def size(self) -> int:
        return (2 * self.band + 1) * self.dim

    def index(self, k: int, i: int) -> int:
        if abs(k) > self.band or not 0 <= i < self.dim:
            raise DomainError(f"frame index ({k},{i}) outside the band")
        return (k + self.band) * self.dim + i

    def moment(self, r: int) -> np.ndarray:
        return moment_matrix(self.neg_moments, r, self.dim)

    @property
    def whiten(self) -> np.ndarray:
        """Map from coefficient space onto whitened retained coordinates."""
        lam = self.eigenvalues[: self.rank]
        vec = self.eigenvectors[:, : self.rank]
        return np.sqrt(lam)[:, None] * vec.conj().T

    @property
    def whiten_pinv(self) -> np.ndarray:
        lam = self.eigenvalues[: self.rank]
        vec = self.eigenvectors[:, : self.rank]
        return vec / np.sqrt(lam)[None, :]

    def whitened_from_gram(self, gm: np.ndarray) -> np.ndarray:
        """Retained-subspace operator from exact matrix elements ``<X f_b, f_a>``."""
        wp = self.whiten_pinv
        return wp.conj().T @ gm @ wp

    def basis_minus(self) -> np.ndarray:
        """Whitened coordinates of the constants, one column per direction."""
        cols = [self.whiten[:, self.index(0, i)] for i in range(self.dim)]
        return np.stack(cols, axis=1)

    def basis_plus(self) -> np.ndarray:
        """Whitened coordinates of the ``1/z`` block."""
        cols = [self.whiten[:, self.index(-1, i)] for i in range(self.dim)]
        return np.stack(cols, axis=1)

    def gram_pinv(self) -> np.ndarray:
        lam = self.eigenvalues[: self.rank]
        vec = self.eigenvectors[:, : self.rank]
        return (vec / lam[None, :]) @ vec.conj().T

    def gram_adjoint(self, coeff_matrix: np.ndarray) -> np.ndarray:
        """``M^# = G^+ M^* G``, the adjoint in the frame inner product."""
        return self.gram_pinv() @ coeff_matrix.conj().T @ self.gram


def build_frame(theta: MatFunction, band: int, tau: float | None = None,
                oracle_tol: float = ORACLE_TOL) -> FrameSpace:
    """Assemble the Gram matrix from moments and cache its eigendecomposition.

    Moments enter through two independent routes (quadrature power sums and
    the Taylor recurrence); disagreement beyond ``oracle_tol`` aborts the
    build rather than producing a silently wrong Gram.
    """
    _require_vanishing(theta)
    if band < 1:
        raise DomainError("band must be >= 1")
    n = theta.dim
    order = 2 * band + 2
    coeffs = taylor(theta, order)
    ls = recurrence_from_coeffs(coeffs, np.eye(n, dtype=complex), order)
    le = elliott_negative_moments(theta, np.eye(n, dtype=complex), 2 * band)
    gap = max(operator_norm(ls[k] - le[k]) for k in range(2 * band))
    if gap > oracle_tol:
        raise NumericalError(f"moment oracles disagree by {gap:.3e}; refusing to build Gram")
    ls = tuple(ls)

    size = (2 * band + 1) * n
    gram = np.zeros((size, size), dtype=complex)
    for kk in range(2 * band + 1):
        for jj in range(2 * band + 1):
            m = moment_matrix(ls, jj - kk, n)
            gram[kk * n:(kk + 1) * n, jj * n:(jj + 1) * n] = m
    gram = 0.5 * (gram + gram.conj().T)
    evals, evecs = scipy.linalg.eigh(gram)
    evals = evals[::-1]
    evecs = evecs[:, ::-1]
    if evals[0] <= 0:
        raise NumericalError("Gram matrix has no positive spectrum")
    threshold = (RANK_THRESHOLD_REL * evals[0]) if tau is None else tau
    rank = int(np.count_nonzero(evals > threshold))
    gram.setflags(write=False)
    return FrameSpace(theta=theta, band=band, tau=float(threshold), gram=gram,
                      eigenvalues=evals, eigenvectors=evecs, rank=rank,
                      neg_moments=ls)


@dataclass(frozen=True, eq=False)
class FrameOperator:
    """Coefficient action of a perturbed shift, with exact matrix elements.

    ``coeff_matrix`` realises the shift with the top band row dropped plus the
    finite-rank correction; ``gram_matrix`` holds ``<Z(A) f_b, f_a>`` built
    from moments, which has no band-edge defect.  ``whitened`` is the
    compression to the retained subspace.
    """

    frame: FrameSpace
    parameter: np.ndarray
    coeff_matrix: np.ndarray
    gram_matrix: np.ndarray
    whitened: np.ndarray

    @property
    def interior_band(self) -> int:
        return self.frame.band - 1

    def gram_adjoint_matrix(self) -> np.ndarray:
        return self.frame.gram_adjoint(self.coeff_matrix)


def _shift_coeff_matrix(frame: FrameSpace) -> np.ndarray:
    size = frame.size
    z = np.zeros((size, size), dtype=complex)
    for k in range(-frame.band, frame.band):
        for i in range(frame.dim):
            z[frame.index(k + 1, i), frame.index(k, i)] = 1.0
    return z


def _const_block(frame: FrameSpace) -> np.ndarray:
    e0 = np.zeros((frame.size, frame.dim), dtype=complex)
    for i in range(frame.dim):
        e0[frame.index(0, i), i] = 1.0
    return e0


def clark_operator(frame: FrameSpace, a) -> FrameOperator:
    """The perturbed shift ``Z(A) = Z + P(A - 1) P Z`` on the frame."""
    n = frame.dim
    a = _contraction(a, n)
    e0 = _const_block(frame)
    zc = _shift_coeff_matrix(frame)
    proj = e0 @ e0.conj().T @ frame.gram
    acorr = e0 @ a @ e0.conj().T @ frame.gram
    coeff = zc + (acorr - proj) @ zc

    # exact matrix elements: <Z(A) z^k e_l, z^p e_i>
    size = frame.size
    gm = np.zeros((size, size), dtype=complex)
    amin1 = a - np.eye(n, dtype=complex)
    exps = range(-frame.band, frame.band + 1)
    left = {p: frame.moment(-p) @ amin1 for p in exps}
    for kk, k in enumerate(exps):
        mk1 = frame.moment(k + 1)
        for pp, p in enumerate(exps):
            block = frame.moment(k + 1 - p) + left[p] @ mk1
            gm[pp * n:(pp + 1) * n, kk * n:(kk + 1) * n] = block
    whitened = frame.whitened_from_gram(gm)
    return FrameOperator(frame=frame, parameter=a, coeff_matrix=coeff,
                         gram_matrix=gm, whitened=whitened)


def unitarity_deviation(op: FrameOperator) -> float:
    zw = op.whitened
    return operator_norm(zw.conj().T @ zw - np.eye(zw.shape[0]))


def compressed_moment(frame: FrameSpace, a, k: int) -> np.ndarray:
    """``P (Z(A)^#)^k P`` on the constant block; approximates ``l_k(A)``."""
    return compressed_moment_sweep(frame, a, k)[-1]


def compressed_moment_sweep(frame: FrameSpace, a, k_max: int) -> list:
    """``[d_1, ..., d_{k_max}]`` sharing one operator build.

    The compression acts on the retained subspace in whitened coordinates,
    where the adjoint is the plain conjugate transpose.  Because repeated
    adjoint applications walk the constants down the exponent band, the
    result is exact (up to roundoff) whenever ``k`` stays within the band.
    """
    if k_max < 1:
        raise DomainError("moment order must be >= 1")
    if k_max > frame.band - 1:
        raise DomainError(f"moment order {k_max} beyond the valid band {frame.band - 1}")
    if frame.rank < frame.dim:
        raise DomainError("frame rank below matrix dimension; band too small")
    op = clark_operator(frame, a)
    zstar = op.whitened.conj().T
    basis = frame.basis_minus()
    out = []
    cur = basis
    for _ in range(k_max):
        cur = zstar @ cur
        # standard matrix element: d[i, j] = <(Z(A)*)^k b_j, b_i>
        out.append(basis.conj().T @ cur)
    return out


def spectral_measure(frame: FrameSpace, u, bins=None,
                     cluster_tol: float = CLUSTER_TOL):
    """Spectral atoms of the compressed unitary perturbation.

    Works on the retained subspace; refuses when the compression deviates
    from unitarity by more than ``0.1`` (band too small for this symbol).
    Returns a :class:`~clarklab.moments.MatMeasure` whose atom weights are
    the spectral projections sandwiched between the constants.
    """
    from .moments import MatMeasure

    n = frame.dim
    u = _contraction(u, n)
    if operator_norm(u.conj().T @ u - np.eye(n)) > 1e-9:
        raise DomainError("spectral_measure requires a unitary parameter")
    op = clark_operator(frame, u)
    eta = unitarity_deviation(op)
    if eta > UNITARITY_REFUSE:
        raise NumericalError(
            f"compressed operator deviates from unitarity by {eta:.3e}; increase the band")
    tri, q = scipy.linalg.schur(op.whitened, output="complex")
    lam = np.diagonal(tri)
    order = np.argsort(np.angle(lam))
    lam = lam[order]
    q = q[:, order]

    clusters = []
    start = 0
    for j in range(1, len(lam) + 1):
        if j == len(lam) or abs(lam[j] - lam[j - 1]) > cluster_tol:
            clusters.append((start, j))
            start = j
    basis = frame.basis_minus()
    atoms = []
    for lo, hi in clusters:
        block = q[:, lo:hi]
        proj = block @ block.conj().T
        weight = basis.conj().T @ proj @ basis
        weight = 0.5 * (weight + weight.conj().T)
        point = np.mean(lam[lo:hi])
        point = point / abs(point)
        atoms.append((complex(point), weight))

    if bins is not None:
        merged = []
        for lo_ang, hi_ang in bins:
            acc = np.zeros((n, n), dtype=complex)
            rep = np.exp(0.5j * (lo_ang + hi_ang))
            for point, weight in atoms:
                ang = np.angle(point)
                inside = lo_ang <= ang < hi_ang
                if hi_ang > np.pi and ang < lo_ang - np.pi:
                    inside = inside or (ang + 2 * np.pi < hi_ang)
                if inside:
                    acc = acc + weight
            merged.append((complex(rep), acc))
        atoms = merged

    measure = MatMeasure(dim=n, atoms=tuple(atoms))
    return measure, eta


def export_frame(frame: FrameSpace, base_path: str, u=None) -> dict:
    """Write the Gram matrix as row-major little-endian f64 re/im pairs plus
    a JSON sidecar; returns the sidecar document."""
    gram = np.ascontiguousarray(frame.gram)
    flat = np.empty(gram.size * 2, dtype="<f8")
    flat[0::2] = gram.real.ravel(order="C")
    flat[1::2] = gram.imag.ravel(order="C")
    with open(base_path + ".bin", "wb") as fh:
        fh.write(flat.tobytes())
    eta_param = np.eye(frame.dim, dtype=complex) if u is None else np.asarray(u, dtype=complex)
    eta = unitarity_deviation(clark_operator(frame, eta_param))
    sidecar = {
        "dim": frame.dim,
        "band": frame.band,
        "tau": frame.tau,
        "rank": frame.rank,
        "eta": float(eta),
        "size": int(frame.size),
        "layout": "row-major",
        "dtype": "f64-le re/im interleaved",
    }
    with open(base_path + ".json", "w") as fh:
        json.dump(sidecar, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return sidecar
