"""Characteristic-function identities checked through the frame.

The partial-isometry case ``A = 0`` recovers the symbol's Taylor
coefficients from pure frame algebra; general contractive parameters give
the transfer series ``Theta (1 - A^* Theta)^{-1}``.  The Lifschitz
characteristic function is produced from resolvents of the compressed
unitary perturbation and must agree with direct evaluation of the symbol.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError, NumericalError
from .matfun import MatFunction, evaluate, taylor
from .moments import _contraction, recurrence_from_coeffs
from .opmodel import FrameSpace, _const_block, clark_operator


@dataclass(frozen=True)
class CoeffSeries:
    """Matrix power-series coefficients ``c_1..c_K`` with provenance."""

    coeffs: tuple
    band: int
    provenance: str  # "frame" | "series"

    def __len__(self) -> int:
        return len(self.coeffs)

    def max_gap(self, other: "CoeffSeries") -> float:
        k = min(len(self), len(other))
        return max(
            float(np.linalg.norm(self.coeffs[j] - other.coeffs[j], 2))
            for j in range(k)
        )


def _down_shift(frame: FrameSpace) -> np.ndarray:
    size = frame.size
    z = np.zeros((size, size), dtype=complex)
    for k in range(-frame.band + 1, frame.band + 1):
        for i in range(frame.dim):
            z[frame.index(k - 1, i), frame.index(k, i)] = 1.0
    return z


def _const_sandwich(frame: FrameSpace, op: np.ndarray) -> np.ndarray:
    """Standard matrix element ``[i,j] = <Op b_j, b_i>`` on the constants."""
    e0 = _const_block(frame)
    return e0.conj().T @ frame.gram @ op @ e0


def nagy_foias_coeffs(frame: FrameSpace, order: int) -> CoeffSeries:
    """Characteristic-function coefficients of the zero-parameter perturbation.

    ``d_k = P (Z^{-1} - Z^{-1} P)^{k-1} Z^{-1} P`` computed by exact
    coefficient shifts inside the band; requires ``band >= 2 * order``.
    """
    if frame.band < 2 * order:
        raise DomainError("frame band must be at least twice the coefficient order")
    zinv = _down_shift(frame)
    e0 = _const_block(frame)
    proj = e0 @ e0.conj().T @ frame.gram
    step = zinv - zinv @ proj
    out = []
    cur = zinv
    for _ in range(order):
        out.append(_const_sandwich(frame, cur))
        cur = step @ cur
    return CoeffSeries(coeffs=tuple(out), band=order, provenance="frame")


def gamma_coeffs(frame: FrameSpace, a, order: int) -> CoeffSeries:
    """Frame coefficients of the transfer series for a contractive parameter.

    ``g_{m+1} = P (Z(A)^*)^m Z^{-1} P`` with
    ``Z(A)^* = Z^{-1}(1 + P(A^* - 1)P)`` realised exactly on the band.
    """
    if frame.band < 2 * order:
        raise DomainError("frame band must be at least twice the coefficient order")
    a = _contraction(a, frame.dim)
    zinv = _down_shift(frame)
    e0 = _const_block(frame)
    corr = e0 @ (a.conj().T - np.eye(frame.dim)) @ e0.conj().T @ frame.gram
    zastar = zinv @ (np.eye(frame.size) + corr)
    out = []
    cur = zinv
    for _ in range(order):
        out.append(_const_sandwich(frame, cur))
        cur = zastar @ cur
    return CoeffSeries(coeffs=tuple(out), band=order, provenance="frame")


def gamma_series_coeffs(theta: MatFunction, a, order: int) -> CoeffSeries:
    """Neumann-series coefficients of ``Theta (1 - A^* Theta)^{-1}``."""
    a = _contraction(a, theta.dim)
    cs = taylor(theta, order)
    astar = a.conj().T
    out = []
    for k in range(1, order + 1):
        acc = np.array(cs[k - 1], dtype=complex, copy=True)
        for j in range(1, k):
            acc = acc + cs[j - 1] @ astar @ out[k - j - 1]
        out.append(acc)
    return CoeffSeries(coeffs=tuple(out), band=order, provenance="series")


def transfer_series_recurrence_gap(theta: MatFunction, a, order: int) -> float:
    """Residual of ``b_m = l_m + sum l_j (A^* - 1) b_{m-j}`` for the series."""
    a = _contraction(a, theta.dim)
    cs = taylor(theta, order)
    eye = np.eye(theta.dim, dtype=complex)
    ls = recurrence_from_coeffs(cs, eye, order)
    bs = gamma_series_coeffs(theta, a, order).coeffs
    astar = a.conj().T
    worst = 0.0
    for m in range(1, order + 1):
        rhs = ls[m - 1].copy()
        for j in range(1, m):
            rhs = rhs + ls[j - 1] @ (astar - eye) @ bs[m - j - 1]
        worst = max(worst, float(np.linalg.norm(bs[m - 1] - rhs, 2)))
    return worst


def lifschitz_charfun(frame: FrameSpace, u_ref, z: complex) -> np.ndarray:
    """Characteristic function from resolvents of the compressed perturbation.

    With the canonical bases (``1/z``-block and constants) and reference
    parameter ``1`` the result equals the symbol at ``z``; other unitary
    references twist it by the constant ``U_ref^*`` on the right.
    """
    z = complex(z)
    n = frame.dim
    u = _contraction(u_ref, n)
    op = clark_operator(frame, u)
    zw = op.whitened
    lam = np.linalg.eigvals(zw)
    if np.min(np.abs(lam - z)) < 1e-6:
        raise NumericalError("evaluation point too close to a compressed eigenvalue")
    plus = frame.basis_plus()
    size = zw.shape[0]
    res_plus = np.linalg.solve(zw - z * np.eye(size), plus)
    # standard-orientation resolvent sandwiches on the 1/z block
    a_mat = z * (plus.conj().T @ res_plus)
    b_mat = plus.conj().T @ (zw @ res_plus)
    try:
        return np.linalg.solve(b_mat, a_mat)
    except np.linalg.LinAlgError as exc:
        raise NumericalError("resolvent matrix B(z) is singular") from exc
