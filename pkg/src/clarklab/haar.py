"""Haar sampling on the unitary group, torus quadrature, disintegration checks.

Sampling is counter based: sample ``i`` of a seeded stream is a pure function
of ``(seed, i)`` (Philox keyed by the seed, counter advanced per index), so
parallel workers can own disjoint index ranges and any worker count
reproduces the same numbers.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError
from .matfun import MatFunction, taylor, unit_circle_nodes
from .moments import recurrence_from_coeffs, trig_poly_integral

COUNTER_STRIDE = 2 ** 20
CHUNK = 64


def _haar_from_rng(rng: np.random.Generator, n: int) -> np.ndarray:
    z = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2.0)
    q, r = np.linalg.qr(z)
    d = np.diagonal(r)
    return q * (d / np.abs(d))


def _stream(seed: int, index: int) -> np.random.Generator:
    bit = np.random.Philox(key=np.uint64(seed))
    bit.advance(index * COUNTER_STRIDE)
    return np.random.Generator(bit)


@dataclass
class HaarSampler:
    """Seeded, counter-indexed source of Haar unitaries."""

    dim: int
    seed: int = 0
    counter: int = 0

    def at(self, index: int) -> np.ndarray:
        """The ``index``-th sample of the stream, independent of the counter."""
        return _haar_from_rng(_stream(self.seed, index), self.dim)

    def draw(self) -> np.ndarray:
        u = self.at(self.counter)
        self.counter += 1
        return u

    def batch(self, count: int, start: int | None = None) -> np.ndarray:
        lo = self.counter if start is None else start
        out = np.stack([self.at(lo + i) for i in range(count)])
        if start is None:
            self.counter = lo + count
        return out


def sample_haar(sampler: HaarSampler) -> np.ndarray:
    """Next Haar-distributed unitary from the sampler (QR with phase fix)."""
    return sampler.draw()


# ---------------------------------------------------------------------------
# Weyl torus quadrature
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class WeylGrid:
    """Product torus grid with squared-Vandermonde weights.

    ``nodes`` has shape ``(M^n, n)``; ``weights`` contains
    ``|prod_{j<k}(z_j - z_k)|^2 / (n! M^n)`` and sums to 1 up to quadrature
    exactness of the Vandermonde polynomial.
    """

    dim: int
    nodes_per_circle: int
    mc_count: int
    nodes: np.ndarray = field(repr=False, default=None)
    weights: np.ndarray = field(repr=False, default=None)

    def __post_init__(self):
        n, m = self.dim, self.nodes_per_circle
        if n < 1 or m < 2:
            raise DomainError("need dim >= 1 and at least two nodes per circle")
        circle = unit_circle_nodes(m)
        grids = np.meshgrid(*([circle] * n), indexing="ij")
        nodes = np.stack([g.ravel() for g in grids], axis=-1)
        delta = np.ones(nodes.shape[0], dtype=complex)
        for j in range(n):
            for k in range(j + 1, n):
                delta = delta * (nodes[:, j] - nodes[:, k])
        weights = np.abs(delta) ** 2 / (math.factorial(n) * m ** n)
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "weights", weights)

    def total_weight(self) -> float:
        return float(np.sum(self.weights))


def class_function_integrate(f, dim: int, nodes_per_circle: int = 64):
    """Torus-only quadrature of a class function against Haar measure.

    Exact for trigonometric polynomials in the eigenvalues whose degree is
    below the aliasing threshold of the grid.
    """
    grid = WeylGrid(dim=dim, nodes_per_circle=nodes_per_circle, mc_count=0)
    acc = None
    for node, w in zip(grid.nodes, grid.weights):
        if w == 0.0:
            continue
        val = f(np.diag(node))
        acc = w * np.asarray(val) if acc is None else acc + w * np.asarray(val)
    return acc


def weyl_integrate(f, grid: WeylGrid, sampler: HaarSampler | None = None,
                   with_sigma: bool = False):
    """Haar integral of a general function by conjugated torus quadrature.

    Averages ``sum_D f(V D V^*) |Delta(D)|^2`` over ``mc_count`` Haar draws
    of ``V``; each draw alone is unbiased, and for class functions the
    estimator has zero variance.  With ``with_sigma`` the standard error of
    the draw average is returned alongside the value.
    """
    if sampler is None:
        sampler = HaarSampler(dim=grid.dim, seed=0)
    if sampler.dim != grid.dim:
        raise DomainError("sampler and grid dimensions differ")
    count = max(1, grid.mc_count)
    keep = grid.weights > 1e-18
    nodes = grid.nodes[keep]
    weights = grid.weights[keep]
    draws = []
    for _ in range(count):
        v = sampler.draw()
        vh = v.conj().T
        inner = None
        for node, w in zip(nodes, weights):
            val = f(v @ np.diag(node) @ vh)
            inner = w * np.asarray(val) if inner is None else inner + w * np.asarray(val)
        draws.append(inner)
    stacked = np.stack(draws)
    mean = stacked.mean(axis=0)
    if not with_sigma:
        return mean
    if count > 1:
        sigma = float(np.max(np.std(stacked, axis=0, ddof=1))) / np.sqrt(count)
    else:
        sigma = float("inf")
    return mean, sigma


# ---------------------------------------------------------------------------
# Disintegration of the measure family over the unitary group
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FiltrationResult:
    lhs: np.ndarray
    rhs: np.ndarray
    abs_err: float
    sigma: float
    samples: int

    def within(self, k_sigma: float = 3.0, floor: float = 1e-12) -> bool:
        return self.abs_err <= k_sigma * self.sigma + floor


def _integrals_for_parameters(coeffs, trig, params: np.ndarray, dim: int) -> np.ndarray:
    """Batched ``int f dOmega_{Theta A*}`` from the moment recurrence."""
    trig = np.asarray(trig, dtype=complex)
    d = trig.size // 2
    batch = params.shape[0]
    eye = np.broadcast_to(np.eye(dim, dtype=complex), (batch, dim, dim))
    acc = trig[d] * eye.copy()
    if d >= 1:
        ls = recurrence_from_coeffs(coeffs, params, d)
        for q in range(1, d + 1):
            lq = ls[q - 1]
            acc = acc + trig[d - q] * lq
            acc = acc + trig[d + q] * lq.conj().swapaxes(-1, -2)
    return acc


def filtration_check(theta: MatFunction, trig_coeffs, samples: int = 2000,
                     seed: int = 0, workers: int = 1) -> FiltrationResult:
    """Monte Carlo check that averaging the measures over Haar parameters
    reproduces Lebesgue measure on trigonometric polynomials.

    ``trig_coeffs`` is the centred coefficient list ``a_{-d}..a_d``.  Inner
    integrals come from the moment recurrence (exact for polynomials); the
    outer average is plain Haar Monte Carlo split into fixed chunks whose
    partial sums are combined pairwise, so results do not depend on the
    worker count.
    """
    if not theta.vanishes_at_zero:
        raise DomainError("disintegration check requires Theta(0) = 0")
    trig = np.asarray(trig_coeffs, dtype=complex)
    if trig.ndim != 1 or trig.size % 2 == 0:
        raise DomainError("trig polynomial must be a centred odd-length coefficient list")
    d = trig.size // 2
    n = theta.dim
    coeffs = taylor(theta, d) if d >= 1 else []
    sampler = HaarSampler(dim=n, seed=seed)

    chunks = [(lo, min(lo + CHUNK, samples)) for lo in range(0, samples, CHUNK)]

    def run_chunk(bounds):
        lo, hi = bounds
        us = np.stack([sampler.at(i) for i in range(lo, hi)])
        vals = _integrals_for_parameters(coeffs, trig, us, n)
        return vals.sum(axis=0), (np.abs(vals) ** 2).sum(axis=0), hi - lo

    if workers <= 1:
        partials = [run_chunk(b) for b in chunks]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            partials = list(pool.map(run_chunk, chunks))

    def combine(items):
        if len(items) == 1:
            return items[0]
        mid = len(items) // 2
        a = combine(items[:mid])
        b = combine(items[mid:])
        return a[0] + b[0], a[1] + b[1], a[2] + b[2]

    total, total_sq, count = combine(partials)
    lhs = total / count
    rhs = trig[d] * np.eye(n, dtype=complex)
    var = (total_sq - count * np.abs(lhs) ** 2) / max(count - 1, 1)
    sigma = float(np.sqrt(np.max(var.real) / count))
    abs_err = float(np.max(np.abs(lhs - rhs)))
    return FiltrationResult(lhs=lhs, rhs=rhs, abs_err=abs_err, sigma=sigma, samples=count)


def filtration_alpha_grid(theta: MatFunction, trig_coeffs, grid: int = 4096) -> FiltrationResult:
    """Deterministic scalar version: average over an equispaced parameter grid."""
    if theta.dim != 1:
        raise DomainError("the deterministic grid version is scalar only")
    if not theta.vanishes_at_zero:
        raise DomainError("disintegration check requires Theta(0) = 0")
    trig = np.asarray(trig_coeffs, dtype=complex)
    d = trig.size // 2
    coeffs = taylor(theta, d) if d >= 1 else []
    alphas = unit_circle_nodes(grid).reshape(-1, 1, 1)
    vals = _integrals_for_parameters(coeffs, trig, alphas, 1)
    lhs = vals.mean(axis=0)
    rhs = trig[d] * np.eye(1, dtype=complex)
    return FiltrationResult(lhs=lhs, rhs=rhs,
                            abs_err=float(np.max(np.abs(lhs - rhs))),
                            sigma=0.0, samples=grid)
