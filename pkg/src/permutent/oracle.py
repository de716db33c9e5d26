"""Brute-force verification path, independent of the combinatorial formulas.

The oracle builds the full state vector in the d^L-dimensional product space
by string indexing alone (amplitudes found by counting matching basis
strings, not by evaluating factorials), reduces it with an explicit partial
trace, and diagonalises with a cyclic threshold Jacobi scheme.  Nothing here
touches binomial shortcuts; the only contact with the formula side is inside
the verify_* comparisons.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .spectrum import SectorConfig, dimension_symmetric_subspace, exact_spectrum

__all__ = [
    "ResourceLimitError",
    "EigensolverConvergenceError",
    "DenseState",
    "DenseDensityMatrix",
    "MatchReport",
    "build_state",
    "partial_trace",
    "dense_eigenvalues",
    "verify_theorem",
    "verify_uniform_mixture",
]

MAX_STATE_AMPLITUDES = 2_000_000
MAX_DENSITY_DIM = 2000
JACOBI_CONVERGENCE_TOL = 1e-12
JACOBI_SWEEP_BUDGET_FACTOR = 100  # rotations allowed: factor * dim^2


class ResourceLimitError(RuntimeError):
    """Requested dense computation exceeds the desk-scale guards."""


class EigensolverConvergenceError(RuntimeError):
    """Jacobi rotation budget exhausted before the off-diagonal norm target."""


@dataclass
class DenseState:
    """State vector over all d^L basis strings (real amplitudes)."""

    amplitudes: np.ndarray
    L: int
    d: int


@dataclass
class DenseDensityMatrix:
    """Reduced density matrix of the first n sites, dimension d^n."""

    entries: np.ndarray
    n: int
    d: int


@dataclass
class MatchReport:
    """Outcome of one formula-vs-dense comparison."""

    config: dict
    n: int
    max_abs_dev: float
    support_size_formula: int
    support_size_dense: int
    passed: bool

    def to_json_obj(self) -> dict:
        return {
            "config": self.config,
            "n": self.n,
            "max_abs_dev": self.max_abs_dev,
            "support_size_formula": self.support_size_formula,
            "support_size_dense": self.support_size_dense,
            "pass": self.passed,
        }


def _digit_counts(dim: int, L: int, d: int) -> list[np.ndarray]:
    """counts[level][index] = multiplicity of `level` in the base-d string of index."""
    rem = np.arange(dim, dtype=np.int64)
    counts = [np.zeros(dim, dtype=np.int16) for _ in range(d)]
    for _ in range(L):
        digit = rem % d
        rem //= d
        for level in range(d):
            counts[level] += digit == level
    return counts


def build_state(cfg: SectorConfig) -> DenseState:
    """Equal-amplitude state on every basis string matching the occupations.

    The amplitude is 1/sqrt(#matching strings), with the count taken by
    scanning all indices.
    """
    if not cfg.is_finite:
        raise ValueError("dense oracle needs a finite sector")
    occupations = cfg.occupations
    assert occupations is not None
    L = sum(occupations)
    d = cfg.d
    dim = d**L
    if dim > MAX_STATE_AMPLITUDES:
        raise ResourceLimitError(f"state dimension {dim} exceeds guard {MAX_STATE_AMPLITUDES}")
    counts = _digit_counts(dim, L, d)
    mask = np.ones(dim, dtype=bool)
    for level in range(d):
        mask &= counts[level] == occupations[level]
    matches = int(mask.sum())
    amplitudes = np.zeros(dim)
    amplitudes[mask] = 1.0 / math.sqrt(matches)
    return DenseState(amplitudes, L, d)


def partial_trace(state: DenseState, n: int) -> DenseDensityMatrix:
    """Trace out the last L-n sites: rho[a, b] = sum_e psi[a+e] psi[b+e].

    Site 0 is the most significant digit, so the first n sites select the
    leading block of each index string.
    """
    if n < 0 or n > state.L:
        raise ValueError(f"block size must lie in [0, L], got {n}")
    dim_block = state.d**n
    if dim_block > MAX_DENSITY_DIM:
        raise ResourceLimitError(f"block dimension {dim_block} exceeds guard {MAX_DENSITY_DIM}")
    stacked = state.amplitudes.reshape(dim_block, -1)
    rho = stacked @ stacked.T
    return DenseDensityMatrix(np.asarray(rho), n, state.d)


def _off_diagonal_norm(a: np.ndarray) -> float:
    off = a - np.diag(np.diag(a))
    return float(np.sqrt((off * off).sum()))


def dense_eigenvalues(
    rho: DenseDensityMatrix | np.ndarray,
    tol: float = 1e-12,
    *,
    convergence_tol: float = JACOBI_CONVERGENCE_TOL,
    max_rotations: int | None = None,
) -> list[float]:
    """Eigenvalues above tol, descending, via cyclic threshold Jacobi rotations.

    Sweeps rotate every pair whose off-diagonal entry exceeds the per-pair
    threshold until the off-diagonal Frobenius norm drops below
    convergence_tol * trace, or the rotation budget (100 * dim^2) runs out.
    """
    a = rho.entries if isinstance(rho, DenseDensityMatrix) else rho
    a = np.array(a, dtype=np.float64)
    m = a.shape[0]
    if a.ndim != 2 or a.shape[1] != m:
        raise ValueError("density matrix must be square")
    if float(np.abs(a - a.T).max(initial=0.0)) > 1e-10:
        raise ValueError("density matrix must be symmetric")

    # zero diagonal of a PSD matrix forces the whole row to zero: compress
    diag = np.diag(a)
    keep = np.nonzero(diag > 0.0)[0]
    zeros = m - keep.size
    if keep.size and keep.size < m:
        a = a[np.ix_(keep, keep)]
        m = keep.size

    trace = float(np.trace(a))
    target = convergence_tol * max(trace, np.finfo(float).tiny)
    budget = max_rotations if max_rotations is not None else JACOBI_SWEEP_BUDGET_FACTOR * m * m
    if m > 1:
        pair_threshold = target / math.sqrt(m * (m - 1))
        rotations = 0
        while _off_diagonal_norm(a) > target:
            rotated = False
            for p in range(m - 1):
                row = np.abs(a[p, p + 1 :])
                for q in np.nonzero(row > pair_threshold)[0] + (p + 1):
                    apq = a[p, q]
                    if abs(apq) <= pair_threshold:
                        continue
                    if rotations >= budget:
                        raise EigensolverConvergenceError(
                            f"no convergence after {rotations} rotations (dim {m})"
                        )
                    theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                    t = math.copysign(1.0, theta) / (abs(theta) + math.hypot(theta, 1.0))
                    c = 1.0 / math.sqrt(t * t + 1.0)
                    s = t * c
                    row_p = a[p, :].copy()
                    row_q = a[q, :].copy()
                    a[p, :] = c * row_p - s * row_q
                    a[q, :] = s * row_p + c * row_q
                    col_p = a[:, p].copy()
                    col_q = a[:, q].copy()
                    a[:, p] = c * col_p - s * col_q
                    a[:, q] = s * col_p + c * col_q
                    a[p, q] = a[q, p] = 0.0
                    rotations += 1
                    rotated = True
            if not rotated:
                break  # every pair is below threshold, so the norm target holds
    values = sorted(np.diag(a).tolist(), reverse=True)
    values.extend([0.0] * zeros)
    return [v for v in values if v > tol]


def verify_theorem(
    cfg: SectorConfig, n: int, tol: float = 1e-10, *, perturb: float = 0.0
) -> MatchReport:
    """Match the hypergeometric weights against dense partial-trace eigenvalues.

    ``perturb`` shifts the largest dense eigenvalue by the given amount before
    the comparison; it exists purely as a self-test hook for the harness.
    """
    state = build_state(cfg)
    rho = partial_trace(state, n)
    dense = dense_eigenvalues(rho, tol=1e-8)
    if perturb and dense:
        dense[0] += perturb
    formula = sorted((e.weight for e in exact_spectrum(cfg, n).entries), reverse=True)
    width = max(len(dense), len(formula))
    padded_dense = dense + [0.0] * (width - len(dense))
    padded_formula = formula + [0.0] * (width - len(formula))
    max_dev = max(
        (abs(x - y) for x, y in zip(padded_dense, padded_formula)), default=0.0
    )
    return MatchReport(
        config={"L": cfg.L, "d": cfg.d, "occupations": list(cfg.occupations or ())},
        n=n,
        max_abs_dev=max_dev,
        support_size_formula=len(formula),
        support_size_dense=len(dense),
        passed=len(dense) == len(formula) and max_dev < tol,
    )


def _occupancy_vectors(total: int, length: int):
    """All nonnegative integer vectors of the given length summing to total."""
    if length == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in _occupancy_vectors(total - first, length - 1):
            yield (first,) + rest


def verify_uniform_mixture(L: int, d: int, n: int, tol: float = 1e-10) -> MatchReport:
    """Check the flat reduced spectrum of the equally-weighted sector mixture.

    Builds rho as the average of the sector projectors, reduces it, and
    compares every nonzero eigenvalue against 1/kappa(n).
    """
    sectors = list(_occupancy_vectors(L, d))
    rho_accum: np.ndarray | None = None
    for occupations in sectors:
        state = build_state(SectorConfig.finite(occupations))
        block = partial_trace(state, n).entries
        rho_accum = block if rho_accum is None else rho_accum + block
    assert rho_accum is not None
    rho_accum /= len(sectors)
    dense = dense_eigenvalues(DenseDensityMatrix(rho_accum, n, d), tol=1e-8)
    kappa_n = dimension_symmetric_subspace(n, d)
    flat = 1.0 / kappa_n
    max_dev = max((abs(v - flat) for v in dense), default=0.0)
    return MatchReport(
        config={"L": L, "d": d, "occupations": None},
        n=n,
        max_abs_dev=max_dev,
        support_size_formula=kappa_n,
        support_size_dense=len(dense),
        passed=len(dense) == kappa_n and max_dev < tol,
    )
