"""Gaussian limit of the composition distribution.

The block occupation counts have exact first and second moments
mean_i = n*p_i, var_i = n*p_i*(1-p_i), cov_ij = -n*p_i*p_j (multinomial
weights), and for large n the weight distribution approaches the
multivariate normal with those moments.  One coordinate is redundant
(the counts sum to n), so the model lives on the 2*sigma coordinates left
after eliminating level 0; which level is eliminated does not affect the
determinant or the entropy.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .spectrum import Spectrum

__all__ = [
    "GaussianModel",
    "composition_moments",
    "build_gaussian",
    "gaussian_entropy",
    "gaussian_log2_weight",
    "gaussian_model_to_json_obj",
]

INVERSION_RESIDUAL_TOL = 1e-12
INVERSION_RESIDUAL_HARD = 1e-9


@dataclass
class GaussianModel:
    """Normal approximation on the 2*sigma independent count coordinates."""

    dim: int
    mean: np.ndarray
    covariance: np.ndarray
    precision: np.ndarray
    det_A: float
    log2_det_covariance: float
    densities: tuple[float, ...]
    n: int


def composition_moments(spectrum: Spectrum) -> tuple[np.ndarray, np.ndarray]:
    """Mean vector and covariance matrix of the composition under the weights.

    When the spectrum carries exact rational weights the sums are accumulated
    exactly (integers over a common denominator) and only the final division
    rounds; otherwise plain compensated float summation is used.
    """
    d = spectrum.d
    entries = spectrum.entries
    if not entries:
        raise ValueError("empty spectrum has no moments")
    if spectrum.is_exact:
        den = 1
        for e in entries:
            den = math.lcm(den, e.weight_exact.denominator)  # type: ignore[union-attr]
        s0 = 0
        s1 = [0] * d
        s2 = [[0] * d for _ in range(d)]
        for e in entries:
            w = e.weight_exact
            scaled = w.numerator * (den // w.denominator)  # type: ignore[union-attr]
            s0 += scaled
            parts = e.parts
            for i in range(d):
                wk = scaled * parts[i]
                s1[i] += wk
                for j in range(i, d):
                    s2[i][j] += wk * parts[j]
        if s0 != den:
            raise ValueError("exact spectrum weights do not sum to 1")
        mean_frac = [Fraction(s1[i], den) for i in range(d)]
        mean = np.array([float(m) for m in mean_frac])
        cov = np.empty((d, d))
        for i in range(d):
            for j in range(i, d):
                central = Fraction(s2[i][j], den) - mean_frac[i] * mean_frac[j]
                cov[i, j] = cov[j, i] = float(central)
        return mean, cov
    ks = np.array([e.parts for e in entries], dtype=np.float64)
    w = np.array([2.0**e.log2_weight for e in entries])
    total = w.sum()
    mean = (w @ ks) / total
    centered = ks - mean
    cov = (centered.T * w) @ centered / total
    return mean, np.asarray(cov)


def build_gaussian(densities: Sequence, n: int) -> GaussianModel:
    """Gaussian model for block size n; level 0 is eliminated by the sum constraint."""
    p = tuple(float(x) for x in densities)
    if len(p) < 2:
        raise ValueError("need at least two levels")
    if n < 1:
        raise ValueError("block size must be >= 1")
    if any(x <= 0.0 for x in p):
        raise ValueError(
            "zero density makes the covariance singular; apply effective_spin "
            "to drop empty levels first"
        )
    if abs(math.fsum(p) - 1.0) > 1e-9:
        raise ValueError("densities must sum to 1")
    retained = np.array(p[1:])
    dim = retained.size
    mean = n * retained
    cov = n * (np.diag(retained) - np.outer(retained, retained))
    try:
        chol = np.linalg.cholesky(cov)
    except np.linalg.LinAlgError as exc:
        raise ValueError(f"covariance is not positive definite: {exc}") from exc
    log2_det_cov = 2.0 * float(np.log2(np.diag(chol)).sum())
    chol_inv = np.linalg.inv(chol)
    precision = chol_inv.T @ chol_inv
    eye = np.eye(dim)
    residual = float(np.abs(precision @ cov - eye).max())
    if residual > INVERSION_RESIDUAL_TOL:
        # one Newton refinement step for the inverse
        precision = precision @ (2.0 * eye - cov @ precision)
        precision = 0.5 * (precision + precision.T)
        residual = float(np.abs(precision @ cov - eye).max())
        if residual > INVERSION_RESIDUAL_HARD:
            raise ValueError(f"covariance inversion residual {residual:.3e} too large")
    det_A = 2.0 ** (-log2_det_cov)
    return GaussianModel(
        dim=dim,
        mean=mean,
        covariance=cov,
        precision=precision,
        det_A=det_A,
        log2_det_covariance=log2_det_cov,
        densities=p,
        n=n,
    )


def gaussian_entropy(model: GaussianModel) -> float:
    """Differential entropy sigma*log2(2*pi*e) + log2(1/det_A)/2, in bits.

    Identical by construction to the closed-form asymptotic entropy of the
    thermodynamic-limit spectrum.
    """
    sigma = model.dim / 2.0
    return sigma * math.log2(2.0 * math.pi * math.e) + 0.5 * model.log2_det_covariance


def gaussian_log2_weight(model: GaussianModel, parts: Sequence[int]) -> float:
    """log2 of the Gaussian density evaluated at a full composition label."""
    if len(parts) != model.dim + 1:
        raise ValueError("composition length must equal the full level count")
    delta = np.asarray(parts[1:], dtype=np.float64) - model.mean
    quad = float(delta @ model.precision @ delta)
    log2_norm = -0.5 * model.log2_det_covariance - model.dim / 2.0 * math.log2(2.0 * math.pi)
    return log2_norm - 0.5 * quad / math.log(2.0)


def gaussian_model_to_json_obj(model: GaussianModel) -> dict:
    return {
        "dim": model.dim,
        "n": model.n,
        "densities": list(model.densities),
        "mean": [float(x) for x in model.mean],
        "covariance": [float(x) for x in model.covariance.ravel()],
        "det_A": model.det_A,
    }
