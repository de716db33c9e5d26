"""Entropy functionals over block spectra and the closed-form expressions.

Exact block entropies come either from a materialised spectrum
(:func:`entropy_of_spectrum`) or from :func:`block_entropy`, which computes
the same number through the chain rule over coordinates: conditioned on the
partial sum of the earlier levels, each occupation count is hypergeometric
(finite L) or binomial (thermodynamic limit).  The chain route costs
O(d * n^2) and stays exact, so sweeps over large blocks do not need to touch
the (possibly astronomically large) composition support.

All entropies are in bits; "nats" exist only as an output formatting option.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .combinatorics import log2_binom, log2_factorial_table
from .spectrum import SectorConfig, Spectrum

__all__ = [
    "EntropyReport",
    "CorrectionReport",
    "EffectiveSpin",
    "entropy_of_spectrum",
    "block_entropy",
    "asymptotic_entropy",
    "asymptotic_validity",
    "max_entropy_bound",
    "effective_spin",
    "finite_size_corrections",
    "fit_prefactor",
    "entropy_report",
    "bits_to_nats",
]

LN2 = math.log(2.0)
LOG2_2PIE = math.log2(2.0 * math.pi * math.e)

# The asymptotic formula assumes n * prod(p_k) >> 1; below this product the
# value is still returned but flagged as outside stated validity.
ASYMPTOTIC_VALIDITY_FLOOR = 10.0

ZERO_DENSITY_TOL = 1e-12


def bits_to_nats(bits: float) -> float:
    return bits * LN2


@dataclass
class EntropyReport:
    """Exact entropy next to every closed-form comparison value.

    The asymptotic / Gaussian fields are None where the closed forms are
    undefined (block boundaries n in {0, L}, or fewer than two occupied
    levels after the effective-spin reduction).
    """

    exact_bits: float
    asymptotic_bits: float | None
    gaussian_bits: float | None
    sup_bound_bits: float
    constant_C_bits: float | None
    prefactor_gamma: float | None = None
    asymptotic_valid: bool = True

    def to_json_obj(self) -> dict:
        return {
            "exact_bits": self.exact_bits,
            "asymptotic_bits": self.asymptotic_bits,
            "gaussian_bits": self.gaussian_bits,
            "sup_bound_bits": self.sup_bound_bits,
            "constant_C_bits": self.constant_C_bits,
            "prefactor_gamma": self.prefactor_gamma,
            "asymptotic_valid": self.asymptotic_valid,
        }


@dataclass
class CorrectionReport:
    """Finite-size entropy corrections and their small-n/L expansions."""

    delta_per_bits: float
    delta_cr_bits: float
    central_charge: float
    delta_per_leading_bits: float
    delta_cr_leading_bits: float

    def to_json_obj(self) -> dict:
        return {
            "delta_per_bits": self.delta_per_bits,
            "delta_cr_bits": self.delta_cr_bits,
            "central_charge": self.central_charge,
            "delta_per_leading_bits": self.delta_per_leading_bits,
            "delta_cr_leading_bits": self.delta_cr_leading_bits,
        }


@dataclass
class EffectiveSpin:
    """Reduced growth rate when z spin levels carry no density."""

    sigma_eff: float
    z: int
    reduced_densities: tuple[float, ...]


def entropy_of_spectrum(spectrum: Spectrum, *, tol: float = 1e-9) -> float:
    """Von Neumann entropy -sum(w log2 w) in bits, with 0*log(0) == 0."""
    residual = spectrum.normalization_residual()
    if residual > tol:
        raise ValueError(f"spectrum is not normalized: residual {residual:.3e} > {tol:g}")
    terms = []
    for e in spectrum.entries:
        if e.weight_exact is not None:
            w = float(e.weight_exact)
            if w > 0.0:
                terms.append(w * math.log2(w))
        else:
            lw = e.log2_weight
            w = 2.0**lw
            if w > 0.0:
                terms.append(w * lw)
    return -math.fsum(terms)


def _binomial_entropy(m: int, q: float, t: np.ndarray) -> float:
    """Entropy in bits of Binomial(m, q)."""
    if m <= 0 or q <= 0.0 or q >= 1.0:
        return 0.0
    k = np.arange(m + 1)
    lw = t[m] - t[k] - t[m - k] + k * math.log2(q) + (m - k) * math.log2(1.0 - q)
    w = np.exp2(lw)
    return float(-(w * lw).sum())


def _binomial_pmf(m: int, q: float, t: np.ndarray) -> np.ndarray:
    if q <= 0.0:
        out = np.zeros(m + 1)
        out[0] = 1.0
        return out
    if q >= 1.0:
        out = np.zeros(m + 1)
        out[m] = 1.0
        return out
    k = np.arange(m + 1)
    return np.exp2(t[m] - t[k] - t[m - k] + k * math.log2(q) + (m - k) * math.log2(1.0 - q))


def _hypergeometric_entropy(L: int, K: int, n: int, t: np.ndarray) -> float:
    """Entropy in bits of the count of marked items in an n-draw from L with K marked."""
    lo = max(0, n - (L - K))
    hi = min(K, n)
    if hi <= lo:
        return 0.0
    k = np.arange(lo, hi + 1)
    lw = (
        t[K]
        - t[k]
        - t[K - k]
        + t[L - K]
        - t[n - k]
        - t[L - K - n + k]
        - (t[L] - t[n] - t[L - n])
    )
    w = np.exp2(lw)
    return float(-(w * lw).sum())


def _hypergeometric_pmf(L: int, K: int, n: int, t: np.ndarray) -> tuple[int, np.ndarray]:
    lo = max(0, n - (L - K))
    hi = min(K, n)
    k = np.arange(lo, hi + 1)
    lw = (
        t[K]
        - t[k]
        - t[K - k]
        + t[L - K]
        - t[n - k]
        - t[L - K - n + k]
        - (t[L] - t[n] - t[L - n])
    )
    return lo, np.exp2(lw)


def block_entropy(cfg: SectorConfig, n: int) -> float:
    """Exact block entropy via the conditional (chain-rule) decomposition.

    Agrees with ``entropy_of_spectrum(exact_spectrum(cfg, n))`` respectively
    ``thermo_spectrum`` to floating-point accuracy, at O(d * n^2) cost.
    """
    if n < 0:
        raise ValueError("block size must be nonnegative")
    d = cfg.d
    if cfg.is_finite:
        occupations = cfg.occupations
        assert occupations is not None
        L = sum(occupations)
        if n > L:
            raise ValueError(f"n exceeds L: n={n}, L={L}")
        if n == 0 or n == L:
            return 0.0
        t = log2_factorial_table(L)
        total = _hypergeometric_entropy(L, occupations[0], n, t)
        merged = occupations[0]
        for j in range(1, d - 1):
            remaining = L - merged
            if remaining <= 0:
                break
            lo, pmf = _hypergeometric_pmf(L, merged, n, t)
            for idx, ws in enumerate(pmf):
                if ws <= 0.0:
                    continue
                s = lo + idx
                total += float(ws) * _hypergeometric_entropy(remaining, occupations[j], n - s, t)
            merged += occupations[j]
        return total

    p = cfg.density_floats
    if n == 0:
        return 0.0
    t = log2_factorial_table(n)
    total = _binomial_entropy(n, p[0], t)
    cum = p[0]
    for j in range(1, d - 1):
        rest = 1.0 - cum
        if rest <= 0.0 or p[j] <= 0.0:
            cum += p[j]
            continue
        q = min(p[j] / rest, 1.0)
        pmf = _binomial_pmf(n, cum, t)
        for s, ws in enumerate(pmf):
            if ws > 0.0:
                total += float(ws) * _binomial_entropy(n - s, q, t)
        cum += p[j]
    return total


def _positive_densities(cfg: SectorConfig) -> tuple[float, ...]:
    p = cfg.density_floats
    if any(x <= ZERO_DENSITY_TOL for x in p):
        raise ValueError(
            "asymptotic form needs all densities > 0; apply effective_spin "
            "to drop empty levels first"
        )
    return p


def asymptotic_entropy(cfg: SectorConfig, n: int) -> float:
    """Large-n entropy: C + sigma*log2(2*pi*e * n(L-n)/L), C = log2(prod p)/2.

    For the thermodynamic limit the geometric factor is just n.
    """
    p = _positive_densities(cfg)
    sigma = float(cfg.sigma)
    C = 0.5 * math.fsum(math.log2(x) for x in p)
    if cfg.is_finite:
        L = cfg.L
        assert L is not None
        if not 0 < n < L:
            raise ValueError(f"asymptotic form needs 0 < n < L, got n={n}, L={L}")
        return C + sigma * (LOG2_2PIE + math.log2(n * (L - n) / L))
    if n < 1:
        raise ValueError("asymptotic form needs n >= 1")
    return C + sigma * (LOG2_2PIE + math.log2(n))


def asymptotic_validity(cfg: SectorConfig, n: int) -> bool:
    """Whether n * prod(p_k) clears the stated validity floor of 10."""
    prod = 1.0
    for x in cfg.density_floats:
        prod *= x
    return n * prod >= ASYMPTOTIC_VALIDITY_FLOOR


def max_entropy_bound(n: int, d: int) -> float:
    """Upper limit log2 binom(n + d - 1, d - 1), saturated by the uniform mixture."""
    if n < 0:
        raise ValueError("block size must be nonnegative")
    if d < 2:
        raise ValueError("local dimension must be >= 2")
    return log2_binom(n + d - 1, d - 1)


def effective_spin(densities: Sequence, zero_tol: float = ZERO_DENSITY_TOL) -> EffectiveSpin:
    """Count vanished levels: z zero densities reduce sigma to sigma - z/2."""
    p = tuple(float(x) for x in densities)
    if not p:
        raise ValueError("density vector is empty")
    sigma = (len(p) - 1) / 2.0
    reduced = tuple(x for x in p if x > zero_tol)
    z = len(p) - len(reduced)
    if not reduced:
        raise ValueError("all densities vanish within tolerance")
    return EffectiveSpin(sigma_eff=sigma - z / 2.0, z=z, reduced_densities=reduced)


def finite_size_corrections(
    cfg: SectorConfig, n: int, central_charge: float = 1.0
) -> CorrectionReport:
    """Finite-size corrections of the block entropy at fixed n.

    delta_per is the exact shift sigma*log2(1 - n/L) of the permutation-
    invariant form; delta_cr is the shift (c/3)*log2((L/(pi*n))*sin(pi*n/L))
    of the conformal comparison curve against its L->inf limit.  The leading
    orders are -sigma*(n/L)/ln2 and -(c/18)*(pi*n/L)^2/ln2; the quadratic
    coefficient follows from sin(y) = y*(1 - y^2/6 + ...).
    """
    if not cfg.is_finite:
        raise ValueError("finite-size corrections need a finite sector")
    L = cfg.L
    assert L is not None
    if not 0 < n < L:
        raise ValueError(f"corrections need 0 < n < L, got n={n}, L={L}")
    sigma = float(cfg.sigma)
    c = float(central_charge)
    x = n / L
    delta_per = sigma * math.log2(1.0 - x)
    delta_cr = (c / 3.0) * math.log2(math.sin(math.pi * x) / (math.pi * x))
    per_leading = -sigma * x / LN2
    cr_leading = -(c / 18.0) * (math.pi * x) ** 2 / LN2
    return CorrectionReport(
        delta_per_bits=delta_per,
        delta_cr_bits=delta_cr,
        central_charge=c,
        delta_per_leading_bits=per_leading,
        delta_cr_leading_bits=cr_leading,
    )


def fit_prefactor(points: Sequence[tuple[int, float]]) -> float:
    """Least-squares slope of S against log2 n; the logarithmic growth prefactor."""
    if len(points) < 3:
        raise ValueError("prefactor fit needs at least 3 points")
    ns = [n for n, _ in points]
    if any(n < 2 for n in ns):
        raise ValueError("prefactor fit needs n >= 2")
    if any(b <= a for a, b in zip(ns, ns[1:])):
        raise ValueError("prefactor fit needs strictly increasing n")
    xs = [math.log2(n) for n in ns]
    ys = [s for _, s in points]
    xbar = math.fsum(xs) / len(xs)
    ybar = math.fsum(ys) / len(ys)
    sxx = math.fsum((x - xbar) ** 2 for x in xs)
    sxy = math.fsum((x - xbar) * (y - ybar) for x, y in zip(xs, ys))
    return sxy / sxx


def entropy_report(cfg: SectorConfig, n: int, *, gamma: float | None = None) -> EntropyReport:
    """Assemble exact entropy plus all closed-form comparisons for one block size.

    Levels with vanishing density are dropped (effective-spin reduction)
    before evaluating the asymptotic and Gaussian forms, which require
    strictly positive densities.
    """
    from .gaussian import build_gaussian, gaussian_entropy

    exact = block_entropy(cfg, n)
    asym: float | None = None
    gauss: float | None = None
    C: float | None = None
    valid = False
    reduced_cfg = _drop_empty_levels(cfg)
    if reduced_cfg is not None:
        L = reduced_cfg.L
        in_range = (0 < n < L) if reduced_cfg.is_finite else n >= 1  # type: ignore[operator]
        C = 0.5 * math.fsum(math.log2(float(p)) for p in reduced_cfg.density_fractions)
        valid = asymptotic_validity(reduced_cfg, n)
        if in_range:
            asym = asymptotic_entropy(reduced_cfg, n)
            gauss = gaussian_entropy(build_gaussian(reduced_cfg.density_fractions, n))
    return EntropyReport(
        exact_bits=exact,
        asymptotic_bits=asym,
        gaussian_bits=gauss,
        sup_bound_bits=max_entropy_bound(n, cfg.d),
        constant_C_bits=C,
        prefactor_gamma=gamma,
        asymptotic_valid=valid,
    )


def _drop_empty_levels(cfg: SectorConfig) -> SectorConfig | None:
    """Sector with zero-density levels removed; None if < 2 levels survive."""
    if cfg.is_finite:
        occ = tuple(N for N in cfg.occupations if N > 0)  # type: ignore[union-attr]
        if len(occ) < 2:
            return None
        return SectorConfig.finite(occ)
    dens = tuple(p for p in cfg.density_fractions if float(p) > ZERO_DENSITY_TOL)
    if len(dens) < 2:
        return None
    return SectorConfig.infinite(dens)
