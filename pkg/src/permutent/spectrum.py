"""Reduced-density-matrix spectra of n-site blocks.

For a permutation-invariant pure state fixed by the occupation numbers
(N_0 ... N_{d-1}), the block spectrum is multivariate hypergeometric:

    weight(k) = prod_i binom(N_i, k_i) / binom(L, n)

over bounded compositions k of the block size n.  In the thermodynamic limit
(L -> inf at fixed densities p_i) the weights become multinomial,
``multinomial(n; k) * prod p_i^{k_i}``, and for the uniformly mixed global
state the spectrum is flat over all compositions of n.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Sequence

from .combinatorics import (
    LOG2_ZERO,
    binom_exact,
    bounded_composition_steps,
    log2_binom,
    log2_factorial_table,
)

__all__ = [
    "SectorConfig",
    "SpectrumEntry",
    "Spectrum",
    "SpectrumSource",
    "dimension_symmetric_subspace",
    "exact_spectrum",
    "thermo_spectrum",
    "uniform_mixed_spectrum",
    "spectrum_to_json_obj",
]

# Exact rational weights are kept automatically up to this system size;
# beyond it the log-domain path is the default.
EXACT_AUTO_MAX_L = 300

DENSITY_SUM_TOL = 1e-12


def _as_fraction(value) -> Fraction:
    # Fraction(float) is the exact binary value of the float, so no silent
    # precision change happens here.
    if isinstance(value, Fraction):
        return value
    if isinstance(value, (int, str)):
        return Fraction(value)
    if isinstance(value, float):
        return Fraction(value)
    raise TypeError(f"cannot interpret density {value!r} as a number")


@dataclass(frozen=True)
class SectorConfig:
    """One symmetry sector: local dimension d plus occupations or densities.

    Finite systems carry integer occupations (N_0 ... N_{d-1}) with
    L = sum(N).  The thermodynamic limit is a distinct variant carrying
    densities that sum to one; it is not modelled as a large-L sentinel.
    """

    d: int
    occupations: tuple[int, ...] | None = None
    densities: tuple[Fraction, ...] | None = None

    def __post_init__(self) -> None:
        if self.d < 2:
            raise ValueError(f"local dimension must be >= 2, got {self.d}")
        if (self.occupations is None) == (self.densities is None):
            raise ValueError("exactly one of occupations/densities must be set")
        if self.occupations is not None:
            if len(self.occupations) != self.d:
                raise ValueError("occupation vector length must equal d")
            if any(n < 0 for n in self.occupations):
                raise ValueError("occupations must be nonnegative")
            if sum(self.occupations) < 1:
                raise ValueError("finite sector needs at least one site")
        else:
            assert self.densities is not None
            if len(self.densities) != self.d:
                raise ValueError("density vector length must equal d")
            if any(p < 0 for p in self.densities):
                raise ValueError("densities must be nonnegative")
            if abs(float(sum(self.densities)) - 1.0) > DENSITY_SUM_TOL:
                raise ValueError("densities must sum to 1 within 1e-12")

    @classmethod
    def finite(cls, occupations: Sequence[int]) -> "SectorConfig":
        occ = tuple(int(n) for n in occupations)
        return cls(d=len(occ), occupations=occ)

    @classmethod
    def infinite(cls, densities: Sequence) -> "SectorConfig":
        dens = tuple(_as_fraction(p) for p in densities)
        return cls(d=len(dens), densities=dens)

    @property
    def is_finite(self) -> bool:
        return self.occupations is not None

    @property
    def L(self) -> int | None:
        return sum(self.occupations) if self.occupations is not None else None

    @property
    def sigma(self) -> Fraction:
        return Fraction(self.d - 1, 2)

    @property
    def density_fractions(self) -> tuple[Fraction, ...]:
        if self.densities is not None:
            return self.densities
        assert self.occupations is not None
        L = sum(self.occupations)
        return tuple(Fraction(n, L) for n in self.occupations)

    @property
    def density_floats(self) -> tuple[float, ...]:
        return tuple(float(p) for p in self.density_fractions)


class SpectrumSource(enum.Enum):
    FINITE_EXACT = "finite-exact"
    THERMODYNAMIC = "thermodynamic"
    UNIFORM_MIXED = "uniform-mixed"


class SpectrumEntry:
    """One eigenvalue: its composition label and log2 / exact weight."""

    __slots__ = ("parts", "log2_weight", "weight_exact")

    def __init__(self, parts: tuple[int, ...], log2_weight: float, weight_exact: Fraction | None):
        self.parts = parts
        self.log2_weight = log2_weight
        self.weight_exact = weight_exact

    @property
    def weight(self) -> float:
        if self.weight_exact is not None:
            return float(self.weight_exact)
        return 2.0 ** self.log2_weight

    def __repr__(self) -> str:  # pragma: no cover - debugging aid
        return f"SpectrumEntry({self.parts}, 2**{self.log2_weight:.6g})"


@dataclass
class Spectrum:
    """Block spectrum: entries over compositions of the block size."""

    entries: list[SpectrumEntry]
    block_size: int
    d: int
    source: SpectrumSource
    sector: SectorConfig | None = None
    dropped_mass: float = 0.0

    @property
    def support_size(self) -> int:
        return len(self.entries)

    @property
    def is_exact(self) -> bool:
        return bool(self.entries) and all(e.weight_exact is not None for e in self.entries)

    def weights(self) -> Iterator[float]:
        for e in self.entries:
            yield e.weight

    def total_weight(self) -> float:
        return math.fsum(self.weights())

    def total_weight_exact(self) -> Fraction | None:
        if not self.is_exact:
            return None
        total = Fraction(0)
        for e in self.entries:
            total += e.weight_exact  # type: ignore[operator]
        return total

    def normalization_residual(self) -> float:
        return abs(self.total_weight() + self.dropped_mass - 1.0)


def dimension_symmetric_subspace(n: int, d: int) -> int:
    """Dimension of the permutation-symmetric subspace of n sites, binom(n+d-1, d-1)."""
    if n < 0:
        raise ValueError("block size must be nonnegative")
    if d < 2:
        raise ValueError("local dimension must be >= 2")
    return binom_exact(n + d - 1, d - 1)


def exact_spectrum(cfg: SectorConfig, n: int, *, exact: bool | None = None) -> Spectrum:
    """Finite-L block spectrum: prod_i binom(N_i, k_i) / binom(L, n).

    One entry per bounded composition of n (zero-weight labels are never
    materialised; the enumeration bounds already exclude them).  With
    ``exact=None`` rational weights are kept for L <= 300.
    """
    if not cfg.is_finite:
        raise ValueError("exact_spectrum needs a finite sector; use thermo_spectrum for L=inf")
    occupations = cfg.occupations
    assert occupations is not None
    L = sum(occupations)
    if n < 0:
        raise ValueError(f"block size must be nonnegative, got {n}")
    if n > L:
        raise ValueError(f"n exceeds L: n={n}, L={L}")
    if exact is None:
        exact = L <= EXACT_AUTO_MAX_L

    d = cfg.d
    denom_log2 = log2_binom(L, n)
    denom = binom_exact(L, n) if exact else 0
    logs = [0.0] * d
    factors = [1] * d
    prod = 1
    entries: list[SpectrumEntry] = []
    for changed, parts in bounded_composition_steps(n, occupations):
        if exact:
            for i in range(changed, d):
                prod //= factors[i]
                factors[i] = binom_exact(occupations[i], parts[i])
                prod *= factors[i]
                logs[i] = log2_binom(occupations[i], parts[i])
            weight_exact = Fraction(prod, denom)
        else:
            for i in range(changed, d):
                logs[i] = log2_binom(occupations[i], parts[i])
            weight_exact = None
        lw = sum(logs) - denom_log2
        entries.append(SpectrumEntry(tuple(parts), lw, weight_exact))
    return Spectrum(entries, n, d, SpectrumSource.FINITE_EXACT, sector=cfg)


def thermo_spectrum(
    densities: Sequence,
    n: int,
    cutoff: float = 0.0,
    *,
    exact: bool | None = None,
) -> Spectrum:
    """Thermodynamic-limit spectrum: multinomial(n; k) * prod p_i^{k_i}.

    All compositions of n are finite in number, so ``cutoff=0`` (keep
    everything) is the default.  A positive cutoff drops entries below
    cutoff * max_weight, reports the dropped mass on the result, and is only
    available on the log-domain path.
    """
    if n < 0:
        raise ValueError(f"block size must be nonnegative, got {n}")
    if cutoff < 0:
        raise ValueError("cutoff must be nonnegative")
    dens = tuple(_as_fraction(p) for p in densities)
    cfg = SectorConfig.infinite(dens)
    d = cfg.d
    exact_possible = sum(dens) == 1
    if exact is None:
        exact = exact_possible and cutoff == 0.0
    if exact and not exact_possible:
        raise ValueError("exact weights need densities summing to exactly 1")
    if exact and cutoff > 0.0:
        raise ValueError("cutoff truncation is a log-domain feature; pass exact=False")

    pf = cfg.density_floats
    log_p = [math.log2(p) if p > 0 else LOG2_ZERO for p in pf]
    t = log2_factorial_table(n)
    bounds = tuple(n if p > 0 else 0 for p in pf)

    def log_weights() -> Iterator[tuple[int, list[int], float]]:
        # per-coordinate contribution: k_i*log2(p_i) - log2(k_i!)
        contrib = [0.0] * d
        for changed, parts in bounded_composition_steps(n, bounds):
            for i in range(changed, d):
                k = parts[i]
                contrib[i] = (k * log_p[i] - float(t[k])) if k else 0.0
            yield changed, parts, float(t[n]) + sum(contrib)

    threshold = LOG2_ZERO
    if cutoff > 0.0:
        max_lw = max(lw for _, _, lw in log_weights())
        threshold = max_lw + math.log2(cutoff)

    entries: list[SpectrumEntry] = []
    dropped: list[float] = []
    if exact:
        # common-denominator integers: weight = n!/prod(k_i!) * prod(a_i^{k_i}) / B^n
        B = math.lcm(*(p.denominator for p in dens))
        a = [int(p * B) for p in dens]
        n_fact = math.factorial(n)
        fact = [1] * (n + 1)
        for i in range(1, n + 1):
            fact[i] = fact[i - 1] * i
        pows = [[1] * (n + 1) for _ in range(d)]
        for i in range(d):
            for j in range(1, n + 1):
                pows[i][j] = pows[i][j - 1] * a[i]
        Bn = B**n
        num_factors = [1] * d
        den_factors = [1] * d
        num_prod = 1
        den_prod = 1
        for changed, parts, lw in log_weights():
            for i in range(changed, d):
                num_prod //= num_factors[i]
                den_prod //= den_factors[i]
                num_factors[i] = pows[i][parts[i]]
                den_factors[i] = fact[parts[i]]
                num_prod *= num_factors[i]
                den_prod *= den_factors[i]
            weight_exact = Fraction(n_fact * num_prod // den_prod, Bn)
            entries.append(SpectrumEntry(tuple(parts), lw, weight_exact))
    else:
        for _, parts, lw in log_weights():
            if lw >= threshold:
                entries.append(SpectrumEntry(tuple(parts), lw, None))
            else:
                dropped.append(2.0**lw)
    dropped_mass = math.fsum(dropped)
    if cutoff > 0.0 and dropped_mass > 10.0 * cutoff:
        raise ValueError(
            f"cutoff {cutoff:g} drops {dropped_mass:.3e} of the weight; "
            "lower the cutoff to keep at least 1 - 10*cutoff"
        )
    return Spectrum(
        entries, n, d, SpectrumSource.THERMODYNAMIC, sector=cfg, dropped_mass=dropped_mass
    )


def uniform_mixed_spectrum(n: int, d: int) -> Spectrum:
    """Flat spectrum of the uniformly mixed global state: kappa(n) equal weights."""
    kappa = dimension_symmetric_subspace(n, d)
    weight = Fraction(1, kappa)
    lw = -log2_binom(n + d - 1, d - 1)
    entries = [
        SpectrumEntry(tuple(parts), lw, weight)
        for _, parts in bounded_composition_steps(n, (n,) * d)
    ]
    return Spectrum(entries, n, d, SpectrumSource.UNIFORM_MIXED, sector=None)


def spectrum_to_json_obj(spectrum: Spectrum) -> dict:
    """JSON-ready dict: header plus one record per entry."""
    sector = spectrum.sector
    if sector is None:
        L_field: int | str | None = None
        occ = None
        dens = None
    elif sector.is_finite:
        L_field = sector.L
        occ = list(sector.occupations)  # type: ignore[arg-type]
        dens = None
    else:
        L_field = "inf"
        occ = None
        dens = [str(p) for p in sector.densities]  # type: ignore[union-attr]
    header = {
        "L": L_field,
        "d": spectrum.d,
        "occupations": occ,
        "densities": dens,
        "n": spectrum.block_size,
        "source": spectrum.source.value,
        "dropped_mass": spectrum.dropped_mass,
    }
    records = []
    for e in spectrum.entries:
        rec: dict = {"composition": list(e.parts), "log2_weight": e.log2_weight}
        if e.weight_exact is not None:
            rec["weight"] = str(e.weight_exact)
        records.append(rec)
    return {"header": header, "entries": records}
