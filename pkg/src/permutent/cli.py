"""Command-line front end: spectra, entropies, sweeps, verification, figures.

Outputs are deterministic: identical invocations produce byte-identical
files (no timestamps; the generator version string is the only metadata).
Validation problems exit with code 1, verification mismatches with 2,
resource-guard violations with 3.
"""

from __future__ import annotations

import concurrent.futures
import json
import os
import sys
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Sequence

import click

from . import __version__
from .entropy import (
    asymptotic_entropy,
    block_entropy,
    entropy_report,
    finite_size_corrections,
    bits_to_nats,
)
from .oracle import (
    ResourceLimitError,
    verify_theorem,
    verify_uniform_mixture,
)
from .spectrum import (
    SectorConfig,
    Spectrum,
    exact_spectrum,
    spectrum_to_json_obj,
    thermo_spectrum,
    uniform_mixed_spectrum,
)
from .svgplot import Series, render_chart

EXIT_VALIDATION = 1
EXIT_MISMATCH = 2
EXIT_RESOURCE = 3

SWEEP_CSV_COLUMNS = "L,d,n,occupations,S_exact,S_asym,S_sup,gap"
CORRECTIONS_CSV_COLUMNS = (
    "n_over_L,delta_per_bits,delta_per_leading_bits,delta_cr_bits,delta_cr_leading_bits"
)


@dataclass(frozen=True)
class JobConfig:
    """Validated request shared by the data-producing commands."""

    command: str
    sector: SectorConfig | None
    n_min: int
    n_max: int
    step: int = 1
    out_format: str = "json"
    out_path: Path | None = None
    exact: bool | None = None
    cutoff: float = 0.0
    central_charge: float = 1.0
    units: str = "bits"

    def __post_init__(self) -> None:
        if self.step < 1:
            raise ValueError("step must be >= 1")
        if self.n_min < 0 or self.n_max < self.n_min:
            raise ValueError(f"invalid block range [{self.n_min}, {self.n_max}]")
        if self.cutoff < 0.0:
            raise ValueError("cutoff must be nonnegative")
        if (
            self.sector is not None
            and self.sector.is_finite
            and self.n_max > self.sector.L  # type: ignore[operator]
        ):
            raise ValueError(f"n exceeds L: n={self.n_max}, L={self.sector.L}")

    @property
    def block_sizes(self) -> range:
        return range(self.n_min, self.n_max + 1, self.step)


def _fail(code: int, message: str) -> None:
    click.echo(f"error: {message}", err=True)
    sys.exit(code)


def _guarded(fn, *args, **kwargs):
    try:
        return fn(*args, **kwargs)
    except ResourceLimitError as exc:
        _fail(EXIT_RESOURCE, str(exc))
    except ValueError as exc:
        _fail(EXIT_VALIDATION, str(exc))


def _parse_int_list(text: str, flag: str) -> tuple[int, ...]:
    try:
        return tuple(int(part) for part in text.split(","))
    except ValueError:
        _fail(EXIT_VALIDATION, f"{flag} expects comma-separated integers, got {text!r}")
    raise AssertionError  # unreachable


def _parse_density_list(text: str) -> tuple[Fraction, ...]:
    values = []
    for part in text.split(","):
        part = part.strip()
        try:
            values.append(Fraction(part))
        except (ValueError, ZeroDivisionError):
            _fail(EXIT_VALIDATION, f"cannot parse density {part!r} (use fractions like 1/3)")
    return tuple(values)


def _build_sector(L: str | None, d: int | None, occ: str | None, dens: str | None) -> SectorConfig:
    if occ is not None and dens is not None:
        _fail(EXIT_VALIDATION, "--occ and --dens are mutually exclusive")
    infinite = L is not None and L.strip().lower() == "inf"
    if infinite:
        if dens is None:
            _fail(EXIT_VALIDATION, "--L inf needs --dens")
        densities = _parse_density_list(dens)
        if d is not None and d != len(densities):
            _fail(EXIT_VALIDATION, f"--d {d} conflicts with {len(densities)} densities")
        return _guarded(SectorConfig.infinite, densities)
    if occ is None:
        _fail(EXIT_VALIDATION, "finite sectors need --occ (or pass --L inf with --dens)")
    occupations = _parse_int_list(occ, "--occ")
    if d is not None and d != len(occupations):
        _fail(EXIT_VALIDATION, f"--d {d} conflicts with {len(occupations)} occupations")
    cfg = _guarded(SectorConfig.finite, occupations)
    if L is not None:
        try:
            L_value = int(L)
        except ValueError:
            _fail(EXIT_VALIDATION, f"--L must be an integer or 'inf', got {L!r}")
        if L_value != cfg.L:
            _fail(EXIT_VALIDATION, f"--L {L_value} conflicts with occupations summing to {cfg.L}")
    return cfg


def _write_text(path: Path | None, text: str) -> None:
    if path is None:
        click.echo(text, nl=False)
    else:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text)


def _thread_count() -> int:
    raw = os.environ.get("PERMUTENT_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def _spectrum_csv(spectrum: Spectrum) -> str:
    lines = ["composition,log2_weight,weight"]
    for e in spectrum.entries:
        exact = str(e.weight_exact) if e.weight_exact is not None else ""
        lines.append(f"{';'.join(map(str, e.parts))},{e.log2_weight!r},{exact}")
    return "\n".join(lines) + "\n"


@click.group()
@click.version_option(version=__version__, prog_name="permutent")
def main() -> None:
    """Entanglement spectra and entropies of permutation-invariant spin states."""


@main.command("spectrum")
@click.option("--L", "L", default=None, help="System size, or 'inf' for the thermodynamic limit.")
@click.option("--d", "d", type=int, default=None, help="Local dimension (2*sigma + 1).")
@click.option("--occ", default=None, help="Occupations N_0,...,N_{d-1} (finite L).")
@click.option("--dens", default=None, help="Densities p_0,...,p_{d-1} (L = inf); fractions allowed.")
@click.option("--n", "n", type=int, required=True, help="Block size.")
@click.option("--uniform", is_flag=True, help="Uniformly mixed global state instead of a sector.")
@click.option("--format", "out_format", type=click.Choice(["json", "csv"]), default="json")
@click.option("--out", type=click.Path(path_type=Path), default=None, help="Output file (default stdout).")
@click.option("--exact/--no-exact", "exact", default=None, help="Force exact rational weights on/off.")
@click.option("--cutoff", type=float, default=0.0, help="Relative weight cutoff (L = inf only).")
def cmd_spectrum(L, d, occ, dens, n, uniform, out_format, out, exact, cutoff):
    """Compute one block spectrum and write it as JSON or CSV."""
    if uniform and (occ is not None or dens is not None or L is not None):
        _fail(EXIT_VALIDATION, "--uniform takes only --d and --n")
    sector = None if uniform else _build_sector(L, d, occ, dens)
    job = _guarded(
        JobConfig,
        command="spectrum",
        sector=sector,
        n_min=n,
        n_max=n,
        out_format=out_format,
        out_path=out,
        exact=exact,
        cutoff=cutoff,
    )
    if uniform:
        if d is None:
            _fail(EXIT_VALIDATION, "--uniform needs --d")
        spectrum = _guarded(uniform_mixed_spectrum, n, d)
    elif job.sector.is_finite:
        if job.cutoff > 0.0:
            _fail(EXIT_VALIDATION, "--cutoff applies only to --L inf spectra")
        spectrum = _guarded(exact_spectrum, job.sector, n, exact=job.exact)
    else:
        spectrum = _guarded(
            thermo_spectrum, job.sector.densities, n, job.cutoff, exact=job.exact
        )
    if job.out_format == "json":
        payload = {"generator": f"permutent {__version__}"}
        payload.update(spectrum_to_json_obj(spectrum))
        _write_text(job.out_path, json.dumps(payload, indent=2) + "\n")
    else:
        _write_text(job.out_path, _spectrum_csv(spectrum))
    weights = [e.weight for e in spectrum.entries]
    click.echo(
        f"support {spectrum.support_size}  min_weight {min(weights, default=0.0):.6g}  "
        f"max_weight {max(weights, default=0.0):.6g}  "
        f"normalization_residual {spectrum.normalization_residual():.3e}",
        err=True,
    )


@main.command("entropy")
@click.option("--L", "L", default=None)
@click.option("--d", "d", type=int, default=None)
@click.option("--occ", default=None)
@click.option("--dens", default=None)
@click.option("--n", "n", type=int, required=True)
@click.option("--units", type=click.Choice(["bits", "nats"]), default="bits")
@click.option("--out", type=click.Path(path_type=Path), default=None)
def cmd_entropy(L, d, occ, dens, n, units, out):
    """Exact block entropy with asymptotic / Gaussian / bound comparisons."""
    sector = _build_sector(L, d, occ, dens)
    job = _guarded(
        JobConfig,
        command="entropy",
        sector=sector,
        n_min=n,
        n_max=n,
        out_path=out,
        units=units,
    )
    report = _guarded(entropy_report, job.sector, n)
    obj = report.to_json_obj()
    if units == "nats":
        for key in ("exact_bits", "asymptotic_bits", "gaussian_bits", "sup_bound_bits", "constant_C_bits"):
            if obj[key] is not None:
                obj[key.replace("_bits", "_nats")] = bits_to_nats(obj.pop(key))
    payload = {
        "generator": f"permutent {__version__}",
        "L": sector.L if sector.is_finite else "inf",
        "d": sector.d,
        "n": n,
        "units": units,
        "report": obj,
    }
    _write_text(out, json.dumps(payload, indent=2) + "\n")


def _sweep_row(sector: SectorConfig, n: int) -> tuple[int, float, float | None, float, float | None]:
    report = entropy_report(sector, n)
    gap = (
        report.exact_bits - report.asymptotic_bits
        if report.asymptotic_bits is not None
        else None
    )
    return n, report.exact_bits, report.asymptotic_bits, report.sup_bound_bits, gap


def _sweep_rows(sector: SectorConfig, ns: Sequence[int]) -> list[tuple]:
    threads = _thread_count()
    if threads == 1 or len(ns) < 4:
        return [_sweep_row(sector, n) for n in ns]
    with concurrent.futures.ProcessPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(_sweep_row, [sector] * len(ns), ns))


@main.command("sweep")
@click.option("--L", "L", default=None)
@click.option("--d", "d", type=int, default=None)
@click.option("--occ", default=None)
@click.option("--dens", default=None)
@click.option("--n-min", type=int, required=True)
@click.option("--n-max", type=int, required=True)
@click.option("--step", type=int, default=1)
@click.option("--format", "out_format", type=click.Choice(["csv", "svg"]), default="csv")
@click.option("--out", type=click.Path(path_type=Path), default=None)
def cmd_sweep(L, d, occ, dens, n_min, n_max, step, out_format, out):
    """Sweep the block size: exact entropy, asymptotic value, sup bound, gap."""
    sector = _build_sector(L, d, occ, dens)
    job = _guarded(
        JobConfig,
        command="sweep",
        sector=sector,
        n_min=n_min,
        n_max=n_max,
        step=step,
        out_format=out_format,
        out_path=out,
    )
    rows = _guarded(_sweep_rows, sector, list(job.block_sizes))
    occ_field = (
        ";".join(map(str, sector.occupations))
        if sector.is_finite
        else ";".join(str(p) for p in sector.densities)  # type: ignore[union-attr]
    )
    L_field = sector.L if sector.is_finite else "inf"
    if job.out_format == "csv":
        lines = [SWEEP_CSV_COLUMNS]
        for n, s_exact, s_asym, s_sup, gap in rows:
            asym_field = repr(s_asym) if s_asym is not None else ""
            gap_field = repr(gap) if gap is not None else ""
            lines.append(
                f"{L_field},{sector.d},{n},{occ_field},{s_exact!r},{asym_field},{s_sup!r},{gap_field}"
            )
        _write_text(out, "\n".join(lines) + "\n")
    else:
        exact_series = Series(
            label="exact",
            xs=[float(r[0]) for r in rows],
            ys=[r[1] for r in rows],
            style="points",
        )
        asym_series = Series(
            label="asymptotic",
            xs=[float(r[0]) for r in rows if r[2] is not None],
            ys=[r[2] for r in rows if r[2] is not None],
            style="line",
        )
        svg = render_chart(
            [asym_series, exact_series],
            title=f"Block entropy, L={L_field}, d={sector.d}",
            x_label="block size n",
            y_label="S (bits)",
        )
        _write_text(out, svg)


@main.command("corrections")
@click.option("--L", "L", type=int, required=True)
@click.option("--d", "d", type=int, required=True)
@click.option("--central-charge", "central_charge", type=float, default=1.0)
@click.option("--n-min", type=int, required=True)
@click.option("--n-max", type=int, required=True)
@click.option("--step", type=int, default=1)
@click.option("--out", type=click.Path(path_type=Path), default=None)
def cmd_corrections(L, d, central_charge, n_min, n_max, step, out):
    """Finite-size corrections and their leading-order expansions as CSV."""
    if d < 2:
        _fail(EXIT_VALIDATION, "--d must be >= 2")
    if L < 2:
        _fail(EXIT_VALIDATION, "--L must be >= 2")
    if not (0 < n_min <= n_max < L):
        _fail(EXIT_VALIDATION, f"corrections need 0 < n_min <= n_max < L, got [{n_min}, {n_max}]")
    base, extra = divmod(L, d)
    sector = SectorConfig.finite([base + (1 if i < extra else 0) for i in range(d)])
    job = _guarded(
        JobConfig,
        command="corrections",
        sector=sector,
        n_min=n_min,
        n_max=n_max,
        step=step,
        out_format="csv",
        out_path=out,
        central_charge=central_charge,
    )
    lines = [CORRECTIONS_CSV_COLUMNS]
    for n in job.block_sizes:
        rep = _guarded(finite_size_corrections, sector, n, job.central_charge)
        lines.append(
            f"{n / L!r},{rep.delta_per_bits!r},{rep.delta_per_leading_bits!r},"
            f"{rep.delta_cr_bits!r},{rep.delta_cr_leading_bits!r}"
        )
    _write_text(out, "\n".join(lines) + "\n")


@main.command("verify")
@click.option("--d2-max-l", type=int, default=8, help="Largest L for the d=2 theorem grid.")
@click.option("--d3-max-l", type=int, default=6, help="Largest L for the d=3 theorem grid.")
@click.option("--uniform-max-l", type=int, default=6, help="Largest L for uniform-mixture checks (d <= 3).")
@click.option("--tol", type=float, default=1e-10)
@click.option("--out", type=click.Path(path_type=Path), default=None)
@click.option("--inject-fault", type=float, default=0.0, hidden=True,
              help="Self-test hook: perturb one dense eigenvalue by this amount.")
def cmd_verify(d2_max_l, d3_max_l, uniform_max_l, tol, out, inject_fault):
    """Run the dense oracle over a grid and compare with the formula weights."""
    from .oracle import MAX_DENSITY_DIM, MAX_STATE_AMPLITUDES

    for d, max_l in ((2, d2_max_l), (3, d3_max_l), (2, uniform_max_l), (3, uniform_max_l)):
        if max_l < 1:
            continue
        if d**max_l > MAX_STATE_AMPLITUDES or d**max_l > MAX_DENSITY_DIM:
            _fail(
                EXIT_RESOURCE,
                f"grid d={d}, L<={max_l} exceeds the dense guards "
                f"(d^L <= {MAX_DENSITY_DIM} for full-block traces)",
            )
    cases = []
    for d, max_l in ((2, d2_max_l), (3, d3_max_l)):
        for L in range(1, max_l + 1):
            for occupations in _occupancy_grid(L, d):
                for n in range(L + 1):
                    cases.append(("theorem", SectorConfig.finite(occupations), n))
    for d in (2, 3):
        for L in range(1, uniform_max_l + 1):
            for n in range(L + 1):
                cases.append(("uniform", (L, d), n))
    if not cases:
        click.echo("warning: empty verification grid, nothing checked", err=True)
        click.echo("verified 0 cases, 0 failures")
        return
    reports = []
    failures = []
    first = True
    for kind, target, n in cases:
        if kind == "theorem":
            perturb = inject_fault if first else 0.0
            report = _guarded(verify_theorem, target, n, tol, perturb=perturb)
            first = False
        else:
            L, d = target
            report = _guarded(verify_uniform_mixture, L, d, n, tol)
        reports.append(report)
        if not report.passed:
            failures.append(report)
            click.echo(f"MISMATCH {kind}: config={report.config} n={report.n} "
                       f"max_abs_dev={report.max_abs_dev:.3e}", err=True)
    if out is not None:
        payload = {
            "generator": f"permutent {__version__}",
            "tolerance": tol,
            "cases": [r.to_json_obj() for r in reports],
            "pass": not failures,
        }
        _write_text(out, json.dumps(payload, indent=2) + "\n")
    click.echo(f"verified {len(reports)} cases, {len(failures)} failures")
    if failures:
        sys.exit(EXIT_MISMATCH)


def _occupancy_grid(L: int, d: int):
    if d == 1:
        yield (L,)
        return
    for first in range(L + 1):
        for rest in _occupancy_grid(L - first, d - 1):
            yield (first,) + rest


@main.command("figures")
@click.option("--out-dir", type=click.Path(path_type=Path), required=True)
@click.option("--points", type=int, default=40, help="Exact points sampled per curve.")
@click.option("--max-l", type=int, default=240, help="Largest finite system in the d=3 chart.")
def cmd_figures(out_dir, points, max_l):
    """Write the two standard scaling charts as deterministic SVG files."""
    if points < 2:
        _fail(EXIT_VALIDATION, "--points must be >= 2")
    out_dir.mkdir(parents=True, exist_ok=True)

    sizes = [L for L in (30, 60, 120, 240) if L <= max_l]
    series: list[Series] = []
    for L in sizes:
        sector = SectorConfig.finite((L // 3,) * 3)
        curve_ns = _sample_range(1, L - 1, 160)
        series.append(
            Series(
                label=f"asymptotic L={L}",
                xs=[float(n) for n in curve_ns],
                ys=[asymptotic_entropy(sector, n) for n in curve_ns],
                style="line",
            )
        )
        point_ns = _sample_range(0, L, points)
        series.append(
            Series(
                label=f"exact L={L}",
                xs=[float(n) for n in point_ns],
                ys=[block_entropy(sector, n) for n in point_ns],
                style="points",
            )
        )
    inf_sector = SectorConfig.infinite((Fraction(1, 3),) * 3)
    inf_ns = _sample_range(1, max_l, points)
    series.append(
        Series(
            label="asymptotic L=inf",
            xs=[float(n) for n in inf_ns],
            ys=[asymptotic_entropy(inf_sector, n) for n in inf_ns],
            style="line",
        )
    )
    series.append(
        Series(
            label="exact L=inf",
            xs=[float(n) for n in inf_ns],
            ys=[block_entropy(inf_sector, n) for n in inf_ns],
            style="points",
        )
    )
    chart1 = render_chart(
        series,
        title="Block entropy at d=3, equal occupations",
        x_label="block size n",
        y_label="S (bits)",
    )
    (out_dir / "entropy_scaling_d3.svg").write_text(chart1)

    series2: list[Series] = []
    L = 120
    for d in (2, 3, 4, 5):
        sector = SectorConfig.finite((L // d,) * d)
        curve_ns = _sample_range(1, L - 1, 160)
        series2.append(
            Series(
                label=f"asymptotic d={d}",
                xs=[float(n) for n in curve_ns],
                ys=[asymptotic_entropy(sector, n) for n in curve_ns],
                style="line",
            )
        )
        point_ns = _sample_range(0, L, points)
        series2.append(
            Series(
                label=f"exact d={d}",
                xs=[float(n) for n in point_ns],
                ys=[block_entropy(sector, n) for n in point_ns],
                style="points",
            )
        )
    chart2 = render_chart(
        series2,
        title=f"Block entropy by local spin, L={L}, equal occupations",
        x_label="block size n",
        y_label="S (bits)",
    )
    (out_dir / "entropy_scaling_by_spin.svg").write_text(chart2)
    click.echo(f"wrote {out_dir / 'entropy_scaling_d3.svg'}", err=True)
    click.echo(f"wrote {out_dir / 'entropy_scaling_by_spin.svg'}", err=True)


def _sample_range(lo: int, hi: int, count: int) -> list[int]:
    if hi <= lo:
        return [lo]
    span = hi - lo
    steps = min(count - 1, span) if count > 1 else 1
    values = sorted({lo + round(i * span / steps) for i in range(steps + 1)})
    return values


if __name__ == "__main__":  # pragma: no cover
    main()
