"""Exact and log-domain combinatorial kernels.

Everything downstream (spectrum weights, entropies, Gaussian moments) reduces
to binomial/multinomial coefficients evaluated over bounded integer
compositions.  Two numeric representations are kept side by side:

* exact arbitrary-precision integers / rationals, used for identity checks
  and moderate system sizes, and
* base-2 logarithms backed by a lazily grown table of log-factorials, used
  as the overflow-safe performance path for arbitrary sizes.

A weight of exactly zero is represented in the log domain by ``LOG2_ZERO``
(``-inf``).
"""

from __future__ import annotations

import math
import threading
from typing import Iterator, Sequence

import numpy as np

__all__ = [
    "LOG2_ZERO",
    "binom_exact",
    "log2_binom",
    "log2_factorial",
    "log2_factorial_table",
    "multinomial_exact",
    "multinomial_log2",
    "enumerate_compositions",
    "bounded_composition_steps",
    "composition_at",
    "composition_count",
]

LOG2_ZERO = float("-inf")

_table_lock = threading.Lock()
_log2_fact = np.zeros(1)  # _log2_fact[m] == log2(m!), grown on demand


def _ensure_table(n: int) -> np.ndarray:
    """Grow the log-factorial table to cover 0..n and return it."""
    global _log2_fact
    table = _log2_fact
    if n < table.shape[0]:
        return table
    with _table_lock:
        table = _log2_fact
        if n < table.shape[0]:
            return table
        old = table.shape[0]
        size = max(n + 1, 2 * old)
        # Accumulate in extended precision so the running sum stays accurate
        # even for tables of ~10^6 entries.
        ext = np.cumsum(np.log2(np.arange(old, size, dtype=np.longdouble)))
        ext += np.longdouble(table[old - 1])
        grown = np.empty(size)
        grown[:old] = table
        grown[old:] = ext.astype(np.float64)
        _log2_fact = grown
        return grown


def log2_factorial(n: int) -> float:
    """log2(n!) from the shared table."""
    if n < 0:
        raise ValueError("factorial argument must be nonnegative")
    return float(_ensure_table(n)[n])


def log2_factorial_table(n: int) -> np.ndarray:
    """Read-only view of the log-factorial table covering 0..n.

    Vectorised consumers index this directly instead of calling
    :func:`log2_factorial` per element.
    """
    table = _ensure_table(n)
    view = table[: n + 1].view()
    view.setflags(write=False)
    return view


def binom_exact(n: int, k: int) -> int:
    """Exact binomial coefficient; 0 when k lies outside [0, n]."""
    if n < 0:
        raise ValueError(f"binomial requires n >= 0, got n={n}")
    if k < 0 or k > n:
        return 0
    return math.comb(n, k)


def log2_binom(n: int, k: int) -> float:
    """log2 of the binomial coefficient; LOG2_ZERO when k outside [0, n]."""
    if n < 0:
        raise ValueError(f"binomial requires n >= 0, got n={n}")
    if k < 0 or k > n:
        return LOG2_ZERO
    t = _ensure_table(n)
    return float(t[n] - t[k] - t[n - k])


def multinomial_exact(n: int, parts: Sequence[int]) -> int:
    """Exact multinomial coefficient n! / prod(parts_i!)."""
    _check_parts(n, parts)
    out = 1
    acc = 0
    for k in parts:
        acc += k
        out *= math.comb(acc, k)
    return out


def multinomial_log2(n: int, parts: Sequence[int]) -> float:
    """log2 of the multinomial coefficient n! / prod(parts_i!)."""
    _check_parts(n, parts)
    t = _ensure_table(n)
    return float(t[n] - sum(t[k] for k in parts))


def _check_parts(n: int, parts: Sequence[int]) -> None:
    if n < 0:
        raise ValueError(f"multinomial requires n >= 0, got n={n}")
    if any(k < 0 for k in parts):
        raise ValueError("multinomial parts must be nonnegative")
    if sum(parts) != n:
        raise ValueError(f"multinomial parts sum to {sum(parts)}, expected {n}")


def bounded_composition_steps(
    total: int, bounds: Sequence[int], start: Sequence[int] | None = None
) -> Iterator[tuple[int, list[int]]]:
    """Walk bounded compositions in lexicographic order with change tracking.

    Yields ``(first_changed, parts)`` where ``parts`` is the *live* working
    list (callers must copy before storing) and all indices >= first_changed
    may have changed since the previous item.  This is what lets spectrum
    builders update running products of per-coordinate factors in O(1)
    amortised time instead of recomputing d factors per composition.

    ``start`` resumes the walk at a given composition (inclusive), so the
    stream can be split into contiguous chunks for data-parallel reduction;
    partial sums over disjoint chunks combine associatively.
    """
    if total < 0:
        raise ValueError("composition total must be nonnegative")
    if any(b < 0 for b in bounds):
        raise ValueError("composition bounds must be nonnegative")
    d = len(bounds)
    if d == 0:
        if total == 0:
            yield 0, []
        return
    # suffix[i] = bounds[i] + ... + bounds[d-1]
    suffix = [0] * (d + 1)
    for i in range(d - 1, -1, -1):
        suffix[i] = suffix[i + 1] + bounds[i]
    if total > suffix[0]:
        return
    if start is None:
        parts = [0] * d
        rem = total
        for i in range(d):  # lexicographic minimum pushes mass to the right
            parts[i] = max(0, rem - suffix[i + 1])
            rem -= parts[i]
    else:
        parts = list(start)
        if (
            len(parts) != d
            or sum(parts) != total
            or any(k < 0 or k > b for k, b in zip(parts, bounds))
        ):
            raise ValueError(f"start {tuple(start)} is not a composition of {total} within bounds")
    yield 0, parts
    while True:
        # rightmost position that can absorb one unit from its right tail
        tail = 0
        j = d - 2
        while j >= 0:
            tail += parts[j + 1]
            if tail > 0 and parts[j] < bounds[j]:
                break
            j -= 1
        if j < 0:
            return
        parts[j] += 1
        rem = tail - 1
        for i in range(j + 1, d):
            parts[i] = max(0, rem - suffix[i + 1])
            rem -= parts[i]
        yield j, parts


def enumerate_compositions(
    total: int, bounds: Sequence[int], start: Sequence[int] | None = None
) -> Iterator[tuple[int, ...]]:
    """All vectors k with sum(k) == total and 0 <= k_i <= bounds_i.

    Lexicographic order, each composition exactly once.  The stream is empty
    when sum(bounds) < total and holds the single all-zero vector for
    total == 0.  ``start`` resumes mid-stream (inclusive).
    """
    for _, parts in bounded_composition_steps(total, bounds, start):
        yield tuple(parts)


def composition_at(total: int, bounds: Sequence[int], rank: int) -> tuple[int, ...]:
    """The rank-th bounded composition in lexicographic order (0-based).

    Unranking in O(d * max(bounds)) counting steps; together with the
    ``start`` parameter of the enumerators this splits the composition
    stream into equal contiguous chunks without walking it.
    """
    if rank < 0:
        raise ValueError("rank must be nonnegative")
    d = len(bounds)
    if rank >= composition_count(total, bounds):
        raise ValueError(f"rank {rank} out of range")
    parts = []
    remaining = total
    for i in range(d):
        tail = bounds[i + 1 :]
        lo = max(0, remaining - sum(tail))
        for value in range(lo, min(bounds[i], remaining) + 1):
            below = composition_count(remaining - value, tail)
            if rank < below:
                parts.append(value)
                remaining -= value
                break
            rank -= below
    return tuple(parts)


def composition_count(total: int, bounds: Sequence[int]) -> int:
    """Number of bounded compositions, by inclusion-exclusion.

    Equals the coefficient of x^total in prod_i (1 + x + ... + x^bounds_i);
    deliberately computed by a different route than the enumerator so the two
    can check each other.
    """
    if total < 0:
        raise ValueError("composition total must be nonnegative")
    d = len(bounds)
    if d == 0:
        return 1 if total == 0 else 0
    if d <= 16:
        count = 0
        for mask in range(1 << d):
            shift = total
            sign = 1
            for i in range(d):
                if mask >> i & 1:
                    shift -= bounds[i] + 1
                    sign = -sign
            if shift >= 0:
                count += sign * math.comb(shift + d - 1, d - 1)
        return count
    # wide vectors: direct polynomial coefficient via prefix convolution
    coeffs = [1]
    for b in bounds:
        width = min(total, len(coeffs) - 1 + b)
        nxt = [0] * (width + 1)
        for i, c in enumerate(coeffs):
            for j in range(min(b, width - i) + 1):
                nxt[i + j] += c
        coeffs = nxt
    return coeffs[total] if total < len(coeffs) else 0
