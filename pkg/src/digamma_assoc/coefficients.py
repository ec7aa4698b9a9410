"""Exact rational coefficient tables.

``alpha(l, k)`` are the positive integers expanding the l-th mu-derivative of
the Bose factor, ``(k-1)! S2(l, k)``.  ``gamma_minus`` and ``gamma_plus`` hold
the expansion coefficients of the normalized integrals

    I-_{1,j,1}(t) = -g(j,-1) pi/t^(2j-1) - g(j,0)/t^(2j-2)
                    - sum_i (-1)^i g(j,i)/(t^(2j-i-2) pi^i) psi^(i)(t/2pi)

    I+_{1,j,1}(t) = g(j,0)/t^(2j-2)
                    + sum_i (-1)^i g(j,i)/(t^(2j-i-2) pi^i) psi^(i)(t/2pi + 1/2)

generated by a recurrence in j from the j = 2 seeds.
"""

from __future__ import annotations

import math
import threading
from fractions import Fraction

__all__ = [
    "MAX_J",
    "alpha",
    "gamma_minus",
    "gamma_plus",
    "gamma_row",
    "stirling2",
]

MAX_J = 12

_lock = threading.Lock()
_alpha_memo: dict[tuple[int, int], Fraction] = {}


def alpha(l: int, k: int) -> Fraction:
    """Expansion coefficient alpha_{l,k}, 1 <= k <= l.

    Computed from ``(1/k) sum_i (-1)^(k-i) C(k,i) i^l`` with exact integers.

    >>> alpha(4, 3)
    Fraction(12, 1)
    """
    if l < 1 or k < 1 or k > l:
        raise ValueError(f"alpha index out of range: need 1 <= k <= l, got l={l}, k={k}")
    key = (l, k)
    hit = _alpha_memo.get(key)
    if hit is not None:
        return hit
    total = sum((-1) ** (k - i) * math.comb(k, i) * i**l for i in range(k + 1))
    value = Fraction(total, k)
    with _lock:
        _alpha_memo[key] = value
    return value


def stirling2(n: int, k: int) -> int:
    """Stirling number of the second kind by the triangle recurrence."""
    if n < 0 or k < 0:
        raise ValueError("indices must be non-negative")
    row = [1] + [0] * k
    for m in range(1, n + 1):
        new = [0] * (k + 1)
        for i in range(1, min(m, k) + 1):
            new[i] = i * row[i] + row[i - 1]
        row = new
    return row[k]


def _recur(prev: dict[int, Fraction], j: int, lo: int) -> dict[int, Fraction]:
    """Raise the table row from j-1 to j (j > 2)."""
    row: dict[int, Fraction] = {}
    if lo == -1:
        row[-1] = Fraction(2 * j - 3, 2 * j - 2) * prev[-1]
    row[0] = Fraction(j - 2, j - 1) * prev[0]
    up = Fraction(1, 4 * (j - 1))
    for i in range(1, j):
        v = Fraction(0)
        if i < j - 1:
            v += Fraction(2 * j - i - 4, 2 * j - 2) * prev[i]
        if i >= 2:
            v += up * prev[i - 1]
        row[i] = v
    return row


def _build(lo: int) -> dict[int, dict[int, Fraction]]:
    seed = {0: Fraction(1, 4), 1: Fraction(1, 8)}
    if lo == -1:
        seed[-1] = Fraction(1, 4)
    rows = {2: seed}
    for j in range(3, MAX_J + 1):
        rows[j] = _recur(rows[j - 1], j, lo)
    return rows


# eager construction: tables are immutable and concurrency-safe afterwards
_GAMMA = {"minus": _build(-1), "plus": _build(0)}


def gamma_row(variant: str, j: int) -> dict[int, Fraction]:
    """All coefficients of one row, keyed by i."""
    if variant not in _GAMMA:
        raise ValueError(f"variant must be 'minus' or 'plus', got {variant!r}")
    if not 2 <= j <= MAX_J:
        raise ValueError(f"j must lie in [2, {MAX_J}], got {j}")
    return dict(_GAMMA[variant][j])


def gamma_minus(j: int, i: int) -> Fraction:
    """Coefficient gamma^-_{j,i} for 2 <= j <= 12, -1 <= i <= j-1."""
    if not 2 <= j <= MAX_J or not -1 <= i <= j - 1:
        raise ValueError(f"gamma_minus index out of range: j={j}, i={i}")
    return _GAMMA["minus"][j][i]


def gamma_plus(j: int, i: int) -> Fraction:
    """Coefficient gamma^+_{j,i} for 2 <= j <= 12, 0 <= i <= j-1."""
    if not 2 <= j <= MAX_J or not 0 <= i <= j - 1:
        raise ValueError(f"gamma_plus index out of range: j={j}, i={i}")
    return _GAMMA["plus"][j][i]


def _self_check() -> None:
    for l in range(1, 11):
        for k in range(1, l + 1):
            assert alpha(l, k) == math.factorial(k - 1) * stirling2(l, k), (l, k)


_self_check()
