"""Symbolic closed forms in the normal-form variable t = b*mu.

A :class:`ClosedExpr` is a finite sum ``coeff * t^p * pi^q * atom`` with exact
rational ``coeff`` and atoms drawn from 1, log(t/2pi), psi^(i)(t/2pi + shift)
and zeta(k).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, NamedTuple, Union

from . import coefficients
from .coefficients import MAX_J, alpha
from .special_functions import hurwitz_zeta_int, polygamma, zeta_int

__all__ = [
    "One",
    "LogOverTwoPi",
    "Polygamma",
    "Zeta",
    "Term",
    "ClosedExpr",
    "closed_minus_1j1",
    "closed_plus_1j1",
    "closed_minus_n01",
    "closed_minus_n0s",
    "minus_n0s_value",
    "sum_rule_rhs",
]

TWO_PI = 2.0 * math.pi
HALF = Fraction(1, 2)


@dataclass(frozen=True, order=True)
class One:
    def __str__(self):
        return "1"


@dataclass(frozen=True, order=True)
class LogOverTwoPi:
    def __str__(self):
        return "log(t/2pi)"


@dataclass(frozen=True, order=True)
class Polygamma:
    order: int
    shift: Fraction = Fraction(0)

    def __post_init__(self):
        if self.order < 0:
            raise ValueError("polygamma order must be >= 0")
        if self.shift not in (0, HALF):
            raise ValueError("polygamma shift must be 0 or 1/2")
        object.__setattr__(self, "shift", Fraction(self.shift))

    def __str__(self):
        arg = "t/2pi" if self.shift == 0 else "t/2pi+1/2"
        return f"psi{self.order}({arg})"


@dataclass(frozen=True, order=True)
class Zeta:
    k: int

    def __post_init__(self):
        if self.k < 2:
            raise ValueError("zeta atom needs k >= 2")

    def __str__(self):
        return f"zeta({self.k})"


Atom = Union[One, LogOverTwoPi, Polygamma, Zeta]


class Term(NamedTuple):
    coeff: Fraction
    t_pow: int
    pi_pow: int
    atom: Atom


def _atom_key(atom):
    # total order across atom types for deterministic term listing
    rank = {One: 0, LogOverTwoPi: 1, Polygamma: 2, Zeta: 3}[type(atom)]
    if isinstance(atom, Polygamma):
        return (rank, atom.order, atom.shift)
    if isinstance(atom, Zeta):
        return (rank, atom.k, 0)
    return (rank, 0, 0)


class ClosedExpr:
    """Linear combination of atoms with exact coefficients; canonical on construction."""

    __slots__ = ("_terms",)

    def __init__(self, terms: Iterable[Term] = ()):
        acc: dict[tuple, Fraction] = {}
        for term in terms:
            coeff, t_pow, pi_pow, atom = term
            key = (int(t_pow), int(pi_pow), atom)
            acc[key] = acc.get(key, Fraction(0)) + Fraction(coeff)
        self._terms = {k: v for k, v in acc.items() if v != 0}

    @property
    def terms(self) -> list[Term]:
        keys = sorted(self._terms, key=lambda k: (_atom_key(k[2]), k[0], k[1]))
        return [Term(self._terms[k], k[0], k[1], k[2]) for k in keys]

    def coefficient(self, t_pow: int, pi_pow: int, atom: Atom) -> Fraction:
        return self._terms.get((t_pow, pi_pow, atom), Fraction(0))

    def atoms(self) -> set:
        return {k[2] for k in self._terms}

    def __len__(self):
        return len(self._terms)

    def __eq__(self, other):
        if not isinstance(other, ClosedExpr):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self):
        return hash(frozenset(self._terms.items()))

    def __add__(self, other: "ClosedExpr") -> "ClosedExpr":
        return ClosedExpr(self.terms + other.terms)

    def __sub__(self, other: "ClosedExpr") -> "ClosedExpr":
        return self + other.scale(-1)

    def scale(self, c, t_pow: int = 0, pi_pow: int = 0) -> "ClosedExpr":
        """Multiply by ``c * t^t_pow * pi^pi_pow``."""
        c = Fraction(c)
        return ClosedExpr(
            Term(c * term.coeff, term.t_pow + t_pow, term.pi_pow + pi_pow, term.atom)
            for term in self.terms
        )

    def diff_t(self) -> "ClosedExpr":
        """Exact derivative with respect to t."""
        out = []
        for c, p, q, atom in self.terms:
            if p:
                out.append(Term(c * p, p - 1, q, atom))
            if isinstance(atom, LogOverTwoPi):
                out.append(Term(c, p - 1, q, One()))
            elif isinstance(atom, Polygamma):
                out.append(Term(c / 2, p, q - 1, Polygamma(atom.order + 1, atom.shift)))
        return ClosedExpr(out)

    def _term_values(self, t: float) -> list[float]:
        if not t > 0:
            raise ValueError(f"t must be positive, got {t!r}")
        cache: dict[Atom, float] = {}
        x = t / TWO_PI
        values = []
        for c, p, q, atom in self.terms:
            v = cache.get(atom)
            if v is None:
                if isinstance(atom, One):
                    v = 1.0
                elif isinstance(atom, LogOverTwoPi):
                    v = math.log(x)
                elif isinstance(atom, Polygamma):
                    v = polygamma(atom.order, x + float(atom.shift))
                else:
                    v = zeta_int(atom.k)
                cache[atom] = v
            values.append(float(c) * t**p * math.pi**q * v)
        return values

    def evaluate(self, t: float) -> float:
        return math.fsum(self._term_values(t))

    def evaluate_with_error(self, t: float) -> tuple[float, float]:
        """Value plus a rounding bound proportional to the largest term."""
        vals = self._term_values(t)
        scale = max((abs(v) for v in vals), default=0.0)
        return math.fsum(vals), 16 * len(vals) * 2.0**-53 * scale

    def __str__(self):
        if not self._terms:
            return "0"
        parts = []
        for c, p, q, atom in self.terms:
            s = f"({c})"
            if p:
                s += f"*t^{p}"
            if q:
                s += f"*pi^{q}"
            if not isinstance(atom, One):
                s += f"*{atom}"
            parts.append(s)
        return " + ".join(parts)

    __repr__ = __str__


def _check_j(j: int) -> None:
    if not 1 <= j <= MAX_J:
        raise ValueError(f"j must lie in [1, {MAX_J}], got {j}")


@lru_cache(maxsize=None)
def closed_minus_1j1(j: int) -> ClosedExpr:
    """Normal form of I-_{1,j,1} as a function of t."""
    _check_j(j)
    if j == 1:
        return ClosedExpr(
            [
                Term(HALF, 0, 0, LogOverTwoPi()),
                Term(-HALF, -1, 1, One()),
                Term(-HALF, 0, 0, Polygamma(0)),
            ]
        )
    g = coefficients.gamma_row("minus", j)
    terms = [
        Term(-g[-1], -(2 * j - 1), 1, One()),
        Term(-g[0], -(2 * j - 2), 0, One()),
    ]
    for i in range(1, j):
        terms.append(Term(-((-1) ** i) * g[i], -(2 * j - i - 2), -i, Polygamma(i)))
    return ClosedExpr(terms)


@lru_cache(maxsize=None)
def closed_plus_1j1(j: int) -> ClosedExpr:
    """Normal form of I+_{1,j,1} as a function of t."""
    _check_j(j)
    if j == 1:
        return ClosedExpr(
            [Term(HALF, 0, 0, Polygamma(0, HALF)), Term(-HALF, 0, 0, LogOverTwoPi())]
        )
    g = coefficients.gamma_row("plus", j)
    terms = [Term(g[0], -(2 * j - 2), 0, One())]
    for i in range(1, j):
        terms.append(Term((-1) ** i * g[i], -(2 * j - i - 2), -i, Polygamma(i, HALF)))
    return ClosedExpr(terms)


def closed_minus_n01(n: int) -> ClosedExpr:
    """Normal form of I-_{n,0,1} = n! zeta(n+1)."""
    if n < 1:
        raise ValueError(f"I-_{{{n},0,1}} diverges at the origin: requires n >= 1")
    return ClosedExpr([Term(Fraction(math.factorial(n)), 0, 0, Zeta(n + 1))])


@lru_cache(maxsize=None)
def closed_minus_n0s(n: int, s: int) -> ClosedExpr:
    """Normal form of I-_{n,0,s} as a zeta combination.

    The l-th mu-derivative of the s = 1 member gives
    ``sum_k alpha(l+1, k) I_{n,0,k} = n! zeta(n-l+1)`` for l = 0..s-1,
    a lower-triangular system solved from k = 1 up.
    """
    if s < 1:
        raise ValueError(f"s must be >= 1, got {s}")
    if n < s:
        raise ValueError(f"I-_{{{n},0,{s}}} diverges at the origin: requires n >= s")
    if s == 1:
        return closed_minus_n01(n)
    l = s - 1
    rhs = ClosedExpr([Term(Fraction(math.factorial(n)), 0, 0, Zeta(n - l + 1))])
    for k in range(1, s):
        rhs = rhs - closed_minus_n0s(n, k).scale(alpha(s, k))
    return rhs.scale(1 / alpha(s, s))


@lru_cache(maxsize=None)
def _binomial_poly(s: int) -> tuple[Fraction, ...]:
    """Coefficients a_r of C(m-1, s-1) = sum_r a_r m^r."""
    poly = [Fraction(1)]
    for i in range(1, s):
        nxt = [Fraction(0)] * (len(poly) + 1)
        for r, a in enumerate(poly):
            nxt[r + 1] += a
            nxt[r] -= i * a
        poly = nxt
    f = math.factorial(s - 1)
    return tuple(a / f for a in poly)


@lru_cache(maxsize=None)
def minus_n0s_value(n: int, s: int) -> float:
    """Numerical value of ``closed_minus_n0s(n, s)`` without cancellation.

    The zeta combination alternates with coefficients up to ~1e24 at n = 24,
    so it is summed in the equivalent positive form
    ``n! sum_{m>=s} C(m-1, s-1) / m^(n+1)``: a direct head up to m < N and
    a Hurwitz zeta tail.
    """
    if s < 1 or n < s:
        raise ValueError(f"I-_{{{n},0,{s}}} diverges at the origin: requires n >= s")
    cut = max(s, 40)
    head = [math.comb(m - 1, s - 1) * float(m) ** (-(n + 1)) for m in range(s, cut)]
    tail = [
        float(a) * hurwitz_zeta_int(n + 1 - r, cut)
        for r, a in enumerate(_binomial_poly(s))
        if a
    ]
    return math.factorial(n) * math.fsum(head + tail)


def sum_rule_rhs(n: int, j: int) -> ClosedExpr:
    """Right side of ``sum_s alpha(n,s) I-_{n,j,s}`` in normal form, j in {1, 2}."""
    if n < 2:
        raise ValueError(f"sum rule needs n >= 2, got {n}")
    sgn = (-1) ** n
    if j == 1:
        # -(n-2)!/2 - pi (n-1)!/(2t) + (-1)^n/2 (t/2pi)^(n-1) psi^(n-1)(t/2pi)
        return ClosedExpr(
            [
                Term(-Fraction(math.factorial(n - 2), 2), 0, 0, One()),
                Term(-Fraction(math.factorial(n - 1), 2), -1, 1, One()),
                Term(Fraction(sgn, 2 * 2 ** (n - 1)), n - 1, -(n - 1), Polygamma(n - 1)),
            ]
        )
    if j == 2:
        return ClosedExpr(
            [
                Term(-Fraction(math.factorial(n - 1), 4), -3, 1, One()),
                Term(-Fraction(sgn * (n - 1), 4 * 2 ** (n - 1)), n - 3, -(n - 1), Polygamma(n - 1)),
                Term(-Fraction(sgn, 4 * 2**n), n - 2, -n, Polygamma(n)),
            ]
        )
    raise ValueError(f"sum rule right side available for j in {{1, 2}} only, got j={j}")
