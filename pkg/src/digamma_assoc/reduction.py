"""Exact rewriting of associate integrals onto closed-form and residual leaves.

Rewrites act on index tuples with exact rational coefficients and symbolic
powers of b and mu.  Floating point enters only in :func:`evaluate`.

Strategy, applied until no rule fires:

1. negative j: binomial expansion onto j = 0 members
2. j = 0 (minus): zeta leaf
3. n >= s + 2: n-lowering by partial fractions
4. s >= 2 with n in {s, s+1}: s-lowering by partial integration
5. s = 1: n = 1 is a polygamma leaf, n = 2 a residual leaf (quadrature)

Plus-sign members with s = 1 are first split into minus members at mu and
2 mu.  Plus members with s >= 2 have no exact route and go to quadrature.
"""

from __future__ import annotations

import logging
import math
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Iterator, NamedTuple

from .closed_form import closed_minus_1j1, closed_plus_1j1, minus_n0s_value
from .coefficients import MAX_J
from .integrals import (
    MINUS,
    PLUS,
    DivergentIntegralError,
    IntegralSpec,
    divergence_reason,
    scale_exponent,
)
from .quadrature import QuadratureConfig, QuadratureError, integrate

__all__ = [
    "Atom",
    "LinearForm",
    "EvalResult",
    "ReductionError",
    "MAX_S",
    "MAX_N",
    "within_caps",
    "leaf_kind",
    "lower_n",
    "expand_negative_j",
    "lower_s_typeA",
    "lower_s_typeB",
    "plus_to_minus",
    "reduce",
    "evaluate",
    "evaluate_form",
]

log = logging.getLogger(__name__)

MAX_S = 8
MAX_N = 24
_MAX_STEPS = 200_000

# floor on the relative tolerance handed to residual quadratures
_RESIDUAL_RTOL = 1e-13


class ReductionError(RuntimeError):
    """Rule precondition violated or rewrite failed to terminate."""


@dataclass(frozen=True, order=True)
class Atom:
    """Index tuple of a family member evaluated at (b, mu_scale * mu)."""

    sign: str
    n: int
    j: int
    s: int
    mu_scale: int = 1

    @classmethod
    def of(cls, spec) -> "Atom":
        if isinstance(spec, Atom):
            return spec
        return cls(spec.sign, spec.n, spec.j, spec.s)

    def at(self, b: float, mu: float) -> IntegralSpec:
        return IntegralSpec(self.sign, self.n, self.j, self.s, b, self.mu_scale * mu)

    def __str__(self):
        scale = "" if self.mu_scale == 1 else f"; {self.mu_scale}mu"
        return f"I{self.sign}_{{{self.n},{self.j},{self.s}}}{scale}"


class FormTerm(NamedTuple):
    coeff: Fraction
    b_pow: int
    mu_pow: int
    atom: Atom


class LinearForm:
    """Sum of ``coeff * b^b_pow * mu^mu_pow * atom``; identical atoms merge."""

    __slots__ = ("_terms",)

    def __init__(self, terms=()):
        self._terms: dict[tuple[Atom, int, int], Fraction] = {}
        for t in terms:
            self._add(*t)

    def _add(self, coeff, b_pow, mu_pow, atom):
        key = (atom, b_pow, mu_pow)
        v = self._terms.get(key, Fraction(0)) + Fraction(coeff)
        if v:
            self._terms[key] = v
        else:
            self._terms.pop(key, None)

    @classmethod
    def single(cls, atom: Atom) -> "LinearForm":
        return cls([(Fraction(1), 0, 0, atom)])

    def __iter__(self) -> Iterator[FormTerm]:
        for atom, bp, mp in sorted(self._terms):
            yield FormTerm(self._terms[(atom, bp, mp)], bp, mp, atom)

    def __len__(self):
        return len(self._terms)

    def __eq__(self, other):
        if not isinstance(other, LinearForm):
            return NotImplemented
        return self._terms == other._terms

    def atoms(self) -> set[Atom]:
        return {k[0] for k in self._terms}

    def count(self, kind: str) -> int:
        return sum(1 for a in self.atoms() if leaf_kind(a) == kind)

    def numeric_weights(self, b: float, mu: float) -> list[tuple[float, Atom]]:
        return [(float(c) * b**bp * mu**mp, a) for c, bp, mp, a in self]

    def __str__(self):
        if not self._terms:
            return "0"
        parts = []
        for c, bp, mp, a in self:
            s = f"({c})"
            if bp:
                s += f"*b^{bp}"
            if mp:
                s += f"*mu^{mp}"
            parts.append(f"{s}*{a}")
        return " + ".join(parts)

    __repr__ = __str__


def _form(atom: Atom, rows) -> LinearForm:
    """Build a form from rule rows written for mu; rescale to mu_scale * mu."""
    k = atom.mu_scale
    out = LinearForm()
    for coeff, bp, mp, (sign, n, j, s) in rows:
        out._add(Fraction(coeff) * Fraction(k) ** mp, bp, mp, Atom(sign, n, j, s, k))
    return out


def lower_n(spec) -> LinearForm:
    """I_{n,j,s} = I_{n-2,j-1,s} - b^2 I_{n-2,j,s}, for n >= s+2 and j >= 1."""
    a = Atom.of(spec)
    if a.n < a.s + 2 or a.j < 1:
        raise ReductionError(f"n-lowering needs n >= s+2 and j >= 1, got {a}")
    return _form(
        a,
        [
            (1, 0, 0, (a.sign, a.n - 2, a.j - 1, a.s)),
            (-1, 2, 0, (a.sign, a.n - 2, a.j, a.s)),
        ],
    )


def expand_negative_j(spec) -> LinearForm:
    """Binomial expansion of a numerator (x^2+b^2)^|j| onto j = 0 members."""
    a = Atom.of(spec)
    if a.j > 0:
        raise ReductionError(f"binomial expansion needs j <= 0, got {a}")
    reason = divergence_reason(a.sign, a.n, a.j, a.s)
    if reason:
        raise DivergentIntegralError(f"divergent: {reason}")
    p = -a.j
    return _form(
        a,
        [(math.comb(p, l), 2 * (p - l), 0, (a.sign, a.n + 2 * l, 0, a.s)) for l in range(p + 1)],
    )


def lower_s_typeA(m: int, J: int, mu_scale: int = 1) -> LinearForm:
    """Rewrite I-_{m,J,m} onto s = m-1 members (m >= 2, J >= 1)."""
    if m < 2 or J < 1:
        raise ReductionError(f"type-A s-lowering needs m >= 2 and J >= 1, got m={m}, J={J}")
    d = m - 1
    return _form(
        Atom(MINUS, m, J, m, mu_scale),
        [
            (Fraction(-2 * J, d), 0, -1, (MINUS, m + 1, J + 1, m - 1)),
            (-1, 0, 0, (MINUS, m, J, m - 1)),
            (Fraction(m, d), 0, -1, (MINUS, m - 1, J, m - 1)),
        ],
    )


def lower_s_typeB(m: int, J: int, mu_scale: int = 1) -> LinearForm:
    """Rewrite I-_{m,J,m-1} onto s = m-2 members (m >= 3, J >= 1)."""
    if m < 3 or J < 1:
        raise ReductionError(f"type-B s-lowering needs m >= 3 and J >= 1, got m={m}, J={J}")
    d = m - 2
    return _form(
        Atom(MINUS, m, J, m - 1, mu_scale),
        [
            (Fraction(-2 * J, d), 0, -1, (MINUS, m + 1, J + 1, m - 2)),
            (-1, 0, 0, (MINUS, m, J, m - 2)),
            (Fraction(m, d), 0, -1, (MINUS, m - 1, J, m - 2)),
        ],
    )


def plus_to_minus(spec) -> LinearForm:
    """I+_{n,j,1}(b, mu) = I-_{n,j,1}(b, mu) - 2 I-_{n,j,1}(b, 2mu)."""
    a = Atom.of(spec)
    if a.sign != PLUS or a.s != 1:
        raise ReductionError(f"plus-to-minus split needs a plus member with s = 1, got {a}")
    if a.n < 1:
        raise ReductionError(f"plus-to-minus split at n = 0 yields divergent minus parts: {a}")
    k = a.mu_scale
    return LinearForm(
        [
            (Fraction(1), 0, 0, Atom(MINUS, a.n, a.j, 1, k)),
            (Fraction(-2), 0, 0, Atom(MINUS, a.n, a.j, 1, 2 * k)),
        ]
    )


def leaf_kind(a: Atom) -> str | None:
    """Terminal category of an atom, or None if a rule still applies.

    closed: polygamma leaf I_{1,j,1}; zeta: I-_{n,0,s}; residual: I-_{2,j,1};
    quadrature: no exact route.
    """
    if a.sign == MINUS:
        if a.j == 0:
            return "zeta"
        if a.j > 0 and a.s == 1 and a.n == 1:
            return "closed"
        if a.j > 0 and a.s == 1 and a.n == 2:
            return "residual"
        return None
    if a.s >= 2:
        return "quadrature"
    if a.j < 0:
        return None
    if a.n == 0:
        return "quadrature"
    if a.n == 1 and a.j >= 1:
        return "closed"
    return None


def _rewrite(a: Atom) -> LinearForm:
    if a.j < 0:
        return expand_negative_j(a)
    if a.sign == PLUS:
        return plus_to_minus(a)
    if a.n >= a.s + 2:
        return lower_n(a)
    if a.n == a.s:
        return lower_s_typeA(a.n, a.j, a.mu_scale)
    if a.n == a.s + 1:
        return lower_s_typeB(a.n, a.j, a.mu_scale)
    raise DivergentIntegralError(f"divergent member reached during reduction: {a}")


def within_caps(spec) -> bool:
    """Whether the exact route stays inside the supported index ranges.

    s-lowering raises j by at most one per step, so j + s - 1 must stay
    within the coefficient tables.
    """
    a = Atom.of(spec)
    if a.n > MAX_N or a.s > MAX_S or a.j < -MAX_J:
        return False
    if a.sign == PLUS and a.s >= 2:
        return True  # goes to quadrature as a whole
    return a.j + a.s - 1 <= MAX_J


def reduce(spec) -> LinearForm:
    """Rewrite to a fixed point over terminal atoms."""
    a = Atom.of(spec)
    reason = divergence_reason(a.sign, a.n, a.j, a.s)
    if reason:
        raise DivergentIntegralError(f"divergent: {reason}")
    form = LinearForm.single(a)
    for _ in range(_MAX_STEPS):
        pending = [x for x in form.atoms() if leaf_kind(x) is None]
        if not pending:
            return form
        # largest (s, n) first so that later siblings merge before expanding
        target = max(pending, key=lambda x: (x.j < 0, x.s, x.n, x.j, x.mu_scale))
        replacement = _rewrite(target)
        new = LinearForm()
        for c, bp, mp, atom in form:
            if atom == target:
                for c2, bp2, mp2, atom2 in replacement:
                    new._add(c * c2, bp + bp2, mp + mp2, atom2)
            else:
                new._add(c, bp, mp, atom)
        form = new
    raise ReductionError(f"reduction of {a} did not terminate within {_MAX_STEPS} steps")


@dataclass
class EvalResult:
    """Engine value with an absolute error bound and leaf accounting."""

    value: float
    abs_error: float
    leaf_report: dict[str, int] = field(default_factory=dict)
    fallback: bool = False
    warnings: list[str] = field(default_factory=list)

    @property
    def closed_leaves(self) -> int:
        return self.leaf_report.get("closed", 0) + self.leaf_report.get("zeta", 0)

    @property
    def quadrature_leaves(self) -> int:
        return self.leaf_report.get("residual", 0) + self.leaf_report.get("quadrature", 0)


@lru_cache(maxsize=4096)
def _normalized_quad(sign: str, n: int, j: int, s: int, t: float, eps: float) -> tuple[float, float]:
    cfg = QuadratureConfig(eps=eps, rtol=_RESIDUAL_RTOL)
    return integrate(IntegralSpec(sign, n, j, s, t, 1.0), cfg)


def _quad_leaf(a: Atom, b: float, mu: float, eps: float) -> tuple[float, float]:
    """Quadrature of a leaf in normal form, rescaled; eps is absolute on the leaf."""
    m = a.mu_scale * mu
    scale = m ** (2 * a.j - a.n - 1)
    # round the normalized tolerance to two digits so that the memo is shared
    eps_norm = float(f"{eps / scale:.1e}")
    try:
        # converge to the relative floor first: the result then depends on
        # t alone, never on how (b, mu) factor it
        v, e = _normalized_quad(a.sign, a.n, a.j, a.s, b * m, 1e-300)
    except QuadratureError:
        v, e = _normalized_quad(a.sign, a.n, a.j, a.s, b * m, eps_norm)
    return scale * v, scale * e


def _closed_leaf(a: Atom, b: float, mu: float) -> tuple[float, float]:
    m = a.mu_scale * mu
    if a.j == 0:
        v = minus_n0s_value(a.n, a.s) * m ** (-(a.n + 1))
        return v, 4 * 2.0**-53 * abs(v)
    expr = closed_minus_1j1(a.j) if a.sign == MINUS else closed_plus_1j1(a.j)
    v, e = expr.evaluate_with_error(b * m)
    scale = m ** (2 * a.j - 2)
    return scale * v, scale * e


def evaluate_form(form: LinearForm, b: float, mu: float, eps: float = 1e-10) -> EvalResult:
    """Evaluate a reduced form at (b, mu).

    Each quadrature leaf gets an equal share of ``eps`` divided by its weight.
    A closed leaf whose rounding bound exceeds either that share or an equal
    share of ``1e-13 |value|`` is recomputed by quadrature instead; the
    relative budget keeps the choice independent of how (b, mu) factor t.
    """
    weights = form.numeric_weights(b, mu)
    report: Counter = Counter()
    warnings: list[str] = []
    nleaves = max(len(weights), 1)
    leaves = []
    for w, a in weights:
        kind = leaf_kind(a)
        if kind in ("closed", "zeta"):
            v, e = _closed_leaf(a, b, mu)
        elif kind in ("residual", "quadrature"):
            v, e = _quad_leaf(a, b, mu, eps / (nleaves * max(abs(w), 1e-300)))
        else:
            raise ReductionError(f"non-terminal atom {a} in evaluated form")
        leaves.append([w, a, kind, v, e])
    rel_budget = _RESIDUAL_RTOL * abs(math.fsum(w * v for w, _, _, v, _ in leaves)) / nleaves
    for leaf in leaves:
        w, a, kind, v, e = leaf
        share = eps / (nleaves * max(abs(w), 1e-300))
        if kind == "closed" and (e > share or abs(w) * e > rel_budget):
            warnings.append(f"{a}: closed form ill-conditioned at t={b * a.mu_scale * mu:g}, using quadrature")
            leaf[3], leaf[4] = _quad_leaf(a, b, mu, share)
            leaf[2] = "quadrature"
    parts = [w * v for w, _, _, v, _ in leaves]
    err = math.fsum(abs(w) * e for w, _, _, _, e in leaves)
    for leaf in leaves:
        report[leaf[2]] += 1
    value = math.fsum(parts)
    err += 4 * len(parts) * 2.0**-53 * max((abs(p) for p in parts), default=0.0)
    return EvalResult(value, err, dict(report), False, warnings)


def evaluate(spec: IntegralSpec, eps: float = 1e-10) -> EvalResult:
    """Evaluate via the exact reduction, with quadrature for residual leaves.

    The reduced form is evaluated at the normal form t = b mu, so the result
    obeys the scaling law up to one rounding.  Members outside the engine
    caps, and plus members with s >= 2, are integrated whole by quadrature
    and flagged as a fallback.
    """
    reason = divergence_reason(*spec.indices)
    if reason:
        raise DivergentIntegralError(f"divergent: {reason}")
    if not eps > 0:
        raise ValueError("eps must be positive")
    a = Atom.of(spec)
    if not within_caps(a) or (a.sign == PLUS and a.s >= 2):
        msg = f"{a}: no exact reduction route, integrated by quadrature"
        if not within_caps(a):
            msg = f"{a}: outside engine caps (s <= {MAX_S}, n <= {MAX_N}, j + s - 1 <= {MAX_J}), integrated by quadrature"
        log.info(msg)
        v, e = _quad_leaf(a, spec.b, spec.mu, eps)
        return EvalResult(v, e, {"quadrature": 1}, True, [msg])
    # evaluate in normal form (b -> b mu, mu -> 1), then scale back
    scale = spec.mu ** scale_exponent(a.n, a.j)
    r = evaluate_form(reduce(a), spec.t, 1.0, eps / scale)
    r.value *= scale
    r.abs_error *= scale
    return r
