"""Invariant suite behind ``digamma_assoc selftest``.

Every check compares two routes that share no code beyond the special
function kernels: exact tables against independent recurrences, and
engine values against the quadrature oracle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

from . import coefficients as co
from .closed_form import (
    closed_minus_1j1,
    closed_minus_n01,
    closed_minus_n0s,
    closed_plus_1j1,
    sum_rule_rhs,
)
from .integrals import MINUS, PLUS, IntegralSpec
from .quadrature import QuadratureConfig, integrate
from .reduction import Atom, evaluate, evaluate_form, plus_to_minus
from .special_functions import polygamma, zeta_int

__all__ = ["Check", "GROUPS", "run_group", "run_all"]

# rows l = 1..7 of the alpha table
ALPHA_ROWS = [
    [1],
    [1, 1],
    [1, 3, 2],
    [1, 7, 12, 6],
    [1, 15, 50, 60, 24],
    [1, 31, 180, 390, 360, 120],
    [1, 63, 602, 2100, 3360, 2520, 720],
]

TWO_PI = 2 * math.pi
_ORACLE = QuadratureConfig(eps=1e-300, rtol=1e-13)


@dataclass
class Check:
    name: str
    ok: bool
    detail: str = ""


def _close(name, got, want, tol, *, relative=False) -> Check:
    diff = abs(got - want)
    if relative:
        diff /= max(abs(want), 1e-300)
    return Check(name, diff <= tol, f"got {got!r} want {want!r} diff {diff:.2e} tol {tol:.0e}")


def Q(sign, n, j, s, b=1.0, mu=1.0) -> float:
    return integrate(IntegralSpec(sign, n, j, s, b, mu), _ORACLE)[0]


def E(sign, n, j, s, b=1.0, mu=1.0) -> float:
    return evaluate(IntegralSpec(sign, n, j, s, b, mu), 1e-13).value


def check_coefficients() -> list[Check]:
    out = []
    table_ok = all(
        co.alpha(l, k) == v for l, row in enumerate(ALPHA_ROWS, 1) for k, v in enumerate(row, 1)
    )
    out.append(Check("alpha table rows 1-7", table_ok))
    out.append(
        Check(
            "alpha = (k-1)! S2(l,k), l <= 10",
            all(
                co.alpha(l, k) == math.factorial(k - 1) * co.stirling2(l, k)
                for l in range(1, 11)
                for k in range(1, l + 1)
            ),
        )
    )
    out.append(
        Check(
            "gamma+ = gamma- for i >= 0",
            all(
                co.gamma_plus(j, i) == co.gamma_minus(j, i)
                for j in range(2, co.MAX_J + 1)
                for i in range(j)
            ),
        )
    )
    # differentiating in t raises j: I_{1,j+1,1} = -1/(2 j t) d/dt I_{1,j,1}
    for name, gen in (("minus", closed_minus_1j1), ("plus", closed_plus_1j1)):
        ok = True
        expr = gen(1)
        for j in range(1, co.MAX_J):
            expr = expr.diff_t().scale(Fraction(-1, 2 * j), -1)
            ok &= expr == gen(j + 1)
        out.append(Check(f"gamma {name} table = t-differentiation route", ok))
    return out


def check_special() -> list[Check]:
    out = [
        _close("psi(1) = -euler gamma", polygamma(0, 1.0), -0.5772156649015329, 1e-15),
        _close("psi'(1/2) = pi^2/2", polygamma(1, 0.5), math.pi**2 / 2, 1e-12, relative=True),
    ]
    for m in range(1, 9):
        want = (-1) ** (m + 1) * math.factorial(m) * zeta_int(m + 1)
        out.append(_close(f"psi^({m})(1)", polygamma(m, 1.0), want, 1e-12, relative=True))
    worst = 0.0
    for m in range(9):
        for x in (0.1, 0.5, 1.0, 2.0, 10.0, 100.0):
            lhs = polygamma(m, x + 1) - polygamma(m, x)
            rhs = (-1) ** m * math.factorial(m) / x ** (m + 1)
            worst = max(worst, abs(lhs - rhs) / abs(rhs))
    out.append(Check("polygamma recurrence", worst <= 1e-11, f"worst {worst:.2e}"))
    worst = 0.0
    for x in (0.1, 0.25, 0.3, 0.45):
        want = math.pi**2 / math.sin(math.pi * x) ** 2
        worst = max(worst, abs(polygamma(1, x) + polygamma(1, 1 - x) - want) / want)
    out.append(Check("trigamma reflection", worst <= 1e-11, f"worst {worst:.2e}"))
    return out


def check_closed() -> list[Check]:
    out = []
    worst = 0.0
    for j in range(1, 7):
        for t in (0.5, 1.0, math.pi, TWO_PI, 10.0):
            for sign, gen in ((MINUS, closed_minus_1j1), (PLUS, closed_plus_1j1)):
                worst = max(worst, abs(gen(j).evaluate(t) - Q(sign, 1, j, 1, t)))
    out.append(Check("closed I1j1 vs quadrature", worst <= 1e-8, f"worst {worst:.2e}"))
    for n in range(1, 7):
        out.append(_close(f"I-_{n},0,1 = n! zeta(n+1)", Q(MINUS, n, 0, 1), closed_minus_n01(n).evaluate(1), 1e-9))
    out.append(_close("I-_{4,0,2} = 24(zeta4 - zeta5)", Q(MINUS, 4, 0, 2), closed_minus_n0s(4, 2).evaluate(1), 1e-9))
    return out


def check_identities() -> list[Check]:
    out = []
    b = 1.0
    for mu in (1.0, TWO_PI):
        for j in (2, 3, 4):
            lhs = (2 - j) * E(MINUS, 1, j - 1, 1, b, mu) + (j - 1) * b**2 * E(MINUS, 1, j, 1, b, mu)
            rhs = mu / 2 * (E(MINUS, 2, j - 1, 1, b, mu) + E(MINUS, 2, j - 1, 2, b, mu))
            out.append(_close(f"n=1,2 mixed relation j={j} mu={mu:.4g}", lhs, rhs, 1e-8))
        for j in (2, 3):
            for s in (1, 2, 3):
                lhs = (3 - j) * E(MINUS, 3, j - 1, s, b, mu) + (j - 1) * b**2 * E(MINUS, 3, j, s, b, mu)
                rhs = mu * s / 2 * (E(MINUS, 4, j - 1, s, b, mu) + E(MINUS, 4, j - 1, s + 1, b, mu))
                out.append(_close(f"n=3,4 mixed relation j={j} s={s} mu={mu:.4g}", lhs, rhs, 1e-8))
        for j in (2, 3, 4):
            s = 1
            lhs = (
                -(j - 2) * (j - 3) * E(MINUS, 3, j - 1, s, b, mu)
                + (j - 2) * (j - 3) * b**2 * E(MINUS, 1, j - 1, s, b, mu)
                - (j - 1) * (j - 4) * b**4 * E(MINUS, 1, j, s, b, mu)
            )
            rhs = mu * s / 2 * (
                2 * b**2 * (E(MINUS, 2, j - 1, s, b, mu) + E(MINUS, 2, j - 1, s + 1, b, mu))
                + (j - 2) * (E(MINUS, 4, j - 1, s, b, mu) + E(MINUS, 4, j - 1, s + 1, b, mu))
            )
            out.append(_close(f"b^4 mixed relation j={j} mu={mu:.4g}", lhs, rhs, 1e-8))
            # the same relation as 2 b^2 (n=1,2 relation) + (j-2) (n=3,4 relation),
            # with I_{3,j} lowered onto I_{1,j-1} and I_{1,j}
            lhs13 = (2 - j) * E(MINUS, 1, j - 1, 1, b, mu) + (j - 1) * b**2 * E(MINUS, 1, j, 1, b, mu)
            lhs35 = (3 - j) * E(MINUS, 3, j - 1, 1, b, mu) + (j - 1) * b**2 * (
                E(MINUS, 1, j - 1, 1, b, mu) - b**2 * E(MINUS, 1, j, 1, b, mu)
            )
            combo = 2 * b**2 * lhs13 + (j - 2) * lhs35
            out.append(_close(f"b^4 relation = combination j={j} mu={mu:.4g}", lhs, combo, 1e-10))
        for j in (2, 3):
            lhs = E(MINUS, 3, j, 1, b, mu)
            rhs = (2 * E(MINUS, 1, j - 1, 1, b, mu) - mu * E(MINUS, 2, j - 1, 1, b, mu) - mu * E(MINUS, 2, j - 1, 2, b, mu)) / (2 * (j - 1))
            out.append(_close(f"n=3 s=1 lowering j={j} mu={mu:.4g}", lhs, rhs, 1e-8))
    for t in (math.pi, TWO_PI):
        for jj in (1, 2):
            for n in (2, 3, 4, 5):
                lhs = math.fsum(float(co.alpha(n, s)) * E(MINUS, n, jj, s, t) for s in range(1, n + 1))
                out.append(_close(f"sum rule n={n} j={jj} t={t:.4g}", lhs, sum_rule_rhs(n, jj).evaluate(t), 1e-8))
    return out


def check_oracle() -> list[Check]:
    out = []
    worst_rel = 0.0
    worst_scale = 0.0
    for mu in (1.0, TWO_PI):
        for n in range(9):
            for j in range(5):
                for s in range(1, 5):
                    if n < s:
                        continue
                    spec = IntegralSpec(MINUS, n, j, s, 1.0, mu)
                    ref = Q(MINUS, n, j, s, 1.0, mu)
                    v = evaluate(spec, 1e-10 * abs(ref)).value
                    worst_rel = max(worst_rel, abs(v - ref) / abs(ref))
                    vn = evaluate(spec.normalized(), 1e-13 * abs(ref)).value * mu ** (2 * j - n - 1)
                    worst_scale = max(worst_scale, abs(v - vn) / abs(v))
    out.append(Check("engine vs quadrature, minus grid", worst_rel <= 1e-7, f"worst {worst_rel:.2e}"))
    out.append(Check("scaling law", worst_scale <= 1e-10, f"worst {worst_scale:.2e}"))
    worst = 0.0
    for j in range(1, 7):
        for t in (1.0, TWO_PI):
            via_minus = evaluate_form(plus_to_minus(Atom(PLUS, 1, j, 1)), t, 1.0, 1e-13).value
            worst = max(worst, abs(via_minus - closed_plus_1j1(j).evaluate(t)))
    out.append(Check("plus via minus split = plus closed form", worst <= 1e-9, f"worst {worst:.2e}"))
    return out


GROUPS: dict[str, Callable[[], list[Check]]] = {
    "coefficients": check_coefficients,
    "special": check_special,
    "closed": check_closed,
    "identities": check_identities,
    "oracle": check_oracle,
}


def run_group(name: str) -> list[Check]:
    if name not in GROUPS:
        raise KeyError(f"unknown check group {name!r}; choose from {', '.join(GROUPS)}")
    return GROUPS[name]()


def run_all(groups=None) -> dict[str, list[Check]]:
    return {g: run_group(g) for g in (groups or GROUPS)}
