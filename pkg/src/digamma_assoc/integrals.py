"""The associate integral family and its convergence rules.

    I^{+-}_{n,j,s}(b, mu) = int_0^inf x^n / ((x^2 + b^2)^j (e^(mu x) +- 1)^s) dx

Only the product t = b*mu matters:
``I(b, mu) = mu^(2j-n-1) I(b*mu, 1)``; the ``mu = 1`` member is the normal form.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

__all__ = [
    "MINUS",
    "PLUS",
    "DivergentIntegralError",
    "IntegralSpec",
    "converges",
    "divergence_reason",
    "scale_exponent",
]

MINUS = "-"
PLUS = "+"


class DivergentIntegralError(ValueError):
    """The requested family member does not converge."""


@dataclass(frozen=True)
class IntegralSpec:
    """One member of the family together with its parameters.

    A negative ``j`` means the factor ``(x^2 + b^2)^|j|`` sits in the numerator.
    """

    sign: str
    n: int
    j: int
    s: int
    b: float = 1.0
    mu: float = 1.0

    def __post_init__(self):
        if self.sign not in (MINUS, PLUS):
            raise ValueError(f"sign must be '-' or '+', got {self.sign!r}")
        for name in ("n", "j", "s"):
            v = getattr(self, name)
            if isinstance(v, bool) or int(v) != v:
                raise TypeError(f"{name} must be an integer, got {v!r}")
            object.__setattr__(self, name, int(v))
        if self.n < 0:
            raise ValueError(f"n must be >= 0, got {self.n}")
        if self.s < 1:
            raise ValueError(f"s must be >= 1, got {self.s}")
        b, mu = float(self.b), float(self.mu)
        if not (b > 0 and math.isfinite(b)):
            raise ValueError(f"b must be a finite positive real, got {self.b!r}")
        if not (mu > 0 and math.isfinite(mu)):
            raise ValueError(f"mu must be a finite positive real, got {self.mu!r}")
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "mu", mu)

    @property
    def t(self) -> float:
        """The only relevant combination b*mu."""
        return self.b * self.mu

    @property
    def indices(self) -> tuple[str, int, int, int]:
        return (self.sign, self.n, self.j, self.s)

    def normalized(self) -> "IntegralSpec":
        """The same member at b -> b*mu, mu -> 1."""
        return IntegralSpec(self.sign, self.n, self.j, self.s, self.t, 1.0)

    def with_params(self, b: float, mu: float) -> "IntegralSpec":
        return IntegralSpec(self.sign, self.n, self.j, self.s, b, mu)

    def __str__(self):
        return f"I{self.sign}_{{{self.n},{self.j},{self.s}}}(b={self.b:g}, mu={self.mu:g})"


def divergence_reason(sign: str, n: int, j: int, s: int) -> str | None:
    """Why the member diverges, or None when it converges (for b > 0).

    The minus kernel behaves like x^(n-s) at the origin.  The plus kernel is
    regular there, and exponential decay covers any polynomial growth.
    """
    if n < 0:
        return "requires n >= 0"
    if s < 1:
        return "requires s >= 1"
    if sign == MINUS and n < s:
        return "requires n >= s"
    return None


def converges(spec: IntegralSpec) -> bool:
    return divergence_reason(spec.sign, spec.n, spec.j, spec.s) is None


def scale_exponent(n: int, j: int) -> int:
    """Power of mu linking a member to its normal form."""
    return 2 * j - n - 1
