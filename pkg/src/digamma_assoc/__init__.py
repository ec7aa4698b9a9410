"""Closed-form reduction and quadrature for x^n / ((x^2+b^2)^j (e^(mu x) -+ 1)^s) integrals."""

from .closed_form import ClosedExpr, closed_minus_1j1, closed_minus_n01, closed_minus_n0s, closed_plus_1j1
from .coefficients import alpha, gamma_minus, gamma_plus
from .integrals import MINUS, PLUS, DivergentIntegralError, IntegralSpec, converges
from .quadrature import QuadratureConfig, QuadratureError, integrate
from .reduction import EvalResult, LinearForm, evaluate, reduce
from .special_functions import digamma, polygamma, zeta_int

__version__ = "0.1.0"

__all__ = [
    "ClosedExpr",
    "DivergentIntegralError",
    "EvalResult",
    "IntegralSpec",
    "LinearForm",
    "MINUS",
    "PLUS",
    "QuadratureConfig",
    "QuadratureError",
    "alpha",
    "closed_minus_1j1",
    "closed_minus_n01",
    "closed_minus_n0s",
    "closed_plus_1j1",
    "converges",
    "digamma",
    "evaluate",
    "gamma_minus",
    "gamma_plus",
    "integrate",
    "polygamma",
    "reduce",
    "zeta_int",
]
