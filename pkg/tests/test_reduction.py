import math
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from digamma_assoc.closed_form import closed_plus_1j1
from digamma_assoc.integrals import MINUS, PLUS, DivergentIntegralError, IntegralSpec, converges
from digamma_assoc.quadrature import QuadratureConfig, integrate
from digamma_assoc.reduction import (
    MAX_N,
    MAX_S,
    Atom,
    LinearForm,
    ReductionError,
    evaluate,
    evaluate_form,
    expand_negative_j,
    leaf_kind,
    lower_n,
    lower_s_typeA,
    lower_s_typeB,
    plus_to_minus,
    reduce,
    within_caps,
)

from conftest import TWO_PI

ORACLE = QuadratureConfig(eps=1e-300, rtol=1e-13)
M, P = MINUS, PLUS


def form(*rows):
    return LinearForm([(Fraction(c), bp, mp, Atom(*a)) for c, bp, mp, a in rows])


def quad(spec):
    return integrate(spec, ORACLE)[0]


def value_at(f, b, mu):
    """Evaluate a form leaf by leaf with the oracle; independent of evaluate_form."""
    return math.fsum(w * quad(a.at(b, mu)) for w, a in f.numeric_weights(b, mu))


# mpmath values, frozen
FROZEN = {
    (M, 2, 1, 1, 1.0, 1.0): 0.58204119920985101,
    (M, 2, 1, 2, 1.0, 1.0): 0.59463896181025175,
    (M, 4, 2, 2, 1.0, 1.0): 0.12297449254644496,
    (M, 5, 0, 3, 1.0, 1.0): 0.37356553499560152,
    (M, 3, 2, 3, 1.0, TWO_PI): 0.00038055843377492725,
    (M, 8, 4, 4, 1.0, TWO_PI): 1.4908243377243298e-8,
    (P, 3, 2, 1, 1.0, 1.0): 0.12235916003800705,
    (P, 2, 3, 2, 1.0, TWO_PI): 0.00050394529465411227,
    (M, 1, -1, 1, 1.0, 1.0): 8.1388734691150556,
    (M, 2, -2, 2, 1.0, 1.0): 9.5402622124490863,
    (M, 1, 6, 1, 2.0, 0.5): 0.00033214595548708585,
    (M, 2, 3, 1, 0.5, 3.0): 0.76289886395082281,
    (P, 5, -1, 4, 1.0, TWO_PI): 2.2737679138002565e-7,
}


@pytest.mark.parametrize("key", list(FROZEN), ids=str)
def test_engine_against_frozen_values(key):
    r = evaluate(IntegralSpec(*key), 1e-13)
    assert r.value == pytest.approx(FROZEN[key], rel=1e-8)
    assert abs(r.value - FROZEN[key]) <= r.abs_error + 1e-15 * abs(FROZEN[key])


@pytest.mark.parametrize(
    "sign, n, j, s, want",
    [(M, 1, 1, 1, True), (M, 1, 1, 2, False), (P, 0, 0, 1, True), (P, 0, 3, 5, True), (M, 0, -2, 1, False)],
)
def test_convergence_predicate(sign, n, j, s, want):
    assert converges(IntegralSpec(sign, n, j, s)) is want


def test_lower_n_examples():
    assert lower_n(Atom(M, 3, 2, 1)) == form((1, 0, 0, (M, 1, 1, 1)), (-1, 2, 0, (M, 1, 2, 1)))
    assert lower_n(Atom(M, 4, 1, 2)) == form((1, 0, 0, (M, 2, 0, 2)), (-1, 2, 0, (M, 2, 1, 2)))
    with pytest.raises(ReductionError):
        lower_n(Atom(M, 3, 1, 2))


def test_expand_negative_j_examples():
    assert expand_negative_j(Atom(M, 1, -1, 1)) == form((1, 2, 0, (M, 1, 0, 1)), (1, 0, 0, (M, 3, 0, 1)))
    assert expand_negative_j(Atom(M, 2, -2, 2)) == form(
        (1, 4, 0, (M, 2, 0, 2)), (2, 2, 0, (M, 4, 0, 2)), (1, 0, 0, (M, 6, 0, 2))
    )
    assert expand_negative_j(Atom(M, 3, 0, 1)) == LinearForm.single(Atom(M, 3, 0, 1))
    with pytest.raises(DivergentIntegralError):
        expand_negative_j(Atom(M, 1, -1, 2))


@pytest.mark.parametrize("b", [0.5, 1.0, 2.0])
def test_negative_j_boundary_terms(b):
    # both ends of the binomial sum matter: b^(2|j|) at l = 0, b^0 at l = |j|
    for a in (Atom(M, 1, -3, 1), Atom(P, 2, -2, 3)):
        f = expand_negative_j(a)
        assert value_at(f, b, 1.0) == pytest.approx(quad(a.at(b, 1.0)), rel=1e-11)


def test_typeA_examples():
    assert lower_s_typeA(2, 1) == form(
        (-2, 0, -1, (M, 3, 2, 1)), (-1, 0, 0, (M, 2, 1, 1)), (2, 0, -1, (M, 1, 1, 1))
    )
    f = lower_s_typeA(3, 1)
    assert {a.s for a in f.atoms()} == {2}
    with pytest.raises(ReductionError):
        lower_s_typeA(2, 0)


def test_typeB_examples():
    assert lower_s_typeB(3, 1) == form(
        (-2, 0, -1, (M, 4, 2, 1)), (-1, 0, 0, (M, 3, 1, 1)), (3, 0, -1, (M, 2, 1, 1))
    )
    f = lower_s_typeB(3, 2)
    assert f.atoms() == {Atom(M, 4, 3, 1), Atom(M, 3, 2, 1), Atom(M, 2, 2, 1)}
    with pytest.raises(ReductionError):
        lower_s_typeB(2, 1)


@pytest.mark.parametrize("mu", [1.0, TWO_PI])
@pytest.mark.parametrize("m, J", [(2, 1), (3, 1), (3, 2), (4, 3)])
def test_s_lowering_rules_numerically(m, J, mu):
    for a, f in ((Atom(M, m, J, m), lower_s_typeA(m, J)), (Atom(M, m, J, m - 1), lower_s_typeB(m, J) if m >= 3 else None)):
        if f is None:
            continue
        assert all(converges(x.at(1.0, mu)) for x in f.atoms())
        assert value_at(f, 1.0, mu) == pytest.approx(quad(a.at(1.0, mu)), rel=1e-9)


def test_plus_to_minus_examples():
    f = plus_to_minus(Atom(P, 1, 1, 1))
    assert f == LinearForm([(Fraction(1), 0, 0, Atom(M, 1, 1, 1)), (Fraction(-2), 0, 0, Atom(M, 1, 1, 1, 2))])
    r = evaluate_form(f, 1.0, 1.0, 1e-13)
    assert r.value == pytest.approx(closed_plus_1j1(1).evaluate(1.0), abs=1e-10)
    assert len(plus_to_minus(Atom(P, 2, 3, 1))) == 2
    with pytest.raises(ReductionError):
        plus_to_minus(Atom(P, 1, 1, 2))


def test_rules_at_doubled_mu_rescale_coefficients():
    f = lower_s_typeA(2, 1, mu_scale=2)
    assert {a.mu_scale for a in f.atoms()} == {2}
    assert Fraction(-1, 1) in {t.coeff for t in f}
    assert value_at(f, 1.0, 1.5) == pytest.approx(quad(IntegralSpec(M, 2, 1, 2, 1.0, 3.0)), rel=1e-9)


def test_reduce_terminal_examples():
    assert reduce(IntegralSpec(M, 1, 3, 1)) == LinearForm.single(Atom(M, 1, 3, 1))
    f = reduce(IntegralSpec(M, 4, 2, 2))
    kinds = {leaf_kind(a) for a in f.atoms()}
    assert kinds <= {"closed", "residual", "zeta"} and "residual" in kinds
    assert all(a.n == 2 and a.s == 1 for a in f.atoms() if leaf_kind(a) == "residual")
    z = reduce(IntegralSpec(M, 5, 0, 3))
    assert {leaf_kind(a) for a in z.atoms()} == {"zeta"}


def test_reduction_is_exact_rational():
    f = reduce(IntegralSpec(M, 8, 4, 4))
    assert all(isinstance(t.coeff, Fraction) for t in f)


@settings(max_examples=80, deadline=None)
@given(sign=st.sampled_from("-+"), n=st.integers(0, MAX_N), j=st.integers(-4, 8), s=st.integers(1, MAX_S))
def test_reduce_terminates_on_terminal_atoms(sign, n, j, s):
    spec = IntegralSpec(sign, n, j, s)
    if not converges(spec):
        with pytest.raises(DivergentIntegralError):
            reduce(spec)
        return
    if not within_caps(spec) or (sign == P and s >= 2):
        return
    f = reduce(spec)
    assert all(leaf_kind(a) is not None for a in f.atoms())
    # residual atoms are exactly I-_{2,j,1}
    assert all(a.sign == M and a.n == 2 and a.s == 1 for a in f.atoms() if leaf_kind(a) == "residual")


def test_divergent_inputs():
    with pytest.raises(DivergentIntegralError, match="requires n >= s"):
        evaluate(IntegralSpec(M, 1, 1, 2))
    with pytest.raises(ValueError):
        evaluate(IntegralSpec(M, 1, 1, 1), 0.0)


def test_evaluate_examples():
    r = evaluate(IntegralSpec(M, 1, 1, 1, 1.0, TWO_PI))
    assert abs(r.value - 0.038607832450766) <= 1e-10
    assert r.leaf_report == {"closed": 1}
    r = evaluate(IntegralSpec(M, 2, 1, 1, 1.0, 1.0))
    assert r.leaf_report == {"residual": 1}
    assert r.value == pytest.approx(0.582041199209851, abs=1e-10)
    r = evaluate(IntegralSpec(P, 1, 2, 1, 1.0, TWO_PI))
    assert r.value == pytest.approx(closed_plus_1j1(2).evaluate(TWO_PI) * TWO_PI**2, abs=1e-9)


def test_plus_with_s2_goes_to_quadrature():
    r = evaluate(IntegralSpec(P, 2, 3, 2, 1.0, TWO_PI))
    assert r.fallback and r.leaf_report == {"quadrature": 1} and r.warnings


def test_caps_fall_back_with_warning():
    spec = IntegralSpec(M, 12, 1, 10, 1.0, 1.0)
    assert not within_caps(spec)
    r = evaluate(spec, 1e-12)
    assert r.fallback and "caps" in r.warnings[0]
    assert r.value == pytest.approx(quad(spec), rel=1e-9)
    assert not within_caps(IntegralSpec(M, 25, 1, 1))
    assert not within_caps(IntegralSpec(M, 1, 13, 1))
    assert within_caps(IntegralSpec(M, 24, 5, 8))


def test_ill_conditioned_closed_leaf_is_rerouted():
    # large j at small t: the polygamma expansion cancels badly
    r = evaluate(IntegralSpec(M, 1, 12, 1, 0.05, 1.0), 1e-10)
    assert r.warnings and r.leaf_report.get("quadrature")
    assert r.value == pytest.approx(quad(IntegralSpec(M, 1, 12, 1, 0.05, 1.0)), rel=1e-9)


def test_scaling_law_holds():
    for mu in (0.3, TWO_PI, 17.0):
        for args in ((M, 8, 4, 4), (M, 3, 2, 2), (P, 4, 3, 1), (M, 2, -1, 2)):
            spec = IntegralSpec(*args, 1.3, mu)
            v = evaluate(spec).value
            w = evaluate(spec.normalized()).value * mu ** (2 * spec.j - spec.n - 1)
            assert v == pytest.approx(w, rel=1e-10)


@settings(max_examples=60, deadline=None)
@given(
    sign=st.sampled_from("-+"),
    n=st.integers(0, 8),
    j=st.integers(-2, 4),
    s=st.integers(1, 4),
    lb=st.floats(-0.7, 0.7),
    lmu=st.floats(-0.5, 0.9),
)
def test_engine_matches_oracle(sign, n, j, s, lb, lmu):
    spec = IntegralSpec(sign, n, j, s, 10**lb, 10**lmu)
    if not converges(spec):
        return
    r = evaluate(spec)
    ref = quad(spec)
    assert abs(r.value - ref) <= 1e-7 * (1 + abs(ref))
    assert abs(r.value - ref) <= r.abs_error + 1e-13 * abs(ref)


def test_parallel_evaluation_is_deterministic():
    specs = [IntegralSpec(M, n, j, s, 1.0, TWO_PI) for n in range(2, 8) for j in range(1, 4) for s in range(1, 3) if n >= s]
    serial = [evaluate(s).value for s in specs]
    with ThreadPoolExecutor(8) as pool:
        parallel = list(pool.map(lambda s: evaluate(s).value, specs))
    assert serial == parallel


def test_linear_form_merges_duplicates():
    a = Atom(M, 1, 1, 1)
    f = LinearForm([(Fraction(1), 0, 0, a), (Fraction(2), 0, 0, a), (Fraction(-3), 0, 0, a)])
    assert len(f) == 0 and str(f) == "0"
    g = LinearForm([(Fraction(1, 2), 2, -1, a), (Fraction(1, 2), 2, -1, a)])
    assert list(g)[0].coeff == 1
    assert str(Atom(M, 2, 3, 1, 2)) == "I-_{2,3,1}; 2mu"
