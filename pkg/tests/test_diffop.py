from fractions import Fraction

import pytest
import sympy

from period_engine.diffop import (
    INFINITY,
    DerivOperator,
    Substitution,
    ThetaOperator,
    Z,
    apply,
    gauge_equivalent,
    is_symmetric_cube,
    is_symmetric_square,
    normal_form,
    pullback,
    singular_points,
    stirling1,
    stirling2,
    symmetric_cube,
    symmetric_power,
    symmetric_square,
)
from period_engine.errors import NonRationalGauge, SchemaError, UnsupportedSubstitution, WrongOrder
from period_engine.series import LogSolution, TruncatedSeries, hypergeom_series

F = Fraction


def test_stirling_tables():
    assert [stirling2(4, k) for k in range(5)] == [0, 1, 7, 6, 1]
    assert [stirling1(4, k) for k in range(5)] == [0, -6, 11, -6, 1]


def test_hypergeometric_operators(lpf, lk3, ltri):
    assert lpf.coeffs == ((0, -2), (0, -9), (9, -9))
    assert lk3.coeffs == ((0, -3), (0, -22), (0, -48), (32, -32))
    assert ltri.coeffs == ((0, -3), (0, -32), (64, -64))


def test_from_expression_normalizes_content():
    t = sympy.Symbol("t")
    L = ThetaOperator.from_expression(6 * t**2 - 6 * Z * (t + F(1, 2)) * (t + F(1, 2)), t)
    assert L == ThetaOperator.hypergeometric([F(1, 2), F(1, 2)], [1])


@pytest.mark.parametrize("name", ["lpf", "lk3", "ltri", "le8"])
def test_operators_annihilate_their_hypergeometric_series(name, request):
    L = request.getfixturevalue(name)
    params = {"lpf": ([F(1, 3), F(2, 3)], [1]), "lk3": ([F(1, 4), F(1, 2), F(3, 4)], [1, 1]),
              "ltri": ([F(1, 8), F(3, 8)], [1]), "le8": ([F(1, 6), F(5, 6)], [1])}[name]
    f = hypergeom_series(*params, 25)
    assert apply(L, f).is_zero()


def test_theta_deriv_round_trip(lpf, lk3):
    for L in (lpf, lk3):
        assert L.to_deriv().to_theta() == L


def test_json_round_trip(lk3):
    assert ThetaOperator.from_json(lk3.to_json()) == lk3


@pytest.mark.parametrize("doc", ['{"var": "z"}', '{"var": "z", "theta_coeffs": [[1], "x"]}',
                                 '{"var": "z", "theta_coeffs": []}', '{"var": "z", "theta_coeffs": [["1.5"]]}'])
def test_json_schema_errors(doc):
    with pytest.raises(SchemaError):
        ThetaOperator.from_json(doc)


# -- pullbacks ------------------------------------------------------------------


def test_fricke_pullback(lpf):
    assert pullback(lpf, Substitution.affine(-1, 1)) == lpf


def test_reciprocal_of_theta():
    assert pullback(ThetaOperator([[0], [1]]), Substitution.reciprocal()) == ThetaOperator([[0], [1]])


def test_pullback_solutions(lpf):
    # the pullback by 2z annihilates f(2z)
    f = hypergeom_series([F(1, 3), F(2, 3)], [1], 15)
    g = f(TruncatedSeries([0, 2], 15))
    assert apply(pullback(lpf, Substitution.affine(2, 0)), g).is_zero()


def test_pullback_polynomial(lpf):
    f = hypergeom_series([F(1, 3), F(2, 3)], [1], 15)
    g = f(TruncatedSeries([0, 0, 1], 15))
    assert apply(pullback(lpf, Substitution.polynomial([0, 0, 1])), g).is_zero()


@pytest.mark.parametrize("phi", [Substitution("spline", ()), Substitution.polynomial([3]), Substitution.affine(0, 1)])
def test_unsupported_substitution(lpf, phi):
    with pytest.raises(UnsupportedSubstitution):
        pullback(lpf, phi)


def test_substitution_inverse():
    phi = Substitution.affine(3, 1)
    back = phi.inverse()
    assert sympy.simplify(back.expression().subs(Z, phi.expression()) - Z) == 0


# -- normal forms and symmetric powers -----------------------------------------


def test_normal_form_simple():
    N, ell = normal_form(DerivOperator([1, 2, 1]))
    assert N == DerivOperator([0, 0, 1]) and sympy.simplify(ell + 1) == 0


def test_symmetric_square_constructs_k3(ltri, lk3):
    assert symmetric_square(ltri.to_deriv()).to_theta() == lk3
    assert symmetric_power(ltri.to_deriv(), 2).to_theta() == lk3


def test_symmetric_square_annihilates_products(ltri):
    f = hypergeom_series([F(1, 8), F(3, 8)], [1], 20)
    L3 = symmetric_square(ltri.to_deriv()).to_theta()
    assert apply(L3, f * f).is_zero()


def test_symmetric_square_of_exponential_equation():
    # y'' - 4y = 0 has e^{2z}, e^{-2z}; the square kills e^{4z}, 1, e^{-4z}
    L3 = symmetric_square(DerivOperator([-4, 0, 1]))
    for expr in (sympy.exp(4 * Z), sympy.Integer(1), sympy.exp(-4 * Z)):
        assert sympy.simplify(L3.apply(expr)) == 0


def test_detection_recovers_witness(lk3, ltri):
    w = is_symmetric_square(lk3)
    assert w is not None and gauge_equivalent(w, ltri.to_deriv())
    assert symmetric_square(w).proportional_to(lk3.to_deriv())


def test_detection_rejects():
    assert is_symmetric_square(DerivOperator([1, Z, 0, 1])) is None


def test_detection_wrong_order(lpf):
    with pytest.raises(WrongOrder):
        is_symmetric_square(lpf)
    with pytest.raises(WrongOrder):
        is_symmetric_cube(lpf)


def test_symmetric_cube_round_trip(lpf):
    L4 = symmetric_cube(lpf.to_deriv())
    assert L4.order == 4
    w = is_symmetric_cube(L4)
    assert w is not None and gauge_equivalent(w, lpf.to_deriv())
    f = hypergeom_series([F(1, 3), F(2, 3)], [1], 15)
    assert apply(L4.to_theta(), f**3).is_zero()


def test_gauge_rejects_nonrational():
    with pytest.raises(NonRationalGauge):
        DerivOperator([0, 1]).gauge(sympy.log(Z))


# -- singular points ------------------------------------------------------------


def test_singular_points(lpf, lk3):
    assert singular_points(lpf) == [0, 1, INFINITY]
    assert singular_points(lk3) == [0, 1, INFINITY]
    assert singular_points(ThetaOperator([[0], [0], [1]])) == [0, INFINITY]


def test_irrational_singular_points():
    # (1 - 2z - z^2) theta^2 - z: roots -1 +- sqrt(2)
    L = ThetaOperator([[0, -1], [], [1, -2, -1]])
    pts = singular_points(L)
    numeric = [p for p in pts if isinstance(p, complex)]
    assert len(numeric) == 2
    assert min(abs(p - (-1 + 2**0.5)) for p in numeric) < 1e-12


def test_apply_to_log_solution():
    L = ThetaOperator([[0], [0], [1]])
    sol = LogSolution([TruncatedSeries.zero(5), TruncatedSeries.one(5)])
    assert apply(L, sol).is_zero()


@pytest.mark.parametrize("seed", range(5))
def test_normal_form_of_symmetric_square_shape(seed):
    import random

    rng = random.Random(seed)
    poly = lambda: sum(rng.randint(-3, 3) * Z**k for k in range(3))  # noqa: E731
    M = DerivOperator([poly(), poly(), 1 + rng.randint(1, 3) * Z])
    N, _ = normal_form(symmetric_square(M))
    # y''' + 4 Q y' + 2 Q' y with no y'' term
    assert N.coefficient(2) == 0
    Q = N.coefficient(1) / 4
    assert sympy.simplify(N.coefficient(0) - 2 * sympy.diff(Q, Z)) == 0
