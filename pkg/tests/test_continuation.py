from fractions import Fraction

import mpmath
import pytest

from period_engine.continuation import (
    PathPolyline,
    cayley_fixed_point,
    cayley_transform,
    circle_loop,
    default_digits,
    expected_determinant,
    fricke_residual,
    local_jets,
    loop_around,
    make_context,
    matmul,
    max_deviation,
    monodromy,
    normalized_period_value,
    taylor_continue,
)
from period_engine.diffop import INFINITY, ThetaOperator
from period_engine.errors import NoOrbifoldPoint, PathTooCloseToSingularity, SchemaError

F = Fraction
D = 40


def tiny(ctx, k):
    return ctx.mpf(10) ** -k


def test_2f1_against_mpmath(lpf):
    ctx = make_context(D)
    path = PathPolyline([(F(1, 10), 0), (F(1, 5), 0)], D)
    basis, jets = local_jets(lpf, 0, ctx.mpf(1) / 10, D, ctx)
    (y, dy), _ = taylor_continue(lpf, path, jets, ctx, D)
    want = ctx.hyp2f1(ctx.mpf(1) / 3, ctx.mpf(2) / 3, 1, ctx.mpf(1) / 5)
    dwant = ctx.mpf(2) / 9 * ctx.hyp2f1(ctx.mpf(4) / 3, ctx.mpf(5) / 3, 2, ctx.mpf(1) / 5)
    assert abs(y - want) < tiny(ctx, 35)
    assert abs(dy - dwant) < tiny(ctx, 35)


def test_complex_path_against_mpmath(lpf):
    ctx = make_context(D)
    path = PathPolyline([(F(1, 10), 0), (F(1, 2), F(1, 2)), (-1, 1), (-2, 0)], D)
    _, jets = local_jets(lpf, 0, ctx.mpf(1) / 10, D, ctx)
    y = taylor_continue(lpf, path, jets, ctx, D)[0][0]
    # upper half plane, away from the cut [1, inf)
    want = ctx.hyp2f1(ctx.mpf(1) / 3, ctx.mpf(2) / 3, 1, -2)
    assert abs(y - want) < tiny(ctx, 35)


def test_zero_length_path_is_identity(lpf):
    ctx = make_context(D)
    _, jets = local_jets(lpf, 0, ctx.mpf(1) / 4, D, ctx)
    out = taylor_continue(lpf, PathPolyline([(F(1, 4), 0)], D), jets, ctx, D)
    assert out == jets


def test_constants_stay_constant():
    # theta^2 has the constant solution 1 and log z
    L = ThetaOperator([[0], [0], [1]])
    ctx = make_context(30)
    path = PathPolyline([(1, 0), (2, 3), (-1, 1)], 30)
    out = taylor_continue(L, path, [[ctx.mpf(1), ctx.mpf(0)]], ctx, 30)
    assert abs(out[0][0] - 1) < tiny(ctx, 28) and abs(out[0][1]) < tiny(ctx, 28)


def test_log_continuation():
    L = ThetaOperator([[0], [0], [1]])
    ctx = make_context(30)
    loop = circle_loop(0, 1, 0, 8, 30)
    (y, dy), = taylor_continue(L, loop, [[ctx.mpf(0), ctx.mpf(1)]], ctx, 30)
    assert abs(y - 2j * ctx.pi) < tiny(ctx, 28)


def test_regular_point_loop_is_identity(lpf):
    loop = circle_loop(F(-1, 2), F(1, 4), 0, 6, D)
    M = monodromy(lpf, loop, point=0).matrix
    assert max_deviation(M, [[1, 0], [0, 1]]) < tiny(mpmath.mp, 30)


def test_unipotent_at_zero(lpf, lk3):
    M = monodromy(lpf, loop_around(lpf, 0, digits=D)).matrix
    assert max_deviation(M, [[1, 0], [1, 1]]) < tiny(mpmath.mp, 30)
    M3 = monodromy(lk3, loop_around(lk3, 0, sides=8, digits=D)).matrix
    # log^k basis scaled by (2 pi i)^k: binomial rows
    want = [[1, 0, 0], [1, 1, 0], [1, 2, 1]]
    assert max_deviation(M3, want) < tiny(mpmath.mp, 30)


def test_determinant_matches_exponents():
    # exponents 0 and 1/2 at the origin: det = -1
    L = ThetaOperator.hypergeometric([F(1, 3), F(2, 3)], [F(1, 2)])
    mono = monodromy(L, loop_around(L, 0, digits=D))
    assert abs(mono.determinant() - expected_determinant(L, 0)) < tiny(mpmath.mp, 30)
    assert abs(expected_determinant(L, 0) + 1) < tiny(mpmath.mp, 14)


def test_homotopy_invariance(lpf):
    a = monodromy(lpf, circle_loop(0, F(1, 2), 0, 8, D)).matrix
    square = PathPolyline([(F(1, 2), 0), (F(1, 2), F(1, 3)), (F(-1, 3), F(1, 3)), (F(-1, 3), F(-1, 2)),
                           (F(1, 2), F(-1, 2)), (F(1, 2), 0)], D)
    b = monodromy(lpf, square).matrix
    assert max_deviation(a, b) < tiny(mpmath.mp, 30)


def test_loop_composition(lpf):
    loop = circle_loop(0, F(1, 2), 0, 8, D)
    once = monodromy(lpf, loop).matrix
    twice = monodromy(lpf, loop + loop).matrix
    assert max_deviation(twice, matmul(once, once)) < tiny(mpmath.mp, 30)


def test_precision_improves_fricke(lpf):
    lo = fricke_residual(lpf, F(1, 3), 20, 27)
    hi = fricke_residual(lpf, F(1, 3), 40, 27)
    assert hi == 0 or lo / hi > mpmath.mpf(10) ** 10


def test_fricke_fixed_point(lpf):
    tau = normalized_period_value(lpf, F(1, 2), D, 27)
    assert abs(tau - 1j / mpmath.sqrt(3)) < tiny(mpmath.mp, 14)


def test_clearance(lpf):
    with pytest.raises(PathTooCloseToSingularity):
        taylor_continue(lpf, PathPolyline([(F(1, 2), 0), (2, 0)], 20), [[1, 0]])
    with pytest.raises(PathTooCloseToSingularity):
        taylor_continue(lpf, PathPolyline([(F(1, 2), F(1, 10**9)), (F(3, 2), F(1, 10**9))], 20), [[1, 0]])


@pytest.mark.parametrize("doc", ['{"vertices": [[0, 0], [0, 0]]}', '{"vertices": "x"}', '{"points": []}',
                                 '{"vertices": [[0, 0]], "precision_digits": 2}', "nope"])
def test_path_schema(doc):
    with pytest.raises(SchemaError):
        PathPolyline.from_json(doc)


def test_path_json_round_trip():
    p = PathPolyline([(F(1, 3), 0), (F(1, 2), F(-2, 7))], 30)
    assert PathPolyline.from_json(p.to_json()) == p
    assert p.reversed().reversed() == p


def test_open_loop_rejected(lpf):
    with pytest.raises(SchemaError):
        monodromy(lpf, PathPolyline([(F(1, 2), 0), (F(1, 2), 1)], 20))


def test_precision_env(monkeypatch):
    monkeypatch.setenv("PERIOD_ENGINE_PRECISION", "33")
    assert default_digits() == 33
    monkeypatch.setenv("PERIOD_ENGINE_PRECISION", "3")
    with pytest.raises(SchemaError):
        default_digits()


def test_cayley_maps_into_disk(lpf):
    star = cayley_fixed_point(lpf, PathPolyline([(F(1, 4), 0), (F(1, 4), 3), (0, 6)], 30), 27)
    assert star.residual < mpmath.mpf(10) ** -20
    for z in (F(1, 4), F(-1, 2)):
        w = cayley_transform(normalized_period_value(lpf, z, 30, 27), star.tau_star)
        assert abs(w) < 1
    assert abs(cayley_transform(star.tau_star, star.tau_star)) == 0


def test_no_orbifold_point(lk3):
    with pytest.raises(NoOrbifoldPoint):
        cayley_fixed_point(lk3, PathPolyline([(F(1, 4), 0), (F(1, 4), 3), (0, 6)], 20))


def test_monodromy_export(lpf):
    d = monodromy(lpf, circle_loop(0, F(1, 2), 0, 8, 20)).to_dict()
    assert len(d["matrix"]) == 2 and d["precision_digits"] == 20
    assert mpmath.mpf(d["determinant"][0]) == pytest.approx(1)


def test_expected_determinant_infinity(lpf):
    # exponents 1/3 + 2/3 at infinity: trivial determinant
    assert abs(expected_determinant(lpf, INFINITY) - 1) < 1e-14
