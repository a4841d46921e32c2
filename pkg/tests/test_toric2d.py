import pytest

from period_engine.errors import InvalidPolytope, NotReflexive, RaysMismatch, SchemaError
from period_engine.fixtures import load_polytope
from period_engine.toric2d import (
    LatticePolytope2D,
    anticanonical_sections,
    is_reflexive,
    lattice_points,
    polar_dual,
    render_monomial,
)

CUBIC = [(2, -1), (-1, 2), (-1, -1)]
FAN = [(1, 0), (0, 1), (-1, -1)]


def test_hull_normalizes_order():
    a = LatticePolytope2D([(-1, 2), (2, -1), (-1, -1), (0, 0)])
    b = LatticePolytope2D(CUBIC)
    assert a == b and a.vertices[0] == (-1, -1)


def test_polar_dual_of_cubic():
    assert polar_dual(LatticePolytope2D(CUBIC)) == LatticePolytope2D(FAN)


@pytest.mark.parametrize("verts", [CUBIC, FAN, [(1, 0), (0, 1), (-1, 0), (0, -1)],
                                   [(1, 1), (-1, 1), (-1, -1), (1, -1)], [(1, 0), (1, 1), (0, 1), (-1, 0), (-1, -1), (0, -1)]])
def test_duality_is_involution(verts):
    P = LatticePolytope2D(verts)
    assert is_reflexive(P)
    assert polar_dual(polar_dual(P)) == P


def test_point_counts():
    P = LatticePolytope2D(CUBIC)
    assert len(lattice_points(P)) == 10
    assert P.interior_points() == [(0, 0)]
    assert len(polar_dual(P).lattice_points()) == 4


def test_not_reflexive():
    P = LatticePolytope2D([(2, 0), (0, 1), (-1, -1)])
    assert not is_reflexive(P)
    with pytest.raises(NotReflexive):
        polar_dual(P)


@pytest.mark.parametrize("verts", [[(1, 0), (2, 0), (3, 0)], [(1, 0), (2, 1), (1, 1)]])
def test_invalid(verts):
    with pytest.raises(InvalidPolytope):
        LatticePolytope2D(verts)


def test_sections_of_cubic():
    secs = anticanonical_sections(LatticePolytope2D(CUBIC), FAN)
    names = [str(s) for s in secs]
    assert len(names) == 10
    assert {"z1^3", "z2^3", "z3^3", "z1*z2*z3"} <= set(names)
    assert all(sum(s.exponents) == 3 for s in secs)


def test_sections_ray_order_follows_input():
    secs = anticanonical_sections(LatticePolytope2D(CUBIC), [(0, 1), (1, 0), (-1, -1)])
    assert next(s for s in secs if s.point == (2, -1)).exponents == (0, 3, 0)


def test_rays_mismatch():
    with pytest.raises(RaysMismatch):
        anticanonical_sections(LatticePolytope2D(CUBIC), FAN + [(1, 1)])


def test_render():
    assert render_monomial((1, 0, 2)) == "z1*z3^2"
    assert render_monomial((0, 0, 0)) == "1"


def test_json_and_fixtures():
    P = load_polytope("p2")
    assert LatticePolytope2D.from_json(P.to_json()) == P
    assert polar_dual(P) == load_polytope("p2dual")
    with pytest.raises(SchemaError):
        LatticePolytope2D.from_json('{"vertices": [[1, 0.5], [0, 1], [-1, -1]]}')
