"""Two-dimensional lattice polytopes: polar duals, lattice points and sections."""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import InvalidPolytope, NotReflexive, RaysMismatch, SchemaError


def _cross(o, a, b) -> int:
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def _hull(points: Iterable) -> list:
    """Vertices of the convex hull, counter-clockwise, collinear points dropped."""
    pts = sorted(set(points))
    if len(pts) < 3:
        return pts
    lower, upper = [], []
    for p in pts:
        while len(lower) >= 2 and _cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    for p in reversed(pts):
        while len(upper) >= 2 and _cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    return lower[:-1] + upper[:-1]


def _as_point(p) -> tuple:
    if not isinstance(p, (list, tuple)) or len(p) != 2:
        raise SchemaError(f"lattice point must be a pair, got {p!r}")
    out = []
    for x in p:
        if isinstance(x, bool) or not isinstance(x, int):
            raise SchemaError(f"lattice coordinates must be integers, got {x!r}")
        out.append(x)
    return tuple(out)


@dataclass(frozen=True)
class LatticePolytope2D:
    """Convex lattice polygon with the origin strictly inside.

    Vertices are stored counter-clockwise starting from the lexicographically
    smallest one, so equal polygons compare equal.
    """

    vertices: tuple

    def __post_init__(self):
        hull = _hull(_as_point(p) for p in self.vertices)
        if len(hull) < 3:
            raise InvalidPolytope("polygon is degenerate")
        start = hull.index(min(hull))
        hull = hull[start:] + hull[:start]
        object.__setattr__(self, "vertices", tuple(hull))
        for a, b in self.edges():
            if _cross(a, b, (0, 0)) <= 0:
                raise InvalidPolytope("origin is not strictly inside the polygon")

    def edges(self):
        v = self.vertices
        return [(v[i], v[(i + 1) % len(v)]) for i in range(len(v))]

    def contains(self, p) -> bool:
        return all(_cross(a, b, p) >= 0 for a, b in self.edges())

    def lattice_points(self) -> list:
        xs = [v[0] for v in self.vertices]
        ys = [v[1] for v in self.vertices]
        return [(x, y) for x in range(min(xs), max(xs) + 1) for y in range(min(ys), max(ys) + 1)
                if self.contains((x, y))]

    def interior_points(self) -> list:
        return [p for p in self.lattice_points() if all(_cross(a, b, p) > 0 for a, b in self.edges())]

    def to_dict(self) -> dict:
        return {"vertices": [list(v) for v in self.vertices]}

    @classmethod
    def from_dict(cls, data) -> "LatticePolytope2D":
        if not isinstance(data, dict) or not isinstance(data.get("vertices"), list):
            raise SchemaError("polytope document needs a 'vertices' list")
        return cls(tuple(data["vertices"]))

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, text: str) -> "LatticePolytope2D":
        try:
            return cls.from_dict(json.loads(text))
        except json.JSONDecodeError as exc:
            raise SchemaError(f"invalid JSON: {exc}") from exc


def polar_vertices(P: LatticePolytope2D) -> list:
    """Rational vertices of ``{y : <y, x> >= -1 for x in P}``, one per edge of ``P``."""
    out = []
    for (a1, a2), (b1, b2) in P.edges():
        det = a1 * b2 - a2 * b1  # positive: the origin lies to the left of every edge
        out.append((Fraction(-(b2 - a2), det), Fraction(b1 - a1, det)))
    return out


def polar_dual(P: LatticePolytope2D) -> LatticePolytope2D:
    verts = polar_vertices(P)
    if any(c.denominator != 1 for v in verts for c in v):
        raise NotReflexive(f"polar dual has non-lattice vertices {[tuple(map(str, v)) for v in verts]}")
    return LatticePolytope2D(tuple((int(x), int(y)) for x, y in verts))


def is_reflexive(P: LatticePolytope2D) -> bool:
    try:
        polar_dual(P)
    except NotReflexive:
        return False
    return True


def lattice_points(P: LatticePolytope2D) -> list:
    return P.lattice_points()


def render_monomial(exponents: Sequence[int], prefix: str = "z") -> str:
    parts = []
    for i, e in enumerate(exponents, start=1):
        if e == 1:
            parts.append(f"{prefix}{i}")
        elif e > 1:
            parts.append(f"{prefix}{i}^{e}")
    return "*".join(parts) if parts else "1"


@dataclass(frozen=True)
class Section:
    point: tuple
    exponents: tuple

    def __str__(self):
        return render_monomial(self.exponents)

    def to_dict(self) -> dict:
        return {"point": list(self.point), "exponents": list(self.exponents), "monomial": str(self)}


def anticanonical_sections(P: LatticePolytope2D, rays: Sequence | None = None) -> list:
    """Monomials ``prod z_i^(<m, rho_i> + 1)`` for the lattice points ``m`` of ``P``.

    ``rays`` are the fan's ray generators and default to the vertices of the
    polar dual, ordered as stored.  A ray that makes some exponent negative
    does not belong to the fan of ``P``.
    """
    if rays is None:
        rays = list(polar_dual(P).vertices)
    else:
        rays = [_as_point(r) for r in rays]
        if not rays or len(set(rays)) != len(rays):
            raise RaysMismatch("rays must be a non-empty list of distinct vectors")
    out = []
    for m in P.lattice_points():
        exps = tuple(m[0] * r[0] + m[1] * r[1] + 1 for r in rays)
        if min(exps) < 0:
            bad = rays[exps.index(min(exps))]
            raise RaysMismatch(f"ray {bad} gives a negative exponent at lattice point {m}")
        out.append(Section(m, exps))
    return out


__all__ = [
    "LatticePolytope2D", "Section", "polar_dual", "polar_vertices", "is_reflexive",
    "lattice_points", "anticanonical_sections", "render_monomial",
]
