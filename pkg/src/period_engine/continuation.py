"""High-precision analytic continuation along polygonal paths.

Solutions are carried as jets ``(y, y', ..., y^(n-1))`` in the global
coordinate.  Each step expands around the current point, with the step
length at most half the distance to the nearest finite singularity, and runs
the Taylor recurrence in fixed-point Gaussian integers (see ``kernels``).

Local Frobenius bases provide the initial and final jets, so monodromy
matrices and connection coefficients come out in those bases.
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import mpmath

from . import kernels
from .diffop import INFINITY, ThetaOperator, singular_points, stirling1
from .errors import (
    NoOrbifoldPoint,
    PathTooCloseToSingularity,
    PrecisionExhausted,
    SchemaError,
)
from .frobenius import frobenius_basis
from .series import LogSolution

DEFAULT_DIGITS = 50
GUARD_BITS = 64
MIN_CLEARANCE = Fraction(1, 10**6)


def default_digits() -> int:
    raw = os.environ.get("PERIOD_ENGINE_PRECISION")
    if not raw:
        return DEFAULT_DIGITS
    try:
        value = int(raw)
    except ValueError as exc:
        raise SchemaError(f"PERIOD_ENGINE_PRECISION must be an integer, got {raw!r}") from exc
    if value < 5:
        raise SchemaError("PERIOD_ENGINE_PRECISION must be at least 5")
    return value


def make_context(digits: int):
    ctx = mpmath.MPContext()
    ctx.dps = digits + 15
    return ctx


def _to_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise SchemaError("booleans are not coordinates")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, float):
        return Fraction(x)
    if isinstance(x, str):
        try:
            return Fraction(x.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise SchemaError(f"bad coordinate {x!r}") from exc
    raise SchemaError(f"bad coordinate {x!r}")


def _point(p) -> tuple:
    if isinstance(p, complex):
        return (Fraction(p.real), Fraction(p.imag))
    if isinstance(p, (list, tuple)) and len(p) == 2:
        return (_to_fraction(p[0]), _to_fraction(p[1]))
    if isinstance(p, (int, float, str, Fraction)) and not isinstance(p, bool):
        return (_to_fraction(p), Fraction(0))
    raise SchemaError(f"bad path vertex {p!r}")


@dataclass(frozen=True)
class PathPolyline:
    """Polygonal path with exact rational vertices."""

    vertices: tuple
    precision_digits: int = DEFAULT_DIGITS
    clearance: Fraction = MIN_CLEARANCE

    def __post_init__(self):
        object.__setattr__(self, "vertices", tuple(_point(v) for v in self.vertices))
        object.__setattr__(self, "clearance", _to_fraction(self.clearance))
        if not self.vertices:
            raise SchemaError("a path needs at least one vertex")
        if any(a == b for a, b in zip(self.vertices, self.vertices[1:])):
            raise SchemaError("consecutive path vertices must be distinct")
        if self.clearance <= 0:
            raise SchemaError("clearance must be positive")
        if isinstance(self.precision_digits, bool) or not isinstance(self.precision_digits, int) \
                or self.precision_digits < 5:
            raise SchemaError("precision_digits must be an integer >= 5")

    def __add__(self, other: "PathPolyline") -> "PathPolyline":
        if self.vertices[-1] != other.vertices[0]:
            raise SchemaError("paths do not join")
        return PathPolyline(self.vertices + other.vertices[1:], max(self.precision_digits, other.precision_digits),
                            min(self.clearance, other.clearance))

    def reversed(self) -> "PathPolyline":
        return PathPolyline(tuple(reversed(self.vertices)), self.precision_digits, self.clearance)

    @property
    def start(self):
        return self.vertices[0]

    @property
    def end(self):
        return self.vertices[-1]

    def to_dict(self) -> dict:
        return {"vertices": [[str(x), str(y)] for x, y in self.vertices],
                "precision_digits": self.precision_digits, "clearance": str(self.clearance)}

    @classmethod
    def from_dict(cls, data) -> "PathPolyline":
        if not isinstance(data, dict) or "vertices" not in data:
            raise SchemaError("path document needs 'vertices'")
        verts = data["vertices"]
        if not isinstance(verts, list):
            raise SchemaError("'vertices' must be a list")
        return cls(tuple(verts), data.get("precision_digits", DEFAULT_DIGITS), data.get("clearance", MIN_CLEARANCE))

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, text: str) -> "PathPolyline":
        try:
            return cls.from_dict(json.loads(text))
        except json.JSONDecodeError as exc:
            raise SchemaError(f"invalid JSON: {exc}") from exc


def circle_loop(center, radius, start_angle=0, sides: int = 12, digits: int = DEFAULT_DIGITS) -> PathPolyline:
    """Counter-clockwise polygon around ``center`` starting at angle ``start_angle`` (in turns).

    Vertices are rounded to rationals; the first and last coincide.
    """
    cx, cy = _point(center)
    r = _to_fraction(radius)
    a0 = float(_to_fraction(start_angle))
    verts = []
    for k in range(sides):
        ang = 2 * math.pi * (a0 + k / sides)
        if k == 0 and a0 in (0.0, 0.5):
            dx, dy = (r, Fraction(0)) if a0 == 0 else (-r, Fraction(0))
        else:
            dx = Fraction(round(float(r) * math.cos(ang) * 10**12), 10**12)
            dy = Fraction(round(float(r) * math.sin(ang) * 10**12), 10**12)
        verts.append((cx + dx, cy + dy))
    verts.append(verts[0])
    return PathPolyline(tuple(verts), digits)


# ---------------------------------------------------------------------------
# geometry


def _finite_singularities(L: ThetaOperator) -> list[complex]:
    out = []
    for s in singular_points(L):
        if s is INFINITY:
            continue
        out.append(s)
    return out


def _seg_distance(p, a, b, ctx):
    ab = b - a
    if ab == 0:
        return abs(p - a)
    t = ctx.re((p - a) * ctx.conj(ab)) / abs(ab) ** 2
    t = min(max(t, 0), 1)
    return abs(p - (a + t * ab))


def _sing_values(L, ctx):
    out = []
    for s in _finite_singularities(L):
        if isinstance(s, Fraction):
            out.append(ctx.mpf(s.numerator) / s.denominator)
        else:
            out.append(ctx.mpc(s.real, s.imag))
    return out


def check_clearance(L: ThetaOperator, path: PathPolyline, clearance=None, ctx=None):
    ctx = ctx or mpmath.mp
    clearance = path.clearance if clearance is None else _to_fraction(clearance)
    sings = _sing_values(L, ctx)
    if len(path.vertices) == 1:
        p = _mpc(path.vertices[0], ctx)
        if any(abs(p - s) < ctx.mpf(clearance.numerator) / clearance.denominator for s in sings):
            raise PathTooCloseToSingularity(f"point {p} is too close to a singular point")
    cl = ctx.mpf(clearance.numerator) / clearance.denominator
    pts = [_mpc(v, ctx) for v in path.vertices]
    for a, b in zip(pts, pts[1:]):
        for s in sings:
            if _seg_distance(s, a, b, ctx) < cl:
                raise PathTooCloseToSingularity(f"segment {a} -> {b} passes within {cl} of singular point {s}")


def _mpc(v, ctx):
    x, y = v
    return ctx.mpc(ctx.mpf(x.numerator) / x.denominator, ctx.mpf(y.numerator) / y.denominator)


# ---------------------------------------------------------------------------
# Taylor stepping


def _to_fixed(x, bits, ctx):
    return int(ctx.nint(ctx.ldexp(ctx.re(x), bits))), int(ctx.nint(ctx.ldexp(ctx.im(x), bits)))


def _from_fixed(re, im, bits, ctx):
    return ctx.mpc(ctx.ldexp(ctx.mpf(re), -bits), ctx.ldexp(ctx.mpf(im), -bits))


def _shifted_poly(coeffs: Sequence[int], z0, h, ctx) -> list:
    """Coefficients in ``t`` of ``A(z0 + h t)``."""
    out = [ctx.mpc(0)]
    for c in reversed(coeffs):
        # out <- out * (z0 + h t) + c
        nxt = [ctx.mpc(0)] * (len(out) + 1)
        for i, v in enumerate(out):
            nxt[i] += v * z0
            nxt[i + 1] += v * h
        nxt[0] += c
        out = nxt
    while len(out) > 1 and out[-1] == 0:
        out.pop()
    return out


def _step(A: list, jets: list, z0, h, digits: int, ctx):
    n = len(A) - 1
    target_bits = int(digits * 3.33) + 16
    bits = target_bits + GUARD_BITS
    with ctx.workprec(bits + 128):
        polys = [_shifted_poly(A[j], z0, h, ctx) for j in range(n + 1)]
        polys = [[c * h ** (n - j) for c in p] for j, p in enumerate(polys)]
        scale = max(abs(c) for p in polys for c in p)
        if polys[n][0] == 0:
            raise PathTooCloseToSingularity(f"leading coefficient vanishes at {z0}")
        bre, bim = [], []
        for p in polys:
            row = [_to_fixed(c / scale, bits, ctx) for c in p]
            bre.append([r for r, _ in row])
            bim.append([i for _, i in row])
        inits = []
        for jet in jets:
            scaled = [jet[d] * h**d / math.factorial(d) for d in range(n)]
            fx = [_to_fixed(c, bits, ctx) for c in scaled]
            inits.append(([r for r, _ in fx], [i for _, i in fx]))
        nterms = target_bits + 40
        for _attempt in range(4):
            out = []
            worst = 0
            for ire, iim in inits:
                sre, sim, tail = kernels.taylor_step(bre, bim, ire, iim, nterms, bits)
                out.append((sre, sim))
                worst = max(worst, tail)
            if worst * nterms**n < 2 ** (GUARD_BITS - 8):
                break
            nterms *= 2
        else:
            raise PrecisionExhausted(f"Taylor series at {z0} did not converge within {nterms} terms")
        result = []
        for sre, sim in out:
            result.append([_from_fixed(sre[d], sim[d], bits, ctx) / h**d for d in range(n)])
    return result


def taylor_continue(L: ThetaOperator, path: PathPolyline, jets: list, ctx=None, digits: int | None = None) -> list:
    """Carry each jet ``(y, y', ..., y^(n-1))`` from ``path.start`` to ``path.end``."""
    digits = digits or path.precision_digits
    ctx = ctx or make_context(digits)
    check_clearance(L, path, ctx=ctx)
    A = L.deriv_polynomials()
    sings = _sing_values(L, ctx)
    pts = [_mpc(v, ctx) for v in path.vertices]
    jets = [list(j) for j in jets]
    for a, b in zip(pts, pts[1:]):
        cur = a
        while True:
            remaining = b - cur
            if abs(remaining) == 0:
                break
            rho = min(abs(cur - s) for s in sings) if sings else ctx.inf
            hmax = rho / 2
            if abs(remaining) <= hmax:
                h = remaining
            else:
                h = remaining / abs(remaining) * hmax
            jets = _step(A, jets, cur, h, digits, ctx)
            cur = b if h is remaining else cur + h
    return jets


# ---------------------------------------------------------------------------
# local bases


def _radius(L, point, ctx):
    """Convergence radius of the local Frobenius series, in the local coordinate."""
    sings = _sing_values(L, ctx)
    if point is INFINITY:
        inv = [1 / abs(s) for s in sings if s != 0]
        return min(inv) if inv else ctx.inf
    c = ctx.mpf(point.numerator) / point.denominator
    others = [abs(s - c) for s in sings if abs(s - c) > 0]
    return min(others) if others else ctx.inf


def _local_coordinate(point, z, ctx):
    if point is INFINITY:
        return 1 / z
    return z - ctx.mpf(point.numerator) / point.denominator


def _theta_powers(sol: LogSolution, n: int) -> list:
    out = [sol]
    for _ in range(1, n):
        out.append(out[-1].theta())
    return out


def local_jets(L: ThetaOperator, point, z, digits: int = DEFAULT_DIGITS, ctx=None, log_branch=None):
    """Local Frobenius basis at ``point`` and its jets at the global position ``z``.

    ``log_branch`` is ``log`` of the local coordinate (principal by default).
    Returns ``(basis, jets)``.
    """
    ctx = ctx or make_context(digits)
    point = INFINITY if point is INFINITY else Fraction(point)
    z = ctx.mpmathify(z)
    w = _local_coordinate(point, z, ctx)
    R = _radius(L, point, ctx)
    if abs(w) == 0:
        raise PathTooCloseToSingularity("cannot evaluate a local basis at its own singular point")
    ratio = abs(w) / R
    if ratio >= ctx.mpf("0.9"):
        raise PrecisionExhausted(f"|w|/R = {ratio} is too close to the convergence radius")
    N = int(math.ceil((digits + 12) * math.log(10) / -float(ctx.log(ratio)))) + 8 if ratio > 0 else 8
    basis = frobenius_basis(L, point, N)
    n = L.order
    logw = log_branch if log_branch is not None else ctx.log(w)
    jets = []
    for sol in basis.solutions:
        th = [s.evaluate(w, logw, ctx) for s in _theta_powers(sol, n)]
        if point is INFINITY:
            th = [(-1) ** k * v for k, v in enumerate(th)]
            var = z
        else:
            var = w
        # d^d/dvar^d = var^-d * sum_k s(d, k) theta^k
        jet = []
        for d in range(n):
            acc = ctx.mpc(0)
            for k in range(d + 1):
                acc += stirling1(d, k) * th[k]
            jet.append(acc / var**d)
        jets.append(jet)
    return basis, jets


# ---------------------------------------------------------------------------
# linear algebra on jets


def _solve_coefficients(targets: list, basis_jets: list, ctx) -> list:
    """Rows ``M`` with ``targets[i] = sum_j M[i][j] * basis_jets[j]``."""
    W = ctx.matrix([[basis_jets[j][d] for j in range(len(basis_jets))] for d in range(len(basis_jets[0]))])
    out = []
    for t in targets:
        rhs = ctx.matrix([t[d] for d in range(len(t))])
        x = ctx.lu_solve(W, rhs)
        out.append([x[j] for j in range(len(basis_jets))])
    return out


def _log_scaled(basis, jets, ctx):
    """Divide each log-degree-k solution by ``(2 pi i)**k``."""
    two_pi_i = 2j * ctx.pi
    return [[v / two_pi_i**sol.log_degree for v in jet] for sol, jet in zip(basis.solutions, jets)]


@dataclass(frozen=True)
class Monodromy:
    matrix: list  # rows of mpc
    point: object
    digits: int
    expected_determinant: object = None

    def determinant(self):
        return mpmath.det(mpmath.matrix(self.matrix))

    def to_dict(self) -> dict:
        d = self.digits
        out = {
            "point": str(self.point),
            "precision_digits": d,
            "matrix": [[[mpmath.nstr(v.real, d), mpmath.nstr(v.imag, d)] for v in row] for row in self.matrix],
        }
        with mpmath.workdps(d + 10):
            det = self.determinant()
            out["determinant"] = [mpmath.nstr(det.real, d), mpmath.nstr(det.imag, d)]
            if self.expected_determinant is not None:
                out["determinant_residual"] = mpmath.nstr(abs(det - self.expected_determinant), 5)
        return out


def expected_determinant(L: ThetaOperator, point, ctx=None):
    """``exp(2 pi i * sum of exponents)`` for one counter-clockwise turn around ``point``."""
    from .frobenius import indicial_roots

    ctx = ctx or mpmath.mp
    total = sum(indicial_roots(L, point).multiset, Fraction(0))
    if point is INFINITY:
        total = -total
    return ctx.expjpi(2 * ctx.mpf(total.numerator) / total.denominator)


def monodromy(L: ThetaOperator, loop: PathPolyline, point=0, scale_logs: bool = True) -> Monodromy:
    """Monodromy of the Frobenius basis at ``point`` along a closed ``loop``.

    ``M[i][j]`` is the coefficient of basis solution ``j`` in the
    continuation of basis solution ``i``; composing loops multiplies
    matrices in path order.  With ``scale_logs`` the log-degree-``k``
    solution is divided by ``(2 pi i)**k``, so a unipotent loop has rational
    entries.
    """
    if loop.start != loop.end:
        raise SchemaError("monodromy needs a closed loop")
    digits = loop.precision_digits
    ctx = make_context(digits)
    base = _mpc(loop.start, ctx)
    basis, jets = local_jets(L, point, base, digits, ctx)
    if scale_logs:
        jets = _log_scaled(basis, jets, ctx)
    moved = taylor_continue(L, loop, jets, ctx, digits)
    M = _solve_coefficients(moved, jets, ctx)
    return Monodromy(M, point, digits)


def loop_around(L: ThetaOperator, point, base=None, sides: int = 12, digits: int = DEFAULT_DIGITS) -> PathPolyline:
    """Counter-clockwise circle around a finite singular ``point`` through ``base``.

    Without ``base`` the radius is half the distance to the nearest other
    singular point and the loop starts on the real axis to the right.
    """
    c = Fraction(point)
    others = [abs(complex(s) - float(c)) for s in _finite_singularities(L) if s != c]
    if base is None:
        r = Fraction(min(others) / 2).limit_denominator(1000) if others else Fraction(1)
        return circle_loop(c, r, 0, sides, digits)
    bx, by = _point(base)
    if by != 0 or bx == c:
        raise SchemaError("base point must be a real point other than the loop centre")
    r = abs(bx - c)
    turn = 0 if bx > c else Fraction(1, 2)
    return circle_loop(c, r, turn, sides, digits)


def matmul(A, B):
    n = len(A)
    return [[sum(A[i][k] * B[k][j] for k in range(n)) for j in range(n)] for i in range(n)]


def max_deviation(A, B) -> object:
    return max(abs(A[i][j] - B[i][j]) for i in range(len(A)) for j in range(len(A)))


# ---------------------------------------------------------------------------
# normalized period and its connection data


def _period_jets(L, z, digits, ctx, gauge_shift):
    """Jets of ``pi0`` and ``tau * pi0`` where ``tau = (log(z/kappa) + S) / (2 pi i)``."""
    basis, jets = local_jets(L, 0, z, digits, ctx)
    pi0 = next(j for s, j in zip(basis.solutions, jets) if s.log_degree == 0 and s.exponent == 0)
    pi1 = next(j for s, j in zip(basis.solutions, jets) if s.log_degree == 1 and s.exponent == 0)
    two_pi_i = 2j * ctx.pi
    k = Fraction(gauge_shift)
    logk = ctx.log(ctx.mpf(k.numerator) / k.denominator)
    tilde = [(a - logk * b) / two_pi_i for a, b in zip(pi1, pi0)]
    return pi0, tilde


def normalized_period_value(L: ThetaOperator, z, digits: int = DEFAULT_DIGITS, gauge_shift=1, path=None):
    """``tau(z)`` continued from near 0, along ``path`` or the ray through ``z``."""
    ctx = make_context(digits)
    if path is None:
        zx, zy = _point(z)
        zz = _mpc((zx, zy), ctx)
        k = int(ctx.ceil(abs(zz) / (_radius(L, Fraction(0), ctx) / 4)))
        if k <= 1:
            pi0, tilde = _period_jets(L, zz, digits, ctx, gauge_shift)
            return tilde[0] / pi0[0]
        path = PathPolyline(((zx / k, zy / k), (zx, zy)), digits)
    base = _mpc(path.start, ctx)
    pi0, tilde = _period_jets(L, base, digits, ctx, gauge_shift)
    p0, t1 = taylor_continue(L, path, [pi0, tilde], ctx, digits)
    return t1[0] / p0[0]


def cayley_transform(tau, tau_star):
    """``(tau - tau*) / (tau - conj(tau*))``: the upper half plane onto the unit disk."""
    return (tau - tau_star) / (tau - mpmath.conj(tau_star))


def fricke_residual(L: ThetaOperator, alpha, digits: int = DEFAULT_DIGITS, gauge_shift=27, product=Fraction(-1, 3)):
    """``|tau(1 - alpha) tau(alpha) - product|``."""
    alpha = Fraction(alpha)
    ctx = make_context(digits)
    a = normalized_period_value(L, alpha, digits, gauge_shift)
    b = normalized_period_value(L, 1 - alpha, digits, gauge_shift)
    return abs(a * b - ctx.mpf(product.numerator) / product.denominator)


@dataclass(frozen=True)
class CayleyPoint:
    tau_star: object
    residual: object  # |D/B - conj(C/A)|
    digits: int

    def to_dict(self) -> dict:
        d = self.digits
        return {"tau_star": [mpmath.nstr(self.tau_star.real, d), mpmath.nstr(self.tau_star.imag, d)],
                "conjugate_residual": mpmath.nstr(self.residual, 5), "precision_digits": d}


def cayley_fixed_point(L: ThetaOperator, path: PathPolyline, gauge_shift=1) -> CayleyPoint:
    """Image ``tau*`` of ``z = infinity`` under the normalized period.

    ``path`` runs from a point near 0 to a point near infinity.  With
    ``pi0 = A u1 + B u2`` and ``tau pi0 = C u1 + D u2`` in the local basis at
    infinity (``u1`` of smaller exponent), ``tau -> C/A`` at infinity.
    """
    idata = None
    try:
        from .frobenius import indicial_roots

        idata = indicial_roots(L, INFINITY)
    except Exception as exc:  # pragma: no cover - surfaced below
        raise NoOrbifoldPoint(f"no usable local basis at infinity: {exc}") from exc
    if L.order != 2 or len(idata.roots) != 2:
        raise NoOrbifoldPoint("infinity must carry two distinct exponents for a second-order operator")
    digits = path.precision_digits
    ctx = make_context(digits)
    base = _mpc(path.start, ctx)
    pi0, tilde = _period_jets(L, base, digits, ctx, gauge_shift)
    p0, t1 = taylor_continue(L, path, [pi0, tilde], ctx, digits)
    _, inf_jets = local_jets(L, INFINITY, _mpc(path.end, ctx), digits, ctx)
    (A, B), (C, D) = _solve_coefficients([p0, t1], inf_jets, ctx)
    tau = C / A
    return CayleyPoint(tau, abs(D / B - ctx.conj(tau)), digits)


__all__ = [
    "PathPolyline", "Monodromy", "CayleyPoint", "circle_loop", "check_clearance",
    "taylor_continue", "local_jets", "monodromy", "normalized_period_value",
    "fricke_residual", "cayley_fixed_point", "cayley_transform", "loop_around", "expected_determinant", "make_context", "default_digits", "matmul",
    "max_deviation",
]
