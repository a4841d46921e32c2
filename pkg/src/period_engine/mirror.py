"""Mirror maps, Yukawa couplings and the prepotential.

Flat-coordinate derivatives are ``q d/dq``; no factor of ``2 pi i`` ever
enters the exact series.  With the monic-log Frobenius basis, ``q = z exp(S)``
has leading coefficient 1; ``gauge_shift`` rescales ``q -> q / kappa`` when a
particular integral normalization is wanted.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
import sympy

from .diffop import ThetaOperator, Z, _poly_expr
from .errors import (
    DegeneratePotential,
    DivergentTail,
    NonClosedForm,
    NonzeroConstantMismatch,
    WrongOrder,
)
from .frobenius import frobenius_basis, holomorphic_period, normalized_period_series
from .series import TruncatedSeries, as_rational, series_compose, series_elementary, series_reverse


@dataclass(frozen=True)
class MirrorMap:
    q_of_z: TruncatedSeries
    z_of_q: TruncatedSeries
    order: int
    holomorphic_period: TruncatedSeries  # pi0 as a series in z
    gauge_shift: Fraction = Fraction(1)

    def to_dict(self) -> dict:
        return {
            "order": self.order,
            "gauge_shift": str(self.gauge_shift),
            "q_of_z": self.q_of_z.to_dict(),
            "z_of_q": self.z_of_q.to_dict(),
        }


def mirror_map(L: ThetaOperator, N: int = 20, gauge_shift=1) -> MirrorMap:
    """Mirror map at ``z = 0``, known through degree ``N``."""
    basis = frobenius_basis(L, 0, N)
    S = normalized_period_series(basis)
    kappa = as_rational(gauge_shift)
    q = (series_elementary(S, "exp").shift(1) * (1 / kappa)).with_exponent(0)
    return MirrorMap(q, series_reverse(q), N, holomorphic_period(basis), kappa)


def integral_scale(series: TruncatedSeries) -> int:
    """Smallest positive integer ``k`` with ``c_n * k**n`` integral for all stored ``n``.

    For a hypergeometric holomorphic period this is the classical scaling
    (27 for 2F1(1/3,2/3;1), 256 for 3F2(1/4,1/2,3/4;1,1), ...).
    """
    s = series.with_exponent(0) if series.exponent > 0 else series
    need = {}
    for n, c in enumerate(s.coeffs):
        if n == 0 or c.denominator == 1:
            continue
        for p, e in sympy.factorint(c.denominator).items():
            v = -(-e // n)
            if v > need.get(p, 0):
                need[p] = v
    out = 1
    for p, v in need.items():
        out *= p**v
    return out


# ---------------------------------------------------------------------------
# Yukawa couplings


@dataclass(frozen=True)
class YukawaAlgebraic:
    """``z**exponent * num(z) / den(z)`` with ``num(0) == den(0)``."""

    num: tuple
    den: tuple
    exponent: Fraction
    operator_order: int = 2

    def in_theta_frame(self) -> "YukawaAlgebraic":
        """Same coupling with ``theta``-lower indices: multiplied by ``z**(n-1)``."""
        return YukawaAlgebraic(self.num, self.den, self.exponent + self.operator_order - 1, self.operator_order)

    def expression(self):
        return Z ** sympy.Rational(self.exponent) * _poly_expr(self.num) / _poly_expr(self.den)

    def render(self, var: str = "z") -> str:
        return sympy.sstr(self.expression().subs(Z, sympy.Symbol(var)))

    def series(self, N: int = 20) -> TruncatedSeries:
        n = TruncatedSeries(self.num, N)
        d = TruncatedSeries(self.den, N)
        return (n / d).shift(self.exponent)

    def to_dict(self) -> dict:
        return {"num": list(self.num), "den": list(self.den), "exponent": str(self.exponent)}

    def __str__(self):
        return sympy.sstr(self.expression())


@dataclass(frozen=True)
class YukawaCoupling:
    algebraic: YukawaAlgebraic
    flat: TruncatedSeries
    normalization: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"algebraic": self.algebraic.to_dict(), "flat": self.flat.to_dict(),
                "normalization": {k: str(v) for k, v in self.normalization.items()}}


def yukawa_algebraic(L: ThetaOperator) -> YukawaAlgebraic:
    """Closed-form coupling ``C_{z...z}`` (``order - 1`` lower indices).

    It solves ``C' = -(2/n) (a_{n-1}/a_n) C`` for the ``d/dz`` form of ``L``,
    which follows from Griffiths transversality applied to the period
    Wronskian, and calibrates the leading Laurent coefficient at 0 to 1.
    """
    n = L.order
    if n < 2:
        raise WrongOrder("Yukawa couplings need an operator of order at least 2")
    D = L.to_deriv()
    r = sympy.cancel(-sympy.Rational(2, n) * D.coefficient(n - 1) / D.leading)
    num, den = sympy.fraction(r)
    if num == 0:
        return YukawaAlgebraic((1,), (1,), Fraction(0), n)
    pnum, pden = sympy.Poly(num, Z), sympy.Poly(den, Z)
    if pnum.degree() >= pden.degree() and not pnum.is_zero:
        raise NonClosedForm(f"log-derivative {r} has a polynomial part")
    _, factors = pden.factor_list()
    if any(m > 1 for _, m in factors):
        raise NonClosedForm(f"log-derivative {r} has a higher-order pole")
    polys = [f for f, _ in factors]
    es = sympy.symbols(f"e0:{len(polys)}")
    combo = sum((e * sympy.diff(p.as_expr(), Z) * sympy.prod([q.as_expr() for q in polys if q is not p])
                 for e, p in zip(es, polys)), sympy.Integer(0))
    total = sympy.prod([p.as_expr() for p in polys])
    residual = sympy.expand(sympy.cancel(r * total) - combo)
    eqs = sympy.Poly(residual, Z).coeffs() if residual != 0 else []
    sol = sympy.solve(eqs, es, dict=True) if eqs else [{e: 0 for e in es}]
    if not sol or any(e not in sol[0] or sol[0][e].free_symbols for e in es):
        raise NonClosedForm(f"log-derivative {r} is not a rational combination of logarithmic derivatives")
    sol = sol[0]
    exponent = Fraction(0)
    num_poly = sympy.Integer(1)
    den_poly = sympy.Integer(1)
    report = {}
    for e, p in zip(es, polys):
        val = sympy.Rational(sol[e])
        report[str(p.as_expr())] = str(val)
        coeffs = p.all_coeffs()
        if p.degree() == 1 and coeffs[-1] == 0:
            exponent += Fraction(int(val.p), int(val.q))
            continue
        if val.q != 1:
            raise NonClosedForm(f"non-integral exponent data {report}")
        prim = p.primitive()[1]
        if prim.eval(0) < 0:
            prim = -prim
        if val > 0:
            num_poly *= prim.as_expr() ** int(val)
        elif val < 0:
            den_poly *= prim.as_expr() ** int(-val)
    n0 = sympy.Poly(num_poly, Z).eval(0)
    d0 = sympy.Poly(den_poly, Z).eval(0)
    num_poly, den_poly = sympy.expand(num_poly * d0), sympy.expand(den_poly * n0)
    as_ints = lambda e: tuple(int(c) for c in reversed(sympy.Poly(e, Z).all_coeffs()))  # noqa: E731
    return YukawaAlgebraic(as_ints(num_poly), as_ints(den_poly), exponent, n)


def theta_q(f: TruncatedSeries) -> TruncatedSeries:
    """``q d/dq``."""
    return f.theta()


def yukawa_flat(L: ThetaOperator, N: int = 20, gauge_shift=1) -> YukawaCoupling:
    """Coupling in the flat coordinate, known modulo ``q**N``.

    ``C_flat = (theta_q z)**(n-1) * C_alg(z(q)) / pi0(z(q))**2``.
    """
    n = L.order
    alg = yukawa_algebraic(L)
    mm = mirror_map(L, N, gauge_shift)
    zq = mm.z_of_q
    extra = N + 2
    dz = theta_q(zq).normalized()
    c_alg = series_compose(alg.series(extra), zq)
    pi0 = series_compose(mm.holomorphic_period, zq)
    flat = dz ** (n - 1) * c_alg / (pi0 * pi0)
    flat = flat.normalized()
    if flat.exponent != 0:
        raise NonClosedForm(f"flat coupling starts at q^{flat.exponent}")
    flat = flat.truncate(N)
    return YukawaCoupling(alg, flat, {"constant": flat.coefficient(0)})


# ---------------------------------------------------------------------------
# prepotential


DEFAULT_QUADRATIC = {"c2": "c2", "c1": "c1", "constant": "chi*zeta(3)/2"}


@dataclass(frozen=True)
class Prepotential:
    """``F = kappa t^3/6 + Q2(t) + F_inst(q)``; ``Q2`` is kept as opaque labels."""

    kappa: Fraction
    instanton: TruncatedSeries
    quadratic_part: dict = field(default_factory=lambda: dict(DEFAULT_QUADRATIC))

    def yukawa(self) -> TruncatedSeries:
        """Third ``q d/dq`` derivative: the flat coupling this prepotential encodes."""
        return self.instanton.theta().theta().theta() + self.kappa

    def to_dict(self) -> dict:
        return {"kappa": str(self.kappa), "quadratic_part": dict(self.quadratic_part),
                "instanton": self.instanton.to_dict()}


def prepotential_from_yukawa(C: TruncatedSeries, kappa) -> Prepotential:
    kappa = as_rational(kappa)
    c = C.with_exponent(0) if C.exponent > 0 else C
    if c.exponent != 0:
        raise NonzeroConstantMismatch("flat coupling must be a power series in q")
    if c.order == 0 or c.coeffs[0] != kappa:
        got = c.coeffs[0] if c.order else None
        raise NonzeroConstantMismatch(f"constant term {got} differs from kappa = {kappa}")
    inst = [Fraction(0)] + [c.coeffs[d] / d**3 for d in range(1, c.order)]
    return Prepotential(kappa, TruncatedSeries(inst, c.order))


# ---------------------------------------------------------------------------
# special geometry


def _instanton_terms(series: TruncatedSeries, q, ctx, derivs: int):
    """Values of ``sum d**k f_d q**d`` for ``k = 0..derivs``."""
    out = [ctx.mpc(0)] * (derivs + 1)
    qd = ctx.mpc(1)
    for d, f in enumerate(series.coeffs):
        if d:
            qd *= q
        if not f:
            continue
        fv = ctx.mpf(f.numerator) / f.denominator
        for k in range(derivs + 1):
            out[k] += fv * d**k * qd
    return out


def _check_domain(F: Prepotential, t, tbar, ctx):
    q = ctx.exp(2j * ctx.pi * t)
    qb = ctx.exp(-2j * ctx.pi * tbar)
    if not F.instanton.is_zero() and (abs(q) >= 1 or abs(qb) >= 1):
        raise DivergentTail("instanton series evaluated outside |q| < 1")
    if F.kappa == 0 and F.instanton.is_zero():
        raise DegeneratePotential("kappa = 0 with no instanton part gives a vanishing potential")
    return q, qb


def special_geometry_potential(F: Prepotential, t, conjugate_t, ctx=None):
    """``exp(-K)`` on a one-parameter slice, quadratic part gauged to zero.

    ``t`` and ``conjugate_t`` are independent arguments so the result can be
    differentiated holomorphically in each; the flat coordinate is
    ``q = exp(2 pi i t)`` and ``d/dt = 2 pi i q d/dq``.
    """
    import mpmath

    ctx = ctx or mpmath.mp
    t, tb = ctx.mpmathify(t), ctx.mpmathify(conjugate_t)
    q, qb = _check_domain(F, t, tb, ctx)
    two_pi_i = 2j * ctx.pi
    g0, g1, _ = _instanton_terms(F.instanton, q, ctx, 2)
    h0, h1, _ = _instanton_terms(F.instanton, qb, ctx, 2)
    D = t - tb
    kappa = ctx.mpf(F.kappa.numerator) / F.kappa.denominator
    dG = two_pi_i * g1
    dH = -two_pi_i * h1
    return kappa / 6 * D**3 + D * (dG + dH) - 2 * (g0 - h0)


def weil_petersson_metric(F: Prepotential, t, ctx=None):
    """``-d_t d_tbar log exp(-K)`` from closed-form derivatives of the potential."""
    import mpmath

    ctx = ctx or mpmath.mp
    t = ctx.mpmathify(t)
    tb = ctx.conj(t)
    q, qb = _check_domain(F, t, tb, ctx)
    two_pi_i = 2j * ctx.pi
    g0, g1, g2 = _instanton_terms(F.instanton, q, ctx, 2)
    h0, h1, h2 = _instanton_terms(F.instanton, qb, ctx, 2)
    G1, G2 = two_pi_i * g1, two_pi_i**2 * g2
    H1, H2 = -two_pi_i * h1, two_pi_i**2 * h2
    kappa = ctx.mpf(F.kappa.numerator) / F.kappa.denominator
    D = t - tb
    u = kappa / 6 * D**3 + D * (G1 + H1) - 2 * (g0 - h0)
    ut = kappa / 2 * D**2 + H1 - G1 + D * G2
    utb = -kappa / 2 * D**2 + H1 - G1 + D * H2
    uttb = -kappa * D + H2 - G2
    return -(u * uttb - ut * utb) / u**2


def metric_from_potential(F: Prepotential, t, ctx=None):
    """``-d_t d_tbar log exp(-K)`` by numerical differentiation of ``special_geometry_potential``."""
    import mpmath

    ctx = ctx or mpmath.mp
    t = ctx.mpmathify(t)

    def logpot(a, b):
        return ctx.log(special_geometry_potential(F, a, b, ctx))

    return -ctx.diff(logpot, (t, ctx.conj(t)), (1, 1))


def poincare_metric(t, ctx=None):
    """``-d d-bar log (Im t)**3 = 3 / (4 (Im t)**2)``."""
    import mpmath

    ctx = ctx or mpmath.mp
    y = ctx.im(ctx.mpmathify(t))
    return ctx.mpf(3) / (4 * y**2)


def symmetric_cube_operator(L2) -> ThetaOperator:
    """theta-form of the symmetric cube of a second-order operator."""
    from .diffop import symmetric_cube

    return symmetric_cube(L2.to_deriv() if isinstance(L2, ThetaOperator) else L2).to_theta()


def random_flat_yukawa(rng, kappa, N: int = 20, height: int = 50) -> TruncatedSeries:
    """Flat coupling with constant ``kappa`` and random rational tail (testing aid)."""
    coeffs = [as_rational(kappa)] + [Fraction(rng.randint(-height, height), rng.randint(1, height))
                                     for _ in range(N - 1)]
    return TruncatedSeries(coeffs, N)


__all__ = [
    "MirrorMap", "YukawaAlgebraic", "YukawaCoupling", "Prepotential",
    "mirror_map", "integral_scale", "yukawa_algebraic", "yukawa_flat", "theta_q",
    "prepotential_from_yukawa", "special_geometry_potential", "weil_petersson_metric", "metric_from_potential",
    "poincare_metric", "symmetric_cube_operator",
]

