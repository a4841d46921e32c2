"""Frobenius method at a regular singular point.

Solutions at a root ``rho0`` of multiplicity ``m`` are the derivatives
``d^k/drho^k [z^rho * sum a_n(rho) z^n]`` at ``rho = rho0``.  Rather than
differentiating closed forms, the recurrence for ``a_n`` is run over
truncated power series in ``eps = rho - rho0`` of order ``m``, which gives
all needed derivatives at once and in exact arithmetic.  Digamma differences
of closed-form coefficients show up here as rational harmonic-number
differences automatically.

Normalization is monic in the logarithm: solution ``k`` is
``k! * [eps^k]`` of the deformed series, so its ``log(z)**k`` part is the
holomorphic solution itself, with constant term 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import sympy

from .diffop import INFINITY, Substitution, ThetaOperator, Z, pullback
from .errors import IrrationalRoots, IrregularSingular, NoLogStructure, ResonantIntegerGap
from .series import LogSolution, TruncatedSeries, as_rational


@dataclass(frozen=True)
class IndicialData:
    point: object
    roots: tuple  # ((root, multiplicity), ...) sorted by root

    @property
    def multiset(self) -> list[Fraction]:
        return [r for r, m in self.roots for _ in range(m)]


@dataclass(frozen=True)
class FrobeniusBasis:
    point: object
    operator: ThetaOperator  # recentered so that the point sits at 0
    solutions: tuple
    order: int
    groups: tuple = field(default=())  # ((root, multiplicity), ...)

    def __len__(self):
        return len(self.solutions)

    def __getitem__(self, k):
        return self.solutions[k]

    def to_list(self) -> list[dict]:
        return [s.to_dict() for s in self.solutions]


def local_operator(L: ThetaOperator, point) -> ThetaOperator:
    """``L`` rewritten in a local coordinate that vanishes at ``point``."""
    if point is INFINITY or (isinstance(point, str) and point in ("infinity", "oo", "inf")):
        return pullback(L, Substitution.reciprocal())
    c = as_rational(point)
    if c == 0:
        return L
    return pullback(L, Substitution.affine(1, c))


def _normalize_point(point):
    if point is INFINITY or (isinstance(point, str) and point in ("infinity", "oo", "inf")):
        return INFINITY
    return as_rational(point)


def indicial_roots(L: ThetaOperator, point=0) -> IndicialData:
    point = _normalize_point(point)
    M = local_operator(L, point)
    lead = M.coeffs[-1]
    if not lead or lead[0] == 0:
        raise IrregularSingular(f"operator is not Fuchsian in theta-form at {point}")
    t = sympy.Symbol("t")
    poly = sympy.Poly(sum(sympy.Integer(p[0] if p else 0) * t**k for k, p in enumerate(M.coeffs)), t)
    _, factors = poly.factor_list()
    roots = {}
    for f, mult in factors:
        if f.degree() != 1:
            raise IrrationalRoots(f"indicial polynomial has the non-rational factor {f.as_expr()}")
        a, b = f.all_coeffs()
        r = -sympy.Rational(b) / sympy.Rational(a)
        r = Fraction(int(r.p), int(r.q))
        roots[r] = roots.get(r, 0) + mult
    return IndicialData(point, tuple(sorted(roots.items())))


def _shifted(poly: list, c: Fraction, order: int) -> TruncatedSeries:
    """``poly(c + eps)`` as a series in ``eps``."""
    coeffs = [Fraction(x) for x in poly]
    out = []
    for _ in range(order):
        val = Fraction(0)
        for x in reversed(coeffs):
            val = val * c + x
        out.append(val)
        # derivative divided by the running index keeps Taylor coefficients
        coeffs = [x * i for i, x in enumerate(coeffs)][1:]
        k = len(out)
        coeffs = [x / k for x in coeffs]
    return TruncatedSeries(out, order)


def deformed_coefficients(M: ThetaOperator, rho0: Fraction, mult: int, N: int) -> list[TruncatedSeries]:
    """``a_n(rho0 + eps)`` for ``n < N`` as series in ``eps`` of order ``mult``."""
    slices = M.indicial_slices()
    d = len(slices) - 1
    a = [TruncatedSeries.one(mult)]
    for n in range(1, N):
        acc = TruncatedSeries.zero(mult)
        for j in range(1, min(n, d) + 1):
            if not any(slices[j]):
                continue
            acc = acc + _shifted(slices[j], rho0 + n - j, mult) * a[n - j]
        denom = _shifted(slices[0], rho0 + n, mult)
        a.append(-acc / denom)
    return a


def frobenius_basis(L: ThetaOperator, point=0, N: int = 20) -> FrobeniusBasis:
    point = _normalize_point(point)
    data = indicial_roots(L, point)
    M = local_operator(L, point)
    roots = [r for r, _ in data.roots]
    for i, r in enumerate(roots):
        for s in roots[i + 1:]:
            diff = s - r
            if diff.denominator == 1:
                raise ResonantIntegerGap(f"indicial roots {r} and {s} differ by an integer")
    sols = []
    for rho0, mult in data.roots:
        a = deformed_coefficients(M, rho0, mult, N)
        for k in range(mult):
            parts = []
            for i in range(k + 1):
                scale = Fraction(math.factorial(k), math.factorial(i))
                parts.append(TruncatedSeries([an.coeffs[k - i] * scale for an in a], N, rho0))
            sols.append(LogSolution(parts, rho0))
    sols.sort(key=lambda s: (s.log_degree, s.exponent))
    return FrobeniusBasis(point, M, tuple(sols), N, data.roots)


def normalized_period_series(basis: FrobeniusBasis) -> TruncatedSeries:
    """``S`` with ``pi1/pi0 = log z + S``; the flat coordinate is ``q = z exp(S)``."""
    pi0 = pi1 = None
    for rho0, mult in basis.groups:
        if mult < 2:
            continue
        group = [s for s in basis.solutions if s.exponent == rho0]
        pi0 = next(s for s in group if s.log_degree == 0)
        pi1 = next(s for s in group if s.log_degree == 1)
        break
    if pi0 is None:
        raise NoLogStructure("no repeated indicial root, so no single-log solution")
    return pi1.parts[0] / pi0.parts[0]


def holomorphic_period(basis: FrobeniusBasis) -> TruncatedSeries:
    for rho0, mult in basis.groups:
        if mult >= 2:
            return next(s for s in basis.solutions
                        if s.exponent == rho0 and s.log_degree == 0).parts[0]
    raise NoLogStructure("no repeated indicial root")
