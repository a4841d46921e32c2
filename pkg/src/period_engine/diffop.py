"""Linear differential operators in ``theta = z d/dz``.

:class:`ThetaOperator` is the canonical storage: integer polynomial
coefficients of the powers of theta, polynomial placed to the left, with the
common polynomial content divided out.  :class:`DerivOperator` is the same
operator written in ``d/dz`` with rational-function coefficients; it is the
natural form for gauge transformations, normal forms and symmetric powers.
Rational-function algebra in this module goes through sympy.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache, reduce
from typing import Sequence

import sympy

from .errors import NonRationalGauge, SchemaError, UnsupportedSubstitution, WrongOrder
from .series import LogSolution, TruncatedSeries, as_rational

Z = sympy.Symbol("z")


@lru_cache(maxsize=None)
def stirling2(n: int, k: int) -> int:
    if n == k:
        return 1
    if k == 0 or k > n:
        return 0
    return k * stirling2(n - 1, k) + stirling2(n - 1, k - 1)


@lru_cache(maxsize=None)
def stirling1(n: int, k: int) -> int:
    """Signed Stirling numbers of the first kind: ``x(x-1)...(x-n+1) = sum s(n,k) x**k``."""
    if n == k:
        return 1
    if k == 0 or k > n:
        return 0
    return stirling1(n - 1, k - 1) - (n - 1) * stirling1(n - 1, k)


def _strip(poly: Sequence[int]) -> tuple:
    p = list(poly)
    while p and p[-1] == 0:
        p.pop()
    return tuple(p)


def _poly_expr(coeffs: Sequence, var=Z):
    return sum((sympy.Rational(c) * var**i for i, c in enumerate(coeffs)), sympy.Integer(0))


def _expr_to_coeffs(expr, var=Z) -> list:
    p = sympy.Poly(sympy.expand(expr), var)
    return [Fraction(int(c.p), int(c.q)) for c in reversed(p.all_coeffs())]


def _content_normalize(polys: list[list[Fraction]]) -> tuple:
    """Clear denominators, divide by the polynomial gcd, fix the sign."""
    den = 1
    for p in polys:
        for c in p:
            den = math.lcm(den, Fraction(c).denominator)
    ints = [[int(Fraction(c) * den) for c in p] for p in polys]
    nonzero = [_strip(p) for p in ints if any(p)]
    if not nonzero:
        raise ValueError("the zero operator is not allowed")
    sym = [sympy.Poly(list(reversed(p)), Z, domain="ZZ") for p in nonzero]
    g = reduce(sympy.gcd, sym)
    out = []
    for p in ints:
        if any(p):
            q = sympy.Poly(list(reversed(_strip(p))), Z, domain="ZZ").exquo(g)
            out.append([int(c) for c in reversed(q.all_coeffs())])
        else:
            out.append([])
    while out and not out[-1]:
        out.pop()
    lead = out[-1]
    trailing = next(c for c in lead if c)
    if trailing < 0:
        out = [[-c for c in p] for p in out]
    return tuple(_strip(p) for p in out)


class ThetaOperator:
    """``sum_k p_k(z) theta**k`` with integer, content-normalized ``p_k``.

    ``coeffs[k]`` lists the coefficients of ``p_k`` from degree 0 upward.  The
    common polynomial gcd of all ``p_k`` is divided out and the lowest nonzero
    coefficient of the leading ``p_k`` is made positive, so two operators that
    differ by a left polynomial factor compare equal.
    """

    __slots__ = ("var", "coeffs")

    def __init__(self, coeffs: Sequence[Sequence], var: str = "z"):
        polys = [[as_rational(c) for c in p] for p in coeffs]
        object.__setattr__(self, "coeffs", _content_normalize(polys))
        object.__setattr__(self, "var", var)

    def __setattr__(self, name, value):
        raise AttributeError("ThetaOperator is immutable")

    @classmethod
    def from_expression(cls, expr, theta_symbol, var=Z, name: str = "z") -> "ThetaOperator":
        """Build from a sympy polynomial in ``var`` and ``theta_symbol``.

        Products are read with the ``var`` factor on the left.
        """
        poly = sympy.Poly(sympy.expand(expr), theta_symbol)
        deg = poly.degree()
        coeffs = []
        for k in range(deg + 1):
            c = poly.coeff_monomial(theta_symbol**k)
            coeffs.append(_expr_to_coeffs(c, var) if c != 0 else [])
        return cls(coeffs, name)

    @classmethod
    def hypergeometric(cls, upper: Sequence, lower: Sequence, var: str = "z") -> "ThetaOperator":
        """Operator ``theta * prod(theta + b - 1) - z * prod(theta + a)`` of ``pFq``."""
        t = sympy.Symbol("T")
        left = t
        for b in lower:
            left *= t + sympy.Rational(as_rational(b)) - 1
        right = sympy.Integer(1)
        for a in upper:
            right *= t + sympy.Rational(as_rational(a))
        return cls.from_expression(left - Z * right, t, Z, var)

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    @property
    def degree(self) -> int:
        return max(len(p) for p in self.coeffs) - 1

    def poly(self, k: int) -> tuple:
        return self.coeffs[k] if k < len(self.coeffs) else ()

    def __eq__(self, other):
        if not isinstance(other, ThetaOperator):
            return NotImplemented
        return self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def __repr__(self):
        return f"ThetaOperator({[list(p) for p in self.coeffs]!r}, var={self.var!r})"

    def __str__(self):
        terms = []
        for k, p in enumerate(self.coeffs):
            if not p:
                continue
            poly = sympy.sstr(_poly_expr(p, sympy.Symbol(self.var)))
            th = "" if k == 0 else ("theta" if k == 1 else f"theta^{k}")
            terms.append(f"({poly})*{th}" if th else f"({poly})")
        return " + ".join(terms)

    # -- recurrence data ----------------------------------------------------

    def indicial_slices(self) -> list[list[int]]:
        """``P_j(theta)`` with ``L = sum_j z**j P_j(theta)``; ``P_j[k]`` is the theta**k coefficient."""
        out = []
        for j in range(self.degree + 1):
            out.append([p[j] if j < len(p) else 0 for p in self.coeffs])
        return out

    def deriv_polynomials(self) -> list[list[int]]:
        """Polynomial coefficients ``A_j(z)`` of ``sum_j A_j(z) (d/dz)**j``."""
        n = self.order
        out = []
        for j in range(n + 1):
            acc = [0] * (self.degree + 1 + j)
            for k in range(j, n + 1):
                s = stirling2(k, j)
                if not s:
                    continue
                for i, c in enumerate(self.poly(k)):
                    acc[i + j] += s * c
            out.append(list(_strip(acc)))
        return out

    def to_deriv(self) -> "DerivOperator":
        return DerivOperator([_poly_expr(p) for p in self.deriv_polynomials()])

    # -- interchange --------------------------------------------------------

    def to_dict(self) -> dict:
        return {"var": self.var, "theta_coeffs": [list(p) for p in self.coeffs]}

    @classmethod
    def from_dict(cls, data) -> "ThetaOperator":
        try:
            var = data.get("var", "z")
            raw = data["theta_coeffs"]
        except (AttributeError, KeyError) as exc:
            raise SchemaError(f"malformed operator document: {exc}") from exc
        if not isinstance(var, str) or not isinstance(raw, list) or not raw:
            raise SchemaError("operator document needs a 'var' label and a non-empty 'theta_coeffs' list")
        for p in raw:
            if not isinstance(p, list) or not all(isinstance(c, int) and not isinstance(c, bool) for c in p):
                raise SchemaError("theta_coeffs entries must be lists of integers")
        try:
            return cls(raw, var)
        except ValueError as exc:
            raise SchemaError(str(exc)) from exc

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, text: str) -> "ThetaOperator":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise SchemaError(str(exc)) from exc
        return cls.from_dict(data)


class DerivOperator:
    """``sum_k c_k(z) (d/dz)**k`` with rational-function coefficients."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Sequence):
        cs = [sympy.cancel(sympy.sympify(c)) for c in coeffs]
        while len(cs) > 1 and cs[-1] == 0:
            cs.pop()
        if not cs or cs[-1] == 0:
            raise ValueError("the zero operator is not allowed")
        object.__setattr__(self, "coeffs", tuple(cs))

    def __setattr__(self, name, value):
        raise AttributeError("DerivOperator is immutable")

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    @property
    def leading(self):
        return self.coeffs[-1]

    def monic(self) -> "DerivOperator":
        lead = self.leading
        return DerivOperator([c / lead for c in self.coeffs])

    def coefficient(self, k: int):
        return self.coeffs[k] if k < len(self.coeffs) else sympy.Integer(0)

    def __eq__(self, other):
        if not isinstance(other, DerivOperator):
            return NotImplemented
        return self.order == other.order and all(
            sympy.cancel(a - b) == 0 for a, b in zip(self.coeffs, other.coeffs))

    __hash__ = None

    def proportional_to(self, other: "DerivOperator") -> bool:
        return self.monic() == other.monic()

    def __repr__(self):
        return f"DerivOperator({[sympy.sstr(c) for c in self.coeffs]})"

    def apply(self, expr):
        """Apply to a sympy expression in ``z``."""
        return sympy.simplify(sum(c * sympy.diff(expr, Z, k) for k, c in enumerate(self.coeffs)))

    def compose_left(self, factor) -> "DerivOperator":
        """``factor * self`` for a function ``factor`` of ``z``."""
        return DerivOperator([factor * c for c in self.coeffs])

    def gauge(self, log_derivative) -> "DerivOperator":
        """Operator acting on ``w`` where ``y = g w`` and ``g'/g = log_derivative``.

        Returns ``L(g w) / g`` written as an operator in ``w``.
        """
        log_derivative = sympy.sympify(log_derivative)
        if not log_derivative.is_rational_function(Z):
            raise NonRationalGauge(f"gauge log-derivative {log_derivative} is not a rational function of z")
        n = self.order
        # h[m] = g^{(m)} / g
        h = [sympy.Integer(1)]
        for _ in range(n):
            prev = h[-1]
            h.append(sympy.cancel(sympy.diff(prev, Z) + prev * log_derivative))
        out = [sympy.Integer(0)] * (n + 1)
        for k, c in enumerate(self.coeffs):
            for j in range(k + 1):
                out[j] += c * math.comb(k, j) * h[k - j]
        return DerivOperator(out)

    def to_theta(self, var: str = "z") -> ThetaOperator:
        n = self.order
        theta_coeffs = [sympy.Integer(0)] * (n + 1)
        for j, c in enumerate(self.coeffs):
            for k in range(j + 1):
                s = stirling1(j, k)
                if s:
                    theta_coeffs[k] += c * s / Z**j
        fracs = [sympy.fraction(sympy.cancel(c)) for c in theta_coeffs]
        den = sympy.Integer(1)
        for _, d in fracs:
            den = sympy.lcm(den, d)
        polys = []
        for num, d in fracs:
            p = sympy.cancel(num * den / d)
            polys.append(_expr_to_coeffs(p) if p != 0 else [])
        return ThetaOperator(polys, var)


# ---------------------------------------------------------------------------
# application to series


def apply(L: ThetaOperator, f) -> LogSolution:
    """Apply ``L`` to a (log-)series exactly."""
    if isinstance(f, TruncatedSeries):
        f = LogSolution.from_series(f)
    current = f
    result = None
    for k, p in enumerate(L.coeffs):
        if k:
            current = current.theta()
        if p:
            term = current.mul_polynomial(p)
            result = term if result is None else result + term
    return result


# ---------------------------------------------------------------------------
# change of variable


@dataclass(frozen=True)
class Substitution:
    """A change of variable ``w = phi(z)`` from the supported menu.

    ``kind`` is ``"affine"`` (``params = (a, b)`` for ``a z + b``),
    ``"reciprocal"`` (``1/z``) or ``"polynomial"`` (``params`` = coefficients,
    lowest degree first).
    """

    kind: str
    params: tuple = ()

    @classmethod
    def affine(cls, a, b) -> "Substitution":
        return cls("affine", (as_rational(a), as_rational(b)))

    @classmethod
    def reciprocal(cls) -> "Substitution":
        return cls("reciprocal")

    @classmethod
    def polynomial(cls, coeffs) -> "Substitution":
        return cls("polynomial", tuple(as_rational(c) for c in coeffs))

    def expression(self):
        if self.kind == "affine":
            a, b = self.params
            if a == 0:
                raise UnsupportedSubstitution("affine substitution must be non-constant")
            return sympy.Rational(a) * Z + sympy.Rational(b)
        if self.kind == "reciprocal":
            return 1 / Z
        if self.kind == "polynomial":
            if len(_strip([c for c in self.params])) < 2:
                raise UnsupportedSubstitution("polynomial substitution must be non-constant")
            return _poly_expr(self.params)
        raise UnsupportedSubstitution(f"unsupported substitution kind {self.kind!r}")

    def inverse(self) -> "Substitution":
        if self.kind == "affine":
            a, b = self.params
            return Substitution.affine(1 / a, -b / a)
        if self.kind == "reciprocal":
            return self
        raise UnsupportedSubstitution("only affine and reciprocal substitutions are invertible here")


def pullback(L: ThetaOperator, phi: Substitution) -> ThetaOperator:
    """Operator whose solutions are ``f(phi(z))`` for the solutions ``f`` of ``L``."""
    if not isinstance(phi, Substitution):
        raise UnsupportedSubstitution(f"not a supported substitution: {phi!r}")
    w = phi.expression()
    dw = sympy.diff(w, Z)
    ratio = sympy.cancel(w / dw)  # theta_w = ratio * d/dz
    total = [sympy.Integer(0)]
    power = [sympy.Integer(1)]  # theta_w**k as d/dz coefficients
    for k, p in enumerate(L.coeffs):
        if k:
            nxt = [sympy.Integer(0)] * (len(power) + 1)
            for j, c in enumerate(power):
                nxt[j] += ratio * sympy.diff(c, Z)
                nxt[j + 1] += ratio * c
            power = [sympy.cancel(c) for c in nxt]
        if p:
            factor = _poly_expr(p).subs(Z, w)
            while len(total) < len(power):
                total.append(sympy.Integer(0))
            for j, c in enumerate(power):
                total[j] += factor * c
    return DerivOperator(total).to_theta(L.var)


# ---------------------------------------------------------------------------
# normal forms and symmetric powers


def _as_deriv(L) -> DerivOperator:
    return L.to_deriv() if isinstance(L, ThetaOperator) else L


def normal_form(L) -> tuple[DerivOperator, object]:
    """Monic operator with vanishing sub-leading coefficient, and the gauge used.

    Returns ``(N, ell)`` where solutions of ``L`` are ``g * (solutions of N)``
    with ``g'/g = ell``.
    """
    L = _as_deriv(L).monic()
    n = L.order
    if n == 0:
        return L, sympy.Integer(0)
    ell = sympy.cancel(-L.coefficient(n - 1) / n)
    return L.gauge(ell).monic(), ell


def symmetric_square(L2) -> DerivOperator:
    """Third-order operator annihilating all products of two solutions of ``L2``."""
    L2 = _as_deriv(L2)
    if L2.order != 2:
        raise WrongOrder(f"symmetric_square needs order 2, got {L2.order}")
    a0, a1, a2 = L2.coeffs
    d = lambda e: sympy.diff(e, Z)  # noqa: E731
    return DerivOperator([
        2 * a2 * d(a0) - 2 * a0 * d(a2) + 4 * a0 * a1,
        a2 * (4 * a0 + d(a1)) + a1 * (2 * a1 - d(a2)),
        3 * a1 * a2,
        a2**2,
    ])


def symmetric_power(L2, m: int) -> DerivOperator:
    """``m``-th symmetric power of a second-order operator.

    Works on the basis ``y**(m-k) y'**k`` of degree-``m`` monomials in a
    solution and its derivative, differentiates ``y**m`` repeatedly and reads
    off the linear relation among the first ``m + 1`` derivatives.
    """
    L2 = _as_deriv(L2).monic()
    if L2.order != 2:
        raise WrongOrder(f"symmetric_power needs order 2, got {L2.order}")
    q, p = L2.coeffs[0], L2.coeffs[1]

    def deriv(vec):
        out = [sympy.Integer(0)] * (m + 1)
        for k, c in enumerate(vec):
            if c == 0:
                continue
            out[k] += sympy.diff(c, Z)
            if k < m:
                out[k + 1] += c * (m - k)
            out[k] += -k * p * c
            if k > 0:
                out[k - 1] += -k * q * c
        return [sympy.cancel(c) for c in out]

    rows = [[sympy.Integer(1)] + [sympy.Integer(0)] * m]
    for _ in range(m + 1):
        rows.append(deriv(rows[-1]))
    # find c with sum_i c_i rows[i] = 0 and c_{m+1} = 1
    mat = sympy.Matrix([[rows[i][k] for i in range(m + 1)] for k in range(m + 1)])
    rhs = sympy.Matrix([-rows[m + 1][k] for k in range(m + 1)])
    sol = mat.LUsolve(rhs)
    return DerivOperator([sympy.cancel(c) for c in sol] + [sympy.Integer(1)])


def symmetric_cube(L2) -> DerivOperator:
    return symmetric_power(L2, 3)


def _witness_from_normal_form(Q, ell, m: int) -> DerivOperator:
    # solutions of the witness are g**(1/m) * v with v'' + Q v = 0
    mu = sympy.cancel(ell / m)
    return DerivOperator([sympy.cancel(mu**2 - sympy.diff(mu, Z) + Q), -2 * mu, sympy.Integer(1)])


def is_symmetric_square(L3):
    """Second-order witness ``M`` with ``symmetric_square(M) ~ L3``, or None."""
    L3 = _as_deriv(L3)
    if L3.order != 3:
        raise WrongOrder(f"is_symmetric_square needs order 3, got {L3.order}")
    N, ell = normal_form(L3)
    b0, b1 = N.coeffs[0], N.coeffs[1]
    Q = sympy.cancel(b1 / 4)
    if sympy.cancel(b0 - 2 * sympy.diff(Q, Z)) != 0:
        return None
    return _witness_from_normal_form(Q, ell, 2)


def is_symmetric_cube(L4):
    """Second-order witness ``M`` with ``symmetric_cube(M) ~ L4``, or None.

    The candidate is read off the ``d**2`` coefficient of the normal form and
    confirmed by constructing its cube and comparing.
    """
    L4 = _as_deriv(L4)
    if L4.order != 4:
        raise WrongOrder(f"is_symmetric_cube needs order 4, got {L4.order}")
    N, ell = normal_form(L4)
    Q = sympy.cancel(N.coeffs[2] / 10)
    candidate = DerivOperator([Q, 0, 1])
    if symmetric_power(candidate, 3).monic() != N:
        return None
    return _witness_from_normal_form(Q, ell, 3)


def gauge_equivalent(A, B) -> bool:
    """Same normal form, i.e. solutions differ by a common factor."""
    A, B = _as_deriv(A), _as_deriv(B)
    return A.order == B.order and normal_form(A)[0] == normal_form(B)[0]


# ---------------------------------------------------------------------------
# singularities


class _Infinity:
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "INFINITY"

    def __str__(self):
        return "infinity"

    def __reduce__(self):
        return (_Infinity, ())


INFINITY = _Infinity()


def _finite_singular_polynomial(L: ThetaOperator):
    A = [_poly_expr(p) for p in L.deriv_polynomials()]
    den = sympy.Integer(1)
    for a in A[:-1]:
        if a == 0:
            continue
        _, d = sympy.fraction(sympy.cancel(a / A[-1]))
        den = sympy.lcm(den, d)
    return sympy.Poly(den, Z)


def _roots(poly: sympy.Poly):
    exact, approx = [], []
    if poly.degree() <= 0:
        return exact, approx
    _, factors = poly.factor_list()
    for f, _mult in factors:
        if f.degree() == 1:
            a, b = f.all_coeffs()
            r = -sympy.Rational(b) / sympy.Rational(a)
            exact.append(Fraction(int(r.p), int(r.q)))
        else:
            for r in f.nroots(n=30):
                approx.append(complex(r))
    return exact, approx


def singular_points(L: ThetaOperator) -> list:
    """Rational singular points, numeric approximations of irrational ones, and ``INFINITY``."""
    exact, approx = _roots(_finite_singular_polynomial(L))
    out = sorted(set(exact)) + approx
    at_inf = pullback(L, Substitution.reciprocal())
    if _finite_singular_polynomial(at_inf).eval(0) == 0:
        out.append(INFINITY)
    return out
