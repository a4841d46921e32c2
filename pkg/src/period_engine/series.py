"""Truncated power series with exact rational coefficients.

A :class:`TruncatedSeries` represents

    z**exponent * (c[0] + c[1] z + ... + c[N-1] z**(N-1)) + O(z**(exponent + N))

where ``N`` is the relative truncation ``order``.  Keeping the rational
leading exponent separate lets Laurent-type objects such as ``1/(z**2 (1-z))``
and Frobenius solutions ``z**rho * (...)`` share one type.  Arithmetic keeps
track of how much of the result is actually known, so identities can be
checked coefficient by coefficient without spurious tail terms.

:class:`LogSolution` is a finite sum ``sum_k log(z)**k * part[k]``; it is what
the Frobenius method produces and what differential operators act on.

Nothing in this module uses floating point except the explicit numeric
``evaluate`` helpers.
"""

from __future__ import annotations

import json
import math
import re
from fractions import Fraction
from typing import Iterable, Sequence

from . import kernels
from .errors import (
    CompositionDomain,
    DivisionByZeroSeries,
    ElementaryDomain,
    ExponentMismatch,
    NotReversible,
    PoleInParameters,
    SchemaError,
)

DEFAULT_ORDER = 20

_RATIONAL_RE = re.compile(r"^-?\d+(/\d+)?$")


def as_rational(value) -> Fraction:
    """Coerce ints, Fractions and ``"p/q"`` strings to a reduced Fraction."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool) or isinstance(value, float):
        raise SchemaError(f"not an exact rational: {value!r}")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        text = value.strip()
        if not _RATIONAL_RE.match(text):
            raise SchemaError(f"not a rational literal: {value!r}")
        try:
            return Fraction(text)
        except ZeroDivisionError as exc:
            raise SchemaError(f"zero denominator in {value!r}") from exc
    if hasattr(value, "numerator") and hasattr(value, "denominator"):
        return Fraction(int(value.numerator), int(value.denominator))
    raise SchemaError(f"cannot interpret {value!r} as an exact rational")


def rational_str(value: Fraction) -> str:
    return str(value)


def _common_numerators(coeffs: Sequence[Fraction]):
    den = math.lcm(*(c.denominator for c in coeffs)) if coeffs else 1
    return [c.numerator * (den // c.denominator) for c in coeffs], den


def _convolve(a: Sequence[Fraction], b: Sequence[Fraction], n: int) -> list[Fraction]:
    if n <= 0:
        return []
    na, da = _common_numerators(a[:n])
    nb, db = _common_numerators(b[:n])
    den = da * db
    return [Fraction(c, den) for c in kernels.mul_trunc(na, nb, n)]


def _is_integral(x: Fraction) -> bool:
    return x.denominator == 1


class TruncatedSeries:
    """Immutable truncated series ``z**exponent * sum c_k z**k + O(z**(exponent+order))``."""

    __slots__ = ("exponent", "coeffs", "order")

    def __init__(self, coeffs: Iterable = (), order: int | None = DEFAULT_ORDER, exponent=0):
        cs = [as_rational(c) for c in coeffs]
        if order is None:
            order = len(cs)
        if order < 0:
            raise ValueError("truncation order must be non-negative")
        cs = cs[:order] + [Fraction(0)] * (order - len(cs))
        object.__setattr__(self, "coeffs", tuple(cs))
        object.__setattr__(self, "order", order)
        object.__setattr__(self, "exponent", as_rational(exponent))

    def __setattr__(self, name, value):
        raise AttributeError("TruncatedSeries is immutable")

    # -- constructors -------------------------------------------------------

    @classmethod
    def zero(cls, order: int = DEFAULT_ORDER, exponent=0) -> "TruncatedSeries":
        return cls((), order, exponent)

    @classmethod
    def one(cls, order: int = DEFAULT_ORDER) -> "TruncatedSeries":
        return cls((1,), order)

    @classmethod
    def variable(cls, order: int = DEFAULT_ORDER) -> "TruncatedSeries":
        """The series ``z`` itself, known to absolute order ``order``."""
        return cls((0, 1), order)

    @classmethod
    def from_polynomial(cls, coeffs: Iterable, order: int = DEFAULT_ORDER) -> "TruncatedSeries":
        return cls(coeffs, order)

    # -- basic accessors ----------------------------------------------------

    @property
    def precision(self) -> Fraction:
        """Absolute truncation: the result is known modulo ``z**precision``."""
        return self.exponent + self.order

    def __len__(self):
        return self.order

    def __getitem__(self, k: int) -> Fraction:
        """Coefficient of ``z**(exponent + k)``."""
        if k < 0:
            return Fraction(0)
        if k >= self.order:
            raise IndexError(f"coefficient {k} lies beyond truncation order {self.order}")
        return self.coeffs[k]

    def coefficient(self, power) -> Fraction:
        """Coefficient of ``z**power`` (absolute exponent)."""
        k = as_rational(power) - self.exponent
        if not _is_integral(k):
            return Fraction(0)
        k = int(k)
        if k < 0:
            return Fraction(0)
        return self[k]

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def valuation(self) -> int | None:
        """Index of the first nonzero stored coefficient, or None."""
        for k, c in enumerate(self.coeffs):
            if c:
                return k
        return None

    def normalized(self) -> "TruncatedSeries":
        """Shift leading zero coefficients into the exponent."""
        v = self.valuation()
        if not v:
            return self
        return TruncatedSeries(self.coeffs[v:], self.order - v, self.exponent + v)

    def truncate(self, order: int) -> "TruncatedSeries":
        return TruncatedSeries(self.coeffs, min(order, self.order), self.exponent)

    def with_exponent(self, exponent) -> "TruncatedSeries":
        """Re-express at a smaller exponent by padding leading zeros."""
        exponent = as_rational(exponent)
        shift = self.exponent - exponent
        if not _is_integral(shift) or shift < 0:
            raise ExponentMismatch(f"cannot move exponent {self.exponent} to {exponent}")
        shift = int(shift)
        return TruncatedSeries((0,) * shift + self.coeffs, self.order + shift, exponent)

    def shift(self, k) -> "TruncatedSeries":
        """Multiply by ``z**k``."""
        return TruncatedSeries(self.coeffs, self.order, self.exponent + as_rational(k))

    # -- arithmetic ---------------------------------------------------------

    def _promote(self, other) -> "TruncatedSeries":
        if isinstance(other, TruncatedSeries):
            return other
        c = as_rational(other)
        top = self.precision
        order = math.ceil(top) if top > 0 else 0
        return TruncatedSeries((c,), order, 0)

    def _aligned(self, other: "TruncatedSeries"):
        if not _is_integral(self.exponent - other.exponent):
            raise ExponentMismatch(
                f"exponents {self.exponent} and {other.exponent} differ by a non-integer")
        low = min(self.exponent, other.exponent)
        top = min(self.precision, other.precision)
        order = max(int(top - low), 0)
        a = self.with_exponent(low)
        b = other.with_exponent(low)
        return a.truncate(order), b.truncate(order), low

    def __add__(self, other):
        try:
            other = self._promote(other)
        except TypeError:
            return NotImplemented
        if not _is_integral(self.exponent - other.exponent):
            if self.is_zero():
                return other
            if other.is_zero():
                return self
        a, b, low = self._aligned(other)
        n = min(a.order, b.order)
        return TruncatedSeries([x + y for x, y in zip(a.coeffs, b.coeffs)], n, low)

    __radd__ = __add__

    def __neg__(self):
        return TruncatedSeries([-c for c in self.coeffs], self.order, self.exponent)

    def __sub__(self, other):
        try:
            other = self._promote(other)
        except TypeError:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, TruncatedSeries):
            n = min(self.order, other.order)
            return TruncatedSeries(_convolve(self.coeffs, other.coeffs, n), n,
                                   self.exponent + other.exponent)
        try:
            c = as_rational(other)
        except TypeError:
            return NotImplemented
        return TruncatedSeries([c * x for x in self.coeffs], self.order, self.exponent)

    __rmul__ = __mul__

    def mul_polynomial(self, poly: Sequence) -> "TruncatedSeries":
        """Multiply by an exact polynomial; no precision is lost."""
        p = [as_rational(c) for c in poly]
        return TruncatedSeries(_convolve(self.coeffs, p, self.order), self.order, self.exponent)

    def inverse(self) -> "TruncatedSeries":
        f = self.normalized()
        if f.is_zero():
            raise DivisionByZeroSeries("series vanishes to its truncation order")
        u = f.coeffs
        n = f.order
        inv0 = 1 / u[0]
        w = [inv0]
        for k in range(1, n):
            s = sum(u[i] * w[k - i] for i in range(1, k + 1))
            w.append(-s * inv0)
        return TruncatedSeries(w, n, -f.exponent)

    def __truediv__(self, other):
        if isinstance(other, TruncatedSeries):
            return self * other.inverse()
        try:
            c = as_rational(other)
        except TypeError:
            return NotImplemented
        if c == 0:
            raise DivisionByZeroSeries("division by the zero constant")
        return self * (1 / c)

    def __rtruediv__(self, other):
        return self.inverse() * as_rational(other)

    def __pow__(self, k):
        if isinstance(k, int):
            if k < 0:
                return self.inverse() ** (-k)
            result = None
            base = self
            while k:
                if k & 1:
                    result = base if result is None else result * base
                k >>= 1
                if k:
                    base = base * base
            return result if result is not None else TruncatedSeries.one(self.order)
        return series_elementary(self, ("pow", k))

    def theta(self) -> "TruncatedSeries":
        """Apply ``z d/dz``."""
        e = self.exponent
        return TruncatedSeries([(e + k) * c for k, c in enumerate(self.coeffs)],
                               self.order, e)

    def derivative(self) -> "TruncatedSeries":
        """Apply ``d/dz``."""
        out = self.theta().shift(-1)
        if self.exponent == 0 and out.order:
            # theta kills the constant term, so the result stays a power series
            return TruncatedSeries(out.coeffs[1:], out.order - 1, 0)
        return out

    def __call__(self, g: "TruncatedSeries") -> "TruncatedSeries":
        return series_compose(self, g)

    # -- comparison ---------------------------------------------------------

    def __eq__(self, other):
        if isinstance(other, TruncatedSeries):
            if not _is_integral(self.exponent - other.exponent):
                return self.is_zero() and other.is_zero()
            a, b, _ = self._aligned(other)
            return a.coeffs == b.coeffs
        try:
            c = as_rational(other)
        except TypeError:
            return NotImplemented
        return self == self._promote(c)

    # equality is up to the shared truncation, which is not transitive
    __hash__ = None

    def __repr__(self):
        return f"TruncatedSeries({[str(c) for c in self.coeffs]}, order={self.order}, exponent={self.exponent})"

    def __str__(self):
        terms = []
        for k, c in enumerate(self.coeffs):
            if not c:
                continue
            p = self.exponent + k
            if p == 0:
                terms.append(str(c))
            elif p == 1:
                terms.append(f"{c}*z")
            else:
                terms.append(f"{c}*z^{p}")
        body = " + ".join(terms) if terms else "0"
        return f"{body} + O(z^{self.precision})"

    # -- numerics -----------------------------------------------------------

    def evaluate(self, x, ctx=None):
        """Numeric value at ``x`` (principal branch of ``x**exponent``)."""
        import mpmath

        ctx = ctx or mpmath.mp
        x = ctx.mpmathify(x)
        acc = ctx.mpf(0)
        for c in reversed(self.coeffs):
            acc = acc * x + ctx.mpf(c.numerator) / c.denominator
        if self.exponent:
            acc *= ctx.power(x, ctx.mpf(self.exponent.numerator) / self.exponent.denominator)
        return acc

    # -- interchange --------------------------------------------------------

    def to_dict(self) -> dict:
        return {
            "exponent": rational_str(self.exponent),
            "order": self.order,
            "coeffs": [rational_str(c) for c in self.coeffs],
        }

    @classmethod
    def from_dict(cls, data) -> "TruncatedSeries":
        try:
            exponent = as_rational(data["exponent"])
            order = data["order"]
            coeffs = [as_rational(c) for c in data["coeffs"]]
        except (KeyError, TypeError) as exc:
            raise SchemaError(f"malformed series document: {exc}") from exc
        if not isinstance(order, int) or isinstance(order, bool) or order < 0:
            raise SchemaError("series order must be a non-negative integer")
        if len(coeffs) != order:
            raise SchemaError("series must list exactly `order` coefficients")
        return cls(coeffs, order, exponent)

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, text: str) -> "TruncatedSeries":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise SchemaError(str(exc)) from exc
        return cls.from_dict(data)


# ---------------------------------------------------------------------------
# operation-level API


def series_arith(a: TruncatedSeries, b: TruncatedSeries, op: str) -> TruncatedSeries:
    if op in ("add", "+"):
        return a + b
    if op in ("sub", "-"):
        return a - b
    if op in ("mul", "*"):
        return a * b
    if op in ("div", "/"):
        return a / b
    raise SchemaError(f"unknown series operation {op!r}")


def series_compose(f: TruncatedSeries, g: TruncatedSeries, polynomial: bool = False) -> TruncatedSeries:
    """Substitute ``g`` for the variable of ``f``.

    ``f`` must have an integral leading exponent (a Laurent series).  ``g``
    may only carry a constant term when ``polynomial`` declares the stored
    coefficients of ``f`` to be exact.
    """
    if not _is_integral(f.exponent):
        raise CompositionDomain("composition needs an integral exponent on the outer series")
    if polynomial:
        if f.exponent < 0:
            raise CompositionDomain("a polynomial cannot have negative powers")
        poly = f.with_exponent(0) if f.exponent > 0 else f
        acc = None
        for c in reversed(poly.coeffs):
            acc = g * 0 + c if acc is None else acc * g + c
        return acc if acc is not None else g * 0
    gn = g.normalized()
    if gn.is_zero():
        raise CompositionDomain("cannot substitute a series that vanishes to its order")
    if gn.exponent <= 0 or not _is_integral(gn.exponent):
        raise CompositionDomain("inner series has a constant term; pass polynomial=True "
                                "if the outer series is an exact polynomial")
    v = int(gn.exponent)
    rho = int(f.exponent)
    powers = [rho + k for k in range(f.order) if rho + k != 0 and f.coeffs[k]]
    top = v * (rho + f.order)
    if powers:
        # error in g**m starts at v*m + (relative order of g's unit part)
        top = min(top, v * powers[0] + gn.order)
    low = v * rho
    order = max(top - low, 0)
    if order == 0:
        return TruncatedSeries.zero(0, low)
    unit = TruncatedSeries(gn.coeffs, min(gn.order, order), 0)
    power = (unit.inverse() ** (-rho) if rho < 0 else unit ** rho).truncate(order)
    result = [Fraction(0)] * order
    for k in range(f.order):
        shift = v * k
        if shift >= order:
            break
        c = f.coeffs[k]
        if c:
            pc = power.coeffs
            for i in range(min(len(pc), order - shift)):
                result[shift + i] += c * pc[i]
        remaining = order - v * (k + 1)
        if remaining <= 0:
            break
        power = (power * unit).truncate(remaining)
    return TruncatedSeries(result, order, low)


def series_reverse(f: TruncatedSeries) -> TruncatedSeries:
    """Compositional inverse of ``f = c1 z + ...`` by Lagrange inversion."""
    if not _is_integral(f.exponent) or f.exponent < 0:
        raise NotReversible("series must be an ordinary power series")
    g = f.with_exponent(0) if f.exponent > 0 else f
    if g.order < 2:
        raise NotReversible("series too short to reverse")
    if g.coeffs[0]:
        raise NotReversible("series has a nonzero constant term")
    if not g.coeffs[1]:
        raise NotReversible("linear coefficient vanishes")
    prec = g.order
    unit = TruncatedSeries(g.coeffs[1:], prec - 1)
    h = unit.inverse()  # z / f(z)
    out = [Fraction(0)] * prec
    power = TruncatedSeries.one(prec - 1)
    for n in range(1, prec):
        power = power * h
        out[n] = power.coeffs[n - 1] / n
    return TruncatedSeries(out, prec, 0)


def _as_power_series(f: TruncatedSeries) -> TruncatedSeries:
    """Re-express at exponent 0, or fail if there are negative powers."""
    if not _is_integral(f.exponent):
        raise ElementaryDomain("series has a fractional exponent")
    fn = f.normalized()
    if fn.is_zero():
        prec = f.precision
        return TruncatedSeries.zero(max(int(prec), 0))
    if fn.exponent < 0:
        raise ElementaryDomain("series has negative powers")
    return fn.with_exponent(0)


def series_elementary(f: TruncatedSeries, kind) -> TruncatedSeries:
    """Formal ``exp``, ``log`` or ``("pow", r)`` of a series."""
    if isinstance(kind, tuple):
        name, arg = kind
    else:
        name, arg = kind, None
    if name == "exp":
        g = _as_power_series(f)
        if g.order and g.coeffs[0]:
            raise ElementaryDomain("exp needs a zero constant term")
        n = g.order
        e = [Fraction(1)] + [Fraction(0)] * max(n - 1, 0)
        for k in range(1, n):
            s = sum(i * g.coeffs[i] * e[k - i] for i in range(1, k + 1))
            e[k] = s / k
        return TruncatedSeries(e[:n], n)
    if name == "log":
        g = _as_power_series(f)
        if not g.order or g.coeffs[0] != 1:
            raise ElementaryDomain("log needs constant term 1")
        n = g.order
        lg = [Fraction(0)] * n
        for k in range(1, n):
            s = k * g.coeffs[k] - sum(i * lg[i] * g.coeffs[k - i] for i in range(1, k))
            lg[k] = s / k
        return TruncatedSeries(lg, n)
    if name == "pow":
        r = as_rational(arg)
        fn = f.normalized()
        if fn.is_zero() or fn.coeffs[0] != 1:
            raise ElementaryDomain("pow needs leading coefficient 1")
        u = fn.coeffs
        n = fn.order
        p = [Fraction(1)] + [Fraction(0)] * max(n - 1, 0)
        for k in range(1, n):
            s = sum(((r + 1) * i - k) * u[i] * p[k - i] for i in range(1, k + 1))
            p[k] = s / k
        return TruncatedSeries(p[:n], n, fn.exponent * r)
    raise ValueError(f"unknown elementary function {kind!r}")


def pochhammer(a: Fraction, n: int) -> Fraction:
    out = Fraction(1)
    for i in range(n):
        out *= a + i
    return out


def hypergeom_series(upper: Sequence, lower: Sequence, var_order: int = DEFAULT_ORDER) -> TruncatedSeries:
    """Exact truncated ``pFq(upper; lower; z)``."""
    a = [as_rational(x) for x in upper]
    b = [as_rational(x) for x in lower]
    for x in b:
        if _is_integral(x) and x <= 0:
            raise PoleInParameters(f"lower parameter {x} is a non-positive integer")
    coeffs = []
    t = Fraction(1)
    for n in range(var_order):
        coeffs.append(t)
        num = Fraction(1)
        for x in a:
            num *= x + n
        den = Fraction(n + 1)
        for x in b:
            den *= x + n
        t = t * num / den
    return TruncatedSeries(coeffs, var_order)


# ---------------------------------------------------------------------------
# log-series


class LogSolution:
    """``sum_k log(z)**k * parts[k]`` with all parts sharing one exponent."""

    __slots__ = ("exponent", "parts")

    def __init__(self, parts: Sequence[TruncatedSeries], exponent=None):
        parts = list(parts)
        if not parts:
            raise ValueError("a log-series needs at least one part")
        if exponent is None:
            exponent = parts[0].exponent
        exponent = as_rational(exponent)
        order = min(p.order + int(p.exponent - exponent) for p in parts)
        fixed = []
        for p in parts:
            if p.exponent != exponent:
                p = p.with_exponent(exponent)
            fixed.append(p.truncate(order))
        while len(fixed) > 1 and fixed[-1].is_zero():
            fixed.pop()
        object.__setattr__(self, "parts", tuple(fixed))
        object.__setattr__(self, "exponent", exponent)

    def __setattr__(self, name, value):
        raise AttributeError("LogSolution is immutable")

    @classmethod
    def from_series(cls, s: TruncatedSeries) -> "LogSolution":
        return cls([s], s.exponent)

    @property
    def order(self) -> int:
        return self.parts[0].order

    @property
    def log_degree(self) -> int:
        return len(self.parts) - 1

    def is_zero(self) -> bool:
        return all(p.is_zero() for p in self.parts)

    def theta(self) -> "LogSolution":
        """``z d/dz`` with the product rule on powers of ``log z``."""
        out = []
        k_max = len(self.parts)
        for k in range(k_max):
            part = self.parts[k].theta()
            if k + 1 < k_max:
                part = part + self.parts[k + 1] * (k + 1)
            out.append(part)
        return LogSolution(out, self.exponent)

    def mul_polynomial(self, poly) -> "LogSolution":
        return LogSolution([p.mul_polynomial(poly) for p in self.parts], self.exponent)

    def __add__(self, other):
        if not isinstance(other, LogSolution):
            return NotImplemented
        n = max(len(self.parts), len(other.parts))
        low = min(self.exponent, other.exponent)
        out = []
        for k in range(n):
            a = self.parts[k] if k < len(self.parts) else TruncatedSeries.zero(self.order, self.exponent)
            b = other.parts[k] if k < len(other.parts) else TruncatedSeries.zero(other.order, other.exponent)
            out.append(a + b)
        return LogSolution(out, low)

    def __mul__(self, c):
        if isinstance(c, TruncatedSeries):
            return LogSolution([p * c for p in self.parts])
        c = as_rational(c)
        return LogSolution([p * c for p in self.parts], self.exponent)

    __rmul__ = __mul__

    def __neg__(self):
        return self * -1

    def __sub__(self, other):
        return self + (-other)

    def __eq__(self, other):
        if not isinstance(other, LogSolution):
            return NotImplemented
        if len(self.parts) != len(other.parts):
            return False
        return all(a == b for a, b in zip(self.parts, other.parts))

    def __repr__(self):
        return f"LogSolution(exponent={self.exponent}, parts={list(self.parts)!r})"

    def evaluate(self, z, logz=None, ctx=None):
        """Numeric value at ``z``; ``logz`` selects the branch of ``log z``."""
        import mpmath

        ctx = ctx or mpmath.mp
        z = ctx.mpmathify(z)
        if logz is None:
            logz = ctx.log(z)
        zrho = ctx.exp(logz * ctx.mpf(self.exponent.numerator) / self.exponent.denominator)
        acc = ctx.mpf(0)
        for part in reversed(self.parts):
            inner = ctx.mpf(0)
            for c in reversed(part.coeffs):
                inner = inner * z + ctx.mpf(c.numerator) / c.denominator
            acc = acc * logz + inner
        return acc * zrho

    def to_dict(self) -> dict:
        return {
            "exponent": rational_str(self.exponent),
            "log_degree": self.log_degree,
            "parts": [p.to_dict() for p in self.parts],
        }

    @classmethod
    def from_dict(cls, data) -> "LogSolution":
        try:
            parts = [TruncatedSeries.from_dict(p) for p in data["parts"]]
            exponent = as_rational(data["exponent"])
        except (KeyError, TypeError) as exc:
            raise SchemaError(f"malformed log-series document: {exc}") from exc
        return cls(parts, exponent)
