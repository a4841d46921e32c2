"""Independent reference computations, deliberately not using period_engine."""

from fractions import Fraction


def pochhammer(a, n):
    out = Fraction(1)
    for k in range(n):
        out *= a + k
    return out


def hyp_coeffs(upper, lower, n):
    """Coefficients of pFq with unit argument scaling, by the closed form."""
    out = []
    for k in range(n):
        num = Fraction(1)
        for a in upper:
            num *= pochhammer(Fraction(a), k)
        den = Fraction(1)
        for b in lower + [1]:
            den *= pochhammer(Fraction(b), k)
        out.append(num / den)
    return out


def log_partner_coeffs(upper, lower, n):
    """``d/drho`` of the Frobenius coefficients at ``rho = 0`` (all lower = 1)."""
    base = hyp_coeffs(upper, lower, n)
    out = []
    for k in range(n):
        s = Fraction(0)
        for j in range(k):
            s += sum(Fraction(1) / (Fraction(a) + j) for a in upper)
            s -= (len(lower) + 1) * Fraction(1, j + 1)
        out.append(base[k] * s)
    return out


def _mul(a, b, n):
    out = [Fraction(0)] * n
    for i, x in enumerate(a[:n]):
        if x:
            for j, y in enumerate(b[: n - i]):
                out[i + j] += x * y
    return out


def _compose(f, g, n):
    """``f(g)`` truncated to ``n`` terms by Horner; ``g[0] = 0``."""
    out = [Fraction(0)] * n
    for c in reversed(f[:n]):
        out = _mul(out, g, n)
        out[0] += c
    return out


def reversion(coeffs, n):
    """Compositional inverse by undetermined coefficients (not Lagrange inversion)."""
    f = [Fraction(c) for c in coeffs[:n]] + [Fraction(0)] * max(0, n - len(coeffs))
    b = [Fraction(0), 1 / f[1]] + [Fraction(0)] * (n - 2)
    for k in range(2, n):
        ck = _compose(f, b, k + 1)[k]
        b[k] = -ck / f[1]
    return b


def exp_series(coeffs, n):
    """``exp`` of a power series with zero constant term as a truncated power sum."""
    g = [Fraction(c) for c in coeffs[:n]] + [Fraction(0)] * max(0, n - len(coeffs))
    out = [Fraction(0)] * n
    term = [Fraction(1)] + [Fraction(0)] * (n - 1)
    for k in range(n):
        out = [x + y for x, y in zip(out, term)]
        term = [x / (k + 1) for x in _mul(term, g, n)]
    return out


def inverse_series(coeffs, n):
    a = [Fraction(c) for c in coeffs[:n]]
    out = [1 / a[0]]
    for k in range(1, n):
        s = sum(a[j] * out[k - j] for j in range(1, min(k, len(a) - 1) + 1))
        out.append(-s / a[0])
    return out


def mul(a, b, n):
    return _mul(a, b, n)


def compose(f, g, n):
    return _compose(f, g, n)
