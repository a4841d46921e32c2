"""Named end-to-end checks, runnable from the command line.

Each check returns a ``CheckResult`` with a pass flag, a residual (exact
checks report 0 or the first mismatch) and a short detail string.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from math import factorial

import mpmath

from .continuation import (
    PathPolyline,
    cayley_fixed_point,
    circle_loop,
    fricke_residual,
    make_context,
    matmul,
    max_deviation,
    monodromy,
)
from .diffop import Substitution, is_symmetric_square, pullback, symmetric_square, gauge_equivalent
from .fixtures import load_operator, load_polytope
from .frobenius import frobenius_basis
from .mirror import (
    Prepotential,
    integral_scale,
    metric_from_potential,
    mirror_map,
    poincare_metric,
    prepotential_from_yukawa,
    random_flat_yukawa,
    yukawa_algebraic,
    yukawa_flat,
)
from .series import TruncatedSeries, hypergeom_series, series_compose
from .toric2d import LatticePolytope2D, anticanonical_sections, polar_dual

ORDER = 20
DIGITS = 50


@dataclass
class CheckResult:
    name: str
    passed: bool
    residual: str
    detail: str = ""

    def line(self) -> str:
        return f"{'PASS' if self.passed else 'FAIL'}  {self.name}  residual={self.residual}  {self.detail}".rstrip()

    def to_dict(self) -> dict:
        return {"name": self.name, "passed": self.passed, "residual": self.residual, "detail": self.detail}


def _exact(name, ok, detail=""):
    return CheckResult(name, bool(ok), "0" if ok else "nonzero", detail)


def _first_mismatch(a: TruncatedSeries, b: TruncatedSeries, n: int):
    for k in range(n):
        if a.coefficient(a.exponent + k) != b.coefficient(b.exponent + k):
            return k
    return None


def check_fricke_operator() -> CheckResult:
    L = load_operator("lpf")
    return _exact("fricke-operator", pullback(L, Substitution.affine(-1, 1)) == L)


def check_elliptic_yukawa(N: int = ORDER) -> CheckResult:
    L = load_operator("lpf")
    alg = yukawa_algebraic(L)
    y = yukawa_flat(L, N)
    ok_alg = alg.num == (1,) and alg.den == (1, -1) and alg.exponent == -1
    ok_flat = y.flat.order >= N and y.flat.coeffs[0] == 1 and not any(y.flat.coeffs[1:N])
    return _exact("elliptic-yukawa", ok_alg and ok_flat, f"algebraic={alg} flat_order={y.flat.order}")


def j_expansion_literal(N: int = ORDER) -> TruncatedSeries:
    """``1/(alpha (1 - alpha))`` in the flat coordinate of the L_PF mirror map."""
    a = mirror_map(load_operator("lpf"), N).z_of_q
    return 1 / (a * (1 - a))


def check_j_expansion(N: int = ORDER) -> CheckResult:
    j = j_expansion_literal(N)
    got = [j.coefficient(-1), j.coefficient(0), j.coefficient(1)]
    want = [1, 744, 196884]
    ok = got == want
    return CheckResult("j-expansion", ok, "0" if ok else str([str(g - w) for g, w in zip(got, want)]),
                       f"coefficients of q^-1, q^0, q^1: {[str(g) for g in got]}")


def check_j_hauptmodul(N: int = ORDER) -> CheckResult:
    """``432/(a(1 - a))`` for the E8 family and ``27 (1 + 8a)^3/(a (1 - a)^3)`` for L_PF, integral gauges."""
    a = mirror_map(load_operator("le8"), N, gauge_shift=432).z_of_q
    b = mirror_map(load_operator("lpf"), N, gauge_shift=27).z_of_q
    j1 = 432 / (a * (1 - a))
    j2 = 27 * (1 + 8 * b) ** 3 / (b * (1 - b) ** 3)
    want = [1, 744, 196884]
    got = [[j.coefficient(k) for k in (-1, 0, 1)] for j in (j1, j2)]
    return _exact("j-hauptmodul", got[0] == want and got[1] == want, f"e8={[str(x) for x in got[0]]} cubic={[str(x) for x in got[1]]}")


def check_e8_identity(N: int = ORDER) -> CheckResult:
    mm = mirror_map(load_operator("le8"), N)
    a = mm.z_of_q
    lhs = a.theta()
    F = series_compose(hypergeom_series([Fraction(1, 6), Fraction(5, 6)], [1], N + 1), a)
    rhs = a * (1 - a) * F * F
    bad = _first_mismatch(lhs, rhs, N)
    return _exact("e8-identity", bad is None and min(lhs.precision, rhs.precision) >= N,
                  "" if bad is None else f"first mismatch at q^{bad}")


def check_symmetric_square() -> CheckResult:
    Lt, Lk = load_operator("ltri"), load_operator("lk3")
    built = symmetric_square(Lt.to_deriv()).to_theta(Lk.var)
    witness = is_symmetric_square(Lk)
    ok = built == Lk and witness is not None and gauge_equivalent(witness, Lt.to_deriv())
    return _exact("symmetric-square", ok)


def check_clausen(N: int = 30) -> CheckResult:
    f = hypergeom_series([Fraction(1, 8), Fraction(3, 8)], [1], N)
    g = hypergeom_series([Fraction(1, 4), Fraction(1, 2), Fraction(3, 4)], [1, 1], N)
    return _exact("clausen", f * f == g and (f * f).order == N)


def _k3_sides(N: int):
    mm = mirror_map(load_operator("lk3"), N)
    z = mm.z_of_q
    pi0 = series_compose(mm.holomorphic_period, z)
    return z, pi0 * pi0 * z * z * (1 - z)


def check_k3_identity(N: int = ORDER) -> CheckResult:
    """As stated: ``(theta_q z / z)**2 = c pi0**2 z**2 (1 - z)`` with ``c`` from the q^0 term."""
    z, rhs = _k3_sides(N)
    lhs = (z.theta() / z) ** 2
    l0, r0 = lhs.coefficient(0), rhs.coefficient(0)
    if r0 == 0:
        return CheckResult("k3-identity", False, f"q^0: lhs={l0} rhs=0",
                           f"sides start at q^{lhs.normalized().exponent} and q^{rhs.normalized().exponent}; no c exists")
    c = l0 / r0
    bad = _first_mismatch(lhs, rhs * c, N)
    return _exact("k3-identity", bad is None, f"c={c}")


def check_k3_schwarzian(N: int = ORDER) -> CheckResult:
    """``(theta_q z)**2 = c pi0**2 z**2 (1 - z)``, ``c`` from the leading q^2 term."""
    z, rhs = _k3_sides(N)
    lhs = z.theta() ** 2
    c = lhs.coefficient(2) / rhs.coefficient(2)
    bad = _first_mismatch(lhs, rhs * c, N)
    return _exact("k3-schwarzian", bad is None and lhs.precision >= N, f"c={c}")


def harmonic(n: int) -> Fraction:
    return sum((Fraction(1, k) for k in range(1, n + 1)), Fraction(0))


def k3_digamma_coefficient(n: int) -> Fraction:
    return Fraction(factorial(4 * n), factorial(n) ** 4) * 4 * (harmonic(4 * n) - harmonic(n)) / 4 ** (4 * n)


def check_k3_digamma(n_max: int = 10) -> CheckResult:
    basis = frobenius_basis(load_operator("lk3"), 0, n_max + 1)
    sol = next(s for s in basis.solutions if s.log_degree == 1)
    hol = sol.parts[0]
    ok = all(hol.coeffs[n] == k3_digamma_coefficient(n) for n in range(n_max + 1))
    return _exact("k3-digamma", ok)


def _loops(digits):
    b = Fraction(1, 2)
    l0 = circle_loop(0, b, 0, 8, digits)
    l1 = circle_loop(1, b, Fraction(1, 2), 8, digits)
    big = PathPolyline([(b, 0), (b, 2), (-2, 2), (-2, -2), (3, -2), (3, 2), (b, 2), (b, 0)], digits)
    return l0, l1, big.reversed()


def check_monodromy(digits: int = DIGITS) -> CheckResult:
    L = load_operator("lpf")
    l0, l1, linf = _loops(digits)
    M0 = monodromy(L, l0).matrix
    M1 = monodromy(L, l1).matrix
    Mi = monodromy(L, linf).matrix
    r0 = max_deviation(M0, [[1, 0], [1, 1]])
    rp = max_deviation(matmul(matmul(M0, M1), Mi), [[1, 0], [0, 1]])
    ok = r0 < mpmath.mpf(10) ** -30 and rp < mpmath.mpf(10) ** -25
    return CheckResult("monodromy", ok, mpmath.nstr(max(r0, rp), 5),
                       f"loop0={mpmath.nstr(r0, 5)} product={mpmath.nstr(rp, 5)}")


def fricke_gauge() -> int:
    return integral_scale(mirror_map(load_operator("lpf"), ORDER).holomorphic_period)


def check_fricke_values(digits: int = DIGITS) -> CheckResult:
    L = load_operator("lpf")
    k = fricke_gauge()
    res = [fricke_residual(L, a, digits, k) for a in (Fraction(1, 5), Fraction(1, 3), Fraction(2, 5))]
    worst = max(res)
    return CheckResult("fricke-values", worst < mpmath.mpf(10) ** -30, mpmath.nstr(worst, 5), f"gauge_shift={k}")


CAYLEY_PATHS = (
    ((Fraction(1, 4), 0), (Fraction(1, 4), 3), (0, 6)),
    ((Fraction(1, 4), 0), (Fraction(1, 2), Fraction(1, 2)), (2, 3), (3, 6), (1, 8)),
)


def check_cayley(digits: int = DIGITS) -> CheckResult:
    L = load_operator("lpf")
    k = fricke_gauge()
    pts = [cayley_fixed_point(L, PathPolyline(p, digits), k) for p in CAYLEY_PATHS]
    diff = abs(pts[0].tau_star - pts[1].tau_star)
    ok = diff < mpmath.mpf(10) ** -30 and pts[0].tau_star.imag > 0
    return CheckResult("cayley", ok, mpmath.nstr(diff, 5), f"tau*={mpmath.nstr(pts[0].tau_star, 32)}")


def check_toric() -> CheckResult:
    P = load_polytope("p2")
    D = polar_dual(P)
    secs = {str(s) for s in anticanonical_sections(P, [(1, 0), (0, 1), (-1, -1)])}
    ok = (D == LatticePolytope2D([(1, 0), (0, 1), (-1, -1)])
          and len(P.lattice_points()) == 10 and len(D.lattice_points()) == 4
          and {"z1^3", "z2^3", "z3^3", "z1*z2*z3"} <= secs)
    return _exact("toric", ok)


def check_prepotential_roundtrip(N: int = ORDER, trials: int = 5, seed: int = 2024) -> CheckResult:
    rng = random.Random(seed)
    ok = True
    for _ in range(trials):
        kappa = Fraction(rng.randint(1, 30))
        C = random_flat_yukawa(rng, kappa, N)
        F = prepotential_from_yukawa(C, kappa)
        ok = ok and F.yukawa() == C and F.yukawa().order == N
    return _exact("prepotential-roundtrip", ok, f"{trials} random series")


def check_poincare(digits: int = DIGITS) -> CheckResult:
    ctx = make_context(digits)
    worst = ctx.mpf(0)
    for kappa in (1, 3):
        F = Prepotential(Fraction(kappa), TruncatedSeries.zero(ORDER))
        for k in range(10):
            t = ctx.mpc(ctx.mpf(k - 4) / 7, ctx.mpf(k + 2) / 5)
            worst = max(worst, abs(metric_from_potential(F, t, ctx) - poincare_metric(t, ctx)))
    return CheckResult("poincare", worst < ctx.mpf(10) ** -25, mpmath.nstr(worst, 5))


CHECKS = {
    "fricke-operator": check_fricke_operator,
    "elliptic-yukawa": check_elliptic_yukawa,
    "j-expansion": check_j_expansion,
    "j-hauptmodul": check_j_hauptmodul,
    "e8-identity": check_e8_identity,
    "symmetric-square": check_symmetric_square,
    "clausen": check_clausen,
    "k3-identity": check_k3_identity,
    "k3-schwarzian": check_k3_schwarzian,
    "k3-digamma": check_k3_digamma,
    "monodromy": check_monodromy,
    "fricke-values": check_fricke_values,
    "cayley": check_cayley,
    "toric": check_toric,
    "prepotential-roundtrip": check_prepotential_roundtrip,
    "poincare": check_poincare,
}


def run(names=None) -> list[CheckResult]:
    return [CHECKS[n]() for n in (names or CHECKS)]
