"""Compare the compiled and pure-Python kernels.

    python3 benchmarks/bench_kernels.py [--repeat 5]

Inputs are realistic: a Taylor step of the L_PF operator at 50 digits and
the numerator convolutions of two order-200 hypergeometric series.
"""

import argparse
import random
import timeit
from fractions import Fraction

from period_engine.kernels import _fallback

try:
    from period_engine.kernels import _kernels
except ImportError:
    _kernels = None


def taylor_case(digits=50):
    bits = int(digits * 3.33) + 16 + 64
    rng = random.Random(7)
    one = 1 << bits
    # (9 - 9z) z^2 y'' + ... rescaled to a half-radius step: coefficients of order one
    bre = [[-2 * one // 9, one // 17], [one // 3, -one // 5], [one, -one // 2, one // 11]]
    bim = [[0, one // 23], [one // 29, 0], [0, one // 31, 0]]
    init_re = [rng.randrange(-one, one) for _ in range(2)]
    init_im = [rng.randrange(-one, one) for _ in range(2)]
    return (bre, bim, init_re, init_im, bits + 40, bits)


def convolution_case(n=200):
    from period_engine.series import _common_numerators, hypergeom_series

    f = hypergeom_series([Fraction(1, 3), Fraction(2, 3)], [1], n)
    g = hypergeom_series([Fraction(1, 4), Fraction(3, 4)], [1], n)
    a, _ = _common_numerators(f.coeffs)
    b, _ = _common_numerators(g.coeffs)
    return (a, b, n)


def _canon(out):
    if isinstance(out, tuple):
        return tuple(_canon(x) for x in out)
    return list(out) if not isinstance(out, int) else out


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    cases = {"taylor_step": taylor_case(), "mul_trunc": convolution_case()}
    backends = {"python": _fallback}
    if _kernels is not None:
        backends["cython"] = _kernels
    print(f"{'kernel':<12} {'backend':<8} {'best of ' + str(args.repeat):>14}")
    results = {}
    for name, case in cases.items():
        outputs = []
        for label, mod in backends.items():
            fn = getattr(mod, name)
            t = min(timeit.repeat(lambda: fn(*case), number=1, repeat=args.repeat))
            results[(name, label)] = t
            outputs.append(fn(*case))
            print(f"{name:<12} {label:<8} {t * 1e3:>11.2f} ms")
        if len(outputs) == 2:
            same = _canon(outputs[0]) == _canon(outputs[1])
            speed = results[(name, "python")] / results[(name, "cython")]
            print(f"{'':<12} speedup {speed:.2f}x, outputs identical: {same}")
    if _kernels is None:
        print("compiled kernels not built; run `pip install -e . --no-build-isolation`")


if __name__ == "__main__":
    main()
