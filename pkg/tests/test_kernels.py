import os
import random
import subprocess
import sys

import pytest

from period_engine import kernels
from period_engine.kernels import _fallback


def _compiled():
    try:
        from period_engine.kernels import _kernels
    except ImportError:
        return None
    return _kernels


def _random_step_input(rng, n=2, deg=3, bits=120):
    one = 1 << bits
    bre = [[rng.randint(-one, one) for _ in range(deg + 1)] for _ in range(n + 1)]
    bim = [[rng.randint(-one, one) for _ in range(deg + 1)] for _ in range(n + 1)]
    bre[n][0] = 3 * one  # dominant leading constant keeps the recurrence tame
    init_re = [rng.randint(-one, one) for _ in range(n)]
    init_im = [rng.randint(-one, one) for _ in range(n)]
    return bre, bim, init_re, init_im, 40, bits


def test_fallback_mul_trunc():
    assert _fallback.mul_trunc([1, 2, 3], [4, 5], 3) == [4, 13, 22]
    assert _fallback.mul_trunc([1], [1], 3) == [1, 0, 0]


@pytest.mark.skipif(_compiled() is None, reason="compiled kernels not built")
def test_backends_agree():
    comp = _compiled()
    rng = random.Random(5)
    for _ in range(5):
        a = [rng.randint(-10**30, 10**30) for _ in range(25)]
        b = [rng.randint(-10**30, 10**30) for _ in range(25)]
        assert list(comp.mul_trunc(a, b, 30)) == _fallback.mul_trunc(a, b, 30)
        args = _random_step_input(rng)
        got = comp.taylor_step(*args)
        want = _fallback.taylor_step(*args)
        assert [list(x) if isinstance(x, (list, tuple)) else x for x in got] == \
               [list(x) if isinstance(x, (list, tuple)) else x for x in want]


def test_backend_name():
    assert kernels.BACKEND in ("cython", "python")


def test_pure_override():
    env = dict(os.environ, PERIOD_ENGINE_PURE="1")
    out = subprocess.run([sys.executable, "-c", "from period_engine import kernels; print(kernels.BACKEND)"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"


def test_pure_backend_reproduces_monodromy():
    code = ("from period_engine.fixtures import load_operator\n"
            "from period_engine.continuation import monodromy, loop_around\n"
            "import mpmath\n"
            "L = load_operator('lpf')\n"
            "M = monodromy(L, loop_around(L, 0, digits=30)).matrix\n"
            "print(mpmath.nstr(M[1][0].real, 25))\n")
    env = dict(os.environ, PERIOD_ENGINE_PURE="1")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "1.0"
