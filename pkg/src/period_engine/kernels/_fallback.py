"""Pure-Python reference versions of the hot loops.

The compiled module ``_kernels`` exposes the same functions with the same
semantics; this one is used when the extension is not built.
"""


def mul_trunc(a, b, n):
    """Integer convolution ``c[k] = sum a[i] * b[k - i]`` for ``k < n``."""
    la = min(len(a), n)
    lb = min(len(b), n)
    out = [0] * n
    for i in range(la):
        ai = a[i]
        if not ai:
            continue
        top = min(lb, n - i)
        for j in range(top):
            out[i + j] += ai * b[j]
    return out


def taylor_step(bre, bim, init_re, init_im, nterms, bits):
    """Run the Taylor recurrence of a linear ODE in fixed-point arithmetic.

    ``bre[j][i] + 1j*bim[j][i]`` is the coefficient of ``t**i`` in the
    polynomial multiplying the j-th derivative, already rescaled so that the
    step has unit length.  ``init`` holds the first ``n`` scaled Taylor
    coefficients.  Every value is an integer carrying ``bits`` fractional
    bits.

    Returns ``(sum_re, sum_im, tail)``: ``sum[d]`` is the d-th derivative of
    the local solution at ``t = 1`` (still in step units) and ``tail`` is the
    largest ``|re| + |im|`` among the last ``n`` computed coefficients.
    """
    n = len(bre) - 1
    cre = list(init_re) + [0] * (nterms - n)
    cim = list(init_im) + [0] * (nterms - n)
    lre = bre[n][0]
    lim = bim[n][0]
    norm = lre * lre + lim * lim
    # fixed-point reciprocal of the leading constant coefficient
    inv_re = (lre << (2 * bits)) // norm
    inv_im = -((lim << (2 * bits)) // norm)
    for m in range(nterms - n):
        sre = 0
        sim = 0
        for j in range(n + 1):
            rowre = bre[j]
            rowim = bim[j]
            for i in range(min(len(rowre), m + 1)):
                if j == n and i == 0:
                    continue
                k = m - i + j
                ar = rowre[i]
                ai = rowim[i]
                if not ar and not ai:
                    continue
                f = 1
                for r in range(j):
                    f *= k - r
                if not f:
                    continue
                xr = cre[k]
                xi = cim[k]
                sre += f * (ar * xr - ai * xi)
                sim += f * (ar * xi + ai * xr)
        sre >>= bits
        sim >>= bits
        f = 1
        for r in range(n):
            f *= m + n - r
        vre = -(sre * inv_re - sim * inv_im) >> bits
        vim = -(sre * inv_im + sim * inv_re) >> bits
        cre[m + n] = vre // f
        cim[m + n] = vim // f
    sum_re = []
    sum_im = []
    for d in range(n):
        tr = 0
        ti = 0
        for k in range(d, nterms):
            f = 1
            for r in range(d):
                f *= k - r
            tr += f * cre[k]
            ti += f * cim[k]
        sum_re.append(tr)
        sum_im.append(ti)
    tail = 0
    for k in range(max(nterms - n, 0), nterms):
        t = abs(cre[k]) + abs(cim[k])
        if t > tail:
            tail = t
    return sum_re, sum_im, tail
