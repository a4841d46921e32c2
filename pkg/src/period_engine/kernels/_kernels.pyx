# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled versions of the hot loops; see ``_fallback`` for the contract."""


def mul_trunc(list a, list b, Py_ssize_t n):
    cdef Py_ssize_t la = min(len(a), n)
    cdef Py_ssize_t lb = min(len(b), n)
    cdef Py_ssize_t i, j, top
    cdef list out = [0] * n
    cdef object ai
    for i in range(la):
        ai = a[i]
        if not ai:
            continue
        top = min(lb, n - i)
        for j in range(top):
            out[i + j] = out[i + j] + ai * b[j]
    return out


def taylor_step(list bre, list bim, init_re, init_im, Py_ssize_t nterms, int bits):
    cdef Py_ssize_t n = len(bre) - 1
    cdef Py_ssize_t m, j, i, k, r, d, rowlen
    cdef list cre = list(init_re) + [0] * (nterms - n)
    cdef list cim = list(init_im) + [0] * (nterms - n)
    cdef list rowre, rowim
    cdef object lre = bre[n][0]
    cdef object lim = bim[n][0]
    cdef object norm = lre * lre + lim * lim
    cdef object inv_re = (lre << (2 * bits)) // norm
    cdef object inv_im = -((lim << (2 * bits)) // norm)
    cdef object sre, sim, ar, ai, xr, xi, vre, vim, tr, ti, t, tail
    cdef long long f
    cdef object fbig
    for m in range(nterms - n):
        sre = 0
        sim = 0
        for j in range(n + 1):
            rowre = <list>bre[j]
            rowim = <list>bim[j]
            rowlen = min(len(rowre), m + 1)
            for i in range(rowlen):
                if j == n and i == 0:
                    continue
                ar = rowre[i]
                ai = rowim[i]
                if not ar and not ai:
                    continue
                k = m - i + j
                f = 1
                for r in range(j):
                    f *= k - r
                if f == 0:
                    continue
                xr = cre[k]
                xi = cim[k]
                sre = sre + f * (ar * xr - ai * xi)
                sim = sim + f * (ar * xi + ai * xr)
        sre = sre >> bits
        sim = sim >> bits
        fbig = 1
        for r in range(n):
            fbig = fbig * (m + n - r)
        vre = -(sre * inv_re - sim * inv_im) >> bits
        vim = -(sre * inv_im + sim * inv_re) >> bits
        cre[m + n] = vre // fbig
        cim[m + n] = vim // fbig
    cdef list sum_re = []
    cdef list sum_im = []
    for d in range(n):
        tr = 0
        ti = 0
        for k in range(d, nterms):
            fbig = 1
            for r in range(d):
                fbig = fbig * (k - r)
            tr = tr + fbig * cre[k]
            ti = ti + fbig * cim[k]
        sum_re.append(tr)
        sum_im.append(ti)
    tail = 0
    for k in range(max(nterms - n, 0), nterms):
        t = abs(cre[k]) + abs(cim[k])
        if t > tail:
            tail = t
    return sum_re, sum_im, tail
