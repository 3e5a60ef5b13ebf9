# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled kernel implementations.

Same API and bit-identical results as `treemi._native`.  Rational values
cross the boundary as `fractions.Fraction`; internally the loops run on
raw numerator/denominator int pairs to skip Fraction dispatch overhead.
Denominators are kept positive and pairs coprime, matching Fraction's
canonical form.
"""

from fractions import Fraction
from math import gcd

BACKEND = "c"

_ZERO = Fraction(0)


cdef inline tuple _norm(object n, object d):
    # d > 0 assumed
    g = gcd(n, d)
    if g > 1:
        n //= g
        d //= g
    return (n, d)


def poly_eval(coeffs, x):
    cdef Py_ssize_t n = len(coeffs)
    cdef Py_ssize_t i
    if n == 0:
        return _ZERO
    xn = x.numerator
    xd = x.denominator
    c = coeffs[n - 1]
    an = c.numerator
    ad = c.denominator
    for i in range(n - 2, -1, -1):
        # acc *= x (cross-reduced)
        g1 = gcd(an, xd)
        g2 = gcd(xn, ad)
        an = (an // g1) * (xn // g2)
        ad = (ad // g2) * (xd // g1)
        # acc += coeffs[i]
        c = coeffs[i]
        bn = c.numerator
        bd = c.denominator
        an = an * bd + bn * ad
        ad = ad * bd
        g1 = gcd(an, ad)
        if g1 > 1:
            an //= g1
            ad //= g1
    return Fraction(an, ad)


cdef tuple _trim_pairs(list nums, list dens):
    cdef Py_ssize_t n = len(nums)
    while n and nums[n - 1] == 0:
        n -= 1
    return tuple([Fraction(nums[k], dens[k]) for k in range(n)])


def poly_add(a, b):
    cdef Py_ssize_t i, la = len(a), lb = len(b)
    if la < lb:
        a, b = b, a
        la, lb = lb, la
    nums = []
    dens = []
    for i in range(la):
        c = a[i]
        an = c.numerator
        ad = c.denominator
        if i < lb:
            c = b[i]
            bn = c.numerator
            bd = c.denominator
            an = an * bd + bn * ad
            ad = ad * bd
            g = gcd(an, ad)
            if g > 1:
                an //= g
                ad //= g
        nums.append(an)
        dens.append(ad)
    return _trim_pairs(nums, dens)


def poly_mul(a, b):
    cdef Py_ssize_t la = len(a), lb = len(b)
    cdef Py_ssize_t i, j
    if la == 0 or lb == 0:
        return ()
    cdef Py_ssize_t lo = la + lb - 1
    nums = [0] * lo
    dens = [1] * lo
    for i in range(la):
        c = a[i]
        pn = c.numerator
        pd = c.denominator
        if pn == 0:
            continue
        for j in range(lb):
            c = b[j]
            qn = c.numerator
            qd = c.denominator
            # term = a[i] * b[j] (cross-reduced)
            g1 = gcd(pn, qd)
            g2 = gcd(qn, pd)
            tn = (pn // g1) * (qn // g2)
            td = (pd // g2) * (qd // g1)
            # out[i+j] += term
            an = nums[i + j]
            ad = dens[i + j]
            an = an * td + tn * ad
            ad = ad * td
            g1 = gcd(an, ad)
            if g1 > 1:
                an //= g1
                ad //= g1
            nums[i + j] = an
            dens[i + j] = ad
    return _trim_pairs(nums, dens)


def poly_scale(a, c):
    cdef Py_ssize_t i, n = len(a)
    cn = c.numerator
    cd = c.denominator
    if cn == 0:
        return ()
    nums = []
    dens = []
    for i in range(n):
        q = a[i]
        qn = q.numerator
        qd = q.denominator
        g1 = gcd(cn, qd)
        g2 = gcd(qn, cd)
        nums.append((cn // g1) * (qn // g2))
        dens.append((cd // g2) * (qd // g1))
    return tuple([Fraction(nums[i], dens[i]) for i in range(n)])


def poly_antideriv(a):
    cdef Py_ssize_t i, n = len(a)
    if n == 0:
        return ()
    nums = [0]
    dens = [1]
    for i in range(n):
        c = a[i]
        cn = c.numerator
        cd = c.denominator
        g = gcd(cn, i + 1)
        nums.append(cn // g)
        dens.append(cd * ((i + 1) // g))
    return _trim_pairs(nums, dens)


def poly_integrate(a, lo, hi):
    anti = poly_antideriv(a)
    return poly_eval(anti, hi) - poly_eval(anti, lo)


def interpolate_coeffs(xs, ys):
    cdef Py_ssize_t n = len(xs)
    cdef Py_ssize_t i, j, k
    dn = [y.numerator for y in ys]
    dd = [y.denominator for y in ys]
    xn = [x.numerator for x in xs]
    xd = [x.denominator for x in xs]
    for j in range(1, n):
        for i in range(n - 1, j - 1, -1):
            # delta = dd[i] - dd[i-1]
            sn = dn[i] * dd[i - 1] - dn[i - 1] * dd[i]
            sd = dd[i] * dd[i - 1]
            # step = xs[i] - xs[i-j]
            tn = xn[i] * xd[i - j] - xn[i - j] * xd[i]
            td = xd[i] * xd[i - j]
            if tn == 0:
                raise ZeroDivisionError("duplicate interpolation nodes")
            # dd[i] = delta / step
            rn = sn * td
            rd = sd * tn
            if rd < 0:
                rn = -rn
                rd = -rd
            g = gcd(rn, rd)
            if g > 1:
                rn //= g
                rd //= g
            dn[i] = rn
            dd[i] = rd
    # expand the Newton form into the monomial basis
    cn = [dn[n - 1]]
    cd = [dd[n - 1]]
    for i in range(n - 2, -1, -1):
        pn = xn[i]
        pd = xd[i]
        m = len(cn)
        nn = [0] * (m + 1)
        nd = [1] * (m + 1)
        for k in range(m):
            # new[k+1] += c[k]
            an = nn[k + 1]
            ad = nd[k + 1]
            bn = cn[k]
            bd = cd[k]
            an = an * bd + bn * ad
            ad = ad * bd
            g = gcd(an, ad)
            if g > 1:
                an //= g
                ad //= g
            nn[k + 1] = an
            nd[k + 1] = ad
            # new[k] -= xi * c[k]
            g = gcd(pn, bd)
            g2 = gcd(bn, pd)
            tn = (pn // g) * (bn // g2)
            td = (pd // g2) * (bd // g)
            an = nn[k]
            ad = nd[k]
            an = an * td - tn * ad
            ad = ad * td
            g = gcd(an, ad)
            if g > 1:
                an //= g
                ad //= g
            nn[k] = an
            nd[k] = ad
        # new[0] += dd[i]
        an = nn[0]
        ad = nd[0]
        bn = dn[i]
        bd = dd[i]
        an = an * bd + bn * ad
        ad = ad * bd
        g = gcd(an, ad)
        if g > 1:
            an //= g
            ad //= g
        nn[0] = an
        nd[0] = ad
        cn = nn
        cd = nd
    return _trim_pairs(cn, cd)


def normalize_union(intervals):
    ivs = sorted([(lo, hi) for lo, hi in intervals if lo <= hi])
    cdef Py_ssize_t i, n = len(ivs)
    out = []
    for i in range(n):
        lo, hi = ivs[i]
        if out and lo <= out[len(out) - 1][1]:
            prev = out[len(out) - 1]
            if hi > prev[1]:
                out[len(out) - 1] = (prev[0], hi)
        else:
            out.append((lo, hi))
    return out


def intersect_unions(a, b):
    cdef Py_ssize_t i = 0, j = 0, la = len(a), lb = len(b)
    out = []
    while i < la and j < lb:
        alo, ahi = a[i]
        blo, bhi = b[j]
        lo = alo if alo >= blo else blo
        hi = ahi if ahi <= bhi else bhi
        if lo <= hi:
            out.append((lo, hi))
        if ahi <= bhi:
            i += 1
        else:
            j += 1
    return out
