"""Pure-Python kernel implementations.

Reference implementation for the hot loops; `treemi._speedups` is the
compiled twin with the exact same API and exact same results.  Coefficient
vectors are tuples of Fraction, lowest degree first, no trailing zeros.
Interval unions are sorted lists of (lo, hi) Fraction pairs with pairwise
disjoint, non-touching closed intervals.
"""

from __future__ import annotations

from fractions import Fraction

BACKEND = "python"

_ZERO = Fraction(0)


def _trim(coeffs):
    n = len(coeffs)
    while n and not coeffs[n - 1]:
        n -= 1
    return tuple(coeffs[:n])


def poly_eval(coeffs, x):
    acc = _ZERO
    for c in reversed(coeffs):
        acc = acc * x + c
    return acc


def poly_add(a, b):
    if len(a) < len(b):
        a, b = b, a
    out = list(a)
    for i, c in enumerate(b):
        out[i] = out[i] + c
    return _trim(out)


def poly_mul(a, b):
    if not a or not b:
        return ()
    out = [_ZERO] * (len(a) + len(b) - 1)
    for i, ca in enumerate(a):
        if not ca:
            continue
        for j, cb in enumerate(b):
            out[i + j] += ca * cb
    return _trim(out)


def poly_scale(a, c):
    if not c:
        return ()
    return tuple(ci * c for ci in a)


def poly_antideriv(a):
    if not a:
        return ()
    out = [_ZERO]
    for i, c in enumerate(a):
        out.append(c / (i + 1))
    return _trim(out)


def poly_integrate(a, lo, hi):
    anti = poly_antideriv(a)
    return poly_eval(anti, hi) - poly_eval(anti, lo)


def interpolate_coeffs(xs, ys):
    # Newton divided differences, then expansion to the monomial basis.
    n = len(xs)
    dd = list(ys)
    for j in range(1, n):
        for i in range(n - 1, j - 1, -1):
            dd[i] = (dd[i] - dd[i - 1]) / (xs[i] - xs[i - j])
    coeffs = [dd[n - 1]]
    for i in range(n - 2, -1, -1):
        xi = xs[i]
        new = [_ZERO] * (len(coeffs) + 1)
        for k, c in enumerate(coeffs):
            new[k + 1] += c
            new[k] -= xi * c
        new[0] += dd[i]
        coeffs = new
    return _trim(coeffs)


def normalize_union(intervals):
    ivs = sorted((lo, hi) for lo, hi in intervals if lo <= hi)
    out = []
    for lo, hi in ivs:
        if out and lo <= out[-1][1]:
            if hi > out[-1][1]:
                out[-1] = (out[-1][0], hi)
        else:
            out.append((lo, hi))
    return out


def intersect_unions(a, b):
    out = []
    i = j = 0
    while i < len(a) and j < len(b):
        lo = a[i][0] if a[i][0] >= b[j][0] else b[j][0]
        hi = a[i][1] if a[i][1] <= b[j][1] else b[j][1]
        if lo <= hi:
            out.append((lo, hi))
        if a[i][1] <= b[j][1]:
            i += 1
        else:
            j += 1
    return out
