"""Exact rational and univariate polynomial arithmetic.

The engine's only numeric scalar is `Rational`, an alias of
`fractions.Fraction`: arbitrary-precision, always normalized (positive
denominator, coprime), so every value produced anywhere in the solver is
in canonical form by construction.

`UniPoly` is a univariate polynomial with rational coefficients stored
lowest-degree first with no trailing zeros; the empty tuple is the zero
polynomial and its `degree` is None (kept distinct from degree 0).
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence, Tuple

from treemi import kernels

Rational = Fraction

_RATIONAL_RE = re.compile(r"[+-]?(\d+(\.\d+)?|\.\d+|\d+/\d+)\Z")


def parse_rational(text: str) -> Fraction:
    """Parse "p/q", an integer, or an exact decimal literal ("1.25" -> 5/4)."""
    s = text.strip()
    if not _RATIONAL_RE.match(s):
        raise ValueError(f"not a rational literal: {text!r}")
    return Fraction(s)


def format_rational(value: Fraction) -> str:
    """Render as "p/q" (denominator always shown, matching solver output)."""
    return f"{value.numerator}/{value.denominator}"


def as_rational(value) -> Fraction:
    """Coerce int or Fraction; floats are rejected to keep exactness."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    raise TypeError(f"expected an exact rational, got {type(value).__name__}")


@dataclass(frozen=True)
class UniPoly:
    """Univariate polynomial; coeffs[i] is the coefficient of y**i."""

    coeffs: Tuple[Fraction, ...]

    @staticmethod
    def of(coeffs: Iterable) -> "UniPoly":
        cs = [as_rational(c) for c in coeffs]
        while cs and not cs[-1]:
            cs.pop()
        return UniPoly(tuple(cs))

    @staticmethod
    def zero() -> "UniPoly":
        return UniPoly(())

    @staticmethod
    def constant(c) -> "UniPoly":
        return UniPoly.of([c])

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def degree(self):
        """Degree of the polynomial, or None for the zero polynomial."""
        return len(self.coeffs) - 1 if self.coeffs else None

    def __call__(self, x) -> Fraction:
        return kernels.poly_eval(self.coeffs, as_rational(x))

    def __add__(self, other: "UniPoly") -> "UniPoly":
        return UniPoly(kernels.poly_add(self.coeffs, other.coeffs))

    def __mul__(self, other: "UniPoly") -> "UniPoly":
        return UniPoly(kernels.poly_mul(self.coeffs, other.coeffs))

    def scale(self, c) -> "UniPoly":
        return UniPoly(kernels.poly_scale(self.coeffs, as_rational(c)))

    def antiderivative(self) -> "UniPoly":
        return UniPoly(kernels.poly_antideriv(self.coeffs))

    def integrate(self, lo, hi) -> Fraction:
        lo, hi = as_rational(lo), as_rational(hi)
        if lo > hi:
            raise ValueError(f"integration bounds out of order: {lo} > {hi}")
        return kernels.poly_integrate(self.coeffs, lo, hi)

    def __str__(self) -> str:
        if not self.coeffs:
            return "0"
        terms = []
        for i, c in enumerate(self.coeffs):
            if not c:
                continue
            if i == 0:
                terms.append(str(c))
            elif i == 1:
                terms.append(f"{c}*y")
            else:
                terms.append(f"{c}*y^{i}")
        return " + ".join(terms)


def poly_eval(p: UniPoly, x) -> Fraction:
    return p(x)


def poly_add(p: UniPoly, q: UniPoly) -> UniPoly:
    return p + q


def poly_mul(p: UniPoly, q: UniPoly) -> UniPoly:
    return p * q


def poly_scale(p: UniPoly, c) -> UniPoly:
    return p.scale(c)


def definite_integral(p: UniPoly, lo, hi) -> Fraction:
    """Exact integral of p over [lo, hi]; lo must not exceed hi."""
    return p.integrate(lo, hi)


def interpolate(points: Sequence[Tuple[Fraction, Fraction]]) -> UniPoly:
    """Unique polynomial of degree < len(points) through the given points.

    Raises ValueError on an empty list or duplicate x values (a duplicate
    means the caller's piece instantiation produced colliding nodes, which
    is a bug upstream).
    """
    if not points:
        raise ValueError("interpolation needs at least one point")
    xs = tuple(as_rational(x) for x, _ in points)
    ys = tuple(as_rational(y) for _, y in points)
    if len(set(xs)) != len(xs):
        raise ValueError("duplicate x values in interpolation points")
    return UniPoly(kernels.interpolate_coeffs(xs, ys))
