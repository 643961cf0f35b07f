"""Exact quadratic-field numbers a + b*sqrt(2) and certified interval reals.

QuadF keeps lengths exact for orientation sets {0, 45, 90, 135}; Interval
supports certified comparisons for arbitrary equally spaced orientations.
"""
from __future__ import annotations

from fractions import Fraction
from functools import total_ordering

from .geom import fr


@total_ordering
class QuadF:
    """a + b*sqrt(2) with rational a, b; exact arithmetic and ordering."""

    __slots__ = ("a", "b")

    def __init__(self, a=0, b=0):
        self.a = Fraction(a)
        self.b = Fraction(b)

    def __add__(self, o):
        o = _q(o)
        return QuadF(self.a + o.a, self.b + o.b)

    __radd__ = __add__

    def __sub__(self, o):
        o = _q(o)
        return QuadF(self.a - o.a, self.b - o.b)

    def __rsub__(self, o):
        return _q(o) - self

    def __mul__(self, o):
        o = _q(o)
        return QuadF(self.a * o.a + 2 * self.b * o.b, self.a * o.b + self.b * o.a)

    __rmul__ = __mul__

    def __neg__(self):
        return QuadF(-self.a, -self.b)

    def __truediv__(self, o):
        o = _q(o)
        den = o.a * o.a - 2 * o.b * o.b
        if den == 0:
            raise ZeroDivisionError("division by zero in Q(sqrt 2)")
        num = self * QuadF(o.a, -o.b)
        return QuadF(num.a / den, num.b / den)

    def sign(self) -> int:
        a, b = self.a, self.b
        if a == 0 and b == 0:
            return 0
        if a >= 0 and b >= 0:
            return 1
        if a <= 0 and b <= 0:
            return -1
        # opposite signs: compare a^2 with 2 b^2
        if a > 0:  # b < 0
            return 1 if a * a > 2 * b * b else (-1 if a * a < 2 * b * b else 0)
        return -1 if a * a > 2 * b * b else (1 if a * a < 2 * b * b else 0)

    def __eq__(self, o):
        return (self - _q(o)).sign() == 0

    def __lt__(self, o):
        return (self - _q(o)).sign() < 0

    def __hash__(self):
        return hash((self.a, self.b))

    def __float__(self):
        return float(self.a) + float(self.b) * 2 ** 0.5

    def __repr__(self):
        return f"QuadF({self.a},{self.b})"


def _q(v):
    if isinstance(v, QuadF):
        return v
    return QuadF(v, 0)


# Interval arithmetic with certified sin/cos of rational multiples of pi.

def _arctan_bounds(inv_x: int, terms: int):
    """Certified bounds of arctan(1/inv_x) from the alternating series."""
    x = Fraction(1, inv_x)
    s = Fraction(0)
    term = x
    k = 1
    sign = 1
    for _ in range(terms):
        s += sign * term / k
        term *= x * x
        k += 2
        sign = -sign
    tail = term / k
    return (s - tail, s + tail) if sign > 0 else (s - tail, s + tail)


def _compute_pi():
    a_lo, a_hi = _arctan_bounds(5, 60)
    b_lo, b_hi = _arctan_bounds(239, 30)
    return (16 * a_lo - 4 * b_hi, 16 * a_hi - 4 * b_lo)


_PI_LO, _PI_HI = _compute_pi()


class Interval:
    """Closed rational interval; comparisons are certified or raise."""

    __slots__ = ("lo", "hi")

    def __init__(self, lo, hi=None):
        self.lo = Fraction(lo)
        self.hi = Fraction(hi if hi is not None else lo)
        if self.lo > self.hi:
            raise ValueError("inverted interval")

    def __add__(self, o):
        o = _iv(o)
        return Interval(self.lo + o.lo, self.hi + o.hi)

    __radd__ = __add__

    def __sub__(self, o):
        o = _iv(o)
        return Interval(self.lo - o.hi, self.hi - o.lo)

    def __rsub__(self, o):
        return _iv(o) - self

    def __mul__(self, o):
        o = _iv(o)
        cands = [self.lo * o.lo, self.lo * o.hi, self.hi * o.lo, self.hi * o.hi]
        return Interval(min(cands), max(cands))

    __rmul__ = __mul__

    def __neg__(self):
        return Interval(-self.hi, -self.lo)

    def __truediv__(self, o):
        o = _iv(o)
        if o.lo <= 0 <= o.hi:
            raise ZeroDivisionError("interval straddles zero")
        cands = [self.lo / o.lo, self.lo / o.hi, self.hi / o.lo, self.hi / o.hi]
        return Interval(min(cands), max(cands))

    def definitely_lt(self, o) -> bool:
        return self.hi < _iv(o).lo

    def definitely_gt(self, o) -> bool:
        return self.lo > _iv(o).hi

    def __lt__(self, o):
        o = _iv(o)
        if self.definitely_lt(o):
            return True
        if self.definitely_gt(o) or (self.lo == self.hi and o.lo == o.hi and self.lo == o.lo):
            return False
        raise ArithmeticError("interval comparison not certified; refine precision")

    def __float__(self):
        return float(self.lo + self.hi) / 2

    def __repr__(self):
        return f"Interval({float(self):.12g}±{float(self.hi-self.lo):.2g})"


def _iv(v):
    if isinstance(v, Interval):
        return v
    if isinstance(v, QuadF):
        s = _sqrt2_interval()
        return Interval(v.a, v.a) + Interval(v.b, v.b) * s
    return Interval(v, v)


_S2 = None


def _sqrt2_interval():
    global _S2
    if _S2 is None:
        import math
        r = math.isqrt(2 * 10 ** 96)
        _S2 = Interval(Fraction(r, 10 ** 48), Fraction(r + 1, 10 ** 48))
    return _S2


def pi_interval() -> Interval:
    return Interval(_PI_LO, _PI_HI)


def _sin_taylor(x: Interval, terms=40) -> Interval:
    """sin on a small interval (|x| <= 2) by Taylor with remainder bound."""
    def sin_pt(v: Fraction):
        s = Fraction(0)
        term = v
        k = 1
        for _ in range(terms):
            s += term
            term = -term * v * v / ((k + 1) * (k + 2))
            k += 2
        return s, abs(term)
    slo, e1 = sin_pt(x.lo)
    shi, e2 = sin_pt(x.hi)
    err = max(e1, e2) + (x.hi - x.lo)  # sin is 1-Lipschitz
    return Interval(min(slo, shi) - err, max(slo, shi) + err)


def sin_of_pi_multiple(num: int, den: int) -> Interval:
    """Certified enclosure of sin(num*pi/den) for 0 <= num/den <= 1."""
    x = pi_interval() * Interval(Fraction(num, den))
    # range-reduce to [0, pi/2] via symmetry sin(pi - x) = sin(x)
    half = pi_interval() * Interval(Fraction(1, 2))
    if x.lo > half.hi:
        x = pi_interval() - x
    return _sin_taylor(x)


def cos_of_pi_multiple(num: int, den: int) -> Interval:
    return sin_of_pi_multiple(den - 2 * num, 2 * den)
