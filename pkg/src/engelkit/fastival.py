"""Fast sound interval arithmetic on machine floats.

Every operation rounds outward by at least one ulp via math.nextafter, so
enclosures are rigorous for expressions built from +, *, integer powers,
sin and cos (libm sin/cos are correct to about one ulp; a generous slop is
added around them and around the pi constants used in range reduction).
Intervals are plain (lo, hi) tuples for speed.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Tuple

INF = math.inf
_PI_LO = math.nextafter(math.pi, 0.0)
_PI_HI = math.nextafter(math.pi, INF)
_TRIG_SLOP = 4e-15  # covers libm error and argument-reduction drift


def from_fraction(f: Fraction) -> Tuple[float, float]:
    v = f.numerator / f.denominator
    # one ulp on each side covers the rounding of the division
    return (math.nextafter(v, -INF), math.nextafter(v, INF))


def exact(v: float) -> Tuple[float, float]:
    return (v, v)


def add(a, b):
    return (math.nextafter(a[0] + b[0], -INF), math.nextafter(a[1] + b[1], INF))


def sub(a, b):
    return (math.nextafter(a[0] - b[1], -INF), math.nextafter(a[1] - b[0], INF))


def mul(a, b):
    p1 = a[0] * b[0]
    p2 = a[0] * b[1]
    p3 = a[1] * b[0]
    p4 = a[1] * b[1]
    lo = min(p1, p2, p3, p4)
    hi = max(p1, p2, p3, p4)
    return (math.nextafter(lo, -INF), math.nextafter(hi, INF))


def neg(a):
    return (-a[1], -a[0])


def ipow(a, n: int):
    if n == 0:
        return (1.0, 1.0)
    if n == 1:
        return a
    if n % 2 == 1 or a[0] >= 0:
        lo, hi = a[0] ** n, a[1] ** n
    elif a[1] <= 0:
        lo, hi = a[1] ** n, a[0] ** n
    else:
        lo, hi = 0.0, max(a[0] ** n, a[1] ** n)
    return (math.nextafter(lo, -INF), math.nextafter(hi, INF))


def _sin_point(x: float) -> Tuple[float, float]:
    v = math.sin(x)
    return (v - _TRIG_SLOP - 1e-16 * abs(x), v + _TRIG_SLOP + 1e-16 * abs(x))


def _cos_point(x: float) -> Tuple[float, float]:
    v = math.cos(x)
    return (v - _TRIG_SLOP - 1e-16 * abs(x), v + _TRIG_SLOP + 1e-16 * abs(x))


def sin(a):
    lo, hi = a
    if hi - lo >= 2.0 * _PI_HI:
        return (-1.0, 1.0)
    s_lo = _sin_point(lo)
    s_hi = _sin_point(hi)
    out_lo = min(s_lo[0], s_hi[0])
    out_hi = max(s_lo[1], s_hi[1])
    # maxima of sin at pi/2 + 2k pi, minima at -pi/2 + 2k pi
    k0 = math.floor((lo - _PI_LO / 2) / (2 * _PI_LO)) - 1
    k1 = math.ceil((hi - _PI_LO / 2) / (2 * _PI_LO)) + 1
    slack = 1e-9
    for k in range(int(k0), int(k1) + 1):
        crit_max = math.pi / 2 + 2 * math.pi * k
        crit_min = -math.pi / 2 + 2 * math.pi * k
        if lo - slack <= crit_max <= hi + slack:
            out_hi = 1.0
        if lo - slack <= crit_min <= hi + slack:
            out_lo = -1.0
    return (max(out_lo, -1.0), min(out_hi, 1.0))


def cos(a):
    lo, hi = a
    if hi - lo >= 2.0 * _PI_HI:
        return (-1.0, 1.0)
    c_lo = _cos_point(lo)
    c_hi = _cos_point(hi)
    out_lo = min(c_lo[0], c_hi[0])
    out_hi = max(c_lo[1], c_hi[1])
    k0 = math.floor(lo / (2 * _PI_LO)) - 1
    k1 = math.ceil(hi / (2 * _PI_LO)) + 1
    slack = 1e-9
    for k in range(int(k0), int(k1) + 1):
        crit_max = 2 * math.pi * k
        crit_min = math.pi + 2 * math.pi * k
        if lo - slack <= crit_max <= hi + slack:
            out_hi = 1.0
        if lo - slack <= crit_min <= hi + slack:
            out_lo = -1.0
    return (max(out_lo, -1.0), min(out_hi, 1.0))
