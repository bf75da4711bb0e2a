"""Small integer utilities shared across the package."""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from math import gcd, isqrt

from sympy import factorint, isprime, primerange
from sympy.ntheory import n_order

__all__ = [
    "factorint",
    "isprime",
    "primerange",
    "n_order",
    "legendre",
    "kronecker",
    "euler_phi",
    "ramanujan_sum",
    "moebius",
    "xgcd",
    "crt_pair",
    "is_fundamental_discriminant",
    "vp",
    "frac_vp",
    "isqrt",
    "lcm",
    "divisors",
]


def xgcd(a: int, b: int) -> tuple[int, int, int]:
    """Return (g, x, y) with a*x + b*y = g = gcd(a, b) >= 0."""
    x0, y0, x1, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a < 0:
        a, x0, y0 = -a, -x0, -y0
    return a, x0, y0


def lcm(*args: int) -> int:
    out = 1
    for a in args:
        out = out * a // gcd(out, a)
    return out


def legendre(a: int, p: int) -> int:
    a %= p
    if a == 0:
        return 0
    return 1 if pow(a, (p - 1) // 2, p) == 1 else -1


def kronecker(d: int, n: int) -> int:
    """Kronecker symbol (d|n) for n >= 1."""
    if n <= 0:
        raise ValueError("n must be positive")
    out = 1
    for q, e in factorint(n).items():
        if q == 2:
            if d % 2 == 0:
                return 0
            s = 1 if d % 8 in (1, 7) else -1
        else:
            s = legendre(d, q)
        out *= s**e
    return out


@lru_cache(maxsize=None)
def euler_phi(n: int) -> int:
    out = n
    for q in factorint(n):
        out = out // q * (q - 1)
    return out


def moebius(n: int) -> int:
    f = factorint(n)
    if any(e > 1 for e in f.values()):
        return 0
    return -1 if len(f) % 2 else 1


def divisors(n: int) -> list[int]:
    out = [1]
    for q, e in factorint(n).items():
        out = [d * q**k for d in out for k in range(e + 1)]
    return sorted(out)


def ramanujan_sum(m: int, t: int) -> int:
    """Sum of exp(2 pi i k t / m) over k in (Z/m)^x."""
    g = gcd(m, t)
    return sum(moebius(m // d) * d for d in divisors(g))


def crt_pair(r1: int, m1: int, r2: int, m2: int) -> int:
    g, x, _ = xgcd(m1, m2)
    if g != 1:
        raise ValueError("moduli not coprime")
    return (r1 + (r2 - r1) * x * m1) % (m1 * m2)


def vp(n: int, p: int) -> int:
    if n == 0:
        raise ValueError("valuation of zero")
    k = 0
    while n % p == 0:
        n //= p
        k += 1
    return k


def frac_vp(x: Fraction, p: int) -> int:
    x = Fraction(x)
    return vp(x.numerator, p) - vp(x.denominator, p)


def is_fundamental_discriminant(d: int) -> bool:
    if d % 4 == 1:
        return all(e == 1 for e in factorint(abs(d)).values())
    if d % 4 == 0:
        m = d // 4
        if m % 4 not in (2, 3):
            return False
        return all(e == 1 for e in factorint(abs(m)).values())
    return False
