"""Exact arithmetic in cyclotomic fields Q(zeta_m).

Elements are stored as integer numerators on the power basis
1, z, ..., z^(phi(m)-1) together with a positive common denominator.
"""

from __future__ import annotations

import cmath
from fractions import Fraction
from functools import lru_cache
from math import gcd

import numpy as np
from sympy import Poly, cyclotomic_poly, symbols

from .numtheory import euler_phi, lcm

_x = symbols("x")


@lru_cache(maxsize=None)
def cyclotomic_coeffs(m: int) -> tuple[int, ...]:
    """Coefficients of Phi_m, lowest degree first."""
    p = Poly(cyclotomic_poly(m, _x), _x)
    return tuple(int(c) for c in reversed(p.all_coeffs()))


def _reduce_int(c: list[int], m: int) -> list[int]:
    """Reduce an integer polynomial (any length) modulo x^m - 1 and Phi_m."""
    phi = euler_phi(m)
    if len(c) > m:
        folded = [0] * m
        for k, v in enumerate(c):
            folded[k % m] += v
        c = folded
    else:
        c = list(c)
    cyc = cyclotomic_coeffs(m)
    for k in range(len(c) - 1, phi - 1, -1):
        t = c[k]
        if t:
            off = k - phi
            for i in range(phi):
                if cyc[i]:
                    c[off + i] -= t * cyc[i]
            c[k] = 0
    out = c[:phi]
    if len(out) < phi:
        out += [0] * (phi - len(out))
    return out


def _poly_divmod_frac(a: list[Fraction], b: list[Fraction]):
    a = list(a)
    db = len(b) - 1
    while db > 0 and b[db] == 0:
        db -= 1
    q = [Fraction(0)] * max(len(a) - db, 1)
    lead = b[db]
    for k in range(len(a) - 1, db - 1, -1):
        t = a[k]
        if t:
            f = t / lead
            q[k - db] = f
            for i in range(db + 1):
                a[k - db + i] -= f * b[i]
    r = a[:db] if db > 0 else []
    return q, r


def _trim(a):
    a = list(a)
    while a and a[-1] == 0:
        a.pop()
    return a


def _poly_mul_frac(a, b):
    if not a or not b:
        return []
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, s in enumerate(a):
        if s:
            for j, t in enumerate(b):
                if t:
                    out[i + j] += s * t
    return out


def _poly_sub(a, b):
    n = max(len(a), len(b))
    return [(a[i] if i < len(a) else 0) - (b[i] if i < len(b) else 0) for i in range(n)]


class CyclotomicElement:
    """An element of Q(zeta_m) reduced modulo the m-th cyclotomic polynomial."""

    __slots__ = ("order", "num", "den", "_hash")

    def __init__(self, order: int, num, den: int = 1, *, reduced: bool = False):
        self.order = order
        if not reduced:
            num = _reduce_int([int(v) for v in num], order)
        num = tuple(num)
        if den < 0:
            num = tuple(-v for v in num)
            den = -den
        g = den
        for v in num:
            g = gcd(g, v)
            if g == 1:
                break
        if g > 1:
            num = tuple(v // g for v in num)
            den //= g
        self.num = num
        self.den = den
        self._hash = None

    # construction
    @classmethod
    def from_fractions(cls, order: int, coeffs) -> "CyclotomicElement":
        coeffs = [Fraction(c) for c in coeffs]
        d = 1
        for c in coeffs:
            d = lcm(d, c.denominator)
        return cls(order, [int(c * d) for c in coeffs], d)

    @classmethod
    def zero(cls, order: int) -> "CyclotomicElement":
        return cls(order, [0] * euler_phi(order), 1, reduced=True)

    @classmethod
    def one(cls, order: int) -> "CyclotomicElement":
        return cls.rational(order, 1)

    @classmethod
    def rational(cls, order: int, q) -> "CyclotomicElement":
        q = Fraction(q)
        num = [0] * euler_phi(order)
        num[0] = q.numerator
        return cls(order, num, q.denominator, reduced=True)

    @classmethod
    def zeta(cls, order: int, k: int = 1) -> "CyclotomicElement":
        k %= order
        num = [0] * (k + 1)
        num[k] = 1
        return cls(order, num)

    @classmethod
    def from_exponent_counts(cls, order: int, counts) -> "CyclotomicElement":
        """Element sum_k counts[k] * zeta^k for an integer vector of length order."""
        return cls(order, [int(v) for v in counts])

    # views
    @property
    def coeffs(self) -> tuple[Fraction, ...]:
        return tuple(Fraction(v, self.den) for v in self.num)

    def is_zero(self) -> bool:
        return not any(self.num)

    def is_rational(self) -> bool:
        return not any(self.num[1:])

    def rational_value(self) -> Fraction:
        if not self.is_rational():
            raise ValueError("element is not rational")
        return Fraction(self.num[0], self.den)

    def __repr__(self):
        terms = []
        for k, v in enumerate(self.num):
            if v:
                terms.append(f"{v}*z^{k}" if k else f"{v}")
        body = " + ".join(terms) if terms else "0"
        if self.den != 1:
            body = f"({body})/{self.den}"
        return f"Cyc{self.order}[{body}]"

    # field embedding / coercion
    def lift(self, order: int) -> "CyclotomicElement":
        """View self inside Q(zeta_order) where self.order divides order."""
        if order == self.order:
            return self
        if order % self.order:
            raise ValueError("target order must be a multiple")
        step = order // self.order
        c = [0] * (step * (len(self.num) - 1) + 1)
        for k, v in enumerate(self.num):
            c[k * step] = v
        return CyclotomicElement(order, c, self.den)

    def _common(self, other):
        if isinstance(other, CyclotomicElement):
            if other.order == self.order:
                return self, other
            m = lcm(self.order, other.order)
            return self.lift(m), other.lift(m)
        if isinstance(other, (int, Fraction)):
            return self, CyclotomicElement.rational(self.order, other)
        return NotImplemented, NotImplemented

    def __add__(self, other):
        a, b = self._common(other)
        if a is NotImplemented:
            return NotImplemented
        d = a.den * b.den // gcd(a.den, b.den)
        fa, fb = d // a.den, d // b.den
        return CyclotomicElement(a.order, [x * fa + y * fb for x, y in zip(a.num, b.num)], d, reduced=True)

    __radd__ = __add__

    def __neg__(self):
        return CyclotomicElement(self.order, [-v for v in self.num], self.den, reduced=True)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            q = Fraction(other)
            return CyclotomicElement(self.order, [v * q.numerator for v in self.num], self.den * q.denominator, reduced=True)
        a, b = self._common(other)
        if a is NotImplemented:
            return NotImplemented
        if a.is_rational():
            return b * Fraction(a.num[0], a.den)
        if b.is_rational():
            return a * Fraction(b.num[0], b.den)
        prod = np.convolve(np.array(a.num, dtype=object), np.array(b.num, dtype=object))
        return CyclotomicElement(a.order, list(prod), a.den * b.den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            q = Fraction(other)
            return self * (1 / q)
        a, b = self._common(other)
        return a * b.inverse()

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        out = CyclotomicElement.one(self.order)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = CyclotomicElement.rational(self.order, other)
        if not isinstance(other, CyclotomicElement):
            return NotImplemented
        a, b = self._common(other)
        return a.num == b.num and a.den == b.den

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.order, self.num, self.den))
        return self._hash

    def inverse(self) -> "CyclotomicElement":
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero")
        if self.is_rational():
            return CyclotomicElement.rational(self.order, 1 / Fraction(self.num[0], self.den))
        # extended Euclid in Q[x] against Phi_m
        f = [Fraction(c) for c in cyclotomic_coeffs(self.order)]
        g = _trim([Fraction(v, self.den) for v in self.num])
        r0, r1 = f, g
        s0, s1 = [], [Fraction(1)]
        while len(_trim(r1)) > 1:
            q, r = _poly_divmod_frac(r0, r1)
            r0, r1 = r1, _trim(r)
            s0, s1 = s1, _trim(_poly_sub(s0, _poly_mul_frac(q, s1)))
        c = _trim(r1)[0]
        inv = [v / c for v in s1]
        return CyclotomicElement.from_fractions(self.order, inv)

    # Galois structure
    def galois(self, a: int) -> "CyclotomicElement":
        """Apply zeta -> zeta^a for a coprime to the order."""
        m = self.order
        c = [0] * m
        for k, v in enumerate(self.num):
            if v:
                c[(k * a) % m] += v
        return CyclotomicElement(m, c, self.den)

    def conj(self) -> "CyclotomicElement":
        return self.galois(-1)

    def norm(self) -> Fraction:
        out = CyclotomicElement.one(self.order)
        for a in range(1, max(self.order, 2)):
            if gcd(a, self.order) == 1:
                out = out * self.galois(a)
        return out.rational_value()

    def trace(self) -> Fraction:
        out = CyclotomicElement.zero(self.order)
        for a in range(1, max(self.order, 2)):
            if gcd(a, self.order) == 1:
                out = out + self.galois(a)
        return out.rational_value()

    def to_complex(self, k: int = 1) -> complex:
        """Evaluate under zeta -> exp(2 pi i k / m)."""
        m = self.order
        z = [cmath.exp(2j * cmath.pi * (k * j % m) / m) for j in range(len(self.num))]
        return sum(v * zj for v, zj in zip(self.num, z)) / self.den

    def canonical_key(self) -> str:
        return f"{self.order}:{self.den}:" + ",".join(str(v) for v in self.num)
