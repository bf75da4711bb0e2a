"""Number fields given by one monic primitive element over Q."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from sympy import Matrix, Poly, Rational, symbols

_x = symbols("x")


@dataclass(frozen=True)
class NumberField:
    """Q[x]/(P) for a monic irreducible P, coefficients lowest degree first."""

    poly: tuple[Fraction, ...]

    def __post_init__(self):
        if Fraction(self.poly[-1]) != 1:
            raise ValueError("defining polynomial must be monic")

    @classmethod
    def from_coeffs(cls, coeffs) -> "NumberField":
        return cls(tuple(Fraction(c) for c in coeffs))

    @property
    def degree(self) -> int:
        return len(self.poly) - 1

    def element(self, coords) -> "NumberFieldElement":
        return NumberFieldElement(self, tuple(Fraction(c) for c in coords))

    def gen(self) -> "NumberFieldElement":
        c = [0] * self.degree
        if self.degree > 1:
            c[1] = 1
            return self.element(c)
        return self.element([-self.poly[0]])

    def rational(self, q) -> "NumberFieldElement":
        c = [0] * self.degree
        c[0] = q
        return self.element(c)

    def sympy_poly(self) -> Poly:
        return Poly([Rational(c.numerator, c.denominator) for c in reversed(self.poly)], _x)


def compositum(f: NumberField, g: NumberField) -> NumberField:
    """Defining polynomial of Q(a + k b) via a resultant, smallest k giving a squarefree result."""
    from sympy import resultant, sqf_part, degree as sdeg
    y = symbols("y")
    pf = f.sympy_poly().as_expr().subs(_x, y)
    pg = g.sympy_poly().as_expr()
    for k in range(0, 20):
        r = Poly(resultant(pf, pg.subs(_x, _x - k * y), y), _x)
        if sdeg(sqf_part(r)) == r.degree():
            r = r.monic()
            return NumberField.from_coeffs([Fraction(int(c.p), int(c.q)) for c in reversed(r.all_coeffs())])
    raise ValueError("no separating multiplier found")


@dataclass(frozen=True)
class NumberFieldElement:
    field: NumberField
    coords: tuple[Fraction, ...]

    def _red(self, c: list[Fraction]) -> "NumberFieldElement":
        n = self.field.degree
        P = self.field.poly
        c = list(c)
        for k in range(len(c) - 1, n - 1, -1):
            t = c[k]
            if t:
                for i in range(n):
                    c[k - n + i] -= t * P[i]
                c[k] = Fraction(0)
        c = c[:n] + [Fraction(0)] * max(0, n - len(c))
        return NumberFieldElement(self.field, tuple(c))

    def _coerce(self, other):
        if isinstance(other, NumberFieldElement):
            if other.field != self.field:
                raise ValueError("elements of different fields")
            return other
        return self.field.rational(other)

    def __add__(self, other):
        o = self._coerce(other)
        return NumberFieldElement(self.field, tuple(a + b for a, b in zip(self.coords, o.coords)))

    __radd__ = __add__

    def __neg__(self):
        return NumberFieldElement(self.field, tuple(-a for a in self.coords))

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        o = self._coerce(other)
        out = [Fraction(0)] * (2 * self.field.degree - 1)
        for i, a in enumerate(self.coords):
            if a:
                for j, b in enumerate(o.coords):
                    if b:
                        out[i + j] += a * b
        return self._red(out)

    __rmul__ = __mul__

    def multiplication_matrix(self) -> Matrix:
        n = self.field.degree
        cols = []
        basis = [self.field.element([1 if i == k else 0 for i in range(n)]) for k in range(n)]
        for b in basis:
            cols.append([Rational(c.numerator, c.denominator) for c in (self * b).coords])
        return Matrix(cols).T

    def norm(self) -> Fraction:
        d = self.multiplication_matrix().det()
        return Fraction(int(d.p), int(d.q))

    def trace(self) -> Fraction:
        t = self.multiplication_matrix().trace()
        return Fraction(int(t.p), int(t.q))

    def inverse(self) -> "NumberFieldElement":
        M = self.multiplication_matrix()
        e = Matrix([1] + [0] * (self.field.degree - 1))
        sol = M.LUsolve(e)
        return self.field.element([Fraction(int(s.p), int(s.q)) for s in sol])

    def __truediv__(self, other):
        return self * self._coerce(other).inverse()

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        out = self.field.rational(1)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def is_zero(self) -> bool:
        return not any(self.coords)
