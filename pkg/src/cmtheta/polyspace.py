"""Homogeneous polynomials V_{h-2} with the PGL_2 action and its invariant pairing."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb, factorial


class OddWeight(ValueError):
    pass


def _check_weight(h: int) -> int:
    if h < 2 or h % 2:
        raise OddWeight(f"weight must be even and >= 2, got {h}")
    return (h - 2) // 2


@dataclass(frozen=True)
class PolySpace:
    """P = sum_i c_i x_i with x_i = X^(k+i) Y^(k-i), k = (h-2)/2, i = -k..k.

    coeffs[j] is the coefficient of x_{j-k}, i.e. of X^j Y^(h-2-j).
    """

    h: int
    coeffs: tuple[Fraction, ...]

    def __post_init__(self):
        _check_weight(self.h)
        if len(self.coeffs) != self.h - 1:
            raise ValueError("need h - 1 coefficients")

    @classmethod
    def from_coeffs(cls, h: int, coeffs) -> "PolySpace":
        return cls(h, tuple(Fraction(c) for c in coeffs))

    @classmethod
    def basis_vector(cls, h: int, i: int) -> "PolySpace":
        k = _check_weight(h)
        c = [0] * (h - 1)
        c[i + k] = 1
        return cls.from_coeffs(h, c)

    def coefficient(self, i: int) -> Fraction:
        return self.coeffs[i + (self.h - 2) // 2]

    def __add__(self, other: "PolySpace") -> "PolySpace":
        return PolySpace(self.h, tuple(a + b for a, b in zip(self.coeffs, other.coeffs)))

    def scale(self, c) -> "PolySpace":
        c = Fraction(c)
        return PolySpace(self.h, tuple(c * a for a in self.coeffs))

    def evaluate(self, X, Y):
        n = self.h - 2
        return sum(c * X**j * Y ** (n - j) for j, c in enumerate(self.coeffs))


def _linear_power(a, b, n):
    """Coefficients of (a X + b Y)^n by power of X."""
    return [comb(n, j) * a**j * b ** (n - j) for j in range(n + 1)]


def _poly_mul(p, q):
    out = [0] * (len(p) + len(q) - 1)
    for i, x in enumerate(p):
        if x:
            for j, y in enumerate(q):
                out[i + j] += x * y
    return out


def rho_action(h: int, gamma, P: PolySpace) -> PolySpace:
    """(rho_h(gamma) P)(X, Y) = det(gamma)^(-(h-2)/2) P((X, Y) gamma)."""
    k = _check_weight(h)
    if P.h != h:
        raise ValueError("weight mismatch")
    (a, b), (c, d) = [[Fraction(x) for x in r] for r in gamma]
    det = a * d - b * c
    if det == 0:
        raise ValueError("singular matrix")
    n = h - 2
    # (X, Y) gamma = (a X + c Y, b X + d Y)
    out = [Fraction(0)] * (n + 1)
    for j, cj in enumerate(P.coeffs):
        if not cj:
            continue
        term = _poly_mul(_linear_power(a, c, j), _linear_power(b, d, n - j))
        for t, v in enumerate(term):
            out[t] += cj * v
    s = det ** (-k)
    return PolySpace(h, tuple(s * v for v in out))


def basis_pairing(h: int, i: int, j: int) -> Fraction:
    """<x_i, x_j> = delta_{i,-j} (-1)^(k+i) Gamma(h/2+i) Gamma(h/2-i) / Gamma(h-1)."""
    k = _check_weight(h)
    if i != -j:
        return Fraction(0)
    return Fraction((-1) ** ((k + i) % 2) * factorial(h // 2 + i - 1) * factorial(h // 2 - i - 1),
                    factorial(h - 2))


def poly_pairing(h: int, P: PolySpace, Q: PolySpace) -> Fraction:
    k = _check_weight(h)
    tot = Fraction(0)
    for i in range(-k, k + 1):
        a = P.coefficient(i)
        if a:
            tot += a * Q.coefficient(-i) * basis_pairing(h, i, -i)
    return tot


def pairing_matrix(h: int) -> list[list[Fraction]]:
    k = _check_weight(h)
    return [[basis_pairing(h, i, j) for j in range(-k, k + 1)] for i in range(-k, k + 1)]
