"""ell-adic embeddings of number fields and exact ell-adic valuations.

An embedding is realised by a Hensel-lifted root of the defining polynomial
in a finite ell-adic ring: the Galois ring GR(ell^k, f) for the unramified
part, extended by an Eisenstein polynomial when ell divides a cyclotomic
order.  Precision is explicit; valuations are re-checked with extra digits.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field as dc_field
from functools import lru_cache
from fractions import Fraction
from math import gcd

from sympy import Poly, factor_list, symbols

from .cyclotomic import CyclotomicElement, cyclotomic_coeffs
from .numberfield import NumberField, NumberFieldElement
from .numtheory import euler_phi, isprime, vp

_x = symbols("x")

GUARD = 4
MAX_PRECISION = 4096


class NoSimpleRoot(ValueError):
    """The defining polynomial has no simple root over any unramified extension."""


class PrecisionExhausted(ArithmeticError):
    """The valuation could not be certified at the working precision."""


INFINITE = float("inf")


# ---------------------------------------------------------------- Galois rings

def _pmod(c: list[int], h: tuple[int, ...], q: int) -> list[int]:
    f = len(h) - 1
    c = list(c)
    for k in range(len(c) - 1, f - 1, -1):
        t = c[k] % q
        if t:
            off = k - f
            for i in range(f):
                if h[i]:
                    c[off + i] -= t * h[i]
        c[k] = 0
    out = [v % q for v in c[:f]]
    return out + [0] * (f - len(out))


@dataclass(frozen=True)
class GaloisRing:
    """(Z/ell^k)[t]/(h(t)) with h monic and irreducible modulo ell."""

    ell: int
    k: int
    h: tuple[int, ...]

    @property
    def f(self) -> int:
        return len(self.h) - 1

    @property
    def q(self) -> int:
        return self.ell**self.k

    def const(self, a: int) -> tuple[int, ...]:
        return tuple([a % self.q] + [0] * (self.f - 1))

    def add(self, a, b):
        q = self.q
        return tuple((x + y) % q for x, y in zip(a, b))

    def sub(self, a, b):
        q = self.q
        return tuple((x - y) % q for x, y in zip(a, b))

    def scale(self, a, s: int):
        q = self.q
        return tuple((x * s) % q for x in a)

    def mul(self, a, b):
        f = self.f
        if f == 1:
            return ((a[0] * b[0]) % self.q,)
        out = [0] * (2 * f - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    if y:
                        out[i + j] += x * y
        return tuple(_pmod(out, self.h, self.q))

    def pow(self, a, n: int):
        out = self.const(1)
        while n:
            if n & 1:
                out = self.mul(out, a)
            a = self.mul(a, a)
            n >>= 1
        return out

    def inverse(self, a):
        # inverse modulo ell by exponentiation in the residue field, then Newton
        r = GaloisRing(self.ell, 1, tuple(c % self.ell for c in self.h))
        a1 = tuple(c % self.ell for c in a)
        if not any(a1):
            raise ZeroDivisionError("non-unit in Galois ring")
        v = r.pow(a1, self.ell**self.f - 2)
        prec = 1
        two = self.const(2)
        while prec < self.k:
            prec *= 2
            v = self.mul(v, self.sub(two, self.mul(a, v)))
        return tuple(c % self.q for c in v)

    def val(self, a) -> int:
        """Minimum ell-adic valuation of the coordinates, capped at k."""
        best = self.k
        for c in a:
            if c:
                best = min(best, vp(c, self.ell))
        return best

    def eval_poly(self, coeffs, r):
        acc = self.const(0)
        for c in reversed(coeffs):
            acc = self.add(self.mul(acc, r), self.const(c))
        return acc

    def with_precision(self, k: int) -> "GaloisRing":
        return GaloisRing(self.ell, k, self.h)


def _hensel_root(ring: GaloisRing, poly: list[int], start):
    dpoly = [i * c for i, c in enumerate(poly)][1:]
    r = start
    for _ in range(ring.k + 1):
        val = ring.eval_poly(poly, r)
        if not any(val):
            break
        r = ring.sub(r, ring.mul(val, ring.inverse(ring.eval_poly(dpoly, r))))
    if any(ring.eval_poly(poly, r)):
        raise ArithmeticError("Hensel iteration failed to converge")
    return r


def _sorted_factors_mod(poly: list[int], ell: int):
    """Irreducible factors of poly mod ell as (coeffs low-first in [0, ell), multiplicity)."""
    P = Poly(list(reversed(poly)), _x, modulus=ell)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        _, facs = factor_list(P.as_expr(), _x, modulus=ell)
    out = []
    for fac, mult in facs:
        c = [int(v) % ell for v in reversed(Poly(fac, _x, modulus=ell).all_coeffs())]
        lead = c[-1]
        inv = pow(lead, -1, ell)
        c = [(v * inv) % ell for v in c]
        out.append((tuple(c), mult))
    out.sort(key=lambda t: (len(t[0]), tuple(reversed(t[0][:-1]))))
    return out


def _select_factor(poly: list[int], ell: int):
    """Root-ordering rule: minimal degree first, then smallest residue (lexicographic)."""
    return _select_factor_cached(tuple(int(c) % ell for c in poly), ell)


@lru_cache(maxsize=512)
def _select_factor_cached(poly: tuple[int, ...], ell: int):
    facs = [(c, m) for c, m in _sorted_factors_mod(list(poly), ell) if m == 1]
    if not facs:
        raise NoSimpleRoot(f"no simple factor modulo {ell}")
    dmin = min(len(c) for c, _ in facs)
    cands = [c for c, _ in facs if len(c) == dmin]
    if dmin == 2:
        # linear factors x - r: order by the root r
        cands.sort(key=lambda c: (-c[0]) % ell)
    return cands[0]


# ---------------------------------------------------------------- embeddings

@dataclass(frozen=True)
class EllAdicEmbedding:
    """A fixed embedding of a number field into an ell-adic ring of precision k.

    kind is "rational", "field" (power basis of a NumberField) or
    "cyclotomic" (power basis of Q(zeta_order)).
    """

    ell: int
    k: int
    kind: str
    ring: GaloisRing
    root: tuple[int, ...] | None = None
    field: NumberField | None = None
    order: int = 1
    ram_exp: int = 0  # ell-exponent a with ell^a | order
    images: tuple = dc_field(default=(), repr=False, compare=False)

    @property
    def e(self) -> int:
        return euler_phi(self.ell**self.ram_exp) if self.ram_exp else 1

    def with_precision(self, k: int) -> "EllAdicEmbedding":
        if self.kind == "rational":
            return rational_embedding(self.ell, k)
        if self.kind == "field":
            return hensel_embed(self.field, self.ell, k)
        return cyclotomic_embedding(self.order, self.ell, k)

    # ring of the ramified part: lists of e Galois-ring elements in pi
    def _emul(self, a, b):
        e = self.e
        R = self.ring
        if e == 1:
            return (R.mul(a[0], b[0]),)
        out = [R.const(0)] * (2 * e - 1)
        for i, x in enumerate(a):
            if any(x):
                for j, y in enumerate(b):
                    if any(y):
                        out[i + j] = R.add(out[i + j], R.mul(x, y))
        eis = _eisenstein(self.ell, self.ram_exp)
        for t in range(len(out) - 1, e - 1, -1):
            c = out[t]
            if any(c):
                for i in range(e):
                    if eis[i]:
                        out[t - e + i] = R.sub(out[t - e + i], R.scale(c, eis[i]))
                out[t] = R.const(0)
        return tuple(out[:e])

    def _valuation_of_image(self, img) -> Fraction:
        e = self.e
        best = None
        for i, c in enumerate(img):
            if any(c):
                v = Fraction(e * self.ring.val(c) + i, e)
                best = v if best is None else min(best, v)
        if best is None:
            return Fraction(self.k)
        return best


def rational_embedding(ell: int, k: int) -> EllAdicEmbedding:
    ring = GaloisRing(ell, k, (0, 1))
    return EllAdicEmbedding(ell, k, "rational", ring, root=ring.const(0))


@lru_cache(maxsize=None)
def _eisenstein(ell: int, a: int) -> tuple[int, ...]:
    """Coefficients of Phi_{ell^a}(1 + pi) lowest first."""
    c = cyclotomic_coeffs(ell**a)
    n = len(c) - 1
    out = [0] * (n + 1)
    # expand sum c_j (1+pi)^j
    from math import comb
    for j, cj in enumerate(c):
        if cj:
            for i in range(j + 1):
                out[i] += cj * comb(j, i)
    return tuple(out)


def hensel_embed(field_tag, ell: int, k: int) -> EllAdicEmbedding:
    """Embedding determined by a Hensel-lifted root of the defining polynomial.

    field_tag is a NumberField, the integer 1 (meaning Q), or ("cyclotomic", m).
    Roots are chosen by the rule: factor of minimal degree, then smallest
    residue.  An unramified extension of the minimal degree is built when no
    root exists modulo ell.
    """
    if not isprime(ell):
        raise ValueError("ell must be prime")
    if field_tag == 1 or (isinstance(field_tag, NumberField) and field_tag.degree == 1):
        if isinstance(field_tag, NumberField):
            ring = GaloisRing(ell, k, (0, 1))
            root = ring.const(int(-field_tag.poly[0]))
            return EllAdicEmbedding(ell, k, "field", ring, root=root, field=field_tag)
        return rational_embedding(ell, k)
    if isinstance(field_tag, tuple) and field_tag[0] == "cyclotomic":
        return cyclotomic_embedding(field_tag[1], ell, k)
    if not isinstance(field_tag, NumberField):
        raise TypeError("unsupported field tag")
    den = 1
    for c in field_tag.poly:
        den = den * Fraction(c).denominator // gcd(den, Fraction(c).denominator)
    if den % ell == 0:
        raise NoSimpleRoot("defining polynomial is not ell-integral")
    poly = [int(Fraction(c) * den) for c in field_tag.poly]
    inv_den = pow(den, -1, ell**k)
    poly = [(c * inv_den) % ell**k for c in poly]
    fac = _select_factor([c % ell for c in poly], ell)
    h = tuple(fac)
    ring = GaloisRing(ell, k, h)
    if len(h) == 2:
        start = ring.const(-h[0])
    else:
        start = tuple([0, 1] + [0] * (len(h) - 3))
    root = _hensel_root(ring, poly, start)
    return EllAdicEmbedding(ell, k, "field", ring, root=root, field=field_tag)


@lru_cache(maxsize=256)
def cyclotomic_embedding(m: int, ell: int, k: int) -> EllAdicEmbedding:
    a = vp(m, ell) if m % ell == 0 else 0
    mp = m // ell**a
    if mp == 1:
        ring = GaloisRing(ell, k, (0, 1))
        T = ring.const(1)
    else:
        poly = list(cyclotomic_coeffs(mp))
        h = tuple(_select_factor([c % ell for c in poly], ell))
        ring = GaloisRing(ell, k, h)
        start = ring.const(-h[0]) if len(h) == 2 else tuple([0, 1] + [0] * (len(h) - 3))
        T = _hensel_root(ring, poly, start)
    emb = EllAdicEmbedding(ell, k, "cyclotomic", ring, root=T, order=m, ram_exp=a)
    # image of zeta_m = T^alpha (1 + pi)^beta
    la = ell**a
    alpha = pow(la, -1, mp) if mp > 1 else 0
    beta = pow(mp, -1, la) if a else 0
    e = emb.e
    zero = ring.const(0)
    unr = ring.pow(T, alpha) if mp > 1 else ring.const(1)
    one_pi = [ring.const(1)] + ([ring.const(1)] if e > 1 else []) + [zero] * max(0, e - 2)
    if e == 1:
        ram = (ring.const(1),)
    else:
        ram = (ring.const(1),) + (zero,) * (e - 1)
        base = tuple(one_pi)
        n = beta
        while n:
            if n & 1:
                ram = emb._emul(ram, base)
            base = emb._emul(base, base)
            n >>= 1
    z = tuple(ring.mul(unr, c) for c in ram)
    phi = euler_phi(m)
    imgs = [((ring.const(1),) + (zero,) * (e - 1))]
    for _ in range(1, phi):
        imgs.append(emb._emul(imgs[-1], z))
    return EllAdicEmbedding(ell, k, "cyclotomic", ring, root=T, order=m, ram_exp=a, images=tuple(imgs))


def _image(x, emb: EllAdicEmbedding):
    """Return (image in the ell-adic ring, ell-adic valuation of the denominator)."""
    R = emb.ring
    if emb.kind == "rational" or (emb.kind == "field" and emb.field.degree == 1):
        q = Fraction(x if not isinstance(x, NumberFieldElement) else x.coords[0])
        dv = vp(q.denominator, emb.ell) if q.denominator % emb.ell == 0 else 0
        num = q.numerator * pow(q.denominator // emb.ell**dv, -1, R.q)
        return ((R.const(num),), dv)
    if emb.kind == "cyclotomic":
        if not isinstance(x, CyclotomicElement):
            x = CyclotomicElement.rational(emb.order, x)
        if emb.order % x.order:
            raise ValueError("element does not live in the embedded field")
        x = x.lift(emb.order)
        den = x.den
        dv = vp(den, emb.ell) if den % emb.ell == 0 else 0
        u = pow(den // emb.ell**dv, -1, R.q)
        e = emb.e
        acc = [R.const(0)] * e
        for c, img in zip(x.num, emb.images):
            if c:
                cc = (c * u) % R.q
                for i in range(e):
                    acc[i] = R.add(acc[i], R.scale(img[i], cc))
        return (tuple(acc), dv)
    # generic number field
    den = 1
    for c in x.coords:
        den = den * c.denominator // gcd(den, c.denominator)
    dv = vp(den, emb.ell) if den % emb.ell == 0 else 0
    u = pow(den // emb.ell**dv, -1, R.q)
    coeffs = [int(c * den) * u for c in x.coords]
    return ((R.eval_poly(coeffs, emb.root),), dv)


def _is_zero(x) -> bool:
    if isinstance(x, CyclotomicElement):
        return x.is_zero()
    if isinstance(x, NumberFieldElement):
        return x.is_zero()
    return Fraction(x) == 0


def _raw_valuation(x, emb: EllAdicEmbedding) -> Fraction:
    img, dv = _image(x, emb)
    v = emb._valuation_of_image(img)
    if v >= emb.k - GUARD:
        raise PrecisionExhausted(f"valuation not certified at precision {emb.k}")
    return v - dv


def ell_valuation(x, emb: EllAdicEmbedding, *, retry: bool = True):
    """Exact v_ell(iota(x)) normalised by v_ell(ell) = 1; INFINITE for x = 0.

    The value is computed at precision k and re-checked at k + GUARD.  With
    retry, precision is doubled on exhaustion up to MAX_PRECISION.
    """
    if _is_zero(x):
        return INFINITE
    while True:
        try:
            v = _raw_valuation(x, emb)
            v2 = _raw_valuation(x, emb.with_precision(emb.k + GUARD))
            if v != v2:
                raise PrecisionExhausted("valuation unstable under extra guard digits")
            return v
        except PrecisionExhausted:
            if not retry or emb.k * 2 > MAX_PRECISION:
                raise
            emb = emb.with_precision(emb.k * 2)


def root_residue(emb: EllAdicEmbedding) -> tuple[int, ...]:
    """The chosen root reduced modulo ell (coordinates in the residue field)."""
    return tuple(c % emb.ell for c in emb.root)


# ---------------------------------------------------------------- congruence utility

@dataclass(frozen=True)
class PowerResidueReport:
    p: int
    k: int
    x: Fraction
    lhs_minus_rhs_valuation: float
    modulus_valuation: int
    holds: bool

    @property
    def surplus(self) -> float:
        return self.lhs_minus_rhs_valuation - self.modulus_valuation


def padic_power_residue(x, p: int, k: int, precision: int | None = None) -> PowerResidueReport:
    """Check (1+x)^(p^k) = 1 + p^k x modulo x^2 p^k (p odd) or x^2 p^(k-1) (p = 2)."""
    x = Fraction(x)
    if x == 0:
        raise ValueError("x must be nonzero")
    vx = vp(x.numerator, p) - vp(x.denominator, p)
    if x.denominator % p == 0 or vx <= 1:
        raise ValueError("requires v_p(x) > 1")
    if precision is None:
        diff = (1 + x) ** (p**k) - (1 + p**k * x)
        dv = INFINITE if diff == 0 else vp(diff.numerator, p)
    else:
        # exact arithmetic modulo p^precision on the integer numerator
        mod = p**precision
        num = x.numerator % mod
        inv = pow(x.denominator, -1, mod)
        xi = (num * inv) % mod
        diff = (pow(1 + xi, p**k, mod) - (1 + p**k * xi)) % mod
        dv = precision if diff == 0 else vp(diff, p)
    mv = 2 * vx + (k if p != 2 else k - 1)
    # in truncated mode a difference that vanishes mod p^precision certifies what it can
    need = mv if precision is None else min(mv, precision)
    return PowerResidueReport(p, k, x, dv, mv, dv >= need)
