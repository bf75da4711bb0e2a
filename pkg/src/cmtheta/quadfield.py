"""Imaginary quadratic fields, binary quadratic forms and ring class groups.

Elements of K are pairs (u, v) standing for u + v*w, where w = (t + sqrt(D))/2
with t = D mod 2.  Ideals of the order of conductor m are carried by primitive
binary quadratic forms (a, b, c) of discriminant m^2 D through the dictionary
(a, b, c) <-> Z a + Z (-b + sqrt(m^2 D))/2.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property, lru_cache
from itertools import product
from math import gcd, isqrt

import numpy as np

from .cyclotomic import CyclotomicElement
from .numtheory import (
    divisors,
    factorint,
    is_fundamental_discriminant,
    isprime,
    kronecker,
    lcm,
    legendre,
    xgcd,
)

SUPPORTED_DISCRIMINANTS = (-7, -11, -19, -43, -67, -163)


class NotCoprime(ValueError):
    """Raised when an ideal or element meets the conductor."""


class UnsupportedField(ValueError):
    pass


# ---------------------------------------------------------------- forms

Form = tuple[int, int, int]


def form_discriminant(f: Form) -> int:
    a, b, c = f
    return b * b - 4 * a * c


def normalize_form(f: Form) -> Form:
    a, b, c = f
    r = b % (2 * a)
    if r > a:
        r -= 2 * a
    return (a, r, (r * r - (b * b - 4 * a * c)) // (4 * a))


def reduce_form(f: Form) -> Form:
    """Reduced representative of a positive definite form."""
    a, b, c = normalize_form(f)
    while a > c or (a == c and b < 0):
        a, b, c = normalize_form((c, -b, a))
    if a == c and b < 0:
        b = -b
    if a == -b:
        b = a
    return (a, b, c)


def compose_forms(f1: Form, f2: Form) -> Form:
    """Dirichlet composition (Shanks' formulation), reduced."""
    return reduce_form(compose_forms_raw(f1, f2))


def compose_forms_raw(f1: Form, f2: Form) -> Form:
    """Dirichlet composition before reduction: a3 = a1 a2 / d^2, d = gcd(a1, a2, (b1 + b2)/2)."""
    if f1[0] > f2[0]:
        f1, f2 = f2, f1
    a1, b1, c1 = f1
    a2, b2, c2 = f2
    s = (b1 + b2) // 2
    n = b2 - s
    if a2 % a1 == 0:
        y1, d = 0, a1
    else:
        d, u, _ = xgcd(a2, a1)
        y1 = u
    if s % d == 0:
        y2, x2, d1 = -1, 0, d
    else:
        d1, x2, y2 = xgcd(s, d)
        y2 = -y2
    v1 = a1 // d1
    v2 = a2 // d1
    r = (y1 * y2 * n - x2 * c2) % v1
    b3 = b2 + 2 * v2 * r
    a3 = v1 * v2
    c3 = (c2 * d1 + r * (b2 + v2 * r)) // v1
    return (a3, b3, c3)


def inverse_form(f: Form) -> Form:
    a, b, c = f
    return reduce_form((a, -b, c))


def reduced_forms(disc: int) -> list[Form]:
    """All reduced primitive positive definite forms of discriminant disc."""
    if disc >= 0 or disc % 4 not in (0, 1):
        raise ValueError("discriminant must be negative and 0 or 1 mod 4")
    out = []
    amax = isqrt(-disc // 3)
    for a in range(1, amax + 1):
        b = np.arange(-a + 1, a + 1, dtype=np.int64)
        b = b[(b - disc) % 2 == 0]
        num = b * b - disc
        ok = num % (4 * a) == 0
        b = b[ok]
        c = num[ok] // (4 * a)
        keep = c >= a
        b, c = b[keep], c[keep]
        for bi, ci in zip(b.tolist(), c.tolist()):
            if (ci == a or bi == -a) and bi < 0:
                continue
            if gcd(gcd(a, abs(bi)), ci) != 1:
                continue
            out.append((a, bi, ci))
    return out


def principal_form(disc: int) -> Form:
    t = disc % 2
    return (1, t, (t - disc) // 4)


# ---------------------------------------------------------------- the field

@dataclass(frozen=True)
class ImagQuadField:
    """K = Q(sqrt(D)) with fundamental discriminant D < -4."""

    D: int

    def __post_init__(self):
        if self.D >= -4:
            raise UnsupportedField("discriminants D >= -4 are not supported")
        if not is_fundamental_discriminant(self.D):
            raise UnsupportedField(f"{self.D} is not a fundamental discriminant")

    @property
    def t(self) -> int:
        return self.D % 2

    @property
    def n(self) -> int:
        return (self.t - self.D) // 4

    # element arithmetic on (u, v) = u + v w, w^2 = t w - n
    def mul(self, x, y):
        a, b = x
        c, d = y
        bd = b * d
        return (a * c - self.n * bd, a * d + b * c + self.t * bd)

    def conj(self, x):
        u, v = x
        return (u + self.t * v, -v)

    def norm(self, x):
        u, v = x
        return u * u + self.t * u * v + self.n * v * v

    def trace(self, x):
        u, v = x
        return 2 * u + self.t * v

    def inv(self, x):
        nm = Fraction(self.norm(x))
        c = self.conj(x)
        return (Fraction(c[0]) / nm, Fraction(c[1]) / nm)

    def pow(self, x, k: int):
        out = (1, 0)
        base = x
        while k:
            if k & 1:
                out = self.mul(out, base)
            base = self.mul(base, base)
            k >>= 1
        return out

    @property
    def sqrt_d(self):
        return (-self.t, 2)

    def to_complex(self, x) -> complex:
        u, v = x
        w = (self.t + 1j * math.sqrt(-self.D)) / 2
        return complex(u) + complex(v) * w

    def eta(self, q: int) -> int:
        """Quadratic character of K/Q at positive integers."""
        return kronecker(self.D, q)

    def splitting(self, q: int) -> str:
        e = kronecker(self.D, q)
        return {1: "split", -1: "inert", 0: "ramified"}[e]

    @cached_property
    def class_number(self) -> int:
        return len(reduced_forms(self.D))

    def elements_up_to_norm(self, bound: int):
        """Elements u + v w with 0 < N <= bound, one from each pair {x, -x}.

        Ordered by norm, then lexicographically.
        """
        out = []
        # N = (u + t v/2)^2 + |D| v^2/4
        vmax = isqrt(4 * bound // -self.D) + 1
        for v in range(0, vmax + 1):
            rem = 4 * bound - (-self.D) * v * v
            if rem < 0:
                break
            r = isqrt(rem)
            # 2u + t v in [-r, r]
            lo = -((r + self.t * v) // 2) - 1
            hi = (r - self.t * v) // 2 + 1
            for u in range(lo, hi + 1):
                if v == 0 and u <= 0:
                    continue
                N = self.norm((u, v))
                if 0 < N <= bound:
                    out.append((N, u, v))
        out.sort()
        return [((u, v), N) for N, u, v in out]

    def elements_of_norm(self, N: int):
        return [x for x, n in self.elements_up_to_norm(N) if n == N]


# ---------------------------------------------------------------- ideals

@dataclass(frozen=True)
class IdealRep:
    """The lattice Z a + Z (-b + sqrt(m^2 D))/2, an ideal of the order of conductor m."""

    K: ImagQuadField
    a: int
    b: int
    m: int = 1

    def __post_init__(self):
        disc = self.m * self.m * self.K.D
        if (self.b * self.b - disc) % (4 * self.a):
            raise ValueError("b^2 must be congruent to the discriminant mod 4a")

    @property
    def norm(self) -> int:
        return self.a

    @property
    def form(self) -> Form:
        disc = self.m * self.m * self.K.D
        return (self.a, self.b, (self.b * self.b - disc) // (4 * self.a))

    def basis(self):
        """Z-basis as elements of K with rational coordinates."""
        t = self.K.t
        m = self.m
        return ((self.a, 0), (Fraction(-self.b - m * t, 2), m))

    def contains(self, x) -> bool:
        (a, _), (s, m) = self.basis()
        u, v = x
        if Fraction(v) % m:
            return False
        k = Fraction(v) / m
        rest = Fraction(u) - k * s
        return rest.denominator == 1 and rest.numerator % a == 0

    def is_ideal(self) -> bool:
        """Closure under multiplication by the order Z + m w."""
        g = (0, self.m)
        return all(self.contains(self.K.mul(x, g)) for x in self.basis())

    def __mul__(self, other: "IdealRep") -> "IdealRep":
        if other.m != self.m:
            raise ValueError("ideals of different orders")
        """Primitive part of the product lattice (the product itself when the forms are united)."""
        a, b, _ = compose_forms_raw(self.form, other.form)
        return IdealRep(self.K, a, b % (2 * a), self.m)

    @classmethod
    def from_form(cls, K: ImagQuadField, f: Form, m: int = 1) -> "IdealRep":
        return cls(K, f[0], f[1], m)


# ---------------------------------------------------------------- ring class groups

def ring_class_number_formula(K: ImagQuadField, m: int) -> int:
    h = K.class_number * m
    num, den = h, 1
    for q in factorint(m):
        num *= q - kronecker(K.D, q)
        den *= q
    return num // den


class RingClassGroup:
    """Pic of the order Z + m O_K, realized on reduced forms of discriminant m^2 D.

    The abelian structure is stored as a chain of generators g_1, ..., g_r with
    relative orders e_k: g_k^{e_k} lies in the subgroup generated by earlier
    generators.  Every element has a unique exponent vector 0 <= c_k < e_k.
    """

    def __init__(self, K: ImagQuadField, m: int):
        if m < 1:
            raise ValueError("conductor must be positive")
        self.K = K
        self.m = m
        self.disc = m * m * K.D
        self.forms: list[Form] = reduced_forms(self.disc)
        self.index = {f: i for i, f in enumerate(self.forms)}
        self.identity = self.index[principal_form(self.disc)]
        self._mul_cache: dict[tuple[int, int], int] = {}
        self._class_cache: dict[tuple[int, int], int] = {}
        self._build_structure()

    def __len__(self):
        return len(self.forms)

    @property
    def order(self) -> int:
        return len(self.forms)

    def __repr__(self):
        return f"RingClassGroup(D={self.K.D}, m={self.m}, order={self.order}, rel_orders={self.rel_orders})"

    # group law on indices
    def mul(self, i: int, j: int) -> int:
        key = (i, j) if i <= j else (j, i)
        r = self._mul_cache.get(key)
        if r is None:
            r = self.index[compose_forms(self.forms[i], self.forms[j])]
            self._mul_cache[key] = r
        return r

    def inv(self, i: int) -> int:
        return self.index[inverse_form(self.forms[i])]

    def pow(self, i: int, k: int) -> int:
        k %= self.exponent
        out = self.identity
        base = i
        while k:
            if k & 1:
                out = self.mul(out, base)
            base = self.mul(base, base)
            k >>= 1
        return out

    def element_order(self, i: int) -> int:
        k, x = 1, i
        while x != self.identity:
            x = self.mul(x, i)
            k += 1
        return k

    def _build_structure(self):
        h = self.order
        dlog = {self.identity: ()}
        gens: list[int] = []
        rel_orders: list[int] = []
        relations: list[tuple[int, ...]] = []
        for cand in range(h):
            if len(dlog) == h:
                break
            if cand in dlog:
                continue
            # relative order of cand modulo the current subgroup
            x, e = cand, 1
            while x not in dlog:
                x = self.mul(x, cand)
                e += 1
            relations.append(dlog[x])
            gens.append(cand)
            rel_orders.append(e)
            new = {}
            for y, vec in dlog.items():
                z = y
                for k in range(e):
                    new[z] = vec + (k,)
                    z = self.mul(z, cand)
            dlog = {y: v + (0,) * (len(gens) - len(v)) for y, v in new.items()}
        self.gens = tuple(gens)
        self.rel_orders = tuple(rel_orders)
        self.relations = tuple(r + (0,) * (len(gens) - len(r)) for r in relations)
        r = len(gens)
        self.dlog_table = np.zeros((h, r), dtype=np.int64)
        for y, vec in dlog.items():
            self.dlog_table[y, :] = vec
        self.exponent = lcm(*[self.element_order(g) for g in gens]) if gens else 1

    def dlog(self, i: int) -> tuple[int, ...]:
        return tuple(int(c) for c in self.dlog_table[i])

    def from_exponents(self, vec) -> int:
        out = self.identity
        for g, c in zip(self.gens, vec):
            out = self.mul(out, self.pow(g, int(c)))
        return out

    def elements(self) -> range:
        return range(self.order)

    # ideals and elements
    def ideal(self, i: int) -> IdealRep:
        return IdealRep.from_form(self.K, self.forms[i], self.m)

    def class_of_form(self, f: Form) -> int:
        return self.index[reduce_form(f)]

    def class_of_element(self, x) -> int:
        """Class of the proper ideal x O_K meet O_m for x in O_K prime to m."""
        u, v = int(x[0]), int(x[1])
        K, m = self.K, self.m
        if gcd(K.norm((u, v)), m) != 1:
            raise NotCoprime(f"element {x} is not prime to the conductor {m}")
        key = (u % m, v % m)
        r = self._class_cache.get(key)
        if r is not None:
            return r
        if m == 1:
            r = self.identity
        else:
            u0, v0 = key
            # any representative of the residue works; make it primitive
            while v0 and gcd(u0, v0) != 1:
                u0 += m
            a = K.norm((u0, v0))
            if v0 == 0 or a == 1:
                r = self.identity
            else:
                # w = r0 mod alpha with r0 = -u/v mod a
                r0 = (-u0 * pow(v0, -1, a)) % a
                k = (-m * r0) % a
                b = -2 * k - m * K.t
                c = (b * b - self.disc) // (4 * a)
                r = self.class_of_form((a, b, c))
        self._class_cache[key] = r
        return r

    @cached_property
    def representatives(self) -> tuple:
        """For each class a small element of O_K prime to m D in that class."""
        reps: list = [None] * self.order
        found = 0
        bound = 16
        modulus = self.m * abs(self.K.D)
        while found < self.order:
            for x, N in self.K.elements_up_to_norm(bound):
                if gcd(N, modulus) != 1:
                    continue
                i = self.class_of_element(x)
                if reps[i] is None:
                    reps[i] = x
                    found += 1
            bound *= 2
        return tuple(reps)

    def projection(self, other: "RingClassGroup") -> np.ndarray:
        """The natural surjection to the ring class group of a divisor conductor."""
        if self.m % other.m or other.K != self.K:
            raise ValueError("target conductor must divide the source conductor")
        return np.array([other.class_of_element(x) for x in self.representatives], dtype=np.int64)

    def kernel(self, other: "RingClassGroup") -> list[int]:
        pr = self.projection(other)
        return [i for i in range(self.order) if pr[i] == other.identity]

    def conjugate(self, i: int) -> int:
        """Class of the complex conjugate ideal (the inverse class)."""
        return self.inv(i)

    def class_of_sqrt_d(self) -> int:
        return self.class_of_element(self.K.sqrt_d)

    def export_table(self) -> str:
        lines = [f"ringclassgroup D={self.K.D} m={self.m} order={self.order}"]
        lines.append("rel_orders " + " ".join(map(str, self.rel_orders)))
        for g, rel in zip(self.gens, self.relations):
            a, b, c = self.forms[g]
            lines.append(f"gen {a} {b} {c} rel " + " ".join(map(str, rel)))
        return "\n".join(lines) + "\n"


@lru_cache(maxsize=256)
def ring_class_group(K: ImagQuadField, m: int) -> RingClassGroup:
    """Shared RingClassGroup instance for (K, m)."""
    return RingClassGroup(K, m)


# ---------------------------------------------------------------- characters

class RingClassCharacter:
    """A character of a ring class group with values zeta_N^table[i]."""

    def __init__(self, group: RingClassGroup, table, N: int, label=None):
        self.group = group
        t = np.asarray(table, dtype=np.int64) % N
        # shrink the value modulus to the character order
        g = N
        for v in np.unique(t).tolist():
            g = gcd(g, v)
        if g > 1 and g != N:
            t = t // g
            N //= g
        elif g == N:
            t = t * 0
            N = 1
        self.table = t
        self.N = N
        self.label = label

    @classmethod
    def from_generator_exponents(cls, group: RingClassGroup, xs, N: int, label=None):
        table = group.dlog_table @ np.asarray(xs, dtype=np.int64) if group.gens else np.zeros(group.order, dtype=np.int64)
        return cls(group, table % N, N, label)

    @classmethod
    def trivial(cls, group: RingClassGroup):
        return cls(group, np.zeros(group.order, dtype=np.int64), 1, label=())

    @property
    def order(self) -> int:
        return self.N

    def exp(self, i: int) -> int:
        return int(self.table[i])

    def value(self, i: int) -> CyclotomicElement:
        return CyclotomicElement.zeta(max(self.N, 1), self.exp(i))

    def complex_value(self, i: int) -> complex:
        return cmath.exp(2j * cmath.pi * self.exp(i) / self.N)

    def is_trivial(self) -> bool:
        return self.N == 1

    def __mul__(self, other: "RingClassCharacter") -> "RingClassCharacter":
        if other.group is not self.group and (other.group.K, other.group.m) != (self.group.K, self.group.m):
            raise ValueError("characters of different groups")
        N = lcm(self.N, other.N)
        return RingClassCharacter(self.group, self.table * (N // self.N) + other.table * (N // other.N), N)

    def inverse(self) -> "RingClassCharacter":
        return RingClassCharacter(self.group, -self.table, self.N)

    def conj(self) -> "RingClassCharacter":
        return self.inverse()

    def pullback(self, group: RingClassGroup) -> "RingClassCharacter":
        """Compose with the projection from a group of multiple conductor."""
        pr = group.projection(self.group)
        return RingClassCharacter(group, self.table[pr], self.N, self.label)

    def galois(self, a: int) -> "RingClassCharacter":
        return RingClassCharacter(self.group, self.table * a, self.N, self.label)

    def of_element(self, x) -> int:
        return self.exp(self.group.class_of_element(x))

    def factors_through(self, smaller: RingClassGroup) -> bool:
        ker = self.group.kernel(smaller)
        return all(self.table[i] == 0 for i in ker)

    def conductor(self) -> int:
        m = self.group.m
        best = m
        for d in divisors(m):
            if d < best and self.factors_through(ring_class_group(self.group.K, d)):
                best = d
        return best

    def key(self):
        return (self.group.K.D, self.group.m, self.N, tuple(self.table.tolist()))

    def __eq__(self, other):
        return isinstance(other, RingClassCharacter) and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def __repr__(self):
        return f"RingClassCharacter(m={self.group.m}, order={self.N}, label={self.label})"


def all_characters(G: RingClassGroup) -> list[RingClassCharacter]:
    """Every character, in lexicographic order of generator exponents mod the group exponent."""
    N = G.exponent
    r = len(G.gens)
    sols = [()]
    for k in range(r):
        e = G.rel_orders[k]
        rel = G.relations[k]
        step = N // e
        new = []
        for xs in sols:
            rhs = sum(c * x for c, x in zip(rel, xs)) % N
            # e * x = rhs mod N, solutions x0 + j N/e
            base = None
            for cand in range(step):
                if (e * cand - rhs) % N == 0:
                    base = cand
                    break
            if base is None:
                raise ArithmeticError("inconsistent relation")
            for j in range(e):
                new.append(xs + (base + j * step,))
        sols = new
    sols.sort()
    return [RingClassCharacter.from_generator_exponents(G, xs, N, label=xs) for xs in sols]


def characters_of_exact_conductor(K: ImagQuadField, c: int, p: int, n: int,
                                  *, p_power_only: bool = False) -> list[RingClassCharacter]:
    """Characters of G_{c p^n} that do not factor through G_{c p^(n-1)}.

    For n = 0 all characters of G_c are returned.  With p_power_only the list
    is restricted to characters of p-power order.
    """
    if p % 2 == 0 or (c * K.D) % p == 0:
        raise ValueError("p must be odd and prime to c D")
    G = ring_class_group(K, c * p**n)
    chars = all_characters(G)
    if n > 0:
        H = ring_class_group(K, c * p ** (n - 1))
        ker = G.kernel(H)
        chars = [ch for ch in chars if any(ch.table[i] for i in ker)]
    if p_power_only:
        chars = [ch for ch in chars if _is_power_of(ch.N, p)]
    return chars


def _is_power_of(N: int, p: int) -> bool:
    while N % p == 0:
        N //= p
    return N == 1


def anticyclotomic_family(K: ImagQuadField, p: int, n: int) -> list[RingClassCharacter]:
    """Finite-order characters of the anticyclotomic Z_p-tower with exact conductor p^n."""
    return characters_of_exact_conductor(K, 1, p, n, p_power_only=True)


def character_sum_check(G: RingClassGroup) -> bool:
    """Orthogonality: sums over the group vanish except for the trivial character."""
    for ch in all_characters(G):
        counts = np.bincount(ch.table, minlength=ch.N)
        s = CyclotomicElement.from_exponent_counts(max(ch.N, 1), counts)
        expect = G.order if ch.is_trivial() else 0
        if s != expect:
            return False
    return True


# ---------------------------------------------------------------- Hecke characters

class HeckeCharacter:
    """lambda * chi: the canonical self-dual character of Q(sqrt(-p)) twisted by a ring class character.

    On principal ideals prime to the conductor,
        lambda((x)) = ((2u + v | p)) (2 | p) x   for x = u + v w,
    the character of conductor (sqrt(D)) and infinity type 1 whose
    restriction to Q is eta_K times the norm.  The twist chi is a character of a
    ring class group, evaluated on the class of x.
    """

    def __init__(self, K: ImagQuadField, twist: RingClassCharacter | None = None,
                 *, overrides: dict | None = None):
        p = -K.D
        if K.D not in SUPPORTED_DISCRIMINANTS and not (isprime(p) and p % 4 == 3 and K.class_number == 1):
            raise UnsupportedField("canonical character requires D = -p, p = 3 mod 4 prime, class number 1")
        self.K = K
        self.p = p
        self.twist = twist
        self.overrides = dict(overrides or {})

    @property
    def twist_conductor(self) -> int:
        return 1 if self.twist is None or self.twist.is_trivial() else self.twist.conductor()

    @property
    def cond_norm(self) -> int:
        """Norm of the conductor ideal: p N(m O_K) = p m^2."""
        m = self.twist_conductor
        return self.p * m * m

    @property
    def level(self) -> int:
        return self.p * self.cond_norm

    @property
    def order(self) -> int:
        """Order of the finite-order part's value group (lcm of twist order and 2)."""
        return lcm(2, self.twist.N if self.twist is not None else 1)

    def sign(self, x) -> int:
        """Quadratic residue symbol of x mod sqrt(D); w = 1/2 there."""
        u, v = int(x[0]), int(x[1])
        return legendre(2 * u + v, self.p) * legendre(2, self.p)

    def root_exp(self, x) -> tuple[int, int]:
        """(e, N) with the finite part of lambda((x)) equal to zeta_N^e."""
        N = self.order
        s = self.sign(x)
        if s == 0:
            raise NotCoprime("element is divisible by sqrt(D)")
        e = 0 if s == 1 else N // 2
        if self.twist is not None:
            me = self.twist.of_element(x)
            e += me * (N // self.twist.N)
        return e % N, N

    def value(self, x) -> tuple[CyclotomicElement, tuple]:
        """lambda((x)) as (root of unity, element x of K)."""
        key = (int(x[0]), int(x[1]))
        if key in self.overrides:
            return self.overrides[key]
        e, N = self.root_exp(x)
        return CyclotomicElement.zeta(N, e), (x[0], x[1])

    def complex_value(self, x) -> complex:
        e, N = self.root_exp(x)
        return cmath.exp(2j * cmath.pi * e / N) * self.K.to_complex(x)

    def generator(self, I: IdealRep):
        """A generator of the O_K-ideal I (class number one)."""
        if I.m != 1:
            raise ValueError("ideal of O_K expected")
        for x in self.K.elements_of_norm(I.a):
            if I.contains(x):
                return x
        raise ValueError("ideal is not principal")

    def hecke_value(self, I: IdealRep):
        if gcd(I.a, self.cond_norm) != 1:
            raise NotCoprime("ideal meets the conductor")
        if I.a == 1:
            return CyclotomicElement.one(1), (1, 0)
        return self.value(self.generator(I))

    def rational_value(self, q: int):
        """lambda((q)) for a positive integer q as (root of unity, element)."""
        return self.value((q, 0))

    def self_dual_check(self, bound: int = 200) -> "SelfDualReport":
        for q in range(1, bound + 1):
            if gcd(q, self.cond_norm) != 1:
                continue
            zeta, x = self.rational_value(q)
            if tuple(x) != (q, 0) or zeta != self.K.eta(q):
                return SelfDualReport(False, q, bound)
        return SelfDualReport(True, None, bound)

    def local_unit_values(self, q: int) -> list[CyclotomicElement]:
        """Values of the finite part on units at the prime q dividing the conductor.

        Units x at q are realized globally by elements congruent to x mod q^k
        and to 1 modulo the rest of the conductor.
        """
        m = self.twist_conductor
        if q == self.p:
            mod_q, rest = self.p, m
            points = [(u, 0) for u in range(1, self.p)]
        else:
            k = 0
            mm = m
            while mm % q == 0:
                mm //= q
                k += 1
            if k == 0:
                return []
            mod_q, rest = q**k, mm * self.p
            points = [(u, v) for u in range(mod_q) for v in range(mod_q)
                      if self.K.norm((u, v)) % q]
        vals = set()
        out = []
        for (u, v) in points:
            # CRT: x = (u, v) mod mod_q, x = 1 mod rest
            uu = _crt(u, mod_q, 1, rest)
            vv = _crt(v, mod_q, 0, rest)
            e, N = self.root_exp((uu, vv))
            if (e, N) not in vals:
                vals.add((e, N))
                out.append(CyclotomicElement.zeta(N, e))
        return out

    def mu_invariant(self, q: int, emb) -> Fraction | float:
        """min v_ell(zeta - 1) over nontrivial local unit values at q; INFINITE if trivial."""
        from .elladic import INFINITE, ell_valuation
        if self.K.splitting(q) == "split":
            raise ValueError("mu is defined at non-split primes")
        best = INFINITE
        for z in self.local_unit_values(q):
            if z == 1:
                continue
            v = ell_valuation(z - 1, emb)
            best = v if best == INFINITE else min(best, v)
        return best

    def a_q(self, q: int):
        """lambda(Q) + lambda(Q-bar) for split q, 0 for inert q (as a complex number)."""
        s = self.K.splitting(q)
        if s == "inert":
            return 0
        if s == "ramified":
            raise NotCoprime("ramified prime")
        x = self.K.elements_of_norm(q)[0]
        return self.complex_value(x) + self.complex_value(self.K.conj(x))

    def a_q_exact(self, q: int):
        """a_q in Q(zeta_M) with M = lcm(order, |D|) (sqrt(D) expressed via Gauss sums)."""
        s = self.K.splitting(q)
        if s == "inert":
            return CyclotomicElement.zero(1)
        x = self.K.elements_of_norm(q)[0]
        tot = CyclotomicElement.zero(1)
        for y in (x, self.K.conj(x)):
            z, el = self.value(y)
            tot = tot + z * quad_to_cyclotomic(self.K, el)
        return tot


@dataclass(frozen=True)
class SelfDualReport:
    ok: bool
    witness: int | None
    bound: int


def _crt(r1, m1, r2, m2):
    if m2 == 1:
        return r1 % m1
    g, x, _ = xgcd(m1, m2)
    return (r1 + (r2 - r1) * x * m1) % (m1 * m2)


def sqrt_d_cyclotomic(D: int) -> CyclotomicElement:
    """sqrt(D) with positive imaginary part inside Q(zeta_|D|), via the quadratic Gauss sum."""
    p = -D
    if not isprime(p) or p % 4 != 3:
        raise UnsupportedField("prime discriminant -p with p = 3 mod 4 expected")
    counts = [0] * p
    for x in range(1, p):
        counts[x] = legendre(x, p)
    return CyclotomicElement(p, counts)


def quad_to_cyclotomic(K: ImagQuadField, x) -> CyclotomicElement:
    """Image of u + v w in Q(zeta_|D|)."""
    s = sqrt_d_cyclotomic(K.D)
    u, v = Fraction(x[0]), Fraction(x[1])
    w = (s + K.t) * Fraction(1, 2)
    return w * v + u
