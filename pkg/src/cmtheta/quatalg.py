"""Definite quaternion algebras B = K + KJ over Q, special orders and their Shimura sets.

Elements are 4-vectors of rationals on the frame (1, w, J, wJ), where w is the
standard generator of O_K and J^2 = beta, J t = conj(t) J.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from itertools import product
from math import gcd

import numpy as np

from .lattice import count_values, rational_hnf, short_vectors, solve_upper
from .numtheory import factorint, isprime, kronecker, legendre, primerange, vp
from .quadfield import HeckeCharacter, ImagQuadField

log = logging.getLogger(__name__)


class SearchExhausted(RuntimeError):
    pass


class LocalShapeUnrealizable(ValueError):
    pass


class MassMismatch(RuntimeError):
    pass


class IllDefinedSign(RuntimeError):
    pass


class ClassNotFound(LookupError):
    pass


# ---------------------------------------------------------------- Hilbert symbols

def _split_square(x: int, p: int) -> tuple[int, int]:
    """x = p^a u with p not dividing u."""
    a = vp(x, p)
    return a, x // p**a


def hilbert_symbol(a, b, p) -> int:
    """(a, b)_p for nonzero rationals; p a prime or the string 'inf'."""
    a, b = Fraction(a), Fraction(b)
    if a == 0 or b == 0:
        raise ValueError("arguments must be nonzero")
    if p in ("inf", float("inf"), 0):
        return -1 if a < 0 and b < 0 else 1
    # clear denominators by squares
    a = a.numerator * a.denominator
    b = b.numerator * b.denominator
    al, u = _split_square(a, p)
    be, v = _split_square(b, p)
    if p == 2:
        eps = lambda x: ((x - 1) // 2) % 2
        omg = lambda x: ((x * x - 1) // 8) % 2
        e = (eps(u) * eps(v) + al * omg(v) + be * omg(u)) % 2
        return -1 if e else 1
    s = (-1) ** ((al * be * ((p - 1) // 2)) % 2)
    s *= legendre(u, p) ** be * legendre(v, p) ** al
    return s


def _bad_primes(*xs) -> list[int]:
    out = {2}
    for x in xs:
        x = Fraction(x)
        for n in (x.numerator, x.denominator):
            out.update(factorint(abs(n)).keys())
    return sorted(q for q in out if q > 1)


# ---------------------------------------------------------------- the algebra

class QuaternionAlgebra:
    """B = K + K J with J^2 = beta < 0."""

    def __init__(self, K: ImagQuadField, beta: int):
        if beta >= 0:
            raise ValueError("beta must be negative for a definite algebra")
        self.K = K
        self.beta = int(beta)
        t, n = K.t, K.n
        blk = [[2, t], [t, 2 * n]]
        b = -self.beta
        self.gram0 = [
            [blk[0][0], blk[0][1], 0, 0],
            [blk[1][0], blk[1][1], 0, 0],
            [0, 0, b * blk[0][0], b * blk[0][1]],
            [0, 0, b * blk[1][0], b * blk[1][1]],
        ]

    def __repr__(self):
        return f"QuaternionAlgebra(D={self.K.D}, beta={self.beta})"

    def mul(self, x, y):
        K = self.K
        a, b = (x[0], x[1]), (x[2], x[3])
        c, d = (y[0], y[1]), (y[2], y[3])
        bd = K.mul(b, K.conj(d))
        ac = K.mul(a, c)
        r0 = (ac[0] + self.beta * bd[0], ac[1] + self.beta * bd[1])
        ad = K.mul(a, d)
        bc = K.mul(b, K.conj(c))
        return (r0[0], r0[1], ad[0] + bc[0], ad[1] + bc[1])

    def conj(self, x):
        a = self.K.conj((x[0], x[1]))
        return (a[0], a[1], -x[2], -x[3])

    def nrd(self, x):
        return self.K.norm((x[0], x[1])) - self.beta * self.K.norm((x[2], x[3]))

    def trd(self, x):
        return self.K.trace((x[0], x[1]))

    def inv(self, x):
        n = Fraction(self.nrd(x))
        return tuple(Fraction(c) / n for c in self.conj(x))

    def from_k(self, a):
        return (a[0], a[1], 0, 0)

    @property
    def J(self):
        return (0, 0, 1, 0)

    @property
    def sqrt_d(self):
        return self.from_k(self.K.sqrt_d)

    def ramified_places(self) -> list:
        D = self.K.D
        out = [q for q in _bad_primes(D, self.beta) if hilbert_symbol(D, self.beta, q) == -1]
        if hilbert_symbol(D, self.beta, "inf") == -1:
            out.append("inf")
        return out

    @property
    def discriminant(self) -> int:
        d = 1
        for q in self.ramified_places():
            if q != "inf":
                d *= q
        return d


def algebra_for(K: ImagQuadField, *, square_at=(), bound: int = 10_000) -> QuaternionAlgebra:
    """Definite B = (D, beta) ramified exactly where eta_{K_v}(-1) = -1, smallest |beta|.

    Optional square_at lists primes v (outside the ramification set) at which
    beta is required to be a square unit.
    """
    D = K.D
    target = {q for q in _bad_primes(D) if hilbert_symbol(D, -1, q) == -1}
    target.add("inf")
    for b in range(1, bound + 1):
        beta = -b
        ok = True
        for v in square_at:
            if v in target:
                continue
            if beta % v == 0 or (v != 2 and legendre(beta, v) != 1) or (v == 2 and beta % 8 != 1):
                ok = False
                break
        if not ok:
            continue
        B = QuaternionAlgebra(K, beta)
        if set(B.ramified_places()) == target:
            return B
    raise SearchExhausted(f"no admissible beta up to {bound}")


# ---------------------------------------------------------------- lattices in B

def _content(xs) -> Fraction:
    """gcd of a list of rationals."""
    num, den = 0, 1
    for x in xs:
        x = Fraction(x)
        if x:
            num = gcd(num * x.denominator, x.numerator * den)
            den = den * x.denominator
            g = gcd(num, den)
            num, den = num // g, den // g
    return Fraction(num, den)


class QLattice:
    """A full Z-lattice in B given by an integer HNF basis divided by den."""

    __slots__ = ("B", "rows", "den", "_gram", "_nrd", "__dict__")

    def __init__(self, B: QuaternionAlgebra, gens):
        H, den = rational_hnf(gens)
        if len(H) != 4:
            raise ValueError("generators do not span a full lattice")
        self.B = B
        self.rows = tuple(tuple(r) for r in H)
        self.den = den
        self._gram = None
        self._nrd = None

    @classmethod
    def _raw(cls, B, rows, den):
        obj = cls.__new__(cls)
        obj.B = B
        obj.rows = rows
        obj.den = den
        obj._gram = None
        obj._nrd = None
        return obj

    def key(self):
        return (self.rows, self.den)

    def __eq__(self, other):
        return isinstance(other, QLattice) and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def basis(self):
        d = self.den
        return [tuple(Fraction(x, d) for x in r) for r in self.rows]

    def coords(self, x):
        """Integer coordinates of x on the basis, or None if x is not in the lattice."""
        v = [Fraction(c) * self.den for c in x]
        return solve_upper([list(r) for r in self.rows], v)

    def contains(self, x) -> bool:
        return self.coords(x) is not None

    def contains_lattice(self, other: "QLattice") -> bool:
        return all(self.contains(b) for b in other.basis())

    def gram(self):
        """Gram matrix of the trace form trd(x conj y) = 2 nrd polarization."""
        if self._gram is None:
            G0 = self.B.gram0
            R = self.rows
            d2 = self.den * self.den
            self._gram = [[Fraction(sum(R[i][a] * G0[a][b] * R[j][b] for a in range(4) for b in range(4)), d2)
                           for j in range(4)] for i in range(4)]
        return self._gram

    def nrd(self) -> Fraction:
        """gcd of reduced norms of lattice elements."""
        if self._nrd is None:
            G = self.gram()
            vals = [G[i][i] / 2 for i in range(4)] + [G[i][j] for i in range(4) for j in range(i + 1, 4)]
            self._nrd = _content(vals)
        return self._nrd

    def normalized_gram(self):
        """Integer Gram of 2 nrd(x)/nrd(L)."""
        n = self.nrd()
        return [[int(x / n) for x in r] for r in self.gram()]

    def det_gram(self) -> Fraction:
        from sympy import Matrix
        return Fraction(str(Matrix(self.gram()).det()))

    def __mul__(self, other: "QLattice") -> "QLattice":
        B = self.B
        gens = []
        for a in self.rows:
            for b in other.rows:
                gens.append(B.mul(a, b))
        d = self.den * other.den
        return QLattice(B, [[Fraction(c, d) for c in g] for g in gens])

    def left_scale(self, x) -> "QLattice":
        return QLattice(self.B, [self.B.mul(x, b) for b in self.basis()])

    def right_scale(self, x) -> "QLattice":
        return QLattice(self.B, [self.B.mul(b, x) for b in self.basis()])

    def scale(self, c) -> "QLattice":
        c = Fraction(c)
        return QLattice(self.B, [[x * c for x in b] for b in self.basis()])

    def conj(self) -> "QLattice":
        return QLattice(self.B, [self.B.conj(b) for b in self.basis()])

    def __add__(self, other: "QLattice") -> "QLattice":
        return QLattice(self.B, self.basis() + other.basis())

    def short_elements(self, bound) -> list:
        """Elements x with nrd(x) <= bound as (element, nrd)."""
        G = self.gram()
        out = []
        for c, val in short_vectors(G, 2 * Fraction(bound)):
            x = tuple(sum(Fraction(c[i]) * Fraction(self.rows[i][j], self.den) for i in range(4)) for j in range(4))
            out.append((x, val / 2))
        return out

    def theta_counts(self, bound: int) -> tuple[int, ...]:
        """Counts of elements with nrd(x)/nrd(L) = 1..bound."""
        return count_values(self.normalized_gram(), bound)

    def __repr__(self):
        return f"QLattice(rows={self.rows}, den={self.den})"


# ---------------------------------------------------------------- orders

class QuatOrder(QLattice):
    """An order: a lattice containing 1 and closed under multiplication."""

    def __init__(self, B, gens, *, check: bool = True):
        super().__init__(B, gens)
        if check:
            if not self.contains((1, 0, 0, 0)):
                raise ValueError("lattice does not contain 1")
            if not self.is_closed():
                raise ValueError("lattice is not closed under multiplication")

    @classmethod
    def from_lattice(cls, L: QLattice, check: bool = True) -> "QuatOrder":
        return cls(L.B, L.basis(), check=check)

    def is_closed(self) -> bool:
        bs = self.basis()
        return all(self.contains(self.B.mul(a, b)) for a in bs for b in bs)

    @cached_property
    def reduced_discriminant(self) -> int:
        d2 = abs(self.det_gram())
        from math import isqrt
        r = isqrt(int(d2))
        if r * r != d2:
            raise ArithmeticError("discriminant is not a square")
        return r

    @cached_property
    def unit_count(self) -> int:
        """Number of units (elements of reduced norm 1)."""
        return sum(1 for _, v in self.short_elements(1) if v == 1)

    def units(self):
        return [x for x, v in self.short_elements(1) if v == 1]

    def k_part(self) -> QLattice | None:
        return _intersect_with_subspace(self, (0, 1))

    def j_part(self) -> QLattice | None:
        return _intersect_with_subspace(self, (2, 3))

    def k_conductor(self) -> int:
        """Conductor f with (order meet K) = Z + f O_K."""
        return _k_conductor(self)


def _intersect_with_subspace(L: QLattice, idx):
    """Sublattice of L lying in the coordinate plane spanned by idx, as 2-dim integer HNF over den."""
    rows = [list(r) for r in L.rows]
    other = [i for i in range(4) if i not in idx]
    # kernel of the projection onto 'other' coordinates, via HNF of the augmented system
    from .lattice import hnf
    aug = [[r[o] for o in other] + [int(i == k) for k in range(4)] for i, r in enumerate(rows)]
    H = hnf(aug)
    kern = [h[len(other):] for h in H if all(h[j] == 0 for j in range(len(other)))]
    vecs = []
    for c in kern:
        v = [sum(c[i] * rows[i][j] for i in range(4)) for j in range(4)]
        vecs.append(tuple(Fraction(v[j], L.den) for j in range(4)))
    return vecs


def _k_conductor(L: QLattice) -> int:
    vecs = _intersect_with_subspace(L, (0, 1))
    # lattice Z + f w: f = gcd of w-coordinates when 1 is in L
    g = Fraction(0)
    for v in vecs:
        g = _content([g, v[1]]) if g else abs(v[1])
    if g.denominator != 1:
        raise ArithmeticError("order meets K in a non-integral lattice")
    return int(g)


def maximal_order(B: QuaternionAlgebra) -> QuatOrder:
    """O_K + O_K J; maximal when beta = -1 and the algebra is ramified at |D| only."""
    return QuatOrder(B, [(1, 0, 0, 0), (0, 1, 0, 0), (0, 0, 1, 0), (0, 0, 0, 1)])


def order_with_j_ideal(B: QuaternionAlgebra, gen) -> QuatOrder:
    """O_K + gen O_K J for gen in O_K."""
    K = B.K
    a = gen
    aw = K.mul(gen, (0, 1))
    return QuatOrder(B, [(1, 0, 0, 0), (0, 1, 0, 0), (0, 0, a[0], a[1]), (0, 0, aw[0], aw[1])])


@dataclass(frozen=True)
class LocalShape:
    prime: int
    kind: str  # 'ramified', 'eichler', 'inert', 'maximal'
    exponent: int  # valuation of the reduced discriminant


def special_order(B: QuaternionAlgebra, lam: HeckeCharacter) -> QuatOrder:
    """O_K + f sqrt(D) O_K J, where f is the conductor of the ring class twist.

    Reduced discriminant |D| N(cond lambda) = D^2 f^2: the shape at p = |D| is
    O_K + sqrt(D) O_B, Eichler of level q^(2k) at split q^k || f and
    O_K + q^k O_B at inert q^k || f.
    """
    f = lam.twist_conductor
    p = lam.p
    if f % p == 0:
        raise LocalShapeUnrealizable(p)
    if f % 2 == 0 and B.beta % 2 == 0:
        raise LocalShapeUnrealizable(2)
    gen = B.K.mul((f, 0), B.K.sqrt_d)
    R = order_with_j_ideal(B, gen)
    if R.reduced_discriminant != lam.level:
        raise LocalShapeUnrealizable(f"discriminant {R.reduced_discriminant} != {lam.level}")
    return R


def order_of_level(B: QuaternionAlgebra, f: int = 1, *, at_p: bool = True) -> QuatOrder:
    """O_K + f sqrt(D)^e O_K J (e = 1 if at_p) without reference to a character."""
    gen = (f, 0)
    if at_p:
        gen = B.K.mul(gen, B.K.sqrt_d)
    return order_with_j_ideal(B, gen)


def local_shapes(R: QuatOrder) -> list[LocalShape]:
    """Verify R = O_K + (a O_K) J with a in O_K and classify each prime of the discriminant."""
    B = R.B
    K = B.K
    kp = _intersect_with_subspace(R, (0, 1))
    jp = _intersect_with_subspace(R, (2, 3))
    if _k_conductor(R) != 1:
        raise LocalShapeUnrealizable("order does not contain O_K")
    direct = QLattice(B, kp + jp)
    if direct != R:
        raise LocalShapeUnrealizable("order is not O_K + (R meet KJ)")
    out = []
    d = R.reduced_discriminant
    for q, e in sorted(factorint(d).items()):
        if q in B.ramified_places():
            kind = "ramified"
        else:
            kind = {"split": "eichler", "inert": "inert", "ramified": "ramified"}[K.splitting(q)]
        out.append(LocalShape(q, kind, e))
    return out


def eichler_mass(B: QuaternionAlgebra, shapes: list[LocalShape]) -> Fraction:
    """Mass (1/12) prod_{q | disc B} (q - 1) times local unit indices.

    Index formulas: O_K + pi^k O_B at a prime ramified in B and K (reduced
    discriminant exponent 1 + k): (p + 1) p^(k - 1); Eichler of level q^e:
    q^e (1 + 1/q); O_K + q^k O_B at q inert in K (exponent 2k): q^(2k-1) (q - 1).
    """
    m = Fraction(1, 12)
    ram = [q for q in B.ramified_places() if q != "inf"]
    for q in ram:
        m *= q - 1
    for s in shapes:
        q, e = s.prime, s.exponent
        if s.kind == "ramified" and q in ram:
            k = e - 1
            if k > 0:
                m *= (q + 1) * q ** (k - 1)
        elif s.kind == "eichler":
            m *= Fraction(q**e * (q + 1), q)
        elif s.kind == "inert":
            k = e // 2
            m *= q ** (2 * k - 1) * (q - 1)
        else:
            raise LocalShapeUnrealizable(f"no mass factor for {s}")
    return m


# ---------------------------------------------------------------- right ideals

class RightIdeal(QLattice):
    """A right ideal of a fixed order R (carried in self.order)."""

    def __init__(self, R: QuatOrder, gens):
        super().__init__(R.B, gens)
        self.order = R

    @classmethod
    def from_lattice(cls, R: QuatOrder, L: QLattice) -> "RightIdeal":
        obj = cls.__new__(cls)
        obj.B = L.B
        obj.rows = L.rows
        obj.den = L.den
        obj._gram = None
        obj._nrd = None
        obj.order = R
        return obj

    @cached_property
    def left_order(self) -> QuatOrder:
        L = self * self.conj()
        return QuatOrder.from_lattice(L.scale(1 / self.nrd()), check=False)

    @cached_property
    def weight(self) -> int:
        n = self.left_order.unit_count
        if n % 2:
            raise ArithmeticError("odd unit count")
        return n // 2

    def is_right_ideal(self) -> bool:
        return all(self.contains(self.B.mul(a, r)) for a in self.basis() for r in self.order.basis())

    def left_mul(self, x) -> "RightIdeal":
        return RightIdeal.from_lattice(self.order, self.left_scale(x))

    def right_mul_normalizer(self, x) -> "RightIdeal":
        """I x for x normalizing the right order."""
        return RightIdeal.from_lattice(self.order, self.right_scale(x))

    @cached_property
    def theta_hash(self) -> tuple[int, ...]:
        return self.theta_counts(THETA_HASH_BOUND)

    def sign(self, D: int, samples: int = 6) -> int:
        """eta_K of nrd(x)/nrd(I) for x in I with that ratio prime to D; checked on several x."""
        n = self.nrd()
        found = []
        bound = 4
        while len(found) < samples and bound < 4096:
            found = []
            for x, v in self.short_elements(bound * n):
                s = v / n
                if s.denominator != 1:
                    raise ArithmeticError("non-integral normalized norm")
                s = int(s)
                if s and s % D:
                    found.append(kronecker(D, s))
            bound *= 2
        if not found:
            raise IllDefinedSign("no element with norm prime to D found")
        if len(set(found)) != 1:
            raise IllDefinedSign(f"inconsistent norm classes {set(found)}")
        return found[0]


THETA_HASH_BOUND = 6


def unit_ideal(R: QuatOrder) -> RightIdeal:
    return RightIdeal.from_lattice(R, R)


def isotropic_vector(I: RightIdeal, q: int):
    """Coefficient vector c (mod q, nonzero) with Q_I(sum c_i b_i) = 0 mod q."""
    G = I.normalized_gram()
    for c in product(range(q), repeat=4):
        if not any(c):
            continue
        val = sum(c[i] * G[i][j] * c[j] for i in range(4) for j in range(4)) // 2
        if val % q == 0:
            return c
    raise ArithmeticError("no isotropic vector (q divides the level?)")


def neighbors(I: RightIdeal, q: int) -> list[RightIdeal]:
    """The q + 1 right ideals J with q I in J in I and nrd(J) = q nrd(I), for q prime to the level."""
    B = I.B
    R = I.order
    c0 = isotropic_vector(I, q)
    Ib = I.basis()
    x0 = tuple(sum(c0[i] * Ib[i][j] for i in range(4)) for j in range(4))
    # span of O_l(I) x0 modulo q I
    vecs = []
    for o in I.left_order.basis():
        y = B.mul(o, x0)
        c = I.coords(y)
        if c is None:
            raise ArithmeticError("left order does not preserve the ideal")
        vecs.append([v % q for v in c])
    basis = _fq_row_basis(vecs, q)
    if len(basis) != 2:
        raise ArithmeticError(f"expected a plane, got rank {len(basis)}")
    z1, z2 = basis
    lines = [[(a + t * b) % q for a, b in zip(z1, z2)] for t in range(q)] + [z2]
    out = []
    qI = [[q * x for x in b] for b in Ib]
    Rb = R.basis()
    for z in lines:
        zel = tuple(sum(z[i] * Ib[i][j] for i in range(4)) for j in range(4))
        gens = [B.mul(zel, r) for r in Rb] + qI
        out.append(RightIdeal(R, gens))
    return out


def _fq_row_basis(vecs, q):
    """Row-reduced basis of the F_q span."""
    rows = [list(v) for v in vecs]
    basis = []
    col = 0
    ncols = len(rows[0])
    r = 0
    for col in range(ncols):
        piv = next((i for i in range(r, len(rows)) if rows[i][col] % q), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        inv = pow(rows[r][col], -1, q)
        rows[r] = [(x * inv) % q for x in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][col] % q:
                f = rows[i][col]
                rows[i] = [(a - f * b) % q for a, b in zip(rows[i], rows[r])]
        r += 1
    return rows[:r]


def equivalence_element(I: RightIdeal, J: RightIdeal):
    """alpha in B with I = alpha J, or None."""
    L = I * J.conj()
    target = I.nrd() * J.nrd()
    for x, v in L.short_elements(target):
        if v == target:
            return tuple(c / J.nrd() for c in x)
    return None


def is_equivalent(I: RightIdeal, J: RightIdeal) -> bool:
    if I.theta_hash != J.theta_hash:
        return False
    return equivalence_element(I, J) is not None


# ---------------------------------------------------------------- Shimura sets

@dataclass
class ShimuraSet:
    order: QuatOrder
    ideals: list[RightIdeal]
    weights: list[int]
    signs: list[int]
    mass: Fraction
    principal: int = 0
    _by_hash: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        self._by_hash = {}
        for i, I in enumerate(self.ideals):
            self._by_hash.setdefault(I.theta_hash, []).append(i)

    def __len__(self):
        return len(self.ideals)

    @property
    def D(self) -> int:
        return self.order.B.K.D

    def identify(self, J: RightIdeal, *, with_element: bool = False):
        """Index j with J equivalent to I_j (and alpha with J = alpha I_j)."""
        for j in self._by_hash.get(J.theta_hash, []):
            a = equivalence_element(J, self.ideals[j])
            if a is not None:
                return (j, a) if with_element else j
        raise ClassNotFound("ideal class not in the list")

    def mass_sum(self) -> Fraction:
        return sum((Fraction(1, w) for w in self.weights), Fraction(0))

    def component(self, sign: int) -> list[int]:
        return [i for i, s in enumerate(self.signs) if s == sign]

    @cached_property
    def w_permutation(self) -> list[int]:
        """Class of I sqrt(D) for each class I."""
        s = self.order.B.sqrt_d
        return [self.identify(I.right_mul_normalizer(s)) for I in self.ideals]


def _enumeration_primes(R: QuatOrder):
    K = R.B.K
    N = R.reduced_discriminant
    inert = next(q for q in primerange(2, 1000) if N % q and K.splitting(q) == "inert")
    split = next(q for q in primerange(2, 1000) if N % q and K.splitting(q) == "split")
    return inert, split


def right_ideal_classes(R: QuatOrder, *, mass: Fraction | None = None, with_signs: bool = True) -> ShimuraSet:
    """Enumerate right ideal classes of R by neighbor traversal, terminating at the mass.

    with_signs=False skips the sign labels (all None), for orders such as the
    maximal one whose unit norms leave the norm group of K.
    """
    B = R.B
    if mass is None:
        mass = eichler_mass(B, local_shapes(R))
    D = B.K.D
    q_in, q_sp = _enumeration_primes(R)
    I0 = unit_ideal(R)
    ideals = [I0]
    by_hash = {I0.theta_hash: [0]}
    total = Fraction(1, I0.weight)
    frontier = 0
    while total < mass and frontier < len(ideals):
        I = ideals[frontier]
        frontier += 1
        for q in (q_in, q_sp):
            for J in neighbors(I, q):
                h = J.theta_hash
                known = False
                for j in by_hash.get(h, []):
                    if equivalence_element(J, ideals[j]) is not None:
                        known = True
                        break
                if known:
                    continue
                by_hash.setdefault(h, []).append(len(ideals))
                ideals.append(J)
                total += Fraction(1, J.weight)
                if total >= mass:
                    break
            if total >= mass:
                break
    if total != mass:
        raise MassMismatch(f"enumerated mass {total} != {mass}")
    if not with_signs:
        return ShimuraSet(R, ideals, [I.weight for I in ideals], [None] * len(ideals), mass)
    signs = [I.sign(D) for I in ideals]
    if signs[0] != 1:
        raise IllDefinedSign("principal class has sign -")
    # unit norms are 1, so signs are well defined iff every class gives a consistent value
    SX = ShimuraSet(R, ideals, [I.weight for I in ideals], signs, mass)
    return SX


# ---------------------------------------------------------------- Brandt matrices

@dataclass(frozen=True)
class BrandtOperator:
    q: int
    matrix: np.ndarray  # object array of Python ints
    weights: tuple[int, ...]

    def row_sums(self):
        return [int(sum(r)) for r in self.matrix]

    def is_weighted_symmetric(self) -> bool:
        M, w = self.matrix, self.weights
        n = len(w)
        return all(M[i][j] * w[j] == M[j][i] * w[i] for i in range(n) for j in range(n))

    def __matmul__(self, other: "BrandtOperator"):
        return self.matrix.dot(other.matrix)


def brandt_matrices(X: ShimuraSet, bound: int) -> dict[int, np.ndarray]:
    """B(n) for n = 1..bound by theta counting on I_i conj(I_j).

    B(n)_ij = #{g in I_i conj(I_j) : nrd(g) = n nrd(I_i) nrd(I_j)} / |O_l(I_j)^x|.
    """
    h = len(X)
    mats = {n: np.zeros((h, h), dtype=object) for n in range(1, bound + 1)}
    for i, Ii in enumerate(X.ideals):
        for j, Ij in enumerate(X.ideals):
            L = Ii * Ij.conj()
            counts = L.theta_counts(bound)
            units = 2 * X.weights[j]
            for n in range(1, bound + 1):
                c = counts[n - 1]
                if c % units:
                    raise ArithmeticError("theta count not divisible by the unit count")
                mats[n][i, j] = c // units
    return mats


def brandt_matrix(X: ShimuraSet, q: int, _cache: dict | None = None) -> BrandtOperator:
    M = brandt_matrices(X, q)[q]
    return BrandtOperator(q, M, tuple(X.weights))


def brandt_by_neighbors(X: ShimuraSet, q: int) -> np.ndarray:
    """Independent Brandt matrix for prime q: identify each of the q + 1 neighbors."""
    h = len(X)
    M = np.zeros((h, h), dtype=object)
    for i, I in enumerate(X.ideals):
        for J in neighbors(I, q):
            M[i, X.identify(J)] += 1
    return M


def component_sign(X: ShimuraSet, i: int) -> int:
    return X.signs[i]


def torsion_unit_orders(O: QuatOrder) -> list[int]:
    """Multiplicative orders of units (as elements of B^x / +-1)."""
    B = O.B
    out = []
    for u in O.units():
        k, x = 1, u
        while x not in ((1, 0, 0, 0), (-1, 0, 0, 0)):
            x = B.mul(x, u)
            k += 1
            if k > 12:
                raise ArithmeticError("unit of unexpected order")
        out.append(k)
    return out
