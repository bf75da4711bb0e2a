"""Gross points of conductor m on a Shimura set and the simply transitive ring class group action.

K sits in B as the first factor.  A base ideal I0 whose left order meets K in
O_m is reached by a chain of neighbor steps raising the conductor; the point
attached to a class [a] of Pic(O_m) is the class of a I0, carried with the
conjugated image of m w as the embedding witness.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction

from .numtheory import factorint
from .quadfield import RingClassGroup, ring_class_group
from .quatalg import (
    ClassNotFound,
    QLattice,
    RightIdeal,
    ShimuraSet,
    _intersect_with_subspace,
    _k_conductor,
    neighbors,
    unit_ideal,
)
from .lattice import short_vectors

log = logging.getLogger(__name__)


class NotTransitive(RuntimeError):
    def __init__(self, orbit_sizes):
        super().__init__(f"orbit sizes {orbit_sizes}")
        self.orbit_sizes = orbit_sizes


class ConductorUnreachable(RuntimeError):
    pass


@dataclass(frozen=True)
class GrossPoint:
    cls: int
    witness: tuple  # image of m*w in O_l(I_cls)

    def key(self):
        return (self.cls, tuple(Fraction(c) for c in self.witness))


def left_order_conductor(I: RightIdeal) -> int:
    return _k_conductor(I.left_order)


def base_ideal(X: ShimuraSet, m: int, *, choice: int = 0) -> RightIdeal:
    """A right ideal I0 with O_l(I0) meeting K in exactly O_m.

    Build it prime by prime through neighbor steps, each raising the
    conductor by one prime factor; 'choice' selects among admissible
    neighbors at the first step (for re-basing experiments).
    """
    N = X.order.reduced_discriminant
    I = unit_ideal(X.order)
    cond = 1
    first = True
    for q, e in sorted(factorint(m).items()):
        if N % q == 0:
            raise ConductorUnreachable(f"prime {q} divides the level")
        for _ in range(e):
            target = cond * q
            good = [J for J in neighbors(I, q) if left_order_conductor(J) == target]
            if not good:
                raise ConductorUnreachable(f"no neighbor of conductor {target}")
            I = good[choice % len(good) if first else 0]
            first = False
            cond = target
    return I


def embedded_ideal_gens(K, G: RingClassGroup, g: int, witness):
    """Generators of the image of the O_m-ideal of class g under m w -> witness."""
    a, b, _ = G.forms[g]
    m = G.m
    c0 = Fraction(-b - m * K.t, 2)
    s = [Fraction(x) for x in witness]
    return [(a, 0, 0, 0), (s[0] + c0, s[1], s[2], s[3])]


def _times_ideal(B, gens, I: RightIdeal) -> RightIdeal:
    out = []
    for x in gens:
        for y in I.basis():
            out.append(B.mul(x, y))
    return RightIdeal(I.order, out)


def _conj_by(B, alpha, s):
    """alpha^-1 s alpha."""
    return B.mul(B.mul(B.inv(alpha), s), alpha)


def is_optimal(X: ShimuraSet, j: int, witness, m: int) -> bool:
    O = X.ideals[j].left_order
    if not O.contains(witness):
        return False
    for q in factorint(m):
        if O.contains(tuple(Fraction(c) / q for c in witness)):
            return False
    return True


@dataclass
class GrossPointFamily:
    X: ShimuraSet
    group: RingClassGroup
    points: list  # GrossPoint per group element index
    base: RightIdeal
    bijective: bool
    field_data: dict = field(default_factory=dict)

    @property
    def m(self) -> int:
        return self.group.m

    def classes(self) -> list[int]:
        return [x.cls for x in self.points]

    def index_of(self, x: GrossPoint) -> int:
        key = self._key(x)
        return self._lookup[key]

    def _key(self, x: GrossPoint):
        """Canonical key: class and witness up to conjugation by left-order units."""
        B = self.X.order.B
        O = self.X.ideals[x.cls].left_order
        conj = []
        for u in O.units():
            conj.append(tuple(Fraction(c) for c in _conj_by(B, u, x.witness)))
        return (x.cls, min(conj))

    def __post_init__(self):
        self._lookup = {}
        for i, x in enumerate(self.points):
            self._lookup.setdefault(self._key(x), i)

    def __len__(self):
        return len(self.points)


def point_of_ideal(X: ShimuraSet, J: RightIdeal, witness_in_J) -> GrossPoint:
    j, alpha = X.identify(J, with_element=True)
    return GrossPoint(j, tuple(_conj_by(X.order.B, alpha, witness_in_J)))


def build_family(X: ShimuraSet, m: int, *, group: RingClassGroup | None = None,
                 base: RightIdeal | None = None, check_transitive: bool = True) -> GrossPointFamily:
    """x(a) = [a I0] for every class a of Pic(O_m)."""
    B = X.order.B
    K = B.K
    G = group if group is not None else ring_class_group(K, m)
    if G.m != m:
        raise ValueError("group conductor mismatch")
    I0 = base if base is not None else base_ideal(X, m)
    if left_order_conductor(I0) != m:
        raise ConductorUnreachable("base ideal has the wrong conductor")
    mw = (0, m, 0, 0)
    pts = []
    for g in G.elements():
        J = _times_ideal(B, embedded_ideal_gens(K, G, g, mw), I0)
        pts.append(point_of_ideal(X, J, mw))
    fam = GrossPointFamily(X, G, pts, I0, False)
    fam.bijective = len(fam._lookup) == len(G)
    if check_transitive:
        orbit = _orbit(fam, 0)
        if len(orbit) != len(G):
            raise NotTransitive([len(orbit)])
    return fam


def galois_action(fam: GrossPointFamily, a: int, x: GrossPoint) -> GrossPoint:
    """a . x realized by multiplying the representative ideal by the embedded ideal of a."""
    X = fam.X
    B = X.order.B
    gens = embedded_ideal_gens(B.K, fam.group, a, x.witness)
    J = _times_ideal(B, gens, X.ideals[x.cls])
    try:
        return point_of_ideal(X, J, x.witness)
    except ClassNotFound as e:
        raise ClassNotFound(f"re-identification failed for class {a}") from e


def _orbit(fam: GrossPointFamily, start: int) -> set[int]:
    G = fam.group
    seen = {start}
    stack = [start]
    while stack:
        i = stack.pop()
        for g in G.gens:
            y = galois_action(fam, g, fam.points[i])
            k = fam.index_of(y)
            if k not in seen:
                seen.add(k)
                stack.append(k)
    return seen


def action_law_holds(fam: GrossPointFamily, pairs) -> bool:
    """(ab) x = a (b x) and a x(b) = x(ab) for the given (a, b) index pairs."""
    G = fam.group
    for a, b in pairs:
        lhs = galois_action(fam, G.mul(a, b), fam.points[0])
        rhs = galois_action(fam, a, galois_action(fam, b, fam.points[0]))
        if fam._key(lhs) != fam._key(rhs):
            return False
        if fam.index_of(lhs) != G.mul(a, b):
            return False
    return True


def is_free(fam: GrossPointFamily) -> bool:
    """No generator (nor any nontrivial element) fixes the base point."""
    for g in fam.group.elements():
        if g == fam.group.identity:
            continue
        if fam.index_of(galois_action(fam, g, fam.points[0])) == 0:
            return False
    return True


# ---------------------------------------------------------------- optimal embeddings

def elements_with_trace_norm(O: QLattice, trace, norm) -> list[tuple]:
    """All x in O with trd(x) = trace and nrd(x) = norm, by shifted enumeration of the trace-zero part."""
    B = O.B
    trace, norm = Fraction(trace), Fraction(norm)
    tr = [B.trd(b) for b in O.basis()]
    # integer coordinates c with sum c_i tr_i = trace
    from .lattice import hnf
    den = 1
    for t in tr:
        den = den * Fraction(t).denominator // __import__("math").gcd(den, Fraction(t).denominator)
    trs = [int(Fraction(t) * den) for t in tr]
    aug = [[trs[i]] + [int(i == k) for k in range(4)] for i in range(4)]
    H = hnf(aug)
    g = H[0][0]
    target = trace * den
    if target.denominator != 1 or int(target) % g:
        return []
    c0 = [int(target) // g * x for x in H[0][1:]]
    kern = [h[1:] for h in H[1:]]
    Ob = O.basis()

    def elt(c):
        return tuple(sum(Fraction(c[i]) * Ob[i][k] for i in range(4)) for k in range(4))

    E = [elt(k) for k in kern]
    x0 = elt(c0)
    half = tuple(c - (trace / 2 if k == 0 else 0) for k, c in enumerate(x0))
    # half = pure part of x0; write it on E over Q
    from .lattice import _solve_rational
    # least squares free: solve on the three coordinates (w, J, wJ) that determine pure quaternions
    EM = [[e[1], e[2], e[3]] for e in E]
    shift = _solve_rational(EM, [half[1], half[2], half[3]])
    pure = [tuple(e[k] - (B.trd(e) / 2 if k == 0 else 0) for k in range(4)) for e in E]
    G = [[Fraction(0)] * 3 for _ in range(3)]
    for i in range(3):
        for j in range(3):
            a, b = pure[i], pure[j]
            G[i][j] = B.nrd(tuple(x + y for x, y in zip(a, b))) - B.nrd(a) - B.nrd(b)
    pure_norm = norm - trace * trace / 4
    out = []
    if pure_norm < 0:
        return out
    for k, val in short_vectors(G, 2 * pure_norm, shift=shift):
        if val == 2 * pure_norm:
            c = [c0[i] + sum(k[j] * kern[j][i] for j in range(3)) for i in range(4)]
            x = elt(c)
            if B.trd(x) == trace and B.nrd(x) == norm:
                out.append(x)
    return sorted(out)


def optimal_embeddings(X: ShimuraSet, m: int) -> list[list[GrossPoint]]:
    """Per class, the images s of m w under optimal embeddings of O_m into the left order."""
    K = X.order.B.K
    tr = m * K.t
    nm = m * m * K.n
    out = []
    for j, I in enumerate(X.ideals):
        O = I.left_order
        pts = [GrossPoint(j, s) for s in elements_with_trace_norm(O, tr, nm) if is_optimal(X, j, s, m)]
        out.append(pts)
    return out


def embedding_count(X: ShimuraSet, m: int) -> Fraction:
    """sum_j #(optimal embeddings into O_l(I_j)) / w_j."""
    embs = optimal_embeddings(X, m)
    return sum((Fraction(len(e), w) for e, w in zip(embs, X.weights)), Fraction(0))


def embedding_number_oracle(X: ShimuraSet, m: int) -> int:
    """h(O_m) times the product of local optimal embedding numbers.

    Local factors: p + 1 at the prime ramified in K and B (shape O_K + pi O_B,
    O_m locally maximal there); 2 at each prime q dividing the level away from p
    (Eichler at split q, O_K + q^k O_B at inert q), for q not dividing m; 1 elsewhere.
    """
    from .quadfield import ring_class_number_formula
    from .quatalg import local_shapes
    K = X.order.B.K
    val = ring_class_number_formula(K, m)
    for s in local_shapes(X.order):
        if m % s.prime == 0:
            raise ValueError("embedding oracle needs m prime to the level")
        if s.kind == "ramified":
            if s.exponent != 2:
                raise ValueError("embedding oracle covers O_K + pi O_B at the ramified prime only")
            val *= s.prime + 1
        else:
            val *= 2
    return val
