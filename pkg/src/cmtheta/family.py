"""Characters onto mu_{p^a} of (Z/p^a)^d, the averaging identity over them, and fibers of the tower map.

The identity checked by ave1_identity_check is

    sum over surjective mu of h_mu = p^(ad) h - p^((a-1)d) sum_{w in G[p]} r(w) h,

with h_mu = sum_w mu(w) r(w) h and (r(w) h)(x) = h(x + w).  Both sides are
evaluated exactly, the left one through the character sums S(w) = sum_mu mu(w)
computed as elements of Z[zeta_{p^a}].
"""

from __future__ import annotations

import itertools
from collections import defaultdict
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .cyclotomic import CyclotomicElement
from .elladic import cyclotomic_embedding
from .numtheory import euler_phi, isprime, n_order

DEFAULT_BOUND = 20_000


class BoundExceeded(ValueError):
    pass


def _check(p: int, a: int, d: int, bound: int) -> None:
    if p == 2 or not isprime(p):
        raise ValueError("p must be an odd prime")
    if a < 1 or d < 1:
        raise ValueError("need a >= 1 and d >= 1")
    if p ** (a * d) > bound:
        raise BoundExceeded(f"p^(ad) = {p ** (a * d)} exceeds {bound}")


def group_elements(p: int, a: int, d: int) -> np.ndarray:
    """(Z/p^a)^d in lexicographic order, as an int64 array of shape (p^(ad), d)."""
    q = p**a
    return np.array(list(itertools.product(range(q), repeat=d)), dtype=np.int64).reshape(-1, d)


def _flat_index(x: np.ndarray, q: int) -> np.ndarray:
    d = x.shape[-1]
    w = q ** np.arange(d - 1, -1, -1, dtype=np.int64)
    return (x % q) @ w


@dataclass
class FiniteCharFamily:
    """Surjective characters mu_k(x) = zeta_{p^a}^(k.x) of (Z/p^a)^d."""

    p: int
    a: int
    d: int
    characters: list[tuple[int, ...]] = field(repr=False)

    @property
    def modulus(self) -> int:
        return self.p**self.a

    @property
    def expected_count(self) -> int:
        return self.p ** (self.a * self.d) - self.p ** ((self.a - 1) * self.d)

    def __len__(self):
        return len(self.characters)


def surjective_characters(p: int, a: int, d: int, *, bound: int = DEFAULT_BOUND) -> FiniteCharFamily:
    """All k in (Z/p^a)^d whose character x -> zeta^(k.x) has image all of mu_{p^a}.

    Surjectivity is tested on the image of the character itself (its order),
    not by the closed form.
    """
    _check(p, a, d, bound)
    q = p**a
    G = group_elements(p, a, d)
    out = []
    for k in G:
        # image of x -> k.x is the subgroup generated by the k_i, of order q / gcd
        g = q
        for v in k.tolist():
            g = np.gcd(g, v)
        if g == 1:
            out.append(tuple(int(v) for v in k))
    return FiniteCharFamily(p, a, d, out)


@lru_cache(maxsize=16)
def character_sums(p: int, a: int, d: int) -> np.ndarray:
    """S(w) = sum over surjective mu of mu(w), as integer coordinates in Z[zeta_{p^a}].

    Shape (p^(ad), phi(p^a)).  Computed by counting exponents k.w mod p^a
    blockwise and reducing modulo the cyclotomic polynomial.
    """
    q = p**a
    fam = surjective_characters(p, a, d, bound=max(DEFAULT_BOUND, q**d))
    Km = np.array(fam.characters, dtype=np.int64)
    G = group_elements(p, a, d)
    phi = euler_phi(q)
    out = np.zeros((len(G), phi), dtype=np.int64)
    block = max(1, 4_000_000 // max(len(Km), 1))
    for s in range(0, len(G), block):
        W = G[s:s + block]
        E = (Km @ W.T) % q
        cols = E.shape[1]
        flat = E + q * np.arange(cols, dtype=np.int64)[None, :]
        counts = np.bincount(flat.ravel(), minlength=q * cols).reshape(cols, q)
        for j in range(cols):
            z = CyclotomicElement.from_exponent_counts(q, counts[j])
            out[s + j] = np.asarray(z.num, dtype=np.int64)
    return out


def p_torsion(p: int, a: int, d: int) -> np.ndarray:
    """Flat indices of G[p] = p^(a-1) (Z/p^a)^d."""
    q = p**a
    T = np.array(list(itertools.product(range(p), repeat=d)), dtype=np.int64).reshape(-1, d) * p ** (a - 1)
    return _flat_index(T, q)


@dataclass(frozen=True)
class Ave1Result:
    residual: int
    lhs: np.ndarray = field(repr=False)
    rhs: np.ndarray = field(repr=False)
    support_size: int = 0


def _translate(h: np.ndarray, G: np.ndarray, w: np.ndarray, q: int) -> np.ndarray:
    """(r(w) h)(x) = h(x + w) for all x, as a flat array."""
    return h[_flat_index(G + w[None, :], q)]


def ave1_identity_check(p: int, a: int, d: int, h) -> Ave1Result:
    """Evaluate both sides of the averaging identity for a function h on (Z/p^a)^d.

    h is an integer array of length p^(ad) indexed lexicographically.  The
    left side is sum_w S(w) r(w) h over the support of S, which is found from
    S itself; the right side is evaluated as written.  Values live in
    Z[zeta_{p^a}] (integer coordinate vectors); the residual is the largest
    absolute coordinate of lhs - rhs.
    """
    q = p**a
    G = group_elements(p, a, d)
    h = np.asarray(h, dtype=np.int64).reshape(-1)
    if len(h) != len(G):
        raise ValueError(f"h must have {len(G)} entries")
    S = character_sums(p, a, d)
    phi = S.shape[1]
    support = np.nonzero(np.any(S != 0, axis=1))[0]
    lhs = np.zeros((len(G), phi), dtype=np.int64)
    for i in support.tolist():
        lhs += np.outer(_translate(h, G, G[i], q), S[i])
    rhs = np.zeros((len(G), phi), dtype=np.int64)
    rhs[:, 0] += p ** (a * d) * h
    tors = np.zeros(len(G), dtype=np.int64)
    for i in p_torsion(p, a, d).tolist():
        tors += _translate(h, G, G[i], q)
    rhs[:, 0] -= p ** ((a - 1) * d) * tors
    return Ave1Result(int(np.abs(lhs - rhs).max()), lhs, rhs, len(support))


# ---------------------------------------------------------------- fibers of the tower map

def abstract_conductor_exponent(k, p: int, N: int) -> int:
    """n with the character x -> zeta_{p^N}^(k.x) of (Z/p^N)^d of order p^n."""
    m = min((_vp_mod(v, p, N) for v in k), default=N)
    return N - m


def _vp_mod(v: int, p: int, N: int) -> int:
    v %= p**N
    if v == 0:
        return N
    e = 0
    while v % p == 0:
        v //= p
        e += 1
    return e


def tower_projection(k, p: int, N: int, a: int) -> tuple[int, ...]:
    """pr(nu)(u) = nu(p^(n-a) u) on (Z/p^a)^d, for nu of order p^n >= p^a.

    For nu = zeta_{p^N}^(k.x) this is mu with vector (k / p^(N-n)) mod p^a.
    """
    n = abstract_conductor_exponent(k, p, N)
    if n < a:
        raise ValueError("character order below p^a")
    return tuple((int(v) // p ** (N - n)) % p**a for v in k)


def partition_fibers(characters, p: int, N: int, a: int) -> dict[tuple, list]:
    """Fibers of pr over characters of (Z/p^N)^d given by exponent vectors.

    Characters of order below p^a are skipped.
    """
    fibers: dict[tuple, list] = defaultdict(list)
    for k in characters:
        if abstract_conductor_exponent(k, p, N) < a:
            continue
        fibers[tower_projection(k, p, N, a)].append(tuple(k))
    return dict(sorted(fibers.items()))


def galois_orbit(mu: tuple[int, ...], p: int, a: int) -> frozenset:
    """Orbit of mu under (Z/p^a)^x acting by scaling."""
    q = p**a
    return frozenset(tuple((s * v) % q for v in mu) for s in range(1, q) if s % p)


def fibers_galois_uniform(fibers: dict, p: int, a: int) -> bool:
    """Fiber sizes are constant along Galois orbits of mu."""
    seen = set()
    for mu in fibers:
        if mu in seen:
            continue
        orbit = galois_orbit(mu, p, a)
        seen |= orbit
        sizes = {len(fibers.get(nu, [])) for nu in orbit}
        if len(sizes) != 1:
            return False
    return True


def tower_fibers(chars, K, p: int, n: int, a: int) -> dict[int, list[int]]:
    """Fibers of pr on ring class characters of exact conductor p^n.

    ker(G_{p^n} -> G_{p^(n-a)}) is cyclic of order p^a, generated by the
    class of 1 + p^(n-a) w; pr(nu) is recorded as the exponent e with
    nu(1 + p^(n-a) w) = zeta_{p^a}^e.  Keys are e, values indices into chars.
    """
    if n <= a:
        raise ValueError("need n > a")
    q = p**a
    x = (1, p ** (n - a))
    fibers: dict[int, list[int]] = defaultdict(list)
    for i, nu in enumerate(chars):
        e = nu.of_element(x)
        if (e * q) % nu.N:
            raise ArithmeticError("kernel element is not p^a-torsion")
        fibers[(e * q // nu.N) % q].append(i)
    return dict(sorted(fibers.items()))


# ---------------------------------------------------------------- trace over finite fields

@dataclass(frozen=True)
class TraceCheck:
    ell: int
    p: int
    s: int
    base_degree: int
    degree: int
    failures: tuple


def finite_field_trace_check(ell: int, p: int, s: int) -> TraceCheck:
    """Tr_{k(zeta_{p^s})/k}(zeta^j) for k = F_ell(mu_p): 0 off k, [k(zeta):k] zeta^j on k.

    The field k(zeta_{p^s}) is F_ell[t]/(h) for an irreducible factor h of
    the p^s-th cyclotomic polynomial, with t the image of zeta.
    """
    if ell == p:
        raise ValueError("ell must differ from p")
    emb = cyclotomic_embedding(p**s, ell, 1)
    R = emb.ring
    z = emb.root
    F = R.f
    f0 = n_order(ell, p)
    if F % f0:
        raise ArithmeticError("degree tower inconsistent")
    dnu = F // f0
    qf = ell**f0
    failures = []
    x = R.const(1)
    for j in range(p**s):
        # trace: sum of x^(qf^i), i < dnu
        tr = R.const(0)
        y = x
        for _ in range(dnu):
            tr = R.add(tr, y)
            y = R.pow(y, qf)
        in_base = R.pow(x, qf) == x
        expect = R.scale(x, dnu) if in_base else R.const(0)
        if tr != expect:
            failures.append(j)
        x = R.mul(x, z)
    return TraceCheck(ell, p, s, f0, F, tuple(failures))
