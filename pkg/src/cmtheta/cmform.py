"""The CM test vector on a Shimura set: joint Hecke eigenvector, normalization and support."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd

from .cyclotomic import CyclotomicElement
from .elladic import INFINITE, ell_valuation, rational_embedding
from .numtheory import primerange
from .quadfield import HeckeCharacter
from .quatalg import ShimuraSet, brandt_matrices


class EigenspaceDim(ArithmeticError):
    def __init__(self, dim: int):
        super().__init__(f"joint eigenspace has dimension {dim}, expected 1")
        self.dim = dim


class NoEllUnitCoordinate(ArithmeticError):
    pass


def _is_zero(x) -> bool:
    return x.is_zero() if isinstance(x, CyclotomicElement) else x == 0


def nullspace(rows: list[list], ncols: int) -> list[list]:
    """Basis of {v : M v = 0} by Gauss-Jordan elimination over the field of the entries."""
    M = [list(r) for r in rows]
    pivots = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(M)) if not _is_zero(M[i][c])), None)
        if piv is None:
            continue
        M[r], M[piv] = M[piv], M[r]
        inv = 1 / M[r][c]
        M[r] = [x * inv for x in M[r]]
        for i in range(len(M)):
            if i != r and not _is_zero(M[i][c]):
                f = M[i][c]
                M[i] = [a - f * b for a, b in zip(M[i], M[r])]
        pivots.append(c)
        r += 1
        if r == len(M):
            break
    free = [c for c in range(ncols) if c not in pivots]
    one = M[0][pivots[0]] if pivots else Fraction(1)
    zero = one - one
    basis = []
    for fc in free:
        v = [zero] * ncols
        v[fc] = one
        for i, pc in enumerate(pivots):
            v[pc] = -M[i][fc]
        basis.append(v)
    return basis


@dataclass
class CMEigenform:
    coords: list  # Fraction or CyclotomicElement per class
    eigenvalues: dict
    ell: int | None
    witness: int | None
    w_sign: int | None

    def __len__(self):
        return len(self.coords)

    def is_rational(self) -> bool:
        return all(not isinstance(c, CyclotomicElement) or c.is_rational() for c in self.coords)

    def scaled(self, c) -> "CMEigenform":
        return CMEigenform([x * c for x in self.coords], dict(self.eigenvalues), None, None, self.w_sign)

    def integer_coords(self) -> list[int]:
        out = []
        for c in self.coords:
            q = c.rational_value() if isinstance(c, CyclotomicElement) else Fraction(c)
            if q.denominator != 1:
                raise ValueError("coordinates are not integral")
            out.append(int(q))
        return out


def _as_field(x, order: int | None):
    if order is None:
        return Fraction(x)
    if isinstance(x, CyclotomicElement):
        return x.lift(order) if x.order != order else x
    return CyclotomicElement.rational(order, x)


def eigenvalue_table(lam: HeckeCharacter, primes) -> dict:
    """a_q = lambda(Q) + lambda(Q-bar) for split q, 0 for inert q, exactly."""
    out = {}
    for q in primes:
        a = lam.a_q_exact(q)
        out[q] = a.rational_value() if a.is_rational() else a
    return out


def default_probe_primes(X: ShimuraSet, count: int = 4) -> list[int]:
    N = X.order.reduced_discriminant
    K = X.order.B.K
    split, inert = [], []
    for q in primerange(2, 200):
        if N % q == 0:
            continue
        (split if K.splitting(q) == "split" else inert).append(q)
    return sorted(split[:count] + inert[:2])


def cm_eigenvector(X: ShimuraSet, lam: HeckeCharacter, probe_primes=None, *,
                   ell: int | None = None, use_w: bool = True, brandt: dict | None = None) -> CMEigenform:
    """The line in the Brandt module with T_q = a_q(lambda) for the probe primes and W = +1.

    W is [I] -> [I sqrt(D)]; the test vector is its +1 eigenvector.
    """
    if probe_primes is None:
        probe_primes = default_probe_primes(X)
    probe_primes = sorted(probe_primes)
    ev = eigenvalue_table(lam, probe_primes)
    order = None
    for a in ev.values():
        if isinstance(a, CyclotomicElement):
            order = a.order if order is None else order * a.order // gcd(order, a.order)
    if brandt is None:
        brandt = brandt_matrices(X, max(probe_primes))
    h = len(X)
    rows = []
    for q in probe_primes:
        M = brandt[q]
        a = _as_field(ev[q], order)
        for i in range(h):
            rows.append([_as_field(M[i, j], order) - (a if i == j else 0) for j in range(h)])
    if use_w:
        W = X.w_permutation
        for i in range(h):
            r = [_as_field(0, order)] * h
            r[W[i]] = r[W[i]] + 1
            r[i] = r[i] - 1
            rows.append(r)
    ns = nullspace(rows, h)
    if len(ns) != 1:
        raise EigenspaceDim(len(ns))
    f = CMEigenform(ns[0], ev, None, None, 1 if use_w else None)
    return normalize(f, ell)


def normalize(f: CMEigenform, ell: int | None = None, emb=None) -> CMEigenform:
    """ell-optimal scaling.

    Rational coordinates are scaled to a primitive integer vector with first
    nonzero entry positive (optimal at every ell).  Cyclotomic coordinates are
    divided by a coordinate of minimal ell-adic valuation.
    """
    coords = f.coords
    if all(_is_zero(c) for c in coords):
        raise NoEllUnitCoordinate("zero vector")
    if f.is_rational():
        qs = [c.rational_value() if isinstance(c, CyclotomicElement) else Fraction(c) for c in coords]
        den = 1
        for q in qs:
            den = den * q.denominator // gcd(den, q.denominator)
        ints = [int(q * den) for q in qs]
        g = 0
        for v in ints:
            g = gcd(g, v)
        first = next(v for v in ints if v)
        s = 1 if first > 0 else -1
        ints = [s * v // g for v in ints]
        witness = None
        if ell is not None:
            witness = next((i for i, v in enumerate(ints) if v % ell), None)
            if witness is None:
                raise NoEllUnitCoordinate(f"no {ell}-unit coordinate")
        return CMEigenform([Fraction(v) for v in ints], f.eigenvalues, ell, witness, f.w_sign)
    if ell is None or emb is None:
        raise ValueError("cyclotomic coordinates need ell and an embedding")
    vals = [INFINITE if _is_zero(c) else ell_valuation(c, emb) for c in coords]
    i0 = min((i for i, v in enumerate(vals) if v != INFINITE), key=lambda i: vals[i])
    c0 = coords[i0]
    new = [c / c0 for c in coords]
    check = [INFINITE if _is_zero(c) else ell_valuation(c, emb) for c in new]
    if min(v for v in check if v != INFINITE) != 0:
        raise NoEllUnitCoordinate("scaling failed")
    return CMEigenform(new, f.eigenvalues, ell, i0, f.w_sign)


def component_support(f: CMEigenform, X: ShimuraSet) -> str:
    """'+', '-', 'both' or 'none' according to where f is nonzero."""
    plus = any(not _is_zero(c) for c, s in zip(f.coords, X.signs) if s == 1)
    minus = any(not _is_zero(c) for c, s in zip(f.coords, X.signs) if s == -1)
    if plus and minus:
        return "both"
    if plus:
        return "+"
    if minus:
        return "-"
    return "none"


def support_sign(f: CMEigenform, X: ShimuraSet) -> int | None:
    s = component_support(f, X)
    return {"+": 1, "-": -1}.get(s)


def inner_product(f: CMEigenform, g: CMEigenform, X: ShimuraSet):
    """sum_i f_i g_i / w_i."""
    tot = 0
    for a, b, w in zip(f.coords, g.coords, X.weights):
        tot = tot + a * b / w
    return tot


def hecke_apply(M, coords: list) -> list:
    h = len(coords)
    return [sum((M[i, j] * coords[j] for j in range(h)), 0 * coords[0]) for i in range(h)]


def binary_theta_coefficients(lam: HeckeCharacter, bound: int) -> list[complex]:
    """Coefficients of sum over ideals prime to the conductor of lambda(a) x^N(a), n = 1..bound."""
    K = lam.K
    out = [0j] * (bound + 1)
    for x, n in K.elements_up_to_norm(bound):
        if gcd(n, lam.cond_norm) != 1:
            continue
        out[n] += lam.complex_value(x)
    return out[1:]


def check_ell_optimal(f: CMEigenform, ell: int) -> bool:
    emb = rational_embedding(ell, 20)
    vals = [ell_valuation(c, emb) for c in f.coords if not _is_zero(c)]
    return min(vals) == 0 and all(v >= 0 for v in vals)
