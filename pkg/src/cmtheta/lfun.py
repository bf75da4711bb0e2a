"""Gauss sums, root numbers and central values L(1, lambda chi) with error bounds."""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import gcd

import numpy as np

from .cyclotomic import CyclotomicElement
from .numtheory import divisors, euler_phi, factorint, kronecker, legendre, moebius, n_order, ramanujan_sum
from .quadfield import HeckeCharacter, ImagQuadField, RingClassCharacter, RingClassGroup, _crt


class AmbiguousSign(ArithmeticError):
    pass


class ErrorBudgetExceeded(RuntimeError):
    pass


EPS = 2.0**-53


# ---------------------------------------------------------------- Dirichlet characters and Gauss sums

@dataclass(frozen=True)
class DirichletCharacter:
    """chi(x) = zeta_order^table[x mod N] (table entry -1 marks non-units)."""

    N: int
    order: int
    table: tuple[int, ...]

    def __call__(self, x: int) -> CyclotomicElement:
        e = self.table[x % self.N]
        if e < 0:
            return CyclotomicElement.zero(self.order)
        return CyclotomicElement.zeta(self.order, e)

    def exp(self, x: int) -> int:
        return self.table[x % self.N]

    def conj(self) -> "DirichletCharacter":
        return DirichletCharacter(self.N, self.order, tuple(-1 if e < 0 else (-e) % self.order for e in self.table))

    def is_primitive(self) -> bool:
        for q in factorint(self.N):
            d = self.N // q
            # trivial on units congruent to 1 mod d means it factors through d
            if all(self.table[x] == 0 for x in range(1, self.N, d) if self.table[x] >= 0):
                return False
        return True

    @property
    def value_at_minus_one(self) -> int:
        e = self.table[(self.N - 1) % self.N]
        return 1 if e == 0 else -1


def _cyclic_factors(N: int):
    """Generators and orders of a decomposition of (Z/N)^x into cyclic factors, via CRT."""
    out = []
    for q, k in sorted(factorint(N).items()):
        qk = q**k
        rest = N // qk
        lift = lambda g: _crt(g % qk, qk, 1, rest)
        if q == 2:
            if k >= 2:
                out.append((lift(-1), 2, qk))
            if k >= 3:
                out.append((lift(5), 2 ** (k - 2), qk))
        else:
            g = next(g for g in range(2, qk + 1) if gcd(g, q) == 1 and n_order(g, qk) == euler_phi(qk))
            out.append((lift(g), euler_phi(qk), qk))
    return out


def dirichlet_characters(N: int) -> list[DirichletCharacter]:
    """All characters mod N, lexicographic in exponents on the chosen generators."""
    facs = _cyclic_factors(N)
    L = 1
    for _, o, _ in facs:
        L = L * o // gcd(L, o)
    # discrete logs by walking the product of cyclic factors
    logs = {}
    orders = [o for _, o, _ in facs]
    from itertools import product
    for exps in product(*[range(o) for o in orders]):
        x = 1
        for (g, _, _), e in zip(facs, exps):
            x = x * pow(g, e, N) % N
        logs[x] = exps
    out = []
    for ks in product(*[range(o) for o in orders]):
        table = []
        for x in range(N):
            if gcd(x, N) != 1:
                table.append(-1)
                continue
            e = sum(k * le * (L // o) for k, le, o in zip(ks, logs[x % N], orders)) % L
            table.append(e)
        out.append(DirichletCharacter(N, max(L, 1), tuple(table)))
    return out


def primitive_characters(N: int) -> list[DirichletCharacter]:
    return [c for c in dirichlet_characters(N) if c.is_primitive()]


@dataclass(frozen=True)
class GaussSum:
    modulus: int
    value: complex
    exact_abs_sq: Fraction | None
    normalization: str = "e(x/N)"


def gauss_sum_value(chi: DirichletCharacter) -> complex:
    """sum_x chi(x) e(x/N) as a complex number (fsum of real and imaginary parts)."""
    re, im = [], []
    for x in range(chi.N):
        e = chi.table[x]
        if e < 0:
            continue
        ang = 2 * math.pi * (e / chi.order + x / chi.N)
        re.append(math.cos(ang))
        im.append(math.sin(ang))
    return complex(math.fsum(re), math.fsum(im))


def gauss_abs_squared_exact(chi: DirichletCharacter) -> CyclotomicElement:
    """|G(chi)|^2 exactly in Q(zeta_order).

    |G|^2 = sum_a e(a/N) J(a) with J(a) = sum_y chi(y + a) chi-bar(y); J(a)
    depends only on gcd(a, N), and summing e(a/N) over a of fixed gcd g gives
    mu(N/g).
    """
    N, L = chi.N, chi.order
    tot = CyclotomicElement.zero(L)
    for g in divisors(N):
        mu = moebius(N // g)
        if mu == 0:
            continue
        counts = [0] * L
        for y in range(N):
            e1 = chi.table[(y + g) % N]
            e2 = chi.table[y]
            if e1 < 0 or e2 < 0:
                continue
            counts[(e1 - e2) % L] += 1
        tot = tot + CyclotomicElement.from_exponent_counts(L, counts) * mu
    return tot


def gauss_sum(chi: DirichletCharacter | None, N: int = 1) -> GaussSum:
    """Gauss sum of a Dirichlet character; unramified (None or N = 1) gives 1."""
    if chi is None or chi.N == 1:
        return GaussSum(1, 1 + 0j, Fraction(1))
    sq = gauss_abs_squared_exact(chi)
    return GaussSum(chi.N, gauss_sum_value(chi), sq.rational_value() if sq.is_rational() else None)


def quadratic_character(p: int) -> DirichletCharacter:
    return DirichletCharacter(p, 2, tuple(-1 if x % p == 0 else (0 if legendre(x, p) == 1 else 1) for x in range(p)))


# ---------------------------------------------------------------- conductors

@dataclass(frozen=True)
class ConductorData:
    level: int
    split_part: int
    nonsplit_part: int
    factorization: dict


def conductor_arith(lam: HeckeCharacter, twist_conductor: int = 1) -> ConductorData:
    """N = |D| N(cond) with cond = sqrt(D) m, m the ring class conductor of the total twist."""
    K = lam.K
    m = twist_conductor
    if lam.twist is not None:
        m = m * lam.twist_conductor // gcd(m, lam.twist_conductor)
    N = lam.p * lam.p * m * m
    fac = factorint(N)
    plus = 1
    minus = 1
    for q, e in fac.items():
        if K.splitting(q) == "split":
            plus *= q**e
        else:
            minus *= q**e
    return ConductorData(N, plus, minus, fac)


# ---------------------------------------------------------------- root numbers

def _p1_reps(m: int):
    """Representatives u + v w of P^1(Z/m), combined over prime powers by CRT."""
    reps = [(0, 1)]  # trivial modulus
    mod = 1
    for q, k in sorted(factorint(m).items()):
        qk = q**k
        loc = [(u, 1) for u in range(qk)] + [(1, v) for v in range(0, qk, q)]
        new = []
        for (u1, v1) in reps:
            for (u2, v2) in loc:
                new.append((_crt(u1, mod, u2, qk) if mod > 1 else u2, _crt(v1, mod, v2, qk) if mod > 1 else v2))
        reps = new
        mod *= qk
    return reps


@lru_cache(maxsize=64)
def _coset_reps(D: int, m: int):
    """Representatives of (O_K/m)^x / (Z/m)^x with their w-coordinates; one per class of Pic(O_m)."""
    K = ImagQuadField(D)
    out = [(u % m if m > 1 else 0, v % m if m > 1 else 0) for u, v in _p1_reps(m)]
    return [x for x in out if gcd(K.norm(x), m) == 1]


def _rest_modulus(M: int, m: int) -> int:
    r = 1
    for q, k in factorint(M).items():
        if m % q:
            r *= q**k
    return r


def _char_exp_at(chi: RingClassCharacter, x, m: int) -> int:
    """Exponent of chi at x in O_K prime to m when chi factors through conductor m."""
    M = chi.group.m
    rest = _rest_modulus(M, m)
    if rest > 1:
        x = (_crt(x[0] % m, m, 1, rest), _crt(x[1] % m, m, 0, rest))
    return chi.of_element(x)


def twist_gauss_sum(chi: RingClassCharacter, m: int | None = None) -> CyclotomicElement:
    """tau_m(chi) = sum over (O/m)^x / (Z/m)^x of chi(y) c_m(Tr(y / sqrt D)), exactly.

    Tr((u + v w)/sqrt D) = v, and summing e(r v/m) over r in (Z/m)^x is the
    Ramanujan sum c_m(v).
    """
    K = chi.group.K
    if m is None:
        m = chi.conductor()
    N = max(chi.N, 1)
    counts = [0] * N
    reps = _coset_reps(K.D, m)
    for x in reps:
        e = _char_exp_at(chi, x, m) if m > 1 else 0
        counts[e % N] += ramanujan_sum(m, x[1])
    return CyclotomicElement.from_exponent_counts(N, counts)


def root_number(lam: HeckeCharacter, chi: RingClassCharacter | None = None) -> int:
    """Global root number of lambda * chi (chi a ring class character, conductor prime to D).

    W = (2 m | p) chi(sqrt D) tau_m(chi) / m from the factorization of the
    Gauss sum over O_K / (m sqrt D) into the sqrt(D)-part and the m-part.
    """
    p = lam.p
    D = lam.K.D
    base = legendre(2, p)
    if chi is None or chi.is_trivial():
        return base
    m = chi.conductor()
    if m % p == 0:
        raise AmbiguousSign("twist conductor divisible by |D|")
    tau = twist_gauss_sum(chi, m)
    s = chi.value(chi.group.class_of_sqrt_d())
    w = tau * s * legendre(2 * m, p)
    pm = CyclotomicElement.rational(w.order, m)
    if w == pm:
        return 1
    if w == -pm:
        return -1
    raise AmbiguousSign(f"root number not +-1: tau = {w}")


def root_number_direct(lam: HeckeCharacter, chi: RingClassCharacter | None = None) -> complex:
    """tau(psi_f) / conj(f) by the full sum over O_K / (f), f = m sqrt(D); for small conductors."""
    K = lam.K
    p = lam.p
    m = 1 if chi is None or chi.is_trivial() else chi.conductor()
    D = K.D
    acc_re, acc_im = [], []
    for u in range(p * m):
        for v in range(m):
            x = (u, v)
            s = lam.sign(x)
            if s == 0 or gcd(K.norm(x), m) != 1:
                continue
            e = 0.0
            if chi is not None and m > 1:
                e = _char_exp_at(chi, x, m) / chi.N
            ang = 2 * math.pi * (e + (2 * u + K.t * v) / (m * D))
            acc_re.append(s * math.cos(ang))
            acc_im.append(s * math.sin(ang))
    tau = complex(math.fsum(acc_re), math.fsum(acc_im))
    sqrt_d = 1j * math.sqrt(p)
    fbar = m * (-sqrt_d)
    return tau / fbar


def parity_prediction(lam: HeckeCharacter, chi: RingClassCharacter, n: int) -> int:
    """(-1)^n chi([sqrt D]) eps(lambda): the inert-prime parity law for conductor p^n twists."""
    s = chi.value(chi.group.class_of_sqrt_d())
    sign = 1 if s == 1 else (-1 if s == -1 else None)
    if sign is None:
        raise AmbiguousSign("chi(sqrt D) is not +-1")
    return (-1) ** n * sign * root_number(lam)


# ---------------------------------------------------------------- L-values

@dataclass(frozen=True)
class LValueResult:
    value: complex
    radius: float
    cutoff: int
    conductor: int
    root_number: int
    analytic_root_number: complex
    residual: float
    terms: int

    def contains(self, z: complex) -> bool:
        return abs(z - self.value) <= self.radius


def _ideal_count_bound(t: float, D: int) -> float:
    """Upper bound for the number of ideals of norm <= t."""
    if t < 1:
        return 0.0
    return (4 * math.sqrt(t / abs(D)) + 1) * (2 * math.sqrt(t) + 1) / 2 + 1


def tail_bound(X: float, c: float, D: int) -> float:
    """Bound for sum over ideals with N > X of N^(-1/2) exp(-c N), by dyadic blocks."""
    tot = 0.0
    lo = X
    while True:
        term = _ideal_count_bound(2 * lo, D) * lo**-0.5 * math.exp(-c * lo)
        tot += term
        if term < 1e-40 or lo > 1e15:
            break
        lo *= 2
    return tot


class LSeriesData:
    """Dirichlet coefficients psi((x))/N(x) for psi = lambda * chi over elements up to a norm bound."""

    def __init__(self, lam: HeckeCharacter, chi: RingClassCharacter | None, bound: int):
        K = lam.K
        self.bound = bound
        m = 1 if chi is None or chi.is_trivial() else chi.group.m
        mods = lam.p * m
        ns, vals = [], []
        Nchi = chi.N if chi is not None else 1
        for x, n in K.elements_up_to_norm(bound):
            if gcd(n, mods) != 1:
                continue
            s = lam.sign(x)
            z = K.to_complex(x) * s
            if chi is not None and m > 1:
                z *= cmath.exp(2j * math.pi * chi.of_element(x) / Nchi)
            ns.append(n)
            vals.append(z / n)
        self.norms = np.array(ns, dtype=np.float64)
        self.coeffs = np.array(vals, dtype=np.complex128)


def _weighted_sum(data: LSeriesData, c: float, conj: bool) -> tuple[complex, float]:
    w = np.exp(-c * data.norms)
    v = np.conj(data.coeffs) if conj else data.coeffs
    t = v * w
    s = complex(math.fsum(t.real.tolist()), math.fsum(t.imag.tolist()))
    err = 16 * EPS * float(np.abs(t).sum()) + EPS * abs(s)
    return s, err


def l_value(lam: HeckeCharacter, chi: RingClassCharacter | None = None, *, abs_err: float = 1e-9,
            ceiling: int = 5_000_000, A2: float = 1.25) -> LValueResult:
    """L(1, lambda chi) through the weight-2 approximate functional equation.

    L(1) = sum a_n/n [exp(-2 pi n A/sqrt M) + W exp(-2 pi n/(A sqrt M))] at A = 1,
    with M = |D| N(cond).  A second value of A determines the analytic root
    number; its distance to the algebraic one is the reported residual.
    """
    K = lam.K
    m = 1 if chi is None or chi.is_trivial() else chi.conductor()
    M = lam.p * lam.p * m * m
    W = root_number(lam, chi)
    sq = math.sqrt(M)
    cmin = 2 * math.pi / (A2 * sq)
    X = max(int(2 * sq), 16)
    while tail_bound(X, cmin, K.D) * (1 + A2) > abs_err / 4:
        X *= 2
        if X > ceiling:
            raise ErrorBudgetExceeded(f"required norm bound exceeds {ceiling}")
    data = LSeriesData(lam, chi, X)
    c1 = 2 * math.pi / sq
    s1, e1 = _weighted_sum(data, c1, False)
    s2, e2 = _weighted_sum(data, c1, True)
    val = s1 + W * s2
    tail = 2 * tail_bound(X, c1, K.D)
    radius = e1 + e2 + tail
    # second A: solve for the analytic root number
    a1, _ = _weighted_sum(data, 2 * math.pi * A2 / sq, False)
    a2, _ = _weighted_sum(data, 2 * math.pi / (A2 * sq), True)
    W_an = (s1 - a1) / (a2 - s2) if abs(a2 - s2) > 1e-300 else complex("nan")
    residual = abs((a1 + W * a2) - val)
    return LValueResult(val, radius, X, M, W, W_an, residual, len(data.norms))
