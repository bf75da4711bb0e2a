from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st
from sympy import factorint as sym_factorint

from cmtheta.cyclotomic import CyclotomicElement, cyclotomic_coeffs
from cmtheta.elladic import (
    INFINITE,
    NoSimpleRoot,
    cyclotomic_embedding,
    ell_valuation,
    hensel_embed,
    padic_power_residue,
    root_residue,
)
from cmtheta.numberfield import NumberField, compositum
from cmtheta.numtheory import (
    crt_pair,
    divisors,
    euler_phi,
    is_fundamental_discriminant,
    kronecker,
    legendre,
    moebius,
    ramanujan_sum,
    vp,
    xgcd,
)


# ---------------------------------------------------------------- integers

def test_xgcd_bezout():
    for a in range(-30, 31):
        for b in range(-30, 31):
            g, x, y = xgcd(a, b)
            assert a * x + b * y == g
            assert g >= 0


def test_legendre_matches_euler_criterion():
    for p in (3, 5, 7, 11, 13):
        for a in range(p):
            e = pow(a, (p - 1) // 2, p)
            assert legendre(a, p) == (0 if a == 0 else (1 if e == 1 else -1))


def test_kronecker_is_eta_of_discriminant():
    # (-7|2) = +1 since -7 = 1 mod 8; (-11|2) = -1 since -11 = 5 mod 8
    assert kronecker(-7, 2) == 1
    assert kronecker(-11, 2) == -1
    assert kronecker(-7, 3) == -1
    assert kronecker(-7, 7) == 0


def test_phi_mobius_divisors():
    for n in range(1, 200):
        assert sum(euler_phi(d) for d in divisors(n)) == n
        assert sum(moebius(d) for d in divisors(n)) == (1 if n == 1 else 0)


def test_ramanujan_sum_brute_force():
    import cmath
    from math import gcd
    for m in range(1, 25):
        for t in range(0, 12):
            s = sum(cmath.exp(2j * cmath.pi * a * t / m) for a in range(1, m + 1) if gcd(a, m) == 1)
            assert abs(s - ramanujan_sum(m, t)) < 1e-9


def test_crt_and_vp():
    assert crt_pair(2, 3, 3, 5) == 8
    assert vp(3**5 * 7, 3) == 5
    assert is_fundamental_discriminant(-7)
    assert not is_fundamental_discriminant(-28 * 9)


# ---------------------------------------------------------------- cyclotomic

def test_cyclotomic_poly_coefficients():
    assert cyclotomic_coeffs(1) == (-1, 1)
    assert cyclotomic_coeffs(3) == (1, 1, 1)
    assert cyclotomic_coeffs(4) == (1, 0, 1)
    assert cyclotomic_coeffs(9) == (1, 0, 0, 1, 0, 0, 1)


def test_zeta_power_relations():
    for m in (3, 4, 5, 9, 12, 15):
        z = CyclotomicElement.zeta(m)
        assert z**m == 1
        assert len(z.coeffs) == euler_phi(m)
        # sum of primitive roots is mu(m)
        tot = CyclotomicElement.zero(m)
        from math import gcd
        for k in range(m):
            if gcd(k, m) == 1:
                tot = tot + CyclotomicElement.zeta(m, k)
        assert tot == moebius(m)


def test_norm_of_zeta_minus_one():
    assert (CyclotomicElement.zeta(5) - 1).norm() == 5
    assert (CyclotomicElement.zeta(9) - 1).norm() == 3
    assert (CyclotomicElement.zeta(15) - 1).norm() == 1


def test_lift_is_field_inclusion():
    z3 = CyclotomicElement.zeta(3)
    assert z3.lift(9) == CyclotomicElement.zeta(9, 3)
    assert z3.lift(12) == CyclotomicElement.zeta(12, 4)


orders = st.sampled_from([3, 4, 5, 7, 8, 9, 12])


@st.composite
def cyc_elements(draw, m=None):
    m = draw(orders) if m is None else m
    n = euler_phi(m)
    cs = draw(st.lists(st.integers(-6, 6), min_size=n, max_size=n))
    den = draw(st.integers(1, 4))
    return CyclotomicElement(m, cs, den)


@settings(max_examples=60, deadline=None)
@given(st.data())
def test_cyclotomic_ring_axioms(data):
    m = data.draw(orders)
    x, y, z = (data.draw(cyc_elements(m)) for _ in range(3))
    assert (x * y) * z == x * (y * z)
    assert x * (y + z) == x * y + x * z
    assert x + y == y + x
    if not x.is_zero():
        assert x * x.inverse() == 1
        assert (x * y).norm() == x.norm() * y.norm()


@settings(max_examples=60, deadline=None)
@given(cyc_elements())
def test_times_conjugate_is_totally_nonnegative(x):
    from math import gcd
    y = x * x.conj()
    for k in range(1, x.order):
        if gcd(k, x.order) == 1:
            v = y.to_complex(k)
            assert abs(v.imag) < 1e-9
            assert v.real > -1e-9


@settings(max_examples=60, deadline=None)
@given(st.data())
def test_reduce_of_lift_round_trip(data):
    m = data.draw(orders)
    n = euler_phi(m)
    cs = data.draw(st.lists(st.integers(-9, 9), min_size=n, max_size=n))
    x = CyclotomicElement(m, cs)
    assert CyclotomicElement(m, list(x.num)) == x
    # padding with multiples of the cyclotomic polynomial reduces back
    phi = cyclotomic_coeffs(m)
    extra = [0] * (2 * len(phi))
    for i, c in enumerate(phi):
        extra[i + 1] += 3 * c
    padded = [a + b for a, b in zip(cs + [0] * len(extra), extra + [0] * len(cs))]
    assert CyclotomicElement(m, padded) == x


# ---------------------------------------------------------------- number fields

@settings(max_examples=40, deadline=None)
@given(st.lists(st.integers(-5, 5), min_size=3, max_size=3),
       st.lists(st.integers(-5, 5), min_size=3, max_size=3),
       st.lists(st.integers(-5, 5), min_size=3, max_size=3))
def test_number_field_axioms(a, b, c):
    F = NumberField.from_coeffs([-2, 0, 0, 1])  # x^3 - 2
    x, y, z = F.element(a), F.element(b), F.element(c)
    assert (x * y) * z == x * (y * z)
    assert x * (y + z) == x * y + x * z
    assert (x * y).norm() == x.norm() * y.norm()


def test_cube_root_of_two_norm():
    F = NumberField.from_coeffs([-2, 0, 0, 1])
    assert F.gen().norm() == 2
    assert F.gen() ** 3 == F.rational(2)


def test_compositum_degree():
    F = NumberField.from_coeffs([1, 0, 1])
    G = NumberField.from_coeffs([-2, 0, 1])
    assert compositum(F, G).degree == 4


# ---------------------------------------------------------------- ell-adic embeddings

def test_hensel_root_zeta3_mod7():
    emb = hensel_embed(("cyclotomic", 3), 7, 6)
    # brute force: x^2 + x + 1 = 0 mod 7
    sols = [x for x in range(7) if (x * x + x + 1) % 7 == 0]
    assert sols == [2, 4]
    r = root_residue(emb)[0]
    assert r == 2  # smallest residue first
    q = 7**6
    R = emb.root[0]
    assert (R * R + R + 1) % q == 0


def test_hensel_root_i_mod5():
    emb = hensel_embed(NumberField.from_coeffs([1, 0, 1]), 5, 8)
    sols = [x for x in range(5) if (x * x + 1) % 5 == 0]
    assert sols == [2, 3]
    R = emb.root[0]
    assert R % 5 == 2
    assert (R * R + 1) % 5**8 == 0


def test_rational_embedding_is_identity():
    emb = hensel_embed(1, 11, 5)
    assert emb.kind == "rational"
    assert ell_valuation(Fraction(121, 3), emb) == 2
    assert ell_valuation(Fraction(5, 11), emb) == -1


def test_inert_polynomial_builds_unramified_extension():
    emb = hensel_embed(NumberField.from_coeffs([1, 0, 1]), 7, 5)
    assert emb.ring.f == 2
    F = NumberField.from_coeffs([1, 0, 1])
    assert ell_valuation(F.element([7, 14]), emb) == 1
    assert ell_valuation(F.element([1, 1]), emb) == 0


def test_inseparable_mod_ell_is_rejected():
    # x^2 + 1/2 is not 2-integral
    F = NumberField.from_coeffs([Fraction(1, 2), 0, 1])
    with pytest.raises(NoSimpleRoot):
        hensel_embed(F, 2, 5)


def test_valuation_normalization():
    for ell in (3, 5, 7, 11, 13):
        for m in (1, 3, 4, 5, 9):
            emb = cyclotomic_embedding(m, ell, 10)
            assert ell_valuation(CyclotomicElement.rational(m, ell), emb) == 1


def test_zeta_p_minus_one_is_unit_away_from_p():
    for p in (3, 5, 7, 11):
        for ell in (3, 5, 7, 11, 13):
            if ell == p:
                continue
            emb = cyclotomic_embedding(p, ell, 10)
            assert ell_valuation(CyclotomicElement.zeta(p) - 1, emb) == 0


def test_ramified_valuation_zeta_ell_minus_one():
    for ell in (3, 5, 7):
        emb = cyclotomic_embedding(ell, ell, 10)
        assert ell_valuation(CyclotomicElement.zeta(ell) - 1, emb) == Fraction(1, ell - 1)
    emb = cyclotomic_embedding(9, 3, 10)
    assert ell_valuation(CyclotomicElement.zeta(9) - 1, emb) == Fraction(1, 6)


def test_zero_has_infinite_valuation():
    emb = cyclotomic_embedding(5, 11, 8)
    assert ell_valuation(CyclotomicElement.zero(5), emb) == INFINITE


def test_precision_independence():
    x = CyclotomicElement(5, [11 * 3, 11, 0, 121])
    v = [ell_valuation(x, cyclotomic_embedding(5, 11, k)) for k in (6, 10, 14)]
    assert v[0] == v[1] == v[2]


def _int_vl(q: Fraction, ell: int) -> int:
    return sym_factorint(abs(q.numerator)).get(ell, 0) - sym_factorint(q.denominator).get(ell, 0)


@settings(max_examples=50, deadline=None)
@given(st.sampled_from([(5, 11), (9, 7), (12, 5), (7, 13), (15, 7)]), st.data())
def test_multiplicative_and_galois_sum(case, data):
    m, ell = case
    emb = cyclotomic_embedding(m, ell, 12)
    x = data.draw(cyc_elements(m))
    y = data.draw(cyc_elements(m))
    if x.is_zero() or y.is_zero():
        return
    assert ell_valuation(x * y, emb) == ell_valuation(x, emb) + ell_valuation(y, emb)
    from math import gcd
    tot = sum(ell_valuation(x.galois(a), emb) for a in range(1, m) if gcd(a, m) == 1)
    assert tot == _int_vl(x.norm(), ell)


# ---------------------------------------------------------------- congruence utility

def test_power_residue_examples():
    r = padic_power_residue(9, 3, 1)
    assert (1 + 9) ** 3 == 1000
    assert (1000 - 28) % 243 == 0
    assert r.holds
    r2 = padic_power_residue(8, 2, 2)
    assert ((1 + 8) ** 4 - (1 + 4 * 8)) % (64 * 2) == 0
    assert r2.holds
    r3 = padic_power_residue(3**30, 3, 2, precision=40)
    assert r3.holds and r3.lhs_minus_rhs_valuation >= 40


@settings(max_examples=50, deadline=None)
@given(st.sampled_from([3, 5, 7]), st.integers(2, 5), st.integers(1, 3), st.integers(1, 20))
def test_power_residue_congruence(p, e, k, u):
    if u % p == 0:
        u += 1
    assert padic_power_residue(u * p**e, p, k).holds
