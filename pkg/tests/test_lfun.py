import cmath
import math
from fractions import Fraction
from math import gcd

import mpmath
import pytest

from cmtheta.cyclotomic import CyclotomicElement
from cmtheta.lfun import (
    ErrorBudgetExceeded,
    conductor_arith,
    dirichlet_characters,
    gauss_abs_squared_exact,
    gauss_sum,
    l_value,
    parity_prediction,
    primitive_characters,
    quadratic_character,
    root_number,
    root_number_direct,
)
from cmtheta.quadfield import (
    HeckeCharacter,
    ImagQuadField,
    all_characters,
    characters_of_exact_conductor,
    ring_class_group,
)


def test_unramified_gauss_sum_is_one():
    assert gauss_sum(None).value == 1


def test_quadratic_gauss_sum_square():
    for p in (3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47):
        chi = quadratic_character(p)
        direct = sum(cmath.exp(2j * math.pi * (x * x) / p) for x in range(p))
        g = gauss_sum(chi).value
        assert abs(g - direct) < 1e-9
        eps = 1 if p % 4 == 1 else -1
        assert abs(g * g - eps * p) < 1e-8


def test_gauss_sum_of_conjugate():
    for N in (5, 7, 9, 13):
        for chi in primitive_characters(N):
            g1 = gauss_sum(chi).value
            g2 = gauss_sum(chi.conj()).value
            assert abs(g1 * g2 - chi.value_at_minus_one * N) < 1e-8


def test_gauss_modulus_law_exact():
    for N in range(3, 201):
        if N % 4 == 2:
            continue  # no primitive characters
        for chi in primitive_characters(N):
            assert gauss_abs_squared_exact(chi) == N


def test_character_counts():
    from cmtheta.numtheory import euler_phi
    for N in (5, 8, 12, 15, 16):
        assert len(dirichlet_characters(N)) == euler_phi(N)


def test_root_number_of_canonical_character():
    # eps(lambda) = (2|p)
    assert root_number(HeckeCharacter(ImagQuadField(-7))) == 1
    assert root_number(HeckeCharacter(ImagQuadField(-11))) == -1
    assert root_number(HeckeCharacter(ImagQuadField(-19))) == -1
    assert root_number(HeckeCharacter(ImagQuadField(-43))) == -1


def test_root_number_routes_agree():
    for D, p, ns in ((-7, 3, (1, 2)), (-7, 5, (1,)), (-11, 3, (1, 2)), (-19, 3, (1,)), (-7, 11, (1,))):
        K = ImagQuadField(D)
        lam = HeckeCharacter(K)
        for n in ns:
            for chi in characters_of_exact_conductor(K, 1, p, n):
                a = root_number(lam, chi)
                d = root_number_direct(lam, chi)
                assert abs(d - a) < 1e-8


def test_root_number_composite_conductor():
    K = ImagQuadField(-11)
    lam = HeckeCharacter(K)
    chi0 = next(c for c in all_characters(ring_class_group(K, 2)) if c.conductor() == 2)
    G = ring_class_group(K, 6)
    for nu in characters_of_exact_conductor(K, 1, 3, 1):
        psi = chi0.pullback(G) * nu.pullback(G)
        assert abs(root_number_direct(lam, psi) - root_number(lam, psi)) < 1e-8


def test_root_number_of_conductor_twist():
    # eps(lambda chi0) = eps(lambda) eta(c) for chi0 of conductor c prime to D
    K = ImagQuadField(-11)
    lam = HeckeCharacter(K)
    chi0 = next(c for c in all_characters(ring_class_group(K, 2)) if c.conductor() == 2)
    assert root_number(lam, chi0) == root_number(lam) * K.eta(2)


def test_inert_parity_alternates():
    K = ImagQuadField(-7)
    lam = HeckeCharacter(K)
    for n in range(1, 5):
        for nu in characters_of_exact_conductor(K, 1, 3, n):
            s = nu.value(nu.group.class_of_sqrt_d())
            assert root_number(lam, nu) == (-1) ** n * (1 if s == 1 else -1) * root_number(lam)
            assert parity_prediction(lam, nu, n) == root_number(lam, nu)


def test_split_parity_is_constant():
    for D, p, ns in ((-11, 3, (1, 2, 3)), (-7, 11, (1,))):
        K = ImagQuadField(D)
        assert K.splitting(p) == "split"
        lam = HeckeCharacter(K)
        for n in ns:
            for nu in characters_of_exact_conductor(K, 1, p, n):
                s = nu.value(nu.group.class_of_sqrt_d())
                assert root_number(lam, nu) == (1 if s == 1 else -1) * root_number(lam)


def test_conductor_arithmetic():
    K = ImagQuadField(-7)
    lam = HeckeCharacter(K)
    c = conductor_arith(lam)
    assert (c.level, c.split_part, c.nonsplit_part) == (49, 1, 49)
    c2 = conductor_arith(lam, 2)
    assert (c2.level, c2.split_part) == (196, 4)
    assert conductor_arith(lam, 1) == c


# ---------------------------------------------------------------- L-values

def _oracle(lam: HeckeCharacter, chi, dps: int = 30):
    """L(1) as 2 pi / sqrt(M) times the integral over [1, oo) of f(iy) + W conj-f(iy), by quadrature."""
    K = lam.K
    psi = HeckeCharacter(K, chi) if chi is not None else lam
    m = 1 if chi is None or chi.is_trivial() else chi.conductor()
    M = lam.p**2 * m * m
    W = root_number(lam, chi)
    sq = math.sqrt(M)
    bound = int(60 * sq / (2 * math.pi)) + 10
    terms = []
    for x, n in K.elements_up_to_norm(bound):
        if gcd(n, lam.p * m) != 1:
            continue
        terms.append((n, psi.complex_value(x)))
    mpmath.mp.dps = dps
    c = 2 * mpmath.pi / mpmath.sqrt(M)

    def f(y):
        s = mpmath.mpc(0)
        for n, a in terms:
            e = mpmath.exp(-c * n * y)
            s += (mpmath.mpc(a) + W * mpmath.mpc(a).conjugate()) * e
        return s

    val = mpmath.quad(f, [1, 2, 4, mpmath.inf]) * c
    return complex(val)


@pytest.mark.parametrize("case", [(-7, None), (-11, None), (-19, None), (-7, (3, 1, 0)), (-7, (3, 1, 2)),
                                  (-7, (3, 2, 1)), (-11, (3, 1, 0)), (-7, (5, 1, 3))])
def test_l_value_interval_contains_quadrature(case):
    D, desc = case
    K = ImagQuadField(D)
    lam = HeckeCharacter(K)
    chi = None
    if desc is not None:
        p, n, k = desc
        chi = characters_of_exact_conductor(K, 1, p, n)[k]
    res = l_value(lam, chi, abs_err=1e-10)
    true = _oracle(lam, chi)
    assert abs(true - res.value) <= res.radius + 1e-15
    assert res.radius <= 1e-10
    assert res.residual < 1e-8
    assert abs(res.analytic_root_number - res.root_number) < 1e-6


def test_l_values_are_real_and_conjugation_symmetric():
    K = ImagQuadField(-7)
    lam = HeckeCharacter(K)
    for chi in characters_of_exact_conductor(K, 1, 3, 2):
        res = l_value(lam, chi, abs_err=1e-10)
        assert abs(res.value.imag) <= res.radius + 1e-12


def test_wrong_parity_l_values_vanish():
    K = ImagQuadField(-7)
    lam = HeckeCharacter(K)
    seen = 0
    for chi in characters_of_exact_conductor(K, 1, 3, 3):
        if root_number(lam, chi) == -1:
            res = l_value(lam, chi, abs_err=1e-10)
            assert abs(res.value) <= res.radius + 1e-10
            seen += 1
    assert seen > 0


def test_cutoff_stability():
    K = ImagQuadField(-11)
    lam = HeckeCharacter(K)
    a = l_value(lam, abs_err=1e-6)
    b = l_value(lam, abs_err=1e-11)
    assert abs(a.value - b.value) <= a.radius + b.radius


def test_error_budget():
    K = ImagQuadField(-7)
    lam = HeckeCharacter(K)
    chi = characters_of_exact_conductor(K, 1, 3, 3)[0]
    with pytest.raises(ErrorBudgetExceeded):
        l_value(lam, chi, abs_err=1e-12, ceiling=100)
