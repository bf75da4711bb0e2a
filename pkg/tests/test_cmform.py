from fractions import Fraction
from math import gcd

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from sympy import primerange

from cmtheta.cmform import (
    CMEigenform,
    EigenspaceDim,
    binary_theta_coefficients,
    check_ell_optimal,
    cm_eigenvector,
    component_support,
    hecke_apply,
    inner_product,
    normalize,
    support_sign,
)
from cmtheta.cyclotomic import CyclotomicElement
from cmtheta.lfun import root_number
from cmtheta.polyspace import (
    OddWeight,
    PolySpace,
    basis_pairing,
    pairing_matrix,
    poly_pairing,
    rho_action,
)
from cmtheta.quadfield import HeckeCharacter, ImagQuadField, quad_to_cyclotomic

from conftest import brandt, shimura


def _form(D):
    return cm_eigenvector(shimura(D), HeckeCharacter(ImagQuadField(D)), brandt=brandt(D, 50))


def exact_theta_coefficient(lam: HeckeCharacter, n: int) -> CyclotomicElement:
    """sum of lambda(a) over ideals of norm n, one generator per ideal."""
    K = lam.K
    tot = CyclotomicElement.zero(1)
    for x in K.elements_of_norm(n):
        z, el = lam.value(x)
        tot = tot + z * quad_to_cyclotomic(K, el)
    return tot


def test_d7_eigenform():
    f = _form(-7)
    assert f.integer_coords() == [1, 0, 0, -1]


def test_eigenvalues_match_theta_series():
    for D in (-7, -11):
        X = shimura(D)
        lam = HeckeCharacter(ImagQuadField(D))
        f = _form(D)
        M = brandt(D, 50)
        c = [Fraction(v) for v in f.integer_coords()]
        i0 = next(i for i, v in enumerate(c) if v)
        for q in primerange(2, 30):
            if q == -D:
                continue
            Tf = hecke_apply(M[q], c)
            a = Tf[i0] / c[i0]
            assert Tf == [a * v for v in c]
            assert exact_theta_coefficient(lam, q) == a
            if ImagQuadField(D).splitting(q) == "inert":
                assert a == 0


def test_theta_coefficients_floating_agree_with_exact():
    lam = HeckeCharacter(ImagQuadField(-11))
    approx = binary_theta_coefficients(lam, 60)
    for n in range(1, 61):
        if n % 11 == 0:
            continue
        assert abs(approx[n - 1] - exact_theta_coefficient(lam, n).to_complex()) < 1e-9


def test_hecke_alone_leaves_a_plane():
    X = shimura(-19)
    lam = HeckeCharacter(ImagQuadField(-19))
    with pytest.raises(EigenspaceDim) as err:
        cm_eigenvector(X, lam, use_w=False, brandt=brandt(-19, 50))
    assert err.value.dim == 2


def test_support_matches_root_number():
    for D in (-7, -11, -19):
        X = shimura(D)
        lam = HeckeCharacter(ImagQuadField(D))
        f = cm_eigenvector(X, lam, brandt=brandt(D, 50))
        assert support_sign(f, X) == root_number(lam)
        assert component_support(f, X) == ("+" if root_number(lam) == 1 else "-")


def test_zero_vector_has_no_support():
    X = shimura(-7)
    z = CMEigenform([Fraction(0)] * 4, {}, None, None, None)
    assert component_support(z, X) == "none"


def test_normalization_is_idempotent_up_to_units():
    f = _form(-11)
    g = normalize(f.scaled(Fraction(-14, 3)), 7)
    assert g.integer_coords() == f.integer_coords()
    assert check_ell_optimal(g, 7)
    assert check_ell_optimal(f, 5)


def test_inner_product():
    X = shimura(-7)
    f = _form(-7)
    ip = inner_product(f, f, X)
    assert ip == sum(Fraction(c * c, w) for c, w in zip(f.integer_coords(), X.weights))
    assert ip > 0
    g = f.scaled(3)
    assert inner_product(g, g, X) == 9 * ip


# ---------------------------------------------------------------- polynomial module

def test_rho_identity_and_weight_two():
    P = PolySpace.from_coeffs(6, [1, -2, 3, 0, 5])
    assert rho_action(6, [[1, 0], [0, 1]], P) == P
    one = PolySpace.from_coeffs(2, [7])
    assert rho_action(2, [[3, 1], [5, 2]], one) == one


def test_rho_diagonal_example():
    # h = 4, gamma = diag(2, 1): P = XY -> det^-1 (2X)(Y) = XY
    P = PolySpace.basis_vector(4, 0)
    Q = rho_action(4, [[2, 0], [0, 1]], P)
    assert Q == P
    assert Q.evaluate(Fraction(3), Fraction(5)) == Fraction(1, 2) * P.evaluate(6, 5)


def test_odd_weight_rejected():
    with pytest.raises(OddWeight):
        PolySpace.from_coeffs(3, [1, 2])


mats = st.lists(st.integers(-4, 4), min_size=4, max_size=4).filter(lambda m: m[0] * m[3] - m[1] * m[2] != 0)


@settings(max_examples=40, deadline=None)
@given(mats, mats, st.lists(st.integers(-5, 5), min_size=5, max_size=5))
def test_rho_is_an_action(g1, g2, coeffs):
    A = [[g1[0], g1[1]], [g1[2], g1[3]]]
    B = [[g2[0], g2[1]], [g2[2], g2[3]]]
    AB = (np.array(A, dtype=object).dot(np.array(B, dtype=object))).tolist()
    P = PolySpace.from_coeffs(6, coeffs)
    assert rho_action(6, AB, P) == rho_action(6, A, rho_action(6, B, P))


def test_pairing_values():
    assert basis_pairing(2, 0, 0) == 1
    assert basis_pairing(4, 1, -1) == 1
    assert basis_pairing(4, 0, 0) == Fraction(-1, 2)
    for h in (4, 6, 8):
        k = (h - 2) // 2
        for i in range(-k, k + 1):
            for j in range(-k, k + 1):
                if i != -j:
                    assert basis_pairing(h, i, j) == 0
    M = pairing_matrix(8)
    from sympy import Matrix
    assert Matrix(M).det() != 0


def test_pairing_is_alternating_or_symmetric():
    for h in (4, 6, 8):
        k = (h - 2) // 2
        for i in range(-k, k + 1):
            assert basis_pairing(h, i, -i) == (-1) ** (h - 2) * basis_pairing(h, -i, i)
