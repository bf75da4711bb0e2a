from fractions import Fraction

import numpy as np
import pytest
from sympy import primerange

from cmtheta.quadfield import HeckeCharacter, ImagQuadField
from cmtheta.quatalg import (
    IllDefinedSign,
    QuaternionAlgebra,
    algebra_for,
    brandt_by_neighbors,
    brandt_matrix,
    eichler_mass,
    hilbert_symbol,
    local_shapes,
    maximal_order,
    neighbors,
    order_of_level,
    right_ideal_classes,
    special_order,
    torsion_unit_orders,
    unit_ideal,
)

from conftest import brandt, shimura


def test_hilbert_symbol_examples():
    for b in (-7, 3, 5, -1, 12):
        for p in (2, 3, 5, 7, "inf"):
            assert hilbert_symbol(1, b, p) == 1
    assert hilbert_symbol(-1, -7, 7) == -1
    assert hilbert_symbol(-1, -1, "inf") == -1


def test_hilbert_product_formula():
    for a in (-1, -2, -3, -7, 5, 6, -11, 10):
        for b in (-1, -5, 3, -7, 14, -19):
            places = list(primerange(2, 60)) + ["inf"]
            prod = 1
            for v in places:
                prod *= hilbert_symbol(a, b, v)
            assert prod == 1


def test_algebra_ramification():
    for D, p in ((-7, 7), (-11, 11), (-19, 19), (-43, 43)):
        B = algebra_for(ImagQuadField(D))
        assert set(B.ramified_places()) == {p, "inf"}
        assert len(B.ramified_places()) % 2 == 0


def test_definite_algebra_requires_negative_beta():
    with pytest.raises(ValueError):
        QuaternionAlgebra(ImagQuadField(-7), 3)


def test_multiplication_is_associative_and_norm_multiplicative():
    B = algebra_for(ImagQuadField(-11))
    rng = np.random.default_rng(1)
    for _ in range(200):
        x, y, z = (tuple(int(v) for v in rng.integers(-5, 6, 4)) for _ in range(3))
        assert B.mul(B.mul(x, y), z) == B.mul(x, B.mul(y, z))
        assert B.nrd(B.mul(x, y)) == B.nrd(x) * B.nrd(y)
        assert B.mul(x, B.conj(x)) == (B.nrd(x), 0, 0, 0)


def test_special_order_discriminant_and_shape():
    for D in (-7, -11, -19):
        K = ImagQuadField(D)
        R = special_order(algebra_for(K), HeckeCharacter(K))
        assert R.reduced_discriminant == D * D
        assert R.is_closed()
        assert R.k_conductor() == 1
        assert [(s.prime, s.kind, s.exponent) for s in local_shapes(R)] == [(-D, "ramified", 2)]


def test_maximal_order_class_list():
    B = algebra_for(ImagQuadField(-7))
    R = maximal_order(B)
    assert R.reduced_discriminant == 7
    # signs are ill defined on the maximal order: its unit norms leave N(K_7^x)
    with pytest.raises(IllDefinedSign):
        right_ideal_classes(R)
    X = right_ideal_classes(R, with_signs=False)
    assert len(X) == 1
    assert X.mass_sum() == Fraction(1, 2) == X.mass


# (D, f, at_p) -> mass, by hand from (1/12)(p - 1) times local unit indices
MASSES = {
    (-7, 1, False): Fraction(1, 2),
    (-7, 1, True): Fraction(4),
    (-7, 3, False): Fraction(3),   # 3 inert: 3 * 2
    (-7, 2, False): Fraction(3),   # 2 split, Eichler level 4: 4 * 3/2
    (-11, 1, True): Fraction(10),
    (-11, 2, False): Fraction(5, 3),  # 2 inert: 2 * 1
    (-19, 1, True): Fraction(30),
}


@pytest.mark.parametrize("key", sorted(MASSES))
def test_mass_formula(key):
    D, f, at_p = key
    B = algebra_for(ImagQuadField(D))
    R = order_of_level(B, f, at_p=at_p)
    m = eichler_mass(B, local_shapes(R))
    assert m == MASSES[key]
    X = right_ideal_classes(R, with_signs=at_p)
    assert X.mass_sum() == m


def test_class_counts_and_weights():
    assert [len(shimura(D)) for D in (-7, -11, -19)] == [4, 10, 30]
    for D in (-7, -11, -19):
        X = shimura(D)
        assert all(12 % w == 0 for w in X.weights)
        assert X.signs[X.principal] == 1


def test_weights_from_torsion_units():
    B = algebra_for(ImagQuadField(-11))
    R = order_of_level(B, 2, at_p=False)
    X = right_ideal_classes(R, with_signs=False)
    for I, w in zip(X.ideals, X.weights):
        orders = torsion_unit_orders(I.left_order)
        assert len(orders) == 2 * w
        assert all(12 % k == 0 for k in orders)


def test_classes_are_pairwise_inequivalent():
    X = shimura(-11)
    for i, I in enumerate(X.ideals):
        assert X.identify(I) == i


def test_neighbors_of_principal_have_sign_eta():
    X = shimura(-7)
    K = ImagQuadField(-7)
    I0 = unit_ideal(X.order)
    for q in (2, 3, 5):
        for J in neighbors(I0, q):
            assert X.signs[X.identify(J)] == K.eta(q)


def test_sign_blocks():
    assert sorted(shimura(-7).signs) == [-1, -1, 1, 1]
    X = shimura(-19)
    assert len(X.component(1)) + len(X.component(-1)) == 30


def test_brandt_routes_agree():
    for D in (-7, -11):
        X = shimura(D)
        M = brandt(D, 13)
        for q in (2, 3, 5, 13):
            assert (brandt_by_neighbors(X, q) == M[q]).all()


def test_brandt_row_sums_and_symmetry():
    X = shimura(-11)
    for q in (2, 3, 5, 7):
        T = brandt_matrix(X, q)
        assert T.row_sums() == [q + 1] * len(X)
        assert T.is_weighted_symmetric()


def test_brandt_sign_equivariance():
    for D in (-7, -11):
        X = shimura(D)
        K = ImagQuadField(D)
        M = brandt(D, 30)
        for q in primerange(2, 30):
            if q == -D:
                continue
            for i in range(len(X)):
                for j in range(len(X)):
                    if M[q][i, j]:
                        assert X.signs[i] * X.signs[j] == K.eta(q)


def test_w_is_an_involution_commuting_with_brandt():
    X = shimura(-19)
    W = X.w_permutation
    assert [W[W[i]] for i in range(len(X))] == list(range(len(X)))
    h = len(X)
    P = np.zeros((h, h), dtype=object)
    for i in range(h):
        P[i, W[i]] = 1
    M = brandt(-19, 7)
    for q in (2, 3, 5, 7):
        assert (P.dot(M[q]) == M[q].dot(P)).all()


def test_weighted_pairing_positive():
    X = shimura(-7)
    assert all(w > 0 for w in X.weights)
