import itertools
from fractions import Fraction

from hypothesis import given, settings, strategies as st
from sympy import Matrix

from cmtheta.lattice import count_values, hnf, lll_gram, short_vectors


def _brute(G, bound, shift, box):
    n = len(G)
    out = []
    for x in itertools.product(range(-box, box + 1), repeat=n):
        v = [Fraction(a) + (shift[i] if shift else 0) for i, a in enumerate(x)]
        val = sum(v[i] * G[i][j] * v[j] for i in range(n) for j in range(n))
        if val <= bound and (shift or any(x)):
            out.append((x, val))
    return sorted(out, key=lambda t: (t[1], t[0]))


def test_hnf_is_triangular_and_same_lattice():
    rows = [[4, 6, 2], [2, 3, 7], [8, 1, 1]]
    H = hnf(rows)
    assert all(H[i][j] == 0 for i in range(len(H)) for j in range(i))
    assert abs(Matrix(H).det()) == abs(Matrix(rows).det())


def test_lll_preserves_determinant():
    G = [[10, 7, 3], [7, 10, 4], [3, 4, 9]]
    Gr, U = lll_gram(G)
    assert Matrix(Gr).det() == Matrix(G).det()
    assert abs(Matrix(U).det()) == 1
    assert Matrix(U) * Matrix(G) * Matrix(U).T == Matrix(Gr)


def test_short_vectors_of_a2():
    G = [[2, -1], [-1, 2]]
    vs = short_vectors(G, 2)
    assert len(vs) == 6


def test_theta_counts_of_z4():
    # sum of four squares with form x G x^T / 2, G = 2 I: r_4(n) = 8 sigma(n) - 32 sigma(n/4)
    G = [[2 if i == j else 0 for j in range(4)] for i in range(4)]
    counts = count_values(G, 6)
    assert counts == (8, 24, 32, 24, 48, 96)


@settings(max_examples=30, deadline=None)
@given(st.lists(st.integers(-2, 2), min_size=3, max_size=3),
       st.lists(st.fractions(min_value=-1, max_value=1, max_denominator=4), min_size=3, max_size=3),
       st.integers(4, 12))
def test_shifted_enumeration_matches_brute_force(offdiag, shift, bound):
    a, b, c = offdiag
    G = [[6, a, b], [a, 6, c], [b, c, 6]]
    if Matrix(G).det() <= 0 or any(Matrix(G)[:k, :k].det() <= 0 for k in (1, 2)):
        return
    got = short_vectors(G, bound, shift=shift)
    assert got == _brute(G, bound, shift, 4)


@settings(max_examples=30, deadline=None)
@given(st.lists(st.integers(-3, 3), min_size=3, max_size=3), st.integers(3, 20))
def test_unshifted_enumeration_matches_brute_force(offdiag, bound):
    a, b, c = offdiag
    G = [[7, a, b], [a, 7, c], [b, c, 7]]
    if any(Matrix(G)[:k, :k].det() <= 0 for k in (1, 2, 3)):
        return
    assert short_vectors(G, bound) == _brute(G, bound, None, 4)
