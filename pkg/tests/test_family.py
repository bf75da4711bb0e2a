import cmath
import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cmtheta.family import (
    BoundExceeded,
    abstract_conductor_exponent,
    ave1_identity_check,
    character_sums,
    fibers_galois_uniform,
    finite_field_trace_check,
    galois_orbit,
    group_elements,
    partition_fibers,
    surjective_characters,
    tower_fibers,
)
from cmtheta.quadfield import ImagQuadField, characters_of_exact_conductor


def test_surjective_counts_examples():
    assert len(surjective_characters(3, 1, 1)) == 2
    assert len(surjective_characters(3, 1, 2)) == 8
    assert len(surjective_characters(3, 2, 1)) == 6


def test_surjective_counts_by_image_enumeration():
    # a character is surjective iff some value is a primitive p^a-th root
    for p, a, d in ((3, 1, 3), (3, 2, 2), (5, 1, 2), (5, 2, 1)):
        q = p**a
        G = group_elements(p, a, d)
        brute = 0
        for k in G:
            image = {int(k @ x) % q for x in G}
            if len(image) == q:
                brute += 1
        fam = surjective_characters(p, a, d)
        assert len(fam) == brute == fam.expected_count


def test_bound():
    with pytest.raises(BoundExceeded):
        surjective_characters(5, 3, 3, bound=1000)


def _lhs_brute(p, a, d, h):
    q = p**a
    G = group_elements(p, a, d)
    idx = {tuple(x): i for i, x in enumerate(G.tolist())}
    out = np.zeros(len(G), dtype=complex)
    for k in surjective_characters(p, a, d).characters:
        k = np.array(k)
        for i, x in enumerate(G):
            s = 0j
            for w in G:
                s += cmath.exp(2j * cmath.pi * int(k @ w) / q) * h[idx[tuple(((x + w) % q).tolist())]]
            out[i] += s
    return out


def _rhs_brute(p, a, d, h):
    q = p**a
    G = group_elements(p, a, d)
    idx = {tuple(x): i for i, x in enumerate(G.tolist())}
    tors = [np.array(t) * p ** (a - 1) for t in itertools.product(range(p), repeat=d)]
    out = np.zeros(len(G))
    for i, x in enumerate(G):
        out[i] = p ** (a * d) * h[i] - p ** ((a - 1) * d) * sum(h[idx[tuple(((x + w) % q).tolist())]] for w in tors)
    return out


@pytest.mark.parametrize("p,a,d", [(3, 1, 1), (3, 2, 1), (3, 1, 2), (5, 1, 1)])
def test_ave1_against_direct_double_sum(p, a, d):
    rng = np.random.default_rng(7)
    h = rng.integers(-20, 21, size=p ** (a * d))
    lhs = _lhs_brute(p, a, d, h)
    rhs = _rhs_brute(p, a, d, h)
    assert np.allclose(lhs, rhs, atol=1e-8)
    assert ave1_identity_check(p, a, d, h).residual == 0


def test_ave1_constant_and_delta():
    for p, a, d in ((3, 1, 2), (3, 2, 2), (5, 2, 1)):
        n = p ** (a * d)
        one = np.ones(n, dtype=np.int64)
        r = ave1_identity_check(p, a, d, one)
        assert r.residual == 0
        assert not r.rhs.any()
        delta = np.zeros(n, dtype=np.int64)
        delta[0] = 1
        assert ave1_identity_check(p, a, d, delta).residual == 0


def test_character_sums_are_ramanujan_like():
    # S(0) counts the family
    for p, a, d in ((3, 1, 2), (3, 2, 1), (5, 1, 2)):
        S = character_sums(p, a, d)
        assert S[0, 0] == surjective_characters(p, a, d).expected_count
        assert not S[0, 1:].any()


@settings(max_examples=25, deadline=None)
@given(st.sampled_from([(3, 1, 1), (3, 1, 2), (3, 2, 1), (3, 2, 2), (5, 1, 1), (5, 1, 2), (5, 2, 1)]), st.data())
def test_ave1_random_integer_functions(params, data):
    p, a, d = params
    n = p ** (a * d)
    h = np.array(data.draw(st.lists(st.integers(-1000, 1000), min_size=n, max_size=n)), dtype=np.int64)
    assert ave1_identity_check(p, a, d, h).residual == 0


def test_fibers_rank_one():
    p, N, a = 3, 3, 2
    chars = [(k,) for k in range(p**N)]
    fib = partition_fibers(chars, p, N, a)
    assert len(fib) == p**a - p ** (a - 1)
    covered = sorted(k for ks in fib.values() for k in ks)
    assert covered == sorted(c for c in chars if abstract_conductor_exponent(c, p, N) >= a)
    assert fibers_galois_uniform(fib, p, a)


def test_fibers_rank_two_uniform():
    p, N, a = 3, 2, 1
    chars = [tuple(k) for k in itertools.product(range(p**N), repeat=2)]
    fib = partition_fibers(chars, p, N, a)
    assert fibers_galois_uniform(fib, p, a)
    assert all(len(galois_orbit(mu, p, a)) == p - 1 for mu in fib)


def test_tower_fibers_of_ring_class_characters():
    K = ImagQuadField(-7)
    for p, n, a in ((3, 3, 1), (3, 3, 2), (5, 2, 1)):
        chars = characters_of_exact_conductor(K, 1, p, n)
        fib = tower_fibers(chars, K, p, n, a)
        assert sum(len(v) for v in fib.values()) == len(chars)
        # exact conductor p^n: the kernel of G_{p^n} -> G_{p^(n-1)} is never killed
        assert 0 not in fib or a > 1
        sizes = {}
        for e, idx in fib.items():
            sizes.setdefault(frozenset((s * e) % p**a for s in range(1, p**a) if s % p), set()).add(len(idx))
        assert all(len(v) == 1 for v in sizes.values())


@pytest.mark.parametrize("ell,p,s", [(2, 3, 2), (7, 3, 2), (11, 5, 1), (2, 5, 2), (13, 3, 3), (7, 5, 2)])
def test_trace_vanishing_over_finite_fields(ell, p, s):
    r = finite_field_trace_check(ell, p, s)
    assert r.failures == ()
    assert r.degree % r.base_degree == 0
