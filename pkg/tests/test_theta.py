import cmath
from math import gcd

import pytest

from conftest import shimura
from cmtheta.cache import Cache
from cmtheta.cmform import cm_eigenvector
from cmtheta.config import default_config
from cmtheta.elladic import INFINITE
from cmtheta.grosspoints import base_ideal, build_family
from cmtheta.quadfield import HeckeCharacter, ImagQuadField, RingClassCharacter, all_characters, characters_of_exact_conductor, ring_class_group
from cmtheta.theta import (
    Lab,
    WrongLevel,
    ell_adic_valuation,
    rebase_offset,
    theta_element,
    value_hash,
)


def _inst(name):
    return next(i for i in default_config().instances if i.name == name)


@pytest.fixture(scope="module")
def lab7():
    return Lab(_inst("d7p3"))


def _direct(th, nu):
    nu = th.on_group(nu)
    return sum(cmath.exp(2j * cmath.pi * nu.exp(a) / nu.N) * th.coefficient(a).to_complex() for a in range(th.group.order))


def test_specialization_matches_direct_sum(lab7):
    th = lab7.theta(2)
    for nu in all_characters(th.group):
        assert abs(th.specialize(nu).to_complex() - _direct(th, nu)) < 1e-8


def test_fourier_inversion(lab7):
    for n in (1, 2):
        assert lab7.theta(n).fourier_inversion_holds()


def test_odd_levels_vanish_for_d7(lab7):
    # every Gross point of conductor 3^n lies on the (-1)^n component, where f vanishes
    assert lab7.theta(1).is_zero()
    assert lab7.theta(3).is_zero()
    assert not lab7.theta(2).is_zero()


def test_scaling_and_galois_equivariance(lab7):
    th = lab7.theta(2)
    for nu in all_characters(th.group)[:8]:
        z = th.specialize(nu)
        assert th.scaled(5).specialize(nu) == z * 5
        for k in range(1, nu.N):
            if gcd(k, nu.N) == 1:
                assert th.specialize(RingClassCharacter(nu.group, (k * nu.table) % nu.N, nu.N)) == z.galois(k)


def test_rebasing_is_a_translation():
    X = shimura(-7)
    K = ImagQuadField(-7)
    f = cm_eigenvector(X, HeckeCharacter(K))
    fams = [build_family(X, 9, base=base_ideal(X, 9, choice=c)) for c in (0, 1)]
    th1, th2 = (theta_element(f, fam) for fam in fams)
    t = rebase_offset(th1, th2)
    assert t is not None
    assert th1.translated(t).weights == th2.weights
    for nu in all_characters(th1.group):
        z1, z2 = th1.specialize(nu), th2.specialize(nu)
        # nu(Theta') = nu(t)^-1 nu(Theta)
        assert z2 == z1 * nu.value(t).conj()
        assert ell_adic_valuation(z1, 11) == ell_adic_valuation(z2, 11)


def test_inversion_symmetry(lab7):
    th = lab7.theta(2)
    t, s = th.inversion_symmetry()
    G = th.group
    assert all(th.weights[G.inv(a)] == s * th.weights[G.mul(a, t)] for a in range(G.order))


def test_wrong_level(lab7):
    th = lab7.theta(1)
    nu = characters_of_exact_conductor(lab7.K, 1, 3, 2)[0]
    with pytest.raises(WrongLevel):
        th.specialize(nu)
    other = ring_class_group(ImagQuadField(-11), 3)
    with pytest.raises(WrongLevel):
        th.on_group(all_characters(other)[1])


def test_lower_level_characters_pull_back(lab7):
    th = lab7.theta(2)
    nu = characters_of_exact_conductor(lab7.K, 1, 3, 1)[0]
    assert abs(th.specialize(nu).to_complex() - _direct(th, nu)) < 1e-8


def test_zero_valuation_is_infinite():
    from cmtheta.cyclotomic import CyclotomicElement
    assert ell_adic_valuation(CyclotomicElement.zero(3), 11) == INFINITE
    assert value_hash(CyclotomicElement.zero(3)) == value_hash(CyclotomicElement.zero(3))


def test_wrong_parity_characters_vanish(lab7):
    from cmtheta.lfun import root_number
    for n in (1, 2):
        th = lab7.theta(n)
        for nu in lab7.level_characters(n):
            if root_number(lab7.lam, lab7.twist(nu)) == -1:
                assert th.specialize(nu).is_zero()


def test_predicted_sign_matches_gauss_route(lab7):
    from cmtheta.lfun import root_number
    for n in (1, 2, 3):
        for _, nu in lab7.family_characters(n):
            assert root_number(lab7.lam, lab7.twist(nu)) == lab7.predicted_sign(nu, n)


def test_twisted_instance_has_chi0():
    lab = Lab(_inst("d11c2p3"))
    assert lab.chi0 is not None and lab.chi0.conductor() == 2
    th = lab.theta(1)
    assert th.m == 6
    assert th.fourier_inversion_holds()


def test_lab_cache_round_trip(tmp_path):
    inst = _inst("d7p3")
    cold = Lab(inst, Cache(tmp_path))
    w_cold = cold.theta_weights(2)
    e_cold = cold.eigenform()
    assert cold.cache.misses == 2
    warm = Lab(inst, Cache(tmp_path))
    assert warm.eigenform() == e_cold
    assert warm.theta_weights(2) == w_cold
    assert warm.cache.hits == 2 and warm.cache.misses == 0
    assert warm.provenance() == cold.provenance()
