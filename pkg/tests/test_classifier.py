import random
from fractions import Fraction

import pytest

from qhmpic.classifier import KClass, QhmSpec, VerdictKind, bimodule_of, iso_check, k_class
from qhmpic.cp_calculus import translation_state, verify_certificate
from qhmpic.orbit import maps_to

F = Fraction
S = QhmSpec.of


def test_bimodule_of_doubles_parameters():
    assert bimodule_of(S(1, 0, 0)) == translation_state(1, 0, 0)
    assert bimodule_of(S(2, F(1, 3), 0)) == translation_state(2, F(2, 3), 0)
    assert bimodule_of(S(1, F(1, 2), 0)) == translation_state(1, 0, 0)


def test_k_class():
    assert k_class(S(1, 0, 0)) == KClass(3, 1)
    assert k_class(S(5, F(1, 3), 0)) == KClass(3, 5)


def test_invalid_spec():
    with pytest.raises(ValueError):
        S(0, 0, 0)


def test_different_c_not_isomorphic():
    v = iso_check(S(1, 0, 0), S(2, 0, 0))
    assert v.kind is VerdictKind.NOT_ISOMORPHIC and v.exit_code == 1


def test_swapped_parameters_isomorphic():
    rng = random.Random(0)
    for _ in range(30):
        q = rng.randint(2, 10)
        mu, nu = F(rng.randrange(q), q), F(rng.randrange(q), q)
        v = iso_check(S(3, mu, nu), S(3, nu, mu))
        assert v.kind is VerdictKind.ISOMORPHIC
        assert maps_to(v.orbit_witness.sigma, S(3, mu, nu).parameters, S(3, nu, mu).parameters)
        assert verify_certificate(v.certificate)


def test_fifths_isomorphic():
    v = iso_check(S(1, F(1, 5), 0), S(1, F(2, 5), 0))
    assert v.kind is VerdictKind.ISOMORPHIC and v.exit_code == 0
    assert verify_certificate(v.certificate)


def test_equal_bimodules_without_orbit_witness():
    v = iso_check(S(1, 0, 0), S(1, F(1, 2), 0))
    assert v.kind is VerdictKind.ISOMORPHIC
    assert v.orbit_witness is None and v.certificate.steps == ()


def test_unknown_is_not_a_negative():
    # same c, parameters of different order after doubling: no certificate
    v = iso_check(S(1, F(1, 3), 0), S(1, F(1, 4), 0))
    assert v.kind is VerdictKind.UNKNOWN and v.exit_code == 2


def test_verdict_json_schema():
    d = iso_check(S(3, F(1, 5), 0), S(3, F(2, 5), 0)).to_json()
    assert set(d) == {"verdict", "reason", "k_class_1", "k_class_2", "orbit_witness", "certificate"}
    assert d["orbit_witness"]["matrix"] == "[[2,1],[5,3]]"
