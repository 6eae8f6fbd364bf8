import pytest

from src.curve_pi1.exactpoly import PROJECTIVE_VARIABLES, parse_polynomial
from src.curve_pi1.groups.finite import fingerprint, free_product_fingerprint
from src.curve_pi1.groups.orbifold import OrbifoldSpec, orbifold_pi1, torus_decomposition_note, torus_pencil_orbifold
from src.curve_pi1.groups.smith import abelianization
from src.curve_pi1.groups.tietze import tietze_simplify


def test_punctured_sphere_with_two_cone_points():
    """
    One puncture and cone points of orders 2 and 3 give Z/2 * Z/3.
    """
    # Arrange
    spec = OrbifoldSpec(punctures=1, cone_points=(2, 3))

    # Act
    pres = orbifold_pi1(spec)
    simplified = tietze_simplify(pres).presentation

    # Assert
    assert pres.rank == 3
    assert simplified.rank == 2
    assert abelianization(simplified).factors == [6]
    comparison = fingerprint(simplified, 'tiny').compare(free_product_fingerprint(2, 3, 'tiny'))
    assert set(comparison.values()) == {'match'}


def test_closed_sphere_with_coprime_cone_points_is_trivial():
    pres = orbifold_pi1(OrbifoldSpec(punctures=0, cone_points=(2, 3)))
    assert abelianization(pres).factors == []
    assert tietze_simplify(pres).presentation.rank == 0


def test_empty_orbifold():
    assert orbifold_pi1(OrbifoldSpec()).rank == 0


def test_invalid_specs():
    with pytest.raises(ValueError):
        OrbifoldSpec(punctures=-1)
    with pytest.raises(ValueError):
        OrbifoldSpec(cone_points=(1,))


def test_torus_pencil_certificate():
    pencil = torus_pencil_orbifold(2, 3)

    assert pencil.certificate == {'[0:1]': 3, '[1:0]': 2}
    assert pencil.spec == OrbifoldSpec(punctures=1, cone_points=(3, 2))
    assert pencil.to_dict()['spec']['cone_points'] == [3, 2]


def test_torus_pencil_reads_multiplicity_from_factorisation():
    f_p = parse_polynomial("x*y", PROJECTIVE_VARIABLES)
    f_q = parse_polynomial("x^3 + z^3", PROJECTIVE_VARIABLES)
    pencil = torus_pencil_orbifold(2, 3, f_p, f_q)
    assert pencil.certificate == {'[0:1]': 3, '[1:0]': 2}


def test_torus_pencil_needs_coprime_pair():
    with pytest.raises(ValueError):
        torus_pencil_orbifold(2, 4)


def test_decomposition_note():
    assert torus_decomposition_note(2, 15) == \
        "pq = 30 also splits as (3,10), (5,6); the decomposition is not canonical"
    assert torus_decomposition_note(2, 3) is None
