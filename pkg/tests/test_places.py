"""Tests for places, square classes and Hilbert symbols over Q."""

from fractions import Fraction

import pytest

from hassekit.core.errors import DomainError
from hassekit.core.places import (
    INFINITY,
    TWO,
    Place,
    SquareClass,
    hilbert_symbol,
    is_local_square,
    local_square_classes,
    product_of_symbols,
    same_square_class,
    square_class_bits,
    support_places,
)

PLACES = [INFINITY, TWO, Place(3), Place(5), Place(7), Place(13), Place(17)]


def _random_rational(rng, height=400, den_height=40):
    num = rng.choice([-1, 1]) * rng.randint(1, height)
    den = rng.randint(1, den_height)
    return Fraction(num, den)


def test_place_parse_and_order():
    """Test parsing, coercion and the ordering with infinity last."""
    assert Place.parse("inf") == INFINITY
    assert Place.parse(" 13 ") == Place(13)
    assert Place.coerce(7) == Place(7)
    assert Place.coerce("oo").is_infinite
    assert sorted([INFINITY, Place(3), TWO]) == [TWO, Place(3), INFINITY]
    assert str(INFINITY) == "inf"
    assert str(Place(17)) == "17"


@pytest.mark.parametrize("bad", [4, 1, 0, -3, True])
def test_place_rejects_non_primes(bad):
    """Test that a place must be a prime or infinity."""
    with pytest.raises(DomainError):
        Place(bad)


def test_place_parse_garbage():
    """Test that unparseable text is a domain error."""
    with pytest.raises(DomainError):
        Place.parse("seventeen")


def test_support_places_always_has_two_and_infinity():
    """Test the support of a value set."""
    assert support_places(15) == [TWO, Place(3), Place(5), INFINITY]
    assert support_places(1) == [TWO, INFINITY]
    assert support_places(Fraction(7, 11), extra=[Place(13)]) == [
        TWO,
        Place(7),
        Place(11),
        Place(13),
        INFINITY,
    ]


def test_square_class_representative():
    """Test that square classes keep the signed squarefree part."""
    assert SquareClass.of(Fraction(-12, 5)).representative == -15
    assert SquareClass.of(49).is_trivial
    assert (SquareClass.of(6) * SquareClass.of(15)).representative == 10
    with pytest.raises(DomainError):
        SquareClass(1, 12)


@pytest.mark.parametrize(
    "a, b, place, expected",
    [
        (13, 17, 17, 1),
        (-1, -1, 2, -1),
        (-1, -1, None, -1),
        (-1, -1, 3, 1),
        (2, 3, 3, -1),
        (2, 3, 2, -1),
        (3, 3, 3, -1),
        (5, 5, 5, 1),
        (Fraction(1, 2), 3, 3, -1),
    ],
)
def test_hilbert_symbol_known_values(a, b, place, expected):
    """Test Hilbert symbols against hand-computed values."""
    assert hilbert_symbol(a, b, Place(place)) == expected


def test_hilbert_symbol_rejects_zero():
    """Test that zero arguments are rejected."""
    with pytest.raises(DomainError):
        hilbert_symbol(0, 3, TWO)


def test_hilbert_symbol_identities(rng):
    """Test symmetry, (a, -a) = 1 and (a, 1 - a) = 1 on random rationals."""
    for _ in range(150):
        a = _random_rational(rng)
        b = _random_rational(rng)
        for v in PLACES:
            assert hilbert_symbol(a, b, v) == hilbert_symbol(b, a, v)
            assert hilbert_symbol(a, -a, v) == 1
            if a != 1:
                assert hilbert_symbol(a, 1 - a, v) == 1


def test_hilbert_symbol_bilinear(rng):
    """Test multiplicativity in the first argument."""
    for _ in range(150):
        a1, a2, b = (_random_rational(rng) for _ in range(3))
        for v in PLACES:
            assert hilbert_symbol(a1 * a2, b, v) == hilbert_symbol(
                a1, b, v
            ) * hilbert_symbol(a2, b, v)


def test_product_formula(rng):
    """Test that the symbols multiply to 1 over all places."""
    for _ in range(500):
        a = _random_rational(rng, 10**4, 10**4)
        b = _random_rational(rng, 10**4, 10**4)
        assert product_of_symbols(a, b) == 1


def test_symbol_depends_on_square_class_only(rng):
    """Test invariance under multiplication by squares."""
    for _ in range(60):
        a = _random_rational(rng)
        b = _random_rational(rng)
        c = _random_rational(rng)
        for v in PLACES:
            assert hilbert_symbol(a * c * c, b, v) == hilbert_symbol(a, b, v)


@pytest.mark.parametrize(
    "v, size", [(INFINITY, 2), (TWO, 8), (Place(3), 4), (Place(13), 4)]
)
def test_local_square_classes_are_distinct(v, size):
    """Test that the class representatives are pairwise distinct."""
    classes = local_square_classes(v)
    assert len(classes) == size
    for i, a in enumerate(classes):
        for b in classes[i + 1:]:
            assert not same_square_class(a, b, v)


@pytest.mark.parametrize("v", [INFINITY, TWO, Place(3), Place(7)])
def test_symbol_is_nondegenerate(v):
    """Test that every nontrivial class pairs to -1 with some class."""
    classes = local_square_classes(v)
    for a in classes[1:]:
        assert any(hilbert_symbol(a, b, v) == -1 for b in classes)


def test_local_squares():
    """Test squareness in the completions."""
    assert is_local_square(17, TWO)
    assert not is_local_square(5, TWO)
    assert is_local_square(13, Place(17))
    assert not is_local_square(3, Place(17))
    assert not is_local_square(-1, INFINITY)
    assert not is_local_square(3, Place(3))
    assert is_local_square(Fraction(4, 9), Place(3))


def test_square_class_bits_detect_classes(rng):
    """Test that equal bit vectors mean equal square classes."""
    for _ in range(80):
        a = _random_rational(rng)
        b = _random_rational(rng)
        for v in PLACES:
            same_bits = square_class_bits(a, v) == square_class_bits(b, v)
            assert same_bits == same_square_class(a, b, v)
