"""Tests for constructive symbol prescription."""

from fractions import Fraction

import pytest

from hassekit.core.config import Bounds
from hassekit.core.errors import BoundExceededError, InfeasibleError, PreconditionError
from hassekit.core.local_fields import ext_hilbert_symbol, places_above
from hassekit.core.places import (
    INFINITY,
    TWO,
    Place,
    hilbert_symbol,
    is_local_square,
    support_places,
)
from hassekit.core.symbols import (
    find_checkpoint_place,
    lemma_hs,
    lemma_hs1,
    prescribe_symbols,
)


def _symbols(s, t, extra=()):
    return {v: hilbert_symbol(s, t, v) for v in support_places(s, t, extra=extra)}


def test_prescribe_symbols_two_primes():
    """Test that (17, x) is -1 exactly at 3 and 23."""
    x = prescribe_symbols(17, {3: -1, 23: -1})
    for v, value in _symbols(17, x, [Place(3), Place(23)]).items():
        assert value == (-1 if v in (Place(3), Place(23)) else 1)


def test_prescribe_symbols_hamilton():
    """Test the (-1, -1) pattern at 2 and infinity."""
    assert prescribe_symbols(-1, {2: -1, "inf": -1}) == -1


def test_prescribe_symbols_trivial():
    """Test that all-trivial targets give 1."""
    assert prescribe_symbols(1, {}) == 1


def test_lemma_hs_positive_pin():
    """Test a real pin with t = 1."""
    s = lemma_hs(1, {}, {INFINITY: 5})
    assert s > 0


def test_lemma_hs_pinned_at_infinity():
    """Test t = 17 with two -1 symbols and a positive pin."""
    s = lemma_hs(17, {3: -1, 23: -1}, {INFINITY: 1})
    assert s > 0
    assert hilbert_symbol(s, 17, Place(3)) == -1
    assert hilbert_symbol(s, 17, Place(23)) == -1
    for v, value in _symbols(s, 17).items():
        if v not in (Place(3), Place(23)):
            assert value == 1


def test_lemma_hs_auxiliary_prime():
    """Test the auxiliary prime construction when the small search is skipped."""
    bounds = Bounds(witness_cap=1)
    s = lemma_hs(17, {3: -1, 23: -1}, {INFINITY: 1, 5: 2}, bounds)
    assert s > 0
    assert is_local_square(s / 2, Place(5))
    for v, value in _symbols(s, 17, [Place(3), Place(5), Place(23)]).items():
        assert value == (-1 if v in (Place(3), Place(23)) else 1)


def test_lemma_hs_hamilton():
    """Test the unpinned (-1, -1) case."""
    assert lemma_hs(-1, {TWO: -1, INFINITY: -1}) == -1


@pytest.mark.parametrize(
    "t, targets, pins, constraint",
    [
        (17, {3: -1}, None, "product-formula"),
        (1, {3: -1, 5: -1}, None, "local-square"),
        (13, {}, {13: 2}, "pin-symbol"),
    ],
)
def test_lemma_hs_infeasible(t, targets, pins, constraint):
    """Test that each violated condition is named."""
    with pytest.raises(InfeasibleError) as excinfo:
        lemma_hs(t, targets, pins)
    assert excinfo.value.constraint == constraint


def test_lemma_hs1_rational_factor(q):
    """Test the single rational factor with one pin and a checkpoint place."""
    s = lemma_hs1([q], [(13,)], {13: [(2,)]}, 5)
    value = s[0][0]
    assert is_local_square(value / 2, Place(13))
    assert hilbert_symbol(value, 13, Place(5)) == -1
    for v, symbol in _symbols(value, 13, [Place(5), Place(13)]).items():
        if v not in (Place(5), Place(13)):
            assert symbol == 1


def test_lemma_hs1_all_squares(q, q_sqrt13):
    """Test that globally square components give s = 1."""
    s = lemma_hs1([q, q_sqrt13], [(4,), (13, 0)], {}, 3)
    assert s == ((Fraction(1),), (Fraction(1), Fraction(0)))


def test_lemma_hs1_quadratic_factor(q_sqrt5):
    """Test a real pin over Q(sqrt 5) with the checkpoint at the split prime 11."""
    minus_one = q_sqrt5.embed(-1)
    (s,) = lemma_hs1([q_sqrt5], [minus_one], {INFINITY: [minus_one]}, 11)
    assert q_sqrt5.sign_vector(s) == (-1, -1)
    for p in (2, 3, 5):
        for w in places_above(q_sqrt5, Place(p)):
            assert ext_hilbert_symbol(q_sqrt5, s, minus_one, w) == 1


def test_lemma_hs1_rejects_pinned_v0(q):
    """Test that v0 may not be pinned."""
    with pytest.raises(PreconditionError) as excinfo:
        lemma_hs1([q], [(13,)], {5: [(2,)]}, 5)
    assert excinfo.value.condition == "v0-unpinned"


def test_lemma_hs1_rejects_square_at_v0(q):
    """Test that t must stay nonsquare at v0."""
    with pytest.raises(PreconditionError) as excinfo:
        lemma_hs1([q], [(13,)], {}, 3)
    assert excinfo.value.condition == "v0-nonsquare"


def test_find_checkpoint_place_rational(q):
    """Test the smallest admissible prime for t = 13 avoiding 3 and 23."""
    assert find_checkpoint_place([q], [(13,)], avoid=[3, 23]) == Place(5)


def test_find_checkpoint_place_squares(q, q_sqrt13):
    """Test that square components impose nothing."""
    v = find_checkpoint_place([q, q_sqrt13], [(9,), (13, 0)], avoid=[3, 5])
    assert v == Place(7)


def test_find_checkpoint_place_with_field_centre(q):
    """Test that the centre discriminant must also be a nonresidue."""
    v = find_checkpoint_place([q], [(13,)], z_is_field=True, z_disc=2)
    assert v == Place(5)
    v = find_checkpoint_place([q], [(13,)], z_is_field=True, z_disc=3, avoid=[5])
    assert v == Place(7)


def test_find_checkpoint_place_incompatible_constraints(q, q_sqrt13):
    """Test that 13 nonsquare and 17 nonsquare over Q(sqrt 13) never meet."""
    with pytest.raises(BoundExceededError) as excinfo:
        find_checkpoint_place([q, q_sqrt13], [(13,), (17, 0)], cap=200)
    assert excinfo.value.bound_name == "checkpoint_cap"


def test_find_checkpoint_place_needs_disc(q):
    """Test that a field centre without discriminant is rejected."""
    with pytest.raises(PreconditionError):
        find_checkpoint_place([q], [(13,)], z_is_field=True)

