"""Tests for etale algebras with involution and their trace forms."""

from fractions import Fraction

import pytest

from hassekit.core.errors import DomainError
from hassekit.core.etale import (
    EtaleInvolutionAlgebra,
    cor_term,
    cor_term_via_symbols,
    hilbert90_solve,
    real_sign_patterns,
    splits_csa,
    trace_form,
)
from hassekit.core.fields import FieldFactor
from hassekit.core.places import (
    INFINITY,
    TWO,
    Place,
    hilbert_symbol,
    support_places,
)
from hassekit.core.quadratic_forms import QuadraticForm, invariants


def test_dimensions(example_algebra, q):
    """Test the dimension condition for even and odd shapes."""
    assert example_algebra.dimension == 6
    assert example_algebra.fixed_dimension == 3
    assert example_algebra.satisfies_dimension_condition()
    odd = EtaleInvolutionAlgebra((q,), ((5,),), fixed_rational=True)
    assert odd.dimension == 3
    assert odd.satisfies_dimension_condition()


def test_invalid_algebras(q):
    """Test shape errors."""
    with pytest.raises(DomainError):
        EtaleInvolutionAlgebra((q,), ((0,),))
    with pytest.raises(DomainError):
        EtaleInvolutionAlgebra((q,), ((5,), (3,)))
    with pytest.raises(DomainError):
        EtaleInvolutionAlgebra((), ())


def test_component_is_field(q, q_sqrt13):
    """Test which components of E are fields."""
    A = EtaleInvolutionAlgebra((q, q_sqrt13), ((4,), (13, 0)))
    assert not A.component_is_field(0)
    assert not A.component_is_field(1)
    B = EtaleInvolutionAlgebra((q, q_sqrt13), ((13,), (17, 0)))
    assert B.component_is_field(0) and B.component_is_field(1)


def test_arithmetic(rank_two_split_algebra):
    """Test products, the involution and norms in Q(sqrt 5)."""
    A = rank_two_split_algebra
    x = A.generator()
    assert A.mul(x, x) == A.from_fixed(((Fraction(5),),))
    assert A.sigma(x) == A.element([((0,), (-1,))])
    y = A.element([((3,), (1,))])
    assert A.norm_to_fixed(y) == ((Fraction(4),),)
    assert A.mul(y, A.inv(y)) == A.one()


def test_trace_form_q_sqrt5(rank_two_split_algebra):
    """Test <2, -10> for a = 1 and <6, -30> for a = 3."""
    A = rank_two_split_algebra
    assert trace_form(A, A.fixed_one()) == QuadraticForm.of(2, -10)
    assert trace_form(A, ((3,),)) == QuadraticForm.of(6, -30)


def test_trace_form_of_example_algebra(example_algebra):
    """Test the rank-6 trace form of Q x Q(sqrt 13) with d = (13, 17)."""
    q_tilde = trace_form(example_algebra, example_algebra.fixed_one())
    assert q_tilde.rank == 6
    assert q_tilde.signature == (3, 3)


def test_trace_form_with_fixed_component(q):
    """Test that the fixed rational component contributes <a0>."""
    A = EtaleInvolutionAlgebra((q,), ((5,),), fixed_rational=True)
    assert trace_form(A, A.fixed_one(), 7) == QuadraticForm.of(2, -10, 7)


def test_trace_form_rejects_zero(rank_two_split_algebra):
    """Test that a must be invertible."""
    with pytest.raises(DomainError):
        trace_form(rank_two_split_algebra, ((0,),))


def test_cor_term_rational(q):
    """Test Cor(17, 13) at 13 by both routes."""
    A = EtaleInvolutionAlgebra((q,), ((13,),))
    a = ((17,),)
    assert cor_term(A, a, 13) == 1
    assert cor_term_via_symbols(A, a, 13) == 1


def test_cor_term_matches_symbols_over_q(q, rng):
    """Test that the trace-form route equals (a, d)_v over Q."""
    for _ in range(20):
        d = rng.choice([-7, -3, -1, 2, 3, 5, 6, 13, 17])
        a = rng.choice([-5, -2, 3, 7, 11, 13, 15])
        A = EtaleInvolutionAlgebra((q,), ((d,),))
        for v in (TWO, Place(3), Place(5), Place(7), Place(13), INFINITY):
            assert cor_term(A, ((a,),), v) == hilbert_symbol(a, d, v)
            assert cor_term_via_symbols(A, ((a,),), v) == hilbert_symbol(a, d, v)


def test_cor_term_trivial_on_one_and_norms():
    """Test that a = 1 and a = N(y) give +1 everywhere."""
    field = FieldFactor.quadratic(5)
    A = EtaleInvolutionAlgebra((field,), ((2, 1),))
    norm = A.norm_to_fixed(A.element([((1, 1), (1, 0))]))
    for v in (TWO, Place(3), Place(5), Place(11), INFINITY):
        assert cor_term(A, A.fixed_one(), v) == 1
        assert cor_term(A, norm, v) == 1


def _random_unit(f, rng):
    while True:
        z = f.element([rng.randint(-6, 6) for _ in range(f.degree)])
        if f.norm(z) != 0:
            return z


def _random_cor_setting(rng):
    """A random (F, d) with F = Q(sqrt m) or Q x Q(sqrt m), plus two elements of F."""
    field = FieldFactor.quadratic(rng.choice([5, 13, -3, 2, -1]))
    factors = (field,) if rng.random() < 0.5 else (FieldFactor.rational(), field)
    d = tuple(_random_unit(f, rng) for f in factors)
    A = EtaleInvolutionAlgebra(factors, d)
    a = tuple(_random_unit(f, rng) for f in factors)
    b = tuple(_random_unit(f, rng) for f in factors)
    return A, a, b


def _cor_places(A, *elements):
    diag = [x for a in elements for x in trace_form(A, a).diag]
    return support_places(*diag, *trace_form(A, A.fixed_one()).diag)


def test_cor_term_multiplicative_over_quadratic_fields(rng):
    """Test Cor(ab, d)_v = Cor(a, d)_v Cor(b, d)_v."""
    for _ in range(100):
        A, a, b = _random_cor_setting(rng)
        ab = tuple(f.mul(x, y) for f, x, y in zip(A.factors, a, b))
        for v in _cor_places(A, a, b, ab):
            assert cor_term(A, ab, v) == cor_term(A, a, v) * cor_term(A, b, v)


def test_cor_term_product_formula_over_quadratic_fields(rng):
    """Test that Cor(a, d)_v multiplies to +1 over all places."""
    for _ in range(100):
        A, a, _ = _random_cor_setting(rng)
        product = 1
        for v in _cor_places(A, a):
            product *= cor_term(A, a, v)
        assert product == 1


def test_cor_term_agrees_with_extension_symbols(rng):
    """Test the trace-form route against products of (a_j, d_j)_w."""
    for _ in range(100):
        A, a, _ = _random_cor_setting(rng)
        for v in _cor_places(A, a):
            via_symbols = cor_term_via_symbols(A, a, v)
            if not v.is_dyadic:
                assert via_symbols == cor_term(A, a, v)
            else:
                assert via_symbols in (None, cor_term(A, a, v))


def test_hilbert90_unit_of_q_sqrt5(rank_two_split_algebra):
    """Test x = 9 + 4 sqrt 5, which has norm 1."""
    A = rank_two_split_algebra
    x = A.element([((9,), (4,))])
    y = hilbert90_solve(A, x)
    assert y == A.element([((10,), (4,))])
    assert A.mul(y, A.inv(A.sigma(y))) == x


def test_hilbert90_trivial_and_fallback(rank_two_split_algebra):
    """Test x = 1 and x = -1, where 1 + x is not invertible."""
    A = rank_two_split_algebra
    for x in (A.one(), A.element([((-1,), (0,))])):
        y = hilbert90_solve(A, x)
        assert A.is_invertible(y)
        assert A.mul(y, A.inv(A.sigma(y))) == x


def test_hilbert90_precondition(rank_two_split_algebra):
    """Test that x sigma(x) must be 1."""
    A = rank_two_split_algebra
    with pytest.raises(DomainError):
        hilbert90_solve(A, A.element([((2,), (0,))]))


def test_splits_csa_empty_ramification(q):
    """Test that a matrix algebra is split by everything."""
    assert splits_csa([q, q], [], 2).splits


def test_splits_csa_biquadratic_data():
    """Test Q(sqrt 17) and Q(sqrt 221) against the algebra ramified at 3 and 23."""
    factors = [FieldFactor.quadratic(17), FieldFactor.quadratic(221)]
    assert splits_csa(factors, [3, 23], 4).splits


def test_splits_csa_failures(q, q_sqrt13):
    """Test that Q and Q(sqrt 13) do not split the algebra ramified at 3 and 23."""
    report = splits_csa([q, q], [3, 23], 2)
    assert not report.splits
    assert report.failures == ((0, (Place(3), Place(23))), (1, (Place(3), Place(23))))
    report = splits_csa([q_sqrt13], ["3", "23"], 2)
    assert not report.splits
    assert report.failures == ((0, (Place(3), Place(23))),)


def test_splits_csa_shape_errors(q, q_sqrt13):
    """Test degree mismatches and odd degree."""
    with pytest.raises(DomainError):
        splits_csa([q_sqrt13], [], 4)
    with pytest.raises(DomainError):
        splits_csa([q], [3, 23], 1)


def test_real_sign_patterns(q, q_sqrt5):
    """Test that every sign pattern at the real embeddings is realised."""
    patterns = real_sign_patterns([q])
    assert sorted(p[0][0] for p in patterns) == [-1, 1]
    patterns = real_sign_patterns([q_sqrt5])
    assert len(patterns) == 4
    assert {q_sqrt5.sign_vector(p[0]) for p in patterns} == {
        (1, 1),
        (1, -1),
        (-1, 1),
        (-1, -1),
    }


def test_trace_form_invariants_shift(rank_two_split_algebra):
    """Test that q_a and q_1 differ in Hasse invariant by (a, 5)."""
    A = rank_two_split_algebra
    base = invariants(trace_form(A, A.fixed_one()))
    scaled = invariants(trace_form(A, ((3,),)))
    for v in (TWO, Place(3), Place(5), INFINITY):
        assert scaled.hasse_at(v) * base.hasse_at(v) == hilbert_symbol(3, 5, v)
