"""Tests for the split embedding problem into (M_n(Q), tau)."""

from fractions import Fraction

import pytest

from hassekit.core.config import Bounds
from hassekit.core.errors import (
    BoundExceededError,
    DomainError,
    PreconditionError,
    UnsupportedExtensionSymbolError,
)
from hassekit.core.etale import EtaleInvolutionAlgebra, trace_form
from hassekit.core.places import INFINITY, TWO, Place
from hassekit.core.quadratic_forms import (
    QuadraticForm,
    build_form_with_invariants,
    globally_equivalent,
    invariants,
)
from hassekit.core.split_embedding import (
    EMBEDS,
    GLOBALLY_OBSTRUCTED,
    LOCALLY_OBSTRUCTED,
    UNDECIDED,
    SplitEmbeddingProblem,
    example75_obstruction,
    find_example75_pairs,
    global_embed,
    local_embed_test,
    local_table,
    odd_alpha,
    odd_reduction,
)


def _assert_isometric(report, problem):
    assert report.witness is not None
    q_a = trace_form(problem.source, report.witness, report.witness_fixed)
    assert globally_equivalent(q_a, problem.target)


def test_problem_rank_mismatch(rank_two_split_algebra):
    """Test that the target rank must equal dim E."""
    with pytest.raises(DomainError):
        SplitEmbeddingProblem(QuadraticForm.of(1, 1, 1), rank_two_split_algebra)


def test_problem_dimension_condition(q):
    """Test that dim E^sigma = n/2 is enforced."""
    odd = EtaleInvolutionAlgebra((q,), ((5,),), fixed_rational=True)
    P = SplitEmbeddingProblem(QuadraticForm.of(2, -10, 7), odd)
    assert P.rank == 3


def test_trivial_embedding(rank_two_split_algebra):
    """Test that q~ itself embeds with a = 1 up to norms."""
    A = rank_two_split_algebra
    P = SplitEmbeddingProblem(trace_form(A, A.fixed_one()), A)
    report = global_embed(P)
    assert report.verdict == EMBEDS
    assert all(r.ok for r in report.local_table)
    _assert_isometric(report, P)


def test_local_witness_flips_hasse(q):
    """Test a = 2 at 2 and 13 for <1, -13> against Q(sqrt 13)."""
    A = EtaleInvolutionAlgebra((q,), ((13,),))
    P = SplitEmbeddingProblem(QuadraticForm.of(1, -13), A)
    for v in (TWO, Place(13)):
        result = local_embed_test(P, v)
        assert result.ok
        assert result.witness == ((Fraction(2),),)
    assert local_embed_test(P, Place(3)).witness == A.fixed_one()
    assert local_embed_test(P, INFINITY).ok


def test_checkpoint_route(q):
    """Test the checkpoint route for <1, -13>; the checkpoint place is 5."""
    A = EtaleInvolutionAlgebra((q,), ((13,),))
    P = SplitEmbeddingProblem(QuadraticForm.of(1, -13), A)
    report = global_embed(P)
    assert report.verdict == EMBEDS
    assert report.method == "checkpoint"
    _assert_isometric(report, P)


def test_witness_search_route(q):
    """Test that the GF(2) search takes over when no checkpoint place is probed."""
    A = EtaleInvolutionAlgebra((q,), ((13,),))
    P = SplitEmbeddingProblem(QuadraticForm.of(1, -13), A)
    report = global_embed(P, Bounds(diamond_probe_cap=1))
    assert report.verdict == EMBEDS
    assert report.method == "witness-search"
    _assert_isometric(report, P)


def test_determinant_obstruction(rank_two_split_algebra):
    """Test <1, 1> against Q(sqrt 5): -5 is not a square at 2."""
    P = SplitEmbeddingProblem(QuadraticForm.of(1, 1), rank_two_split_algebra)
    report = global_embed(P)
    assert report.verdict == LOCALLY_OBSTRUCTED
    assert report.place == TWO
    assert report.reason == "determinant class mismatch"


def test_hasse_obstruction_where_d_is_square(q):
    """Test flips at 5 and 13, where -1 is a square, against Q(i) x Q(i)."""
    A = EtaleInvolutionAlgebra((q, q), ((-1,), (-1,)))
    target = build_form_with_invariants(4, 1, {5: -1, 13: -1}, (4, 0))
    P = SplitEmbeddingProblem(target, A)
    failures = [r for r in local_table(P) if not r.ok]
    assert {r.place for r in failures} == {Place(5), Place(13)}
    report = global_embed(P)
    assert report.verdict == LOCALLY_OBSTRUCTED
    assert report.place in (Place(5), Place(13))
    assert "local square" in report.reason


def test_example_7_5_is_globally_obstructed(example_algebra):
    """Test Q x Q(sqrt 13) with d = (13, 17) and Hasse flips at 13 and 17."""
    q_tilde = trace_form(example_algebra, example_algebra.fixed_one())
    hasse = dict(invariants(q_tilde).hasse)
    for p in (13, 17):
        hasse[Place(p)] = -hasse.get(Place(p), 1)
    target = build_form_with_invariants(
        q_tilde.rank, q_tilde.det, hasse, q_tilde.signature
    )
    report = global_embed(SplitEmbeddingProblem(target, example_algebra))
    assert all(r.ok for r in report.local_table)
    assert report.verdict == GLOBALLY_OBSTRUCTED
    assert report.method == "parity"
    assert report.certificate is not None
    assert (report.certificate.p1, report.certificate.p2) == (13, 17)


def test_parity_certificate():
    """Test the certificate's hypotheses for (13, 17)."""
    certificate = example75_obstruction(13, 17, [13, 17])
    assert certificate is not None
    assert all(ok for _, ok in certificate.checks)
    assert certificate.sampled_primes > 0
    assert "13" in certificate.argument


@pytest.mark.parametrize(
    "p1, p2, flips",
    [
        (13, 17, [13]),
        (13, 17, [13, 17, 3]),
        (5, 13, [5, 13]),
        (13, 13, [13]),
        (13, 15, [13, 15]),
    ],
)
def test_parity_certificate_inapplicable(p1, p2, flips):
    """Test that the certificate is withheld when a hypothesis fails."""
    assert example75_obstruction(p1, p2, flips) is None


def test_find_example75_pairs():
    """Test the pair search below 20."""
    assert find_example75_pairs(20) == [(13, 17)]
    assert (13, 17) in find_example75_pairs(60)


def test_odd_rank_embedding(q):
    """Test E = Q(sqrt 5) x Q with the trivial component carrying alpha = 7."""
    A = EtaleInvolutionAlgebra((q,), ((5,),), fixed_rational=True)
    P = SplitEmbeddingProblem(QuadraticForm.of(2, -10, 7), A)
    assert odd_alpha(P) == 7
    reduced = odd_reduction(P)
    assert reduced.rank == 2
    assert not reduced.source.fixed_rational
    report = global_embed(P)
    assert report.verdict == EMBEDS
    assert report.witness_fixed == 7
    _assert_isometric(report, P)


def test_odd_reduction_preconditions(rank_two_split_algebra):
    """Test that even rank is refused."""
    P = SplitEmbeddingProblem(QuadraticForm.of(2, -10), rank_two_split_algebra)
    with pytest.raises(PreconditionError) as excinfo:
        odd_reduction(P)
    assert excinfo.value.condition == "odd-rank"


def test_global_embed_survives_tight_bounds(q):
    """Test that exhausted prime searches end in a report, not an exception."""
    A = EtaleInvolutionAlgebra((q,), ((13,),))
    P = SplitEmbeddingProblem(QuadraticForm.of(1, -13), A)
    report = global_embed(P, Bounds(prescribe_cap=1, witness_cap=1))
    assert report.verdict in (EMBEDS, UNDECIDED)
    if report.verdict == EMBEDS:
        _assert_isometric(report, P)
    else:
        assert report.bound is not None


def test_global_embed_small_bounds(example_algebra, small_bounds):
    """Test the obstructed example under tight bounds: never embeds, never raises."""
    q_tilde = trace_form(example_algebra, example_algebra.fixed_one())
    hasse = dict(invariants(q_tilde).hasse)
    for p in (13, 17):
        hasse[Place(p)] = -hasse.get(Place(p), 1)
    target = build_form_with_invariants(
        q_tilde.rank, q_tilde.det, hasse, q_tilde.signature
    )
    P = SplitEmbeddingProblem(target, example_algebra)
    report = global_embed(P, small_bounds)
    assert report.verdict in (GLOBALLY_OBSTRUCTED, UNDECIDED)


def test_checkpoint_route_falls_through(mocker, q):
    """Test that a failing symbol solver hands over to the witness search."""
    mocker.patch(
        "hassekit.core.split_embedding.lemma_hs1",
        side_effect=BoundExceededError("prescribe_cap", 1),
    )
    A = EtaleInvolutionAlgebra((q,), ((13,),))
    P = SplitEmbeddingProblem(QuadraticForm.of(1, -13), A)
    report = global_embed(P)
    assert report.verdict == EMBEDS
    assert report.method == "witness-search"
    _assert_isometric(report, P)


def test_unsupported_symbol_falls_through(mocker, q):
    """Test that an unsupported dyadic symbol does not escape global_embed."""
    mocker.patch(
        "hassekit.core.split_embedding.lemma_hs1",
        side_effect=UnsupportedExtensionSymbolError("two dyadic places"),
    )
    A = EtaleInvolutionAlgebra((q,), ((13,),))
    P = SplitEmbeddingProblem(QuadraticForm.of(1, -13), A)
    assert global_embed(P).method == "witness-search"


def test_local_test_exhaustion_is_undecided(mocker, rank_two_split_algebra):
    """Test that a local test running out of candidates yields undecided."""
    mocker.patch(
        "hassekit.core.split_embedding.local_embed_test",
        side_effect=BoundExceededError("element_height", 3),
    )
    P = SplitEmbeddingProblem(QuadraticForm.of(2, -10), rank_two_split_algebra)
    report = global_embed(P)
    assert report.verdict == UNDECIDED
    assert report.bound == "element_height"
    assert report.place is not None
    assert report.local_table == ()


def test_local_failure_beats_local_exhaustion(mocker, rank_two_split_algebra):
    """Test that a failing place is reported even when another place gave up."""
    real_test = local_embed_test

    def flaky(P, v, bounds=None):
        if v == INFINITY:
            raise BoundExceededError("element_height", 3)
        return real_test(P, v, bounds)

    mocker.patch("hassekit.core.split_embedding.local_embed_test", side_effect=flaky)
    P = SplitEmbeddingProblem(QuadraticForm.of(1, 1), rank_two_split_algebra)
    report = global_embed(P)
    assert report.verdict == LOCALLY_OBSTRUCTED
    assert report.place == TWO


def test_odd_reduction_contradiction_is_flagged(mocker, q):
    """Test that alpha failing to be represented after a clean table is flagged."""
    mocker.patch("hassekit.core.split_embedding.represents", return_value=False)
    A = EtaleInvolutionAlgebra((q,), ((5,),), fixed_rational=True)
    P = SplitEmbeddingProblem(QuadraticForm.of(2, -10, 7), A)
    report = global_embed(P)
    assert report.verdict == LOCALLY_OBSTRUCTED
    assert report.place is None
    assert "represents-alpha (contradicts local table)" in report.reason
    assert "hypothesis-contradiction" in report.notes


def test_odd_reduction_exhaustion_is_undecided(mocker, q):
    """Test that Witt cancellation running out of primes yields undecided."""
    mocker.patch(
        "hassekit.core.split_embedding.build_form_with_invariants",
        side_effect=BoundExceededError("prescribe_cap", 1),
    )
    A = EtaleInvolutionAlgebra((q,), ((5,),), fixed_rational=True)
    P = SplitEmbeddingProblem(QuadraticForm.of(2, -10, 7), A)
    report = global_embed(P)
    assert report.verdict == UNDECIDED
    assert report.bound == "prescribe_cap"
