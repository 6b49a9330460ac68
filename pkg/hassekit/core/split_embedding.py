"""Embeddings of (E, sigma) into (M_n(Q), tau) with tau orthogonal."""
# --------------------------------------------------------------------
# Design concept
# --------------------------------------------------------------------
# 1. *Embedding = isometric trace form* - (E, sigma) embeds into the
#    involution adjoint to q iff q_a = Tr(a y sigma(z)) is isometric to q
#    for some a in F^x.  Every verdict is about that isometry.
#
# 2. *Local table first* - each place in the joint support (plus 2 and
#    infinity) gets ok(a_v) or fail(reason).  Places outside the support
#    agree automatically once the determinant classes agree.
#
# 3. *Three global routes, in order*
#    a) checkpoint place v0 + lemma_hs1 with the local witnesses as pins;
#    b) exact GF(2) search over a small generator set: the Hasse
#       corrections Cor(a, d)_v are multiplicative in a;
#    c) the parity certificate for the (Q x Q(sqrt p1), (p1, p2)) family.
#    Anything else is "undecided" and names the bound that stopped it.
#
# 4. *Odd rank* - E = E' x Q is reduced to E' by splitting <alpha> off q
#    (Witt cancellation), then the witness is extended by alpha.
# --------------------------------------------------------------------

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Set, Tuple

from sympy import isprime

from .config import Bounds, resolve_bounds
from .errors import (
    BoundExceededError,
    CertificationError,
    DomainError,
    PreconditionError,
    UnsupportedExtensionSymbolError,
)
from .etale import EtaleInvolutionAlgebra, FElement, real_sign_patterns, trace_form
from .fields import Coords, FieldFactor
from .local_fields import is_ext_local_square, places_above
from .places import (
    INFINITY,
    Place,
    PlaceLike,
    hilbert_symbol,
    is_local_square,
    local_square_classes,
    same_square_class,
    support_places,
)
from .quadratic_forms import (
    QuadraticForm,
    build_form_with_invariants,
    globally_equivalent,
    hasse_invariant,
    locally_equivalent,
    represents,
)
from .symbols import find_checkpoint_place, lemma_hs1
from .utils import legendre, prime_support, primes_from, solve_gf2, squarefree_part

logger = logging.getLogger(__name__)

EMBEDS = "embeds"
LOCALLY_OBSTRUCTED = "locally_obstructed"
GLOBALLY_OBSTRUCTED = "globally_obstructed"
UNDECIDED = "undecided"


@dataclass(frozen=True)
class SplitEmbeddingProblem:
    """Embed ``source`` into (M_n(Q), tau) where tau is adjoint to ``target``."""

    target: QuadraticForm
    source: EtaleInvolutionAlgebra

    def __post_init__(self) -> None:
        if self.target.rank != self.source.dimension:
            raise DomainError(
                f"target has rank {self.target.rank} but E has dimension "
                f"{self.source.dimension}"
            )
        if not self.source.satisfies_dimension_condition():
            raise DomainError("the involution does not satisfy dim E^sigma = n/2")

    @property
    def rank(self) -> int:
        return self.target.rank


@dataclass(frozen=True)
class LocalResult:
    """ok(a_v) or fail(reason) at one place."""

    place: Place
    ok: bool
    witness: Optional[FElement] = None
    reason: str = ""


@dataclass(frozen=True)
class Example75Certificate:
    """Checked hypotheses of the parity argument for Q x Q(sqrt p1), d = (p1, p2)."""

    p1: int
    p2: int
    checks: Tuple[Tuple[str, bool], ...]
    sampled_primes: int
    argument: str


@dataclass(frozen=True)
class ObstructionReport:
    """Certified verdict of an embedding query."""

    verdict: str
    local_table: Tuple[LocalResult, ...]
    witness: Optional[FElement] = None
    witness_fixed: Optional[Fraction] = None
    place: Optional[Place] = None
    reason: str = ""
    certificate: Optional[Example75Certificate] = None
    bound: Optional[str] = None
    method: str = ""
    notes: Tuple[str, ...] = field(default_factory=tuple)


# -- helpers ---------------------------------------------------------------


def _with_component(A: EtaleInvolutionAlgebra, j: int, value: Coords) -> FElement:
    one = list(A.fixed_one())
    one[j] = value
    return tuple(one)


def _product(A: EtaleInvolutionAlgebra, elements: Sequence[FElement]) -> FElement:
    result = A.fixed_one()
    for x in elements:
        result = tuple(f.mul(r, c) for f, r, c in zip(A.factors, result, x))
    return result


def odd_alpha(P: SplitEmbeddingProblem) -> Fraction:
    """The class of alpha = d(q) / d(q~') fixing the trivial-sigma component."""
    base = trace_form(P.source, P.source.fixed_one(), 1)
    return Fraction(squarefree_part(P.target.det / base.det))


def _fixed_value(P: SplitEmbeddingProblem) -> Optional[Fraction]:
    return odd_alpha(P) if P.source.fixed_rational else None


def _local_candidates(
    A: EtaleInvolutionAlgebra, v: Place, height: int
) -> List[FElement]:
    candidates: List[FElement] = []
    rationals = [c for c in local_square_classes(v) if c != 1]
    for j, f in enumerate(A.factors):
        pool: List[Coords] = [f.embed(c) for c in rationals]
        if f.rank:
            pool.extend(f.gen_sqrt(i) for i in range(f.rank))
            small = [z for z in f.small_elements(height) if f.norm(z) != 0]
            pool.extend(small)
            pool.extend(f.scale(z, c) for z in small for c in rationals)
        candidates.extend(_with_component(A, j, z) for z in pool)
    return candidates


# -- local test ------------------------------------------------------------


def local_embed_test(
    P: SplitEmbeddingProblem, v: PlaceLike, bounds: Optional[Bounds] = None
) -> LocalResult:
    """Decide whether q_{a_v} is isometric to the target over Q_v for some a_v."""
    bounds = resolve_bounds(bounds)
    v = Place.coerce(v)
    A, q = P.source, P.target
    a0 = _fixed_value(P)
    q_tilde = trace_form(A, A.fixed_one(), a0)

    if not same_square_class(q_tilde.det, q.det, v):
        return LocalResult(v, False, reason="determinant class mismatch")

    if v.is_infinite:
        for a in real_sign_patterns(A.factors):
            if trace_form(A, a, a0).signature == q.signature:
                return LocalResult(v, True, a)
        return LocalResult(v, False, reason="no sign pattern matches the signature")

    if hasse_invariant(q_tilde, v) == hasse_invariant(q, v):
        return LocalResult(v, True, A.fixed_one())

    flippable = any(
        not is_ext_local_square(f, dj, w)
        for j, (f, dj) in enumerate(zip(A.factors, A.d))
        for w in places_above(f, v, j)
    )
    if not flippable:
        return LocalResult(
            v, False, reason="Hasse invariant mismatch and every d_j is a local square"
        )
    for a in _local_candidates(A, v, bounds.element_height):
        if locally_equivalent(trace_form(A, a, a0), q, v):
            return LocalResult(v, True, a)
    raise BoundExceededError(
        "element_height", bounds.element_height, f"no local witness found at {v}"
    )


def local_table(
    P: SplitEmbeddingProblem, bounds: Optional[Bounds] = None
) -> List[LocalResult]:
    """Local results on the joint support of the target and the trace form."""
    q_tilde = trace_form(P.source, P.source.fixed_one(), _fixed_value(P))
    places = support_places(*P.target.diag, *q_tilde.diag)
    return [local_embed_test(P, v, bounds) for v in places]


# -- odd rank ----------------------------------------------------------------


def odd_reduction(
    P: SplitEmbeddingProblem, bounds: Optional[Bounds] = None
) -> SplitEmbeddingProblem:
    """Split <alpha> off the target and drop the trivial-sigma component.

    Raises:
        PreconditionError: n is even, E is not of the shape E' x Q, or
            alpha is not represented by the target.
    """
    bounds = resolve_bounds(bounds)
    A, q = P.source, P.target
    if q.rank % 2 == 0:
        raise PreconditionError("odd_reduction needs odd rank", "odd-rank")
    if not A.fixed_rational:
        raise PreconditionError("E must be E' x Q with sigma trivial on Q", "odd-shape")
    if not A.factors:
        raise PreconditionError("E' must be nonzero", "odd-shape")
    alpha = odd_alpha(P)
    if not represents(q, alpha):
        raise PreconditionError(
            f"alpha = {alpha} is not represented by the target", "represents-alpha"
        )

    rest_det = q.det / alpha
    hasse = {
        v: hasse_invariant(q, v) * hilbert_symbol(rest_det, alpha, v)
        for v in support_places(alpha, *q.diag)
        if not v.is_infinite
    }
    p, m = q.signature
    signature = (p - 1, m) if alpha > 0 else (p, m - 1)
    flips = {v: h for v, h in hasse.items() if h == -1}
    reduced = build_form_with_invariants(q.rank - 1, rest_det, flips, signature, bounds)
    if not globally_equivalent(reduced + QuadraticForm.of(alpha), q):
        raise CertificationError("Witt cancellation produced an inequivalent form")
    source = EtaleInvolutionAlgebra(A.factors, A.d)
    logger.info(f"odd reduction: alpha = {alpha}, reduced target {reduced}")
    return SplitEmbeddingProblem(reduced, source)


# -- global engine -------------------------------------------------------------


def _checkpoint_route(
    P: SplitEmbeddingProblem,
    table: Sequence[LocalResult],
    q_tilde: QuadraticForm,
    bounds: Bounds,
) -> Optional[FElement]:
    A, q = P.source, P.target
    pins: Dict[Place, FElement] = {}
    for result in table:
        v = result.place
        if v.is_infinite or hasse_invariant(q_tilde, v) != hasse_invariant(q, v):
            assert result.witness is not None
            pins[v] = result.witness
    try:
        v0 = find_checkpoint_place(
            A.factors,
            A.d,
            avoid=list(pins),
            cap=bounds.diamond_probe_cap,
            bounds=bounds,
        )
    except BoundExceededError as e:
        logger.info(f"checkpoint route unavailable: {e}")
        return None
    try:
        a = lemma_hs1(A.factors, A.d, pins, v0, bounds)
    except (BoundExceededError, UnsupportedExtensionSymbolError) as e:
        logger.info(f"checkpoint route gave up at v0 = {v0}: {e}")
        return None
    if not globally_equivalent(trace_form(A, a), q):
        raise CertificationError(f"checkpoint witness {a} fails the isometry re-check")
    logger.info(f"checkpoint route: v0 = {v0}, a = {a}")
    return a


def _generators(
    A: EtaleInvolutionAlgebra, primes: Set[int], bounds: Bounds
) -> List[FElement]:
    limit = max(1, bounds.witness_cap.bit_length() - 1)
    per_factor: List[List[Coords]] = []
    for f in A.factors:
        gens: List[Coords] = [f.embed(-1)]
        gens.extend(f.gen_sqrt(i) for i in range(f.rank))
        gens.extend(f.embed(p) for p in sorted(primes))
        if f.rank:
            for z in f.small_elements(bounds.element_height):
                if f.norm(z) != 0 and set(f.norm_primes(z)) <= primes:
                    gens.append(z)
        per_factor.append(gens)
    result: List[FElement] = []
    depth = 0
    while len(result) < limit and any(depth < len(g) for g in per_factor):
        for j, gens in enumerate(per_factor):
            if depth < len(gens) and len(result) < limit:
                result.append(_with_component(A, j, gens[depth]))
        depth += 1
    return result


def _sign_bits(A: EtaleInvolutionAlgebra, a: FElement) -> List[int]:
    bits: List[int] = []
    for f, x in zip(A.factors, a):
        bits.extend(1 if s < 0 else 0 for s in f.sign_vector(x))
    return bits


def _witness_search(
    P: SplitEmbeddingProblem, q_tilde: QuadraticForm, bounds: Bounds
) -> Optional[FElement]:
    A, q = P.source, P.target
    primes: Set[int] = set(prime_support(*q.diag, *q_tilde.diag))
    for f, dj in zip(A.factors, A.d):
        primes.update(f.bad_primes())
        primes.update(f.norm_primes(dj))
    gens = _generators(A, primes, bounds)
    places = [Place(p) for p in sorted(primes)]

    equations: List[Tuple[int, int]] = []
    for v in places:
        base = hasse_invariant(q_tilde, v)
        row = 0
        for i, g in enumerate(gens):
            if hasse_invariant(trace_form(A, g), v) != base:
                row |= 1 << i
        equations.append((row, int(base != hasse_invariant(q, v))))

    gen_signs = [_sign_bits(A, g) for g in gens]
    for pattern in real_sign_patterns(A.factors):
        if trace_form(A, pattern).signature != q.signature:
            continue
        target = _sign_bits(A, pattern)
        real_rows = [
            (sum(bits[k] << i for i, bits in enumerate(gen_signs)), target[k])
            for k in range(len(target))
        ]
        solution = solve_gf2(equations + real_rows)
        if solution is None:
            continue
        a = _product(A, [g for i, g in enumerate(gens) if solution >> i & 1])
        if globally_equivalent(trace_form(A, a), q):
            logger.info(f"witness search found a = {a} from {len(gens)} generators")
            return a
        raise CertificationError(f"witness search produced a non-isometric a = {a}")
    logger.info(f"witness search over {len(gens)} generators found nothing")
    return None


def _example75_shape(P: SplitEmbeddingProblem) -> Optional[Tuple[int, int]]:
    A = P.source
    if len(A.factors) != 2 or A.fixed_rational:
        return None
    f1, f2 = A.factors
    if f1.rank != 0 or f2.rank != 1:
        return None
    d1, d2 = A.d
    if not f2.is_rational(d2):
        return None
    p1, p2 = d1[0], d2[0]
    if p1.denominator != 1 or p2.denominator != 1 or f2.gens[0] != p1:
        return None
    return int(p1), int(p2)


def _screen(
    P: SplitEmbeddingProblem, bounds: Bounds
) -> Tuple[Tuple[LocalResult, ...], Optional[ObstructionReport]]:
    """Local table plus the report that ends the query early, if any.

    A failing place wins over a place where the local test gave up.
    """
    q_tilde = trace_form(P.source, P.source.fixed_one(), _fixed_value(P))
    results: List[LocalResult] = []
    stuck: Optional[Tuple[Place, str, Optional[str]]] = None
    for v in support_places(*P.target.diag, *q_tilde.diag):
        try:
            results.append(local_embed_test(P, v, bounds))
        except BoundExceededError as e:
            logger.warning(f"local test at {v} undecided: {e}")
            stuck = stuck or (v, str(e), e.bound_name)
        except UnsupportedExtensionSymbolError as e:
            logger.warning(f"local test at {v} unsupported: {e}")
            stuck = stuck or (v, str(e), None)
    table = tuple(results)
    for result in table:
        if not result.ok:
            return table, ObstructionReport(
                LOCALLY_OBSTRUCTED, table, place=result.place, reason=result.reason
            )
    if stuck is not None:
        place, reason, bound = stuck
        return table, ObstructionReport(
            UNDECIDED, table, place=place, reason=reason, bound=bound
        )
    return table, None


def global_embed(
    P: SplitEmbeddingProblem, bounds: Optional[Bounds] = None
) -> ObstructionReport:
    """Decide the embedding question, returning a certified report.

    Exhausted bounds never escape: they end in an undecided report that
    names the bound.
    """
    bounds = resolve_bounds(bounds)
    if P.source.fixed_rational:
        return _global_embed_odd(P, bounds)

    table, early = _screen(P, bounds)
    if early is not None:
        return early

    A, q = P.source, P.target
    q_tilde = trace_form(A, A.fixed_one())
    a = _checkpoint_route(P, table, q_tilde, bounds)
    if a is not None:
        return ObstructionReport(EMBEDS, table, witness=a, method="checkpoint")
    a = _witness_search(P, q_tilde, bounds)
    if a is not None:
        return ObstructionReport(EMBEDS, table, witness=a, method="witness-search")

    shape = _example75_shape(P)
    if shape is not None:
        flips = {
            r.place for r in table
            if not r.place.is_infinite
            and hasse_invariant(q_tilde, r.place) != hasse_invariant(q, r.place)
        }
        certificate = example75_obstruction(shape[0], shape[1], flips, bounds)
        if certificate is not None:
            return ObstructionReport(
                GLOBALLY_OBSTRUCTED, table, certificate=certificate, method="parity"
            )
    return ObstructionReport(
        UNDECIDED,
        table,
        bound="witness_cap",
        reason="no checkpoint place, no witness and no certificate",
    )


def _global_embed_odd(P: SplitEmbeddingProblem, bounds: Bounds) -> ObstructionReport:
    table, early = _screen(P, bounds)
    if early is not None:
        return early
    try:
        reduced = odd_reduction(P, bounds)
    except PreconditionError as e:
        # every local test passed, so alpha should be represented everywhere
        logger.error(f"odd reduction failed after a clean local table: {e}")
        return ObstructionReport(
            LOCALLY_OBSTRUCTED,
            table,
            reason=f"{e.condition} (contradicts local table): {e}",
            notes=("hypothesis-contradiction",),
        )
    except BoundExceededError as e:
        return ObstructionReport(UNDECIDED, table, reason=str(e), bound=e.bound_name)
    inner = global_embed(reduced, bounds)
    if inner.verdict != EMBEDS:
        return ObstructionReport(
            inner.verdict,
            table,
            place=inner.place,
            reason=inner.reason,
            certificate=inner.certificate,
            bound=inner.bound,
            method=inner.method,
            notes=("decided on the reduced even-rank problem",),
        )
    alpha = odd_alpha(P)
    assert inner.witness is not None
    if not globally_equivalent(trace_form(P.source, inner.witness, alpha), P.target):
        raise CertificationError("extended witness fails the isometry re-check")
    return ObstructionReport(
        EMBEDS, table, witness=inner.witness, witness_fixed=alpha, method=inner.method
    )


# -- the parity certificate -------------------------------------------------------


def example75_obstruction(
    p1: int,
    p2: int,
    flip_set: Sequence[PlaceLike],
    bounds: Optional[Bounds] = None,
) -> Optional[Example75Certificate]:
    """Certificate that no global a exists for Q x Q(sqrt p1), d = (p1, p2).

    Returns None (inapplicable) unless every hypothesis of the parity
    argument holds and the Hasse flips sit exactly at p1 and p2.
    """
    bounds = resolve_bounds(bounds)
    flips = {Place.coerce(v) for v in flip_set}
    if not all(isinstance(p, int) and isprime(p) for p in (p1, p2)):
        return None
    if p1 == p2:
        return None
    checks: List[Tuple[str, bool]] = [
        ("p1 = 1 mod 4", p1 % 4 == 1),
        ("p2 = 1 mod 4", p2 % 4 == 1),
        ("p1 or p2 = 1 mod 8", p1 % 8 == 1 or p2 % 8 == 1),
        ("(p1/p2) = 1", legendre(p1, p2) == 1),
        ("flips exactly at p1 and p2", flips == {Place(p1), Place(p2)}),
        ("p2 is a square at p1", is_local_square(p2, Place(p1))),
        ("p1 is a square at p2", is_local_square(p1, Place(p2))),
        ("p1 is positive", p1 > 0),
    ]
    if not all(ok for _, ok in checks):
        logger.debug(f"parity certificate inapplicable for ({p1}, {p2}): {checks}")
        return None

    quad = FieldFactor.quadratic(p1)
    d2 = quad.embed(p2)
    sampled = 0
    for p in primes_from(2):
        if p > bounds.sample_bound:
            break
        if p in (p1, p2) or is_local_square(p1, Place(p)):
            continue
        sampled += 1
        above = places_above(quad, Place(p))
        if not all(is_ext_local_square(quad, d2, w) for w in above):
            checks.append((f"p2 square in Q_{p}(sqrt p1)", False))
            break
    if not all(ok for _, ok in checks):
        raise CertificationError(
            f"parity certificate failed a sampled check for ({p1}, {p2})"
        )
    argument = (
        f"Any a = (a1, a2) with q_a isometric to q needs Cor(a, d) = -1 at {p1}. "
        f"Since {p2} is a square at {p1} this forces ({p1}, a1)_{p1} = -1, so the "
        f"product formula gives another place v with ({p1}, a1)_v = -1.  v is not "
        f"{p2} or inf because {p1} is a square there, and at every other v where {p1} "
        f"is a nonsquare, {p2} is a square in Q_v(sqrt {p1}); so Cor(a, d)_v = -1 at a "
        f"place where the Hasse invariants of q and q~ agree, a contradiction."
    )
    return Example75Certificate(p1, p2, tuple(checks), sampled, argument)


def find_example75_pairs(limit: int) -> List[Tuple[int, int]]:
    """Prime pairs p1 < p2 <= limit meeting the parity certificate's hypotheses."""
    primes = [p for p in range(5, limit + 1) if isprime(p) and p % 4 == 1]
    pairs = []
    for i, p1 in enumerate(primes):
        for p2 in primes[i + 1:]:
            if (p1 % 8 == 1 or p2 % 8 == 1) and legendre(p1, p2) == 1:
                pairs.append((p1, p2))
    return pairs
