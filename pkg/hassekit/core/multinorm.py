"""Multinorm principle for biquadratic fields: the failure witness and searches."""
# --------------------------------------------------------------------
# Design concept
# --------------------------------------------------------------------
# 1. *Split sets as predicates* - v lies in S_i iff a_i is a local
#    square at v, so every product "over S_i" is a finite product over
#    the support of the data (other factors are tamely +1).
#
# 2. *phi computed six ways* - the homomorphism phi is evaluated through
#    all six expressions and they must agree before a value is returned.
#
# 3. *Witness by prescription* - u1 in S_1 and u2 outside S_1, both with
#    b a local nonsquare, then (b, s) = -1 exactly at u1 and u2.
#
# 4. *Two fields by isotropy* - s is in N_1^v N_2^v iff <1, -a, -s, bs>
#    is isotropic over Q_v; globally only explicit decompositions count.
# --------------------------------------------------------------------

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Tuple

from .config import Bounds, resolve_bounds
from .errors import CertificationError, DomainError, PreconditionError
from .places import Place, PlaceLike, hilbert_symbol, is_local_square, support_places
from .quadratic_forms import QuadraticForm, is_isotropic
from .symbols import prescribe_symbols
from .utils import (
    Rational,
    as_nonzero,
    is_rational_square,
    legendre,
    primes_from,
    rational_sqrt,
    squarefree_part,
)

logger = logging.getLogger(__name__)

PHI_EXPRESSIONS = ((1, 2), (1, 3), (2, 3), (2, 1), (3, 1), (3, 2))


@dataclass(frozen=True)
class BiquadraticDatum:
    """F = Q(sqrt a, sqrt b) with subfields Q(sqrt a_i), a_1 = a, a_2 = b, a_3 = ab."""

    a: int
    b: int

    def __post_init__(self) -> None:
        for g in (self.a, self.b):
            if isinstance(g, bool) or not isinstance(g, int) or g == 0:
                raise DomainError(f"{g!r} must be a nonzero integer")
            if squarefree_part(g) != g or g == 1:
                raise DomainError(f"{g} must be squarefree and not 1")
        if self.a == self.b or squarefree_part(self.a * self.b) == 1:
            raise DomainError(f"Q(sqrt {self.a}, sqrt {self.b}) is not of degree 4")

    @property
    def generators(self) -> Tuple[int, int, int]:
        return self.a, self.b, squarefree_part(self.a * self.b)

    def gen(self, i: int) -> int:
        return self.generators[i - 1]

    def in_split_set(self, i: int, v: PlaceLike) -> bool:
        """v in S_i: Q(sqrt a_i) has local degree 1 at v."""
        return is_local_square(self.gen(i), Place.coerce(v))

    def split_indices(self, v: PlaceLike) -> List[int]:
        return [i for i in (1, 2, 3) if self.in_split_set(i, v)]


@dataclass(frozen=True)
class DegreeHypothesis:
    """Every place lies in some S_i, checked at the bad places and sampled."""

    holds: bool
    structural: bool
    failures: Tuple[Place, ...]
    sampled: int


@dataclass(frozen=True)
class NormProductCheck:
    """Symbol data for s in N_1^v N_2^v N_3^v at one place.

    ``norm_groups`` lists the i with (a_i, s)_v = +1, i.e. s in N_i^v.
    """

    place: Place
    norm_groups: Tuple[int, ...]
    split_indices: Tuple[int, ...]

    @property
    def consistent(self) -> bool:
        """A split index has N_i^v = Q_v^x, so it must be among the norm groups."""
        return set(self.split_indices) <= set(self.norm_groups)

    @property
    def holds(self) -> bool:
        """s lies in some N_i^v, hence in the product."""
        return bool(self.norm_groups)


@dataclass(frozen=True)
class MultinormWitness:
    s: Fraction
    phi: int
    u1: Place
    u2: Place
    local_checks: Tuple[NormProductCheck, ...]


def check_local_degree_hypothesis(
    B: BiquadraticDatum,
    sample_bound: Optional[int] = None,
    bounds: Optional[Bounds] = None,
) -> DegreeHypothesis:
    """Is [F_v : Q_v] <= 2 everywhere?

    Odd primes not dividing ab satisfy it automatically (the three
    Legendre symbols multiply to +1); 2, infinity and the primes of ab are
    checked directly, and further primes are sampled up to the bound.
    """
    bounds = resolve_bounds(bounds)
    limit = sample_bound if sample_bound is not None else bounds.sample_bound
    bad = support_places(B.a, B.b)
    failures = tuple(v for v in bad if not B.split_indices(v))
    sampled = 0
    for p in primes_from(3):
        if p > limit:
            break
        sampled += 1
        if not B.split_indices(Place(p)) and Place(p) not in failures:
            failures += (Place(p),)
    structural = all(v in bad for v in failures)
    return DegreeHypothesis(not failures, structural, failures, sampled)


def phi_expressions(B: BiquadraticDatum, x: Rational) -> Dict[Tuple[int, int], int]:
    """prod_{v in S_i} (a_k, x)_v for the six (i, k) pairs."""
    x = as_nonzero(x, "x")
    places = support_places(B.a, B.b, x)
    values: Dict[Tuple[int, int], int] = {}
    for i, k in PHI_EXPRESSIONS:
        value = 1
        for v in places:
            if B.in_split_set(i, v):
                value *= hilbert_symbol(B.gen(k), x, v)
        values[(i, k)] = value
    return values


def phi(B: BiquadraticDatum, x: Rational) -> int:
    """phi(x) = prod_{v in S_1} (b, x)_v, cross-checked against the other five forms."""
    values = phi_expressions(B, x)
    if len(set(values.values())) != 1:
        raise CertificationError(f"phi expressions disagree for x = {x}: {values}")
    return values[(1, 2)]


def local_norm_product_membership(
    B: BiquadraticDatum, s: Rational, v: PlaceLike
) -> NormProductCheck:
    """Which local norm groups N_i^v contain s, and which subfields split at v."""
    v = Place.coerce(v)
    s = as_nonzero(s, "s")
    groups = tuple(i for i in (1, 2, 3) if hilbert_symbol(B.gen(i), s, v) == 1)
    return NormProductCheck(v, groups, tuple(B.split_indices(v)))


def _auxiliary_places(B: BiquadraticDatum) -> Tuple[Place, Place]:
    u1: Optional[int] = None
    u2: Optional[int] = None
    for p in primes_from(3):
        if B.a % p == 0 or B.b % p == 0:
            continue
        if legendre(B.b, p) != -1:
            continue
        if legendre(B.a, p) == 1 and u1 is None:
            u1 = p
        elif legendre(B.a, p) == -1 and u2 is None:
            u2 = p
        if u1 is not None and u2 is not None:
            return Place(u1), Place(u2)
    raise CertificationError("prime iteration ended")


def multinorm_witness(
    B: BiquadraticDatum, bounds: Optional[Bounds] = None
) -> MultinormWitness:
    """s with phi(s) = -1, so s is not in N_1 N_2 N_3, though it is locally everywhere.

    Raises:
        PreconditionError: some place has local degree 4.
    """
    bounds = resolve_bounds(bounds)
    hypothesis = check_local_degree_hypothesis(B, bounds=bounds)
    if not hypothesis.holds:
        raise PreconditionError(
            f"local degree 4 at {', '.join(map(str, hypothesis.failures))}",
            "local-degree",
        )
    u1, u2 = _auxiliary_places(B)
    s = prescribe_symbols(B.b, {u1: -1, u2: -1}, bounds)
    value = phi(B, s)
    if value != -1:
        raise CertificationError(f"multinorm witness {s} has phi = {value}")

    checks = []
    for p in primes_from(2):
        if p > bounds.sample_bound:
            break
        checks.append(local_norm_product_membership(B, s, p))
    checks.append(local_norm_product_membership(B, s, "inf"))
    for c in checks:
        if not c.consistent:
            raise CertificationError(f"split subfield without norm group at {c.place}")
        if not c.holds:
            raise CertificationError(f"local norm product fails at {c.place}")
    logger.info(f"multinorm witness for ({B.a}, {B.b}): s = {s} via u1={u1}, u2={u2}")
    return MultinormWitness(s, value, u1, u2, tuple(checks))


def norm_form(alpha: Rational, beta: Rational, a: Rational) -> QuadraticForm:
    """x0^2 - a alpha x1^2 - a beta x2^2 + a alpha beta x3^2."""
    alpha, beta, a = as_nonzero(alpha), as_nonzero(beta), as_nonzero(a)
    return QuadraticForm.of(1, -a * alpha, -a * beta, a * alpha * beta)


def norm_form_indefinite(alpha: Rational, beta: Rational, a: Rational) -> bool:
    """True iff the reduced-norm form on K + sqrt(a) D_0^- is indefinite over R."""
    a = as_nonzero(a, "a")
    if a <= 0:
        raise PreconditionError("a must be positive at the real place", "a-positive")
    if is_rational_square(a):
        raise PreconditionError("a must not be a square", "a-nonsquare")
    return is_isotropic(norm_form(alpha, beta, a), "inf")


@dataclass(frozen=True)
class TwoFieldDecomposition:
    """s (y1^2 - b y2^2) = x1^2 - a x2^2, so s lies in N_1 N_2."""

    s: int
    x: Tuple[int, int]
    y: Tuple[int, int]


@dataclass(frozen=True)
class TwoFieldSearch:
    """Outcome of the two-field multinorm search over squarefree s."""

    a: int
    b: int
    checked: int
    decomposed: Tuple[TwoFieldDecomposition, ...]
    local_failures: Tuple[int, ...]
    undecided: Tuple[int, ...]


def _squarefree_range(limit: int) -> List[int]:
    values = [n for n in range(1, limit + 1) if squarefree_part(n) == n]
    return sorted([-n for n in values] + values)


def two_field_locally_ok(B: BiquadraticDatum, s: Rational) -> bool:
    """s in N_1^v N_2^v at every place, through isotropy of <1, -a, -s, bs>."""
    s = as_nonzero(s, "s")
    form = QuadraticForm.of(1, -B.a, -s, B.b * s)
    return all(is_isotropic(form, v) for v in support_places(B.a, B.b, s))


def _decompose(
    B: BiquadraticDatum, s: int, height: int
) -> Optional[TwoFieldDecomposition]:
    for y1 in range(height + 1):
        for y2 in range(height + 1):
            n_y = y1 * y1 - B.b * y2 * y2
            if n_y == 0:
                continue
            r = s * n_y
            for x1 in range(height + 1):
                x2 = rational_sqrt(Fraction(x1 * x1 - r, B.a))
                if x2 is None or x2.denominator != 1 or x2 > height:
                    continue
                return TwoFieldDecomposition(s, (x1, int(x2)), (y1, y2))
    return None


def two_field_multinorm_search(
    B: BiquadraticDatum,
    limit: int,
    height: Optional[int] = None,
    bounds: Optional[Bounds] = None,
) -> TwoFieldSearch:
    """Look for s that is in N_1 N_2 locally everywhere but has no global split.

    Only the two fields Q(sqrt a) and Q(sqrt b) are used.  Every squarefree
    s with |s| <= limit that passes the local test is matched against
    explicit decompositions of height at most ``height``; the ones left
    over are reported as undecided, never as counterexamples.
    """
    bounds = resolve_bounds(bounds)
    if limit < 1:
        raise DomainError(f"limit must be positive, got {limit}")
    height = height if height is not None else bounds.element_height
    decomposed: List[TwoFieldDecomposition] = []
    failures: List[int] = []
    undecided: List[int] = []
    candidates = _squarefree_range(limit)
    for s in candidates:
        if not two_field_locally_ok(B, s):
            failures.append(s)
            continue
        found = _decompose(B, s, height)
        if found is None:
            undecided.append(s)
        else:
            decomposed.append(found)
    if undecided:
        logger.warning(f"two-field search ({B.a}, {B.b}): undecided for {undecided}")
    logger.info(
        f"two-field search ({B.a}, {B.b}): {len(decomposed)} decomposed, "
        f"{len(failures)} locally excluded"
    )
    return TwoFieldSearch(
        B.a,
        B.b,
        len(candidates),
        tuple(decomposed),
        tuple(failures),
        tuple(undecided),
    )
