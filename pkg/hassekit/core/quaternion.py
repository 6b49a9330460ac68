"""Quaternion algebras over Q, skew-hermitian forms and the nonsplit construction."""
# --------------------------------------------------------------------
# Design concept
# --------------------------------------------------------------------
# 1. *Ramification by symbols* - (alpha, beta) ramifies exactly where the
#    Hilbert symbol is -1.  An algebra with a requested ramification set
#    is found by fixing alpha (nonsquare at every requested place) and
#    prescribing the symbols of beta.
#
# 2. *Relative Clifford data only* - absolute Clifford classes are never
#    formed.  Twisting by a in F^x shifts the class by Res Cor (a, d),
#    and that shift is computed place by place from corestricted
#    symbols: zero where the centre Z stays a field, (b, b) where it
#    splits.  Differences on V are read modulo the all-ones vector.
#
# 3. *Global element from pins* - local pins (corrected at the twist places
#    by an element with nontrivial corestricted symbol) plus a checkpoint
#    place v0 feed ``lemma_hs1``.  The answer is re-verified from scratch.
#
# 4. *Split places through a quadratic subfield* - a pure quaternion p
#    with p^2 a local square at v generates L = Q(p) that embeds in Q_v.
#    Over L the algebra is 2x2 matrices and each diagonal entry of h
#    becomes an explicit symmetric block.
# --------------------------------------------------------------------

import logging
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import product
from typing import Dict, FrozenSet, Iterable, List, Mapping, Optional, Sequence, Tuple

from .config import Bounds, resolve_bounds
from .errors import (
    BoundExceededError,
    CertificationError,
    DegenerateFormError,
    DomainError,
    InfeasibleError,
    PreconditionError,
)
from .etale import EtaleInvolutionAlgebra, FElement, cor_term
from .fields import Coords, FieldFactor
from .local_fields import (
    ext_hilbert_symbol,
    is_local_square_everywhere_above,
    places_above,
)
from .places import (
    INFINITY,
    TWO,
    Place,
    PlaceLike,
    SquareClass,
    hilbert_symbol,
    is_local_square,
    local_square_classes,
    support_places,
)
from .quadratic_forms import QuadraticForm
from .symbols import find_checkpoint_place, lemma_hs1, prescribe_symbols
from .utils import (
    Rational,
    as_fraction,
    as_nonzero,
    prime_support,
    rational_sqrt,
    squarefree_part,
)

logger = logging.getLogger(__name__)

Pure = Tuple[Fraction, Fraction, Fraction]
Quaternion = Tuple[Fraction, Fraction, Fraction, Fraction]
ShiftMap = Dict[Place, Tuple[int, ...]]


# -- quaternion algebras ---------------------------------------------------


@lru_cache(maxsize=1024)
def _ram_set(alpha: Fraction, beta: Fraction) -> FrozenSet[Place]:
    ram = frozenset(
        v for v in support_places(alpha, beta) if hilbert_symbol(alpha, beta, v) == -1
    )
    if len(ram) % 2:
        raise CertificationError(
            f"odd ramification {sorted(ram)} for ({alpha}, {beta})"
        )
    return ram


def ram_set(alpha: Rational, beta: Rational) -> FrozenSet[Place]:
    """Places where (alpha, beta) stays a division algebra."""
    return _ram_set(as_nonzero(alpha, "alpha"), as_nonzero(beta, "beta"))


@dataclass(frozen=True)
class QuaternionAlgebra:
    """(alpha, beta)_Q: i^2 = alpha, j^2 = beta, k = ij = -ji."""

    alpha: int
    beta: int

    def __post_init__(self) -> None:
        for name, g in (("alpha", self.alpha), ("beta", self.beta)):
            if isinstance(g, bool) or not isinstance(g, int) or g == 0:
                raise DomainError(f"{name} must be a nonzero integer, got {g!r}")
            if squarefree_part(g) != g:
                raise DomainError(f"{name} = {g} is not squarefree")

    @property
    def ram(self) -> FrozenSet[Place]:
        return ram_set(self.alpha, self.beta)

    @property
    def is_split(self) -> bool:
        return not self.ram

    def pure(self, coords: Sequence[Rational]) -> Pure:
        if len(coords) != 3:
            raise DomainError(
                f"a pure quaternion needs 3 coordinates, got {len(coords)}"
            )
        x, y, z = (as_fraction(c) for c in coords)
        return x, y, z

    def mul(self, p: Quaternion, q: Quaternion) -> Quaternion:
        a, b = self.alpha, self.beta
        p0, p1, p2, p3 = p
        q0, q1, q2, q3 = q
        return (
            p0 * q0 + a * p1 * q1 + b * p2 * q2 - a * b * p3 * q3,
            p0 * q1 + p1 * q0 - b * p2 * q3 + b * p3 * q2,
            p0 * q2 + p2 * q0 + a * p1 * q3 - a * p3 * q1,
            p0 * q3 + p3 * q0 + p1 * q2 - p2 * q1,
        )

    def mul_pure(self, p: Pure, q: Pure) -> Quaternion:
        return self.mul((Fraction(0),) + p, (Fraction(0),) + q)

    def polar(self, p: Pure, q: Pure) -> Fraction:
        """Bilinear form of Nrd on pure quaternions; polar(p, p) = Nrd(p)."""
        a, b = self.alpha, self.beta
        return -a * p[0] * q[0] - b * p[1] * q[1] + a * b * p[2] * q[2]

    def nrd(self, p: Pure) -> Fraction:
        return self.polar(p, p)

    def __str__(self) -> str:
        return f"({self.alpha}, {self.beta})_Q"


def _alpha_candidates(places: FrozenSet[Place]) -> Iterable[int]:
    n = 1
    while True:
        for g in (-n, n):
            if g == 1 or squarefree_part(g) != g:
                continue
            if INFINITY in places and g > 0:
                continue
            if all(not is_local_square(g, v) for v in places):
                yield g
        n += 1


def quaternion_from_ramset(
    ramification: Iterable[PlaceLike], bounds: Optional[Bounds] = None
) -> QuaternionAlgebra:
    """A quaternion algebra ramified exactly at the given places.

    Raises:
        InfeasibleError: the set has odd size.
        BoundExceededError: no presentation was found within the bounds.
    """
    bounds = resolve_bounds(bounds)
    places = frozenset(Place.coerce(v) for v in ramification)
    if len(places) % 2:
        raise InfeasibleError(
            f"a ramification set must have even size, got {len(places)}",
            "even-ramification",
        )
    if not places:
        return QuaternionAlgebra(1, 1)
    tried = 0
    for alpha in _alpha_candidates(places):
        if tried >= bounds.pool_cap:
            break
        tried += 1
        beta = prescribe_symbols(alpha, {v: -1 for v in places}, bounds)
        algebra = QuaternionAlgebra(alpha, squarefree_part(beta))
        if algebra.ram == places:
            logger.info(f"ramification {sorted(places)} realised by {algebra}")
            return algebra
        logger.debug(f"{algebra} ramifies at {sorted(algebra.ram)}; trying next alpha")
    raise BoundExceededError(
        "pool_cap", bounds.pool_cap, f"no presentation ramified at {sorted(places)}"
    )


# -- skew-hermitian forms --------------------------------------------------


@dataclass(frozen=True)
class SkewHermitianForm:
    """<q_1, ..., q_m> over D with pure quaternion entries."""

    algebra: QuaternionAlgebra
    diag: Tuple[Pure, ...]

    def __post_init__(self) -> None:
        if not self.diag:
            raise DegenerateFormError("a skew-hermitian form needs rank at least 1")
        entries = tuple(self.algebra.pure(q) for q in self.diag)
        for q in entries:
            if self.algebra.nrd(q) == 0:
                raise DegenerateFormError(
                    f"entry {list(map(str, q))} has reduced norm 0"
                )
        object.__setattr__(self, "diag", entries)

    @classmethod
    def of(
        cls, algebra: QuaternionAlgebra, *entries: Sequence[Rational]
    ) -> "SkewHermitianForm":
        return cls(algebra, tuple(algebra.pure(q) for q in entries))

    @property
    def rank(self) -> int:
        return len(self.diag)

    def reduced_norms(self) -> Tuple[Fraction, ...]:
        return tuple(self.algebra.nrd(q) for q in self.diag)


def disc_involution(h: SkewHermitianForm) -> SquareClass:
    """Class of (-1)^m prod Nrd(q_i), the discriminant of the adjoint involution."""
    value = Fraction((-1) ** h.rank)
    for n in h.reduced_norms():
        value *= n
    return SquareClass.of(value)


@dataclass(frozen=True)
class CliffordCenter:
    """Z = Q x Q when ``disc`` is 1, else Q(sqrt disc)."""

    disc: int

    @classmethod
    def of(cls, delta: Rational) -> "CliffordCenter":
        return cls(squarefree_part(as_nonzero(delta, "centre discriminant")))

    @property
    def split(self) -> bool:
        return self.disc == 1

    def splits_at(self, v: PlaceLike) -> bool:
        """Z tensor Q_v is Q_v x Q_v."""
        return is_local_square(self.disc, Place.coerce(v))

    def __str__(self) -> str:
        return "Q x Q" if self.split else f"Q(sqrt {self.disc})"


def clifford_center(h: SkewHermitianForm) -> CliffordCenter:
    return CliffordCenter.of(disc_involution(h).representative)


def ramified_split_places(
    ram: Iterable[PlaceLike], center: CliffordCenter
) -> FrozenSet[Place]:
    """Ramified places where the centre splits."""
    return frozenset(v for v in map(Place.coerce, ram) if center.splits_at(v))


def bad_set_V(h: SkewHermitianForm) -> FrozenSet[Place]:
    """ram(D) intersected with the places where the discriminant is a local square."""
    return ramified_split_places(h.algebra.ram, clifford_center(h))


# -- Clifford shifts and delta vectors --------------------------------------


def _shift_support(
    A: EtaleInvolutionAlgebra, a: FElement, center: CliffordCenter
) -> List[Place]:
    primes = set(prime_support(center.disc))
    for f, aj, dj in zip(A.factors, a, A.d):
        primes.update(f.bad_primes())
        primes.update(f.norm_primes(aj))
        primes.update(f.norm_primes(dj))
    return sorted({INFINITY, TWO} | {Place(p) for p in primes})


def clifford_shift(
    factors: Sequence[FieldFactor],
    a: Sequence[Sequence[Rational]],
    d: Sequence[Sequence[Rational]],
    center: CliffordCenter,
) -> ShiftMap:
    """Per-place bits of Res_{Z/Q} Cor_{F/Q} (a, d).

    Each value is (0,) where Z_v is a field and (bit, bit) where it
    splits; places not listed carry a zero shift.
    """
    A = EtaleInvolutionAlgebra(tuple(factors), tuple(tuple(dj) for dj in d))
    a_n = A.fixed_element(a)
    shift: ShiftMap = {}
    for v in _shift_support(A, a_n, center):
        if not center.splits_at(v):
            shift[v] = (0,)
            continue
        bit = 1 if cor_term(A, a_n, v) == -1 else 0
        shift[v] = (bit, bit)
    return shift


def combine_shifts(first: ShiftMap, second: ShiftMap) -> ShiftMap:
    """Componentwise sum of two shifts (Brauer classes add)."""
    combined: ShiftMap = {}
    for v in sorted(set(first) | set(second)):
        if v not in first:
            combined[v] = second[v]
        elif v not in second:
            combined[v] = first[v]
        else:
            combined[v] = tuple(p ^ q for p, q in zip(first[v], second[v]))
    return combined


@dataclass(frozen=True, eq=False)
class DeltaVector:
    """Bits on V, compared modulo the all-ones vector."""

    places: Tuple[Place, ...]
    bits: Tuple[int, ...]

    def __post_init__(self) -> None:
        if len(self.places) != len(self.bits):
            raise DomainError("a delta vector needs one bit per place")
        if any(b not in (0, 1) for b in self.bits):
            raise DomainError("delta vector bits must be 0 or 1")

    @classmethod
    def zero(cls, places: Iterable[PlaceLike]) -> "DeltaVector":
        ordered = tuple(sorted(Place.coerce(v) for v in places))
        return cls(ordered, (0,) * len(ordered))

    @classmethod
    def all_ones(cls, places: Iterable[PlaceLike]) -> "DeltaVector":
        ordered = tuple(sorted(Place.coerce(v) for v in places))
        return cls(ordered, (1,) * len(ordered))

    @classmethod
    def indicator(
        cls, places: Iterable[PlaceLike], marked: Iterable[PlaceLike]
    ) -> "DeltaVector":
        ordered = tuple(sorted(Place.coerce(v) for v in places))
        chosen = {Place.coerce(v) for v in marked}
        return cls(ordered, tuple(1 if v in chosen else 0 for v in ordered))

    def canonical(self) -> Tuple[int, ...]:
        """Representative of the class whose first bit is 0."""
        if self.bits and self.bits[0]:
            return tuple(1 - b for b in self.bits)
        return self.bits

    @property
    def is_zero(self) -> bool:
        return not any(self.canonical())

    def as_dict(self) -> Dict[Place, int]:
        return dict(zip(self.places, self.bits))

    def __add__(self, other: "DeltaVector") -> "DeltaVector":
        if self.places != other.places:
            raise DomainError("delta vectors live on different place sets")
        bits = tuple(x ^ y for x, y in zip(self.bits, other.bits))
        return DeltaVector(self.places, bits)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, DeltaVector):
            return NotImplemented
        return self.places == other.places and self.canonical() == other.canonical()

    def __hash__(self) -> int:
        return hash((self.places, self.canonical()))

    def __str__(self) -> str:
        return "(" + ", ".join(f"{v}:{b}" for v, b in zip(self.places, self.bits)) + ")"


def delta_difference(shift: ShiftMap, v_set: Iterable[PlaceLike]) -> DeltaVector:
    """Restrict a shift to V; the first component is read at each place."""
    places = tuple(sorted(Place.coerce(v) for v in v_set))
    return DeltaVector(places, tuple(shift.get(v, (0,))[0] for v in places))


def delta_classes(v_set: Iterable[PlaceLike]) -> List[DeltaVector]:
    """One representative per class of the bits on V modulo all-ones."""
    places = tuple(sorted(Place.coerce(v) for v in v_set))
    if not places:
        return [DeltaVector((), ())]
    return [
        DeltaVector(places, (0,) + rest)
        for rest in product((0, 1), repeat=len(places) - 1)
    ]


# -- checkpoint and nonsquare conditions ---------------------------------


def _default_center(
    factors: Sequence[FieldFactor], d: Sequence[Coords]
) -> CliffordCenter:
    value = Fraction(1)
    for f, dj in zip(factors, d):
        value *= f.norm(f.element(dj))
    return CliffordCenter.of(value)


def star_is_automatic(factors: Sequence[FieldFactor]) -> bool:
    """F is a field of odd degree."""
    return len(factors) == 1 and factors[0].degree % 2 == 1


def check_star(
    factors: Sequence[FieldFactor],
    d: Sequence[Sequence[Rational]],
    center: CliffordCenter,
    avoid: Iterable[PlaceLike] = (),
    bounds: Optional[Bounds] = None,
) -> Place:
    """A checkpoint place v0 outside ``avoid``.

    Every nonsquare d_j stays nonsquare there and a field centre Z stays
    a field.

    Raises:
        BoundExceededError: the checkpoint search ran out.
    """
    d_n = [f.element(dj) for f, dj in zip(factors, d)]
    try:
        return find_checkpoint_place(
            factors,
            d_n,
            z_is_field=not center.split,
            z_disc=None if center.split else center.disc,
            avoid=avoid,
            bounds=bounds,
        )
    except BoundExceededError:
        if star_is_automatic(factors):
            logger.error("checkpoint search failed although F is a field of odd degree")
        raise


def sharp_failures(
    factors: Sequence[FieldFactor],
    d: Sequence[Sequence[Rational]],
    algebra: QuaternionAlgebra,
    center: Optional[CliffordCenter] = None,
) -> List[Place]:
    """Ramified places with Z_v split where every component of d is a local square."""
    d_n = [f.element(dj) for f, dj in zip(factors, d)]
    center = center or _default_center(factors, d_n)
    return [
        v
        for v in sorted(ramified_split_places(algebra.ram, center))
        if all(
            is_local_square_everywhere_above(f, dj, v) for f, dj in zip(factors, d_n)
        )
    ]


def check_sharp(
    factors: Sequence[FieldFactor],
    d: Sequence[Sequence[Rational]],
    algebra: QuaternionAlgebra,
    center: Optional[CliffordCenter] = None,
) -> bool:
    failures = sharp_failures(factors, d, algebra, center)
    if failures and sum(f.degree for f in factors) % 2 == 1:
        logger.warning(
            f"d is a local square at {', '.join(map(str, failures))} with odd m; "
            "no local embedding exists there"
        )
    return not failures


# -- the nonsplit construction --------------------------------------------


@dataclass(frozen=True)
class NonsplitCertificate:
    """a in F with the data needed to re-check it."""

    a: FElement
    v0: Place
    center: CliffordCenter
    pinned: Tuple[Place, ...]
    pins: Tuple[Tuple[Place, FElement], ...]
    corrections: Tuple[Tuple[Place, FElement], ...]
    checked_places: Tuple[Place, ...]
    v_set: Tuple[Place, ...]
    residual: DeltaVector
    twist_class: DeltaVector
    star_automatic: bool
    sharp_automatic: bool


def _normalize_elements(
    A: EtaleInvolutionAlgebra, values: Mapping[PlaceLike, Sequence[Sequence[Rational]]]
) -> Dict[Place, FElement]:
    result: Dict[Place, FElement] = {}
    for v, value in values.items():
        element = A.fixed_element(value)
        for j, (f, x) in enumerate(zip(A.factors, element)):
            if f.is_zero(x) or f.norm(x) == 0:
                raise DomainError(f"pin at {v} has a zero component {j}")
        result[Place.coerce(v)] = element
    return result


def _multiply(A: EtaleInvolutionAlgebra, x: FElement, y: FElement) -> FElement:
    return tuple(f.mul(xj, yj) for f, xj, yj in zip(A.factors, x, y))


def _correcting_element(
    A: EtaleInvolutionAlgebra, v: Place, bounds: Bounds
) -> FElement:
    """b with Cor (b, d)_v = -1, supported on one component."""
    for j, f in enumerate(A.factors):
        if is_local_square_everywhere_above(f, A.d[j], v):
            continue
        candidates = [f.embed(r) for r in local_square_classes(v)]
        candidates.extend(f.small_elements(bounds.element_height))
        for c in candidates:
            if f.norm(c) == 0:
                continue
            b = tuple(c if k == j else g.one() for k, g in enumerate(A.factors))
            if cor_term(A, b, v) == -1:
                logger.debug(f"correcting element at {v}: {b}")
                return b
    raise BoundExceededError(
        "element_height", bounds.element_height, f"no correcting element found at {v}"
    )


def _target_shift(
    A: EtaleInvolutionAlgebra, pins: Dict[Place, FElement], center: CliffordCenter
) -> ShiftMap:
    shift: ShiftMap = {}
    for v, pin in pins.items():
        local = clifford_shift(A.factors, pin, A.d, center)
        shift[v] = local.get(v, (0,) if not center.splits_at(v) else (0, 0))
    return shift


def verify_nonsplit_certificate(
    algebra: QuaternionAlgebra,
    factors: Sequence[FieldFactor],
    d: Sequence[Sequence[Rational]],
    certificate: NonsplitCertificate,
    local_pins: Mapping[PlaceLike, Sequence[Sequence[Rational]]],
    twist_places: Iterable[PlaceLike],
) -> bool:
    """Recompute every claim of a certificate from the inputs."""
    A = EtaleInvolutionAlgebra(tuple(factors), tuple(tuple(dj) for dj in d))
    a = A.fixed_element(certificate.a)
    center = certificate.center
    corrected = dict(certificate.pins)
    for v in certificate.pinned:
        pin = corrected[v]
        for f, aj, pj in zip(A.factors, a, pin):
            if not is_local_square_everywhere_above(f, f.div(aj, pj), v):
                logger.debug(f"a is not in the pinned class at {v}")
                return False

    shift_a = clifford_shift(A.factors, a, A.d, center)
    skip = set(certificate.pinned) | {certificate.v0}
    for v in _shift_support(A, a, center):
        if v not in skip and cor_term(A, a, v) != 1:
            logger.debug(f"corestricted symbol of a is nontrivial at {v}")
            return False

    v_set = sorted(ramified_split_places(algebra.ram, center))
    target = _target_shift(A, corrected, center)
    residual = delta_difference(combine_shifts(shift_a, target), v_set)
    if not residual.is_zero:
        return False
    base = _normalize_elements(A, local_pins)
    for v in certificate.pinned:
        base.setdefault(v, A.fixed_one())
    pinned_shift = _target_shift(A, base, center)
    twist = delta_difference(combine_shifts(shift_a, pinned_shift), v_set)
    return twist == DeltaVector.indicator(v_set, twist_places)


def nonsplit_global_a(
    algebra: QuaternionAlgebra,
    m: int,
    factors: Sequence[FieldFactor],
    d: Sequence[Sequence[Rational]],
    local_pins: Mapping[PlaceLike, Sequence[Sequence[Rational]]],
    twist_places: Iterable[PlaceLike] = (),
    z_disc: Optional[Rational] = None,
    bounds: Optional[Bounds] = None,
) -> NonsplitCertificate:
    """Global a in F matching the local pins, with the twist places corrected.

    The centre defaults to Q(sqrt N_{F/Q}(d)).  Pins missing at a place
    of S = ram(D) + infinity + twist places default to 1.

    Raises:
        PreconditionError: d is a local square at a place of V, or no
            checkpoint place exists.
    """
    bounds = resolve_bounds(bounds)
    A = EtaleInvolutionAlgebra(tuple(factors), tuple(tuple(dj) for dj in d))
    degree = sum(f.degree for f in A.factors)
    if degree != m:
        raise DomainError(f"F has degree {degree}, expected m = {m}")
    twists = frozenset(Place.coerce(v) for v in twist_places)
    ram = algebra.ram
    if not twists <= ram:
        raise DomainError(
            f"twist places {sorted(twists - ram)} are not ramified in {algebra}"
        )
    if z_disc is not None:
        center = CliffordCenter.of(z_disc)
    else:
        center = _default_center(A.factors, A.d)

    failures = sharp_failures(A.factors, A.d, algebra, center)
    if failures:
        raise PreconditionError(
            f"d is a local square at {', '.join(map(str, failures))}",
            "sharp",
        )

    pins = _normalize_elements(A, local_pins)
    pinned = sorted(set(ram) | {INFINITY} | twists | set(pins))
    for v in pinned:
        pins.setdefault(v, A.fixed_one())

    corrected = dict(pins)
    corrections: List[Tuple[Place, FElement]] = []
    for v in sorted(twists):
        if not center.splits_at(v):
            continue
        b = _correcting_element(A, v, bounds)
        corrections.append((v, b))
        corrected[v] = _multiply(A, pins[v], b)

    try:
        v0 = check_star(A.factors, A.d, center, avoid=pinned, bounds=bounds)
    except BoundExceededError as e:
        raise PreconditionError(f"no checkpoint place: {e}", "star") from e

    a = lemma_hs1(A.factors, A.d, corrected, v0, bounds)
    shift_a = clifford_shift(A.factors, a, A.d, center)
    v_set = tuple(sorted(ramified_split_places(ram, center)))
    corrected_shift = combine_shifts(shift_a, _target_shift(A, corrected, center))
    pinned_shift = combine_shifts(shift_a, _target_shift(A, pins, center))
    certificate = NonsplitCertificate(
        a=a,
        v0=v0,
        center=center,
        pinned=tuple(pinned),
        pins=tuple(sorted(corrected.items())),
        corrections=tuple(corrections),
        checked_places=tuple(_shift_support(A, a, center)),
        v_set=v_set,
        residual=delta_difference(corrected_shift, v_set),
        twist_class=delta_difference(pinned_shift, v_set),
        star_automatic=star_is_automatic(A.factors),
        sharp_automatic=m % 2 == 1,
    )
    if not verify_nonsplit_certificate(
        algebra, A.factors, A.d, certificate, local_pins, twists
    ):
        raise CertificationError(
            f"nonsplit certificate for a = {a} failed re-verification"
        )
    logger.info(f"nonsplit construction: a = {a}, v0 = {v0}, centre {center}")
    return certificate


# -- split places -----------------------------------------------------------


def _splitting_element(algebra: QuaternionAlgebra, v: Place, bounds: Bounds) -> Pure:
    for height in range(1, 2 * bounds.element_height + 1):
        for coords in product(range(-height, height + 1), repeat=3):
            if max(abs(c) for c in coords) != height:
                continue
            p = algebra.pure(coords)
            square = -algebra.nrd(p)
            if square != 0 and is_local_square(square, v):
                return p
    raise BoundExceededError(
        "element_height",
        bounds.element_height,
        f"no splitting element for {algebra} at {v}",
    )


def _orthogonal_partner(algebra: QuaternionAlgebra, p: Pure) -> Pure:
    """A pure quaternion anticommuting with p, with nonzero reduced norm."""
    a, b = algebra.alpha, algebra.beta
    x, y, z = p
    spanning = [
        algebra.pure((b * y, -a * x, 0)),
        algebra.pure((b * z, 0, x)),
        algebra.pure((0, a * z, y)),
    ]
    candidates = list(spanning)
    for i in range(3):
        for j in range(i + 1, 3):
            for sign in (1, -1):
                coords = tuple(u + sign * t for u, t in zip(spanning[i], spanning[j]))
                candidates.append(algebra.pure(coords))
    for w in candidates:
        if any(w) and algebra.polar(p, w) == 0 and algebra.nrd(w) != 0:
            return w
    raise CertificationError(f"no anisotropic vector orthogonal to {p}")


def _local_representative(field: FieldFactor, e: Coords, v: Place) -> Fraction:
    """A rational in the Q_v square class of e, through a split place of ``field``."""
    if field.rank == 0:
        return e[0]
    w = places_above(field, v)[0]
    classes = local_square_classes(v)
    for r in classes:
        if all(
            ext_hilbert_symbol(field, e, field.embed(y), w) == hilbert_symbol(r, y, v)
            for y in classes
        ):
            return r
    raise CertificationError(f"no rational class matches {e} at {v}")


def split_place_form(
    h: SkewHermitianForm, v: PlaceLike, bounds: Optional[Bounds] = None
) -> QuadraticForm:
    """The rank-2m quadratic form of h at a place where D splits.

    Entries are rationals in the right local square classes at v, so the
    returned form is equivalent to the genuine one over Q_v.

    Raises:
        DomainError: D is ramified at v.
    """
    bounds = resolve_bounds(bounds)
    v = Place.coerce(v)
    D = h.algebra
    if v in D.ram:
        raise DomainError(f"{D} is ramified at {v}")

    p = _splitting_element(D, v, bounds)
    w = _orthogonal_partner(D, p)
    pw_full = D.mul_pure(p, w)
    pw = (pw_full[1], pw_full[2], pw_full[3])
    c = -D.nrd(p)
    beta2 = -D.nrd(w)

    core = squarefree_part(c)
    root = rational_sqrt(c / core)
    assert root is not None
    field = FieldFactor.rational() if core == 1 else FieldFactor.quadratic(core)
    s = field.embed(root) if core == 1 else field.element((0, root))

    diag: List[Fraction] = []
    for q in h.diag:
        l1 = D.polar(q, p) / D.nrd(p)
        l2 = D.polar(q, w) / D.nrd(w)
        l3 = D.polar(q, pw) / D.nrd(pw)
        rebuilt = tuple(l1 * a + l2 * b + l3 * e for a, b, e in zip(p, w, pw))
        if rebuilt != q:
            raise CertificationError(f"{q} is not spanned by the splitting basis")
        # J * M(q) for the splitting p -> diag(s, -s), w -> [[0, beta2], [1, 0]]
        top = field.sub(field.embed(l2), field.scale(s, l3))
        off = field.scale(s, -l1)
        bottom = field.scale(field.add(field.embed(l2), field.scale(s, l3)), -beta2)
        det = field.sub(field.mul(top, bottom), field.square(off))
        if det != field.embed(D.nrd(q)):
            raise CertificationError(
                f"block determinant {det} differs from Nrd {D.nrd(q)}"
            )
        if not field.is_zero(top):
            block = (top, field.div(det, top))
        elif not field.is_zero(bottom):
            block = (bottom, field.div(det, bottom))
        else:
            block = (field.scale(off, 2), field.scale(off, -2))
        diag.extend(_local_representative(field, e, v) for e in block)
    form = QuadraticForm(tuple(diag))
    logger.debug(f"split form of h at {v} via p^2 = {c}: {form}")
    return form
