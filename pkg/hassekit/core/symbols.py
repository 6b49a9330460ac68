"""Constructive symbol prescription: x with (a, x)_v = eps_v, and its relatives."""
# --------------------------------------------------------------------
# Design concept
# --------------------------------------------------------------------
# 1. *Small answers first* - ``lemma_hs`` first enumerates s = +-prod p
#    over the primes already in play, smallest |s| first.  Most desk
#    inputs are solved here and the answers stay readable.
#
# 2. *Weak approximation + Dirichlet* - otherwise a local class c_v with
#    the right symbol is picked at every place in play, the sign and the
#    parities of the valuations are fixed directly, and the remaining
#    unit conditions become congruences for one auxiliary prime q.  CRT
#    gives q's residue class and the first prime in that progression is
#    used.  The product formula forces (s, t)_q = +1.
#
# 3. *Linear algebra over extension factors* - for a quadratic or
#    biquadratic factor the unknown s ranges over products of a finite
#    list of S-units; every requirement (class equal to a pin, symbol
#    trivial) is linear over GF(2) in the exponent vector, so the search
#    is one Gaussian elimination.  The list grows with the element height
#    until a solution appears or the bound is reached.
#
# 4. *Self-certifying* - every returned value is re-verified by symbol
#    recomputation; a failed re-check raises ``CertificationError``.
# --------------------------------------------------------------------

import logging
from fractions import Fraction
from itertools import combinations
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Set, Tuple

from sympy import isprime
from sympy.ntheory.modular import crt

from .config import Bounds, resolve_bounds
from .errors import (
    BoundExceededError,
    CertificationError,
    InfeasibleError,
    PreconditionError,
)
from .fields import Coords, FieldFactor
from .local_fields import (
    ext_hilbert_symbol,
    is_ext_local_square,
    local_class_bits,
    places_above,
)
from .places import (
    INFINITY,
    TWO,
    Place,
    PlaceLike,
    hilbert_symbol,
    is_local_square,
    local_square_classes,
    support_places,
)
from .utils import (
    Rational,
    as_nonzero,
    least_nonresidue,
    legendre,
    prime_support,
    primes_from,
    residue,
    solve_gf2,
    unit_part,
    valuation,
)

logger = logging.getLogger(__name__)

PHASE_ONE_POOL = 14


def _normalize_targets(targets: Mapping[PlaceLike, int]) -> Dict[Place, int]:
    result: Dict[Place, int] = {}
    for key, value in targets.items():
        if value not in (1, -1):
            raise InfeasibleError(f"target at {key} must be +1 or -1", "sign")
        result[Place.coerce(key)] = int(value)
    return result


def _normalize_pins(
    pins: Optional[Mapping[PlaceLike, Rational]]
) -> Dict[Place, Fraction]:
    return {
        Place.coerce(k): as_nonzero(v, f"pin at {k}") for k, v in (pins or {}).items()
    }


def _check_feasible(
    t: Fraction, targets: Dict[Place, int], pins: Dict[Place, Fraction]
) -> None:
    product = 1
    for value in targets.values():
        product *= value
    if product != 1:
        raise InfeasibleError(
            "the product of the prescribed symbols is not +1", "product-formula"
        )
    for v, value in sorted(targets.items()):
        if value == -1 and is_local_square(t, v):
            raise InfeasibleError(
                f"{t} is a local square at {v} but the symbol there must be -1",
                "local-square",
            )
    for v, pin in sorted(pins.items()):
        if hilbert_symbol(pin, t, v) != targets.get(v, 1):
            raise InfeasibleError(
                f"pin {pin} at {v} has symbol {hilbert_symbol(pin, t, v)} against {t}, "
                f"expected {targets.get(v, 1)}",
                "pin-symbol",
            )


def _satisfies(
    s: Fraction, t: Fraction, targets: Dict[Place, int], pins: Dict[Place, Fraction]
) -> bool:
    for v in support_places(s, t, extra=list(targets) + list(pins)):
        if hilbert_symbol(s, t, v) != targets.get(v, 1):
            return False
    return all(is_local_square(s / pin, v) for v, pin in pins.items())


def _phase_one(
    t: Fraction,
    targets: Dict[Place, int],
    pins: Dict[Place, Fraction],
    pool: List[int],
    cap: int,
) -> Optional[Fraction]:
    if len(pool) > PHASE_ONE_POOL:
        return None
    candidates: List[int] = []
    for size in range(len(pool) + 1):
        for subset in combinations(pool, size):
            value = 1
            for p in subset:
                value *= p
            candidates.extend((value, -value))
    candidates.sort(key=lambda c: (abs(c), c < 0))
    for tried, c in enumerate(candidates):
        if tried >= cap:
            break
        if _satisfies(Fraction(c), t, targets, pins):
            return Fraction(c)
    return None


def _local_choice(
    v: Place, t: Fraction, targets: Dict[Place, int], pins: Dict[Place, Fraction]
) -> Fraction:
    if v in pins:
        return pins[v]
    want = targets.get(v, 1)
    for c in local_square_classes(v):
        if hilbert_symbol(c, t, v) == want:
            return c
    raise InfeasibleError(
        f"no local class at {v} has symbol {want} against {t}", "local-class"
    )


def _phase_two(
    t: Fraction,
    targets: Dict[Place, int],
    pins: Dict[Place, Fraction],
    sigma: List[Place],
    cap: int,
) -> Fraction:
    classes = {v: _local_choice(v, t, targets, pins) for v in sigma}
    sign = 1 if classes[INFINITY] > 0 else -1
    finite = [v.prime for v in sigma if v.prime is not None]
    base = Fraction(sign)
    for p in finite:
        if valuation(classes[Place(p)], p) % 2:
            base *= p

    moduli: List[int] = []
    residues: List[int] = []
    for p in finite:
        wanted = unit_part(classes[Place(p)], p)
        have = unit_part(base, p)
        if p == 2:
            moduli.append(8)
            residues.append(residue(wanted / have, 8))
        else:
            ratio = legendre(residue(wanted, p), p) * legendre(residue(have, p), p)
            moduli.append(p)
            residues.append(1 if ratio == 1 else least_nonresidue(p))

    solution = crt(moduli, residues)
    if solution is None:
        raise CertificationError("incompatible congruences for the auxiliary prime")
    start, modulus = int(solution[0]), int(solution[1])
    logger.debug(f"auxiliary prime search: q = {start} mod {modulus}")
    for k in range(cap):
        q = start + k * modulus
        if q < 2 or not isprime(q):
            continue
        s = base * q
        if _satisfies(s, t, targets, pins):
            logger.debug(f"auxiliary prime {q} gives s = {s}")
            return s
    raise BoundExceededError(
        "prescribe_cap", cap, f"no auxiliary prime found in {start} + k*{modulus}"
    )


def lemma_hs(
    t: Rational,
    targets: Mapping[PlaceLike, int],
    pins: Optional[Mapping[PlaceLike, Rational]] = None,
    bounds: Optional[Bounds] = None,
) -> Fraction:
    """Find s with (s, t)_v = targets[v] everywhere and s/pins[v] a square at v.

    Unlisted places have target +1.

    Raises:
        InfeasibleError: targets or pins violate a necessary condition.
        BoundExceededError: the auxiliary prime search ran out.
    """
    bounds = resolve_bounds(bounds)
    t = as_nonzero(t, "t")
    targets_n = _normalize_targets(targets)
    pins_n = _normalize_pins(pins)
    _check_feasible(t, targets_n, pins_n)

    sigma_set: Set[Place] = {INFINITY, TWO}
    sigma_set.update(targets_n)
    sigma_set.update(pins_n)
    sigma_set.update(Place(p) for p in prime_support(t))
    sigma = sorted(sigma_set)
    pool = [v.prime for v in sigma if v.prime is not None]

    s = _phase_one(t, targets_n, pins_n, pool, bounds.witness_cap)
    if s is None:
        logger.info(f"small search failed for t={t}; building auxiliary prime")
        s = _phase_two(t, targets_n, pins_n, sigma, bounds.prescribe_cap)
    if not _satisfies(s, t, targets_n, pins_n):
        raise CertificationError(f"s = {s} fails re-verification for t = {t}")
    return s


def prescribe_symbols(
    a: Rational, targets: Mapping[PlaceLike, int], bounds: Optional[Bounds] = None
) -> Fraction:
    """Find x with (a, x)_v = targets[v] at every place (+1 where unlisted)."""
    return lemma_hs(a, targets, None, bounds)


# -- extension factors ---------------------------------------------------


Element = Tuple[Coords, ...]


def _product(factor: FieldFactor, gens: Sequence[Coords], mask: int) -> Coords:
    result = factor.one()
    for i, g in enumerate(gens):
        if mask >> i & 1:
            result = factor.mul(result, g)
    return result


def _hs1_certify(
    factor: FieldFactor,
    s: Coords,
    t: Coords,
    pins: Dict[Place, Coords],
    v0: Place,
) -> bool:
    for v, pin in pins.items():
        ratio = factor.div(s, pin)
        above = places_above(factor, v)
        if not all(is_ext_local_square(factor, ratio, w) for w in above):
            return False
    primes = set(factor.norm_primes(s)) | set(factor.norm_primes(t))
    primes |= set(factor.bad_primes())
    for v in [INFINITY] + [Place(p) for p in sorted(primes)]:
        if v in pins or v == v0:
            continue
        for w in places_above(factor, v):
            if ext_hilbert_symbol(factor, s, t, w) != 1:
                return False
    return True


def _hs1_generators(
    factor: FieldFactor, pool: Set[int], height: int, free_count: int, t: Coords
) -> List[Coords]:
    gens: List[Coords] = [factor.embed(-1)]
    gens.extend(factor.gen_sqrt(i) for i in range(factor.rank))
    added = 0
    for q in primes_from(3):
        if added >= free_count:
            break
        if q in pool or any(q % g == 0 for g in factor.gens):
            continue
        above = places_above(factor, Place(q))
        if all(is_ext_local_square(factor, t, w) for w in above):
            pool.add(q)
            added += 1
    smooth_limit = max(pool) if pool else 2
    for z in factor.small_elements(height):
        if factor.norm(z) == 0:
            continue
        primes = factor.norm_primes(z)
        if all(p in pool or p <= smooth_limit for p in primes):
            pool.update(primes)
            gens.append(z)
    gens.extend(factor.embed(p) for p in sorted(pool))
    return gens


def _hs1_field(
    factor: FieldFactor,
    t: Coords,
    pins: Dict[Place, Coords],
    v0: Place,
    bounds: Bounds,
) -> Coords:
    if not pins and factor.is_global_square(t):
        return factor.one()
    if all(
        is_ext_local_square(factor, pin, w)
        for v, pin in pins.items()
        for w in places_above(factor, v)
    ) and _hs1_certify(factor, factor.one(), t, pins, v0):
        return factor.one()

    base_pool: Set[int] = set(factor.bad_primes()) | set(factor.norm_primes(t))
    base_pool.update(v.prime for v in pins if v.prime is not None)
    for pin in pins.values():
        base_pool.update(factor.norm_primes(pin))
    if v0.prime is not None:
        base_pool.add(v0.prime)

    for height in range(1, bounds.element_height + 1):
        pool = set(base_pool)
        gens = _hs1_generators(factor, pool, height, 2 * height, t)
        if len(gens) > bounds.pool_cap * 4:
            gens = gens[: bounds.pool_cap * 4]
        equations: List[Tuple[int, int]] = []
        places = [INFINITY] + [Place(p) for p in sorted(pool)]
        for v in places:
            for w in places_above(factor, v):
                if v in pins:
                    target = local_class_bits(factor, pins[v], w)
                    columns = [local_class_bits(factor, g, w) for g in gens]
                    for bit, rhs in enumerate(target):
                        row = sum(col[bit] << i for i, col in enumerate(columns))
                        equations.append((row, rhs))
                elif v != v0 and not is_ext_local_square(factor, t, w):
                    row = sum(
                        (1 if ext_hilbert_symbol(factor, g, t, w) == -1 else 0) << i
                        for i, g in enumerate(gens)
                    )
                    equations.append((row, 0))
        solution = solve_gf2(equations)
        logger.debug(
            f"class solve over {factor}: height {height}, {len(gens)} generators, "
            f"{len(equations)} equations, solved={solution is not None}"
        )
        if solution is None:
            continue
        s = _product(factor, gens, solution)
        if _hs1_certify(factor, s, t, pins, v0):
            return s
        logger.warning(f"candidate over {factor} failed certification; enlarging")
    raise BoundExceededError(
        "element_height",
        bounds.element_height,
        f"no element of {factor} found with the prescribed local classes",
    )


def lemma_hs1(
    factors: Sequence[FieldFactor],
    t: Sequence[Coords],
    pins: Mapping[PlaceLike, Sequence[Coords]],
    v0: PlaceLike,
    bounds: Optional[Bounds] = None,
) -> Element:
    """Find s in F with s ~ pins[v] locally at pinned v and (s, t) trivial elsewhere.

    The componentwise symbol may be nontrivial only at pinned places and at v0.

    Raises:
        PreconditionError: some globally nonsquare t_j is a local square at
            every place above v0.
        BoundExceededError: the generator pool ran out.
    """
    bounds = resolve_bounds(bounds)
    v0 = Place.coerce(v0)
    pins_n = {Place.coerce(k): tuple(v) for k, v in pins.items()}
    if v0 in pins_n:
        raise PreconditionError(f"v0 = {v0} must not be pinned", "v0-unpinned")
    if len(t) != len(factors):
        raise PreconditionError("t needs one component per factor", "shape")
    t_n = [factor.element(tj) for factor, tj in zip(factors, t)]

    for j, (factor, tj) in enumerate(zip(factors, t_n)):
        if factor.is_global_square(tj):
            continue
        if all(is_ext_local_square(factor, tj, w) for w in places_above(factor, v0)):
            raise PreconditionError(
                f"component {j} of t is a local square at every place over {v0}",
                "v0-nonsquare",
            )

    result: List[Coords] = []
    for j, (factor, tj) in enumerate(zip(factors, t_n)):
        factor_pins = {v: factor.element(pin[j]) for v, pin in pins_n.items()}
        if factor.rank == 0:
            rational_pins = {v: pin[0] for v, pin in factor_pins.items()}
            targets = {
                v: hilbert_symbol(pin, tj[0], v) for v, pin in rational_pins.items()
            }
            total = 1
            for value in targets.values():
                total *= value
            targets[v0] = total
            s = lemma_hs(tj[0], targets, rational_pins, bounds)
            result.append(factor.embed(s))
        else:
            result.append(_hs1_field(factor, tj, factor_pins, v0, bounds))
    logger.info(f"classes solved at v0 = {v0}: {result}")
    return tuple(result)


def find_checkpoint_place(
    factors: Sequence[FieldFactor],
    t: Sequence[Coords],
    z_is_field: bool = False,
    z_disc: Optional[Rational] = None,
    avoid: Iterable[PlaceLike] = (),
    cap: Optional[int] = None,
    bounds: Optional[Bounds] = None,
) -> Place:
    """Smallest odd prime outside ``avoid`` where every nonsquare t_j stays nonsquare.

    With ``z_is_field`` the discriminant ``z_disc`` must also be a
    nonresidue there.  Primes dividing 2, the generators, the norms of the
    t_j or ``z_disc`` are skipped.

    Raises:
        BoundExceededError: ``cap`` primes were tested without success.
    """
    bounds = resolve_bounds(bounds)
    cap = cap if cap is not None else bounds.checkpoint_cap
    avoid_primes = {Place.coerce(v).prime for v in avoid}
    t_n = [factor.element(tj) for factor, tj in zip(factors, t)]
    excluded: Set[int] = {2}
    for factor, tj in zip(factors, t_n):
        excluded.update(factor.bad_primes())
        excluded.update(factor.norm_primes(tj))
    disc: Optional[Fraction] = None
    if z_is_field:
        if z_disc is None:
            raise PreconditionError("a field centre needs its discriminant", "z-disc")
        disc = as_nonzero(z_disc, "z_disc")
        excluded.update(prime_support(disc))
    pending = [
        (factor, tj)
        for factor, tj in zip(factors, t_n)
        if not factor.is_global_square(tj)
    ]

    for tested, p in enumerate(primes_from(3)):
        if tested >= cap:
            raise BoundExceededError("checkpoint_cap", cap, "no checkpoint place found")
        if p in excluded or p in avoid_primes:
            continue
        v = Place(p)
        if disc is not None and legendre(residue(disc, p), p) != -1:
            continue
        if all(
            any(not is_ext_local_square(factor, tj, w) for w in places_above(factor, v))
            for factor, tj in pending
        ):
            logger.debug(f"checkpoint place {p} found after {tested + 1} primes")
            return v
    raise BoundExceededError("checkpoint_cap", cap)
