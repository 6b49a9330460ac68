"""Places of the field factors and Hilbert symbols over their completions."""
# --------------------------------------------------------------------
# Design concept
# --------------------------------------------------------------------
# 1. *Places as sign-vector orbits* - an embedding of F = Q(sqrt g_i)
#    into an algebraic closure of Q_v is a choice of sign for each
#    square root.  Two choices give the same place exactly when they
#    differ by an automorphism of the local field Q_v(sqrt g_i), i.e. by
#    a flip vector coming from a character of the span H of the local
#    square classes of the g_i.  |H| is the local degree.
#
# 2. *Explicit tame models* - at an odd prime p the local field is
#    Q_p(rho, Pi) with rho^2 = u (a nonresidue) and Pi^2 = p*t.  Each
#    sqrt(g_i) is sent to +-c_i rho^a_i Pi^b_i with c_i a Hensel-lifted
#    square root modulo p^N, so any element has an exact image modulo
#    p^N.  Valuation and first residue give the tame symbol.
#
# 3. *Dyadic places without dyadic formulas* - when 2 splits completely
#    the roots are 2-adic integers and the base-field formula applies.
#    When the dyadic place is unique its symbol is the product of every
#    other symbol (product formula).  Square tests there pair against a
#    small basis of global elements whose Gram matrix has full rank.
#    A biquadratic factor with two dyadic places of degree two is
#    rejected explicitly.
# --------------------------------------------------------------------

import logging
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import product
from typing import List, Optional, Tuple

from .config import get_bounds
from .errors import BoundExceededError, DomainError, UnsupportedExtensionSymbolError
from .fields import Coords, FieldFactor
from .places import INFINITY, Place, hilbert_symbol, is_local_square, square_class_bits
from .utils import (
    gf2_rank,
    int_valuation,
    least_nonresidue,
    legendre,
    parity,
    residue,
    sqrt_mod_prime_power,
    valuation,
)

logger = logging.getLogger(__name__)

SPLIT = "split-copy"
INERT = "inert"
RAMIFIED = "ramified"
COMPLEX = "complex"


@dataclass(frozen=True)
class ExtPlace:
    """A place of a field factor above a place of Q.

    ``signs`` is the canonical sign vector (images of the square roots of
    the generators) representing the embedding.  ``residue_size`` is the
    size of the residue field, 0 at archimedean places.
    """

    base: Place
    factor_index: int
    local_kind: str
    residue_size: int
    local_degree: int
    signs: Tuple[int, ...] = ()

    def __str__(self) -> str:
        signs = "".join("+" if s > 0 else "-" for s in self.signs)
        return f"{self.base}[{self.factor_index}:{signs or '.'}]"


def _class_mask(g: int, v: Place) -> int:
    bits = square_class_bits(g, v)
    return sum(bit << i for i, bit in enumerate(bits))


def _span(masks: List[int]) -> List[int]:
    span = {0}
    for m in masks:
        span |= {s ^ m for s in span}
    return sorted(span)


@lru_cache(maxsize=4096)
def _local_structure(
    gens: Tuple[int, ...], v: Place
) -> Tuple[Tuple[int, ...], Tuple[int, ...]]:
    """Class masks of the generators at v and the flip group they induce."""
    classes = tuple(_class_mask(g, v) for g in gens)
    width = 1 if v.is_infinite else (3 if v.prime == 2 else 2)
    flips = set()
    for functional in range(1 << width):
        flips.add(sum(parity(functional & c) << i for i, c in enumerate(classes)))
    return classes, tuple(sorted(flips))


def _mask_to_signs(mask: int, k: int) -> Tuple[int, ...]:
    return tuple(-1 if mask >> i & 1 else 1 for i in range(k))


@lru_cache(maxsize=4096)
def _places_above(
    factor: FieldFactor, v: Place, factor_index: int
) -> Tuple[ExtPlace, ...]:
    k = factor.rank
    if k == 0:
        size = 0 if v.is_infinite else v.prime
        return (ExtPlace(v, factor_index, SPLIT, size or 0, 1, ()),)

    classes, flips = _local_structure(factor.gens, v)
    degree = len(flips)
    h_span = _span(list(classes))

    if v.is_infinite:
        kind, size = (SPLIT, 0) if degree == 1 else (COMPLEX, 0)
    else:
        p = v.prime
        assert p is not None
        if p == 2:
            # the class of 5 cuts out the unramified quadratic extension
            f = 2 if 0b100 in h_span else 1
            e = degree // f
        else:
            e = 2 if any(c & 1 for c in h_span) else 1
            f = degree // e
        size = p**f
        if degree == 1:
            kind = SPLIT
        elif e == 1:
            kind = INERT
        else:
            kind = RAMIFIED

    seen = set()
    places = []
    for mask in range(1 << k):
        if mask in seen:
            continue
        seen.update(mask ^ flip for flip in flips)
        signs = _mask_to_signs(mask, k)
        places.append(ExtPlace(v, factor_index, kind, size, degree, signs))
    return tuple(places)


def places_above(
    factor: FieldFactor, v: Place, factor_index: int = 0
) -> List[ExtPlace]:
    """All places of ``factor`` over v; local degrees sum to the degree."""
    return list(_places_above(factor, v, factor_index))


def _require_nonzero(factor: FieldFactor, x: Coords) -> Coords:
    x = factor.element(x)
    if factor.norm(x) == 0:
        raise DomainError(f"{factor} element {x} must be nonzero")
    return x


# -- tame places --------------------------------------------------------


@dataclass(frozen=True)
class _TameModel:
    p: int
    e: int
    f: int
    u: int
    t: int
    a_bits: Tuple[int, ...]
    b_bits: Tuple[int, ...]
    units: Tuple[Fraction, ...]

    @property
    def pi0(self) -> int:
        return self.p * self.t


@lru_cache(maxsize=4096)
def _tame_model(gens: Tuple[int, ...], p: int) -> _TameModel:
    u = least_nonresidue(p)
    span = _span([_class_mask(g, Place(p)) for g in gens])
    e = 2 if any(m & 1 for m in span) else 1
    f = len(span) // e
    t = 1
    if e == 2 and f == 1:
        ramified_class = next(m for m in span if m & 1)
        t = u if ramified_class & 2 else 1
    pi0 = p * t
    a_bits, b_bits, units = [], [], []
    for g in gens:
        b = valuation(g, p) % 2
        w = Fraction(g, pi0**b)
        a = 1 if legendre(residue(w, p), p) == -1 else 0
        if f == 1 and a:
            raise DomainError(f"inconsistent local model for {gens} at {p}")
        a_bits.append(a)
        b_bits.append(b)
        units.append(w / u**a)
    return _TameModel(p, e, f, u, t, tuple(a_bits), tuple(b_bits), tuple(units))


@lru_cache(maxsize=8192)
def _tame_roots(gens: Tuple[int, ...], p: int, n: int) -> Tuple[int, ...]:
    model = _tame_model(gens, p)
    mod = p**n
    roots = []
    for w in model.units:
        r = sqrt_mod_prime_power(residue(w, mod), p, n)
        # pick the root with residue in [1, (p - 1) / 2] so every precision agrees
        if r % p > (p - 1) // 2:
            r = mod - r
        roots.append(r)
    return tuple(roots)


def _integral_at(x: Coords, p: int) -> Coords:
    """Multiply by an even power of p so every coordinate is p-integral."""
    lowest = min(valuation(c, p) for c in x if c)
    if lowest >= 0:
        return x
    shift = (-lowest + 1) // 2
    return tuple(c * Fraction(p) ** (2 * shift) for c in x)


def _tame_image(
    factor: FieldFactor, x: Coords, signs: Tuple[int, ...], p: int, n: int
) -> List[int]:
    """Coordinates of x on 1, rho, Pi, rho*Pi modulo p^n."""
    model = _tame_model(factor.gens, p)
    roots = _tame_roots(factor.gens, p, n)
    mod = p**n
    image = [0, 0, 0, 0]
    for mask, coord in enumerate(x):
        if not coord:
            continue
        value = residue(coord, mod)
        a_total = b_total = 0
        for i in range(factor.rank):
            if mask >> i & 1:
                value = value * signs[i] * roots[i] % mod
                a_total += model.a_bits[i]
                b_total += model.b_bits[i]
        value = value * pow(model.u, a_total // 2, mod)
        value = value * pow(model.pi0, b_total // 2, mod)
        slot = (a_total % 2) + 2 * (b_total % 2)
        image[slot] = (image[slot] + value) % mod
    return image


def _vp(n: int, p: int) -> Optional[int]:
    return None if n == 0 else int_valuation(n, p)


def _min_val(values: List[int], p: int) -> Optional[int]:
    vals = [v for v in (_vp(n, p) for n in values) if v is not None]
    return min(vals) if vals else None


def _tame_unit(
    factor: FieldFactor, x: Coords, w: ExtPlace
) -> Tuple[int, Tuple[int, int]]:
    """Normalised valuation of x at w and its first residue (r0 + r1*rho mod p)."""
    p = w.base.prime
    assert p is not None
    model = _tame_model(factor.gens, p)
    x = _integral_at(x, p)
    n = get_bounds().precision
    while True:
        image = _tame_image(factor, x, w.signs, p, n)
        k0 = _min_val(image[0:2], p)
        k1 = _min_val(image[2:4], p) if model.e == 2 else None
        if k0 is None and k1 is None:
            n *= 2
            continue
        if k1 is None or (k0 is not None and 2 * k0 < 2 * k1 + 1):
            assert k0 is not None
            k, pair, val = k0, image[0:2], k0 * model.e
        else:
            k, pair, val = k1, image[2:4], 2 * k1 + 1
        scale = pow(model.t, -k, p) if model.e == 2 else 1
        res = tuple((c // p**k) * scale % p for c in pair)
        return val, (res[0], res[1])


def _residue_character(model: _TameModel, res: Tuple[int, int]) -> int:
    p = model.p
    if model.f == 1:
        return legendre(res[0], p)
    return legendre((res[0] * res[0] - model.u * res[1] * res[1]) % p, p)


def _tame_symbol(factor: FieldFactor, a: Coords, b: Coords, w: ExtPlace) -> int:
    p = w.base.prime
    assert p is not None
    model = _tame_model(factor.gens, p)
    va, ra = _tame_unit(factor, a, w)
    vb, rb = _tame_unit(factor, b, w)
    minus_one = legendre(-1, p) if model.f == 1 else 1
    sign = minus_one if (va * vb) % 2 else 1
    if vb % 2:
        sign *= _residue_character(model, ra)
    if va % 2:
        sign *= _residue_character(model, rb)
    return sign


# -- dyadic places -------------------------------------------------------


def _dyadic_root(g: int, n: int) -> int:
    r = sqrt_mod_prime_power(g, 2, n)
    return r if r % 4 == 1 else (-r) % 2**n


def _split_dyadic_class(factor: FieldFactor, x: Coords, w: ExtPlace) -> Fraction:
    """A rational in the Q_2 square class of x at a split dyadic place."""
    x = _integral_at(x, 2)
    n = get_bounds().precision + 8
    while True:
        mod = 2**n
        roots = [_dyadic_root(g, n) for g in factor.gens]
        value = 0
        for mask, coord in enumerate(x):
            if not coord:
                continue
            term = residue(coord, mod)
            for i in range(factor.rank):
                if mask >> i & 1:
                    term = term * w.signs[i] * roots[i] % mod
            value = (value + term) % mod
        # a root modulo 2^n is only determined modulo 2^(n - 1)
        value %= 2 ** (n - 1)
        v = _vp(value, 2)
        if v is None or n - 1 - v < 3:
            n *= 2
            continue
        return Fraction(2**v * ((value >> v) % 8))


def _dyadic_kind(factor: FieldFactor) -> str:
    ext = places_above(factor, Place(2))
    if ext[0].local_degree == 1:
        return "split"
    if len(ext) == 1:
        return "unique"
    return "unsupported"


@lru_cache(maxsize=16384)
def _by_product_formula(factor: FieldFactor, a: Coords, b: Coords) -> int:
    a2 = factor.integral_multiple(a)
    b2 = factor.integral_multiple(b)
    primes = set(factor.norm_primes(a2)) | set(factor.norm_primes(b2))
    primes.discard(2)
    result = 1
    for w in places_above(factor, INFINITY):
        result *= ext_hilbert_symbol(factor, a2, b2, w)
    for p in sorted(primes):
        for w in places_above(factor, Place(p)):
            result *= ext_hilbert_symbol(factor, a2, b2, w)
    return result


@lru_cache(maxsize=256)
def _dyadic_basis(factor: FieldFactor) -> Tuple[Coords, ...]:
    """Global elements whose classes form a basis at the unique dyadic place."""
    w = places_above(factor, Place(2))[0]
    dim = factor.degree + 2
    candidates: List[Coords] = [factor.embed(r) for r in (-1, 2, 3, 5, 6, 7, 10, 14)]
    for coords in product(range(-2, 3), repeat=factor.degree):
        x = tuple(Fraction(c) for c in coords)
        if factor.is_rational(x) or factor.norm(x) == 0:
            continue
        candidates.append(x)

    chosen: List[Coords] = []
    for size in range(dim, len(candidates) + 1, 4):
        pool = candidates[:size]
        gram = [
            sum(
                (1 if _by_product_formula(factor, x, y) == -1 else 0) << j
                for j, y in enumerate(pool)
            )
            for x in pool
        ]
        if gf2_rank(gram) < dim:
            continue
        rows: List[int] = []
        for x, row in zip(pool, gram):
            if gf2_rank(rows + [row]) > len(rows):
                rows.append(row)
                chosen.append(x)
        logger.debug(f"dyadic basis for {factor} certified with {len(pool)} candidates")
        return tuple(chosen)
    raise BoundExceededError(
        "dyadic_basis",
        len(candidates),
        f"no certified dyadic basis found for {factor} at {w}",
    )


# -- public API ----------------------------------------------------------


def ext_hilbert_symbol(factor: FieldFactor, a: Coords, b: Coords, w: ExtPlace) -> int:
    """Hilbert symbol (a, b) over the completion of ``factor`` at w."""
    a = _require_nonzero(factor, a)
    b = _require_nonzero(factor, b)
    if factor.rank == 0:
        return hilbert_symbol(a[0], b[0], w.base)
    if w.base.is_infinite:
        if w.local_kind == COMPLEX:
            return 1
        neg_a = factor.sign_at(a, w.signs) < 0
        neg_b = factor.sign_at(b, w.signs) < 0
        return -1 if neg_a and neg_b else 1
    if w.base.prime != 2:
        return _tame_symbol(factor, a, b, w)
    kind = _dyadic_kind(factor)
    if kind == "split":
        return hilbert_symbol(
            _split_dyadic_class(factor, a, w),
            _split_dyadic_class(factor, b, w),
            Place(2),
        )
    if kind == "unique":
        return _by_product_formula(factor, a, b)
    raise UnsupportedExtensionSymbolError(
        f"{factor} has two dyadic places of degree 2; symbols there are not supported"
    )


def is_ext_local_square(factor: FieldFactor, x: Coords, w: ExtPlace) -> bool:
    """True iff x is a square in the completion of ``factor`` at w."""
    x = _require_nonzero(factor, x)
    if factor.rank == 0:
        return is_local_square(x[0], w.base)
    if w.base.is_infinite:
        return w.local_kind == COMPLEX or factor.sign_at(x, w.signs) > 0
    p = w.base.prime
    if p != 2:
        val, res = _tame_unit(factor, x, w)
        model = _tame_model(factor.gens, p)
        return val % 2 == 0 and _residue_character(model, res) == 1
    kind = _dyadic_kind(factor)
    if kind == "split":
        return is_local_square(_split_dyadic_class(factor, x, w), Place(2))
    if kind == "unique":
        basis = _dyadic_basis(factor)
        return all(_by_product_formula(factor, x, y) == 1 for y in basis)
    raise UnsupportedExtensionSymbolError(
        f"{factor} has two dyadic places of degree 2; "
        "square tests there are not supported"
    )


def local_class_bits(factor: FieldFactor, x: Coords, w: ExtPlace) -> Tuple[int, ...]:
    """F_2-coordinates of the square class of x at w (injective on classes)."""
    x = _require_nonzero(factor, x)
    if factor.rank == 0:
        return square_class_bits(x[0], w.base)
    if w.base.is_infinite:
        if w.local_kind == COMPLEX:
            return ()
        return (1 if factor.sign_at(x, w.signs) < 0 else 0,)
    p = w.base.prime
    if p != 2:
        val, res = _tame_unit(factor, x, w)
        chi = _residue_character(_tame_model(factor.gens, p), res)
        return (val % 2, 1 if chi == -1 else 0)
    kind = _dyadic_kind(factor)
    if kind == "split":
        return square_class_bits(_split_dyadic_class(factor, x, w), Place(2))
    if kind == "unique":
        return tuple(
            1 if _by_product_formula(factor, x, y) == -1 else 0
            for y in _dyadic_basis(factor)
        )
    raise UnsupportedExtensionSymbolError(
        f"{factor} has two dyadic places of degree 2; classes there are not supported"
    )


def is_local_square_everywhere_above(factor: FieldFactor, x: Coords, v: Place) -> bool:
    """True iff x is a local square at every place of ``factor`` over v."""
    return all(is_ext_local_square(factor, x, w) for w in places_above(factor, v))
