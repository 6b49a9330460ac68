"""Places of Q, square classes and Hilbert symbols at every place."""
# --------------------------------------------------------------------
# Design concept
# --------------------------------------------------------------------
# 1. *Closed-form symbols* - the Hilbert symbol is evaluated from
#    valuations and residues: the tame formula at odd primes, the
#    epsilon/omega exponent formula at 2, and a sign test at infinity.
#    No search, no floating point.
#
# 2. *Places are values* - ``Place`` is a frozen, ordered dataclass so
#    it can key dictionaries, sit in sets and feed ``lru_cache``.  The
#    real place sorts after every prime.
#
# 3. *Square classes as bit vectors* - every local group Q_v^x / squares
#    is an F_2-vector space; ``square_class_bits`` returns coordinates in
#    a fixed basis so the constructive solvers can do linear algebra on
#    them.
# --------------------------------------------------------------------

import logging
from dataclasses import dataclass
from fractions import Fraction
from functools import total_ordering
from typing import Iterable, List, Optional, Tuple, Union

from sympy import isprime

from .errors import DomainError
from .utils import (
    Rational,
    as_nonzero,
    least_nonresidue,
    legendre,
    prime_support,
    residue,
    squarefree_part,
    unit_part,
    valuation,
)

logger = logging.getLogger(__name__)


@total_ordering
@dataclass(frozen=True)
class Place:
    """A place of Q: a prime, or the real place when ``prime`` is None."""

    prime: Optional[int] = None

    def __post_init__(self) -> None:
        if self.prime is None:
            return
        if (
            isinstance(self.prime, bool)
            or not isinstance(self.prime, int)
            or not isprime(self.prime)
        ):
            raise DomainError(f"{self.prime!r} is not a prime")

    @classmethod
    def finite(cls, p: int) -> "Place":
        return cls(p)

    @classmethod
    def infinite(cls) -> "Place":
        return cls(None)

    @classmethod
    def parse(cls, text: str) -> "Place":
        """Parse ``"inf"`` or a decimal prime."""
        text = str(text).strip()
        if text.lower() in ("inf", "infinity", "oo"):
            return cls(None)
        try:
            value = int(text)
        except ValueError as e:
            raise DomainError(f"cannot parse place {text!r}") from e
        return cls(value)

    @classmethod
    def coerce(cls, value: "PlaceLike") -> "Place":
        if isinstance(value, Place):
            return value
        if isinstance(value, str):
            return cls.parse(value)
        return cls(value)

    @property
    def is_infinite(self) -> bool:
        return self.prime is None

    @property
    def is_dyadic(self) -> bool:
        return self.prime == 2

    def sort_key(self) -> Tuple[int, int]:
        return (1, 0) if self.prime is None else (0, self.prime)

    def __lt__(self, other: object) -> bool:
        if not isinstance(other, Place):
            return NotImplemented
        return self.sort_key() < other.sort_key()

    def __str__(self) -> str:
        return "inf" if self.prime is None else str(self.prime)


PlaceLike = Union[Place, int, str]

INFINITY = Place(None)
TWO = Place(2)


def support_places(*values: Rational, extra: Iterable[Place] = ()) -> List[Place]:
    """Primes dividing the values, plus 2, the real place and ``extra``."""
    places = {TWO, INFINITY}
    places.update(Place(p) for p in prime_support(*values))
    places.update(extra)
    return sorted(places)


@dataclass(frozen=True)
class SquareClass:
    """A coset of Q^x / Q^x2, stored as a sign and a positive squarefree part."""

    sign: int
    squarefree_part: int

    def __post_init__(self) -> None:
        if self.sign not in (1, -1):
            raise DomainError("square class sign must be +1 or -1")
        if self.squarefree_part < 1 or (
            squarefree_part(self.squarefree_part) != self.squarefree_part
        ):
            raise DomainError(f"{self.squarefree_part} is not a squarefree integer")

    @classmethod
    def of(cls, x: Rational) -> "SquareClass":
        core = squarefree_part(as_nonzero(x))
        return cls(1 if core > 0 else -1, abs(core))

    @property
    def representative(self) -> int:
        return self.sign * self.squarefree_part

    @property
    def is_trivial(self) -> bool:
        return self.sign == 1 and self.squarefree_part == 1

    def __mul__(self, other: "SquareClass") -> "SquareClass":
        return SquareClass.of(self.representative * other.representative)

    def __str__(self) -> str:
        return str(self.representative)


def _eps(u: int) -> int:
    return ((u - 1) // 2) % 2


def _omega(u: int) -> int:
    return ((u * u - 1) // 8) % 2


def hilbert_symbol(a: Rational, b: Rational, v: Place) -> int:
    """Hilbert symbol (a, b)_v for nonzero rationals."""
    a = as_nonzero(a, "Hilbert symbol argument")
    b = as_nonzero(b, "Hilbert symbol argument")
    if v.is_infinite:
        return -1 if a < 0 and b < 0 else 1

    p = v.prime
    assert p is not None
    alpha, beta = valuation(a, p), valuation(b, p)
    if p != 2:
        ua = residue(unit_part(a, p), p)
        ub = residue(unit_part(b, p), p)
        sign = -1 if (alpha * beta * (p - 1) // 2) % 2 else 1
        if beta % 2:
            sign *= legendre(ua, p)
        if alpha % 2:
            sign *= legendre(ub, p)
        return sign

    u = residue(unit_part(a, 2), 8)
    w = residue(unit_part(b, 2), 8)
    exponent = _eps(u) * _eps(w) + alpha * _omega(w) + beta * _omega(u)
    return -1 if exponent % 2 else 1


def is_local_square(a: Rational, v: Place) -> bool:
    """True iff a lies in (Q_v^x)^2."""
    a = as_nonzero(a)
    if v.is_infinite:
        return a > 0
    p = v.prime
    assert p is not None
    if valuation(a, p) % 2:
        return False
    if p == 2:
        return residue(unit_part(a, 2), 8) == 1
    return legendre(residue(unit_part(a, p), p), p) == 1


def same_square_class(a: Rational, b: Rational, v: Place) -> bool:
    """True iff a and b agree in Q_v^x / squares."""
    return is_local_square(as_nonzero(a) / as_nonzero(b), v)


def local_square_classes(v: Place) -> List[Fraction]:
    """Integer representatives of every class of Q_v^x / squares."""
    if v.is_infinite:
        return [Fraction(1), Fraction(-1)]
    p = v.prime
    assert p is not None
    if p == 2:
        return [Fraction(c) for c in (1, 3, 5, 7, 2, 6, 10, 14)]
    u = least_nonresidue(p)
    return [Fraction(c) for c in (1, u, p, u * p)]


def square_class_bits(a: Rational, v: Place) -> Tuple[int, ...]:
    """F_2-coordinates of the local square class of a.

    Real place: (sign bit,).  Odd p: (valuation parity, nonresidue bit).
    p = 2: (valuation parity, epsilon, omega) of the unit part mod 8.
    """
    a = as_nonzero(a)
    if v.is_infinite:
        return (1 if a < 0 else 0,)
    p = v.prime
    assert p is not None
    parity_bit = valuation(a, p) % 2
    if p == 2:
        u = residue(unit_part(a, 2), 8)
        return (parity_bit, _eps(u), _omega(u))
    return (parity_bit, 1 if legendre(residue(unit_part(a, p), p), p) == -1 else 0)


def product_of_symbols(a: Rational, b: Rational) -> int:
    """Product of (a, b)_v over every place that can contribute."""
    result = 1
    for v in support_places(a, b):
        result *= hilbert_symbol(a, b, v)
    return result
