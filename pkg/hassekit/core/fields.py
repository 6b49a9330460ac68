"""Exact arithmetic in the field factors Q, Q(sqrt m) and Q(sqrt a, sqrt b)."""
# --------------------------------------------------------------------
# Design concept
# --------------------------------------------------------------------
# 1. *One basis per factor* - elements are tuples of Fractions on the
#    basis e_S = prod_{i in S} sqrt(g_i), indexed by bitmasks S.  Then
#    e_S * e_T = (prod_{i in S & T} g_i) * e_{S ^ T}, so multiplication
#    never leaves the rationals.
#
# 2. *Galois action by sign flips* - the automorphism attached to a flip
#    mask F sends e_S to (-1)^{|S & F|} e_S.  Norms and inverses are
#    products of conjugates; traces read off the e_0 coordinate.
#
# 3. *Exact signs* - real embeddings are sign vectors on the square
#    roots; the sign of r0 + r1*sqrt(m) is decided by comparing r0^2 with
#    m*r1^2, recursively for the biquadratic tower.  No floats.
#
# 4. *Hashable values* - ``FieldFactor`` is frozen and elements are
#    tuples, so local models keyed on them can be cached.
# --------------------------------------------------------------------

import logging
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from itertools import product
from math import gcd
from typing import Iterator, List, Optional, Sequence, Tuple, Union

from .errors import DomainError
from .utils import (
    Rational,
    as_fraction,
    common_denominator,
    parity,
    prime_support,
    rational_sqrt,
    squarefree_part,
)

logger = logging.getLogger(__name__)

Coords = Tuple[Fraction, ...]

KINDS = {0: "Q", 1: "quad", 2: "biquad"}


def _sign(x: Fraction) -> int:
    return (x > 0) - (x < 0)


def _sign_quadratic(r0: Fraction, r1: Fraction, m: int) -> int:
    """Sign of the real number r0 + r1*sqrt(m), m > 0."""
    s0, s1 = _sign(r0), _sign(r1)
    if s1 == 0:
        return s0
    if s0 == 0:
        return s1
    if s0 == s1:
        return s0
    return s0 * _sign(r0 * r0 - m * r1 * r1)


@dataclass(frozen=True)
class FieldFactor:
    """A field factor Q(sqrt g_1, ..., sqrt g_k) with k <= 2."""

    gens: Tuple[int, ...] = ()

    def __post_init__(self) -> None:
        gens = tuple(self.gens)
        object.__setattr__(self, "gens", gens)
        if len(gens) > 2:
            raise DomainError("field factors have at most two generators")
        for g in gens:
            if isinstance(g, bool) or not isinstance(g, int):
                raise DomainError(f"generator {g!r} must be an integer")
            if g in (0, 1) or squarefree_part(g) != g:
                raise DomainError(f"generator {g} must be squarefree and not 0 or 1")
        if len(gens) == 2:
            a, b = gens
            if a == b or squarefree_part(a * b) == 1:
                raise DomainError(f"Q(sqrt {a}, sqrt {b}) is not a degree-4 field")

    @classmethod
    def rational(cls) -> "FieldFactor":
        return cls(())

    @classmethod
    def quadratic(cls, m: int) -> "FieldFactor":
        return cls((m,))

    @classmethod
    def biquadratic(cls, a: int, b: int) -> "FieldFactor":
        return cls((a, b))

    @property
    def kind(self) -> str:
        return KINDS[len(self.gens)]

    @property
    def rank(self) -> int:
        return len(self.gens)

    @property
    def degree(self) -> int:
        return 1 << len(self.gens)

    @cached_property
    def _overlap(self) -> Tuple[int, ...]:
        table = []
        for mask in range(self.degree):
            value = 1
            for i, g in enumerate(self.gens):
                if mask >> i & 1:
                    value *= g
            table.append(value)
        return tuple(table)

    def basis_labels(self) -> List[str]:
        labels = []
        for mask in range(self.degree):
            parts = [f"sqrt({g})" for i, g in enumerate(self.gens) if mask >> i & 1]
            labels.append("*".join(parts) or "1")
        return labels

    def __str__(self) -> str:
        if not self.gens:
            return "Q"
        return "Q(" + ", ".join(f"sqrt({g})" for g in self.gens) + ")"

    # -- element construction ------------------------------------------

    def element(self, coords: Sequence[Rational]) -> Coords:
        """Validate coordinates and return them as a tuple of Fractions."""
        if len(coords) != self.degree:
            raise DomainError(
                f"{self} elements need {self.degree} coordinates, got {len(coords)}"
            )
        return tuple(as_fraction(c) for c in coords)

    def embed(self, r: Rational) -> Coords:
        return (as_fraction(r),) + (Fraction(0),) * (self.degree - 1)

    def zero(self) -> Coords:
        return (Fraction(0),) * self.degree

    def one(self) -> Coords:
        return self.embed(1)

    def basis_element(self, mask: int) -> Coords:
        return tuple(Fraction(int(i == mask)) for i in range(self.degree))

    def gen_sqrt(self, i: int) -> Coords:
        return self.basis_element(1 << i)

    def is_rational(self, x: Coords) -> bool:
        return not any(x[1:])

    # -- ring operations -----------------------------------------------

    def add(self, x: Coords, y: Coords) -> Coords:
        return tuple(a + b for a, b in zip(x, y))

    def sub(self, x: Coords, y: Coords) -> Coords:
        return tuple(a - b for a, b in zip(x, y))

    def neg(self, x: Coords) -> Coords:
        return tuple(-a for a in x)

    def scale(self, x: Coords, r: Rational) -> Coords:
        r = as_fraction(r)
        return tuple(a * r for a in x)

    def mul(self, x: Coords, y: Coords) -> Coords:
        out = [Fraction(0)] * self.degree
        overlap = self._overlap
        for s, xs in enumerate(x):
            if not xs:
                continue
            for t, yt in enumerate(y):
                if yt:
                    out[s ^ t] += xs * yt * overlap[s & t]
        return tuple(out)

    def square(self, x: Coords) -> Coords:
        return self.mul(x, x)

    def power(self, x: Coords, n: int) -> Coords:
        result = self.one()
        for _ in range(n):
            result = self.mul(result, x)
        return result

    def conjugate(self, x: Coords, flip: int) -> Coords:
        """Image of x under the automorphism negating sqrt(g_i) for bits of flip."""
        return tuple(-c if parity(mask & flip) else c for mask, c in enumerate(x))

    def _other_conjugates(self, x: Coords) -> Coords:
        result = self.one()
        for flip in range(1, self.degree):
            result = self.mul(result, self.conjugate(x, flip))
        return result

    def norm(self, x: Coords) -> Fraction:
        return self.mul(x, self._other_conjugates(x))[0]

    def trace(self, x: Coords) -> Fraction:
        return self.degree * x[0]

    def is_zero(self, x: Coords) -> bool:
        return not any(x)

    def inv(self, x: Coords) -> Coords:
        conj = self._other_conjugates(x)
        n = self.mul(x, conj)[0]
        if n == 0:
            raise DomainError(f"{self} element {x} is not invertible")
        return self.scale(conj, 1 / n)

    def div(self, x: Coords, y: Coords) -> Coords:
        return self.mul(x, self.inv(y))

    # -- real embeddings -----------------------------------------------

    @property
    def is_totally_real(self) -> bool:
        return all(g > 0 for g in self.gens)

    def real_embeddings(self) -> List[Tuple[int, ...]]:
        """Sign vectors of the real embeddings (images of the square roots)."""
        if not self.is_totally_real:
            return []
        return [tuple(s) for s in product((1, -1), repeat=self.rank)]

    def sign_at(self, x: Coords, signs: Tuple[int, ...]) -> int:
        """Exact sign of x under the real embedding given by ``signs``."""
        if self.rank == 0:
            return _sign(x[0])
        if self.rank == 1:
            return _sign_quadratic(x[0], signs[0] * x[1], self.gens[0])
        a, b = self.gens
        sa, sb = signs
        lower = FieldFactor((a,))
        head = (x[0], sa * x[1])
        tail = (sb * x[2], sb * sa * x[3])
        s_head = _sign_quadratic(head[0], head[1], a)
        s_tail = _sign_quadratic(tail[0], tail[1], a)
        if s_tail == 0:
            return s_head
        if s_head == 0:
            return s_tail
        if s_head == s_tail:
            return s_head
        diff = lower.sub(lower.square(head), lower.scale(lower.square(tail), b))
        return s_head * _sign_quadratic(diff[0], diff[1], a)

    def sign_vector(self, x: Coords) -> Tuple[int, ...]:
        return tuple(self.sign_at(x, s) for s in self.real_embeddings())

    # -- global squares ------------------------------------------------

    def sqrt(self, x: Coords) -> Optional[Coords]:
        """An exact square root of x in this field, or None."""
        if self.is_zero(x):
            return self.zero()
        if self.rank == 0:
            r = rational_sqrt(x[0])
            return None if r is None else (r,)
        lower = FieldFactor(self.gens[:-1])
        g = self.gens[-1]
        half = self.degree // 2
        head, tail = x[:half], x[half:]

        def join(alpha: Coords, beta: Coords) -> Coords:
            return tuple(alpha) + tuple(beta)

        if lower.is_zero(tail):
            root = lower.sqrt(head)
            if root is not None:
                return join(root, lower.zero())
            root = lower.sqrt(lower.scale(head, Fraction(1, g)))
            if root is not None:
                return join(lower.zero(), root)
            return None

        norm_root = lower.sqrt(
            lower.sub(lower.square(head), lower.scale(lower.square(tail), g))
        )
        if norm_root is None:
            return None
        for n in (norm_root, lower.neg(norm_root)):
            alpha = lower.sqrt(lower.scale(lower.add(head, n), Fraction(1, 2)))
            if alpha is None or lower.is_zero(alpha):
                continue
            beta = lower.div(tail, lower.scale(alpha, 2))
            candidate = join(alpha, beta)
            if self.square(candidate) == tuple(x):
                return candidate
        return None

    def is_global_square(self, x: Coords) -> bool:
        return not self.is_zero(x) and self.sqrt(x) is not None

    # -- integrality ---------------------------------------------------

    def integral_multiple(self, x: Coords) -> Coords:
        """c^2 * x with integral coordinates, for the least suitable c."""
        c = common_denominator(x)
        return self.scale(x, c * c)

    def norm_primes(self, x: Coords) -> List[int]:
        """Primes that can divide the integral multiple of x at some place."""
        n = self.norm(self.integral_multiple(x))
        if n == 0:
            raise DomainError(f"{self} element {x} is zero")
        return prime_support(n)

    def bad_primes(self) -> List[int]:
        """2 together with the primes dividing the generators."""
        return sorted({2} | set(prime_support(*self.gens) if self.gens else []))

    def small_elements(self, height: int) -> Iterator[Coords]:
        """Primitive elements x + y*e_S (y > 0) by increasing height.

        Biquadratic factors additionally get the elements with coordinates in
        {-1, 0, 1} that involve two or more square roots.
        """
        for h in range(1, height + 1):
            for mask in range(1, self.degree):
                for y in range(1, h + 1):
                    for x in range(-h, h + 1):
                        if max(abs(x), y) != h or gcd(x, y) != 1:
                            continue
                        coords = [Fraction(0)] * self.degree
                        coords[0] = Fraction(x)
                        coords[mask] = Fraction(y)
                        yield tuple(coords)
        if self.rank == 2:
            for coords in product((0, 1, -1), repeat=4):
                roots = [c for c in coords[1:] if c]
                if len(roots) >= 2 and roots[0] > 0:
                    yield tuple(Fraction(c) for c in coords)


@dataclass(frozen=True)
class FieldElement:
    """An element of a field factor with operator arithmetic."""

    field: FieldFactor
    coords: Coords

    @classmethod
    def of(
        cls, field: FieldFactor, value: Union[Rational, Sequence[Rational]]
    ) -> "FieldElement":
        if isinstance(value, (int, Fraction)):
            return cls(field, field.embed(value))
        return cls(field, field.element(value))

    def _lift(self, other: object) -> "FieldElement":
        if isinstance(other, FieldElement):
            return other
        if isinstance(other, (int, Fraction)):
            return FieldElement(self.field, self.field.embed(other))
        raise TypeError(f"cannot combine FieldElement with {type(other).__name__}")

    def __add__(self, other: object) -> "FieldElement":
        coords = self.field.add(self.coords, self._lift(other).coords)
        return FieldElement(self.field, coords)

    __radd__ = __add__

    def __sub__(self, other: object) -> "FieldElement":
        coords = self.field.sub(self.coords, self._lift(other).coords)
        return FieldElement(self.field, coords)

    def __rsub__(self, other: object) -> "FieldElement":
        return self._lift(other) - self

    def __mul__(self, other: object) -> "FieldElement":
        coords = self.field.mul(self.coords, self._lift(other).coords)
        return FieldElement(self.field, coords)

    __rmul__ = __mul__

    def __truediv__(self, other: object) -> "FieldElement":
        coords = self.field.div(self.coords, self._lift(other).coords)
        return FieldElement(self.field, coords)

    def __neg__(self) -> "FieldElement":
        return FieldElement(self.field, self.field.neg(self.coords))

    def __bool__(self) -> bool:
        return not self.field.is_zero(self.coords)

    def norm(self) -> Fraction:
        return self.field.norm(self.coords)
