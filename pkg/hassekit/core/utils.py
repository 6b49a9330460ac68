"""Common arithmetic helpers: exact rationals, factorisation, residues, GF(2)."""

import logging
from fractions import Fraction
from functools import lru_cache
from math import isqrt, lcm
from typing import Dict, Iterator, List, Optional, Sequence, Tuple, Union

from sympy import factorint, isprime, nextprime
from sympy.functions.combinatorial.numbers import legendre_symbol
from sympy.ntheory import sqrt_mod

from .config import get_bounds
from .errors import BoundExceededError, DomainError

logger = logging.getLogger(__name__)

Rational = Union[int, Fraction]


def as_fraction(x: Rational) -> Fraction:
    """Coerce an int or Fraction to Fraction; anything else is a domain error."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int) and not isinstance(x, bool):
        return Fraction(x)
    raise DomainError(f"expected an exact rational, got {x!r}")


def as_nonzero(x: Rational, what: str = "argument") -> Fraction:
    """Coerce to Fraction and reject zero."""
    value = as_fraction(x)
    if value == 0:
        raise DomainError(f"{what} must be nonzero")
    return value


@lru_cache(maxsize=8192)
def _factor(n: int, bound: int) -> Tuple[Tuple[int, int], ...]:
    factors = factorint(n, limit=bound)
    for p in factors:
        if not isprime(p):
            raise BoundExceededError(
                "factor_bound", bound, f"cannot fully factor {n} below {bound}"
            )
    return tuple(sorted(factors.items()))


def factor_integer(n: int) -> Tuple[Tuple[int, int], ...]:
    """Factor |n| with trial division limited by the configured bound."""
    if n == 0:
        raise DomainError("cannot factor zero")
    n = abs(n)
    if n == 1:
        return ()
    return _factor(n, get_bounds().factor_bound)


def prime_support(*values: Rational) -> List[int]:
    """Sorted primes dividing a numerator or denominator of any value."""
    primes = set()
    for value in values:
        x = as_nonzero(value)
        for part in (x.numerator, x.denominator):
            primes.update(p for p, _ in factor_integer(part))
    return sorted(primes)


def int_valuation(n: int, p: int) -> int:
    """p-adic valuation of a nonzero integer."""
    n = abs(n)
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def valuation(x: Rational, p: int) -> int:
    """p-adic valuation of a nonzero rational."""
    x = as_nonzero(x)
    return int_valuation(x.numerator, p) - int_valuation(x.denominator, p)


def unit_part(x: Rational, p: int) -> Fraction:
    """x / p^v_p(x)."""
    x = as_nonzero(x)
    return x / Fraction(p) ** valuation(x, p)


def residue(x: Rational, modulus: int) -> int:
    """Image of a rational with denominator prime to ``modulus`` in Z/modulus."""
    x = as_fraction(x)
    return (x.numerator * pow(x.denominator, -1, modulus)) % modulus


def squarefree_part(x: Rational) -> int:
    """Signed squarefree integer in the square class of x."""
    x = as_nonzero(x)
    core = 1
    for part in (x.numerator, x.denominator):
        for p, e in factor_integer(part):
            if e % 2:
                core *= p
    return core if x > 0 else -core


def rational_sqrt(x: Rational) -> Optional[Fraction]:
    """Exact nonnegative square root of x, or None when x is not a square."""
    x = as_fraction(x)
    if x < 0:
        return None
    num, den = x.numerator, x.denominator
    rn, rd = isqrt(num), isqrt(den)
    if rn * rn == num and rd * rd == den:
        return Fraction(rn, rd)
    return None


def is_rational_square(x: Rational) -> bool:
    """True iff x is a nonzero square in Q."""
    return as_fraction(x) != 0 and rational_sqrt(x) is not None


def legendre(a: int, p: int) -> int:
    """Legendre symbol (a/p) for an odd prime p; 0 when p divides a."""
    return int(legendre_symbol(a % p, p))


@lru_cache(maxsize=1024)
def least_nonresidue(p: int) -> int:
    """Smallest positive quadratic nonresidue modulo an odd prime."""
    u = 2
    while legendre(u, p) != -1:
        u += 1
    return u


def sqrt_mod_prime_power(a: int, p: int, k: int) -> int:
    """A square root of a unit ``a`` modulo p^k (p odd, or p = 2 with a = 1 mod 8)."""
    modulus = p**k
    root = sqrt_mod(a % modulus, modulus)
    if root is None:
        raise DomainError(f"{a} has no square root modulo {p}^{k}")
    return int(root)


def primes_from(start: int) -> Iterator[int]:
    """Primes >= start in increasing order."""
    p = start if start >= 2 and isprime(start) else int(nextprime(start))
    while True:
        yield p
        p = int(nextprime(p))


def common_denominator(values: Sequence[Fraction]) -> int:
    """Least common multiple of the denominators."""
    return lcm(*(v.denominator for v in values)) if values else 1


def parity(n: int) -> int:
    """Number of set bits of n, modulo 2."""
    return bin(n).count("1") & 1


def solve_gf2(equations: Sequence[Tuple[int, int]]) -> Optional[int]:
    """Solve a linear system over GF(2).

    Each equation is ``(row, rhs)`` where bit i of ``row`` is the coefficient
    of unknown i.  Returns one solution as a bitmask (free unknowns set to 0)
    or None when the system is inconsistent.
    """
    basis: Dict[int, Tuple[int, int]] = {}
    for row, rhs in equations:
        rhs &= 1
        while row:
            top = row.bit_length() - 1
            if top not in basis:
                basis[top] = (row, rhs)
                break
            brow, brhs = basis[top]
            row ^= brow
            rhs ^= brhs
        else:
            if rhs:
                return None

    solution = 0
    for top in sorted(basis):
        row, rhs = basis[top]
        lower = row & ~(1 << top)
        if rhs ^ parity(lower & solution):
            solution |= 1 << top
    return solution


def gf2_rank(rows: Sequence[int]) -> int:
    """Rank of a set of GF(2) row vectors given as bitmasks."""
    basis: Dict[int, int] = {}
    for row in rows:
        while row:
            top = row.bit_length() - 1
            if top not in basis:
                basis[top] = row
                break
            row ^= basis[top]
    return len(basis)
