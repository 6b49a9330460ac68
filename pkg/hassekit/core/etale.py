"""Etale algebras with involution E = F[x]/(x^2 - d), their trace forms and norms."""
# --------------------------------------------------------------------
# Design concept
# --------------------------------------------------------------------
# 1. *Normal form only* - an algebra is the list of factors F_j of the
#    fixed algebra plus d = (d_1, ..., d_r); sigma sends x to -x.  An
#    optional rational component with trivial sigma gives the odd-rank
#    shape E' x Q.
#
# 2. *Elements as pairs* - u + v x with u, v in F_j, so every operation
#    reduces to factor arithmetic.  Norm to F is u^2 - d v^2.
#
# 3. *Trace forms by blocks* - Tr_{E/Q}(a y sigma(z)) splits as
#    T_{2a} + T_{-2ad} on each factor, where T_c(y) = Tr_{F/Q}(c y^2).
#    Each block's Gram matrix is rational and diagonalized exactly.
#
# 4. *Corestriction through Hasse ratios* - the corestricted symbol of
#    (a, d) at v is h_v(q_a) h_v(q_1); ``cor_term_via_symbols`` is the
#    independent route through extension symbols.
# --------------------------------------------------------------------

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple

from .errors import DomainError, UnsupportedExtensionSymbolError
from .fields import Coords, FieldFactor
from .local_fields import ext_hilbert_symbol, places_above
from .places import Place, PlaceLike
from .quadratic_forms import QuadraticForm, diagonalize, hasse_invariant
from .utils import Rational, as_fraction, as_nonzero

logger = logging.getLogger(__name__)

FElement = Tuple[Coords, ...]
Component = Tuple[Coords, Coords]


@dataclass(frozen=True)
class AlgebraElement:
    """u_j + v_j x on every factor, plus the value on the fixed rational component."""

    parts: Tuple[Component, ...]
    fixed: Optional[Fraction] = None


@dataclass(frozen=True)
class EtaleInvolutionAlgebra:
    """(E, sigma) with E = F[x]/(x^2 - d) and sigma(x) = -x."""

    factors: Tuple[FieldFactor, ...]
    d: FElement
    fixed_rational: bool = False

    def __post_init__(self) -> None:
        factors = tuple(self.factors)
        if not factors and not self.fixed_rational:
            raise DomainError("an etale algebra needs at least one factor")
        if len(self.d) != len(factors):
            raise DomainError(f"d needs {len(factors)} components, got {len(self.d)}")
        d = tuple(f.element(dj) for f, dj in zip(factors, self.d))
        for j, (f, dj) in enumerate(zip(factors, d)):
            if f.is_zero(dj):
                raise DomainError(f"component {j} of d is zero")
        object.__setattr__(self, "factors", factors)
        object.__setattr__(self, "d", d)

    @property
    def fixed_dimension(self) -> int:
        return sum(f.degree for f in self.factors) + int(self.fixed_rational)

    @property
    def dimension(self) -> int:
        return 2 * sum(f.degree for f in self.factors) + int(self.fixed_rational)

    def satisfies_dimension_condition(self) -> bool:
        """dim E^sigma = n/2 (rounded up for the odd shape)."""
        return self.fixed_dimension == (self.dimension + 1) // 2

    def component_is_field(self, j: int) -> bool:
        return not self.factors[j].is_global_square(self.d[j])

    def fixed_element(self, values: Sequence[Sequence[Rational]]) -> FElement:
        """Validate an element of F given componentwise."""
        if len(values) != len(self.factors):
            raise DomainError(f"elements of F need {len(self.factors)} components")
        return tuple(f.element(v) for f, v in zip(self.factors, values))

    def fixed_one(self) -> FElement:
        return tuple(f.one() for f in self.factors)

    # -- algebra arithmetic ----------------------------------------------

    def element(
        self,
        parts: Sequence[Tuple[Sequence[Rational], Sequence[Rational]]],
        fixed: Optional[Rational] = None,
    ) -> AlgebraElement:
        if len(parts) != len(self.factors):
            raise DomainError(f"elements of E need {len(self.factors)} components")
        if self.fixed_rational != (fixed is not None):
            raise DomainError(
                "the fixed rational component must be given exactly when present"
            )
        comps = tuple(
            (f.element(u), f.element(v)) for f, (u, v) in zip(self.factors, parts)
        )
        return AlgebraElement(comps, None if fixed is None else as_fraction(fixed))

    def from_fixed(self, a: FElement, a0: Optional[Rational] = None) -> AlgebraElement:
        parts = tuple((aj, f.zero()) for f, aj in zip(self.factors, a))
        fixed = None
        if self.fixed_rational:
            fixed = as_fraction(1 if a0 is None else a0)
        return AlgebraElement(parts, fixed)

    def one(self) -> AlgebraElement:
        return self.from_fixed(self.fixed_one())

    def generator(self) -> AlgebraElement:
        parts = tuple((f.zero(), f.one()) for f in self.factors)
        return AlgebraElement(parts, Fraction(1) if self.fixed_rational else None)

    def mul(self, y: AlgebraElement, z: AlgebraElement) -> AlgebraElement:
        parts = []
        for f, dj, (u1, v1), (u2, v2) in zip(self.factors, self.d, y.parts, z.parts):
            u = f.add(f.mul(u1, u2), f.mul(dj, f.mul(v1, v2)))
            v = f.add(f.mul(u1, v2), f.mul(v1, u2))
            parts.append((u, v))
        fixed = None if y.fixed is None or z.fixed is None else y.fixed * z.fixed
        return AlgebraElement(tuple(parts), fixed)

    def add(self, y: AlgebraElement, z: AlgebraElement) -> AlgebraElement:
        parts = tuple(
            (f.add(u1, u2), f.add(v1, v2))
            for f, (u1, v1), (u2, v2) in zip(self.factors, y.parts, z.parts)
        )
        fixed = None if y.fixed is None or z.fixed is None else y.fixed + z.fixed
        return AlgebraElement(parts, fixed)

    def sigma(self, y: AlgebraElement) -> AlgebraElement:
        parts = tuple((u, f.neg(v)) for f, (u, v) in zip(self.factors, y.parts))
        return AlgebraElement(parts, y.fixed)

    def norm_to_fixed(self, y: AlgebraElement) -> FElement:
        """y sigma(y) = u^2 - d v^2 componentwise (the fixed component is dropped)."""
        return tuple(
            f.sub(f.square(u), f.mul(dj, f.square(v)))
            for f, dj, (u, v) in zip(self.factors, self.d, y.parts)
        )

    def is_invertible(self, y: AlgebraElement) -> bool:
        if y.fixed is not None and y.fixed == 0:
            return False
        norms = self.norm_to_fixed(y)
        return all(not f.is_zero(n) for f, n in zip(self.factors, norms))

    def inv(self, y: AlgebraElement) -> AlgebraElement:
        if not self.is_invertible(y):
            raise DomainError("element of E is not invertible")
        conj = self.sigma(y)
        parts = []
        for f, n, (u, v) in zip(self.factors, self.norm_to_fixed(y), conj.parts):
            n_inv = f.inv(n)
            parts.append((f.mul(u, n_inv), f.mul(v, n_inv)))
        fixed = None if y.fixed is None else 1 / y.fixed
        return AlgebraElement(tuple(parts), fixed)

    def __str__(self) -> str:
        parts = [
            f"{f}[x]/(x^2 - {list(map(str, dj))})"
            for f, dj in zip(self.factors, self.d)
        ]
        if self.fixed_rational:
            parts.append("Q")
        return " x ".join(parts)


# -- trace forms ---------------------------------------------------------


def _transfer_gram(factor: FieldFactor, c: Coords) -> List[List[Fraction]]:
    """Gram matrix of y -> Tr_{F/Q}(c y^2) on the power basis."""
    n = factor.degree
    basis = [factor.basis_element(s) for s in range(n)]
    return [
        [factor.trace(factor.mul(c, factor.mul(bs, bt))) for bt in basis]
        for bs in basis
    ]


def _require_invertible_fixed(A: EtaleInvolutionAlgebra, a: FElement) -> FElement:
    a = A.fixed_element(a)
    for j, (f, aj) in enumerate(zip(A.factors, a)):
        if f.is_zero(aj) or f.norm(aj) == 0:
            raise DomainError(f"component {j} of a is not invertible")
    return a


def trace_form(
    A: EtaleInvolutionAlgebra, a: FElement, a0: Optional[Rational] = None
) -> QuadraticForm:
    """Diagonalized form of (y, z) -> Tr_{E/Q}(a y sigma(z)) for a in F^x.

    ``a0`` is the value of a on the fixed rational component (default 1).
    """
    a = _require_invertible_fixed(A, a)
    diag: List[Fraction] = []
    for f, dj, aj in zip(A.factors, A.d, a):
        plus = f.scale(aj, 2)
        minus = f.scale(f.mul(aj, dj), -2)
        diag.extend(diagonalize(_transfer_gram(f, plus)).diag)
        diag.extend(diagonalize(_transfer_gram(f, minus)).diag)
    if A.fixed_rational:
        diag.append(as_nonzero(1 if a0 is None else a0, "a0"))
    return QuadraticForm(tuple(diag))


def cor_term(
    A: EtaleInvolutionAlgebra, a: FElement, v: PlaceLike, a0: Optional[Rational] = None
) -> int:
    """Corestricted symbol Cor(a, d)_v realised as h_v(q_a) h_v(q_1)."""
    base = trace_form(A, A.fixed_one(), a0)
    return hasse_invariant(trace_form(A, a, a0), v) * hasse_invariant(base, v)


def cor_term_via_symbols(
    A: EtaleInvolutionAlgebra, a: FElement, v: PlaceLike
) -> Optional[int]:
    """prod_j prod_{w | v} (a_j, d_j)_w.

    Returns None where extension symbols are unsupported.
    """
    v = Place.coerce(v)
    a = _require_invertible_fixed(A, a)
    result = 1
    try:
        for j, (f, aj, dj) in enumerate(zip(A.factors, a, A.d)):
            for w in places_above(f, v, j):
                result *= ext_hilbert_symbol(f, aj, dj, w)
    except UnsupportedExtensionSymbolError as e:
        logger.debug(f"corestriction cross-check skipped at {v}: {e}")
        return None
    return result


# -- Hilbert 90 ------------------------------------------------------------


def _h90_candidates(f: FieldFactor) -> Iterable[Component]:
    yield f.one(), f.zero()
    yield f.zero(), f.one()
    for k in range(1, 4):
        yield f.one(), f.embed(k)
    for mask in range(1, f.degree):
        yield f.basis_element(mask), f.zero()
        yield f.basis_element(mask), f.one()


def hilbert90_solve(A: EtaleInvolutionAlgebra, x: AlgebraElement) -> AlgebraElement:
    """Return y in E^x with x = y sigma(y)^-1, given x sigma(x) = 1.

    y = z + x sigma(z) works for any z making it invertible; z = 1 gives
    the usual 1 + x.
    """
    if A.fixed_rational and x.fixed != 1:
        raise DomainError("x must be 1 on the component where sigma is trivial")
    norms = A.norm_to_fixed(x)
    if any(not f.is_zero(f.sub(n, f.one())) for f, n in zip(A.factors, norms)):
        raise DomainError("x sigma(x) must equal 1")

    parts: List[Component] = []
    for j, (f, dj, (xu, xv)) in enumerate(zip(A.factors, A.d, x.parts)):
        sub = EtaleInvolutionAlgebra((f,), (dj,))
        xj = AlgebraElement(((xu, xv),))
        for z in _h90_candidates(f):
            zj = AlgebraElement((z,))
            y = sub.add(zj, sub.mul(xj, sub.sigma(zj)))
            if sub.is_invertible(y):
                parts.append(y.parts[0])
                break
        else:
            raise DomainError(f"no Hilbert 90 solution found on component {j}")
    y = AlgebraElement(tuple(parts), Fraction(1) if A.fixed_rational else None)
    if A.mul(y, A.inv(A.sigma(y))) != AlgebraElement(x.parts, x.fixed):
        raise DomainError("Hilbert 90 solution failed its exact re-check")
    return y


# -- plain embeddings --------------------------------------------------------


@dataclass(frozen=True)
class SplitReport:
    """Per-factor verdict of the plain embedding criterion."""

    splits: bool
    failures: Tuple[Tuple[int, Tuple[Place, ...]], ...] = field(default_factory=tuple)


def splits_csa(
    factors: Sequence[FieldFactor], ram: Iterable[PlaceLike], n: int
) -> SplitReport:
    """Does every factor split the central division algebra D ramified at ``ram``?

    The algebra is M_{n/2}(D) (M_n(Q) when ``ram`` is empty), and a factor
    splits D iff all its local degrees above the ramified places are even.
    """
    ram_places: FrozenSet[Place] = frozenset(Place.coerce(v) for v in ram)
    total = sum(f.degree for f in factors)
    if total != n:
        raise DomainError(f"factor degrees sum to {total}, expected {n}")
    if ram_places and n % 2:
        raise DomainError("a quaternion division algebra needs even n")
    failures = []
    for j, f in enumerate(factors):
        bad = tuple(
            v
            for v in sorted(ram_places)
            if any(w.local_degree % 2 for w in places_above(f, v, j))
        )
        if bad:
            failures.append((j, bad))
    return SplitReport(not failures, tuple(failures))


def real_sign_patterns(factors: Sequence[FieldFactor]) -> List[FElement]:
    """Elements of F realising every sign pattern at the real embeddings."""
    per_factor: List[List[Coords]] = []
    for f in factors:
        embeddings = f.real_embeddings()
        if not embeddings:
            per_factor.append([f.one()])
            continue
        found: Dict[Tuple[int, ...], Coords] = {}
        seeds = [f.one(), f.embed(-1)]
        for mask in range(1, f.degree):
            seeds.extend((f.basis_element(mask), f.neg(f.basis_element(mask))))
        for z in seeds + [c for y in f.small_elements(4) for c in (y, f.neg(y))]:
            found.setdefault(f.sign_vector(z), z)
            if len(found) == 1 << len(embeddings):
                break
        per_factor.append(list(found.values()))
    return [tuple(choice) for choice in product(*per_factor)]
