"""Quadratic forms over Q: invariants, equivalence, synthesis and similarity."""
# --------------------------------------------------------------------
# Design concept
# --------------------------------------------------------------------
# 1. *Diagonal storage* - a form is its diagonal.  Gram matrices are
#    accepted only through ``diagonalize`` (symmetric congruence).
#
# 2. *Invariants decide everything* - over Q_v a form is classified by
#    rank, determinant class and Hasse invariant (finite v) or signature
#    (real v).  Isotropy, representation and Witt index are read off the
#    same three numbers, so every local question is a symbol evaluation.
#
# 3. *Constructive synthesis* - ``build_form_with_invariants`` peels one
#    diagonal entry at a time and finishes with a binary block <x, d x>
#    whose x comes from the symbol prescription solver.
#
# 4. *Multiplicative Hasse values* - h_v is +1 / -1 throughout.
# --------------------------------------------------------------------

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Mapping, Optional, Sequence, Tuple, Union

from .config import Bounds, resolve_bounds
from .errors import (
    CertificationError,
    DegenerateFormError,
    DomainError,
    InfeasibleError,
)
from .places import (
    INFINITY,
    Place,
    PlaceLike,
    SquareClass,
    hilbert_symbol,
    is_local_square,
    same_square_class,
    support_places,
)
from .symbols import lemma_hs
from .utils import Rational, as_fraction, as_nonzero, squarefree_part

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class QuadraticForm:
    """Nondegenerate diagonal form a_1 x_1^2 + ... + a_n x_n^2 over Q."""

    diag: Tuple[Fraction, ...]

    def __post_init__(self) -> None:
        if not self.diag:
            raise DegenerateFormError("a quadratic form needs rank at least 1")
        values = tuple(as_fraction(a) for a in self.diag)
        if any(a == 0 for a in values):
            raise DegenerateFormError(
                f"zero diagonal entry in {list(map(str, values))}"
            )
        object.__setattr__(self, "diag", values)

    @classmethod
    def of(cls, *entries: Rational) -> "QuadraticForm":
        return cls(tuple(as_fraction(a) for a in entries))

    @property
    def rank(self) -> int:
        return len(self.diag)

    @property
    def det(self) -> Fraction:
        result = Fraction(1)
        for a in self.diag:
            result *= a
        return result

    @property
    def disc(self) -> Fraction:
        """Signed discriminant (-1)^(n(n-1)/2) d."""
        n = self.rank
        return self.det * (-1) ** (n * (n - 1) // 2)

    @property
    def signature(self) -> Tuple[int, int]:
        positive = sum(1 for a in self.diag if a > 0)
        return positive, self.rank - positive

    def __add__(self, other: "QuadraticForm") -> "QuadraticForm":
        return QuadraticForm(self.diag + other.diag)

    def __str__(self) -> str:
        return "<" + ", ".join(str(a) for a in self.diag) + ">"


@dataclass(frozen=True)
class LocalInvariants:
    """Complete set of invariants of a form; Hasse values listed on the support."""

    rank: int
    det_class: SquareClass
    disc_class: SquareClass
    hasse: Tuple[Tuple[Place, int], ...]
    signature: Tuple[int, int]

    def hasse_at(self, v: PlaceLike) -> int:
        return dict(self.hasse).get(Place.coerce(v), 1)

    def nontrivial_hasse(self) -> List[Place]:
        return [v for v, h in self.hasse if h == -1]


def diagonalize(gram: Sequence[Sequence[Rational]]) -> QuadraticForm:
    """Diagonalize a symmetric nonsingular rational matrix by congruence."""
    n = len(gram)
    if n == 0 or any(len(row) != n for row in gram):
        raise DomainError("Gram matrix must be square and nonempty")
    m = [[as_fraction(x) for x in row] for row in gram]
    for i in range(n):
        for j in range(i):
            if m[i][j] != m[j][i]:
                raise DomainError("Gram matrix is not symmetric")

    diag: List[Fraction] = []
    for k in range(n):
        if m[k][k] == 0:
            swap = next((j for j in range(k + 1, n) if m[j][j] != 0), None)
            if swap is not None:
                m[k], m[swap] = m[swap], m[k]
                for row in m:
                    row[k], row[swap] = row[swap], row[k]
            else:
                partner = next((j for j in range(k + 1, n) if m[k][j] != 0), None)
                if partner is None:
                    raise DegenerateFormError("Gram matrix is singular")
                for c in range(n):
                    m[k][c] += m[partner][c]
                for r in range(n):
                    m[r][k] += m[r][partner]
        pivot = m[k][k]
        for i in range(k + 1, n):
            factor = m[i][k] / pivot
            if factor == 0:
                continue
            for c in range(k, n):
                m[i][c] -= factor * m[k][c]
            for r in range(k, n):
                m[r][i] -= factor * m[r][k]
        diag.append(pivot)
    return QuadraticForm(tuple(diag))


def hasse_invariant(q: QuadraticForm, v: PlaceLike) -> int:
    """h_v(q) = prod_{i<j} (a_i, a_j)_v."""
    v = Place.coerce(v)
    result = 1
    for i, a in enumerate(q.diag):
        for b in q.diag[i + 1:]:
            result *= hilbert_symbol(a, b, v)
    return result


def invariants(q: QuadraticForm) -> LocalInvariants:
    """Rank, determinant and discriminant classes, Hasse map and signature."""
    places = support_places(*q.diag)
    hasse = tuple((v, hasse_invariant(q, v)) for v in places)
    return LocalInvariants(
        rank=q.rank,
        det_class=SquareClass.of(q.det),
        disc_class=SquareClass.of(q.disc),
        hasse=hasse,
        signature=q.signature,
    )


def _scale_factor(n: int, det: Fraction, lam: Fraction, v: Place) -> int:
    return hilbert_symbol(lam, det ** (n - 1) * (-1) ** (n * (n - 1) // 2), v)


def scale(q: QuadraticForm, lam: Rational) -> QuadraticForm:
    """Return lam * q after checking the determinant and Hasse scaling laws.

    h_v(lam q) = (lam, (-1)^(n(n-1)/2) d^(n-1))_v h_v(q); for even n this is
    (lam, disc)_v h_v(q).
    """
    lam = as_nonzero(lam, "scaling factor")
    scaled = QuadraticForm(tuple(lam * a for a in q.diag))
    if scaled.det != lam ** q.rank * q.det:
        raise CertificationError("determinant scaling law failed")
    for v in support_places(lam, *q.diag):
        expected = _scale_factor(q.rank, q.det, lam, v) * hasse_invariant(q, v)
        if hasse_invariant(scaled, v) != expected:
            raise CertificationError(f"Hasse scaling law failed at {v}")
    return scaled


def locally_equivalent(q1: QuadraticForm, q2: QuadraticForm, v: PlaceLike) -> bool:
    """Equivalence over Q_v.

    Finite places compare rank, det class and Hasse invariant; the real
    place compares signatures.
    """
    v = Place.coerce(v)
    if q1.rank != q2.rank:
        return False
    if v.is_infinite:
        return q1.signature == q2.signature
    return same_square_class(q1.det, q2.det, v) and hasse_invariant(
        q1, v
    ) == hasse_invariant(q2, v)


def globally_equivalent(q1: QuadraticForm, q2: QuadraticForm) -> bool:
    """Equivalence over Q, by Hasse-Minkowski on the joint support."""
    if q1.rank != q2.rank or squarefree_part(q1.det) != squarefree_part(q2.det):
        return False
    return all(
        locally_equivalent(q1, q2, v) for v in support_places(*q1.diag, *q2.diag)
    )


def _isotropic_by_invariants(n: int, det: Fraction, hasse: int, v: Place) -> bool:
    if n <= 1:
        return False
    if n == 2:
        return is_local_square(-det, v)
    if n == 3:
        return hasse == hilbert_symbol(-1, -det, v)
    if n == 4:
        return not is_local_square(det, v) or hasse == hilbert_symbol(-1, -1, v)
    return True


def is_isotropic(q: QuadraticForm, v: PlaceLike) -> bool:
    """True iff q has a nontrivial zero over Q_v."""
    v = Place.coerce(v)
    if v.is_infinite:
        p, m = q.signature
        return p > 0 and m > 0
    return _isotropic_by_invariants(q.rank, q.det, hasse_invariant(q, v), v)


def represents(q: QuadraticForm, c: Rational, v: Union[PlaceLike, None] = None) -> bool:
    """True iff q represents c over Q_v, or over Q when ``v`` is None or "global"."""
    c = as_nonzero(c, "represented value")
    if v is None or v == "global":
        if q.rank == 1:
            return squarefree_part(c / q.diag[0]) == 1
        return all(represents(q, c, w) for w in support_places(c, *q.diag))
    place = Place.coerce(v)
    if q.rank == 1:
        return is_local_square(c / q.diag[0], place)
    return is_isotropic(q + QuadraticForm.of(-c), place)


def local_witt_index(q: QuadraticForm, v: PlaceLike) -> int:
    """Number of hyperbolic planes split off q over Q_v."""
    v = Place.coerce(v)
    if v.is_infinite:
        return min(q.signature)
    n, det, hasse = q.rank, q.det, hasse_invariant(q, v)
    index = 0
    while _isotropic_by_invariants(n, det, hasse, v):
        # q = H + q' with det q' = -det and h(q) = (-1, det q') h(q')
        hasse *= hilbert_symbol(-1, -det, v)
        det = -det
        n -= 2
        index += 1
    return index


# -- synthesis -----------------------------------------------------------


def real_hasse_invariant(signature: Tuple[int, int]) -> int:
    """h_inf of any form with the given signature."""
    m = signature[1]
    return -1 if (m * (m - 1) // 2) % 2 else 1


def _binary_feasible(
    det: Fraction, targets: Dict[Place, int], signature: Tuple[int, int]
) -> bool:
    if (det > 0) != (signature[1] != 1):
        return False
    return all(h == 1 or not is_local_square(-det, v) for v, h in targets.items())


def _build_binary(
    det: Fraction, targets: Dict[Place, int], signature: Tuple[int, int], bounds: Bounds
) -> QuadraticForm:
    pins: Dict[PlaceLike, Rational] = {}
    if signature == (2, 0):
        pins[INFINITY] = 1
    elif signature == (0, 2):
        pins[INFINITY] = -1
    x = lemma_hs(-det, {v: h for v, h in targets.items() if h == -1}, pins, bounds)
    return QuadraticForm.of(x, det * x)


def _drop_entry(signature: Tuple[int, int], a: Fraction) -> Tuple[int, int]:
    p, m = signature
    return (p - 1, m) if a > 0 else (p, m - 1)


def _peel_targets(
    targets: Dict[Place, int], a: Fraction, rest_det: Fraction
) -> Dict[Place, int]:
    places = set(targets) | set(support_places(a, rest_det))
    return {v: targets.get(v, 1) * hilbert_symbol(a, rest_det, v) for v in places}


def _square_free_candidates(limit: int) -> List[int]:
    values: List[int] = []
    k = 1
    while len(values) < limit:
        if squarefree_part(k) == k:
            values.extend((k, -k))
        k += 1
    return values[:limit]


def build_form_with_invariants(
    n: int,
    d: Union[Rational, SquareClass],
    hasse: Mapping[PlaceLike, int],
    signature: Tuple[int, int],
    bounds: Optional[Bounds] = None,
) -> QuadraticForm:
    """Construct a diagonal form with rank n, det class d, Hasse map and signature.

    Raises:
        InfeasibleError: the invariants are inconsistent; ``constraint``
            names the violated condition.
    """
    bounds = resolve_bounds(bounds)
    if isinstance(d, SquareClass):
        det = Fraction(d.representative)
    else:
        det = Fraction(squarefree_part(d))
    p, m = signature
    if n < 1 or p < 0 or m < 0 or p + m != n:
        raise InfeasibleError(
            f"signature {signature} does not fit rank {n}", "signature"
        )
    if (det < 0) != (m % 2 == 1):
        raise InfeasibleError(
            f"determinant sign {det} does not match signature {signature}", "det-sign"
        )
    targets: Dict[Place, int] = {}
    for key, value in hasse.items():
        if value not in (1, -1):
            raise InfeasibleError(f"Hasse value at {key} must be +1 or -1", "sign")
        targets[Place.coerce(key)] = int(value)
    real = real_hasse_invariant(signature)
    if targets.setdefault(INFINITY, real) != real:
        raise InfeasibleError(
            f"Hasse value at inf contradicts signature {signature}", "real-hasse"
        )
    product = 1
    for value in targets.values():
        product *= value
    if product != 1:
        raise InfeasibleError(
            "the Hasse values do not multiply to +1", "product-formula"
        )

    diag: List[Fraction] = []
    cur_det, cur_sig, cur_targets = det, signature, targets
    while len(diag) < n - 3:
        a = Fraction(1 if cur_sig[0] > 0 else -1)
        cur_det = cur_det / a
        cur_targets = _peel_targets(cur_targets, a, cur_det)
        cur_sig = _drop_entry(cur_sig, a)
        diag.append(a)

    remaining = n - len(diag)
    if remaining == 3:
        for candidate in _square_free_candidates(bounds.witness_cap):
            a = Fraction(candidate)
            if (a > 0 and cur_sig[0] == 0) or (a < 0 and cur_sig[1] == 0):
                continue
            rest_det = Fraction(squarefree_part(cur_det / a))
            rest_sig = _drop_entry(cur_sig, a)
            rest_targets = _peel_targets(cur_targets, a, rest_det)
            if _binary_feasible(rest_det, rest_targets, rest_sig):
                diag.append(a)
                cur_det, cur_sig, cur_targets = rest_det, rest_sig, rest_targets
                remaining = 2
                break
        else:
            raise InfeasibleError(
                "no ternary splitting found within the bound", "ternary"
            )

    if remaining == 2:
        if not _binary_feasible(cur_det, cur_targets, cur_sig):
            raise InfeasibleError(
                "a binary form needs -d to be a local nonsquare wherever h = -1",
                "binary-hasse",
            )
        diag.extend(_build_binary(cur_det, cur_targets, cur_sig, bounds).diag)
    elif remaining == 1:
        if any(h == -1 for h in cur_targets.values()):
            raise InfeasibleError(
                "a rank-1 form has trivial Hasse invariant", "rank-one"
            )
        diag.append(cur_det)

    form = QuadraticForm(tuple(diag))
    got = invariants(form)
    if (
        squarefree_part(form.det) != squarefree_part(det)
        or form.signature != signature
        or any(got.hasse_at(v) != h for v, h in targets.items())
        or any(h == -1 and v not in targets for v, h in got.hasse)
    ):
        raise CertificationError(
            f"synthesized form {form} misses the requested invariants"
        )
    logger.info(f"built {form} with det {det}, signature {signature}")
    return form


# -- similarity ----------------------------------------------------------


def similar(
    f: QuadraticForm, g: QuadraticForm, bounds: Optional[Bounds] = None
) -> Optional[Fraction]:
    """Return lam with lam f equivalent to g over Q, or None if they are not similar."""
    bounds = resolve_bounds(bounds)
    if f.rank != g.rank:
        return None
    n = f.rank
    if n % 2:
        lam = Fraction(squarefree_part(g.det / f.det))
        return lam if globally_equivalent(scale(f, lam), g) else None

    if squarefree_part(f.det) != squarefree_part(g.det):
        return None
    signs: List[int] = []
    if f.signature == g.signature:
        signs.append(1)
    if f.signature[::-1] == g.signature and -1 not in signs:
        signs.append(-1)
    disc = f.disc
    places = [v for v in support_places(*f.diag, *g.diag) if not v.is_infinite]
    ratios = {v: hasse_invariant(f, v) * hasse_invariant(g, v) for v in places}

    for sign in signs:
        targets: Dict[PlaceLike, int] = {v: e for v, e in ratios.items() if e == -1}
        real = hilbert_symbol(sign, disc, INFINITY)
        if real == -1:
            targets[INFINITY] = -1
        try:
            lam = lemma_hs(disc, targets, {INFINITY: sign}, bounds)
        except InfeasibleError as e:
            logger.debug(f"similarity with sign {sign} infeasible: {e}")
            continue
        if globally_equivalent(scale(f, lam), g):
            logger.info(f"{g} is equivalent to {lam} * {f}")
            return lam
        raise CertificationError(f"lambda = {lam} fails the equivalence re-check")
    return None
