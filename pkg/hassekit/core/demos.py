"""Worked examples, each rebuilt from its parameters and re-verified on every run.

Every function returns a JSON-ready dictionary; any failed claim raises
``CertificationError`` instead of printing a wrong table.
"""

import logging
from typing import Any, Dict, List, Optional

from sympy import isprime

from .config import Bounds, resolve_bounds
from .errors import CertificationError, DomainError
from .etale import EtaleInvolutionAlgebra, trace_form
from .fields import FieldFactor
from .multinorm import (
    BiquadraticDatum,
    check_local_degree_hypothesis,
    multinorm_witness,
    norm_form,
    norm_form_indefinite,
)
from .places import Place, is_local_square
from .quadratic_forms import build_form_with_invariants, invariants, represents
from .quaternion import (
    CliffordCenter,
    DeltaVector,
    delta_classes,
    nonsplit_global_a,
    quaternion_from_ramset,
    ramified_split_places,
)
from .serialize import (
    algebra_to_json,
    delta_to_json,
    element_to_json,
    form_to_json,
    hypothesis_to_json,
    multinorm_to_json,
    places_to_json,
    quaternion_to_json,
    report_to_json,
)
from .split_embedding import GLOBALLY_OBSTRUCTED, SplitEmbeddingProblem, global_embed

logger = logging.getLogger(__name__)

JSON = Dict[str, Any]


def _require(claim: str, ok: bool) -> None:
    if not ok:
        raise CertificationError(f"demo claim failed: {claim}")


def example_7_5(p1: int = 13, p2: int = 17, bounds: Optional[Bounds] = None) -> JSON:
    """Q x Q(sqrt p1) with d = (p1, p2) into the form with Hasse flips at p1 and p2.

    Locally embeddable everywhere, globally obstructed.
    """
    bounds = resolve_bounds(bounds)
    A = EtaleInvolutionAlgebra(
        (FieldFactor.rational(), FieldFactor.quadratic(p1)), ((p1,), (p2, 0))
    )
    q_tilde = trace_form(A, A.fixed_one())
    hasse = {v: h for v, h in invariants(q_tilde).hasse}
    for p in (p1, p2):
        hasse[Place(p)] = -hasse.get(Place(p), 1)
    target = build_form_with_invariants(
        q_tilde.rank, q_tilde.det, hasse, q_tilde.signature, bounds
    )
    report = global_embed(SplitEmbeddingProblem(target, A), bounds)

    local_ok = all(r.ok for r in report.local_table)
    _require("every place of the support is locally ok", local_ok)
    obstructed = report.verdict == GLOBALLY_OBSTRUCTED
    _require("the verdict is globally obstructed", obstructed)
    _require("the parity certificate is attached", report.certificate is not None)
    logger.info(f"parity example ({p1}, {p2}): locally ok, globally obstructed")
    return {
        "algebra": algebra_to_json(A),
        "q_tilde": form_to_json(q_tilde),
        "target": form_to_json(target),
        "flips": places_to_json([Place(p1), Place(p2)]),
        "local": "all ok",
        "global": "obstructed",
        "report": report_to_json(report),
    }


def example_4_6(
    a: int = 13,
    b: int = 17,
    ramification: Optional[List[int]] = None,
    bounds: Optional[Bounds] = None,
) -> JSON:
    """Multinorm failure for Q(sqrt a, sqrt b) and the quaternion algebra D_0.

    D_0 ramifies at two primes where a is a square and b is not; the
    reduced norm form on K + sqrt(a) D_0^- is indefinite, so it takes
    the value s that escapes the norm product.
    """
    bounds = resolve_bounds(bounds)
    primes = ramification or [3, 23]
    B = BiquadraticDatum(a, b)
    hypothesis = check_local_degree_hypothesis(B, bounds=bounds)
    _require("local degrees are at most 2", hypothesis.holds)
    witness = multinorm_witness(B, bounds)
    _require("phi(s) = -1", witness.phi == -1)
    _require(
        "the local norm product holds at every sampled place",
        all(c.holds for c in witness.local_checks),
    )

    places = [Place(p) for p in primes]
    for v in places:
        _require(f"{a} is a square at {v}", is_local_square(a, v))
        _require(f"{b} is not a square at {v}", not is_local_square(b, v))
    D0 = quaternion_from_ramset(places, bounds)
    _require("D_0 ramifies exactly at the chosen primes", D0.ram == frozenset(places))

    indefinite = norm_form_indefinite(D0.alpha, D0.beta, a)
    _require("the norm form is indefinite", indefinite)
    q = norm_form(D0.alpha, D0.beta, a)
    _require("the norm form represents s", represents(q, witness.s))
    logger.info(f"multinorm example ({a}, {b}): s = {witness.s}, D_0 = {D0}")
    return {
        "biquadratic": {"a": a, "b": b},
        "hypothesis": hypothesis_to_json(hypothesis),
        "witness": multinorm_to_json(witness),
        "quaternion": quaternion_to_json(D0),
        "norm_form": form_to_json(q),
        "indefinite": indefinite,
    }


def _primes_one_mod_four(count: int) -> List[int]:
    primes: List[int] = []
    p = 5
    while len(primes) < count:
        if isprime(p):
            primes.append(p)
        p += 4
    return primes


def theorem_b(v_size: int = 2, bounds: Optional[Bounds] = None) -> JSON:
    """Realise every delta class on a V of the given size by a twisted global a.

    F = Q x Q with d = (c, c) has the split centre Q x Q, so V is all of
    ram(D) and k = |V| is even.  There are 2^(k-1) classes modulo the
    all-ones vector, so several isomorphism classes of involutions appear.
    """
    if v_size < 2 or v_size % 2:
        raise DomainError(f"v_size must be even and at least 2, got {v_size}")
    bounds = resolve_bounds(bounds)
    primes = _primes_one_mod_four(v_size)
    D = quaternion_from_ramset([Place(p) for p in primes], bounds)
    center = CliffordCenter.of(1)
    v_set = sorted(ramified_split_places(D.ram, center))
    _require("V is the chosen set of primes", v_set == [Place(p) for p in primes])

    c = 1
    for p in primes:
        c *= p
    factors = (FieldFactor.rational(), FieldFactor.rational())
    d = ((c,), (c,))

    rows: List[JSON] = []
    seen: List[DeltaVector] = []
    for cls in delta_classes(v_set):
        twists = [v for v, bit in zip(cls.places, cls.bits) if bit]
        cert = nonsplit_global_a(D, 2, factors, d, {}, twists, z_disc=1, bounds=bounds)
        _require(f"class {cls} is realised", cert.twist_class == cls)
        _require(f"class {cls} is new", cert.twist_class not in seen)
        seen.append(cert.twist_class)
        rows.append(
            {
                "twist_places": places_to_json(twists),
                "a": element_to_json(cert.a),
                "v0": str(cert.v0),
                "delta": delta_to_json(cert.twist_class),
            }
        )
    _require("the class count is 2^(|V|-1)", len(rows) == 1 << (v_size - 1))
    logger.info(f"delta class table: |V| = {v_size}, {len(rows)} classes")
    return {
        "quaternion": quaternion_to_json(D),
        "center": str(center),
        "d": [str(c), str(c)],
        "v_set": places_to_json(v_set),
        "classes": len(rows),
        "table": rows,
    }
