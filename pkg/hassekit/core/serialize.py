"""JSON payloads: parsing inputs and emitting reports with canonical rationals."""

import json
import logging
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, Iterable, List, Mapping, Optional, Sequence, Union

from .errors import DomainError
from .etale import EtaleInvolutionAlgebra, FElement, SplitReport
from .fields import Coords, FieldFactor
from .multinorm import (
    DegreeHypothesis,
    MultinormWitness,
    NormProductCheck,
    TwoFieldSearch,
)
from .places import Place, PlaceLike
from .quadratic_forms import LocalInvariants, QuadraticForm
from .quaternion import (
    DeltaVector,
    NonsplitCertificate,
    QuaternionAlgebra,
    ShiftMap,
    SkewHermitianForm,
)
from .split_embedding import Example75Certificate, LocalResult, ObstructionReport
from .utils import Rational

logger = logging.getLogger(__name__)

JSON = Dict[str, Any]

FORM_KEYS = frozenset({"diag"})
ALGEBRA_KEYS = frozenset({"factors", "d", "fixed_rational"})


# -- scalars -------------------------------------------------------------


def parse_rational(value: Union[str, int, Fraction]) -> Fraction:
    """Parse ``"p/q"``, ``"p"`` or an integer; floats are rejected."""
    if isinstance(value, bool) or isinstance(value, float):
        raise DomainError(f"{value!r} is not an exact rational")
    if isinstance(value, (int, Fraction)):
        return Fraction(value)
    if not isinstance(value, str):
        raise DomainError(f"{value!r} is not a rational")
    text = value.strip()
    if "." in text or "e" in text.lower():
        raise DomainError(f"{value!r} is not an exact rational")
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as e:
        raise DomainError(f"cannot parse rational {value!r}") from e


def format_rational(x: Rational) -> str:
    """Lowest terms, ``"p"`` when the denominator is 1."""
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def parse_place(value: PlaceLike) -> Place:
    return Place.coerce(value)


def format_place(v: Place) -> str:
    return str(v)


def _check_keys(payload: Any, allowed: Iterable[str], what: str) -> Mapping[str, Any]:
    if not isinstance(payload, Mapping):
        raise DomainError(f"{what} must be a JSON object")
    unknown = sorted(set(payload) - set(allowed))
    if unknown:
        raise DomainError(f"unknown {what} field(s): {', '.join(unknown)}")
    return payload


def read_json(source: Union[str, Path]) -> Any:
    """Load JSON from a file path, or parse the text itself when it is inline JSON.

    ``json.JSONDecodeError`` propagates so callers can report malformed input.
    """
    text = str(source)
    if text.lstrip().startswith(("{", "[")):
        return json.loads(text)
    path = Path(text)
    if not path.is_file():
        raise DomainError(f"JSON file '{text}' not found")
    with open(path, "r", encoding="utf-8") as f:
        return json.load(f)


def dumps(payload: Any) -> str:
    return json.dumps(payload, sort_keys=True, indent=2)


# -- forms and algebras ---------------------------------------------------


def parse_form(payload: Any) -> QuadraticForm:
    data = _check_keys(payload, FORM_KEYS, "form")
    if "diag" not in data or not isinstance(data["diag"], list):
        raise DomainError('a form needs a "diag" list')
    return QuadraticForm(tuple(parse_rational(a) for a in data["diag"]))


def form_to_json(q: QuadraticForm) -> JSON:
    return {"diag": [format_rational(a) for a in q.diag]}


def invariants_to_json(inv: LocalInvariants) -> JSON:
    return {
        "rank": inv.rank,
        "det": format_rational(inv.det_class.representative),
        "disc": format_rational(inv.disc_class.representative),
        "hasse": {format_place(v): h for v, h in inv.hasse if h == -1},
        "signature": list(inv.signature),
    }


def parse_factor(spec: Any) -> FieldFactor:
    """``"Q"`` or ``[]`` for Q, ``[m]`` for Q(sqrt m), ``[a, b]`` for a biquadratic."""
    if spec == "Q":
        return FieldFactor.rational()
    if not isinstance(spec, list) or not all(
        isinstance(g, int) and not isinstance(g, bool) for g in spec
    ):
        raise DomainError(f"cannot parse field factor {spec!r}")
    return FieldFactor(tuple(spec))


def factor_to_json(f: FieldFactor) -> List[int]:
    return list(f.gens)


def parse_coords(factor: FieldFactor, value: Any) -> Coords:
    """Coordinates on the power basis, or a bare rational for an element of Q."""
    if isinstance(value, list):
        if len(value) != factor.degree:
            raise DomainError(f"{factor} elements need {factor.degree} coordinates")
        return factor.element([parse_rational(c) for c in value])
    return factor.embed(parse_rational(value))


def coords_to_json(x: Coords) -> List[str]:
    return [format_rational(c) for c in x]


def parse_element(factors: Sequence[FieldFactor], value: Any) -> FElement:
    if not isinstance(value, list) or len(value) != len(factors):
        raise DomainError(f"elements of F need {len(factors)} components")
    return tuple(parse_coords(f, c) for f, c in zip(factors, value))


def element_to_json(x: FElement) -> List[List[str]]:
    return [coords_to_json(c) for c in x]


def parse_algebra(payload: Any) -> EtaleInvolutionAlgebra:
    data = _check_keys(payload, ALGEBRA_KEYS, "algebra")
    if not isinstance(data.get("factors"), list) or "d" not in data:
        raise DomainError('an algebra needs "factors" and "d"')
    factors = tuple(parse_factor(spec) for spec in data["factors"])
    fixed = data.get("fixed_rational", False)
    if not isinstance(fixed, bool):
        raise DomainError('"fixed_rational" must be a boolean')
    return EtaleInvolutionAlgebra(factors, parse_element(factors, data["d"]), fixed)


def algebra_to_json(A: EtaleInvolutionAlgebra) -> JSON:
    return {
        "factors": [factor_to_json(f) for f in A.factors],
        "d": element_to_json(A.d),
        "fixed_rational": A.fixed_rational,
    }


def parse_pins(factors: Sequence[FieldFactor], payload: Any) -> Dict[Place, FElement]:
    """``{"place": element}`` objects."""
    if not isinstance(payload, Mapping):
        raise DomainError("pins must be a JSON object keyed by place")
    return {parse_place(k): parse_element(factors, v) for k, v in payload.items()}


def parse_quaternion(text: str) -> QuaternionAlgebra:
    """``"alpha,beta"``."""
    parts = [p.strip() for p in str(text).split(",")]
    if len(parts) != 2:
        raise DomainError(f"expected 'alpha,beta', got {text!r}")
    try:
        alpha, beta = (int(p) for p in parts)
    except ValueError as e:
        raise DomainError(f"alpha and beta must be integers: {text!r}") from e
    return QuaternionAlgebra(alpha, beta)


def quaternion_to_json(D: QuaternionAlgebra) -> JSON:
    return {
        "alpha": D.alpha,
        "beta": D.beta,
        "ram": [format_place(v) for v in sorted(D.ram)],
    }


def parse_skew_form(algebra: QuaternionAlgebra, payload: Any) -> SkewHermitianForm:
    data = _check_keys(payload, FORM_KEYS, "skew-hermitian form")
    entries = data.get("diag")
    if not isinstance(entries, list) or not all(isinstance(q, list) for q in entries):
        raise DomainError('a skew-hermitian form needs "diag": [[x, y, z], ...]')
    return SkewHermitianForm(
        algebra, tuple(algebra.pure([parse_rational(c) for c in q]) for q in entries)
    )


# -- reports ---------------------------------------------------------------


def local_result_to_json(r: LocalResult) -> JSON:
    out: JSON = {"place": format_place(r.place), "ok": r.ok}
    if r.witness is not None:
        out["witness"] = element_to_json(r.witness)
    if r.reason:
        out["reason"] = r.reason
    return out


def certificate_to_json(c: Example75Certificate) -> JSON:
    return {
        "p1": c.p1,
        "p2": c.p2,
        "checks": {name: ok for name, ok in c.checks},
        "sampled_primes": c.sampled_primes,
        "argument": c.argument,
    }


def report_to_json(report: ObstructionReport) -> JSON:
    out: JSON = {
        "verdict": report.verdict,
        "local": [local_result_to_json(r) for r in report.local_table],
        "method": report.method,
    }
    if report.witness is not None:
        out["witness"] = element_to_json(report.witness)
    if report.witness_fixed is not None:
        out["witness_fixed"] = format_rational(report.witness_fixed)
    if report.place is not None:
        out["place"] = format_place(report.place)
    if report.reason:
        out["reason"] = report.reason
    if report.certificate is not None:
        out["certificate"] = certificate_to_json(report.certificate)
    if report.bound is not None:
        out["bound"] = report.bound
    if report.notes:
        out["notes"] = list(report.notes)
    return out


def split_report_to_json(report: SplitReport) -> JSON:
    return {
        "splits": report.splits,
        "failures": {
            str(j): [format_place(v) for v in places] for j, places in report.failures
        },
    }


def hypothesis_to_json(h: DegreeHypothesis) -> JSON:
    return {
        "holds": h.holds,
        "structural": h.structural,
        "failures": [format_place(v) for v in h.failures],
        "sampled": h.sampled,
    }


def norm_check_to_json(c: NormProductCheck) -> JSON:
    return {
        "place": format_place(c.place),
        "norm_groups": list(c.norm_groups),
        "split_indices": list(c.split_indices),
        "holds": c.holds,
    }


def multinorm_to_json(w: MultinormWitness, include_table: bool = False) -> JSON:
    out: JSON = {
        "s": format_rational(w.s),
        "phi": w.phi,
        "u1": format_place(w.u1),
        "u2": format_place(w.u2),
        "local_checks": len(w.local_checks),
        "local_ok": all(c.holds for c in w.local_checks),
    }
    if include_table:
        out["table"] = [norm_check_to_json(c) for c in w.local_checks]
    return out


def two_field_to_json(r: TwoFieldSearch) -> JSON:
    return {
        "a": r.a,
        "b": r.b,
        "checked": r.checked,
        "decomposed": [
            {"s": d.s, "x": list(d.x), "y": list(d.y)} for d in r.decomposed
        ],
        "local_failures": list(r.local_failures),
        "undecided": list(r.undecided),
    }


def delta_to_json(delta: DeltaVector) -> JSON:
    return {
        "places": [format_place(v) for v in delta.places],
        "bits": list(delta.bits),
        "canonical": list(delta.canonical()),
        "zero": delta.is_zero,
    }


def shift_to_json(shift: ShiftMap) -> JSON:
    return {format_place(v): list(bits) for v, bits in sorted(shift.items())}


def nonsplit_to_json(cert: NonsplitCertificate) -> JSON:
    return {
        "a": element_to_json(cert.a),
        "v0": format_place(cert.v0),
        "center": str(cert.center),
        "pinned": [format_place(v) for v in cert.pinned],
        "pins": {format_place(v): element_to_json(x) for v, x in cert.pins},
        "corrections": {
            format_place(v): element_to_json(b) for v, b in cert.corrections
        },
        "checked_places": [format_place(v) for v in cert.checked_places],
        "v_set": [format_place(v) for v in cert.v_set],
        "residual": delta_to_json(cert.residual),
        "twist_class": delta_to_json(cert.twist_class),
        "automatic": {"star": cert.star_automatic, "sharp": cert.sharp_automatic},
    }


def places_to_json(places: Iterable[Place]) -> List[str]:
    return [format_place(v) for v in sorted(places)]


def optional_rational(x: Optional[Rational]) -> Optional[str]:
    return None if x is None else format_rational(x)
