"""Hilbert symbols and rational quadratic forms."""

from typing import Any, Dict, Optional, Tuple

import click

from ..core.errors import DomainError
from ..core.places import INFINITY, Place, hilbert_symbol
from ..core.quadratic_forms import (
    QuadraticForm,
    build_form_with_invariants,
    globally_equivalent,
    invariants,
    locally_equivalent,
    real_hasse_invariant,
    similar,
)
from ..core.serialize import (
    form_to_json,
    format_place,
    invariants_to_json,
    optional_rational,
    parse_form,
    parse_place,
    parse_rational,
    read_json,
)
from .common import (
    CONTEXT_SETTINGS,
    Settings,
    emit,
    pass_settings,
    run_command,
    split_csv,
)


@click.command(context_settings=CONTEXT_SETTINGS)
@click.option("--a", "a", required=True, help="First entry, e.g. 13 or -5/7")
@click.option("--b", "b", required=True, help="Second entry")
@click.option("--place", "-p", required=True, help="'inf' or a prime")
@pass_settings
@run_command
def hilbert(settings: Settings, a: str, b: str, place: str) -> None:
    """Hilbert symbol (a, b)_v over Q."""
    symbol = hilbert_symbol(parse_rational(a), parse_rational(b), parse_place(place))
    emit(settings, {"symbol": symbol})


@click.group(context_settings=CONTEXT_SETTINGS)
def qf() -> None:
    """Diagonal quadratic forms over Q, given as {"diag": [...]} JSON."""


@qf.command("invariants")
@click.option(
    "--form", "-f", "form", required=True, help="Form JSON: a file or inline text"
)
@pass_settings
@run_command
def qf_invariants(settings: Settings, form: str) -> None:
    """Rank, determinant, discriminant, Hasse map and signature."""
    q = parse_form(read_json(form))
    emit(settings, _form_payload(q))


@qf.command("equiv")
@click.option("--form", "-f", "form", required=True, help="First form JSON")
@click.option("--other", "-g", "other", required=True, help="Second form JSON")
@click.option("--place", "-p", default=None, help="Compare over Q_v only")
@pass_settings
@run_command
def qf_equiv(settings: Settings, form: str, other: str, place: Optional[str]) -> None:
    """Decide isometry, globally by Hasse-Minkowski or at one place."""
    q1 = parse_form(read_json(form))
    q2 = parse_form(read_json(other))
    if place is None:
        emit(settings, {"equivalent": globally_equivalent(q1, q2), "place": "global"})
        return
    v = parse_place(place)
    equivalent = locally_equivalent(q1, q2, v)
    emit(settings, {"equivalent": equivalent, "place": format_place(v)})


@qf.command("similar")
@click.option("--form", "-f", "form", required=True, help="First form JSON")
@click.option("--other", "-g", "other", required=True, help="Second form JSON")
@pass_settings
@run_command
def qf_similar(settings: Settings, form: str, other: str) -> None:
    """Find lambda with lambda * form isometric to other."""
    f = parse_form(read_json(form))
    g = parse_form(read_json(other))
    lam = similar(f, g, settings.bounds)
    emit(settings, {"similar": lam is not None, "lambda": optional_rational(lam)})


def _form_payload(q: QuadraticForm) -> Dict[str, Any]:
    return {"form": form_to_json(q), "invariants": invariants_to_json(invariants(q))}


def _parse_signature(text: str) -> Tuple[int, int]:
    parts = split_csv(text)
    try:
        p, m = (int(x) for x in parts)
    except ValueError as e:
        raise DomainError(f"signature must be 'p,q', got {text!r}") from e
    return p, m


@qf.command("build")
@click.option("--rank", "-n", type=int, required=True, help="Rank of the form")
@click.option("--det", "-d", required=True, help="Determinant (any representative)")
@click.option(
    "--hasse", default="", help="Places with Hasse invariant -1, comma separated"
)
@click.option(
    "--signature", "-s", required=True, help="'p,q': positive and negative counts"
)
@pass_settings
@run_command
def qf_build(
    settings: Settings, rank: int, det: str, hasse: str, signature: str
) -> None:
    """Construct a diagonal form with prescribed invariants.

    The real Hasse invariant follows from the signature unless 'inf' is listed.
    """
    sig = _parse_signature(signature)
    targets: Dict[Place, int] = {parse_place(v): -1 for v in split_csv(hasse)}
    targets.setdefault(INFINITY, real_hasse_invariant(sig))
    d = parse_rational(det)
    q = build_form_with_invariants(rank, d, targets, sig, settings.bounds)
    emit(settings, _form_payload(q))
