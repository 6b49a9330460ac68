"""Embedding questions: split targets (M_n(Q), adjoint) and quaternion targets."""

from typing import Any, Dict, Optional, Tuple

import click

from ..core.errors import DomainError
from ..core.quadratic_forms import QuadraticForm
from ..core.quaternion import bad_set_V, clifford_center, nonsplit_global_a
from ..core.serialize import (
    nonsplit_to_json,
    parse_algebra,
    parse_form,
    parse_pins,
    parse_place,
    parse_quaternion,
    parse_rational,
    parse_skew_form,
    places_to_json,
    quaternion_to_json,
    read_json,
    report_to_json,
)
from ..core.split_embedding import SplitEmbeddingProblem, global_embed
from ..core.utils import Rational
from .algebras import ETALE_HELP
from .common import (
    CONTEXT_SETTINGS,
    Settings,
    emit,
    pass_settings,
    run_command,
    split_csv,
)


@click.group(context_settings=CONTEXT_SETTINGS)
def embed() -> None:
    """Embed an etale algebra with involution into a central simple algebra."""


def _target(form: Optional[str], target_diag: Optional[str]) -> QuadraticForm:
    if (form is None) == (target_diag is None):
        raise DomainError("give exactly one of --form and --target-diag")
    if form is not None:
        return parse_form(read_json(form))
    assert target_diag is not None
    return QuadraticForm(tuple(parse_rational(x) for x in split_csv(target_diag)))


@embed.command("split")
@click.option("--etale", "-e", "spec", required=True, help=ETALE_HELP)
@click.option(
    "--target-diag", "-t", default=None, help="Target form entries, e.g. 1,-1,2"
)
@click.option("--form", "-f", "form", default=None, help="Target form JSON instead")
@pass_settings
@run_command
def embed_split(
    settings: Settings, spec: str, target_diag: Optional[str], form: Optional[str]
) -> None:
    """Local table and certified global verdict for (E, sigma) into (M_n(Q), tau_q)."""
    target = _target(form, target_diag)
    problem = SplitEmbeddingProblem(target, parse_algebra(read_json(spec)))
    emit(settings, report_to_json(global_embed(problem, settings.bounds)))


@embed.command("nonsplit")
@click.option("--quaternion", "-q", required=True, help="'alpha,beta'")
@click.option("--etale", "-e", "spec", required=True, help=ETALE_HELP)
@click.option(
    "--form", "-f", "form", default=None,
    help='Skew-hermitian form {"diag": [[x, y, z], ...]}',
)
@click.option("--pins", "-p", default=None, help="Local pins JSON keyed by place")
@click.option("--twist", multiple=True, help="Ramified place to twist at (repeatable)")
@click.option("--z-disc", default=None, help="Discriminant of the Clifford centre")
@pass_settings
@run_command
def embed_nonsplit(
    settings: Settings,
    quaternion: str,
    spec: str,
    form: Optional[str],
    pins: Optional[str],
    twist: Tuple[str, ...],
    z_disc: Optional[str],
) -> None:
    """Global a in F with prescribed local classes for a quaternion target.

    With --form the rank and the Clifford centre come from the form.
    """
    D = parse_quaternion(quaternion)
    A = parse_algebra(read_json(spec))
    m = sum(f.degree for f in A.factors)
    centre_disc: Optional[Rational] = None if z_disc is None else parse_rational(z_disc)
    out: Dict[str, Any] = {"quaternion": quaternion_to_json(D)}
    if form is not None:
        h = parse_skew_form(D, read_json(form))
        if h.rank != m:
            raise DomainError(f"the form has rank {h.rank} but F has degree {m}")
        if centre_disc is None:
            centre_disc = clifford_center(h).disc
        out["V"] = places_to_json(bad_set_V(h))
    local_pins = {} if pins is None else parse_pins(A.factors, read_json(pins))
    certificate = nonsplit_global_a(
        D,
        m,
        A.factors,
        A.d,
        local_pins,
        [parse_place(v) for v in twist],
        z_disc=centre_disc,
        bounds=settings.bounds,
    )
    out["certificate"] = nonsplit_to_json(certificate)
    emit(settings, out)
