"""Etale algebras with involution, quaternion algebras and biquadratic multinorms."""

from typing import Optional

import click

from ..core.errors import DomainError
from ..core.etale import splits_csa, trace_form
from ..core.multinorm import (
    BiquadraticDatum,
    check_local_degree_hypothesis,
    multinorm_witness,
    two_field_multinorm_search,
)
from ..core.quadratic_forms import invariants
from ..core.quaternion import QuaternionAlgebra, quaternion_from_ramset
from ..core.serialize import (
    algebra_to_json,
    element_to_json,
    form_to_json,
    hypothesis_to_json,
    invariants_to_json,
    multinorm_to_json,
    parse_algebra,
    parse_element,
    parse_factor,
    parse_place,
    parse_quaternion,
    parse_rational,
    quaternion_to_json,
    read_json,
    split_report_to_json,
    two_field_to_json,
)
from .common import (
    CONTEXT_SETTINGS,
    Settings,
    emit,
    pass_settings,
    run_command,
    split_csv,
)

ETALE_HELP = 'Algebra JSON {"factors": [...], "d": [...]}: a file or inline text'


@click.group(context_settings=CONTEXT_SETTINGS)
def etale() -> None:
    """Etale algebras E over F with involution, E = F(sqrt d)."""


@etale.command("trace-form")
@click.option("--etale", "-e", "spec", required=True, help=ETALE_HELP)
@click.option("--a", "a", default=None, help="Element of F as JSON (default 1)")
@click.option("--a0", default=None, help="Value on the fixed rational component")
@pass_settings
@run_command
def etale_trace_form(
    settings: Settings, spec: str, a: Optional[str], a0: Optional[str]
) -> None:
    """Diagonalized trace form q_a(y, z) = Tr(a y sigma(z))."""
    A = parse_algebra(read_json(spec))
    element = A.fixed_one() if a is None else parse_element(A.factors, read_json(a))
    q = trace_form(A, element, None if a0 is None else parse_rational(a0))
    emit(
        settings,
        {
            "algebra": algebra_to_json(A),
            "a": element_to_json(element),
            "form": form_to_json(q),
            "invariants": invariants_to_json(invariants(q)),
        },
    )


@etale.command("splits")
@click.option(
    "--factors", "-f", required=True,
    help='Field factors of E as JSON, e.g. [[17], [221]] or ["Q"]',
)
@click.option("--ram", default=None, help="Ramified places, comma separated")
@click.option("--quaternion", "-q", default=None, help="'alpha,beta' instead of --ram")
@pass_settings
@run_command
def etale_splits(
    settings: Settings, factors: str, ram: Optional[str], quaternion: Optional[str]
) -> None:
    """Does every field factor split the algebra ramified at the given places?"""
    payload = read_json(factors)
    if not isinstance(payload, list):
        raise DomainError("--factors must be a JSON list")
    fields = [parse_factor(spec) for spec in payload]
    if quaternion is not None:
        places = sorted(parse_quaternion(quaternion).ram)
    else:
        places = [parse_place(v) for v in split_csv(ram or "")]
    n = sum(f.degree for f in fields)
    emit(settings, split_report_to_json(splits_csa(fields, places, n)))


@click.group(context_settings=CONTEXT_SETTINGS)
def quat() -> None:
    """Quaternion algebras (alpha, beta)_Q."""


@quat.command("ram")
@click.option("--alpha", "-a", type=int, required=True, help="Squarefree integer")
@click.option("--beta", "-b", type=int, required=True, help="Squarefree integer")
@pass_settings
@run_command
def quat_ram(settings: Settings, alpha: int, beta: int) -> None:
    """Ramification set of (alpha, beta)_Q."""
    emit(settings, quaternion_to_json(QuaternionAlgebra(alpha, beta)))


@quat.command("from-ramset")
@click.option("--ram", "-r", required=True, help="Places, comma separated, even count")
@pass_settings
@run_command
def quat_from_ramset(settings: Settings, ram: str) -> None:
    """Find (alpha, beta)_Q ramified exactly at the given places."""
    places = [parse_place(v) for v in split_csv(ram)]
    emit(settings, quaternion_to_json(quaternion_from_ramset(places, settings.bounds)))


@click.group(context_settings=CONTEXT_SETTINGS)
def multinorm() -> None:
    """Multinorm principle for biquadratic fields."""


@multinorm.command("biquad")
@click.option("--a", "a", type=int, required=True, help="First squarefree generator")
@click.option("--b", "b", type=int, required=True, help="Second squarefree generator")
@click.option("--table", is_flag=True, help="Include the sampled local table")
@pass_settings
@run_command
def multinorm_biquad(settings: Settings, a: int, b: int, table: bool) -> None:
    """Witness s outside N_1 N_2 N_3 for Q(sqrt a, sqrt b)."""
    B = BiquadraticDatum(a, b)
    hypothesis = check_local_degree_hypothesis(B, bounds=settings.bounds)
    witness = multinorm_witness(B, settings.bounds)
    emit(
        settings,
        {
            "hypothesis": hypothesis_to_json(hypothesis),
            "witness": multinorm_to_json(witness, include_table=table),
        },
    )


@multinorm.command("two-field")
@click.option("--a", "a", type=int, required=True, help="First squarefree generator")
@click.option("--b", "b", type=int, required=True, help="Second squarefree generator")
@click.option(
    "--limit", "-l", type=click.IntRange(min=1), default=30, show_default=True
)
@click.option(
    "--height", type=click.IntRange(min=1), default=None, help="Decomposition height"
)
@pass_settings
@run_command
def multinorm_two_field(
    settings: Settings, a: int, b: int, limit: int, height: Optional[int]
) -> None:
    """Search squarefree s with |s| <= limit for a two-field multinorm failure.

    Values that pass every local test but have no decomposition within
    the height are listed as undecided.
    """
    B = BiquadraticDatum(a, b)
    result = two_field_multinorm_search(B, limit, height, settings.bounds)
    emit(settings, two_field_to_json(result))
