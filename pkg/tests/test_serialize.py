"""Tests for JSON parsing and report serialization."""

import json
from fractions import Fraction

import pytest

from hassekit.core.errors import DomainError, InfeasibleError
from hassekit.core.etale import EtaleInvolutionAlgebra
from hassekit.core.places import INFINITY, Place
from hassekit.core.quadratic_forms import QuadraticForm
from hassekit.core.serialize import (
    algebra_to_json,
    dumps,
    form_to_json,
    format_rational,
    parse_algebra,
    parse_element,
    parse_factor,
    parse_form,
    parse_pins,
    parse_quaternion,
    parse_rational,
    parse_skew_form,
    read_json,
    report_to_json,
)
from hassekit.core.split_embedding import SplitEmbeddingProblem, global_embed


def test_parse_rational():
    """Test exact parsing and lowest terms."""
    assert parse_rational("3/6") == Fraction(1, 2)
    assert parse_rational(" -5 ") == -5
    assert parse_rational(7) == 7


@pytest.mark.parametrize("value", ["0.5", 0.5, True, "abc", "1/0", "1e3", None])
def test_parse_rational_rejects(value):
    """Test that floats and junk are refused."""
    with pytest.raises(DomainError):
        parse_rational(value)


def test_format_rational():
    """Test canonical output."""
    assert format_rational(Fraction(4, 2)) == "2"
    assert format_rational(Fraction(-3, 6)) == "-1/2"


def test_parse_form():
    """Test the form payload and its errors."""
    expected = QuadraticForm.of(1, Fraction(-1, 2), 3)
    assert parse_form({"diag": ["1", "-1/2", 3]}) == expected
    assert form_to_json(QuadraticForm.of(2, Fraction(1, 3))) == {"diag": ["2", "1/3"]}
    with pytest.raises(DomainError):
        parse_form({"diag": ["1"], "rank": 1})
    with pytest.raises(DomainError):
        parse_form({"entries": ["1"]})
    with pytest.raises(DomainError):
        parse_form(["1", "2"])


def test_parse_factor():
    """Test field factor specifications."""
    assert parse_factor("Q").degree == 1
    assert parse_factor([]).degree == 1
    assert parse_factor([5]).gens == (5,)
    assert parse_factor([2, 3]).degree == 4
    for bad in ("x", [True], [1.5]):
        with pytest.raises(DomainError):
            parse_factor(bad)


def test_parse_algebra():
    """Test the algebra payload."""
    payload = {"factors": ["Q", [13]], "d": [13, ["17", "0"]]}
    A = parse_algebra(payload)
    assert A.dimension == 6
    assert algebra_to_json(A) == {
        "factors": [[], [13]],
        "d": [["13"], ["17", "0"]],
        "fixed_rational": False,
    }
    with pytest.raises(DomainError):
        parse_algebra({"factors": ["Q"], "d": [5], "fixed_rational": "yes"})
    with pytest.raises(DomainError):
        parse_algebra({"factors": ["Q"]})
    with pytest.raises(DomainError):
        parse_algebra({"factors": ["Q"], "d": [5], "extra": 1})


def test_parse_element_and_pins(q, q_sqrt13):
    """Test elements of F and pins keyed by place."""
    factors = (q, q_sqrt13)
    assert parse_element(factors, ["2", ["1", "1"]]) == ((2,), (1, 1))
    with pytest.raises(DomainError):
        parse_element(factors, ["2"])
    with pytest.raises(DomainError):
        parse_element(factors, ["2", ["1", "1", "1"]])
    pins = parse_pins(factors, {"inf": [1, [1, 0]], "13": [2, [3, 1]]})
    assert set(pins) == {INFINITY, Place(13)}


def test_read_json(tmp_path):
    """Test inline text, files and the failure modes."""
    assert read_json('{"diag": [1]}') == {"diag": [1]}
    path = tmp_path / "form.json"
    path.write_text('{"diag": ["1", "-1"]}')
    assert read_json(str(path)) == {"diag": ["1", "-1"]}
    with pytest.raises(DomainError):
        read_json(str(tmp_path / "missing.json"))
    with pytest.raises(json.JSONDecodeError):
        read_json('{"diag": [1,')


def test_parse_quaternion_and_skew_form(hamilton):
    """Test 'alpha,beta' and skew-hermitian payloads."""
    assert parse_quaternion(" -1, -1 ") == hamilton
    for bad in ("-1", "a,b", "1,2,3"):
        with pytest.raises(DomainError):
            parse_quaternion(bad)
    h = parse_skew_form(hamilton, {"diag": [["1", "0", "0"], [0, 1, 0]]})
    assert h.rank == 2
    with pytest.raises(DomainError):
        parse_skew_form(hamilton, {"diag": ["1", "0", "0"]})


def test_report_to_json(rank_two_split_algebra):
    """Test the JSON shape of an obstruction report."""
    problem = SplitEmbeddingProblem(QuadraticForm.of(1, 1), rank_two_split_algebra)
    out = report_to_json(global_embed(problem))
    assert out["verdict"] == "locally_obstructed"
    assert out["place"] == "2"
    assert out["reason"] == "determinant class mismatch"
    row = {"place": "2", "ok": False, "reason": "determinant class mismatch"}
    assert row in out["local"]


def test_dumps_is_sorted():
    """Test deterministic output."""
    assert dumps({"b": 1, "a": [2]}) == '{\n  "a": [\n    2\n  ],\n  "b": 1\n}'


def test_error_payloads():
    """Test the machine-readable error descriptions."""
    error = InfeasibleError("no such form", "det-sign")
    assert error.to_dict() == {
        "error": "infeasible",
        "message": "no such form",
        "constraint": "det-sign",
    }
