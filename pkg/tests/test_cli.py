"""Tests for the hassekit command line."""

import json

import pytest

from hassekit.cli.main import cli


def run_cli(mocker, capsys, *args):
    """Run the root command with the given arguments and capture its output."""
    mocker.patch("sys.argv", ["hassekit", *args])
    with pytest.raises(SystemExit) as excinfo:
        cli()
    captured = capsys.readouterr()
    return excinfo.value.code, captured.out, captured.err


def test_help(mocker, capsys):
    """Test that -h lists the command groups."""
    code, out, _ = run_cli(mocker, capsys, "-h")
    assert code == 0
    for name in ("hilbert", "qf", "etale", "embed", "quat", "multinorm", "demo"):
        assert name in out


def test_hilbert_json(mocker, capsys):
    """Test (13, 17)_17 as JSON."""
    code, out, _ = run_cli(
        mocker, capsys, "--json", "hilbert", "--a", "13", "--b", "17", "--place", "17"
    )
    assert code == 0
    assert json.loads(out) == {"symbol": 1}


def test_hilbert_human(mocker, capsys):
    """Test the plain listing for the Hamilton symbol at infinity."""
    code, out, _ = run_cli(
        mocker, capsys, "hilbert", "--a", "-1", "--b", "-1", "-p", "inf"
    )
    assert code == 0
    assert "symbol: -1" in out


def test_qf_invariants(mocker, capsys):
    """Test the invariants of <2, -10>."""
    code, out, _ = run_cli(
        mocker, capsys, "--json", "qf", "invariants", "--form", '{"diag": ["2", "-10"]}'
    )
    assert code == 0
    inv = json.loads(out)["invariants"]
    assert inv["det"] == "-5"
    assert inv["hasse"] == {"2": -1, "5": -1}
    assert inv["signature"] == [1, 1]


def test_qf_invariants_from_file(mocker, capsys, tmp_path):
    """Test reading the form from a file."""
    path = tmp_path / "form.json"
    path.write_text('{"diag": ["1", "1", "1", "1"]}')
    code, out, _ = run_cli(
        mocker, capsys, "--json", "qf", "invariants", "-f", str(path)
    )
    assert code == 0
    assert json.loads(out)["invariants"]["hasse"] == {}


def test_qf_equiv(mocker, capsys):
    """Test global and local equivalence."""
    four = '{"diag": [1, 1, 1, 1]}'
    doubled = '{"diag": [2, 2, 2, 2]}'
    code, out, _ = run_cli(
        mocker, capsys, "--json", "qf", "equiv", "-f", four, "-g", doubled
    )
    assert code == 0
    assert json.loads(out) == {"equivalent": True, "place": "global"}
    code, out, _ = run_cli(
        mocker, capsys, "--json", "qf", "equiv", "-f", '{"diag": [1, 1]}',
        "-g", '{"diag": [1, -1]}', "-p", "inf",
    )
    assert json.loads(out) == {"equivalent": False, "place": "inf"}


def test_qf_similar(mocker, capsys):
    """Test a similarity factor between <1, 2> and <5, 10>."""
    code, out, _ = run_cli(
        mocker, capsys, "--json", "qf", "similar",
        "-f", '{"diag": [1, 2]}', "-g", '{"diag": [5, 10]}',
    )
    assert code == 0
    assert json.loads(out)["similar"] is True


def test_qf_build(mocker, capsys):
    """Test rank 3, det 1 with Hasse flips at 2 and 3."""
    code, out, _ = run_cli(
        mocker, capsys, "--json", "qf", "build",
        "-n", "3", "-d", "1", "--hasse", "2,3", "-s", "3,0",
    )
    assert code == 0
    assert json.loads(out)["invariants"]["hasse"] == {"2": -1, "3": -1}


def test_qf_build_infeasible(mocker, capsys):
    """Test exit code 2 and the violated constraint."""
    code, out, err = run_cli(
        mocker, capsys, "qf", "build", "-n", "3", "-d", "1", "--hasse", "2", "-s", "3,0"
    )
    assert code == 2
    payload = json.loads(out)
    assert payload["error"] == "infeasible"
    assert payload["constraint"] == "product-formula"
    assert "Error:" in err


def test_bad_signature(mocker, capsys):
    """Test a malformed signature."""
    code, _, err = run_cli(
        mocker, capsys, "qf", "build", "-n", "2", "-d", "-1", "-s", "x"
    )
    assert code == 2
    assert "signature" in err


def test_malformed_json(mocker, capsys):
    """Test exit code 1 for unparsable JSON."""
    code, _, err = run_cli(mocker, capsys, "qf", "invariants", "--form", '{"diag": [1,')
    assert code == 1
    assert "malformed JSON" in err


def test_bound_exceeded(mocker, capsys, tmp_path):
    """Test exit code 3 when factoring exceeds the configured bound."""
    config = tmp_path / "hassekit.json"
    config.write_text(json.dumps({"bounds": {"factor_bound": 100}}))
    code, out, _ = run_cli(
        mocker, capsys, "--config", str(config), "qf", "invariants",
        "--form", '{"diag": ["1000036000099", "1"]}',
    )
    assert code == 3
    assert json.loads(out)["bound_name"] == "factor_bound"


def test_invalid_bound_option(mocker, capsys):
    """Test that --bound must be positive."""
    code, _, _ = run_cli(
        mocker, capsys, "--bound", "0", "hilbert", "--a", "1", "--b", "1", "-p", "2"
    )
    assert code == 2


def test_etale_trace_form(mocker, capsys):
    """Test q_1 = <2, -10> for Q(sqrt 5)."""
    code, out, _ = run_cli(
        mocker,
        capsys,
        "--json",
        "etale",
        "trace-form",
        "-e",
        '{"factors": ["Q"], "d": [5]}',
    )
    assert code == 0
    assert json.loads(out)["form"] == {"diag": ["2", "-10"]}


def test_etale_splits(mocker, capsys):
    """Test Q(sqrt 17) x Q(sqrt 221) against the algebra ramified at 3 and 23."""
    code, out, _ = run_cli(
        mocker,
        capsys,
        "--json",
        "etale",
        "splits",
        "-f",
        "[[17], [221]]",
        "--ram",
        "3,23",
    )
    assert code == 0
    assert json.loads(out) == {"splits": True, "failures": {}}
    code, out, _ = run_cli(
        mocker, capsys, "--json", "etale", "splits", "-f", '["Q", "Q"]', "-q", "-1,-1"
    )
    assert json.loads(out)["splits"] is False


def test_quat_ram(mocker, capsys):
    """Test the Hamilton quaternions."""
    code, out, _ = run_cli(
        mocker, capsys, "--json", "quat", "ram", "-a", "-1", "-b", "-1"
    )
    assert code == 0
    assert json.loads(out)["ram"] == ["2", "inf"]


def test_quat_from_ramset(mocker, capsys):
    """Test an even set and the refusal of an odd one."""
    code, out, _ = run_cli(
        mocker, capsys, "--json", "quat", "from-ramset", "-r", "3,23"
    )
    assert code == 0
    assert json.loads(out)["ram"] == ["3", "23"]
    code, out, _ = run_cli(mocker, capsys, "quat", "from-ramset", "-r", "3")
    assert code == 2
    assert json.loads(out)["constraint"] == "even-ramification"


def test_multinorm_biquad(mocker, capsys):
    """Test the witness for Q(sqrt 13, sqrt 17)."""
    code, out, _ = run_cli(
        mocker, capsys, "--json", "multinorm", "biquad", "--a", "13", "--b", "17"
    )
    assert code == 0
    payload = json.loads(out)
    assert payload["hypothesis"]["holds"] is True
    assert payload["witness"]["phi"] == -1
    assert "table" not in payload["witness"]


def test_multinorm_two_field(mocker, capsys):
    """Test the two-field search for Q(i) and Q(sqrt 2)."""
    code, out, _ = run_cli(
        mocker,
        capsys,
        "--json",
        "multinorm",
        "two-field",
        "--a",
        "-1",
        "--b",
        "2",
        "--limit",
        "6",
    )
    assert code == 0
    payload = json.loads(out)
    assert payload["local_failures"] == [-6, -3, 3, 6]
    assert payload["undecided"] == []


def test_embed_split(mocker, capsys):
    """Test that <1, -13> receives Q(sqrt 13)."""
    code, out, _ = run_cli(
        mocker, capsys, "--json", "embed", "split",
        "-e", '{"factors": ["Q"], "d": [13]}', "-t", "1,-13",
    )
    assert code == 0
    report = json.loads(out)
    assert report["verdict"] == "embeds"
    assert "witness" in report


def test_embed_split_needs_one_target(mocker, capsys):
    """Test that exactly one of --form and --target-diag is accepted."""
    code, _, _ = run_cli(
        mocker, capsys, "embed", "split", "-e", '{"factors": ["Q"], "d": [13]}'
    )
    assert code == 2


def test_embed_nonsplit(mocker, capsys):
    """Test a twisted global element over Q x Q for the algebra ramified at 5 and 13."""
    code, out, _ = run_cli(
        mocker, capsys, "--json", "quat", "from-ramset", "-r", "5,13"
    )
    D = json.loads(out)
    code, out, _ = run_cli(
        mocker, capsys, "--json", "embed", "nonsplit",
        "-q", f"{D['alpha']},{D['beta']}",
        "-e", '{"factors": ["Q", "Q"], "d": [65, 65]}',
        "--twist", "5", "--z-disc", "1",
    )
    assert code == 0
    certificate = json.loads(out)["certificate"]
    assert certificate["v_set"] == ["5", "13"]
    assert certificate["residual"]["zero"] is True
    assert certificate["twist_class"]["canonical"] == [0, 1]


def test_demo_theorem_b(mocker, capsys):
    """Test the class table for |V| = 2."""
    code, out, _ = run_cli(
        mocker, capsys, "--json", "demo", "theorem-b", "--v-size", "2"
    )
    assert code == 0
    assert json.loads(out)["classes"] == 2
