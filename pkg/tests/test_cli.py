"""CLI smoke tests: pinned examples, JSON schema, exit codes."""

import json

import pytest

from homlink import SCHEMA_VERSIONS
from homlink.cli import main

BORROMEAN = "A(1,3) A(2,3) A(1,3)^-1 A(2,3)^-1"


def run_cli(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_enum_count_anchor(capsys):
    code, out, _ = run_cli(
        capsys, "enum", "--order", "3", "--strands", "4", "--kind", "chord", "--count"
    )
    assert code == 0
    assert out.strip().splitlines()[-1] == "72"


def test_enum_json_schema(capsys):
    code, out, _ = run_cli(
        capsys,
        "enum", "--order", "2", "--strands", "3", "--kind", "trivalent", "--json",
    )
    assert code == 0
    payload = json.loads(out)
    assert set(payload) >= {"count", "keys", "invocation", "schema"}
    assert payload["schema"] == SCHEMA_VERSIONS
    assert payload["count"] == len(payload["keys"]) == 7


def test_filtration_pinned_dims(capsys):
    code, out, _ = run_cli(capsys, "filtration", "--order", "2", "--strands", "3")
    assert code == 0
    assert out.strip().splitlines()[-1] == "6 7"


def test_milnor_borromean(capsys):
    code, out, _ = run_cli(
        capsys,
        "milnor", "--strands", "3", "--braid", BORROMEAN, "--indices", "1,2:3",
    )
    assert code == 0
    assert out.strip().splitlines()[-1] in ("1", "-1")


def test_milnor_json(capsys):
    code, out, _ = run_cli(
        capsys,
        "milnor", "--strands", "2", "--braid", "A(1,2)", "--indices", "1:2", "--json",
    )
    assert code == 0
    payload = json.loads(out)
    assert payload["value"] == 1
    assert payload["invocation"][0] == "milnor"


def test_weights_subcommand(capsys):
    code, out, _ = run_cli(
        capsys,
        "weights", "--invariant", "1,2:3", "--diagram", "q1,1,2|f0|e1-3,2-4", "--json",
    )
    assert code == 0
    assert json.loads(out)["value"] in (-1, 0, 1)


def test_complete_tree_inline(capsys):
    code, out, _ = run_cli(
        capsys,
        "complete-tree", "--order", "2", "--strands", "3",
        "--tree", '{"q1,1,1|f1|e1-4,2-4,3-4": "1"}', "--json",
    )
    assert code == 0
    payload = json.loads(out)
    assert payload["coeffs"]["q1,1,1|f1|e1-4,2-4,3-4"] == "1"


def test_stu_graph_connected(capsys):
    code, out, _ = run_cli(capsys, "stu-graph", "--order", "2", "--strands", "3")
    assert code == 0
    assert out.strip().splitlines()[-1] == "connected"


def test_integrate_braid_json(capsys):
    code, out, _ = run_cli(
        capsys,
        "integrate", "--diagram", "q1,1|f0|e1-2", "--link-braid", "A(1,2)",
        "--strands", "2", "--samples", "20000", "--seed", "42", "--json",
    )
    assert code == 0
    payload = json.loads(out)
    assert set(payload) >= {"value", "stderr", "samples", "seed", "backend"}
    assert payload["seed"] == 42
    assert abs(payload["value"] - 1.0) < 0.2


def test_integrate_needs_link_argument(capsys):
    code, _, err = run_cli(
        capsys, "integrate", "--diagram", "q1,1|f0|e1-2", "--samples", "100"
    )
    assert code == 1
    assert "error" in err


def test_domain_error_exit_1(capsys):
    code, _, err = run_cli(
        capsys, "milnor", "--strands", "2", "--braid", "A(1,5)", "--indices", "1:2"
    )
    assert code == 1
    assert "error" in err


def test_usage_error_exit_2(capsys):
    code, _, _ = run_cli(capsys, "enum", "--order", "2")  # missing --strands
    assert code == 2


def test_unknown_flag_exit_2(capsys):
    code, _, _ = run_cli(capsys, "enum", "--order", "2", "--strands", "3", "--bogus")
    assert code == 2


def test_version_prints_schemas(capsys):
    code, out, _ = run_cli(capsys, "--version")
    assert code == 0
    for name in SCHEMA_VERSIONS:
        assert name in out


def test_check_fast_level(capsys):
    code, out, _ = run_cli(capsys, "check", "--level", "fast")
    assert code == 0
    lines = out.strip().splitlines()
    assert sum(1 for l in lines if l.startswith("PASS")) == 8
    assert sum(1 for l in lines if l.startswith("SKIP")) == 1
