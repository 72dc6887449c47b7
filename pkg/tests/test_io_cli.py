"""Instance documents and the command-line surface.

Round-trips must be byte-stable, schema problems must name the offending
field, and every command must honour the pass / audited-failure / usage
exit-code split.
"""

import json
import os

import pytest

from qdtbench.errors import ParseError, SchemaError, ValidationError
from qdtbench.instances import FIXTURE_BUILDERS
from qdtbench.io import dumps_instance, load_instance, loads_instance

from conftest import FIXTURE_DIR, cli

ALL_FIXTURES = ["min2", "std6", "std8", "overlap2", "irrev6"]


# -- round trips --------------------------------------------------------------

@pytest.mark.parametrize("name", ALL_FIXTURES)
def test_fixture_round_trip_is_byte_stable(name):
    text = (FIXTURE_DIR / f"{name}.json").read_text(encoding="utf-8")
    once = dumps_instance(loads_instance(text))
    twice = dumps_instance(loads_instance(once))
    assert once == twice
    assert once == text  # shipped fixtures are already canonical


@pytest.mark.parametrize("name", ALL_FIXTURES)
def test_builders_match_shipped_fixtures(name):
    built = dumps_instance(FIXTURE_BUILDERS[name]())
    shipped = (FIXTURE_DIR / f"{name}.json").read_text(encoding="utf-8")
    assert built == shipped


# -- schema errors ------------------------------------------------------------

def _doc(name="min2"):
    return json.loads((FIXTURE_DIR / f"{name}.json").read_text())


def test_missing_reward_flag_names_the_field():
    doc = _doc()
    del doc["rewards"][0]["is_r0"]
    with pytest.raises(SchemaError, match=r"\$\.rewards\[0\]\.is_r0"):
        loads_instance(json.dumps(doc))


def test_missing_erasure_names_the_field():
    doc = _doc()
    del doc["rewards"][1]["erasure"]
    with pytest.raises(SchemaError, match=r"\$\.rewards\[1\]\.erasure"):
        loads_instance(json.dumps(doc))


def test_bad_vector_entry_names_the_path():
    doc = _doc()
    doc["macrostates"][0]["basis"][0][0] = ["oops", 0.0]
    with pytest.raises(SchemaError, match=r"\$\.macrostates\[0\]\.basis"):
        loads_instance(json.dumps(doc))


def test_unknown_oracle_kind_is_schema_error():
    doc = _doc()
    doc["oracle"] = "dice"
    with pytest.raises(SchemaError, match="dice"):
        loads_instance(json.dumps(doc))


def test_unsupported_schema_version():
    doc = _doc()
    doc["schema_version"] = 99
    with pytest.raises(SchemaError, match="99"):
        loads_instance(json.dumps(doc))


def test_not_json_is_parse_error():
    with pytest.raises(ParseError):
        loads_instance("{not json")


def test_missing_file_is_parse_error(tmp_path):
    with pytest.raises(ParseError):
        load_instance(tmp_path / "absent.json")


def test_invalid_geometry_echoes_validation():
    doc = _doc("overlap2")
    doc["orthmacr"] = True  # now the overlap violates the niceness clause
    with pytest.raises(ValidationError, match="orthogonality"):
        loads_instance(json.dumps(doc))


def test_bad_comparison_value_rejected():
    doc = _doc("std6")
    doc["preference_pairs"][0]["comparison"] = 2
    with pytest.raises(ValidationError):
        loads_instance(json.dumps(doc))


# -- CLI exit codes -----------------------------------------------------------

def fx(name):
    return str(FIXTURE_DIR / f"{name}.json")


def test_cli_validate_passes_on_fixture():
    res = cli("validate", fx("min2"))
    assert res.returncode == 0
    assert b"valid" in res.stdout


def test_cli_validate_flags_broken_instance(tmp_path):
    doc = _doc("overlap2")
    doc["orthmacr"] = True
    path = tmp_path / "broken.json"
    path.write_text(json.dumps(doc))
    res = cli("validate", str(path))
    assert res.returncode == 1


def test_cli_missing_seed_is_usage_error():
    res = cli("audit-richness", fx("min2"))
    assert res.returncode == 2


def test_cli_env_seed_fallback_and_flag_priority():
    env = dict(os.environ, QDT_SEED="7")
    res = cli("audit-richness", fx("min2"), env=env)
    assert res.returncode == 0
    assert b"seed=7" in res.stdout
    res2 = cli("audit-richness", "--seed", "3", fx("min2"), env=env)
    assert b"seed=3" in res2.stdout


def test_cli_missing_file_is_io_error():
    res = cli("validate", "/no/such/instance.json")
    assert res.returncode == 2


def test_cli_counting_audit_fails_with_witness():
    res = cli("audit-rationality", "--seed", "0", "--samples", "60",
              "--oracle", "counting", fx("std6"))
    assert res.returncode == 1
    assert b"FAIL" in res.stdout


def test_cli_counterexample_exit_codes():
    found = cli("counterexample", "--seed", "0", "--samples", "80",
                "--axiom", "branch-uniqueness", "--relax", "orthmacr",
                fx("overlap2"))
    assert found.returncode == 1
    clean = cli("counterexample", "--seed", "0", "--samples", "40",
                "--axiom", "branch-uniqueness", fx("std6"))
    assert clean.returncode == 0


def test_cli_reports_are_byte_identical(tmp_path):
    out1, out2 = tmp_path / "a.json", tmp_path / "b.json"
    args = ("audit-rationality", "--seed", "3", "--samples", "40",
            "--oracle", "born", fx("min2"))
    r1 = cli(*args, "--report", str(out1))
    r2 = cli(*args, "--report", str(out2))
    assert r1.returncode == r2.returncode == 0
    assert out1.read_bytes() == out2.read_bytes()
    assert r1.stdout == r2.stdout


def test_cli_report_has_no_absolute_paths(tmp_path):
    out = tmp_path / "r.json"
    cli("check-lemmas", "--seed", "1", "--samples", "40", fx("std6"),
        "--report", str(out))
    doc = json.loads(out.read_text())
    blob = json.dumps(doc)
    assert str(FIXTURE_DIR) not in blob
    assert doc["instance"] == "std6.json"


def test_cli_simulate_csv_contract():
    res = cli("simulate", "--k", "2", "--weights", "0.5,0.5",
              "--n", "10,100,1000", "--eps", "0.1")
    assert res.returncode == 0
    lines = res.stdout.split(b"\r\n")
    assert lines[0] == b"k,n,deviation"
    rows = [line.split(b",") for line in lines[1:] if line]
    assert len(rows) == 3
    devs = [float(r[2]) for r in rows]
    assert abs(devs[0] - 0.34375) < 1e-12
    assert devs[0] > devs[1] > devs[2]


def test_cli_elicit_recovers_planted_value():
    res = cli("elicit", fx("std6"))
    assert res.returncode == 0
    assert b"rA" in res.stdout


def test_cli_savage_brackets_planted_probability():
    res = cli("savage", "--cells", "8")
    assert res.returncode == 0
    res64 = cli("savage", "--cells", "64")
    assert res64.returncode == 0


def test_cli_classical_lex_fails_archimedean():
    res = cli("classical-vnm", "--seed", "0", "--oracle", "lex", fx("std6"))
    assert res.returncode == 1
    res2 = cli("classical-vnm", "--seed", "0", "--oracle", "pmeu", fx("std6"))
    assert res2.returncode == 0


def test_cli_bundled_fixture_by_name():
    # a bare known name resolves to the packaged instance
    res = cli("validate", "min2.json")
    assert res.returncode == 0
