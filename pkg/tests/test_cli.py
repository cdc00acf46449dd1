import json

import pytest

from migrascope import resources
from migrascope.cli import main


@pytest.fixture
def out(tmp_path):
    return tmp_path / "out"


def test_profile_list_and_validate(capsys):
    assert main(["profile", "list"]) == 0
    assert "solana\t1.0.0" in capsys.readouterr().out
    assert main(["profile", "validate"]) == 0


def test_profile_validate_reports_violations(tmp_path, capsys):
    raw = json.loads((resources.PROFILE_DIR / "ethereum.json").read_text())
    raw["primitives"] = [p for p in raw["primitives"] if p["layer"] != "ownership-capability"]
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps(raw))
    assert main(["profile", "validate", str(bad)]) == 1
    assert "missing-layer" in capsys.readouterr().out


def test_scan_fixture_matches_golden(out):
    assert main(["scan", str(resources.FIXTURE_SOURCE), "--out", str(out)]) == 0
    written = json.loads((out / "feature-profile.json").read_text())
    assert written == json.loads(resources.GOLDEN_PROFILE.read_text())


def test_scan_abi_gives_same_feature_names(out):
    assert main(["scan", str(resources.FIXTURE_ABI), "--out", str(out)]) == 0
    names = [f["name"] for f in json.loads((out / "feature-profile.json").read_text())["features"]]
    golden = [f["name"] for f in json.loads(resources.GOLDEN_PROFILE.read_text())["features"]]
    assert names == golden


def test_scan_empty_file_exits_2(tmp_path, capsys):
    empty = tmp_path / "empty.sol"
    empty.write_text("")
    assert main(["scan", str(empty), "--out", str(tmp_path)]) == 2
    assert "error" in capsys.readouterr().err


def test_assess_exit_codes(out):
    golden = str(resources.GOLDEN_PROFILE)
    assert main(["assess", golden, "ethereum", "solana", "--out", str(out)]) == 1
    assert (out / "report.json").exists() and (out / "report.md").exists()
    assert main(["assess", golden, "ethereum", "ethereum", "--out", str(out)]) == 0
    assert main(["assess", golden, "ethereum", "bitcoin", "--out", str(out)]) == 2


def test_assess_single_format(out):
    main(["assess", str(resources.GOLDEN_PROFILE), "ethereum", "solana", "--out", str(out), "--format", "md"])
    assert sorted(p.name for p in out.iterdir()) == ["report.md"]


def test_missing_inputs_fail_before_analysis(tmp_path):
    assert main(["assess", str(tmp_path / "nope.json"), "ethereum", "solana"]) == 2
    assert main(["assess", str(resources.GOLDEN_PROFILE), "ethereum", "solana", "--bindings", "nope.json"]) == 2
    assert main(["map", str(resources.GOLDEN_PROFILE), "flow", "--out", str(tmp_path)]) == 2


def test_map_writes_matrix(out, capsys):
    assert main(["map", str(resources.GOLDEN_PROFILE), "ethereum", "--out", str(out)]) == 0
    sets = json.loads((out / "dependency-sets.json").read_text())
    assert len(sets) == 7
    assert "●" in capsys.readouterr().out


def test_simulate_default(out, capsys):
    assert main(["simulate", "--out", str(out)]) == 0
    assert "7/7 predictions consistent" in capsys.readouterr().out
    assert json.loads((out / "agreement.json").read_text())["summary"] == "7/7 predictions consistent"
    assert len((out / "transcript.jsonl").read_text().splitlines()) > 300


def test_simulate_without_oracle_exits_2(tmp_path, out, capsys):
    raw = json.loads(resources.SIM_CONFIG.read_text())
    raw["oracle_enabled"] = False
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps(raw))
    assert main(["simulate", "--config", str(cfg), "--out", str(out)]) == 2
    assert "oracle" in capsys.readouterr().err


def test_simulate_is_reproducible(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    assert main(["simulate", "--seed", "11", "--out", str(a)]) == 0
    assert main(["simulate", "--seed", "11", "--out", str(b)]) == 0
    for name in ("transcript.jsonl", "agreement.json", "agreement.md"):
        assert (a / name).read_bytes() == (b / name).read_bytes()


def test_validate_case_study(out, capsys):
    assert main(["validate-case-study", "--out", str(out)]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines and all(line.startswith("PASS") for line in lines)


def test_validate_case_study_detects_drift(tmp_path, out, capsys):
    raw = json.loads(resources.TABLE3_ORACLE.read_text())
    raw["classes"]["transfer-logic"] = "partial-mismatch"
    oracle = tmp_path / "oracle.json"
    oracle.write_text(json.dumps(raw))
    assert main(["validate-case-study", "--oracle", str(oracle), "--out", str(out)]) == 1
    assert "FAIL class transfer-logic" in capsys.readouterr().out
