from __future__ import annotations

import json

import pytest

from mirrorgv.cli import main
from mirrorgv.refdata import load_reference_json

FAST = [
    "--genus", "2",
    "--order-q", "16",
    "--order-s", "14",
    "--max-degree-x", "8",
    "--max-degree-z", "6",
]


@pytest.fixture(scope="module")
def solved_bundle(tmp_path_factory):
    out = tmp_path_factory.mktemp("bundle")
    cache = tmp_path_factory.mktemp("cache")
    code = main(["solve", *FAST, "--out", str(out), "--cache-dir", str(cache)])
    assert code == 0
    return out, cache


def test_solve_outputs(solved_bundle):
    out, cache = solved_bundle
    for name in ("table_x.json", "table_xprime.json", "metadata.json", "timings.json", "gw_potentials.json"):
        assert (out / name).exists()
    assert (cache / "pg_g2.json").exists()
    assert (cache / "fg_g2.json").exists()
    meta = json.loads((out / "metadata.json").read_text())
    assert meta["fg"]["2"]["a0"] == "-359293/2520"
    assert meta["x3_regular"]["2"] is True


def test_determinism_byte_identical(solved_bundle, tmp_path):
    out, _ = solved_bundle
    out2 = tmp_path / "again"
    assert main(["solve", *FAST, "--out", str(out2)]) == 0
    for name in ("table_x.json", "table_xprime.json", "metadata.json", "gw_potentials.json"):
        assert (out / name).read_bytes() == (out2 / name).read_bytes()


def test_warm_cache_equals_cold(solved_bundle, tmp_path):
    out, cache = solved_bundle
    out3 = tmp_path / "warm"
    assert main(["solve", *FAST, "--out", str(out3), "--cache-dir", str(cache)]) == 0
    assert (out / "table_x.json").read_bytes() == (out3 / "table_x.json").read_bytes()


def test_corrupt_cache_recomputes(solved_bundle, tmp_path):
    out, _ = solved_bundle
    cache = tmp_path / "corrupt"
    cache.mkdir()
    (cache / "pg_g2.json").write_text("{ not json")
    out4 = tmp_path / "recomputed"
    assert main(["solve", *FAST, "--out", str(out4), "--cache-dir", str(cache)]) == 0
    assert (out / "table_x.json").read_bytes() == (out4 / "table_x.json").read_bytes()


def test_verify_against_shipped_reference(solved_bundle):
    out, _ = solved_bundle
    assert main(["verify", "--bundle", str(out)]) == 0


def test_verify_detects_injected_fault(solved_bundle, tmp_path, capsys):
    out, _ = solved_bundle
    ref = load_reference_json("X")
    ref["entries"][0]["n"] = "197"  # perturb n_0(1)
    fault = tmp_path / "fault.json"
    fault.write_text(json.dumps(ref))
    code = main(["verify", "--bundle", str(out), "--side", "x", "--reference", str(fault)])
    captured = capsys.readouterr()
    report = json.loads(captured.out)
    assert code == 1
    assert len(report["mismatches"]) == 1
    assert report["mismatches"][0] == {"g": 0, "d": 1, "expected": "197", "got": "196"}


def test_verify_uncovered_cells_are_not_failures(solved_bundle, tmp_path, capsys):
    out, _ = solved_bundle
    ref = load_reference_json("X")
    # drop one reference cell the bundle covers: it becomes "uncovered"
    ref["entries"] = [e for e in ref["entries"] if not (e["g"] == 0 and e["d"] == 1)]
    partial = tmp_path / "partial.json"
    partial.write_text(json.dumps(ref))
    code = main(["verify", "--bundle", str(out), "--side", "x", "--reference", str(partial)])
    report = json.loads(capsys.readouterr().out)
    assert code == 0
    assert {"g": 0, "d": 1} in report["uncovered"]
    assert not report["mismatches"]


def test_verify_malformed_reference(solved_bundle, tmp_path):
    out, _ = solved_bundle
    bad = tmp_path / "bad.json"
    bad.write_text("{ nope")
    assert main(["verify", "--bundle", str(out), "--side", "x", "--reference", str(bad)]) == 2


def test_table_markdown(solved_bundle, capsys):
    out, _ = solved_bundle
    assert main(["table", "--bundle", str(out), "--side", "x", "--format", "markdown"]) == 0
    text = capsys.readouterr().out
    assert "| d | g=0 | g=1 | g=2 |" in text
    assert "| 1 | 196 | 0 | 0 |" in text


def test_config_errors_exit_2(tmp_path):
    assert main(["solve", "--genus", "9", "--out", str(tmp_path / "x")]) == 2
    assert main(["solve", "--order-q", "5", "--out", str(tmp_path / "y")]) == 2
    assert main(["solve", "--model", str(tmp_path / "missing.json"), "--out", str(tmp_path / "z")]) == 2


def test_math_inconsistency_exit_3(tmp_path):
    sched = tmp_path / "sched.json"
    sched.write_text(json.dumps({"2": {"vanishing_x": [1], "vanishing_z": [], "greedy_fill": False}}))
    code = main(["solve", *FAST, "--schedule", str(sched), "--out", str(tmp_path / "o")])
    assert code == 3


def test_expand_points(capsys):
    for point in ("x0", "z0", "conifold", "x3"):
        assert main(["expand", "--point", point, "--order", "6"]) == 0
        data = json.loads(capsys.readouterr().out)
        assert data["point"] == point
        assert data["w0"]["truncation_order"] == 6


def test_model_json_round_trip_via_cli(tmp_path):
    from mirrorgv.picardfuchs import CYModel

    path = tmp_path / "model.json"
    path.write_text(json.dumps(CYModel.builtin().to_json()))
    out = tmp_path / "from_file"
    code = main([
        "solve", "--model", str(path), "--genus", "2", "--order-q", "16", "--order-s", "14",
        "--max-degree-x", "6", "--max-degree-z", "5", "--out", str(out),
    ])
    assert code == 0
    table = json.loads((out / "table_x.json").read_text())
    cells = {(e["g"], e["d"]): e["n"] for e in table["entries"]}
    assert cells[(0, 1)] == "196" and cells[(2, 5)] == "0"


def test_render_empty_table_header_only():
    from mirrorgv.cli import render_table

    empty = {"side": "X", "entries": [], "metadata": {}}
    md = render_table(empty, "markdown")
    assert md.splitlines()[0] == "| d |"
    csv = render_table(empty, "csv")
    assert csv.splitlines()[0] == "d,"


def test_cache_env_var(tmp_path, monkeypatch):
    cache = tmp_path / "envcache"
    monkeypatch.setenv("MIRRORGV_CACHE", str(cache))
    out = tmp_path / "out"
    assert main(["solve", "--genus", "2", "--order-q", "16", "--order-s", "14",
                 "--max-degree-x", "6", "--max-degree-z", "5", "--out", str(out)]) == 0
    assert (cache / "pg_g2.json").exists()
