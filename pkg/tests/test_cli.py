import csv
import io
import json
import shutil
import subprocess

import pytest

from conftest import golden_tex, squash
from mrcert.cli import default_sequence, default_twist, main
from mrcert.render import parse_csv
from mrcert.tables import validate_sequence


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


SMALL = ("--g", 4, "--r", 3, "--d", 6, "--m", 2, "--delta", "0,1,2,3")


def test_table_csv(capsys):
    code, out, _ = run(capsys, "table", *SMALL, "--w", "2,6,8", "--format", "csv")
    assert code == 0
    grid = parse_csv(out)
    assert len(grid.rows) == 10 and grid.g == 4
    assert grid.rows[0] == (0, 0)
    assert grid.present()[0] == (True, False, False, False)


def test_table_latex_layout(capsys):
    code, out, _ = run(capsys, "table", *SMALL, "--w", "2,6,8", "--format", "latex")
    assert code == 0
    # no printed errata in this table, so computed shading equals the golden file
    assert squash(out) == squash(golden_tex("m2_r3_g4", "T"))


def test_table_other_views(capsys):
    code, out, _ = run(capsys, "table", *SMALL, "--table", "vanishing")
    assert code == 0 and "0:6" in out
    code, out, _ = run(capsys, "table", *SMALL, "--table", "tensor", "--order", "lex", "--format", "csv")
    assert code == 0 and "·" not in out


def test_table_usage_errors(capsys):
    code, _, err = run(capsys, "table", *SMALL)
    assert code == 2 and "--w" in err
    code, _, err = run(capsys, "table", "--g", 4, "--r", 3, "--d", 6, "--delta", "1,0,2,3", "--w", "2,6,8")
    assert code == 2 and "prefix" in err
    code, _, _ = run(capsys, "table", *SMALL[:-2], "--delta", "0,x", "--w", "1")
    assert code == 2
    with pytest.raises(SystemExit) as info:
        main(["table", "--format", "pdf"])
    assert info.value.code == 2


@pytest.mark.parametrize("case,N,prov", [
    ((10, 4, 12, 2), 15, "critical_m2"),
    ((26, 5, 27, 3), 56, "m3_catalog"),
    ((7, 3, 9, 3), 20, "m3_catalog"),
    ((4, 3, 6, 2), 9, "example"),
])
def test_certify_then_verify(capsys, tmp_path, case, N, prov):
    g, r, d, m = case
    path = tmp_path / "c.json"
    code, out, _ = run(capsys, "certify", "--g", g, "--r", r, "--d", d, "--m", m, "--out", path)
    assert code == 0
    assert f"N={N}" in out and prov in out and "steady=yes" in out
    code, out, _ = run(capsys, "verify", path)
    assert code == 0 and out.startswith(f"valid N={N}")


def test_certify_default_name(capsys, tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    code, out, _ = run(capsys, "certify", "--g", 5, "--r", 3, "--d", 7)
    assert code == 0
    assert (tmp_path / "cert-5-3-7-2.json").exists()


def test_certify_explicit_inputs(capsys, tmp_path):
    path = tmp_path / "c.json"
    code, out, _ = run(capsys, "certify", *SMALL, "--w", "2,6,8", "--out", path)
    assert code == 0 and "N=9" in out and "provenance=search" in out


def test_certify_not_found(capsys, tmp_path):
    # a constant twist vector erases nothing useful; the search gives up
    code, out, _ = run(capsys, "certify", *SMALL, "--w", "0,0,0", "--out", tmp_path / "c.json")
    assert code == 1
    assert "no certificate" in out


def test_certify_needs_both_inputs(capsys):
    code, _, err = run(capsys, "certify", *SMALL)
    assert code == 2 and "--w" in err


def test_verify_removed_step(capsys, tmp_path):
    path = tmp_path / "c.json"
    run(capsys, "certify", "--g", 5, "--r", 3, "--d", 7, "--out", path)
    data = json.loads(path.read_text())
    data["steps"].pop()
    path.write_text(json.dumps(data))
    code, out, _ = run(capsys, "verify", path)
    assert code == 1
    assert "rows remain" in out


def test_verify_forged_rule_ii(capsys, tmp_path):
    path = tmp_path / "c.json"
    run(capsys, "certify", "--g", 4, "--r", 3, "--d", 6, "--out", path)
    data = json.loads(path.read_text())
    # keep (0,3), which ties (1,2) for the smallest a-value in column 3
    data["selected"].append([0, 3])
    data["selected"].sort()
    data["steps"].insert(0, {"rule": "II", "column": 3, "rows": [[1, 2]], "params": {}})
    path.write_text(json.dumps(data))
    code, out, _ = run(capsys, "verify", path, "-v")
    assert code == 1
    assert "not strictly minimal" in out
    assert "BAD" in out


def test_verify_usage_errors(capsys, tmp_path):
    code, _, _ = run(capsys, "verify", tmp_path / "missing.json")
    assert code == 2
    bad = tmp_path / "bad.json"
    bad.write_text("{}")
    code, _, err = run(capsys, "verify", bad)
    assert code == 2 and "malformed" in err


def test_sweep_m2(capsys, tmp_path):
    code, out, err = run(capsys, "sweep", "--m", 2, "--r", "3..4", "--g-max", 12, "--deterministic",
                         "--cert-dir", tmp_path)
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert rows and all(row["status"] == "verified" for row in rows)
    assert all(row["ms"] == "0" for row in rows)
    assert f"# {len(rows)}/{len(rows)} verified" in err
    assert len(list(tmp_path.glob("cert-*.json"))) == len(rows)


def test_sweep_m3_extension(capsys):
    code, out, _ = run(capsys, "sweep", "--m", 3, "--r", 3, "--g", "7..12", "--deterministic")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert len(rows) > 0
    assert all(row["status"] == "verified" for row in rows)


def test_sweep_parallel_matches_serial(capsys):
    args = ("sweep", "--m", 2, "--r", 3, "--g-max", 10, "--deterministic")
    _, serial, _ = run(capsys, *args)
    _, parallel, _ = run(capsys, *args, "--parallel", 2)
    assert serial == parallel


def test_sweep_empty_range(capsys):
    code, out, err = run(capsys, "sweep", "--m", 2, "--r", 3, "--g", "5..4")
    assert code == 0
    assert out == "g,r,d,m,N,provenance,status,ms\n"
    assert "# 0/0 verified" in err


def test_catalog(capsys):
    code, out, _ = run(capsys, "catalog")
    assert code == 0
    assert out.count("verified") == 7
    code, out, _ = run(capsys, "catalog", "--name", "m3-r3", "--format", "json")
    assert code == 0 and json.loads(out)["case"]["m"] == 3
    code, _, _ = run(capsys, "catalog", "--name", "nope")
    assert code == 2


def test_defaults_are_valid_sequences():
    for g, r, d in [(4, 3, 6), (9, 3, 10), (12, 4, 14), (30, 5, 33)]:
        validate_sequence(default_sequence(g, r, d), g, r, d)
        assert len(default_twist(g, 2, d)) == g - 1


@pytest.mark.skipif(shutil.which("mrcert") is None, reason="console script not installed")
def test_console_script(tmp_path):
    done = subprocess.run(["mrcert", "certify", "--g", "10", "--r", "4", "--d", "12", "--m", "2",
                           "--out", str(tmp_path / "c.json")], capture_output=True, text=True)
    assert done.returncode == 0
    done = subprocess.run(["mrcert", "verify", str(tmp_path / "c.json")], capture_output=True, text=True)
    assert done.returncode == 0


def test_certify_budget_exhausted(capsys, tmp_path):
    code, _, err = run(capsys, "certify", "--g", 10, "--r", 4, "--d", 12, "--m", 2,
                       "--delta", "0,0,1,1,2,2,3,3,4,4", "--w", "2,4,7,9,12,15,17,20,22",
                       "--budget", 0, "--out", tmp_path / "c.json")
    assert code == 3
    assert "budget" in err
