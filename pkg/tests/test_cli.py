"""Command-line front end: subcommands, record output, exit codes."""

import subprocess
import sys

import pytest

from gicast.cli import main

from conftest import FIXTURES

EX1 = str(FIXTURES / "example1.gic")
EX3 = str(FIXTURES / "example3.gic")


def run(capsys, *argv):
    rc = main(list(argv))
    captured = capsys.readouterr()
    return rc, captured.out, captured.err


def records(out):
    recs = []
    for line in out.strip().splitlines():
        if "=" in line.split()[0]:
            recs.append(dict(kv.split("=", 1) for kv in line.split()))
    return recs


# --------------------------------------------------------------------- gen

def test_gen_k6_matches_fixture(capsys):
    rc, out, _ = run(capsys, "gen", "--k", "6")
    assert rc == 0
    assert out == (FIXTURES / "k6.gic").read_text()


def test_gen_k2(capsys):
    rc, out, _ = run(capsys, "gen", "--k", "2")
    assert rc == 0
    assert out == "gic 1\nuser 1 1 :\nuser 1 2 :\n"


def test_gen_rejects_k1(capsys):
    rc, _, err = run(capsys, "gen", "--k", "1")
    assert rc == 2
    assert "k >= 2" in err


def test_gen_out_file(tmp_path, capsys):
    target = tmp_path / "fam.gic"
    rc, out, _ = run(capsys, "gen", "--k", "4", "--out", str(target))
    assert rc == 0
    assert out == ""
    assert target.read_text().startswith("gic 6\n")


# -------------------------------------------------------------------- solve

SCHEME_RATES = {
    "ppm-exhaustive": "3",
    "upm-exhaustive": "2",
    "iupm-exhaustive": "2",
    "upm-group": "2",
    "iupm-group": "2",
    "heuristic-user": "2",
    "heuristic-packet": "2",
}


@pytest.mark.parametrize("scheme,rate", sorted(SCHEME_RATES.items()))
def test_solve_example1_schemes(capsys, scheme, rate):
    rc, out, _ = run(capsys, "solve", EX1, "--scheme", scheme, "--format", "records")
    assert rc == 0
    (rec,) = records(out)
    assert rec["scheme"] == scheme
    assert rec["rate"] == rate
    assert rec["verified"] == "pass"
    assert "time_ms" in rec


def test_solve_minrank_record(capsys):
    rc, out, _ = run(capsys, "solve", EX1, "--scheme", "minrank", "--format", "records")
    assert rc == 0
    (rec,) = records(out)
    assert rec["value"] == "2"
    assert rec["label"] == "scalar-linear-gf2-optimum"
    assert rec["verified"] == "n/a"


def test_solve_example3_group_rank(capsys):
    rc, out, _ = run(capsys, "solve", EX3, "--scheme", "iupm-group", "--format", "records")
    assert rc == 0
    (rec,) = records(out)
    assert rec["rate"] == "10"
    assert rec["verified"] == "pass"


def test_solve_table_format_shows_rows(capsys):
    rc, out, _ = run(capsys, "solve", EX1, "--scheme", "upm-exhaustive")
    assert rc == 0
    assert "rate=2" in out
    assert "1 0 0 1" in out
    assert "1 1 1 0" in out


def test_solve_trace_lines(capsys):
    rc, out, _ = run(capsys, "solve", EX1, "--scheme", "heuristic-packet", "--trace")
    assert rc == 0
    assert "promote (1,1)(4,1) level 2 -> 3 merge into (1,2)(2,1)(3,1)" in out


def test_solve_heuristic_packet_variant_tag(capsys):
    rc, out, _ = run(capsys, "solve", EX1, "--scheme", "heuristic-packet", "--format", "records")
    assert rc == 0
    assert "variant=CAPM-variant" in out


def test_solve_randomized_prints_seed(capsys):
    rc, out, _ = run(
        capsys, "solve", EX1, "--scheme", "iupm-exhaustive",
        "--randomized", "--seed", "7", "--format", "records",
    )
    assert rc == 0
    (rec,) = records(out)
    assert rec["seed"] == "7"
    assert rec["rate"] == "2"


def test_solve_parse_error_exit(tmp_path, capsys):
    bad = tmp_path / "bad.gic"
    bad.write_text("gic 2\nuser 1 1 : x\n")
    rc, _, err = run(capsys, "solve", str(bad), "--scheme", "minrank")
    assert rc == 2
    assert "line 2" in err


def test_solve_cap_exceeded_exit(tmp_path, capsys):
    fam = tmp_path / "k5.gic"
    main(["gen", "--k", "5", "--out", str(fam)])
    capsys.readouterr()
    rc, _, err = run(capsys, "solve", str(fam), "--scheme", "upm-exhaustive")
    assert rc == 2
    assert "cap" in err


def test_solve_budget_exceeded_exit(tmp_path, capsys):
    fam = tmp_path / "k5.gic"
    main(["gen", "--k", "5", "--out", str(fam)])
    capsys.readouterr()
    rc, _, err = run(capsys, "solve", str(fam), "--scheme", "minrank")
    assert rc == 2
    assert "budget" in err


def test_solve_missing_file_exit(capsys):
    rc, _, err = run(capsys, "solve", "nope.gic", "--scheme", "minrank")
    assert rc == 2


# ----------------------------------------------------------------- validate

def test_validate_ok(capsys):
    rc, out, _ = run(capsys, "validate", EX1)
    assert rc == 0
    assert out == "ok\n"


def test_validate_violations(tmp_path, capsys):
    bad = tmp_path / "inv.gic"
    bad.write_text("gic 2\nuser 1 1 : 1 2\nuser 2 1 :\n")
    rc, _, err = run(capsys, "validate", str(bad))
    assert rc == 1
    assert "violation: self-inclusion" in err


# -------------------------------------------------------------------- table

def test_table_records_round_trip(capsys):
    rc, out, _ = run(capsys, "table", "--k", "2:4", "--format", "records")
    assert rc == 0
    recs = records(out)
    assert [r["k"] for r in recs] == ["2", "3", "4"]
    k4 = recs[2]
    assert k4["m"] == "6"
    assert k4["ppm_exh"] == "4"
    assert k4["upm_group"] == "4"
    assert k4["iupm_group"] == "3"
    assert k4["heur_user"] == "4"
    assert k4["heur_packet"] == "4"
    assert k4["minrank"] == "3"


def test_table_k6_row(capsys):
    rc, out, _ = run(capsys, "table", "--k", "6", "--format", "records")
    assert rc == 0
    (rec,) = records(out)
    assert rec["upm_group"] == "6"
    assert rec["iupm_group"] == "5"
    assert rec["heur_user"] == "6"
    assert rec["heur_packet"] == "11"
    # both exhaustive columns out of reach at k=6
    assert rec["ppm_exh"] == "-"
    assert rec["minrank"] == "-"


def test_table_human_format_aligned(capsys):
    rc, out, _ = run(capsys, "table", "--k", "2:3")
    assert rc == 0
    lines = out.splitlines()
    assert lines[0].split() == [
        "k", "m", "ppm_bound", "ppm_exh", "upm_group",
        "iupm_group", "heur_user", "heur_packet", "minrank",
    ]
    assert len(lines) == 3


# ------------------------------------------------------------- entry point

def test_console_script_runs():
    proc = subprocess.run(
        [sys.executable, "-m", "gicast.cli", "solve", EX1, "--scheme", "minrank", "--format", "records"],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0
    assert "value=2" in proc.stdout
