"""Exit codes, report determinism, cache flows, and output formats of the
command-line driver."""

import contextlib
import io
import json
import os
from fractions import Fraction

import pytest

from corrbound.cli import CACHE_ENV, ceil_decimal, floor_decimal, main


def run(argv):
    out, err = io.StringIO(), io.StringIO()
    with contextlib.redirect_stdout(out), contextlib.redirect_stderr(err):
        code = main(argv)
    return code, out.getvalue(), err.getvalue()


def run_json(argv):
    code, out, err = run(argv + ["--format", "json"])
    assert code == 0, err
    return json.loads(out)


# ---------------------------------------------------------------------------
# rounding helpers


def test_ceil_decimal_rounds_up():
    assert ceil_decimal(Fraction(1, 3), 4) == "0.3334"
    assert ceil_decimal(Fraction(1, 4), 2) == "0.25"
    assert ceil_decimal(Fraction(-1, 3), 4) == "-0.3333"


def test_floor_decimal_rounds_down():
    assert floor_decimal(Fraction(2, 3), 4) == "0.6666"
    assert floor_decimal(Fraction(-1, 3), 4) == "-0.3334"


# ---------------------------------------------------------------------------
# exit codes


def test_config_error_exits_1():
    code, _, err = run(["bound", "--param", "poly", "--n", "4", "--d", "2"])
    assert code == 1
    assert "error:" in err


def test_unknown_flag_exits_1():
    code, _, err = run(["bound", "--frobnicate"])
    assert code == 1
    assert "unrecognized" in err


def test_odd_poly_degree_exits_1():
    code, _, _ = run(["bound", "--param", "poly", "--d", "3"])
    assert code == 1


def test_numeric_failure_exits_2():
    code, _, err = run([
        "bound", "--param", "shift", "--n", "3", "--m", "2", "--d", "0",
        "--C", "16", "--tail-tolerance", "1e-9",
    ])
    assert code == 2
    assert "tail" in err


def test_cache_corruption_exits_3(tmp_path):
    cache = str(tmp_path)
    argv = ["bound", "--param", "shift", "--n", "3", "--m", "1", "--d", "0",
            "--C", "32", "--cache-dir", cache]
    code, _, _ = run(argv)
    assert code == 0
    name = next(f for f in os.listdir(cache) if f.endswith(".ndjson"))
    path = os.path.join(cache, name)
    with open(path) as fh:
        lines = fh.readlines()
    lines[1] = lines[1].replace('"mid"', '"mud"', 1)
    with open(path, "w") as fh:
        fh.writelines(lines)
    code, _, err = run(argv)
    assert code == 3
    assert name in err


def test_help_exits_0():
    code, out, _ = run(["--help"])
    assert code == 0


def test_missing_subcommand_exits_1():
    code, _, _ = run([])
    assert code == 1


def test_kernel2_x_without_y_exits_1():
    code, _, _ = run(["kernel2", "--m", "1", "--x", "1/3"])
    assert code == 1


def test_bad_rational_exits_1():
    code, _, _ = run(["kernel2", "--m", "1", "--x", "1/3", "--y", "zebra"])
    assert code == 1


# ---------------------------------------------------------------------------
# bound command


def test_bound_poly_d10_matches_reference_digits():
    report = run_json(["bound", "--param", "poly", "--d", "10"])
    assert report["bound"]["printed"] == "0.077516654"
    assert report["bound"]["exact"] is not None
    assert report["basis"]["size"] == 3
    assert report["config"]["param"] == "poly"


def test_bound_shift_encloses_four_point_reference():
    report = run_json(["bound", "--param", "shift", "--n", "4", "--m", "1",
                       "--d", "0", "--C", "25"])
    lo = Fraction(report["bound"]["lo"])
    hi = Fraction(report["bound"]["hi"])
    assert lo <= Fraction(447, 3500) <= hi
    assert report["config"]["C"] == 25
    assert report["config"]["s"] == ["1/8", "1/4", "3/8"]


def test_bound_shift_three_point_reasonable():
    report = run_json(["bound", "--param", "shift", "--n", "3", "--m", "2",
                       "--d", "1", "--C", "80"])
    mid = float(report["bound"]["mid"])
    assert abs(mid - 1.401604735) < 0.05
    assert report["basis"]["orbit_representatives"][0] == [0, 0]


def test_bound_json_deterministic_excluding_timing():
    argv = ["bound", "--param", "shift", "--n", "3", "--m", "1", "--d", "1",
            "--C", "40"]
    first = run_json(argv)
    second = run_json(argv)
    del first["timing"], second["timing"]
    blob = lambda r: json.dumps(r, sort_keys=True)
    assert blob(first) == blob(second)


def test_bound_warm_cache_equals_cold(tmp_path):
    argv = ["bound", "--param", "shift", "--n", "3", "--m", "2", "--d", "1",
            "--C", "60", "--cache-dir", str(tmp_path)]
    cold = run_json(argv)
    warm = run_json(argv)
    del cold["timing"], warm["timing"]
    assert json.dumps(cold, sort_keys=True) == json.dumps(warm, sort_keys=True)


def test_bound_default_C_by_n():
    report = run_json(["bound", "--param", "shift", "--n", "4", "--m", "1",
                       "--d", "0"])
    assert report["config"]["C"] == 25


def test_bound_csv_single_row():
    code, out, _ = run(["bound", "--param", "poly", "--d", "4",
                        "--format", "csv"])
    assert code == 0
    header, row = out.strip().splitlines()
    assert header.startswith("n,m,param,d,C,bound_printed")
    assert row.split(",")[5] == "0.081105010"


# ---------------------------------------------------------------------------
# table command


def test_table_poly_keeps_even_degrees():
    report = run_json(["table", "--param", "poly", "--d-range", "0:4"])
    assert [row["d"] for row in report["rows"]] == [0, 2, 4]
    assert report["rows"][0]["bound"]["printed"] == "0.144444445"
    assert report["failed_rows"] == 0


def test_table_empty_range_header_only():
    code, out, _ = run(["table", "--param", "shift", "--n", "3", "--m", "2",
                        "--d-range", "3:1"])
    assert code == 0
    assert "d" in out
    assert "failed" not in out


def test_table_row_failure_continues_and_exits_2():
    code, out, _ = run([
        "table", "--param", "shift", "--n", "3", "--m", "2",
        "--d-range", "0:1", "--C", "16", "--tail-tolerance", "1e-9",
    ])
    assert code == 2
    assert out.count("failed:") == 2


def test_table_bad_range_exits_1():
    code, _, _ = run(["table", "--param", "poly", "--d-range", "x:y"])
    assert code == 1


# ---------------------------------------------------------------------------
# kernel2 command


def test_kernel2_reference_value():
    report = run_json(["kernel2", "--m", "1"])
    assert report["bound"]["printed"] == "0.327499297"
    assert report["k00"]["mid"].startswith("3.0534416752489817825")
    assert report["fraction"]["printed"] == "0.672500703"
    assert "note" in report


def test_kernel2_origin_point_matches_k00():
    report = run_json(["kernel2", "--m", "1", "--x", "0", "--y", "0"])
    assert report["kxy"]["mid"][:25] == report["k00"]["mid"][:25]


def test_kernel2_wider_band_costs_more():
    one = run_json(["kernel2", "--m", "1"])
    two = run_json(["kernel2", "--m", "2"])
    assert Fraction(two["bound"]["lo"]) > Fraction(one["bound"]["hi"])
    assert two["fraction"]["lo"].startswith("-")


# ---------------------------------------------------------------------------
# cache command


def test_cache_requires_directory():
    env_backup = os.environ.pop(CACHE_ENV, None)
    try:
        code, _, err = run(["cache", "list"])
    finally:
        if env_backup is not None:
            os.environ[CACHE_ENV] = env_backup
    assert code == 1
    assert CACHE_ENV in err


def test_cache_list_empty(tmp_path):
    report = run_json(["cache", "list", "--cache-dir", str(tmp_path)])
    assert report["files"] == []


def test_cache_roundtrip_list_verify_clear(tmp_path):
    cache = str(tmp_path)
    code, _, _ = run(["bound", "--param", "shift", "--n", "3", "--m", "2",
                      "--d", "1", "--C", "60", "--cache-dir", cache])
    assert code == 0
    listing = run_json(["cache", "list", "--cache-dir", cache])
    assert len(listing["files"]) == 1
    assert listing["files"][0]["records"] == 3
    assert "n=3 m=2 shift d=1 C=60" == listing["files"][0]["config"]

    verify = run_json(["cache", "verify", "--cache-dir", cache,
                       "--sample", "1.0"])
    assert verify["stale_entries"] == 0
    assert verify["files"][0]["checked"] == 3

    cleared = run_json(["cache", "clear", "--cache-dir", cache])
    assert cleared["removed"] == 1
    assert not os.listdir(cache)


def test_cache_verify_flags_stale_entry(tmp_path):
    cache = str(tmp_path)
    run(["bound", "--param", "shift", "--n", "3", "--m", "1", "--d", "0",
         "--C", "32", "--cache-dir", cache])
    name = next(f for f in os.listdir(cache) if f.endswith(".ndjson"))
    path = os.path.join(cache, name)
    with open(path) as fh:
        lines = fh.readlines()
    rec = json.loads(lines[1])
    num, den = rec["mid"].split("/")
    rec["mid"] = "%d/%s" % (int(num) * 7 + 1, den)
    lines[1] = json.dumps(rec) + "\n"
    with open(path, "w") as fh:
        fh.writelines(lines)
    code, out, _ = run(["cache", "verify", "--cache-dir", cache,
                        "--sample", "1.0"])
    assert code == 3
    assert "STALE" in out


def test_cache_env_var_sets_directory(tmp_path, monkeypatch):
    monkeypatch.setenv(CACHE_ENV, str(tmp_path))
    code, _, _ = run(["bound", "--param", "poly", "--d", "2"])
    assert code == 0
    assert any(f.endswith(".ndjson") for f in os.listdir(str(tmp_path)))


def test_cache_poly_verify_exact(tmp_path):
    cache = str(tmp_path)
    run(["bound", "--param", "poly", "--d", "4", "--cache-dir", cache])
    verify = run_json(["cache", "verify", "--cache-dir", cache,
                       "--sample", "1.0"])
    assert verify["stale_entries"] == 0
    assert verify["files"][0]["checked"] == 3
