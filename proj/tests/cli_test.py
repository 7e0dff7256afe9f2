#!/usr/bin/env python3
"""End-to-end checks of the vmma command-line tool.

Usage: cli_test.py /path/to/vmma /path/to/tests/data

Runs every subcommand against the checked-in configs and asserts the
contract the formats document pins down: exit codes, byte-identical
reruns, sidecar hashes, and the numeric columns that have exact values.
"""

import csv
import json
import math
import shutil
import subprocess
import sys
import tempfile
from pathlib import Path

BINARY = Path(sys.argv[1])
DATA = Path(sys.argv[2])

passed = 0


def run(*args, cwd=None):
    return subprocess.run([str(BINARY), *map(str, args)], capture_output=True, text=True, cwd=cwd)


def check(name, cond, detail=""):
    global passed
    if not cond:
        print(f"FAIL {name}: {detail}", file=sys.stderr)
        sys.exit(1)
    passed += 1
    print(f"ok {name}")


def fnv1a(payload: bytes) -> str:
    h = 0xCBF29CE484222325
    for b in payload:
        h = ((h ^ b) * 0x100000001B3) & 0xFFFFFFFFFFFFFFFF
    return f"{h:016x}"


def read_rows(path):
    with open(path, newline="") as f:
        return list(csv.DictReader(f))


def tree_bytes(root):
    return {p.relative_to(root): p.read_bytes() for p in sorted(root.rglob("*")) if p.is_file()}


work = Path(tempfile.mkdtemp(prefix="vmma-cli-"))
try:
    # --- simulate: artifacts, sidecar hash, determinism -----------------------
    out1 = work / "sim1"
    r = run("simulate", "--config", DATA / "reference.json", "--out", out1, "--quiet")
    check("simulate exits 0", r.returncode == 0, r.stderr)
    for f in ["field.csv", "field.json", "volatility.csv", "volatility.json",
              "summary.json", "run.json"]:
        check(f"simulate writes {f}", (out1 / f).is_file())
    check("quiet mode says nothing", r.stdout == "", r.stdout)

    sidecar = json.loads((out1 / "field.json").read_text())
    check("field sidecar format", sidecar["format"] == "vmma-field-v1")
    check("field sidecar hash matches payload",
          sidecar["content_hash"] == fnv1a((out1 / "field.csv").read_bytes()))

    rows = read_rows(out1 / "field.csv")
    check("field csv columns", set(rows[0]) == {"x1", "value"}, str(rows[0]))
    check("field csv row count", len(rows) == 64, str(len(rows)))

    run_meta = json.loads((out1 / "run.json").read_text())
    check("run metadata", run_meta["format"] == "vmma-run-v1" and run_meta["master_seed"] == 7
          and run_meta["n_reps"] == 400)

    out2 = work / "sim2"
    run("simulate", "--config", DATA / "reference.json", "--out", out2, "--quiet")
    check("same config and seed is byte-identical", tree_bytes(out1) == tree_bytes(out2))

    # --- simulate: seed changes the draw but not the law ----------------------
    out3 = work / "sim3"
    r = run("simulate", "--config", DATA / "reference.json", "--seed", 8, "--out", out3, "--quiet")
    check("reseeded run exits 0", r.returncode == 0, r.stderr)
    check("reseeded field differs",
          (out1 / "field.csv").read_bytes() != (out3 / "field.csv").read_bytes())
    s1 = json.loads((out1 / "summary.json").read_text())["second_moment"]
    s3 = json.loads((out3 / "summary.json").read_text())["second_moment"]
    gap = abs(s1["value"] - s3["value"])
    sigma = math.hypot(s1["se"], s3["se"])
    check("reseeded summary agrees to 4 SE", gap < 4.0 * sigma, f"gap {gap}, se {sigma}")

    # --- simulate: reps override and validation -------------------------------
    out4 = work / "sim4"
    r = run("simulate", "--config", DATA / "reference.json", "--reps", 8, "--out", out4, "--quiet")
    check("reps override exits 0", r.returncode == 0, r.stderr)
    check("reps override recorded",
          json.loads((out4 / "summary.json").read_text())["n_reps"] == 8)
    r = run("simulate", "--config", DATA / "reference.json", "--reps", 1, "--out", work / "x")
    check("reps below 2 is a config error", r.returncode == 1, str(r.returncode))

    # --- simulate: zero-volatility model produces the zero field --------------
    out0 = work / "zero"
    r = run("simulate", "--config", DATA / "zero.json", "--out", out0, "--quiet")
    check("zero model exits 0", r.returncode == 0, r.stderr)
    check("zero model field is identically zero",
          all(float(row["value"]) == 0.0 for row in read_rows(out0 / "field.csv")))
    zs = json.loads((out0 / "summary.json").read_text())
    check("zero model cf column starts at 1",
          zs["char_fn"][0]["value"] == 1.0 and zs["char_fn"][0]["se"] == 0.0)

    # --- config validation maps to exit 1 -------------------------------------
    bad = work / "bad.json"
    bad.write_text('{"grid": {"origin": [0], "step": [0.25], "count": [8]}, "surprise": 1}')
    r = run("simulate", "--config", bad, "--out", work / "never")
    check("unknown key exits 1", r.returncode == 1, str(r.returncode))
    check("unknown key names the problem", "config" in r.stderr, r.stderr)
    r = run("simulate", "--config", work / "missing.json", "--out", work / "never")
    check("missing config exits 1", r.returncode == 1, str(r.returncode))
    r = run("simulate", "--config", DATA / "design_gaussian.json", "--out", work / "never")
    check("model-free config cannot simulate", r.returncode == 1, str(r.returncode))

    # --- analyze: verification report and dual-route checks -------------------
    outa = work / "analyze"
    r = run("analyze", "--config", DATA / "reference.json", "--out", outa, "--quiet")
    check("analyze exits 0", r.returncode == 0, r.stderr)
    report = json.loads((outa / "report.json").read_text())
    check("analyze report format", report["format"] == "vmma-report-v1")
    check("analyze report passes", report["pass"] is True,
          str([c["name"] for c in report["checks"] if not c["pass"]]))
    names = {c["name"] for c in report["checks"]}
    check("analyze covers the dual routes",
          {"laplace_zero", "cf_bounds", "tail_truncation", "complete_monotonicity",
           "variance_mc", "char_fn_mc", "correlation_mc", "covariance_squares",
           "joint_cf_modes"} <= names, str(names))

    cf_rows = read_rows(outa / "char_fn.csv")
    check("cf csv columns", set(cf_rows[0]) == {"theta", "value"}, str(cf_rows[0]))
    check("cf column starts at 1 for theta 0",
          float(cf_rows[0]["theta"]) == 0.0 and float(cf_rows[0]["value"]) == 1.0)
    check("cf values stay in (0, 1]",
          all(0.0 < float(row["value"]) <= 1.0 for row in cf_rows))
    lv_rows = read_rows(outa / "laplace_v.csv")
    check("laplace csv columns", set(lv_rows[0]) == {"theta", "value"}, str(lv_rows[0]))

    outa2 = work / "analyze2"
    run("analyze", "--config", DATA / "reference.json", "--out", outa2, "--quiet")
    check("analyze is deterministic", tree_bytes(outa) == tree_bytes(outa2))

    # --- analyze: a non-covariance design is a numeric failure ----------------
    r = run("analyze", "--config", DATA / "design_not_covariance.json", "--out", work / "nc")
    check("non-covariance exits 2", r.returncode == 2, f"{r.returncode}: {r.stderr}")
    check("non-covariance diagnostic", "not a covariance" in r.stderr, r.stderr)

    # --- design-kernel: roundtrip quality and root symmetry -------------------
    outd = work / "design"
    r = run("design-kernel", "--config", DATA / "design_gaussian.json", "--out", outd, "--quiet")
    check("design exits 0", r.returncode == 0, r.stderr)
    design = json.loads((outd / "design.json").read_text())
    check("design format", design["format"] == "vmma-design-v1")
    check("design roundtrip below 1e-3", design["roundtrip_error"] < 1e-3,
          str(design["roundtrip_error"]))
    check("design records the root", design["root"] == "even")
    krows = read_rows(outd / "designed_kernel.csv")
    check("designed kernel columns", set(krows[0]) == {"z1", "value"}, str(krows[0]))
    check("design csv hash recorded",
          design["content_hash"] == fnv1a((outd / "designed_kernel.csv").read_bytes()))
    # even root: value at z equals value at -z (window is open at the left end)
    by_z = {float(row["z1"]): float(row["value"]) for row in krows}
    sym = all(abs(by_z[z] - by_z[-z]) < 1e-9 for z in by_z if -z in by_z and z != 0.0)
    check("even root is symmetric", sym)

    # --- lamperti: scaled field and covariance table --------------------------
    outl = work / "lamperti"
    r = run("lamperti", "--config", DATA / "lamperti.json", "--out", outl, "--quiet")
    check("lamperti exits 0", r.returncode == 0, r.stderr)
    ysc = json.loads((outl / "y_field.json").read_text())
    check("scaled field sidecar", ysc["scale"] == "exponential"
          and ysc["mss_exponents"] == [0.5])

    mrows = read_rows(outl / "mss_covariance.csv")
    check("mss covariance columns",
          set(mrows[0]) == {"t1", "s1", "analytic", "stat_incr", "empirical", "se"},
          str(mrows[0]))
    for row in mrows:
        t, s = float(row["t1"]), float(row["s1"])
        analytic = float(row["analytic"])
        stat_incr = float(row["stat_incr"])
        # H = 1/2 with an exponential-correlation base: both forms are
        # min(t,s) * Var X(0), agreeing to quadrature accuracy
        check(f"brownian covariance forms agree at ({t:.3g},{s:.3g})",
              abs(analytic - stat_incr) < 1e-3 * max(1.0, abs(analytic)),
              f"{analytic} vs {stat_incr}")
        check(f"empirical covariance within 4 SE at ({t:.3g},{s:.3g})",
              abs(float(row["empirical"]) - analytic) <= 4.0 * float(row["se"]) + 1e-12,
              f'{row["empirical"]} vs {analytic} +- {row["se"]}')

    rrows = read_rows(outl / "rho_spectral.csv")
    check("spectral consistency columns",
          set(rrows[0]) == {"freq", "series", "transform", "abs_err"}, str(rrows[0]))
    worst = max(float(row["abs_err"]) for row in rrows)
    check("spectral consistency below 1e-5", worst < 1e-5, str(worst))

    # --- argument plumbing ----------------------------------------------------
    r = run("--help")
    check("help exits 0", r.returncode == 0)
    r = run("frobnicate", "--config", DATA / "reference.json")
    check("unknown subcommand exits 1", r.returncode == 1, str(r.returncode))
    r = run("simulate")
    check("missing config exits 1 (parse error)", r.returncode == 1, str(r.returncode))

    print(f"all {passed} checks passed")
finally:
    shutil.rmtree(work, ignore_errors=True)
