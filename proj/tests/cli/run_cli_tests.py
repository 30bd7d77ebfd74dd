#!/usr/bin/env python3
"""End-to-end contract checks for the delfront binary.

Usage: run_cli_tests.py <path-to-binary> <source-dir>

Covers the exit-code mapping (0/2/3/4/5), output formats, manifest presence,
and byte-identical reruns. Fast parameter choices only; numerical depth lives
in the unit and acceptance suites.
"""

import json
import math
import subprocess
import sys
import tempfile
from pathlib import Path

BIN = Path(sys.argv[1]).resolve()
SRC = Path(sys.argv[2]).resolve()
CFG = SRC / "configs"

failures = []


def check(name, cond, detail=""):
    status = "PASS" if cond else "FAIL"
    print(f"[{status}] {name}" + (f"  ({detail})" if detail and not cond else ""))
    if not cond:
        failures.append(name)


def run(args, cwd):
    return subprocess.run(
        [str(BIN)] + args, cwd=cwd, capture_output=True, text=True, timeout=600
    )


def read_rows(path):
    lines = Path(path).read_text().strip().splitlines()
    return lines[0], [ln.split(",") for ln in lines[1:]]


def manifest_of(outdir, command):
    p = Path(outdir) / f"{command}_manifest.json"
    if not p.exists():
        return None
    return json.loads(p.read_text())


with tempfile.TemporaryDirectory() as tmp:
    tmp = Path(tmp)

    # ------------------------------------------------------------- roots ----
    d = tmp / "roots"
    d.mkdir()
    r = run(["roots", "--a", "-1", "--b", "-1", "--c", "1", "--h", "0"], d)
    check("roots exit 0", r.returncode == 0, r.stderr)
    try:
        rep = json.loads(r.stdout)
        vals = sorted(x["value"] for x in rep["real_roots"])
        check(
            "roots real roots -1,2",
            len(vals) == 2
            and math.isclose(vals[0], -1, abs_tol=1e-9)
            and math.isclose(vals[1], 2, abs_tol=1e-9),
        )
    except Exception as e:  # noqa: BLE001
        check("roots json parses", False, str(e))
    check("roots manifest written", manifest_of(d, "roots") is not None)

    r = run(["roots", "--a", "-1", "--b", "-1", "--h", "0"], d)
    check("roots missing --c exits 2", r.returncode == 2)

    # ------------------------------------------------------------ domain ----
    d1 = tmp / "dom1"
    d2 = tmp / "dom2"
    d1.mkdir()
    d2.mkdir()
    args = ["domain", "--a", "-1", "--b", "-1", "--tau-max", "6", "--points", "40",
            "--out", "d.csv"]
    r1 = run(args, d1)
    r2 = run(args, d2)
    check("domain exit 0", r1.returncode == 0, r1.stderr)
    check("domain prints tau_sharp", "tau_sharp = 0.27846" in r1.stdout)
    header, rows = read_rows(d1 / "d.csv")
    check("domain csv header", header == "tau,clin")
    inf_rows = [row for row in rows if row[1] == "inf"]
    fin = [float(row[1]) for row in rows if row[1] != "inf"]
    check("domain has inf prefix", len(inf_rows) >= 1)
    check("domain finite tail decreasing",
          all(a > b for a, b in zip(fin, fin[1:])) and fin)
    check(
        "domain reruns byte-identical",
        (d1 / "d.csv").read_bytes() == (d2 / "d.csv").read_bytes(),
    )
    m = manifest_of(d1, "domain")
    check("domain manifest summary",
          m is not None and "tau_sharp" in m["parameters"] and "theta" in m["parameters"])

    r = run(["domain", "--a", "-1", "--b", "-1", "--tau-max", "0.1"], d1)
    check("domain all-infinite range exits 2", r.returncode == 2)

    # --------------------------------------------------------------- toy ----
    d = tmp / "toy"
    d.mkdir()
    r = run(["toy", "--kappa", "0.3333333", "--p", "0.5", "--q", "-1",
             "--tau-grid", "0:6:0.5"], d)
    check("toy grid exit 0", r.returncode == 0, r.stderr)
    check("toy prints branch", "branch = positive" in r.stdout)
    check("toy prints exit tau", "domain_exit_tau = 4.1" in r.stdout)
    header, rows = read_rows(d / "toy_speeds.csv")
    check("toy csv header", header == "tau,c,monotone")
    check("toy csv rows", len(rows) == 13)

    r = run(["toy", "--kappa", "0.9", "--p", "0.5", "--q", "-1", "--tau", "1",
             "--profile-out", "prof.csv"], d)
    check("toy negative branch", r.returncode == 0 and "branch = negative" in r.stdout)
    header, rows = read_rows(d / "prof.csv")
    check("toy profile header", header == "t,phi")

    r = run(["toy", "--kappa", "0.3", "--p", "0.5", "--q", "0.5", "--tau", "1"], d)
    check("toy invalid q exits 2", r.returncode == 2)

    # k* = 1 exactly at kappa = 1/(1 + sqrt((1-p)/(1-q)))
    r = run(["toy", "--kappa", "0.6666666666666666", "--p", "0.5", "--q", "-1",
             "--tau", "1"], d)
    check("toy degenerate branch exits 4", r.returncode == 4)

    r = run(["toy", "--kappa", "0.3", "--p", "0.5", "--q", "-1",
             "--profile-out", "p.csv"], d)
    check("toy profile without --tau exits 2", r.returncode == 2)

    # ------------------------------------------------------------- front ----
    d = tmp / "front"
    d.mkdir()
    r = run(["front", "--model", str(CFG / "nagumo.cfg"), "--tau", "0",
             "--N", "400"], d)
    check("front exit 0", r.returncode == 0, r.stderr)
    c_line = [ln for ln in r.stdout.splitlines() if ln.startswith("c = ")]
    c_val = float(c_line[0].split("=")[1]) if c_line else float("nan")
    check("front speed near closed form", abs(c_val - 0.35355339) < 1e-3)
    rep = json.loads((d / "front_report.json").read_text())
    check("front report monotone", rep["monotone"] is True)
    header, rows = read_rows(d / "front_profile.csv")
    check("front profile header", header == "t,phi")
    m = manifest_of(d, "front")
    check("front manifest outputs exist",
          m is not None
          and all((p if Path(p).is_absolute() else d / p).exists()
                  for p in map(Path, m["outputs"])))

    r = run(["front", "--model", str(tmp / "missing.cfg"), "--tau", "0"], d)
    check("front missing config exits 3", r.returncode == 3)

    bad = tmp / "notbistable.cfg"
    bad.write_text("kind = custom\ncoeffs = 0, 0.2\ndomain_lo = 0\ndomain_hi = 1\n")
    r = run(["front", "--model", str(bad), "--tau", "0"], d)
    check("front non-bistable model exits 4", r.returncode == 4)

    r = run(["front", "--model", str(CFG / "nagumo.cfg"), "--tau", "0",
             "--N", "400", "--tol", "1e-30"], d)
    check("front unreachable tolerance exits 5", r.returncode == 5)

    # ------------------------------------------------------------- sweep ----
    d1 = tmp / "sw1"
    d2 = tmp / "sw2"
    d1.mkdir()
    d2.mkdir()
    args = ["sweep", "--model", str(CFG / "toysmooth.cfg"), "--tau-max", "0.3",
            "--N", "400", "--out", "sw.csv"]
    r1 = run(args, d1)
    r2 = run(args, d2)
    check("sweep exit 0", r1.returncode == 0, r1.stderr)
    check("sweep prints termination", "termination = reached_tau_max" in r1.stdout)
    header, rows = read_rows(d1 / "sw.csv")
    check("sweep csv header", header == "tau,c,monotone,residual")
    taus = [float(row[0]) for row in rows]
    check("sweep tau increasing", all(a < b for a, b in zip(taus, taus[1:])))
    check(
        "sweep reruns byte-identical",
        (d1 / "sw.csv").read_bytes() == (d2 / "sw.csv").read_bytes(),
    )

    # ---------------------------------------------------------- simulate ----
    d = tmp / "sim"
    d.mkdir()
    r = run(["simulate", "--model", str(CFG / "nagumo.cfg"), "--tau", "0",
             "--x-max", "120", "--nx", "1201", "--t-final", "40", "--x0", "30",
             "--snapshot-every", "20"], d)
    check("simulate exit 0", r.returncode == 0, r.stderr)
    header, rows = read_rows(d / "sim_summary.csv")
    check("simulate summary header", header == "tau,measured_speed,oscillation_flag")
    check("simulate speed sane", abs(float(rows[0][1]) - 0.35355) < 0.007)
    check("simulate snapshots written",
          (d / "snapshot_000.csv").exists() and (d / "sim_final.csv").exists())
    header, rows = read_rows(d / "sim_final.csv")
    check("simulate state header", header == "x,u")

    r = run(["simulate", "--model", str(CFG / "nagumo.cfg"), "--tau", "0",
             "--ic", "profile", "--seed", str(tmp / "nosuch.csv")], d)
    check("simulate missing seed exits 3", r.returncode == 3)

    # unwritable output directory maps to the I/O exit code
    r = run(["--out-dir", "/dev/null/sub", "domain", "--a", "-1", "--b", "-1",
             "--tau-max", "2"], tmp)
    check("unwritable out-dir exits 3", r.returncode == 3)

print()
if failures:
    print(f"{len(failures)} contract check(s) failed: {failures}")
    sys.exit(1)
print("all cli contract checks passed")
