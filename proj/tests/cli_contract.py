# Copyright 2026 The surface7 Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#      http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Command-line contract: exit codes, determinism, schemas, output values.

usage: cli_contract.py <surface7 binary> <schema dir> <configs dir> <test data dir>
"""

import csv
import json
import math
import pathlib
import subprocess
import sys
import tempfile

import jsonschema
import referencing

CLI, SCHEMA_DIR, CONFIGS_DIR, DATA_DIR = (pathlib.Path(p) for p in sys.argv[1:5])
FAILURES = []


def check(ok, what):
    print(("ok   " if ok else "FAIL ") + what)
    if not ok:
        FAILURES.append(what)


def run(*args):
    return subprocess.run([str(CLI), *args], capture_output=True, text=True, timeout=600)


def load_schemas():
    resources = []
    schemas = {}
    for path in SCHEMA_DIR.glob("*.schema.json"):
        doc = json.loads(path.read_text())
        resources.append((path.name, referencing.Resource.from_contents(doc)))
        schemas[path.name.split(".")[0]] = doc
    registry = referencing.Registry().with_resources(resources)
    return {k: jsonschema.Draft202012Validator(v, registry=registry) for k, v in schemas.items()}


def valid(validator, doc):
    errors = list(validator.iter_errors(doc))
    for e in errors:
        print("     schema:", e.message)
    return not errors


def close(a, b, tol=1e-12):
    if isinstance(a, dict):
        return isinstance(b, dict) and a.keys() == b.keys() and all(close(a[k], b[k], tol) for k in a)
    if isinstance(a, list):
        return isinstance(b, list) and len(a) == len(b) and all(close(x, y, tol) for x, y in zip(a, b))
    if isinstance(a, float) or isinstance(b, float):
        return abs(a - b) <= tol
    return a == b


def profile_fit_tau(rows):
    """Least-squares tau by golden-section search on the profiled amplitude."""
    pts = [(float(r["t_us"]), float(r["observable"])) for r in rows]

    def ssr(k):
        num = sum(y * math.exp(-k * t) for t, y in pts)
        den = sum(math.exp(-2 * k * t) for t, _ in pts)
        a = num / den
        return sum((y - a * math.exp(-k * t)) ** 2 for t, y in pts)

    g = (math.sqrt(5) - 1) / 2
    lo, hi = 1e-5, 1.0
    for _ in range(300):
        c, d = hi - g * (hi - lo), lo + g * (hi - lo)
        if ssr(c) < ssr(d):
            hi = d
        else:
            lo = c
    return 2.0 / (lo + hi)


def main():
    v = load_schemas()
    tmp = pathlib.Path(tempfile.mkdtemp(prefix="surface7_cli_"))

    # Exit codes.
    r = run("prep", "--state", "0L", "--config", "/nonexistent/dev.json")
    check(r.returncode == 2 and "/nonexistent/dev.json" in r.stderr, "missing config exits 2 and names the path")
    check(run("prep", "--state", "2L").returncode == 2, "unknown state exits 2")
    check(run("prep", "--bogus").returncode == 2, "unknown flag exits 2")
    check(run("detect", "--state", "0L", "--cycles", "51", "--out", str(tmp / "x.csv")).returncode == 2,
          "cycles above 50 exits 2")
    check(run("detect", "--state", "0L", "--basis", "X", "--out", str(tmp / "x.csv")).returncode == 2,
          "basis/target mismatch exits 2")
    check(run("sample", "--shots", "0").returncode == 2, "zero shots exits 2")
    bad = tmp / "bad.json"
    bad.write_text('{"qubits": {"D3": {"t2_star": 20.0}}}')
    r = run("validate-config", "--config", str(bad))
    check(r.returncode == 2 and "unphysical dephasing" in r.stderr, "unphysical config exits 2")
    unstable = tmp / "unstable.json"
    unstable.write_text('{"qubits": {"A2": {"t1": 0.01, "t2_star": 0.01}}, "options": {"integrator_dt_ns": 100}}')
    check(run("prep", "--state", "0L", "--config", str(unstable)).returncode == 3, "integrator blow-up exits 3")
    check(run("--version").returncode == 0, "--version exits 0")

    # Config round trip and schema.
    for cfg in sorted(CONFIGS_DIR.glob("*.json")):
        check(valid(v["config"], json.loads(cfg.read_text())), f"{cfg.name} matches the config schema")
        r = run("validate-config", "--config", str(cfg))
        check(r.returncode == 0 and valid(v["config"], json.loads(r.stdout)), f"{cfg.name} resolves")

    # prep
    r = run("prep", "--state", "0L", "--noise", "off")
    doc = json.loads(r.stdout)
    check(r.returncode == 0 and valid(v["prep"], doc), "prep output matches schema")
    check(doc["f_l"] == 1.0 and doc["success_prob"] == 0.5, "noiseless prep gives f_l = 1 and success 0.5")
    golden = json.loads((DATA_DIR / "prep_0L_noise_off.json").read_text())
    check(close(doc, golden), "noiseless prep matches golden document")
    check(r.stdout == run("prep", "--state", "0L", "--noise", "off").stdout, "prep is byte-identical across runs")
    r = run("prep", "--amplitudes", "0.6,0.8,0.5", "--noise", "off")
    doc = json.loads(r.stdout)
    check(valid(v["prep"], doc) and abs(doc["f_l"] - 1.0) < 1e-9, "amplitude prep reaches its target")
    r = run("prep", "--state", "1L")
    doc = json.loads(r.stdout)
    check(r.returncode == 0 and 0.96 <= doc["f_l"] <= 1.0, f"noisy 1L f_l in [0.96, 1] (got {doc['f_l']})")

    # detect, noiseless
    out = tmp / "ideal.csv"
    r = run("detect", "--state", "0L", "--noise", "off", "--cycles", "10", "--out", str(out))
    rows = list(csv.DictReader(out.open()))
    check(r.returncode == 0 and len(rows) == 10, "detect writes one row per cycle")
    check(out.read_text().splitlines()[0] == "n,t_us,observable,p_s,k0,k1,k2,k3", "CSV header")
    expected_t = [round(1.92 * n + 0.3, 10) for n in range(1, 11)]
    check([float(x["t_us"]) for x in rows] == expected_t, "t_us column is 2.22, 4.14, ..., 19.5")
    check(all(float(x["observable"]) == 1.0 for x in rows), "noiseless observable column is all 1")
    fit = json.loads((tmp / "ideal.fit.json").read_text())
    check(valid(v["fit"], fit) and fit["fit"]["decay_resolved"] is False, "flat decay gives the sentinel")

    # detect, noisy: sidecar fit reproduces a fit of the emitted rows.
    out = tmp / "noisy.csv"
    run("detect", "--state", "0L", "--cycles", "4", "--out", str(out))
    rows = list(csv.DictReader(out.open()))
    fit = json.loads((tmp / "noisy.fit.json").read_text())
    tau = profile_fit_tau(rows)
    check(valid(v["fit"], fit), "noisy fit sidecar matches schema")
    check(abs(fit["fit"]["decay_time_us"] - tau) <= 1e-6 * tau,
          f"sidecar tau {fit['fit']['decay_time_us']} reproduces refit {tau:.9g}")
    p_s = [float(x["p_s"]) for x in rows]
    check(all(a > b for a, b in zip(p_s, p_s[1:])), "p_s decreases")
    run("detect", "--state", "+L", "--cycles", "2", "--out", str(tmp / "short.csv"))
    check(json.loads((tmp / "short.fit.json").read_text())["fit"] is None, "fewer than 3 cycles gives a null fit")

    # parity
    r = run("parity", "--noise", "off")
    doc = json.loads(r.stdout)
    check(r.returncode == 0 and valid(v["parity"], doc), "parity output matches schema")
    check(all(s["success_prob"] == 1.0 for s in doc["stabilizers"]), "noiseless parity success is 1")
    check(r.stdout == run("parity", "--noise", "off").stdout, "parity is byte-identical across runs")

    # sample
    a = run("sample", "--shots", "100", "--seed", "7", "--noise", "off", "--out", str(tmp / "a.json"))
    b = run("sample", "--shots", "100", "--seed", "7", "--noise", "off", "--out", str(tmp / "b.json"))
    check(a.returncode == 0 and b.returncode == 0 and (tmp / "a.json").read_bytes() == (tmp / "b.json").read_bytes(),
          "same seed gives identical files")
    doc = json.loads((tmp / "a.json").read_text())
    check(valid(v["sample"], doc) and doc["manifest"]["seed"] == 7, "sample output matches schema")
    check(sum(doc["histogram"].values()) == 100, "histogram total equals shots")
    r = run("sample", "--shots", "10000", "--seed", "3", "--noise", "off")
    h = json.loads(r.stdout)["histogram"]
    frac = h.get("000", 0) / 10000
    check(abs(frac - 0.5) <= 3 * math.sqrt(0.25 / 10000), f"noiseless all-zero fraction {frac} is 0.5 within 3 sigma")

    print(f"{len(FAILURES)} failure(s)")
    return 1 if FAILURES else 0


if __name__ == "__main__":
    sys.exit(main())
