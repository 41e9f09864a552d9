"""The twelve acceptance criteria, each at its stated tolerance.

Every test records one PASS/FAIL line (printed in the terminal summary) and
then asserts, so a failing criterion is reported rather than hidden.
"""

import random
import subprocess
import sys
import time
from collections import Counter

from mcids.benchmark import compare, verify_detections
from mcids.corpus import DECOY_ATTACKS, GenConfig, check_record, generate_corpus, write_corpus
from mcids.formula import Logic, expand_derived, format_formula, parse_formula
from mcids.semantics import _naive, eval_naive, evaluate, scope_bounds
from mcids.signatures import all_signatures, signature
from mcids.trace import Event, Trace
from randgen import random_cases, random_formula, random_trace

RESULTS = {}


def record(n, passed, detail):
    RESULTS[n] = (passed, detail)
    assert passed, f"criterion {n}: {detail}"


def _fires(attack, logic, tr, **overrides):
    from mcids.detector import detect
    from mcids.signatures import prepare_trace

    s = signature(attack, **overrides)
    return detect(prepare_trace(tr, s), s.encodings[logic], logic).detected


def _tree(path):
    return {p.relative_to(path): p.read_bytes() for p in sorted(path.rglob("*")) if p.is_file()}


def test_01_oracle_equivalence():
    start = time.monotonic()
    checked = Counter()
    mismatches = 0
    for logic in Logic:
        for f, tr, scope in random_cases(101, logic, 1000, max_len=8, depth=4):
            checked[logic] += 1
            mismatches += evaluate(f, logic, tr, scope) != eval_naive(f, logic, tr, scope)
    elapsed = time.monotonic() - start
    per = ", ".join(f"{l}={checked[l]}" for l in Logic)
    record(1, mismatches == 0 and min(checked.values()) >= 1000 and elapsed <= 60,
           f"{mismatches} mismatches over {per} pairs in {elapsed:.1f} s (limit 60 s)")


def test_02_derived_operator_soundness():
    bad = total = 0
    for logic in Logic:
        for f, tr, scope in random_cases(102, logic, 1000, max_len=8, depth=4):
            lo, hi = scope_bounds(logic, tr, scope)
            total += 1
            bad += _naive(expand_derived(f, logic), tr, lo, hi, ()) != _naive(f, tr, lo, hi, ())
    rng = random.Random(202)
    rules = 0
    for _ in range(300):
        tr = random_trace(rng, 8)
        phi = random_formula(rng, Logic.PROP, depth=2)
        n = len(tr)
        for lo in range(n):
            rules += 3
            bad += _naive(parse_formula(f"<>({phi})"), tr, lo, n - 1, ()) != _naive(
                parse_formula(f"true U ({phi})"), tr, lo, n - 1, ())
            for hi in range(lo, n):
                bad += _naive(parse_formula(f"<>({phi})"), tr, lo, hi, ()) != _naive(
                    parse_formula(f"true ; ({phi})"), tr, lo, hi, ())
                bad += _naive(parse_formula(f"X ({phi})"), tr, lo, hi, ()) != _naive(
                    parse_formula(f"skip ; ({phi})"), tr, lo, hi, ())
    record(2, bad == 0, f"{bad} disagreements over {total} expanded formulas and {rules}+ direct rule checks")


def test_03_threshold_boundaries():
    one = lambda **attrs: Trace([Event(0, attrs=attrs)])
    mail = lambda gaps: Trace([Event(sum(gaps[:i]), {"mail.recieve"}) for i in range(10)])
    checks = {
        "pod 65537": _fires("pod", Logic.PROP, one(**{"m.size": 65537})),
        "pod 65536": not _fires("pod", Logic.PROP, one(**{"m.size": 65536})),
        "apache 6": _fires("apache", Logic.PROP, Trace([Event(0, {"p"}, {"attacked.receive.http.range": 6})])),
        "apache 5": not _fires("apache", Logic.PROP, Trace([Event(0, {"p"}, {"attacked.receive.http.range": 5})])),
        "sendmail 257": _fires("sendmail", Logic.PROP, one(**{"Attacked.receive.size": 257})),
        "sendmail 256": not _fires("sendmail", Logic.PROP, one(**{"Attacked.receive.size": 256})),
        "mailbomb 0.009": _fires("mailbomb", Logic.RASL, mail([0.009] * 9)),
    }
    for k in range(9):
        gaps = [0.009] * 9
        gaps[k] = 0.011
        checks[f"mailbomb 0.011 at gap {k + 1}"] = not _fires("mailbomb", Logic.RASL, mail(gaps))
    failed = [k for k, ok in checks.items() if not ok]
    record(3, not failed, f"{len(checks) - len(failed)}/{len(checks)} boundary cases exact" +
           (f"; failed {failed}" if failed else ""))


TABLE = {
    "Prop": {"land", "pod", "udpstorm", "apache", "sendmail"},
    "LTL": {"neptune", "teardrop", "mscan", "httptunnel", "xsnoop"},
    "RASL": {"mailbomb", "ipsweep", "portscan"},
}


def test_04_table_conformance():
    sigs = all_signatures()
    got = {}
    for s in sigs:
        got.setdefault(str(s.minimal_logic), set()).add(s.attack)
    expected = dict(TABLE)
    expected["ITL"] = {s.attack for s in sigs} - set().union(*TABLE.values())
    tally = {k: len(v) for k, v in got.items()}
    ok = len(sigs) == 24 and len({s.attack for s in sigs}) == 24 and got == expected and len(expected["ITL"]) == 11
    record(4, ok, f"{len(sigs)} sets, tally {dict(sorted(tally.items()))}")


def test_05_default_corpus(default_corpus, generation_seconds, tmp_path):
    again = generate_corpus(GenConfig())
    a = _tree(write_corpus(default_corpus, tmp_path / "a"))
    b = _tree(write_corpus(again, tmp_path / "b"))
    failures = [r.id for r in default_corpus.records if check_record(r) is not None]
    attacks = sum(1 for r in default_corpus.records if r.label != "benign")
    ok = generation_seconds <= 120 and a == b and not failures and attacks == 1369
    record(5, ok, f"{len(default_corpus.records)} records ({attacks} attack) in {generation_seconds:.1f} s "
                  f"(limit 120 s); byte-identical rerun: {a == b}; {len(failures)} records fail re-verification")


def test_06_detection_hierarchy(default_report):
    c = compare(default_report).check("tp_hierarchy")
    record(6, c.passed, c.detail)


def test_07_zero_and_equality_facts(default_report):
    s = compare(default_report)
    checks = [s.check(n) for n in ("prop_zero_probing_u2r", "prop_dos_r2l", "u2r_itl_equals_rasl")]
    record(7, all(c.passed for c in checks), "; ".join(c.detail for c in checks))


def test_08_ltl_vs_prop(default_report):
    c = compare(default_report).check("ltl_vs_prop")
    record(8, c.passed, c.detail)


def test_09_precision_separation(default_report):
    decoy_hits = Counter((d.attack, d.logic) for d in default_report.detections
                         if d.record_id.startswith("decoy-"))
    parts, ok = [], True
    for a in DECOY_ATTACKS:
        r, i = decoy_hits[(a, Logic.RASL)], decoy_hits[(a, Logic.ITL)]
        ok = ok and r == 0 and i >= 1
        parts.append(f"{a} decoy FP RASL={r} ITL={i}")
    record(9, ok, "; ".join(parts))


def test_10_cost_ordering(default_report):
    s = compare(default_report)
    cost, stress = s.check("cost_ordering"), s.check("stress_top2")
    record(10, cost.passed and stress.passed, f"{cost.detail}; stress {stress.detail}")


def test_11_full_benchmark(tmp_path):
    start = time.monotonic()
    gen = subprocess.run([sys.executable, "-m", "mcids", "generate", "--seed", "42", "--out", str(tmp_path / "c")],
                         capture_output=True, text=True)
    bench = subprocess.run([sys.executable, "-m", "mcids", "bench", "--corpus", str(tmp_path / "c"),
                            "--out", str(tmp_path / "bench.csv")], capture_output=True, text=True)
    elapsed = time.monotonic() - start
    failing = [line.split(":")[0] for line in bench.stdout.splitlines() if line.startswith("FAIL")]
    ok = gen.returncode == 0 and bench.returncode == 0 and elapsed <= 600
    record(11, ok, f"generate+bench {elapsed:.0f} s (limit 600 s); generate exit {gen.returncode}, "
                   f"bench exit {bench.returncode}" + (f" (failing checks: {', '.join(failing)})" if failing else ""))


def test_12_round_trip_and_witnesses(default_report, default_corpus):
    encodings = [(s.attack, l, f) for s in all_signatures() for l, f in s.encodings.items()]
    trips = sum(parse_formula(format_formula(f), l) == f for _, l, f in encodings)
    bad = verify_detections(default_report, default_corpus)
    record(12, trips == len(encodings) and not bad,
           f"round trip {trips}/{len(encodings)} encodings; {len(default_report.detections) - len(bad)}/"
           f"{len(default_report.detections)} witnesses re-verify")
