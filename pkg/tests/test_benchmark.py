import csv

import pytest

from mcids.benchmark import (
    CSV_COLUMNS,
    TOTAL,
    compare,
    csv_text,
    run_bench,
    summary_table,
    verify_detections,
    write_csv,
)
from mcids.corpus import GenConfig, generate_corpus
from mcids.formula import Logic
from mcids.signatures import ATTACK_IDS, Category, all_signatures

SMALL = GenConfig(seed=11, counts={a: 2 for a in ATTACK_IDS}, benign_count=4, decoys_per_attack=1)


@pytest.fixture(scope="module")
def small_corpus():
    return generate_corpus(SMALL)


@pytest.fixture(scope="module")
def small_report(small_corpus):
    return run_bench(small_corpus, stress=False)


def test_empty_logics_gives_header_only(small_corpus, tmp_path):
    report = run_bench(small_corpus, logics=[], stress=False)
    path = write_csv(report, tmp_path / "r.csv")
    assert path.read_text() == ",".join(CSV_COLUMNS) + "\n"


def test_csv_layout(small_report, tmp_path):
    text = write_csv(small_report, tmp_path / "r.csv").read_text()
    assert text.endswith("\n")
    rows = list(csv.DictReader(text.splitlines()))
    assert list(rows[0]) == list(CSV_COLUMNS)
    assert len(rows) == 4 * (24 + 4 + 1)
    keys = {r["key"] for r in rows}
    assert {str(c) for c in Category} <= keys and TOTAL in keys
    assert all("," not in r["tp_rate"] and float(r["tp_rate"]) <= 1 for r in rows)


def test_counts_are_deterministic(small_corpus, small_report):
    again = run_bench(small_corpus, stress=False)
    assert csv_text(again, include_timing=False) == csv_text(small_report, include_timing=False)


def test_parallel_counts_match(small_corpus, small_report):
    par = run_bench(small_corpus, threads=2, stress=False)
    assert csv_text(par, include_timing=False) == csv_text(small_report, include_timing=False)
    assert all(row.wall_total > 0 for row in par.rows.values() if row.scans)


def test_category_rows_are_sums(small_report):
    sigs = all_signatures()
    for logic in Logic:
        for cat in Category:
            members = [s.attack for s in sigs if s.category == cat]
            row = small_report.row(str(cat), logic)
            assert row.true_positives == sum(small_report.row(a, logic).true_positives for a in members)
            assert row.false_positives == sum(small_report.row(a, logic).false_positives for a in members)
            assert row.records_scanned == sum(small_report.row(a, logic).records_scanned for a in members)


def test_rates(small_report):
    for row in small_report.rows.values():
        if row.positives:
            assert row.tp_rate == row.true_positives / row.positives
        assert 0 <= row.fp_rate <= 1


def test_undetectable_rows_are_zero(small_report):
    for a in ("ipsweep", "portscan", "nmap", "satan", "mscan", "smurf"):
        row = small_report.row(a, Logic.PROP)
        assert row.records_scanned == row.true_positives == row.scans == 0


def test_compare_needs_every_logic(small_corpus):
    report = run_bench(small_corpus, logics=[Logic.PROP, Logic.LTL], stress=False)
    summary = compare(report)
    assert not summary.passed and summary.checks[0].name == "coverage"


def test_metadata(small_corpus, small_report):
    assert small_report.seed == 11
    assert small_report.manifest_hash == small_corpus.manifest["records_sha256"]
    assert small_report.short_circuit is False
    assert "total" in summary_table(small_report)


# -- default corpus ----------------------------------------------------------


def test_zero_equality_and_ordering_facts(default_report):
    summary = compare(default_report)
    for name in ("prop_zero_probing_u2r", "prop_dos_r2l", "u2r_itl_equals_rasl", "ltl_vs_prop",
                 "precision_separation", "cost_ordering"):
        assert summary.check(name).passed, summary.check(name).line()
    assert default_report.row("sendmail", Logic.PROP).true_positives > 0


def test_every_witness_reverifies(default_report, default_corpus):
    assert default_report.detections
    assert verify_detections(default_report, default_corpus) == []


def test_conservativity(default_report):
    sigs = {s.attack: s for s in all_signatures()}
    found = {(d.record_id, d.attack, d.logic) for d in default_report.detections}
    for rid, attack, logic in found:
        s = sigs[attack]
        for stronger in Logic:
            if stronger > logic and s.encodings.get(stronger) == s.encodings[logic]:
                assert (rid, attack, stronger) in found, (rid, attack, logic, stronger)


def test_totals(default_report):
    tp = {l: default_report.row(TOTAL, l).true_positives for l in Logic}
    assert tp[Logic.PROP] == 9 + 87 + 2 + 100 + 17
    assert tp[Logic.RASL] == 1369
    assert tp[Logic.ITL] >= tp[Logic.RASL]  # time erasure can only add matches
