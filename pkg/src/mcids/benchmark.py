"""Run every detection algorithm over a corpus and compare them.

For each logic and attack, the attack's encoding at that logic (if any) is
applied to the attack's own records (true positives) and to every benign and
decoy record (false positives).  Every signature sees a record through its own
ordinal tagger.  Cost columns come from the memoised evaluator's counters;
wall-clock columns are informational only.
"""

from __future__ import annotations

import csv
import io
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

from .corpus import BENIGN, Corpus, stress_trace
from .detector import detect, verify_witness
from .formula import Logic
from .signatures import ATTACK_IDS, Category, SignatureSet, all_signatures, prepare_trace

CSV_COLUMNS = (
    "key", "logic", "records_scanned", "true_positives", "false_positives",
    "tp_rate", "fp_rate", "mean_eval_count", "mean_wall_micros", "peak_memo_entries",
)
TIMING_COLUMNS = ("mean_wall_micros",)
TOTAL = "total"
STRESS_LENGTH = 40
STRESS_LOGICS = (Logic.ITL, Logic.RASL)
HEAVY = ("ipsweep", "portscan")


@dataclass
class Row:
    key: str
    logic: Logic
    records_scanned: int = 0
    true_positives: int = 0
    false_positives: int = 0
    positives: int = 0  # attack records of this key
    negatives_scanned: int = 0
    scans: int = 0
    eval_total: int = 0
    wall_total: float = 0.0
    peak_memo_entries: int = 0

    @property
    def tp_rate(self) -> float:
        return self.true_positives / self.positives if self.positives else 0.0

    @property
    def fp_rate(self) -> float:
        return self.false_positives / self.negatives_scanned if self.negatives_scanned else 0.0

    @property
    def mean_eval_count(self) -> float:
        return self.eval_total / self.scans if self.scans else 0.0

    @property
    def mean_wall_micros(self) -> float:
        return self.wall_total * 1e6 / self.scans if self.scans else 0.0

    def absorb(self, other: "Row") -> None:
        self.records_scanned += other.records_scanned
        self.true_positives += other.true_positives
        self.false_positives += other.false_positives
        self.positives += other.positives
        self.negatives_scanned += other.negatives_scanned
        self.scans += other.scans
        self.eval_total += other.eval_total
        self.wall_total += other.wall_total
        self.peak_memo_entries = max(self.peak_memo_entries, other.peak_memo_entries)


@dataclass(frozen=True)
class Detection:
    record_id: str
    attack: str
    logic: Logic
    witness: object
    true_positive: bool


@dataclass
class BenchReport:
    rows: Dict[Tuple[str, Logic], Row]
    logics: Tuple[Logic, ...]
    seed: Optional[int]
    manifest_hash: Optional[str]
    short_circuit: bool
    detections: List[Detection] = field(default_factory=list)
    stress_eval_counts: Dict[Tuple[str, Logic], int] = field(default_factory=dict)

    def row(self, key: str, logic: Logic) -> Row:
        return self.rows[(key, Logic(logic))]

    def keys(self) -> List[str]:
        return list(ATTACK_IDS) + [str(c) for c in Category] + [TOTAL]


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    detail: str

    def line(self) -> str:
        return f"{'PASS' if self.passed else 'FAIL'}  {self.name}: {self.detail}"


@dataclass(frozen=True)
class ComparisonSummary:
    checks: Tuple[Check, ...]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def check(self, name: str) -> Check:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def text(self) -> str:
        return "\n".join(c.line() for c in self.checks)


# --------------------------------------------------------------------------
# running


def _scan(trace, enc, logic, short_circuit, timed):
    start = time.perf_counter() if timed else 0.0
    res = detect(trace, enc, logic, short_circuit=short_circuit)
    wall = time.perf_counter() - start if timed else 0.0
    return res, wall


def _attack_rows(job):
    s, logic, positives, negatives, short_circuit, timed = job
    row = Row(s.attack, logic, positives=len(positives))
    found: List[Detection] = []
    enc = s.encoding(logic)
    if enc is None:
        return row, found
    for records, is_attack in ((positives, True), (negatives, False)):
        for rec in records:
            res, wall = _scan(prepare_trace(rec.trace, s), enc, logic, short_circuit, timed)
            row.records_scanned += 1
            row.scans += 1
            row.eval_total += res.stats.eval_count
            row.wall_total += wall
            row.peak_memo_entries = max(row.peak_memo_entries, res.stats.memo_entries)
            if not is_attack:
                row.negatives_scanned += 1
            if res.detected:
                if is_attack:
                    row.true_positives += 1
                else:
                    row.false_positives += 1
                found.append(Detection(rec.id, s.attack, logic, res.witness, is_attack))
    return row, found


def stress_eval_counts(
    signatures: Sequence[SignatureSet], logics: Iterable[Logic] = STRESS_LOGICS, length: int = STRESS_LENGTH
) -> Dict[Tuple[str, Logic], int]:
    """Non-short-circuit eval_count of each encoding on a same-length record of its own attack."""
    out = {}
    for s in signatures:
        tr = stress_trace(s.attack, length)
        for logic in logics:
            enc = s.encoding(logic)
            if enc is not None:
                out[(s.attack, Logic(logic))] = detect(tr, enc, logic, short_circuit=False).stats.eval_count
    return out


def run_bench(
    corpus: Corpus,
    signatures: Optional[Sequence[SignatureSet]] = None,
    logics: Iterable[Logic] = tuple(Logic),
    non_short_circuit: bool = True,
    threads: int = 1,
    stress: bool = True,
) -> BenchReport:
    """Scan the corpus with every signature at every requested logic.

    With ``threads > 1`` the counting pass runs in worker processes and the
    timing pass is repeated single-threaded afterwards.
    """
    signatures = list(signatures) if signatures is not None else all_signatures()
    logics = tuple(sorted({Logic(l) for l in logics}))
    short_circuit = not non_short_circuit
    negatives = [r for r in corpus.records if r.label == BENIGN]
    jobs = []
    for logic in logics:
        for s in signatures:
            positives = [r for r in corpus.records if r.label == s.attack]
            jobs.append((s, logic, positives, negatives, short_circuit, threads <= 1))
    if threads > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(threads) as pool:
            results = list(pool.map(_attack_rows, jobs))
        for (row, _), job in zip(results, jobs):
            timing, _ = _attack_rows(job[:-1] + (True,))
            row.wall_total = timing.wall_total
    else:
        results = [_attack_rows(job) for job in jobs]

    rows: Dict[Tuple[str, Logic], Row] = {}
    detections: List[Detection] = []
    for row, found in results:
        rows[(row.key, row.logic)] = row
        detections.extend(found)
    by_attack = {s.attack: s for s in signatures}
    n_attack_records = sum(1 for r in corpus.records if r.label != BENIGN)
    for logic in logics:
        for cat in Category:
            agg = Row(str(cat), logic)
            for a in ATTACK_IDS:
                if a in by_attack and by_attack[a].category == cat and (a, logic) in rows:
                    agg.absorb(rows[(a, logic)])
            rows[(str(cat), logic)] = agg
        total = Row(TOTAL, logic)
        for cat in Category:
            total.absorb(rows[(str(cat), logic)])
        # the detector as a whole: a negative record is one false alarm however many signatures fire
        flagged = {d.record_id for d in detections if d.logic == logic and not d.true_positive}
        total.false_positives = len(flagged)
        total.negatives_scanned = len(negatives)
        total.records_scanned = n_attack_records + len(negatives)
        total.positives = n_attack_records
        rows[(TOTAL, logic)] = total

    report = BenchReport(
        rows=rows,
        logics=logics,
        seed=corpus.manifest.get("seed"),
        manifest_hash=corpus.manifest.get("records_sha256"),
        short_circuit=short_circuit,
        detections=detections,
    )
    if stress:
        report.stress_eval_counts = stress_eval_counts(signatures, [l for l in STRESS_LOGICS if l in logics])
    return report


def verify_detections(report: BenchReport, corpus: Corpus, signatures=None) -> List[Detection]:
    """Detections whose witness does not re-verify under the reference evaluator."""
    by_id = {r.id: r for r in corpus.records}
    by_attack = {s.attack: s for s in (signatures or all_signatures())}
    bad = []
    for d in report.detections:
        s = by_attack[d.attack]
        tr = prepare_trace(by_id[d.record_id].trace, s)
        if not verify_witness(tr, s.encoding(d.logic), d.logic, d.witness):
            bad.append(d)
    return bad


# --------------------------------------------------------------------------
# comparison


def _tp(report, key, logic) -> int:
    return report.row(key, logic).true_positives


def compare(report: BenchReport) -> ComparisonSummary:
    """Check the ordering, zero and equality facts the benchmark is built to exhibit."""
    missing = [l for l in Logic if l not in report.logics]
    if missing:
        return ComparisonSummary((Check("coverage", False, f"report lacks {', '.join(map(str, missing))}"),))
    P, L, I, R = Logic.PROP, Logic.LTL, Logic.ITL, Logic.RASL
    checks = []

    tp = {l: _tp(report, TOTAL, l) for l in Logic}
    checks.append(Check(
        "tp_hierarchy",
        tp[R] > tp[I] > tp[L] > tp[P],
        f"total TP RASL={tp[R]} ITL={tp[I]} LTL={tp[L]} Prop={tp[P]} (strict RASL > ITL > LTL > Prop)",
    ))

    prop = {str(c): _tp(report, str(c), P) for c in Category}
    sendmail = _tp(report, "sendmail", P)
    checks.append(Check(
        "prop_zero_probing_u2r",
        prop["Probing"] == 0 and prop["U2R"] == 0,
        f"Prop TP Probing={prop['Probing']} U2R={prop['U2R']}",
    ))
    checks.append(Check(
        "prop_dos_r2l",
        prop["DOS"] > 0 and prop["R2L"] > 0 and prop["R2L"] == sendmail,
        f"Prop TP DOS={prop['DOS']} R2L={prop['R2L']} (sendmail={sendmail})",
    ))
    u2r_i, u2r_r = _tp(report, "U2R", I), _tp(report, "U2R", R)
    checks.append(Check("u2r_itl_equals_rasl", u2r_i == u2r_r, f"U2R TP ITL={u2r_i} RASL={u2r_r}"))

    checks.append(Check("ltl_vs_prop", tp[L] >= 2 * tp[P], f"LTL TP {tp[L]} vs 2 x Prop TP {2 * tp[P]}"))

    parts, ok = [], True
    for a in ("mailbomb", "ipsweep", "portscan"):
        fr, fi = report.row(a, R).false_positives, report.row(a, I).false_positives
        ok = ok and fr == 0 and fi >= 1
        parts.append(f"{a} RASL FP={fr} ITL FP={fi}")
    checks.append(Check("precision_separation", ok, "; ".join(parts)))

    shared = [
        a for a in ATTACK_IDS
        if all((a, l) in report.rows and report.row(a, l).scans for l in (L, I, R))
    ]
    mean = {}
    for l in (L, I, R):
        agg = Row("shared", l)
        for a in shared:
            agg.absorb(report.row(a, l))
        mean[l] = agg.mean_eval_count
    checks.append(Check(
        "cost_ordering",
        mean[R] >= mean[I] >= mean[L],
        f"mean eval_count over {len(shared)} shared attacks RASL={mean[R]:.1f} ITL={mean[I]:.1f} LTL={mean[L]:.1f}",
    ))

    if report.stress_eval_counts:
        parts, ok = [], True
        for l in STRESS_LOGICS:
            ranked = sorted(
                ((c, a) for (a, ll), c in report.stress_eval_counts.items() if ll == l), reverse=True
            )
            top = [a for _, a in ranked[:2]]
            ok = ok and sorted(top) == sorted(HEAVY)
            parts.append(f"{l} top-2 " + ", ".join(f"{a}={c}" for c, a in ranked[:3]))
        checks.append(Check("stress_top2", ok, "; ".join(parts)))
    return ComparisonSummary(tuple(checks))


# --------------------------------------------------------------------------
# output


def _fmt(x) -> str:
    if isinstance(x, float):
        return f"{x:.6f}"
    return str(x)


def report_rows(report: BenchReport) -> List[List[str]]:
    out = []
    for logic in report.logics:
        for key in report.keys():
            row = report.rows.get((key, logic))
            if row is None:
                continue
            out.append([
                key, str(logic), row.records_scanned, row.true_positives, row.false_positives,
                row.tp_rate, row.fp_rate, row.mean_eval_count, row.mean_wall_micros, row.peak_memo_entries,
            ])
    return [[_fmt(x) for x in r] for r in out]


def csv_text(report: BenchReport, include_timing: bool = True) -> str:
    cols = [c for c in CSV_COLUMNS if include_timing or c not in TIMING_COLUMNS]
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(cols)
    for r in report_rows(report):
        w.writerow([v for c, v in zip(CSV_COLUMNS, r) if c in cols])
    return buf.getvalue()


def write_csv(report: BenchReport, path: Union[str, Path], include_timing: bool = True) -> Path:
    p = Path(path)
    p.write_text(csv_text(report, include_timing), encoding="utf-8")
    return p


def summary_table(report: BenchReport) -> str:
    keys = [str(c) for c in Category] + [TOTAL]
    head = f"{'key':<10}" + "".join(f"{str(l):>14}" for l in report.logics)
    lines = [head, "-" * len(head)]
    for key in keys:
        cells = []
        for l in report.logics:
            row = report.rows[(key, l)]
            cells.append(f"{row.true_positives:>6} TP {row.false_positives:>3} FP")
        lines.append(f"{key:<10}" + "".join(f"{c:>14}" for c in cells))
    return "\n".join(lines)
