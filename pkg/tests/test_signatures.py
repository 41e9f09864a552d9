from collections import Counter

import pytest

from mcids.formula import Logic, format_formula, parse_formula, validate_for_logic
from mcids.semantics import eval_prop, eval_rasl
from mcids.signatures import (
    ATTACK_IDS,
    Category,
    all_signatures,
    export_signatures,
    load_signature_file,
    parse_signature_text,
    prepare_trace,
    registry_covers,
    signature,
    signature_file_text,
    tag_ordinals,
    weaken,
)
from mcids.trace import Event, Trace, whole

# Minimal logic of every attack, written out independently of the library.
EXPECTED_MINIMAL = {
    "land": "Prop", "pod": "Prop", "udpstorm": "Prop", "apache": "Prop", "sendmail": "Prop",
    "neptune": "LTL", "teardrop": "LTL", "mscan": "LTL", "httptunnel": "LTL", "xsnoop": "LTL",
    "mailbomb": "RASL", "ipsweep": "RASL", "portscan": "RASL",
    "smurf": "ITL", "nmap": "ITL", "satan": "ITL", "buffer_overflow": "ITL", "rootkit": "ITL",
    "xterm": "ITL", "warezmaster": "ITL", "warezclient": "ITL", "ftp_write": "ITL", "phf": "ITL",
    "imap": "ITL",
}

EXPECTED_CATEGORY = {
    **dict.fromkeys(["smurf", "neptune", "land", "teardrop", "pod", "mailbomb", "udpstorm", "apache"], "DOS"),
    **dict.fromkeys(["ipsweep", "portscan", "nmap", "satan", "mscan"], "Probing"),
    **dict.fromkeys(["buffer_overflow", "rootkit", "httptunnel", "xterm"], "U2R"),
    **dict.fromkeys(["warezmaster", "warezclient", "ftp_write", "phf", "imap", "sendmail", "xsnoop"], "R2L"),
}


def test_library_shape():
    sigs = all_signatures()
    assert [s.attack for s in sigs] == list(ATTACK_IDS)
    assert len(set(ATTACK_IDS)) == 24
    assert Counter(str(s.minimal_logic) for s in sigs) == {"Prop": 5, "LTL": 5, "ITL": 11, "RASL": 3}
    assert Counter(str(s.category) for s in sigs) == {"DOS": 8, "Probing": 5, "U2R": 4, "R2L": 7}


@pytest.mark.parametrize("attack", ATTACK_IDS)
def test_assignment(attack):
    s = signature(attack)
    assert str(s.minimal_logic) == EXPECTED_MINIMAL[attack]
    assert str(s.category) == EXPECTED_CATEGORY[attack]


@pytest.mark.parametrize("attack", ATTACK_IDS)
def test_encodings_validate_and_cover_registry(attack):
    s = signature(attack)
    assert s.minimal_logic in s.encodings
    for logic, f in s.encodings.items():
        assert validate_for_logic(f, logic) == []
    for logic in Logic:
        if logic >= s.minimal_logic:
            assert s.encodings[logic] == s.encodings[s.minimal_logic]
            assert s.kinds[logic] == "conservative"
    assert registry_covers(s)
    for t in s.thresholds.values():
        assert t.unit in {"seconds", "bytes", "count", "port", "formula"}


def test_weakening_kinds():
    for s in all_signatures():
        weaker = {l: k for l, k in s.kinds.items() if l < s.minimal_logic}
        assert Logic.PROP not in weaker  # nothing temporal has a propositional encoding
        if s.minimal_logic == Logic.RASL:
            assert weaker == {Logic.ITL: "over"}
        elif s.minimal_logic == Logic.ITL:
            assert weaker == {Logic.LTL: "under"}
        else:
            assert weaker == {}


def test_pod_text_and_thresholds():
    s = signature("pod")
    assert s.minimal_logic == Logic.PROP
    assert s.text(Logic.PROP) == "m.size > 65536"
    assert signature("apache").thresholds["range_limit"].value == 5
    assert signature("sendmail").thresholds["size_limit"].value == 256
    assert signature("xterm").thresholds["window_limit"].value == 65535
    assert signature("imap").thresholds["literal"].value == -1
    h = signature("httptunnel").thresholds
    assert (h["sport_lo"].value, h["sport_hi"].value, h["tunnel_port"].value) == (1024, 65535, 80)


def test_mailbomb_per_pair_threshold():
    s = signature("mailbomb")
    assert s.minimal_logic == Logic.RASL
    assert s.thresholds["gap"].value == 0.01 and s.thresholds["gap"].unit == "seconds"
    assert s.text(Logic.RASL).count(";[x<0.01]") == 9


def test_weaken():
    erased = weaken(signature("mailbomb"), Logic.ITL)
    expected = parse_formula(signature("mailbomb").text(Logic.RASL).replace(";[x<0.01]", ";"))
    assert erased == expected
    assert weaken(signature("smurf"), Logic.PROP) is None
    with pytest.raises(ValueError):
        weaken(signature("land"), Logic.PROP)


def test_overrides():
    s = signature("pod", size_limit=100)
    assert eval_prop(s.encodings[Logic.PROP], Event(0, attrs={"m.size": 101}))
    assert signature("pod").thresholds["size_limit"].value == 65536
    with pytest.raises(KeyError):
        signature("pod", nonsense=1)


def test_ipsweep_window():
    s = signature("ipsweep")
    events = [Event(i * 0.001, {"icmp.echo_request"}, {"dst": f"h{i}"}) for i in range(10)]
    tr = prepare_trace(Trace(events), s)
    assert eval_rasl(s.encodings[Logic.RASL], whole(tr))
    slow = prepare_trace(Trace([Event(i * 0.5, e.props, e.attrs) for i, e in enumerate(events)]), s)
    assert not eval_rasl(s.encodings[Logic.RASL], whole(slow))
    assert eval_rasl(s.encodings[Logic.ITL], whole(slow))


def test_tagger_counts_distinct_keys():
    events = [Event(i, {"tcp.syn_probe"}, {"dport": port}) for i, port in enumerate([1, 2, 2, 3])]
    tagged = tag_ordinals(Trace(events), "portscan")
    assert [sorted(p for p in e.props if p.startswith("q")) for e in tagged] == [["q1"], ["q2"], ["q1"], ["q2"]]
    assert tag_ordinals(tagged, "portscan") == tagged


def test_tagger_restarts_after_ten():
    tr = Trace([Event(i, {"mail.recieve"}) for i in range(12)])
    tags = [next(p for p in e.props if p != "mail.recieve") for e in tag_ordinals(tr, "mail")]
    assert tags == [f"p{i}" for i in range(1, 11)] + ["p1", "p2"]


@pytest.mark.parametrize("attack", ATTACK_IDS)
def test_round_trip(attack):
    s = signature(attack)
    for logic, f in s.encodings.items():
        assert parse_formula(format_formula(f), logic) == f
        name, lg, values, g = parse_signature_text(signature_file_text(s, logic))
        assert (name, lg, g) == (attack, logic, f)
        assert values == {k: t.value for k, t in s.thresholds.items()}


def test_header_overrides_threshold():
    text = signature_file_text(signature("httptunnel"), Logic.LTL).replace("tunnel_port=80", "tunnel_port=8080")
    _, _, values, f = parse_signature_text(text)
    assert values["tunnel_port"] == 8080
    assert f == signature("httptunnel", tunnel_port=8080).encodings[Logic.LTL]


def test_export(tmp_path):
    written = export_signatures(tmp_path)
    assert len(written) == sum(len(s.encodings) for s in all_signatures())
    attack, logic, _, f = load_signature_file(tmp_path / "pod.prop.sig")
    assert (attack, logic, f) == ("pod", Logic.PROP, signature("pod").encodings[Logic.PROP])


def test_malformed_signature_file():
    with pytest.raises(ValueError):
        parse_signature_text("attack: pod\nm.size > 1\n")
    with pytest.raises(ValueError):
        parse_signature_text("attack: pod\nlevel: Prop\nthresholds:\nm.size > 1\n")


def test_categories_are_enum():
    assert {c.value for c in Category} == {"DOS", "Probing", "U2R", "R2L"}
