"""Built-in library of 24 attack signatures.

Each :class:`SignatureSet` holds DSL templates (``${name}`` placeholders are
filled from the signature's thresholds), the weakest logic in which the attack
is faithfully expressible, and optional lossy encodings for weaker logics:

* RASL -> ITL weakenings erase every elapsed-time constraint and therefore
  over-approximate (they also match slow, harmless sequences);
* ITL -> LTL weakenings replace chop sequences by adjacent ``X`` chains and
  therefore under-approximate (they miss spread-out sequences);
* nothing temporal has a propositional encoding.

Stronger logics reuse the minimal encoding unchanged.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from string import Template
from types import MappingProxyType
from typing import Dict, Mapping, Optional, Tuple, Union

from .formula import Formula, Logic, atoms, attributes, check_logic, erase_timing, parse_formula
from .trace import Event, Trace

ATTACK_IDS = (
    "smurf", "neptune", "land", "teardrop", "pod", "mailbomb", "udpstorm", "apache",
    "ipsweep", "portscan", "nmap", "satan", "mscan",
    "buffer_overflow", "rootkit", "httptunnel", "xterm",
    "warezmaster", "warezclient", "ftp_write", "phf", "imap", "sendmail", "xsnoop",
)


class Category(str, Enum):
    DOS = "DOS"
    PROBING = "Probing"
    U2R = "U2R"
    R2L = "R2L"

    def __str__(self) -> str:
        return self.value


OVER = "over"
UNDER = "under"
CONSERVATIVE = "conservative"


@dataclass(frozen=True)
class Threshold:
    value: Union[int, float, str]
    unit: str

    def render(self) -> str:
        return str(self.value)


@dataclass(frozen=True)
class SignatureSet:
    attack: str
    category: Category
    minimal_logic: Logic
    encodings: Mapping[Logic, Formula]
    kinds: Mapping[Logic, str]
    thresholds: Mapping[str, Threshold]
    templates: Mapping[Logic, str]
    propositions: Mapping[str, str]
    tagger: Optional[str] = None
    study: Optional[Formula] = None

    def encoding(self, logic: Logic) -> Optional[Formula]:
        return self.encodings.get(Logic(logic))

    def text(self, logic: Logic) -> str:
        return Template(self.templates[Logic(logic)]).substitute(
            {k: t.render() for k, t in self.thresholds.items()}
        )

    def __reduce__(self):
        # read-only mappings do not pickle; rebuild from the attack id and thresholds
        return (_rebuild, (self.attack, {k: t.value for k, t in self.thresholds.items()}))


# --------------------------------------------------------------------------
# Definitions

_ORD_P = {f"p{i}": f"probe/mail event ranked {i} in the current run" for i in range(1, 11)}
_ORD_Q = {f"q{i}": f"port probe ranked {i} in the current run" for i in range(1, 11)}


def _chain(names, sep=" ; "):
    return sep.join(names)


def _xchain(parts):
    out = parts[-1]
    for p in reversed(parts[:-1]):
        out = f"{p} & X({out})"
    return out


_NMAP_PHI1 = (
    "(attacked.recieve.ICMP_echo_request | attacked.recieve.TCPSYN & port = 443"
    " | attacked.recieve.TCPACK & port = 80 | attacked.recieve.ICMP_timestamp_request)"
)
_NMAP_PHI2 = (
    "(attacked.recieve.SYN | attacked.recieve.ACK | attacked.recieve.TCPFIN"
    " | attacked.recieve.TCP.flags.FINURGPUSH = 1 | attacked.recieve.TCP.flags = 0"
    " | attacked.port.UDP.recieve.ICMP)"
)
_NMAP_F78 = "(Exclusionlist.check.status.open | Exclusionlist.check.status.openfiltered)"
_NMAP_F910 = "(port.TCP.TCPconnect | port.UDP.recieve.nmapserviecesprobes)"
_NMAP_PHI3 = f"({_NMAP_F78} & <>{_NMAP_F910})"
_NMAP_PHI4 = (
    "((port.open.recieve.TCP | port.open.recieve.UDP | port.open.recieve.ICMP)"
    " & (port.closed.recieve.TCP | port.closed.recieve.UDP | port.closed.recieve.ICMP))"
)

_SATAN = {f"f{i}": f"(true ; {name})" for i, name in enumerate(
    [
        "attacked.nslookuped_program",
        "attacked.portmapped_program",
        "attacked.showmount_program",
        "attacked.fingered.scanned_program",
        "attacked.TCP.scanned_program",
        "attacked.UDP.scanned_program",
        "attacked.activeservices.scanned_program",
    ],
    start=1,
)}
_SATAN_PHI1 = "({f1} | {f2} | {f3})".format(**_SATAN)
_SATAN_PHI2 = "(({f1} | {f2} | {f2} & {f3}) & ({f4} | {f5} | {f6}))".format(**_SATAN)
_SATAN_PHI3 = "({phi2} & {f7})".format(phi2=_SATAN_PHI2, **_SATAN)
_SATAN_LOW = "(attacked.nslookuped_program | attacked.portmapped_program | attacked.showmount_program)"

_MSCAN_BODY = " | ".join(
    [
        "attacked.receieve.SYN & port = 113",
        "attacked.receieve.SYN & port = 21",
        "attacked.receieve.SYN & port = 389",
        "attacked.receieve.SYN & port = 443",
        "attacked.receieve.TCP.flags.FINURGPUSH = 1 & port = 443",
        "attacked.receieve.TCP.flags = 0 & port = 443",
        "attacked.port.UDP.receive.ICMP & port = 971",
        "attacked.receieve.TCP.portmapper & port = 135",
        "attacked.receieve.nfsd.exportfs",
        "(attacked.receieve.samba | attacked.receieve.netbios)",
        "attacked.receieve.finger & port = 79",
        "(port.open.receive.TCP | port.open.receive.UCP | port.open.receive.ICMP)"
        " & (port.closed.receive.TCP | port.closed.receive.UCP | port.closed.ICMP)",
    ]
)

_XTERM_DISJ = (
    "(Attack.receive.escape.threshold > ${window_limit} | Banner.modifed.FTP | Banner.modifed.TELNET"
    " | Syslog.modifed | Syslog.Symlinked | p)"
)

_FTP_CREATE = '(attacked.create.file & file.p = "rhosts")'

_WAREZ = ["account.guest.login_program", "hiddendirectory.created_program", "uploadwarez_program"]

_DEFS = {
    # ---- DOS ---------------------------------------------------------------
    "smurf": dict(
        category=Category.DOS,
        minimal=Logic.ITL,
        templates={
            Logic.ITL: "!attacked.send & (true ; attacked.recieve)*",
            Logic.LTL: "attacked.recieve & X attacked.recieve & !attacked.send",
        },
        props={"attacked.send": "victim emits a packet", "attacked.recieve": "victim takes in a packet"},
    ),
    "neptune": dict(
        category=Category.DOS,
        minimal=Logic.LTL,
        templates={
            Logic.LTL: "attacked.recieve.SYN & <>attacked.send.SYNACK & [](!attacked.recieve.ACK)",
        },
        props={
            "attacked.recieve.SYN": "connection request arrives",
            "attacked.send.SYNACK": "victim acknowledges the request",
            "attacked.recieve.ACK": "handshake completed by the peer",
        },
    ),
    "land": dict(
        category=Category.DOS,
        minimal=Logic.PROP,
        templates={Logic.PROP: "attacked.recieve & p"},
        props={"attacked.recieve": "victim takes in a packet", "p": "source and destination both equal the victim"},
    ),
    "teardrop": dict(
        category=Category.DOS,
        minimal=Logic.LTL,
        templates={
            Logic.LTL: "m1.FragmentOffset = 0 & (let N := m1.TotalLength in <>(m2.FragmentOffset < N))",
        },
        props={
            "m1.FragmentOffset": "offset of the first fragment (attribute)",
            "m1.TotalLength": "length of the first fragment (attribute)",
            "m2.FragmentOffset": "offset of a later fragment (attribute)",
        },
    ),
    "pod": dict(
        category=Category.DOS,
        minimal=Logic.PROP,
        templates={Logic.PROP: "m.size > ${size_limit}"},
        thresholds={"size_limit": Threshold(65536, "bytes")},
        props={"m.size": "size of a reassembled packet (attribute)"},
    ),
    "mailbomb": dict(
        category=Category.DOS,
        minimal=Logic.RASL,
        templates={
            Logic.RASL: "(" + _chain([f"p{i}" for i in range(1, 11)], " ;[x<${gap}] ") + ")*",
        },
        thresholds={"gap": Threshold(0.01, "seconds")},
        props=_ORD_P,
        tagger="mail",
    ),
    "udpstorm": dict(
        category=Category.DOS,
        minimal=Logic.PROP,
        templates={
            Logic.PROP: "attacked.receive.udp & (forall i in sender: sender = i -> "
            "(let tp := attacked.port in udp.port != tp))",
        },
        props={
            "attacked.receive.udp": "victim takes in a datagram",
            "sender": "subnet host that sent the datagram (attribute)",
            "attacked.port": "victim port (attribute)",
            "udp.port": "sender port (attribute)",
        },
    ),
    "apache": dict(
        category=Category.DOS,
        minimal=Logic.PROP,
        templates={
            Logic.PROP: "p & attacked.receive.http.range > ${range_limit}"
            " | attacked.receive.http.accept_encoding = 1",
        },
        thresholds={"range_limit": Threshold(5, "count")},
        props={
            "p": "web request arrives",
            "attacked.receive.http.range": "number of ranges in the request (attribute)",
            "attacked.receive.http.accept_encoding": "request carries an encoding header (attribute)",
        },
    ),
    # ---- Probing -----------------------------------------------------------
    "ipsweep": dict(
        category=Category.PROBING,
        minimal=Logic.RASL,
        templates={Logic.RASL: "(" + _chain([f"p{i}" for i in range(1, 11)]) + ") & Tf < ${window}"},
        thresholds={"window": Threshold(0.01, "seconds")},
        study="!([](" + _chain([f"p{i}" for i in range(1, 10)]) + " ;[x>=${window}] p10))",
        props=_ORD_P,
        tagger="ipsweep",
    ),
    "portscan": dict(
        category=Category.PROBING,
        minimal=Logic.RASL,
        templates={Logic.RASL: "(" + _chain([f"q{i}" for i in range(1, 11)]) + ") & Tf < ${window}"},
        thresholds={"window": Threshold(0.01, "seconds")},
        study="!([](" + _chain([f"q{i}" for i in range(1, 10)]) + " ;[x>=${window}] q10))",
        props=_ORD_Q,
        tagger="portscan",
    ),
    "nmap": dict(
        category=Category.PROBING,
        minimal=Logic.ITL,
        templates={
            Logic.ITL: f"({_NMAP_PHI1} ; {_NMAP_PHI2} ; {_NMAP_PHI3} ; {_NMAP_PHI4}) ; ${{anyother}}",
            Logic.LTL: _xchain([_NMAP_PHI1, _NMAP_PHI2, _NMAP_F78, _NMAP_F910, _NMAP_PHI4]),
        },
        thresholds={"anyother": Threshold("true", "formula")},
        props={
            **{a: "host-discovery probe" for a in (
                "attacked.recieve.ICMP_echo_request", "attacked.recieve.TCPSYN",
                "attacked.recieve.TCPACK", "attacked.recieve.ICMP_timestamp_request", "port")},
            **{a: "port-scan probe" for a in (
                "attacked.recieve.SYN", "attacked.recieve.ACK", "attacked.recieve.TCPFIN",
                "attacked.recieve.TCP.flags.FINURGPUSH", "attacked.recieve.TCP.flags",
                "attacked.port.UDP.recieve.ICMP")},
            **{a: "version-detection step" for a in (
                "Exclusionlist.check.status.open", "Exclusionlist.check.status.openfiltered",
                "port.TCP.TCPconnect", "port.UDP.recieve.nmapserviecesprobes")},
            **{a: "OS-fingerprint probe" for a in (
                "port.open.recieve.TCP", "port.open.recieve.UDP", "port.open.recieve.ICMP",
                "port.closed.recieve.TCP", "port.closed.recieve.UDP", "port.closed.recieve.ICMP")},
        },
    ),
    "satan": dict(
        category=Category.PROBING,
        minimal=Logic.ITL,
        templates={
            Logic.ITL: f"{_SATAN_PHI1} | {_SATAN_PHI2} | {_SATAN_PHI3}",
            Logic.LTL: f"{_SATAN_LOW} & X {_SATAN_LOW}",
        },
        props={
            "attacked.nslookuped_program": "name-service lookup scan",
            "attacked.portmapped_program": "portmap scan",
            "attacked.showmount_program": "mount-table scan",
            "attacked.fingered.scanned_program": "finger scan",
            "attacked.TCP.scanned_program": "TCP service scan",
            "attacked.UDP.scanned_program": "UDP service scan",
            "attacked.activeservices.scanned_program": "active-service scan",
        },
    ),
    "mscan": dict(
        category=Category.PROBING,
        minimal=Logic.LTL,
        templates={Logic.LTL: f"[]({_MSCAN_BODY})"},
        props={a: "scan probe" for a in re.findall(r"[A-Za-z_][A-Za-z0-9_.]*", _MSCAN_BODY)},
    ),
    # ---- U2R ---------------------------------------------------------------
    "buffer_overflow": dict(
        category=Category.U2R,
        minimal=Logic.ITL,
        templates={
            Logic.ITL: "attacked.recieve.string & string_program* | code.modified ; code.execute_program*",
            Logic.LTL: "attacked.recieve.string & string_program & X string_program"
            " | code.modified & X code.execute_program",
        },
        props={
            "attacked.recieve.string": "victim receives a crafted payload",
            "string_program": "payload executes",
            "code.modified": "parameters of resident code altered",
            "code.execute_program": "altered code runs",
        },
    ),
    "rootkit": dict(
        category=Category.U2R,
        minimal=Logic.ITL,
        templates={
            Logic.ITL: "code.modified_program ; (syslog.modified_program | syslog.delete_program)",
            Logic.LTL: "code.modified_program & X(syslog.modified_program | syslog.delete_program)",
        },
        props={
            "code.modified_program": "monitoring binary replaced",
            "syslog.modified_program": "system log edited",
            "syslog.delete_program": "system log removed",
        },
    ),
    "httptunnel": dict(
        category=Category.U2R,
        minimal=Logic.LTL,
        templates={
            Logic.LTL: "client.htc & (forall i in packets.sport[${sport_lo}, ${sport_hi}]:"
            " [](packets.sport = i -> packets.port = ${tunnel_port})) & <>client.send.http",
        },
        thresholds={
            "sport_lo": Threshold(1024, "port"),
            "sport_hi": Threshold(65535, "port"),
            "tunnel_port": Threshold(80, "port"),
        },
        props={
            "client.htc": "tunnel client running",
            "packets.sport": "packet source port (attribute)",
            "packets.port": "packet destination port (attribute)",
            "client.send.http": "tunnelled request leaves the network",
        },
    ),
    "xterm": dict(
        category=Category.U2R,
        minimal=Logic.ITL,
        templates={
            Logic.ITL: f"{_XTERM_DISJ}*",
            Logic.LTL: f"{_XTERM_DISJ} & X {_XTERM_DISJ}",
        },
        thresholds={"window_limit": Threshold(65535, "count")},
        props={
            "Attack.receive.escape.threshold": "window size requested by an escape sequence (attribute)",
            "Banner.modifed.FTP": "FTP banner altered",
            "Banner.modifed.TELNET": "telnet banner altered",
            "Syslog.modifed": "system log altered",
            "Syslog.Symlinked": "log file swapped for a symlink",
            "p": "malicious control sequence received",
        },
    ),
    # ---- R2L ---------------------------------------------------------------
    "warezmaster": dict(
        category=Category.R2L,
        minimal=Logic.ITL,
        templates={Logic.ITL: _chain(_WAREZ), Logic.LTL: _xchain(_WAREZ)},
        props={
            "account.guest.login_program": "guest login",
            "hiddendirectory.created_program": "hidden directory created",
            "uploadwarez_program": "pirated files uploaded",
        },
    ),
    "warezclient": dict(
        category=Category.R2L,
        minimal=Logic.ITL,
        templates={
            Logic.ITL: "(" + _chain(_WAREZ) + ") ; downloadwarez_program",
            Logic.LTL: _xchain(_WAREZ + ["downloadwarez_program"]),
        },
        props={
            "account.guest.login_program": "guest login",
            "hiddendirectory.created_program": "hidden directory created",
            "uploadwarez_program": "pirated files uploaded",
            "downloadwarez_program": "pirated files downloaded",
        },
    ),
    "ftp_write": dict(
        category=Category.R2L,
        minimal=Logic.ITL,
        templates={
            Logic.ITL: f"{_FTP_CREATE} & ({_FTP_CREATE} -> <>attacked.open.rlogin)*",
            Logic.LTL: f"{_FTP_CREATE} & X attacked.open.rlogin",
        },
        props={
            "attacked.create.file": "file created in the FTP home directory",
            "file.p": "suffix of the created file (attribute)",
            "attacked.open.rlogin": "remote login opened",
        },
    ),
    "phf": dict(
        category=Category.R2L,
        minimal=Logic.ITL,
        templates={
            Logic.ITL: "Attacked.receive.http & p & X(Attack.xterm ; Attacked.telnet & telnet.port = 25"
            " ; Attacked.telnet & telnet.port = 90)",
            Logic.LTL: "Attacked.receive.http & p & X(Attack.xterm & X(Attacked.telnet & telnet.port = 25"
            " & X(Attacked.telnet & telnet.port = 90)))",
        },
        props={
            "Attacked.receive.http": "web request arrives",
            "p": "request smuggles a newline",
            "Attack.xterm": "terminal command executed",
            "Attacked.telnet": "reverse telnet connection",
            "telnet.port": "port of the reverse connection (attribute)",
        },
    ),
    "imap": dict(
        category=Category.R2L,
        minimal=Logic.ITL,
        templates={
            Logic.ITL: "literal.value = ${literal} & X(f ; g ; p)",
            Logic.LTL: "literal.value = ${literal} & X(f & X(g & X p))",
        },
        thresholds={"literal": Threshold(-1, "count")},
        props={
            "literal.value": "received literal length (attribute)",
            "f": "operation completes",
            "g": "memory allocated",
            "p": "memory fault",
        },
    ),
    "sendmail": dict(
        category=Category.R2L,
        minimal=Logic.PROP,
        templates={Logic.PROP: "Attacked.receive.size > ${size_limit}"},
        thresholds={"size_limit": Threshold(256, "bytes")},
        props={"Attacked.receive.size": "size of a mail-server query (attribute)"},
    ),
    "xsnoop": dict(
        category=Category.R2L,
        minimal=Logic.LTL,
        templates={Logic.LTL: "attacked.password.save & X attacked.send.login"},
        props={
            "attacked.password.save": "trojan stores captured passwords",
            "attacked.send.login": "trojan ships the password log out",
        },
    ),
}


def _substitute(template: str, thresholds: Mapping[str, Threshold]) -> str:
    return Template(template).substitute({k: t.render() for k, t in thresholds.items()})


def _build(attack: str, overrides: Optional[Mapping[str, object]] = None) -> SignatureSet:
    d = _DEFS[attack]
    thresholds = dict(d.get("thresholds", {}))
    for name, value in (overrides or {}).items():
        if name not in thresholds:
            raise KeyError(f"{attack} has no threshold {name!r}")
        thresholds[name] = Threshold(value, thresholds[name].unit)
    minimal = d["minimal"]
    templates = dict(d["templates"])
    encodings: Dict[Logic, Formula] = {}
    kinds: Dict[Logic, str] = {}
    base = parse_formula(_substitute(templates[minimal], thresholds), minimal)
    for logic in Logic:
        if logic >= minimal:
            encodings[logic] = base
            kinds[logic] = CONSERVATIVE
            templates.setdefault(logic, templates[minimal])
        elif logic in templates:
            encodings[logic] = parse_formula(_substitute(templates[logic], thresholds), logic)
            kinds[logic] = UNDER
    if minimal == Logic.RASL:
        erased = erase_timing(base)
        check_logic(erased, Logic.ITL)
        encodings[Logic.ITL] = erased
        kinds[Logic.ITL] = OVER
    study = None
    if "study" in d:
        study = parse_formula(_substitute(d["study"], thresholds), Logic.RASL)
    return SignatureSet(
        attack=attack,
        category=d["category"],
        minimal_logic=minimal,
        encodings=MappingProxyType(encodings),
        kinds=MappingProxyType(kinds),
        thresholds=MappingProxyType(thresholds),
        templates=MappingProxyType(templates),
        propositions=MappingProxyType(dict(d["props"])),
        tagger=d.get("tagger"),
        study=study,
    )


_BUILTIN = {a: _build(a) for a in ATTACK_IDS}


def signature(attack: str, **overrides) -> SignatureSet:
    """The built-in signature set for ``attack``; keyword arguments override thresholds."""
    if attack not in _BUILTIN:
        raise KeyError(f"unknown attack {attack!r}")
    if overrides:
        return _build(attack, overrides)
    return _BUILTIN[attack]


def _rebuild(attack: str, values: Mapping[str, object]) -> SignatureSet:
    return signature(attack, **values)


def all_signatures() -> list:
    return [_BUILTIN[a] for a in ATTACK_IDS]


def weaken(s: SignatureSet, target: Logic) -> Optional[Formula]:
    """The documented lossy encoding of ``s`` at a weaker logic, or None."""
    target = Logic(target)
    if target >= s.minimal_logic:
        raise ValueError(f"{target} is not weaker than {s.attack}'s minimal logic {s.minimal_logic}")
    return s.encodings.get(target)


def registry_covers(s: SignatureSet) -> bool:
    names = set()
    for f in s.encodings.values():
        names |= atoms(f) | attributes(f)
    return names <= set(s.propositions)


# --------------------------------------------------------------------------
# Ordinal tagging (p1..p10 / q1..q10)

RUN_LENGTH = 10

# family -> (raw proposition marking a counted event, key attribute, tag prefix, distinct keys?)
TAGGERS = {
    "mail": ("mail.recieve", None, "p", False),
    "ipsweep": ("icmp.echo_request", "dst", "p", True),
    "portscan": ("tcp.syn_probe", "dport", "q", True),
}

_TAG_RE = {prefix: re.compile(rf"{prefix}(?:[1-9]|10)\Z") for prefix in ("p", "q")}


def tag_ordinals(trace: Trace, family: str) -> Trace:
    """Number counted events of ``family`` 1..10, restarting after 10.

    For the distinct-key families a key already seen in the current run starts a
    new run at 1.  Existing tags of the family's prefix are replaced, so tagging
    is idempotent.
    """
    marker, key_attr, prefix, distinct = TAGGERS[family]
    tag_re = _TAG_RE[prefix]
    out = []
    count = 0
    seen = set()
    for e in trace:
        props = {p for p in e.props if not tag_re.match(p)}
        if marker in props:
            key = e.attrs.get(key_attr) if key_attr else None
            if count == RUN_LENGTH or (distinct and key in seen):
                count = 0
                seen = set()
            count += 1
            seen.add(key)
            props.add(f"{prefix}{count}")
        out.append(Event(e.t, frozenset(props), e.attrs))
    return Trace(out)


def prepare_trace(trace: Trace, s: SignatureSet) -> Trace:
    return tag_ordinals(trace, s.tagger) if s.tagger else trace


# --------------------------------------------------------------------------
# Signature files


def signature_file_text(s: SignatureSet, logic: Logic) -> str:
    logic = Logic(logic)
    if logic not in s.encodings:
        raise KeyError(f"{s.attack} has no encoding at {logic}")
    if logic in s.templates:
        body = s.templates[logic]
    else:  # derived weakening: no template, write the formula itself
        body = str(s.encodings[logic])
    th = " ".join(f"{k}={t.value}:{t.unit}" for k, t in s.thresholds.items())
    return f"attack: {s.attack}\nlogic: {logic}\nthresholds: {th}\n{body}\n"


def export_signatures(out_dir: Union[str, Path]) -> list:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    for s in all_signatures():
        for logic in sorted(s.encodings):
            path = out / f"{s.attack}.{str(logic).lower()}.sig"
            path.write_text(signature_file_text(s, logic), encoding="utf-8")
            written.append(path)
    return written


def _number(text: str):
    try:
        return int(text)
    except ValueError:
        try:
            return float(text)
        except ValueError:
            return text


def parse_signature_text(text: str) -> Tuple[str, Logic, Dict[str, object], Formula]:
    """Parse a signature file; returns (attack, logic, thresholds, formula)."""
    lines = text.splitlines()
    if len(lines) < 4:
        raise ValueError("signature file needs a three-line header and a formula")
    header = {}
    for line, key in zip(lines[:3], ("attack", "logic", "thresholds")):
        name, sep, value = line.partition(":")
        if not sep or name.strip() != key:
            raise ValueError(f"expected header field {key!r}, got {line!r}")
        header[key] = value.strip()
    logic = Logic.parse(header["logic"])
    values = {}
    for item in header["thresholds"].split():
        name, _, rest = item.partition("=")
        value, _, _unit = rest.rpartition(":") if ":" in rest else (rest, "", "")
        values[name] = _number(value)
    body = "\n".join(lines[3:]).strip()
    formula = parse_formula(Template(body).substitute({k: str(v) for k, v in values.items()}), logic)
    return header["attack"], logic, values, formula


def load_signature_file(path: Union[str, Path]):
    return parse_signature_text(Path(path).read_text(encoding="utf-8"))
