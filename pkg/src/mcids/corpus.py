"""Deterministic synthesis of a labelled, step-oriented attack corpus.

Every attack type has a *step script*: the events that realise the attack plus a
mode for each interior gap between consecutive steps:

``FREE``   benign noise may be interleaved;
``GLUE``   the steps must stay adjacent (the signature uses a strong next);
``BREAK``  like FREE, but a discriminating record forces noise here so the
           adjacency-based weaker encoding misses it.

Each record draws from its own random substream, derived from
``sha256(seed:index:attempt)``, and is checked with the reference (unmemoised) evaluator
before it is accepted.  If the check fails, the next attempt's substream is
used.
"""

from __future__ import annotations

import hashlib
import json
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Callable, Dict, List, Mapping, Optional, Sequence, Tuple, Union

from .detector import detect
from .formula import Logic
from .signatures import ATTACK_IDS, all_signatures, prepare_trace, signature, tag_ordinals
from .trace import Event, Trace, load_trace

GENERATOR_VERSION = "1.0.0"
RNG_DESCRIPTION = {
    "algorithm": "python random.Random (MT19937)",
    "substream": "seed = first 8 bytes (big-endian) of sha256('<seed>:<record index>:<attempt>')",
}
MAX_ATTEMPTS = 64

FREE, GLUE, BREAK = "free", "glue", "break"

CANONICAL = "canonical"
BENIGN = "benign"
BENIGN_NOISE = "benign-noise"

TABLE_COUNTS = {
    "smurf": 100, "neptune": 100, "land": 9, "teardrop": 12, "pod": 87, "mailbomb": 100,
    "udpstorm": 2, "apache": 100, "ipsweep": 100, "portscan": 100, "nmap": 84, "satan": 100,
    "mscan": 100, "buffer_overflow": 22, "rootkit": 13, "httptunnel": 100, "xterm": 13,
    "warezmaster": 100, "warezclient": 100, "ftp_write": 3, "phf": 2, "imap": 1,
    "sendmail": 17, "xsnoop": 4,
}

DECOY_ATTACKS = ("mailbomb", "ipsweep", "portscan")

BENIGN_PROPS = (
    "benign.login", "benign.logout", "benign.http.get", "benign.http.post", "benign.dns.query",
    "benign.mail.read", "benign.file.open", "benign.file.close", "benign.ping.reply",
    "benign.ssh.session", "benign.cron.run", "benign.backup",
)


class GenerationError(RuntimeError):
    """Raised when a record cannot be produced within the retry budget."""


class CorpusError(RuntimeError):
    """Raised for missing corpus files or manifest mismatches."""


def default_counts() -> Dict[str, int]:
    return dict(TABLE_COUNTS)


@dataclass(frozen=True)
class GenConfig:
    seed: int = 42
    counts: Mapping[str, int] = field(default_factory=default_counts)
    variant_fraction: float = 0.30
    benign_count: int = 200
    decoys_per_attack: int = 2
    noise_rate: float = 3.0

    def __post_init__(self):
        if not (0 <= self.seed < 2**64):
            raise ValueError("seed must be a 64-bit unsigned integer")
        for attack, count in self.counts.items():
            if attack not in TABLE_COUNTS:
                raise ValueError(f"unknown attack {attack!r}")
            if count < 0:
                raise ValueError(f"negative count for {attack}")
        if not 0 <= self.variant_fraction <= 1:
            raise ValueError("variant_fraction must lie in [0, 1]")
        if self.benign_count < 0 or self.decoys_per_attack < 0 or self.noise_rate < 0:
            raise ValueError("benign_count, decoys_per_attack and noise_rate must be >= 0")


@dataclass(frozen=True)
class Record:
    id: str
    label: str
    variant: str
    trace: Trace


@dataclass
class Corpus:
    records: List[Record]
    manifest: dict

    def by_label(self, label: str) -> List[Record]:
        return [r for r in self.records if r.label == label]


# --------------------------------------------------------------------------
# randomness


def substream(seed: int, index: int, attempt: int = 0) -> random.Random:
    digest = hashlib.sha256(f"{seed}:{index}:{attempt}".encode()).digest()
    return random.Random(int.from_bytes(digest[:8], "big"))


def poisson(rng: random.Random, lam: float) -> int:
    if lam <= 0:
        return 0
    limit, k, p = math.exp(-lam), 0, 1.0
    while True:
        p *= rng.random()
        if p <= limit:
            return k
        k += 1


def _host(rng: random.Random) -> str:
    return f"10.0.{rng.randint(0, 9)}.{rng.randint(1, 254)}"


def noise_event(rng: random.Random, t: float) -> Event:
    props = frozenset(rng.sample(BENIGN_PROPS, rng.randint(1, 2)))
    attrs = {"benign.bytes": rng.randint(40, 1500)}
    if rng.random() < 0.5:
        attrs["benign.user"] = rng.choice(("alice", "bob", "carol", "dave"))
    return Event(t, props, attrs)


# --------------------------------------------------------------------------
# step scripts


@dataclass
class Script:
    steps: List[Tuple[frozenset, dict]]
    gaps: List[str]
    pair_limit: Optional[float] = None  # every step gap below this (seconds)
    window_limit: Optional[float] = None  # first-to-last step span below this

    def __post_init__(self):
        assert len(self.gaps) == max(0, len(self.steps) - 1)


def _step(props, attrs=None):
    return (frozenset(props), dict(attrs or {}))


def _smurf(rng):
    k = rng.randint(3, 6)
    steps = [_step(["attacked.recieve"], {"icmp.type": "echo_reply", "src": _host(rng)}) for _ in range(k)]
    return Script(steps, [BREAK] * (k - 1))


def _neptune(rng):
    steps = []
    for _ in range(rng.randint(1, 3)):
        src = _host(rng)
        steps.append(_step(["attacked.recieve.SYN"], {"src": src}))
        steps.append(_step(["attacked.send.SYNACK"], {"dst": src}))
    return Script(steps, [FREE] * (len(steps) - 1))


def _land(rng):
    victim = _host(rng)
    return Script([_step(["attacked.recieve", "p"], {"src": victim, "dst": victim})], [])


def _teardrop(rng):
    total = rng.randint(60, 1500)
    steps = [_step(["ip.fragment"], {"m1.FragmentOffset": 0, "m1.TotalLength": total})]
    for _ in range(rng.randint(1, 2)):
        steps.append(_step(["ip.fragment"], {"m2.FragmentOffset": rng.randint(8, total - 8)}))
    return Script(steps, [FREE] * (len(steps) - 1))


def _pod(rng):
    return Script([_step(["attacked.recieve.ICMP"], {"m.size": rng.randint(65537, 131072)})], [])


def _mailbomb(rng, limit=0.01):
    src, dst = _host(rng), _host(rng)
    steps = [_step(["mail.recieve"], {"src": src, "dst": dst}) for _ in range(10)]
    return Script(steps, [FREE] * 9, pair_limit=limit)


def _udpstorm(rng):
    port = rng.choice((7, 13, 19))
    other = rng.choice([p for p in (7, 13, 19, 37) if p != port])
    attrs = {"sender": _host(rng), "attacked.port": port, "udp.port": other}
    return Script([_step(["attacked.receive.udp"], attrs)], [])


def _apache(rng):
    if rng.random() < 0.7:
        attrs = {"attacked.receive.http.range": rng.randint(6, 40)}
    else:
        attrs = {"attacked.receive.http.range": rng.randint(0, 5), "attacked.receive.http.accept_encoding": 1}
    return Script([_step(["p"], attrs)], [])


def _ipsweep(rng, limit=0.01):
    src = _host(rng)
    hosts = rng.sample(range(1, 255), 10)
    steps = [_step(["icmp.echo_request"], {"src": src, "dst": f"10.1.0.{h}"}) for h in hosts]
    return Script(steps, [FREE] * 9, window_limit=limit)


def _portscan(rng, limit=0.01):
    src, dst = _host(rng), _host(rng)
    ports = rng.sample(range(1, 1024), 10)
    steps = [_step(["tcp.syn_probe"], {"src": src, "dst": dst, "dport": p}) for p in ports]
    return Script(steps, [FREE] * 9, window_limit=limit)


def _nmap(rng):
    phi1 = rng.choice([
        _step(["attacked.recieve.ICMP_echo_request"]),
        _step(["attacked.recieve.TCPSYN"], {"port": 443}),
        _step(["attacked.recieve.TCPACK"], {"port": 80}),
        _step(["attacked.recieve.ICMP_timestamp_request"]),
    ])
    phi2 = rng.choice([
        _step(["attacked.recieve.SYN"]),
        _step(["attacked.recieve.ACK"]),
        _step(["attacked.recieve.TCPFIN"]),
        _step(["nmap.xmas"], {"attacked.recieve.TCP.flags.FINURGPUSH": 1}),
        _step(["nmap.null"], {"attacked.recieve.TCP.flags": 0}),
        _step(["attacked.port.UDP.recieve.ICMP"]),
    ])
    f78 = _step([rng.choice(["Exclusionlist.check.status.open", "Exclusionlist.check.status.openfiltered"])])
    f910 = _step([rng.choice(["port.TCP.TCPconnect", "port.UDP.recieve.nmapserviecesprobes"])])
    opened = rng.choice(["port.open.recieve.TCP", "port.open.recieve.UDP", "port.open.recieve.ICMP"])
    closed = rng.choice(["port.closed.recieve.TCP", "port.closed.recieve.UDP", "port.closed.recieve.ICMP"])
    return Script([phi1, phi2, f78, f910, _step([opened, closed])], [BREAK] * 4)


_SATAN_LOW = ("attacked.nslookuped_program", "attacked.portmapped_program", "attacked.showmount_program")
_SATAN_NORMAL = ("attacked.fingered.scanned_program", "attacked.TCP.scanned_program", "attacked.UDP.scanned_program")


def _satan(rng):
    steps = [_step([rng.choice(_SATAN_LOW)]), _step([rng.choice(_SATAN_LOW)])]
    level = rng.choice(("low", "normal", "grievous"))
    if level != "low":
        steps += [_step([p]) for p in rng.sample(_SATAN_NORMAL, rng.randint(1, 2))]
    if level == "grievous":
        steps.append(_step(["attacked.activeservices.scanned_program"]))
    return Script(steps, [BREAK] + [FREE] * (len(steps) - 2))


_MSCAN_CLAUSES = (
    lambda rng: _step(["attacked.receieve.SYN"], {"port": rng.choice((113, 21, 389, 443))}),
    lambda rng: _step(["mscan.xmas"], {"attacked.receieve.TCP.flags.FINURGPUSH": 1, "port": 443}),
    lambda rng: _step(["mscan.null"], {"attacked.receieve.TCP.flags": 0, "port": 443}),
    lambda rng: _step(["attacked.port.UDP.receive.ICMP"], {"port": 971}),
    lambda rng: _step(["attacked.receieve.TCP.portmapper"], {"port": 135}),
    lambda rng: _step(["attacked.receieve.nfsd.exportfs"]),
    lambda rng: _step([rng.choice(("attacked.receieve.samba", "attacked.receieve.netbios"))]),
    lambda rng: _step(["attacked.receieve.finger"], {"port": 79}),
    lambda rng: _step([
        rng.choice(("port.open.receive.TCP", "port.open.receive.UCP", "port.open.receive.ICMP")),
        rng.choice(("port.closed.receive.TCP", "port.closed.receive.UCP", "port.closed.ICMP")),
    ]),
)


def _mscan(rng):
    k = rng.randint(3, 6)
    steps = [rng.choice(_MSCAN_CLAUSES)(rng) for _ in range(k)]
    # the last two probes stay adjacent so that the final window holds two events
    return Script(steps, [FREE] * (k - 2) + [GLUE])


def _buffer_overflow(rng):
    if rng.random() < 0.5:
        steps = [_step(["attacked.recieve.string", "string_program"])]
        steps += [_step(["string_program"]) for _ in range(rng.randint(1, 2))]
    else:
        steps = [_step(["code.modified"])]
        steps += [_step(["code.execute_program"]) for _ in range(rng.randint(1, 2))]
    return Script(steps, [BREAK] + [FREE] * (len(steps) - 2))


def _rootkit(rng):
    steps = [_step(["code.modified_program"])]
    steps += [_step([rng.choice(("syslog.modified_program", "syslog.delete_program"))]) for _ in range(rng.randint(1, 2))]
    return Script(steps, [BREAK] + [FREE] * (len(steps) - 2))


def _httptunnel(rng):
    steps = [_step(["client.htc"])]
    for _ in range(rng.randint(2, 5)):
        steps.append(_step(["tunnel.packet"], {"packets.sport": rng.randint(1024, 65535), "packets.port": 80}))
    steps.append(_step(["client.send.http"]))
    return Script(steps, [FREE] * (len(steps) - 1))


_XTERM_EVENTS = (
    lambda rng: _step(["xterm.escape"], {"Attack.receive.escape.threshold": rng.randint(65536, 1 << 20)}),
    lambda rng: _step(["Banner.modifed.FTP"]),
    lambda rng: _step(["Banner.modifed.TELNET"]),
    lambda rng: _step(["Syslog.modifed"]),
    lambda rng: _step(["Syslog.Symlinked"]),
    lambda rng: _step(["p"]),
)


def _xterm(rng):
    k = rng.randint(2, 4)
    return Script([rng.choice(_XTERM_EVENTS)(rng) for _ in range(k)], [BREAK] * (k - 1))


_WAREZ = ("account.guest.login_program", "hiddendirectory.created_program", "uploadwarez_program")


def _warezmaster(rng):
    return Script([_step([p]) for p in _WAREZ], [BREAK] * 2)


def _warezclient(rng):
    return Script([_step([p]) for p in _WAREZ + ("downloadwarez_program",)], [BREAK] * 3)


def _ftp_write(rng):
    return Script(
        [_step(["attacked.create.file"], {"file.p": "rhosts"}), _step(["attacked.open.rlogin"])],
        [BREAK],
    )


def _phf(rng):
    return Script(
        [
            _step(["Attacked.receive.http", "p"]),
            _step(["Attack.xterm"]),
            _step(["Attacked.telnet"], {"telnet.port": 25}),
            _step(["Attacked.telnet"], {"telnet.port": 90}),
        ],
        [GLUE, BREAK, BREAK],
    )


def _imap(rng):
    return Script(
        [_step(["imap.literal"], {"literal.value": -1}), _step(["f"]), _step(["g"]), _step(["p"])],
        [GLUE, BREAK, BREAK],
    )


def _sendmail(rng):
    return Script([_step(["sendmail.query"], {"Attacked.receive.size": rng.randint(257, 4096)})], [])


def _xsnoop(rng):
    return Script([_step(["attacked.password.save"]), _step(["attacked.send.login"])], [GLUE])


SCRIPTS: Dict[str, Callable[[random.Random], Script]] = {
    "smurf": _smurf, "neptune": _neptune, "land": _land, "teardrop": _teardrop, "pod": _pod,
    "mailbomb": _mailbomb, "udpstorm": _udpstorm, "apache": _apache, "ipsweep": _ipsweep,
    "portscan": _portscan, "nmap": _nmap, "satan": _satan, "mscan": _mscan,
    "buffer_overflow": _buffer_overflow, "rootkit": _rootkit, "httptunnel": _httptunnel,
    "xterm": _xterm, "warezmaster": _warezmaster, "warezclient": _warezclient,
    "ftp_write": _ftp_write, "phf": _phf, "imap": _imap, "sendmail": _sendmail, "xsnoop": _xsnoop,
}


# --------------------------------------------------------------------------
# realising scripts as traces


def _round(t: float) -> float:
    return round(t, 6)


def _step_gaps(rng: random.Random, script: Script) -> List[float]:
    n = len(script.gaps)
    if script.pair_limit is not None:
        return [rng.uniform(0.1, 0.9) * script.pair_limit for _ in range(n)]
    if script.window_limit is not None:
        span = rng.uniform(0.1, 0.9) * script.window_limit
        weights = [rng.uniform(0.5, 1.5) for _ in range(n)]
        total = sum(weights)
        return [span * w / total for w in weights]
    return [rng.uniform(0.01, 0.5) for _ in range(n)]


def realise(
    rng: random.Random,
    script: Script,
    noise_rate: float,
    forced: Sequence[str] = (),
    gaps: Optional[List[float]] = None,
) -> Trace:
    """Lay the script out in time with interleaved noise.

    ``forced`` lists the gap modes that must receive at least one noise event.
    """
    if gaps is None:
        gaps = _step_gaps(rng, script)
    noise = [0] * len(script.gaps)
    open_gaps = [i for i, mode in enumerate(script.gaps) if mode != GLUE]
    for i in open_gaps:
        if script.gaps[i] in forced:
            noise[i] = 1
    if open_gaps:
        for _ in range(poisson(rng, noise_rate)):
            noise[rng.choice(open_gaps)] += 1
    t = rng.uniform(0, 100)
    events = []
    for i, (props, attrs) in enumerate(script.steps):
        events.append(Event(_round(t), props, attrs))
        if i < len(gaps):
            inner = sorted(rng.uniform(0, gaps[i]) for _ in range(noise[i]))
            for dt in inner:
                events.append(noise_event(rng, _round(t + dt)))
            t += gaps[i]
    return Trace(events)


def _tag(trace: Trace, attack: str) -> Trace:
    tagger = signature(attack).tagger
    return tag_ordinals(trace, tagger) if tagger else trace


def benign_trace(rng: random.Random) -> Trace:
    t = rng.uniform(0, 100)
    events = []
    for _ in range(rng.randint(5, 40)):
        events.append(noise_event(rng, _round(t)))
        t += rng.uniform(0.05, 2.0)
    return Trace(events)


def decoy_trace(rng: random.Random, attack: str) -> Trace:
    """Ten slow repetitions of the attack's step: matches the time-erased encoding only."""
    script = SCRIPTS[attack](rng)
    threshold = script.pair_limit or script.window_limit
    gaps = [rng.uniform(50, 100) * threshold for _ in script.gaps]
    return _tag(realise(rng, script, 0.0, gaps=gaps), attack)


def stress_trace(attack: str, length: int = 40, seed: int = 0) -> Trace:
    """Back-to-back noise-free instances of the attack script, cut to ``length`` events."""
    rng = substream(seed, ATTACK_IDS.index(attack), 0)
    events: List[Event] = []
    t = 0.0
    while len(events) < length:
        part = realise(rng, SCRIPTS[attack](rng), 0.0)
        base = part[0].t
        for e in part:
            events.append(Event(_round(t + e.t - base), e.props, e.attrs))
        t = events[-1].t + 0.005
    return _tag(Trace(events[:length]), attack)


# --------------------------------------------------------------------------
# variants and verification


def applicable_weaker(attack: str) -> List[Logic]:
    """Weaker logics a discriminating record can separate from the minimal one,
    strongest first: those with no encoding, or with an under-approximation."""
    s = signature(attack)
    out = []
    for logic in sorted(Logic, reverse=True):
        if logic < s.minimal_logic and (logic not in s.encodings or s.kinds[logic] == "under"):
            out.append(logic)
    return out


def discriminating_variant(attack: str, target: Logic) -> str:
    return f"discriminating:{signature(attack).minimal_logic}>{target}"


def _parse_variant(variant: str):
    kind, _, rest = variant.partition(":")
    if kind == "discriminating":
        _, _, target = rest.partition(">")
        return kind, Logic.parse(target)
    if kind == "decoy":
        return kind, rest
    return kind, None


def _fires(trace: Trace, enc, logic: Logic) -> bool:
    return detect(trace, enc, logic, oracle=True).detected


def _minimal_hits(trace: Trace) -> List[str]:
    return [
        s.attack
        for s in all_signatures()
        if _fires(prepare_trace(trace, s), s.encodings[s.minimal_logic], s.minimal_logic)
    ]


def check_record(rec: Record) -> Optional[str]:
    """Return None if the record meets its generation-time contract, else why not."""
    kind, detail = _parse_variant(rec.variant)
    tr = rec.trace
    if rec.label == BENIGN:
        hits = _minimal_hits(tr)
        if hits:
            return f"benign record matches {hits}"
        if kind == "decoy":
            s = signature(detail)
            if not _fires(prepare_trace(tr, s), s.encodings[Logic.ITL], Logic.ITL):
                return "decoy misses the time-erased encoding"
        return None
    s = signature(rec.label)
    if not _fires(tr, s.encodings[s.minimal_logic], s.minimal_logic):
        return "attack record misses its minimal encoding"
    if kind == "discriminating" and detail in s.encodings:
        if _fires(tr, s.encodings[detail], detail):
            return f"discriminating record still matches the {detail} encoding"
    return None


def generate_record(
    attack: str,
    variant: str,
    rng: Union[random.Random, Callable[[int], random.Random]],
    record_id: Optional[str] = None,
    noise_rate: float = 3.0,
) -> Record:
    """Build and verify one record.

    ``rng`` is either a substream factory ``attempt -> Random`` (retries use the
    next substream) or a single Random shared by all attempts.
    """
    factory = rng if callable(rng) and not isinstance(rng, random.Random) else (lambda _a, r=rng: r)
    kind, detail = _parse_variant(variant)
    if kind not in (CANONICAL, "discriminating", "decoy", BENIGN_NOISE):
        raise ValueError(f"unknown variant {variant!r}")
    if kind != BENIGN_NOISE and attack not in SCRIPTS:
        raise ValueError(f"unknown attack {attack!r}")
    if kind == "decoy" and attack not in DECOY_ATTACKS:
        raise ValueError(f"no lossy encoding to decoy for {attack}")
    if kind == "discriminating" and (
        detail not in applicable_weaker(attack) or variant != discriminating_variant(attack, detail)
    ):
        raise ValueError(f"{variant} is not a valid variant for {attack}")
    if kind == BENIGN_NOISE and attack != BENIGN:
        raise ValueError("benign-noise records carry the benign label")
    label = BENIGN if kind in ("decoy", BENIGN_NOISE) else attack
    problem = None
    for attempt in range(MAX_ATTEMPTS):
        r = factory(attempt)
        if kind == BENIGN_NOISE:
            tr = benign_trace(r)
        elif kind == "decoy":
            tr = decoy_trace(r, attack)
        else:
            script = SCRIPTS[attack](r)
            forced = ()
            if kind == "discriminating":
                forced = (BREAK,) if detail in signature(attack).encodings else (BREAK, FREE)
            tr = _tag(realise(r, script, noise_rate, forced), attack)
        rec = Record(record_id or f"{attack}-x", label, variant, tr)
        problem = check_record(rec)
        if problem is None:
            return rec
    raise GenerationError(f"{record_id or attack}: {problem} after {MAX_ATTEMPTS} attempts")


def population(cfg: GenConfig) -> List[Tuple[str, str, str]]:
    """(record id, attack or 'benign', variant) in corpus order."""
    plan = []
    keep = 1 - Fraction(str(cfg.variant_fraction))
    for attack in ATTACK_IDS:
        count = cfg.counts.get(attack, 0)
        targets = applicable_weaker(attack)
        canonical = count if not targets else int(count * keep + Fraction(1, 2))
        rest = count - canonical
        variants = [CANONICAL] * canonical
        for i, target in enumerate(targets):
            share = rest // len(targets) + (1 if i < rest % len(targets) else 0)
            variants += [discriminating_variant(attack, target)] * share
        for k, v in enumerate(variants, start=1):
            plan.append((f"{attack}-{k:04d}", attack, v))
        if attack in DECOY_ATTACKS:
            for k in range(1, cfg.decoys_per_attack + 1):
                plan.append((f"decoy-{attack}-{k:02d}", attack, f"decoy:{attack}"))
    for k in range(1, cfg.benign_count + 1):
        plan.append((f"benign-{k:04d}", BENIGN, BENIGN_NOISE))
    return plan


def _build_one(args):
    seed, index, rid, attack, variant, noise_rate = args
    return generate_record(attack, variant, lambda attempt: substream(seed, index, attempt), rid, noise_rate)


def generate_corpus(cfg: GenConfig = GenConfig(), workers: int = 1) -> Corpus:
    plan = population(cfg)
    jobs = [(cfg.seed, i, rid, a, v, cfg.noise_rate) for i, (rid, a, v) in enumerate(plan)]
    if workers > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(workers) as pool:
            records = list(pool.map(_build_one, jobs, chunksize=16))
    else:
        records = [_build_one(j) for j in jobs]
    return Corpus(records, _manifest(cfg, records))


def _counts_by(records, key) -> Dict[str, int]:
    out: Dict[str, int] = {}
    for r in records:
        k = key(r)
        out[k] = out.get(k, 0) + 1
    return dict(sorted(out.items()))


def records_digest(records: Sequence[Record]) -> str:
    h = hashlib.sha256()
    for r in records:
        h.update(f"{r.id}\t{r.label}\t{r.variant}\n".encode())
        h.update(r.trace.to_jsonl().encode())
    return h.hexdigest()


def _manifest(cfg: GenConfig, records: Sequence[Record]) -> dict:
    return {
        "generator": "mcids.corpus",
        "generator_version": GENERATOR_VERSION,
        "note": "synthetic step-oriented corpus; counts follow the reference attack table",
        "seed": cfg.seed,
        "rng": RNG_DESCRIPTION,
        "config": {
            "counts": dict(cfg.counts),
            "variant_fraction": cfg.variant_fraction,
            "benign_count": cfg.benign_count,
            "decoys_per_attack": cfg.decoys_per_attack,
            "noise_rate": cfg.noise_rate,
        },
        "records": len(records),
        "label_counts": _counts_by(records, lambda r: r.label),
        "variant_counts": _counts_by(records, lambda r: r.variant.split(":")[0]),
        "records_sha256": records_digest(records),
    }


# --------------------------------------------------------------------------
# corpus directory I/O


def write_corpus(corpus: Corpus, out_dir: Union[str, Path]) -> Path:
    out = Path(out_dir)
    rec_dir = out / "records"
    rec_dir.mkdir(parents=True, exist_ok=True)
    for r in corpus.records:
        (rec_dir / f"{r.id}.jsonl").write_text(r.trace.to_jsonl(), encoding="utf-8")
    lines = ["id\tlabel\tvariant"] + [f"{r.id}\t{r.label}\t{r.variant}" for r in corpus.records]
    (out / "labels.tsv").write_text("\n".join(lines) + "\n", encoding="utf-8")
    (out / "manifest.json").write_text(json.dumps(corpus.manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return out


def load_corpus(path: Union[str, Path], verify: bool = True) -> Corpus:
    root = Path(path)
    manifest_path, labels_path = root / "manifest.json", root / "labels.tsv"
    for p in (manifest_path, labels_path):
        if not p.is_file():
            raise CorpusError(f"missing corpus file {p}")
    manifest = json.loads(manifest_path.read_text(encoding="utf-8"))
    records = []
    rows = labels_path.read_text(encoding="utf-8").splitlines()[1:]
    for row in rows:
        if not row.strip():
            continue
        rid, label, variant = row.split("\t")
        trace_path = root / "records" / f"{rid}.jsonl"
        if not trace_path.is_file():
            raise CorpusError(f"missing corpus file {trace_path}")
        records.append(Record(rid, label, variant, load_trace(trace_path)))
    if verify and records_digest(records) != manifest.get("records_sha256"):
        raise CorpusError("corpus contents do not match the manifest hash")
    return Corpus(records, manifest)
