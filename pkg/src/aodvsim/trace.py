"""Reader and writer for the old-style NS-2 wireless trace line.

A line looks like::

    s 0.000000000 _0_ RTR  --- 0 AODV 44 [0 0 0 0] ------- [0:255 -1:255 1 0] [0x1 1 [0 2] 4.000000] (HELLO)

Columns, in order: event, time, node, layer, flags (or the drop reason on
``D`` lines), packet sequence number, packet type, size, MAC group, IP
flags, IP group ``[src:port dst:port ttl nexthop]``, an optional AODV
header group and an optional parenthesised packet label.

The AODV group layout depends on the type code:

* ``0x1`` / ``0x4`` (HELLO / REPLY): ``[code hops [rpdst rpseq] lifetime]``
* ``0x2`` (REQUEST): ``[code hops bid [dst dst_seqno] [src src_seqno]]``
* ``0x8`` (ERROR): ``[code count [dst seqno] ...]``

The writer is canonical; the parser accepts any run of whitespace between
columns.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import IO, Iterable, Union

EVENTS = frozenset("srDf")
LAYERS = frozenset({"AGT", "RTR", "LL", "IFQ", "MAC", "PHY"})
FLAGS = "---"
IP_FLAGS = "-------"

COLUMN_NAMES = {
    1: "event", 2: "time", 3: "node", 4: "layer", 5: "flags", 6: "seq",
    7: "ptype", 8: "size", 9: "mac", 10: "ip-flags", 11: "ip", 12: "aodv", 13: "label",
}


class TraceParseError(ValueError):
    def __init__(self, column: int, message: str, lineno: int | None = None):
        self.column = column
        self.message = message
        self.lineno = lineno
        where = f"line {lineno}, " if lineno is not None else ""
        super().__init__(f"{where}column {column} ({COLUMN_NAMES.get(column, '?')}): {message}")


@dataclass(frozen=True)
class RequestInfo:
    code: int
    hops: int
    bid: int
    dst: int
    dst_seqno: int
    src: int
    src_seqno: int


@dataclass(frozen=True)
class ReplyInfo:
    code: int
    hops: int
    rpdst: int
    rpseq: int
    lifetime: float

    def __post_init__(self):
        object.__setattr__(self, "lifetime", round(float(self.lifetime), 6))


@dataclass(frozen=True)
class ErrorInfo:
    code: int
    dests: tuple[tuple[int, int], ...]


AodvInfo = Union[RequestInfo, ReplyInfo, ErrorInfo]


@dataclass(frozen=True)
class TraceRecord:
    event: str
    time: float
    node: int
    layer: str
    seq: int
    ptype: str
    size: int
    mac: tuple[str, str, str, str]
    src: int
    sport: int
    dst: int
    dport: int
    ttl: int
    nexthop: int
    aodv: AodvInfo | None = None
    reason: str | None = None
    label: str | None = None
    flags: str = FLAGS
    ip_flags: str = IP_FLAGS

    def __post_init__(self):
        # times only carry 9 decimals on disk; keep the in-memory value identical
        object.__setattr__(self, "time", round(float(self.time), 9))


def _format_aodv(info: AodvInfo) -> str:
    if isinstance(info, RequestInfo):
        return (f"[0x{info.code:x} {info.hops} {info.bid} [{info.dst} {info.dst_seqno}] "
                f"[{info.src} {info.src_seqno}]]")
    if isinstance(info, ReplyInfo):
        return f"[0x{info.code:x} {info.hops} [{info.rpdst} {info.rpseq}] {info.lifetime:.6f}]"
    if isinstance(info, ErrorInfo):
        body = "".join(f" [{d} {s}]" for d, s in info.dests)
        return f"[0x{info.code:x} {len(info.dests)}{body}]"
    raise TypeError(f"not an AODV info group: {info!r}")


def format_record(rec: TraceRecord) -> str:
    flags = rec.reason if rec.reason else rec.flags
    line = (f"{rec.event} {rec.time:.9f} _{rec.node}_ {rec.layer:>3} {flags:>4} {rec.seq} "
            f"{rec.ptype} {rec.size} [{' '.join(rec.mac)}] {rec.ip_flags} "
            f"[{rec.src}:{rec.sport} {rec.dst}:{rec.dport} {rec.ttl} {rec.nexthop}]")
    if rec.aodv is not None:
        line += " " + _format_aodv(rec.aodv)
    if rec.label:
        line += f" ({rec.label})"
    return line


# -- parsing -----------------------------------------------------------------

def _split_top(text: str, column: int) -> list:
    """Split into top-level tokens; bracket groups become nested lists."""
    out: list = []
    stack: list[list] = [out]
    word = ""
    i = 0
    while i < len(text):
        c = text[i]
        if c.isspace() or c in "[]()":
            if word:
                stack[-1].append(word)
                word = ""
            if c == "[":
                grp: list = []
                stack[-1].append(grp)
                stack.append(grp)
            elif c == "]":
                if len(stack) == 1:
                    raise TraceParseError(column, "unbalanced ']'")
                stack.pop()
            elif c == "(":
                j = text.find(")", i)
                if j < 0:
                    raise TraceParseError(column, "unterminated '('")
                stack[-1].append(("label", text[i + 1:j]))
                i = j
            elif c == ")":
                raise TraceParseError(column, "unbalanced ')'")
        else:
            word += c
        i += 1
    if word:
        stack[-1].append(word)
    if len(stack) != 1:
        raise TraceParseError(column, "unterminated '['")
    return out


def _int(tok, column: int, what: str) -> int:
    if not isinstance(tok, str):
        raise TraceParseError(column, f"expected integer {what}, got group")
    try:
        return int(tok, 0) if tok.lower().startswith("0x") else int(tok)
    except ValueError:
        raise TraceParseError(column, f"bad {what} {tok!r}") from None


def _float(tok, column: int, what: str) -> float:
    if not isinstance(tok, str):
        raise TraceParseError(column, f"expected number {what}, got group")
    try:
        return float(tok)
    except ValueError:
        raise TraceParseError(column, f"bad {what} {tok!r}") from None


def _pair(grp, column: int) -> tuple[int, int]:
    if not isinstance(grp, list) or len(grp) != 2:
        raise TraceParseError(column, f"expected [a b] pair, got {grp!r}")
    return _int(grp[0], column, "field"), _int(grp[1], column, "field")


def _parse_aodv(grp: list) -> AodvInfo:
    col = 12
    if not grp:
        raise TraceParseError(col, "empty group")
    code = _int(grp[0], col, "type code")
    rest = grp[1:]
    if code in (0x1, 0x4):
        if len(rest) != 3:
            raise TraceParseError(col, "reply group needs hops, [rpdst rpseq], lifetime")
        rpdst, rpseq = _pair(rest[1], col)
        return ReplyInfo(code, _int(rest[0], col, "hop count"), rpdst, rpseq,
                         _float(rest[2], col, "lifetime"))
    if code == 0x2:
        if len(rest) != 4:
            raise TraceParseError(col, "request group needs hops, bid, [dst seq], [src seq]")
        dst, dseq = _pair(rest[2], col)
        src, sseq = _pair(rest[3], col)
        return RequestInfo(code, _int(rest[0], col, "hop count"), _int(rest[1], col, "bid"),
                           dst, dseq, src, sseq)
    if code == 0x8:
        if not rest:
            raise TraceParseError(col, "error group needs a destination count")
        count = _int(rest[0], col, "destination count")
        if count != len(rest) - 1:
            raise TraceParseError(col, f"destination count {count} but {len(rest) - 1} entries")
        return ErrorInfo(code, tuple(_pair(g, col) for g in rest[1:]))
    raise TraceParseError(col, f"unknown AODV type code 0x{code:x}")


def parse_line(line: str, lineno: int | None = None) -> TraceRecord:
    try:
        return _parse_line(line)
    except TraceParseError as e:
        if lineno is not None:
            raise TraceParseError(e.column, e.message, lineno) from None
        raise


def _parse_line(line: str) -> TraceRecord:
    toks = _split_top(line.strip(), 0)
    n = len(toks)

    def need(col):
        if n < col:
            raise TraceParseError(col, "line truncated")
        return toks[col - 1]

    event = need(1)
    if event not in EVENTS:
        raise TraceParseError(1, f"unknown event {event!r}")
    time = _float(need(2), 2, "time")
    if time < 0:
        raise TraceParseError(2, "negative time")
    node_tok = need(3)
    if not (isinstance(node_tok, str) and len(node_tok) > 2
            and node_tok[0] == "_" and node_tok[-1] == "_"):
        raise TraceParseError(3, f"bad node token {node_tok!r}")
    node = _int(node_tok[1:-1], 3, "node id")
    layer = need(4)
    if layer not in LAYERS:
        raise TraceParseError(4, f"unknown layer {layer!r}")
    flags = need(5)
    if not isinstance(flags, str):
        raise TraceParseError(5, "expected flags token")
    reason = None
    if flags != FLAGS:
        reason = flags
        flags = FLAGS
    seq = _int(need(6), 6, "sequence number")
    ptype = need(7)
    if not isinstance(ptype, str):
        raise TraceParseError(7, "expected packet type")
    size = _int(need(8), 8, "size")
    mac = need(9)
    if not isinstance(mac, list) or len(mac) != 4 or not all(isinstance(t, str) for t in mac):
        raise TraceParseError(9, "MAC group must hold 4 fields")
    ip_flags = need(10)
    if ip_flags != IP_FLAGS:
        raise TraceParseError(10, f"bad IP flags {ip_flags!r}")
    ip = need(11)
    if not isinstance(ip, list) or len(ip) != 4:
        raise TraceParseError(11, "IP group must be [src:port dst:port ttl nexthop]")
    addr = []
    for tok in ip[:2]:
        if not isinstance(tok, str) or tok.count(":") != 1:
            raise TraceParseError(11, f"bad address {tok!r}")
        a, p = tok.split(":")
        addr += [_int(a, 11, "address"), _int(p, 11, "port")]
    ttl = _int(ip[2], 11, "ttl")
    nexthop = _int(ip[3], 11, "next hop")

    aodv = label = None
    rest = toks[11:]
    if rest and isinstance(rest[0], list):
        aodv = _parse_aodv(rest.pop(0))
    if rest and isinstance(rest[0], tuple):
        label = rest.pop(0)[1]
    if rest:
        raise TraceParseError(12 if aodv is None else 13, f"unexpected trailing {rest[0]!r}")
    if event == "D" and reason is None:
        raise TraceParseError(5, "drop record without a reason")

    return TraceRecord(event, time, node, layer, seq, ptype, size, tuple(mac),
                       addr[0], addr[1], addr[2], addr[3], ttl, nexthop,
                       aodv=aodv, reason=reason, label=label, flags=flags)


def parse_lines(lines: Iterable[str]) -> list[TraceRecord]:
    out = []
    for i, line in enumerate(lines, start=1):
        if line.strip():
            out.append(parse_line(line, lineno=i))
    return out


def read_trace(path) -> list[TraceRecord]:
    with open(path, encoding="utf-8") as fh:
        return parse_lines(fh)


def write_stream(records: Iterable[TraceRecord], sink: IO[str]) -> int:
    """Write records one per line. Raises ValueError on out-of-order times."""
    records = list(records)
    for a, b in zip(records, records[1:]):
        if b.time < a.time:
            raise ValueError(f"trace out of order: {b.time:.9f} after {a.time:.9f}")
    for rec in records:
        sink.write(format_record(rec))
        sink.write("\n")
    sink.flush()
    return len(records)
