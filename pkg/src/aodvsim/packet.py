"""Simulated packets and the AODV control headers they carry."""

from __future__ import annotations

import copy
import itertools
from dataclasses import dataclass, field
from enum import IntEnum
from typing import Union

from aodvsim import trace as tr

BROADCAST = -1
ROUTING_PORT = 255
IP_HDR_LEN = 20


class AodvType(IntEnum):
    HELLO = 0x1
    RREQ = 0x2
    RREP = 0x4
    RERR = 0x8


@dataclass
class Rreq:
    hop_count: int          # 0 at the originator
    bcast_id: int
    dst: int
    dst_seqno: int
    src: int
    src_seqno: int
    timestamp: float
    code: int = AodvType.RREQ


@dataclass
class Rrep:
    hop_count: int
    rpdst: int
    rpseq: int
    lifetime: float
    timestamp: float
    code: int = AodvType.RREP

    @property
    def is_hello(self) -> bool:
        return self.code == AodvType.HELLO


@dataclass
class Rerr:
    dests: list[tuple[int, int]]
    code: int = AodvType.RERR

    @property
    def dest_count(self) -> int:
        return len(self.dests)


AodvHeader = Union[Rreq, Rrep, Rerr]

# on-wire sizes at the routing layer, IP header included
HELLO_SIZE = 44
RREQ_SIZE = 48
RREP_SIZE = 44


def rerr_size(count: int) -> int:
    return IP_HDR_LEN + 4 * (1 + 2 * count)


_uid = itertools.count()


@dataclass
class Packet:
    ptype: str                      # "AODV" or "cbr"
    size: int
    src: int
    dst: int
    ttl: int
    sport: int = 0
    dport: int = 0
    seq: int = 0
    header: object = None           # AodvHeader for control packets
    nexthop: int = BROADCAST
    prev_hop: int = -1
    num_forwards: int = 0
    mac_src: int = 0
    mac_dst: int = BROADCAST
    created: float = 0.0
    uid: int = field(default_factory=lambda: next(_uid))

    @property
    def is_data(self) -> bool:
        return self.ptype != "AODV"

    @property
    def is_broadcast(self) -> bool:
        return self.dst == BROADCAST

    def copy(self) -> "Packet":
        p = copy.deepcopy(self)
        p.uid = next(_uid)
        return p


def data_packet(src: int, dst: int, seq: int, payload: int, now: float) -> Packet:
    return Packet("cbr", payload, src, dst, ttl=0, seq=seq, created=now)


def control_packet(header, src: int, dst: int, ttl: int, now: float) -> Packet:
    if isinstance(header, Rreq):
        size = RREQ_SIZE
    elif isinstance(header, Rrep):
        size = HELLO_SIZE if header.is_hello else RREP_SIZE
    elif isinstance(header, Rerr):
        size = rerr_size(header.dest_count)
    else:
        size = IP_HDR_LEN
    return Packet("AODV", size, src, dst, ttl, ROUTING_PORT, ROUTING_PORT,
                  header=header, created=now)


_LABELS = {
    AodvType.HELLO: "HELLO",
    AodvType.RREQ: "REQUEST",
    AodvType.RREP: "REPLY",
    AodvType.RERR: "ERROR",
}


def header_info(h):
    """Trace-level view of a control header (RREQ hop counts print one higher)."""
    if isinstance(h, Rreq):
        return tr.RequestInfo(h.code, h.hop_count + 1, h.bcast_id, h.dst, h.dst_seqno,
                              h.src, h.src_seqno)
    if isinstance(h, Rrep):
        return tr.ReplyInfo(h.code, h.hop_count, h.rpdst, h.rpseq, h.lifetime)
    if isinstance(h, Rerr):
        return tr.ErrorInfo(h.code, tuple(h.dests))
    return None


def to_record(pkt: Packet, event: str, time: float, node: int, layer: str = "RTR",
              reason: str | None = None, mac: tuple[str, str, str, str] | None = None,
              size: int | None = None) -> tr.TraceRecord:
    if mac is None:
        if event == "r":
            dst = "ffffffff" if pkt.mac_dst == BROADCAST else f"{pkt.mac_dst:x}"
            mac = ("0", dst, f"{pkt.mac_src:x}", "800")
        else:
            mac = ("0", "0", "0", "0")
    nexthop = 0 if pkt.nexthop == BROADCAST else pkt.nexthop
    aodv = label = None
    if pkt.ptype == "AODV":
        aodv = header_info(pkt.header)
        label = _LABELS.get(getattr(pkt.header, "code", None))
    if size is None:
        size = pkt.size if pkt.ptype == "AODV" or layer == "AGT" else pkt.size + IP_HDR_LEN
    return tr.TraceRecord(
        event=event, time=time, node=node, layer=layer, seq=pkt.seq, ptype=pkt.ptype,
        size=size, mac=mac, src=pkt.src, sport=pkt.sport, dst=pkt.dst, dport=pkt.dport,
        ttl=pkt.ttl, nexthop=nexthop, aodv=aodv, reason=reason, label=label,
    )
