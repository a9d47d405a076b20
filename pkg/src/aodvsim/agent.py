"""Per-node AODV routing agent.

Method names follow the classic ns-2 agent (``recvRequest``, ``rt_resolve``
and so on) so that the control flow can be read side by side with it. The
agent never touches the clock directly; it reads ``kernel.now`` and asks the
kernel for timers, and it talks to other nodes only through the medium.

Drop reasons written to the trace:

    NRTE  no route            TTL   hop budget exhausted
    LOOP  own packet returned CBK   link-layer failure callback
    IFQ   send buffer full    TOUT  send buffer timeout
    ERR   malformed packet or unknown AODV type
"""

from __future__ import annotations

import logging
from enum import Enum

from aodvsim.config import INFINITY, AodvConfig
from aodvsim.kernel import EventKind
from aodvsim.packet import (BROADCAST, AodvType, Packet, Rerr, Rrep, Rreq,
                            control_packet, to_record)
from aodvsim.tables import (BroadcastIdCache, NeighborTable, RequestQueue, RouteEntry,
                            RouteFlag, RoutingTable)

log = logging.getLogger(__name__)


class TimerKind(Enum):
    BROADCAST = "broadcast"
    HELLO = "hello"
    NEIGHBOR = "neighbor"
    ROUTE_CACHE = "route-cache"
    LOCAL_REPAIR = "local-repair"


class AodvAgent:
    def __init__(self, addr: int, config: AodvConfig, sim):
        self.addr = addr
        self.cfg = config
        self.sim = sim
        self.kernel = sim.kernel
        self.medium = sim.medium

        self.seqno = 2
        self.bid = 0
        self.rtable = RoutingTable()
        self.neighbors = NeighborTable()
        self.bid_cache = BroadcastIdCache(config.bcast_id_save)
        self.rqueue = RequestQueue(config.rqueue_capacity, config.rqueue_timeout)
        self.started = False

    def __repr__(self):
        return f"AodvAgent({self.addr})"

    @property
    def now(self) -> float:
        return self.kernel.now

    # -- tracing ---------------------------------------------------------------

    def _trace(self, pkt: Packet, event: str, layer: str = "RTR", reason: str | None = None):
        self.sim.log(to_record(pkt, event, self.now, self.addr, layer, reason))

    def drop(self, pkt: Packet, reason: str, layer: str = "RTR"):
        self._trace(pkt, "D", layer, reason)

    # -- timers ----------------------------------------------------------------

    def start(self) -> None:
        if self.started:
            raise RuntimeError(f"agent {self.addr} already started")
        self.started = True
        self._arm(0.0, TimerKind.BROADCAST)
        if self.cfg.hello_enabled:
            self._arm(0.0, TimerKind.HELLO)
        self._arm(0.0, TimerKind.NEIGHBOR)
        self._arm(0.0, TimerKind.ROUTE_CACHE)

    def _arm(self, delay, kind, dst=None):
        return self.kernel.schedule(delay, self.handle_timer, kind, dst,
                                    kind=EventKind.TIMER, target=self.addr)

    def handle_timer(self, kind: TimerKind, dst: int | None = None) -> None:
        cfg = self.cfg
        if kind is TimerKind.BROADCAST:
            self.id_purge()
            self._arm(cfg.bcast_id_save, kind)
        elif kind is TimerKind.HELLO:
            self.sendHello()
            interval = self.kernel.uniform(cfg.min_hello_interval, cfg.max_hello_interval)
            self._arm(interval, kind)
        elif kind is TimerKind.NEIGHBOR:
            self.nb_purge()
            self._arm(cfg.neighbor_purge_interval, kind)
        elif kind is TimerKind.ROUTE_CACHE:
            self.rt_purge()
            self._arm(cfg.frequency, kind)
        elif kind is TimerKind.LOCAL_REPAIR:
            self._finish_repair(dst)

    # -- neighbour management ----------------------------------------------------

    def nb_insert(self, id: int, seqno: int | None = None) -> None:
        expire = self.now + self.cfg.neighbor_hold
        self.neighbors.insert(id, expire)
        rt = self.rtable.add(id)
        seq = rt.seqno if seqno is None else max(rt.seqno, seqno)
        self.rt_update(rt, seq, 1, id, max(rt.expire, expire))

    def nb_lookup(self, id: int):
        return self.neighbors.lookup(id)

    def nb_delete(self, id: int) -> None:
        if self.neighbors.delete(id):
            self.handle_link_failure(id)

    def nb_purge(self) -> int:
        dead = self.neighbors.expired(self.now)
        for id in dead:
            self.nb_delete(id)
        return len(dead)

    # -- broadcast id cache --------------------------------------------------------

    def id_insert(self, src: int, bid: int) -> None:
        self.bid_cache.insert(src, bid, self.now)

    def id_lookup(self, src: int, bid: int) -> bool:
        return self.bid_cache.lookup(src, bid, self.now)

    def id_purge(self) -> int:
        return self.bid_cache.purge(self.now)

    # -- send buffer -----------------------------------------------------------------

    def enque(self, pkt: Packet) -> None:
        evicted = self.rqueue.enque(pkt.dst, pkt, self.now)
        if evicted is not None:
            self.drop(evicted, "IFQ")

    def deque(self, dst: int):
        return self.rqueue.deque(dst)

    def _flush(self, dst: int) -> None:
        rt = self.rtable.lookup(dst)
        while rt is not None and rt.is_up:
            p = self.rqueue.deque(dst)
            if p is None:
                break
            self.forward(rt, p)

    # -- reception ---------------------------------------------------------------------

    def recv(self, pkt: Packet) -> None:
        """Entry point for every packet reaching this node's routing layer."""
        if pkt.ptype == "AODV":
            self._trace(pkt, "r")
            if pkt.header is None:
                self.drop(pkt, "ERR")
                return
            pkt.ttl -= 1
            self.recvAODV(pkt)
            return

        if pkt.src == self.addr and pkt.num_forwards == 0:
            pkt.ttl = self.cfg.network_diameter
        elif pkt.dst == self.addr:
            pkt.ttl -= 1
            self.sim.deliver_local(self.addr, pkt)
            return
        else:
            self._trace(pkt, "r")
            if pkt.src == self.addr:
                self.drop(pkt, "LOOP")
                return
            pkt.ttl -= 1
            if pkt.ttl <= 0:
                self.drop(pkt, "TTL")
                return

        if pkt.is_broadcast:
            self.forward(None, pkt)
        else:
            self.rt_resolve(pkt)

    def recvAODV(self, pkt: Packet) -> None:
        h = pkt.header
        code = getattr(h, "code", None)
        if code == AodvType.RREQ and isinstance(h, Rreq):
            self.recvRequest(pkt)
        elif code == AodvType.RREP and isinstance(h, Rrep):
            self.recvReply(pkt)
        elif code == AodvType.RERR and isinstance(h, Rerr):
            self.recvError(pkt)
        elif code == AodvType.HELLO and isinstance(h, Rrep):
            self.recvHello(pkt)
        else:
            self.drop(pkt, "ERR")

    def recvRequest(self, pkt: Packet) -> None:
        rq: Rreq = pkt.header
        now = self.now
        if rq.src == self.addr or self.id_lookup(rq.src, rq.bcast_id):
            return
        self.id_insert(rq.src, rq.bcast_id)

        # reverse route toward the originator
        rt0 = self.rtable.add(rq.src)
        metric = rq.hop_count + 1
        if rq.src_seqno > rt0.seqno or (rq.src_seqno == rt0.seqno and metric < rt0.hops):
            self.rt_update(rt0, rq.src_seqno, metric, pkt.prev_hop,
                           max(rt0.expire, now + self.cfg.rev_route_life))
            rt0.req_cnt = 0
            rt0.req_timeout = 0.0
            self._flush(rq.src)

        if rq.dst == self.addr:
            self.seqno = max(self.seqno, rq.dst_seqno) + 1
            if self.seqno % 2:
                self.seqno += 1
            self.sendReply(rq.src, 1, self.addr, self.seqno, self.cfg.my_route_timeout,
                           rq.timestamp)
            return

        rt = self.rtable.lookup(rq.dst)
        if rt is not None and rt.is_up and rt.expire > now and rt.seqno >= rq.dst_seqno:
            self.sendReply(rq.src, rt.hops + 1, rq.dst, rt.seqno, rt.expire - now,
                           rq.timestamp)
            return

        if pkt.ttl <= 0:
            return
        rq.hop_count += 1
        self.forward(None, pkt, self.kernel.uniform(0.0, self.cfg.broadcast_jitter))

    def recvReply(self, pkt: Packet) -> None:
        rp: Rrep = pkt.header
        now = self.now
        suppress = True
        if rp.rpdst != self.addr:
            rt = self.rtable.add(rp.rpdst)
            if rt.seqno < rp.rpseq or (rt.seqno == rp.rpseq and rp.hop_count < rt.hops):
                self.rt_update(rt, rp.rpseq, rp.hop_count, pkt.prev_hop, now + rp.lifetime)
                rt.req_cnt = 0
                rt.req_timeout = 0.0
                suppress = False
                self._flush(rp.rpdst)

        if pkt.dst == self.addr or suppress:
            return
        rt0 = self.rtable.lookup(pkt.dst)
        if rt0 is None or not rt0.is_up:
            self.drop(pkt, "NRTE")
            return
        rp.hop_count += 1
        self.forward(rt0, pkt)

    def recvError(self, pkt: Packet) -> None:
        re: Rerr = pkt.header
        now = self.now
        sender = pkt.prev_hop
        upstream = []
        for dst, seq in re.dests:
            rt = self.rtable.lookup(dst)
            if rt is None or rt.flag is RouteFlag.DOWN:
                continue
            if rt.nexthop != sender or rt.seqno > seq:
                continue
            relayed = now - rt.last_relay < self.cfg.active_route_timeout
            self.rt_down(rt)
            rt.seqno = seq
            if relayed:
                upstream.append((dst, seq))
        if upstream:
            self.sendError(upstream, jitter=True)

    def recvHello(self, pkt: Packet) -> None:
        h: Rrep = pkt.header
        self.nb_insert(h.rpdst, h.rpseq)

    # -- transmission ---------------------------------------------------------------------

    def _send_now(self, pkt: Packet, event: str, nexthop: int | None) -> None:
        self._trace(pkt, event)
        if nexthop is None:
            self.medium.broadcast_deliver(pkt, self.addr)
        else:
            self.medium.unicast_deliver(pkt, self.addr, nexthop, self.rt_ll_failed)

    def forward(self, rt: RouteEntry | None, pkt: Packet, delay: float = 0.0) -> None:
        """Hand ``pkt`` to the medium, unicast along ``rt`` or broadcast if ``rt`` is None."""
        if pkt.ttl <= 0:
            self.drop(pkt, "TTL")
            return
        # packets that arrived from another node are forwarded, not originated
        event = "f" if pkt.prev_hop >= 0 else "s"
        if rt is not None:
            pkt.nexthop = rt.nexthop
            rt.expire = max(rt.expire, self.now + self.cfg.active_route_timeout)
            if pkt.is_data and pkt.src != self.addr:
                rt.last_relay = self.now
            nexthop = rt.nexthop
        else:
            pkt.nexthop = BROADCAST
            pkt.dst = BROADCAST
            nexthop = None
        if delay > 0:
            self.kernel.schedule(delay, self._send_now, pkt, event, nexthop,
                                 kind=EventKind.DELIVERY, target=self.addr)
        else:
            self._send_now(pkt, event, nexthop)

    def sendHello(self) -> None:
        h = Rrep(1, self.addr, self.seqno, self.cfg.hello_lifetime, self.now,
                 code=AodvType.HELLO)
        pkt = control_packet(h, self.addr, BROADCAST, 1, self.now)
        self._send_now(pkt, "s", None)

    def sendRequest(self, dst: int) -> None:
        cfg, now = self.cfg, self.now
        rt = self.rtable.add(dst)
        if rt.is_up or rt.req_timeout > now:
            return
        if rt.req_cnt > cfg.rreq_retries:
            # discovery exhausted: give up on what is buffered and hold off
            rt.req_timeout = now + cfg.max_rreq_timeout
            rt.req_cnt = 0
            for p in self.rqueue.drain(dst):
                self.drop(p, "NRTE")
            return

        self.seqno += 2
        self.bid += 1
        rq = Rreq(0, self.bid, dst, rt.seqno, self.addr, self.seqno, now)
        pkt = control_packet(rq, self.addr, BROADCAST, cfg.network_diameter, now)
        wait = min(cfg.net_traversal_time * 2 ** rt.req_cnt, cfg.max_rreq_timeout)
        rt.req_cnt += 1
        rt.req_timeout = now + wait
        self._send_now(pkt, "s", None)
        self.kernel.schedule(wait, self._retry_request, dst, kind=EventKind.TIMER,
                             target=self.addr)

    def _retry_request(self, dst: int) -> None:
        rt = self.rtable.lookup(dst)
        if rt is not None and rt.flag is RouteFlag.DOWN and self.rqueue.has(dst):
            self.sendRequest(dst)

    def sendReply(self, ipdst: int, hop_count: int, rpdst: int, rpseq: int,
                  lifetime: float, timestamp: float) -> None:
        rp = Rrep(hop_count, rpdst, rpseq, lifetime, timestamp)
        pkt = control_packet(rp, self.addr, ipdst, self.cfg.network_diameter, self.now)
        rt = self.rtable.lookup(ipdst)
        if rt is None or not rt.is_up:
            self.drop(pkt, "NRTE")
            return
        self.forward(rt, pkt)

    def sendError(self, dests, jitter: bool = True) -> None:
        dests = list(dests)
        if not dests:
            raise ValueError("RERR needs at least one unreachable destination")
        pkt = control_packet(Rerr(dests), self.addr, BROADCAST, 1, self.now)
        if jitter:
            # (0, jitter] so a jittered error never leaves at the current instant
            delay = self.cfg.broadcast_jitter * (1.0 - self.kernel.uniform())
            self.kernel.schedule(delay, self._send_now, pkt, "s", None,
                                 kind=EventKind.DELIVERY, target=self.addr)
        else:
            self._send_now(pkt, "s", None)

    # -- route table management --------------------------------------------------------------

    def rt_add(self, dst: int) -> RouteEntry:
        return self.rtable.add(dst)

    def rt_update(self, rt: RouteEntry, seqnum: int, metric: int, nexthop: int,
                  expire_time: float) -> None:
        rt.seqno = seqnum
        rt.hops = metric
        rt.nexthop = nexthop
        rt.expire = expire_time
        rt.set_flag(RouteFlag.UP, self.now)

    def rt_down(self, rt: RouteEntry) -> None:
        if rt.flag is RouteFlag.DOWN:
            return
        rt.set_flag(RouteFlag.DOWN, self.now)
        rt.nexthop = -1
        rt.seqno += 1
        rt.hops = INFINITY
        rt.expire = self.now + self.cfg.delete_period

    def rt_resolve(self, pkt: Packet) -> None:
        rt = self.rtable.add(pkt.dst)
        if rt.is_up:
            self.forward(rt, pkt)
        elif pkt.src == self.addr:
            self.enque(pkt)
            self.sendRequest(pkt.dst)
        elif rt.flag is RouteFlag.REPAIR:
            self.enque(pkt)
        else:
            self.drop(pkt, "NRTE")
            self.sendError([(pkt.dst, rt.seqno + 1)], jitter=False)

    def local_rt_repair(self, rt: RouteEntry, pkt: Packet) -> None:
        self.enque(pkt)
        if not rt.is_up:
            return
        rt.set_flag(RouteFlag.REPAIR, self.now)
        # bump the destination seqno so stale routes upstream cannot answer
        rt.seqno += 1
        rt.req_cnt = 0
        rt.req_timeout = 0.0
        self.sendRequest(rt.dst)
        self._arm(self.cfg.local_repair_wait, TimerKind.LOCAL_REPAIR, rt.dst)

    def _finish_repair(self, dst: int) -> None:
        rt = self.rtable.lookup(dst)
        if rt is None or rt.flag is not RouteFlag.REPAIR:
            return
        self.rt_down(rt)
        for p in self.rqueue.drain(dst):
            self.drop(p, "NRTE")
        self.sendError([(dst, rt.seqno)], jitter=False)

    def rt_ll_failed(self, pkt: Packet, broken: int) -> None:
        """Link layer gave up delivering ``pkt`` to neighbour ``broken``."""
        if not self.cfg.link_layer_detection or not pkt.is_data or pkt.is_broadcast:
            self.drop(pkt, "CBK")
            return
        rt = self.rtable.lookup(pkt.dst)
        if rt is not None and rt.flag is RouteFlag.REPAIR:
            self.enque(pkt)
            return
        if (rt is not None and rt.is_up and rt.nexthop == broken
                and rt.hops < pkt.num_forwards):
            self.local_rt_repair(rt, pkt)
            return
        self.drop(pkt, "CBK")
        self.neighbors.delete(broken)
        self.handle_link_failure(broken)

    def handle_link_failure(self, id: int) -> None:
        dests = []
        for rt in self.rtable:
            if rt.is_up and rt.nexthop == id:
                self.rt_down(rt)
                dests.append((rt.dst, rt.seqno))
        if dests:
            self.sendError(dests, jitter=False)

    def rt_purge(self) -> None:
        now = self.now
        for p in self.rqueue.purge(now):
            self.drop(p, "TOUT")
        for rt in self.rtable:
            dst = rt.dst
            if rt.is_up and rt.expire <= now:
                for p in self.rqueue.drain(dst):
                    self.drop(p, "NRTE")
                self.rt_down(rt)
            elif rt.is_up:
                self._flush(dst)
            elif rt.flag is RouteFlag.DOWN:
                if self.rqueue.has(dst):
                    self.sendRequest(dst)
                elif rt.expire <= now and rt.req_timeout <= now:
                    self.rtable.delete(dst)
