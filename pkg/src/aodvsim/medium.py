"""Unit-disk wireless medium, setdest mobility and CBR traffic sources."""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass
from typing import Callable

from aodvsim.kernel import EventKind, Kernel
from aodvsim.packet import BROADCAST, Packet
from aodvsim.scenario import FlowSpec, Position, ScenarioConfig

LL_RETRIES = 3
LL_RETRY_SPACING = 0.03


@dataclass(frozen=True)
class _Leg:
    start: float
    origin: Position
    dest: Position
    speed: float
    arrive: float


class Mobility:
    """Piecewise-linear node trajectories.

    A node sits still until its first setdest, then moves in a straight line
    at the commanded speed and stops at the destination. A later setdest
    starts from wherever the node is at that instant.
    """

    def __init__(self, initial: dict[int, Position], motion=()):
        self.initial = dict(initial)
        self._legs: dict[int, list[_Leg]] = {}
        for ev in sorted(motion, key=lambda m: m.at):
            here = self.position_at(ev.node, ev.at)
            dist = math.hypot(ev.dest.x - here.x, ev.dest.y - here.y)
            leg = _Leg(ev.at, here, ev.dest, ev.speed, ev.at + dist / ev.speed)
            self._legs.setdefault(ev.node, []).append(leg)

    @classmethod
    def from_scenario(cls, sc: ScenarioConfig) -> "Mobility":
        return cls({n: sc.position(n) for n in range(sc.nn)}, sc.motion)

    def position_at(self, node: int, t: float) -> Position:
        legs = self._legs.get(node)
        if legs:
            i = bisect.bisect_right(legs, t, key=lambda leg: leg.start) - 1
            if i >= 0:
                return _along(legs[i], t)
        return self.initial.get(node, Position(0.0, 0.0))


def _along(leg: _Leg, t: float) -> Position:
    if t >= leg.arrive:
        return leg.dest
    dx, dy = leg.dest.x - leg.origin.x, leg.dest.y - leg.origin.y
    dist = math.hypot(dx, dy)
    frac = leg.speed * (t - leg.start) / dist
    return Position(leg.origin.x + frac * dx, leg.origin.y + frac * dy)


def distance(a: Position, b: Position) -> float:
    return math.hypot(a.x - b.x, a.y - b.y)


class Medium:
    """Delivers packets between nodes within ``range`` metres of each other.

    ``deliver(pkt, to)`` is called at reception time with a private copy of
    the packet whose ``prev_hop``/MAC fields describe the hop just taken.
    """

    def __init__(self, kernel: Kernel, mobility: Mobility, nodes: int, range: float = 250.0,
                 per_hop_delay: float = 0.002, link_layer_detection: bool = True,
                 deliver: Callable[[Packet, int], None] | None = None):
        self.kernel = kernel
        self.mobility = mobility
        self.nodes = nodes
        self.range = range
        self.per_hop_delay = per_hop_delay
        self.link_layer_detection = link_layer_detection
        self.deliver = deliver
        # (a, b) pairs forced apart regardless of distance
        self.cut: set[frozenset] = set()

    def in_range(self, a: int, b: int, t: float) -> bool:
        if frozenset((a, b)) in self.cut:
            return False
        pa = self.mobility.position_at(a, t)
        pb = self.mobility.position_at(b, t)
        return distance(pa, pb) <= self.range

    def neighbors(self, node: int, t: float) -> list[int]:
        return [n for n in range(self.nodes) if n != node and self.in_range(node, n, t)]

    def broadcast_deliver(self, pkt: Packet, sender: int, t: float | None = None) -> list[int]:
        t = self.kernel.now if t is None else t
        receivers = self.neighbors(sender, t)
        for r in receivers:
            self._schedule_rx(pkt, sender, r, BROADCAST)
        return receivers

    def unicast_deliver(self, pkt: Packet, sender: int, to: int,
                        on_fail: Callable[[Packet, int], None] | None = None) -> str:
        """Send to one neighbour; returns "delivered", "retrying" or "lost"."""
        return self._attempt(pkt, sender, to, on_fail, 0)

    def _attempt(self, pkt, sender, to, on_fail, tries) -> str:
        if self.in_range(sender, to, self.kernel.now):
            self._schedule_rx(pkt, sender, to, to)
            return "delivered"
        if not self.link_layer_detection:
            return "lost"
        if tries < LL_RETRIES:
            self.kernel.schedule(LL_RETRY_SPACING, self._attempt, pkt, sender, to, on_fail,
                                 tries + 1, kind=EventKind.DELIVERY, target=sender)
            return "retrying"
        if on_fail is not None:
            on_fail(pkt, to)
        return "lost"

    def _schedule_rx(self, pkt, sender, to, mac_dst):
        p = pkt.copy()
        p.prev_hop = sender
        p.mac_src = sender
        p.mac_dst = mac_dst
        if p.is_data:
            p.num_forwards += 1
        self.kernel.schedule(self.per_hop_delay, self._rx, p, to,
                             kind=EventKind.DELIVERY, target=to)

    def _rx(self, pkt, to):
        if self.deliver is not None:
            self.deliver(pkt, to)


def emission_times(flow: FlowSpec) -> list[float]:
    """CBR send instants in [start, stop)."""
    interval = 1.0 / flow.rate
    out = []
    k = 0
    while True:
        t = flow.start + k * interval
        if t >= flow.stop:
            break
        out.append(t)
        k += 1
    return out
