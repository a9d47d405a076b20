"""Per-agent AODV state: routes, neighbours, broadcast-id cache, send buffer.

These are plain containers. Coupling between them (a HELLO installing a
1-hop route, a neighbour loss tearing down routes) lives in the agent.
"""

from __future__ import annotations

from collections import OrderedDict, deque
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Iterator

from aodvsim.config import INFINITY


class RouteFlag(Enum):
    UP = "UP"
    DOWN = "DOWN"
    REPAIR = "REPAIR"


ALLOWED_TRANSITIONS = frozenset({
    (RouteFlag.DOWN, RouteFlag.UP),
    (RouteFlag.UP, RouteFlag.REPAIR),
    (RouteFlag.REPAIR, RouteFlag.UP),
    (RouteFlag.UP, RouteFlag.DOWN),
    (RouteFlag.REPAIR, RouteFlag.DOWN),
})


class IllegalTransition(RuntimeError):
    pass


@dataclass
class RouteEntry:
    dst: int
    seqno: int = 0
    hops: int = INFINITY
    nexthop: int = -1
    expire: float = 0.0
    flag: RouteFlag = RouteFlag.DOWN
    # route-discovery bookkeeping
    req_cnt: int = 0
    req_timeout: float = 0.0
    # last time data from another source was relayed along this route
    last_relay: float = float("-inf")
    _table: Any = field(default=None, repr=False, compare=False)

    def set_flag(self, new: RouteFlag, now: float | None = None) -> None:
        old = self.flag
        if old is new:
            return
        if (old, new) not in ALLOWED_TRANSITIONS:
            raise IllegalTransition(f"route to {self.dst}: {old.name} -> {new.name}")
        self.flag = new
        if self._table is not None:
            self._table.history.append((now, self.dst, old, new))

    @property
    def is_up(self) -> bool:
        return self.flag is RouteFlag.UP


class RoutingTable:
    def __init__(self):
        self.entries: dict[int, RouteEntry] = {}
        # (time, dst, old_flag, new_flag) for every flag change
        self.history: list[tuple] = []

    def __len__(self):
        return len(self.entries)

    def __iter__(self) -> Iterator[RouteEntry]:
        return iter(list(self.entries.values()))

    def __contains__(self, dst):
        return dst in self.entries

    def lookup(self, dst: int) -> RouteEntry | None:
        return self.entries.get(dst)

    def add(self, dst: int) -> RouteEntry:
        rt = self.entries.get(dst)
        if rt is None:
            rt = RouteEntry(dst, _table=self)
            self.entries[dst] = rt
        return rt

    def delete(self, dst: int) -> None:
        self.entries.pop(dst, None)


@dataclass
class Neighbor:
    id: int
    expire: float


class NeighborTable:
    def __init__(self):
        self._nb: dict[int, Neighbor] = {}

    def __len__(self):
        return len(self._nb)

    def __iter__(self):
        return iter(list(self._nb.values()))

    def insert(self, id: int, expire: float) -> Neighbor:
        nb = self._nb.get(id)
        if nb is None:
            nb = self._nb[id] = Neighbor(id, expire)
        else:
            nb.expire = expire
        return nb

    def lookup(self, id: int) -> Neighbor | None:
        return self._nb.get(id)

    def delete(self, id: int) -> bool:
        return self._nb.pop(id, None) is not None

    def expired(self, now: float) -> list[int]:
        return [nb.id for nb in self._nb.values() if nb.expire <= now]


class BroadcastIdCache:
    """Remembers (originator, broadcast id) pairs to suppress duplicate RREQs."""

    def __init__(self, save_time: float):
        self.save_time = save_time
        self._ids: dict[tuple[int, int], float] = {}

    def __len__(self):
        return len(self._ids)

    def insert(self, src: int, bid: int, now: float) -> None:
        self._ids[(src, bid)] = now + self.save_time

    def lookup(self, src: int, bid: int, now: float) -> bool:
        exp = self._ids.get((src, bid))
        return exp is not None and now < exp

    def purge(self, now: float) -> int:
        dead = [k for k, exp in self._ids.items() if exp <= now]
        for k in dead:
            del self._ids[k]
        return len(dead)


@dataclass
class _Queued:
    pkt: Any
    expire: float


class RequestQueue:
    """Per-destination FIFO of data packets waiting for a route.

    The capacity bound is global across destinations; when full, the oldest
    packet overall is evicted and handed back to the caller.
    """

    def __init__(self, capacity: int = 64, timeout: float = 30.0):
        self.capacity = capacity
        self.timeout = timeout
        self._q: OrderedDict[int, deque[_Queued]] = OrderedDict()
        self._order: deque[tuple[int, _Queued]] = deque()
        self._len = 0

    def __len__(self):
        return self._len

    def length(self, dst: int) -> int:
        return len(self._q.get(dst, ()))

    def has(self, dst: int) -> bool:
        return self.length(dst) > 0

    def destinations(self) -> list[int]:
        return [d for d, q in self._q.items() if q]

    def enque(self, dst: int, pkt, now: float):
        item = _Queued(pkt, now + self.timeout)
        self._q.setdefault(dst, deque()).append(item)
        self._order.append((dst, item))
        self._len += 1
        if self._len > self.capacity:
            return self._evict_oldest()
        return None

    def _evict_oldest(self):
        while self._order:
            dst, item = self._order.popleft()
            q = self._q.get(dst)
            if q and q[0] is item:
                q.popleft()
                self._len -= 1
                return item.pkt
        return None

    def deque(self, dst: int):
        q = self._q.get(dst)
        if not q:
            return None
        item = q.popleft()
        self._len -= 1
        self._forget(dst, item)
        return item.pkt

    def _forget(self, dst, item):
        for i, (d, it) in enumerate(self._order):
            if it is item:
                del self._order[i]
                return

    def drain(self, dst: int) -> list:
        out = []
        while (p := self.deque(dst)) is not None:
            out.append(p)
        return out

    def purge(self, now: float) -> list:
        """Remove and return packets whose buffering timeout has passed."""
        out = []
        for dst, q in self._q.items():
            while q and q[0].expire <= now:
                item = q.popleft()
                self._len -= 1
                self._forget(dst, item)
                out.append(item.pkt)
        return out
