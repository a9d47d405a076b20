"""Delivery and overhead statistics computed from a parsed trace."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field

from aodvsim.trace import TraceRecord

LABELS = ("HELLO", "REQUEST", "REPLY", "ERROR")


@dataclass
class StatsReport:
    originated: int = 0
    delivered: int = 0
    dropped: int = 0                      # data packets dropped
    drops_by_reason: Counter = field(default_factory=Counter)   # every D record
    control_sent: int = 0
    aodv_counts: Counter = field(default_factory=Counter)
    hop_counts: list[int] = field(default_factory=list)

    @property
    def in_flight(self) -> int:
        return self.originated - self.delivered - self.dropped

    @property
    def delivery_ratio(self) -> float:
        return self.delivered / self.originated if self.originated else 0.0

    @property
    def control_overhead(self) -> float:
        return self.control_sent / self.delivered if self.delivered else 0.0

    @property
    def mean_hops(self) -> float:
        return sum(self.hop_counts) / len(self.hop_counts) if self.hop_counts else 0.0

    def as_dict(self) -> dict[str, object]:
        d: dict[str, object] = {
            "originated": self.originated,
            "delivered": self.delivered,
            "dropped": self.dropped,
            "in_flight": self.in_flight,
            "delivery_ratio": f"{self.delivery_ratio:.6f}",
            "control_sent": self.control_sent,
            "control_overhead": f"{self.control_overhead:.6f}",
            "mean_hops": f"{self.mean_hops:.6f}",
            "drops_total": sum(self.drops_by_reason.values()),
        }
        for reason in sorted(self.drops_by_reason):
            d[f"drop_{reason}"] = self.drops_by_reason[reason]
        for label in LABELS:
            d[f"aodv_{label.lower()}"] = self.aodv_counts.get(label, 0)
        return d

    def key_values(self) -> str:
        return "\n".join(f"{k}={v}" for k, v in self.as_dict().items())

    def table(self) -> str:
        rows = [
            ("data packets originated", self.originated),
            ("data packets delivered", self.delivered),
            ("data packets dropped", self.dropped),
            ("in flight at end", self.in_flight),
            ("delivery ratio", f"{self.delivery_ratio:.4f}"),
            ("AODV packets sent", self.control_sent),
            ("control overhead", f"{self.control_overhead:.4f}"),
            ("mean hop count", f"{self.mean_hops:.3f}"),
        ]
        rows += [(f"drops ({r})", n) for r, n in sorted(self.drops_by_reason.items())]
        rows += [(f"AODV {label}", self.aodv_counts.get(label, 0)) for label in LABELS]
        width = max(len(name) for name, _ in rows)
        return "\n".join(f"{name:<{width}}  {val}" for name, val in rows)


def compute_stats(records: list[TraceRecord]) -> StatsReport:
    rep = StatsReport()
    sent_ttl: dict[int, int] = {}
    for rec in records:
        if rec.label:
            rep.aodv_counts[rec.label] += 1
        if rec.event == "D":
            rep.drops_by_reason[rec.reason] += 1
        if rec.ptype == "AODV":
            if rec.layer == "RTR" and rec.event in "sf":
                rep.control_sent += 1
            continue
        if rec.layer == "AGT" and rec.event == "s":
            rep.originated += 1
            sent_ttl[rec.seq] = rec.ttl
        elif rec.layer == "AGT" and rec.event == "r":
            rep.delivered += 1
            if rec.seq in sent_ttl:
                rep.hop_counts.append(sent_ttl[rec.seq] - rec.ttl)
        elif rec.event == "D":
            rep.dropped += 1
    return rep
