"""Protocol constants for the AODV agent.

Every field can be overridden from the ``[aodv]`` section of a scenario
file; keys there are matched case-insensitively against the field names.
"""

from __future__ import annotations

from dataclasses import dataclass, fields

# hop-count sentinel for unreachable destinations (u_int16 max)
INFINITY = 0xFFFF


@dataclass
class AodvConfig:
    hello_enabled: bool = False
    link_layer_detection: bool = True

    hello_interval: float = 1.0
    allowed_hello_loss: int = 3
    min_hello_interval: float | None = None   # default 0.75 * hello_interval
    max_hello_interval: float | None = None   # default 1.25 * hello_interval

    bcast_id_save: float = 6.0
    frequency: float = 0.5
    network_diameter: int = 30
    rreq_retries: int = 3
    active_route_timeout: float = 10.0
    my_route_timeout: float = 10.0
    delete_period: float = 4.5
    rev_route_life: float = 6.0
    node_traversal_time: float = 0.03
    max_rreq_timeout: float = 10.0
    local_repair_wait: float | None = None    # default net_traversal_time

    rqueue_capacity: int = 64
    rqueue_timeout: float = 30.0
    broadcast_jitter: float = 0.01

    def __post_init__(self):
        if self.min_hello_interval is None:
            self.min_hello_interval = 0.75 * self.hello_interval
        if self.max_hello_interval is None:
            self.max_hello_interval = 1.25 * self.hello_interval
        if self.local_repair_wait is None:
            self.local_repair_wait = self.net_traversal_time
        self.validate()

    def validate(self) -> None:
        if self.min_hello_interval > self.max_hello_interval:
            raise ValueError("min_hello_interval exceeds max_hello_interval")
        for name in ("hello_interval", "bcast_id_save", "frequency", "active_route_timeout",
                     "my_route_timeout", "delete_period", "node_traversal_time",
                     "max_rreq_timeout", "rqueue_timeout", "local_repair_wait"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if self.min_hello_interval <= 0:
            raise ValueError("min_hello_interval must be positive")
        if self.network_diameter < 1 or self.rqueue_capacity < 1:
            raise ValueError("network_diameter and rqueue_capacity must be >= 1")
        if self.allowed_hello_loss < 1 or self.rreq_retries < 0:
            raise ValueError("allowed_hello_loss must be >= 1 and rreq_retries >= 0")

    @property
    def net_traversal_time(self) -> float:
        return 2.0 * self.node_traversal_time * self.network_diameter

    @property
    def neighbor_hold(self) -> float:
        """How long a neighbour stays listed after its last HELLO."""
        return 1.5 * self.allowed_hello_loss * self.hello_interval

    @property
    def hello_lifetime(self) -> float:
        return (1 + self.allowed_hello_loss) * self.hello_interval

    @property
    def neighbor_purge_interval(self) -> float:
        return 1.5 * self.hello_interval

    @classmethod
    def field_types(cls) -> dict[str, str]:
        return {f.name: f.type for f in fields(cls)}
