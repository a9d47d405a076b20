"""Scenario files: topology, motion, traffic and protocol overrides.

The format is line oriented. ``#`` starts a comment. Sections::

    [options]       key = value   (nn, x, y, stop, range, per_hop_delay, seed)
    [positions]     node x y
    [motion]        at node x y speed      (a setdest command)
    [flows]         src dst rate bytes start stop
    [aodv]          key = value   (any AodvConfig field, case-insensitive)

Boolean values accept on/off, true/false, yes/no, 1/0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, fields
from pathlib import Path

from aodvsim.config import AodvConfig


class ScenarioError(ValueError):
    def __init__(self, lineno: int | None, message: str):
        self.lineno = lineno
        self.message = message
        super().__init__(f"line {lineno}: {message}" if lineno else message)


@dataclass(frozen=True)
class Position:
    x: float
    y: float
    z: float = 0.0


@dataclass(frozen=True)
class MotionEvent:
    at: float
    node: int
    dest: Position
    speed: float


@dataclass(frozen=True)
class FlowSpec:
    src: int
    dst: int
    rate: float        # packets per second
    payload: int       # bytes
    start: float
    stop: float


@dataclass
class ScenarioConfig:
    nn: int = 1
    field_x: float = 500.0
    field_y: float = 500.0
    stop: float = 100.0
    range: float = 250.0
    per_hop_delay: float = 0.002
    seed: int = 0
    positions: dict[int, Position] = field(default_factory=dict)
    motion: list[MotionEvent] = field(default_factory=list)
    flows: list[FlowSpec] = field(default_factory=list)
    aodv: AodvConfig = field(default_factory=AodvConfig)

    def position(self, node: int) -> Position:
        return self.positions.get(node, Position(0.0, 0.0))

    def validate(self) -> None:
        """Check cross-field invariants; raises ScenarioError without a line number."""
        if self.nn < 1:
            raise ScenarioError(None, "nn must be >= 1")
        for n, p in self.positions.items():
            self._check_node(n, None)
            self._check_pos(p, None)
        for m in self.motion:
            self._check_node(m.node, None)
            self._check_pos(m.dest, None)
        for f in self.flows:
            self._check_flow(f, None)

    def _check_node(self, n: int, lineno) -> None:
        if not 0 <= n < self.nn:
            raise ScenarioError(lineno, f"node {n} out of range (nn={self.nn})")

    def _check_pos(self, p: Position, lineno) -> None:
        if not (0 <= p.x <= self.field_x and 0 <= p.y <= self.field_y):
            raise ScenarioError(lineno, f"position ({p.x}, {p.y}) outside "
                                        f"{self.field_x} x {self.field_y} field")

    def _check_flow(self, f: FlowSpec, lineno) -> None:
        self._check_node(f.src, lineno)
        self._check_node(f.dst, lineno)
        if f.src == f.dst:
            raise ScenarioError(lineno, "flow source equals destination")
        if f.rate <= 0 or f.payload <= 0:
            raise ScenarioError(lineno, "flow rate and size must be positive")
        if not 0 <= f.start <= f.stop <= self.stop:
            raise ScenarioError(lineno, f"flow window [{f.start}, {f.stop}] must lie in "
                                        f"[0, {self.stop}] with start <= stop")


_OPTIONS = {
    "nn": ("nn", int),
    "x": ("field_x", float),
    "y": ("field_y", float),
    "stop": ("stop", float),
    "range": ("range", float),
    "per_hop_delay": ("per_hop_delay", float),
    "seed": ("seed", int),
}

_BOOLS = {"on": True, "true": True, "yes": True, "1": True,
          "off": False, "false": False, "no": False, "0": False}


def parse_bool(text: str) -> bool:
    try:
        return _BOOLS[text.strip().lower()]
    except KeyError:
        raise ValueError(f"not a boolean: {text!r}") from None


def _number(tok: str, kind, lineno: int, what: str):
    try:
        v = kind(tok)
    except ValueError:
        raise ScenarioError(lineno, f"malformed number for {what}: {tok!r}") from None
    if kind is float and not math.isfinite(v):
        raise ScenarioError(lineno, f"non-finite value for {what}: {tok!r}")
    return v


def _keyvalue(line: str, lineno: int) -> tuple[str, str]:
    if "=" not in line:
        raise ScenarioError(lineno, f"expected 'key = value', got {line!r}")
    k, v = line.split("=", 1)
    return k.strip().lower(), v.strip()


def parse_scenario(text: str) -> ScenarioConfig:
    """Parse scenario text. Raises ScenarioError naming the first bad line."""
    cfg = ScenarioConfig()
    aodv_over: dict[str, object] = {}
    aodv_types = {f.name: f.type for f in fields(AodvConfig)}
    # node references are checked after [options] is known, in file order
    deferred: list[tuple[int, str, object]] = []
    section = None

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("["):
            if not line.endswith("]"):
                raise ScenarioError(lineno, f"bad section header {line!r}")
            section = line[1:-1].strip().lower()
            if section not in ("options", "positions", "motion", "flows", "aodv"):
                raise ScenarioError(lineno, f"unknown section [{section}]")
            continue
        if section is None:
            raise ScenarioError(lineno, "content before first section header")

        if section == "options":
            k, v = _keyvalue(line, lineno)
            if k not in _OPTIONS:
                raise ScenarioError(lineno, f"unknown option {k!r}")
            attr, kind = _OPTIONS[k]
            setattr(cfg, attr, _number(v, kind, lineno, k))
        elif section == "aodv":
            k, v = _keyvalue(line, lineno)
            if k not in aodv_types:
                raise ScenarioError(lineno, f"unknown AODV parameter {k!r}")
            typ = aodv_types[k]
            if "bool" in typ:
                try:
                    aodv_over[k] = parse_bool(v)
                except ValueError as e:
                    raise ScenarioError(lineno, str(e)) from None
            elif "int" in typ:
                aodv_over[k] = _number(v, int, lineno, k)
            else:
                aodv_over[k] = _number(v, float, lineno, k)
        else:
            toks = line.split()
            if section == "positions":
                if len(toks) not in (3, 4):
                    raise ScenarioError(lineno, "expected: node x y [z]")
                node = _number(toks[0], int, lineno, "node")
                pos = Position(_number(toks[1], float, lineno, "x"),
                               _number(toks[2], float, lineno, "y"))
                deferred.append((lineno, "position", (node, pos)))
            elif section == "motion":
                if len(toks) != 5:
                    raise ScenarioError(lineno, "expected: at node x y speed")
                ev = MotionEvent(_number(toks[0], float, lineno, "time"),
                                 _number(toks[1], int, lineno, "node"),
                                 Position(_number(toks[2], float, lineno, "x"),
                                          _number(toks[3], float, lineno, "y")),
                                 _number(toks[4], float, lineno, "speed"))
                if ev.speed <= 0:
                    raise ScenarioError(lineno, "speed must be positive")
                if ev.at < 0:
                    raise ScenarioError(lineno, "motion time must be non-negative")
                deferred.append((lineno, "motion", ev))
            elif section == "flows":
                if len(toks) != 6:
                    raise ScenarioError(lineno, "expected: src dst rate bytes start stop")
                fl = FlowSpec(_number(toks[0], int, lineno, "src"),
                              _number(toks[1], int, lineno, "dst"),
                              _number(toks[2], float, lineno, "rate"),
                              _number(toks[3], int, lineno, "bytes"),
                              _number(toks[4], float, lineno, "start"),
                              _number(toks[5], float, lineno, "stop"))
                deferred.append((lineno, "flow", fl))

    if cfg.nn < 1:
        raise ScenarioError(None, "nn must be >= 1")
    if cfg.field_x <= 0 or cfg.field_y <= 0 or cfg.stop < 0:
        raise ScenarioError(None, "field dimensions must be positive and stop non-negative")
    if cfg.range < 0 or cfg.per_hop_delay < 0:
        raise ScenarioError(None, "range and per_hop_delay must be non-negative")

    for lineno, kind, item in deferred:
        if kind == "position":
            node, pos = item
            cfg._check_node(node, lineno)
            cfg._check_pos(pos, lineno)
            cfg.positions[node] = pos
        elif kind == "motion":
            cfg._check_node(item.node, lineno)
            cfg._check_pos(item.dest, lineno)
            cfg.motion.append(item)
        else:
            cfg._check_flow(item, lineno)
            cfg.flows.append(item)

    try:
        cfg.aodv = AodvConfig(**aodv_over)
    except (TypeError, ValueError) as e:
        raise ScenarioError(None, f"[aodv]: {e}") from None
    return cfg


def load_scenario(path) -> ScenarioConfig:
    return parse_scenario(Path(path).read_text(encoding="utf-8"))
