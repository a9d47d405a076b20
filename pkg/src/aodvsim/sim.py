"""Wires kernel, medium, agents and traffic into one runnable simulation."""

from __future__ import annotations

import dataclasses
import itertools
from pathlib import Path
from typing import IO

from aodvsim.agent import AodvAgent
from aodvsim.kernel import EventKind, Kernel
from aodvsim.medium import Medium, Mobility, emission_times
from aodvsim.packet import Packet, data_packet, to_record
from aodvsim.scenario import FlowSpec, ScenarioConfig
from aodvsim.trace import TraceRecord, write_stream


class Simulation:
    def __init__(self, scenario: ScenarioConfig, seed: int | None = None,
                 hello: bool | None = None, lld: bool | None = None,
                 stop: float | None = None):
        overrides = {}
        if hello is not None:
            overrides["hello_enabled"] = hello
        if lld is not None:
            overrides["link_layer_detection"] = lld
        self.config = dataclasses.replace(scenario.aodv, **overrides)
        self.scenario = scenario
        self.stop = scenario.stop if stop is None else stop
        if self.stop < 0:
            raise ValueError("stop time must be non-negative")

        self.kernel = Kernel(scenario.seed if seed is None else seed)
        self.mobility = Mobility.from_scenario(scenario)
        self.medium = Medium(self.kernel, self.mobility, scenario.nn, scenario.range,
                             scenario.per_hop_delay, self.config.link_layer_detection,
                             deliver=self._deliver)
        self.records: list[TraceRecord] = []
        self.agents = [AodvAgent(i, self.config, self) for i in range(scenario.nn)]
        self._data_seq = itertools.count()
        self.started = False
        self.finished = False

    def log(self, rec: TraceRecord) -> None:
        self.records.append(rec)

    def _deliver(self, pkt: Packet, to: int) -> None:
        self.agents[to].recv(pkt)

    def deliver_local(self, node: int, pkt: Packet) -> None:
        self.log(to_record(pkt, "r", self.kernel.now, node, "AGT"))

    def send_data(self, src: int, dst: int, payload: int = 512) -> Packet:
        """Originate one data packet at ``src`` right now."""
        now = self.kernel.now
        pkt = data_packet(src, dst, next(self._data_seq), payload, now)
        pkt.ttl = self.config.network_diameter
        self.log(to_record(pkt, "s", now, src, "AGT"))
        self.agents[src].recv(pkt)
        return pkt

    def _emit(self, flow: FlowSpec, times: list[float], k: int) -> None:
        self.send_data(flow.src, flow.dst, flow.payload)
        if k + 1 < len(times):
            self.kernel.at(times[k + 1], self._emit, flow, times, k + 1,
                           kind=EventKind.TRAFFIC, target=flow.src)

    def start(self) -> None:
        if self.started:
            return
        self.started = True
        for agent in self.agents:
            agent.start()
        for flow in self.scenario.flows:
            times = [t for t in emission_times(flow) if t <= self.stop]
            if times:
                self.kernel.at(times[0], self._emit, flow, times, 0,
                               kind=EventKind.TRAFFIC, target=flow.src)
        self.kernel.at(self.stop, self._end, kind=EventKind.SIM_END)

    def _end(self) -> None:
        self.finished = True

    def run(self, until: float | None = None) -> list[TraceRecord]:
        self.start()
        t = self.stop if until is None else min(until, self.stop)
        self.kernel.run_until(t)
        return self.records

    def write_trace(self, sink: IO[str] | str | Path) -> int:
        if isinstance(sink, (str, Path)):
            with open(sink, "w", encoding="utf-8", newline="\n") as fh:
                return write_stream(self.records, fh)
        return write_stream(self.records, sink)
