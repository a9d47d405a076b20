"""Deterministic MANET simulator built around an AODV routing agent."""

from aodvsim.config import AodvConfig
from aodvsim.kernel import Kernel
from aodvsim.scenario import FlowSpec, MotionEvent, ScenarioConfig, ScenarioError, parse_scenario
from aodvsim.sim import Simulation
from aodvsim.trace import TraceParseError, TraceRecord, format_record, parse_line

__all__ = [
    "AodvConfig",
    "FlowSpec",
    "Kernel",
    "MotionEvent",
    "ScenarioConfig",
    "ScenarioError",
    "Simulation",
    "TraceParseError",
    "TraceRecord",
    "format_record",
    "parse_line",
    "parse_scenario",
]

__version__ = "0.1.0"
