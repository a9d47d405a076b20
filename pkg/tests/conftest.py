import pytest

from aodvsim.config import AodvConfig
from aodvsim.scenario import FlowSpec, MotionEvent, Position, ScenarioConfig
from aodvsim.sim import Simulation

# the four sample lines that the trace module must reproduce byte-for-byte
GOLDEN_LINES = [
    "s 0.000000000 _0_ RTR  --- 0 AODV 44 [0 0 0 0] ------- [0:255 -1:255 1 0] [0x1 1 [0 2] 4.000000] (HELLO)",
    "s 10.000000000 _0_ RTR  --- 0 AODV 48 [0 0 0 0] ------- [0:255 -1:255 30 0] [0x2 1 1 [1 0] [0 4]] (REQUEST)",
    "s 21.500000000 _0_ RTR  --- 0 AODV 48 [0 0 0 0] ------- [0:255 -1:255 30 0] [0x2 1 4 [1 0] [0 12]] (REQUEST)",
    "r 21.501260809 _2_ RTR  --- 0 AODV 48 [0 ffffffff 0 800] ------- [0:255 -1:255 30 0] [0x2 1 4 [1 0] [0 12]] (REQUEST)",
]


def make_scenario(positions, flows=(), motion=(), stop=30.0, field=(1000.0, 1000.0),
                  seed=0, range=250.0, **aodv):
    """Build a ScenarioConfig from plain tuples."""
    return ScenarioConfig(
        nn=len(positions), field_x=field[0], field_y=field[1], stop=stop, range=range,
        seed=seed,
        positions={i: Position(*p) for i, p in enumerate(positions)},
        motion=[MotionEvent(at, n, Position(x, y), v) for at, n, x, y, v in motion],
        flows=[FlowSpec(*f) for f in flows],
        aodv=AodvConfig(**aodv),
    )


def make_sim(positions, **kw):
    sim_kw = {k: kw.pop(k) for k in ("hello", "lld") if k in kw}
    return Simulation(make_scenario(positions, **kw), **sim_kw)


def line_positions(n, spacing=200.0, y=200.0):
    return [(i * spacing, y) for i in range(n)]


@pytest.fixture
def line3():
    return line_positions(3)


# -- acceptance reporting -------------------------------------------------------

_criteria = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n, text): acceptance criterion number")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    m = item.get_closest_marker("criterion")
    if m is None:
        return
    n, text = m.args
    if rep.when == "call" or (rep.when == "setup" and rep.failed):
        prev = _criteria.get(n, (text, True))
        _criteria[n] = (text, prev[1] and rep.passed)


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_criteria):
        text, ok = _criteria[n]
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] {n:>2}. {text}")
