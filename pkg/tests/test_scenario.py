from pathlib import Path

import pytest

from aodvsim.scenario import Position, ScenarioError, load_scenario, parse_bool, parse_scenario

ROOT = Path(__file__).resolve().parents[1]

MINIMAL = """
[options]
nn = 2
x = 100
y = 100
stop = 10
[positions]
0 10 10
1 20 20
"""


def test_reference_scenario():
    sc = load_scenario(ROOT / "scenarios" / "reference3.scn")
    assert (sc.nn, sc.field_x, sc.field_y, sc.stop) == (3, 500.0, 400.0, 150.0)
    assert sc.positions[1] == Position(490.0, 285.0)
    assert [m.at for m in sc.motion] == [10.0, 15.0, 110.0]
    assert sc.motion[1].speed == 5.0
    (fl,) = sc.flows
    assert (fl.src, fl.dst, fl.rate, fl.payload, fl.start, fl.stop) == (0, 1, 4.0, 512, 10.0, 150.0)
    assert sc.aodv.hello_enabled is False
    assert sc.aodv.link_layer_detection is True


def test_minimal_defaults():
    sc = parse_scenario(MINIMAL)
    assert sc.range == 250.0
    assert sc.per_hop_delay == 0.002
    assert sc.flows == [] and sc.motion == []


def test_aodv_overrides_case_insensitive():
    sc = parse_scenario(MINIMAL + "[aodv]\nHELLO_Interval = 2.0\nrreq_retries = 5\nhello_enabled = yes\n")
    assert sc.aodv.hello_interval == 2.0
    assert sc.aodv.rreq_retries == 5
    assert sc.aodv.hello_enabled


def test_comments_and_blank_lines():
    sc = parse_scenario("# header\n\n" + MINIMAL.replace("0 10 10", "0 10 10   # first"))
    assert sc.positions[0] == Position(10.0, 10.0)


def test_zero_length_flow_allowed():
    sc = parse_scenario(MINIMAL + "[flows]\n0 1 1 64 5 5\n")
    assert sc.flows[0].start == sc.flows[0].stop


@pytest.mark.parametrize("extra,lineno", [
    ("[positions]\n5 1 1\n", 11),                 # node out of range
    ("[positions]\n0 150 1\n", 11),               # outside field
    ("[flows]\n0 0 1 64 0 1\n", 11),              # src == dst
    ("[flows]\n0 1 1 64 5 20\n", 11),             # past stop
    ("[flows]\n0 1 1 64 6 5\n", 11),              # start > stop
    ("[flows]\n0 1 x 64 0 1\n", 11),              # malformed number
    ("[motion]\n1.0 0 5 5\n", 11),                # too few fields
    ("[motion]\n1.0 0 5 5 0\n", 11),              # zero speed
    ("[bogus]\n", 10),
    ("[aodv]\nnot_a_param = 1\n", 11),
    ("[aodv]\nhello_enabled = maybe\n", 11),
    ("[options]\nwidth = 3\n", 11),
])
def test_errors_carry_line_numbers(extra, lineno):
    with pytest.raises(ScenarioError) as exc:
        parse_scenario(MINIMAL + extra)
    assert exc.value.lineno == lineno
    assert f"line {lineno}" in str(exc.value)


def test_content_before_section():
    with pytest.raises(ScenarioError) as exc:
        parse_scenario("nn = 3\n")
    assert exc.value.lineno == 1


def test_invalid_aodv_value_rejected():
    with pytest.raises(ScenarioError):
        parse_scenario(MINIMAL + "[aodv]\nhello_interval = -1\n")


def test_parse_bool():
    assert parse_bool("On") and parse_bool("1") and not parse_bool("off")
    with pytest.raises(ValueError):
        parse_bool("perhaps")
