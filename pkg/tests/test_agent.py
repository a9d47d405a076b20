import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from aodvsim.config import INFINITY
from aodvsim.packet import AodvType, Rerr, Rrep, Rreq, control_packet, data_packet
from aodvsim.tables import RouteFlag
from aodvsim.trace import format_record

from conftest import line_positions, make_sim


def labelled(sim, label, event=None, node=None):
    return [r for r in sim.records if r.label == label
            and (event is None or r.event == event) and (node is None or r.node == node)]


def drops(sim, reason=None):
    return [r for r in sim.records if r.event == "D" and (reason is None or r.reason == reason)]


class TestDiscoveryOnLine:
    """Static 0-1-2 line, 200 m apart. Routes worked out by hand."""

    @pytest.fixture
    def sim(self, line3):
        sim = make_sim(line3, stop=5.0)
        sim.start()
        sim.kernel.run_until(1.0)
        sim.send_data(0, 2, 512)
        sim.run(3.0)
        return sim

    def test_forward_route(self, sim):
        rt = sim.agents[0].rtable.lookup(2)
        assert (rt.flag, rt.hops, rt.nexthop) == (RouteFlag.UP, 2, 1)
        # destination seqno 2 bumped past the requested 0 and rounded to even
        assert rt.seqno == 4

    def test_reverse_route_at_destination(self, sim):
        rt = sim.agents[2].rtable.lookup(0)
        assert (rt.flag, rt.hops, rt.nexthop) == (RouteFlag.UP, 2, 1)
        assert rt.seqno == sim.agents[0].seqno

    def test_middle_node_has_both(self, sim):
        a1 = sim.agents[1].rtable
        assert (a1.lookup(0).nexthop, a1.lookup(0).hops) == (0, 1)
        assert (a1.lookup(2).nexthop, a1.lookup(2).hops) == (2, 1)

    def test_single_request_and_reply(self, sim):
        assert len(labelled(sim, "REQUEST", "s")) == 1
        assert len(labelled(sim, "REPLY", "s")) == 1
        assert len(labelled(sim, "REPLY", "f")) == 1
        req = labelled(sim, "REQUEST", "s")[0]
        assert req.aodv.bid == 1 and req.ttl == 30 and req.aodv.hops == 1

    def test_data_delivered(self, sim):
        got = [r for r in sim.records if r.layer == "AGT" and r.event == "r"]
        assert len(got) == 1 and got[0].node == 2 and got[0].ttl == 28

    def test_hop_and_ttl_sum_on_requests(self, sim):
        for r in labelled(sim, "REQUEST"):
            assert r.ttl + r.aodv.hops == 31


def test_seqno_even_and_bid_monotone(line3):
    sim = make_sim([(0, 0), (900, 900)], stop=60.0, field=(1000, 1000))
    sim.start()
    sim.kernel.run_until(0.5)
    sim.send_data(0, 1)
    sim.run(50.0)
    reqs = labelled(sim, "REQUEST", "s", node=0)
    bids = [r.aodv.bid for r in reqs]
    seqs = [r.aodv.src_seqno for r in reqs]
    assert bids == sorted(set(bids))
    assert all(s % 2 == 0 for s in seqs) and seqs == sorted(set(seqs))


def test_unreachable_destination_backoff_and_give_up():
    sim = make_sim([(0, 0), (900, 900)], stop=30.0, field=(1000, 1000))
    sim.start()
    sim.kernel.run_until(0.5)
    sim.send_data(0, 1)
    sim.run()
    times = [r.time for r in labelled(sim, "REQUEST", "s", node=0)]
    gaps = [round(b - a, 6) for a, b in zip(times, times[1:])]
    # 1 + rreq_retries attempts, waits doubling from the net traversal time
    assert gaps[:3] == [1.8, 3.6, 7.2]
    assert len(drops(sim, "NRTE")) == 1


class TestRecvError:
    @pytest.fixture
    def agent(self, line3):
        sim = make_sim(line3, stop=5.0)
        a = sim.agents[1]
        rt = a.rtable.add(2)
        a.rt_update(rt, 4, 1, 2, 100.0)
        return a

    def _rerr(self, dests, sender):
        p = control_packet(Rerr(list(dests)), sender, -1, 1, 0.0)
        p.prev_hop = sender
        return p

    def test_matching_error_brings_route_down(self, agent):
        agent.recvError(self._rerr([(2, 6)], 2))
        rt = agent.rtable.lookup(2)
        assert rt.flag is RouteFlag.DOWN
        assert rt.seqno == 6 and rt.hops == INFINITY and rt.nexthop == -1

    def test_error_from_other_neighbour_ignored(self, agent):
        agent.recvError(self._rerr([(2, 6)], 0))
        assert agent.rtable.lookup(2).is_up

    def test_stale_error_ignored(self, agent):
        agent.recvError(self._rerr([(2, 3)], 2))
        assert agent.rtable.lookup(2).is_up

    def test_unknown_destination_ignored(self, agent):
        agent.recvError(self._rerr([(9, 3)], 2))
        assert agent.rtable.lookup(9) is None

    def test_no_propagation_without_relayed_traffic(self, agent):
        agent.recvError(self._rerr([(2, 6)], 2))
        agent.kernel.run_until(1.0)
        assert labelled(agent.sim, "ERROR", "s") == []


def test_rt_down_idempotent(line3):
    sim = make_sim(line3)
    a = sim.agents[0]
    rt = a.rtable.add(1)
    a.rt_update(rt, 4, 1, 1, 10.0)
    a.rt_down(rt)
    snapshot = (rt.flag, rt.seqno, rt.hops, rt.nexthop, rt.expire, len(a.rtable.history))
    a.rt_down(rt)
    assert (rt.flag, rt.seqno, rt.hops, rt.nexthop, rt.expire, len(a.rtable.history)) == snapshot


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**32 - 1), st.floats(0, 50, allow_nan=False))
def test_jittered_error_leaves_within_window(seed, t0):
    sim = make_sim([(0, 0), (10, 0)], stop=100.0, seed=seed)
    sim.kernel.run_until(t0)
    sim.agents[0].sendError([(5, 3)], jitter=True)
    sim.kernel.run_until(t0 + 1.0)
    (sent,) = labelled(sim, "ERROR", "s")
    assert t0 < sent.time <= t0 + 0.01 + 1e-9


def test_send_error_needs_destinations(line3):
    with pytest.raises(ValueError):
        make_sim(line3).agents[0].sendError([])


def test_unknown_aodv_type_dropped(line3):
    sim = make_sim(line3)
    p = control_packet(Rrep(1, 0, 2, 4.0, 0.0, code=0x3), 0, -1, 1, 0.0)
    p.prev_hop = 0
    sim.agents[1].recv(p)
    assert [r.reason for r in drops(sim)] == ["ERR"]


def test_duplicate_request_suppressed(line3):
    sim = make_sim(line3)
    a = sim.agents[1]
    rq = Rreq(0, 7, 2, 0, 0, 4, 0.0)
    for _ in range(2):
        p = control_packet(rq, 0, -1, 30, 0.0)
        p.prev_hop = 0
        a.recv(p)
    sim.kernel.run_until(1.0)
    assert len(labelled(sim, "REQUEST", "f", node=1)) == 1
    assert a.id_lookup(0, 7)


def test_returned_own_packet_is_loop_drop(line3):
    sim = make_sim(line3)
    p = data_packet(1, 2, 0, 64, 0.0)
    p.ttl, p.prev_hop, p.num_forwards = 10, 0, 2
    sim.agents[1].recv(p)
    assert [r.reason for r in drops(sim)] == ["LOOP"]


def test_ttl_exhausted_drop(line3):
    sim = make_sim(line3)
    p = data_packet(0, 2, 0, 64, 0.0)
    p.ttl, p.prev_hop, p.num_forwards = 1, 0, 1
    sim.agents[1].recv(p)
    assert [r.reason for r in drops(sim)] == ["TTL"]


def test_intermediate_without_route_drops_and_reports(line3):
    sim = make_sim(line3)
    p = data_packet(0, 2, 0, 64, 0.0)
    p.ttl, p.prev_hop, p.num_forwards = 20, 0, 1
    sim.agents[1].recv(p)
    assert [r.reason for r in drops(sim)] == ["NRTE"]
    (err,) = labelled(sim, "ERROR", "s", node=1)
    assert err.aodv.dests == ((2, 1),)


def test_hello_installs_neighbour_route(line3):
    sim = make_sim(line3)
    h = control_packet(Rrep(1, 0, 2, 4.0, 0.0, code=AodvType.HELLO), 0, -1, 1, 0.0)
    h.prev_hop = 0
    sim.agents[1].recv(h)
    rt = sim.agents[1].rtable.lookup(0)
    assert (rt.flag, rt.hops, rt.nexthop, rt.seqno) == (RouteFlag.UP, 1, 0, 2)
    assert sim.agents[1].nb_lookup(0).expire == pytest.approx(4.5)


def test_neighbour_expiry_tears_routes_down():
    sim = make_sim(line_positions(2), stop=20.0, hello=True)
    sim.run(3.0)
    assert sim.agents[0].rtable.lookup(1).is_up
    sim.medium.cut.add(frozenset((0, 1)))
    sim.run(10.0)
    assert sim.agents[0].nb_lookup(1) is None
    assert sim.agents[0].rtable.lookup(1) is None or not sim.agents[0].rtable.lookup(1).is_up


def test_send_buffer_overflow_drops_ifq():
    sim = make_sim([(0, 0), (900, 900)], stop=5.0, field=(1000, 1000), rqueue_capacity=4)
    sim.start()
    for _ in range(6):
        sim.send_data(0, 1)
    assert [r.seq for r in drops(sim, "IFQ")] == [0, 1]


def test_start_twice_rejected(line3):
    sim = make_sim(line3)
    sim.agents[0].start()
    with pytest.raises(RuntimeError):
        sim.agents[0].start()


def test_local_repair_needs_break_past_midpoint():
    # break at the first hop: the source never repairs
    sim = make_sim(line_positions(4), flows=[(0, 3, 4.0, 512, 1.0, 8.0)],
                   motion=[(5.0, 0, 0.0, 600.0, 100.0)], stop=10.0)
    sim.run()
    flags = {h[3] for a in sim.agents for h in a.rtable.history}
    assert RouteFlag.REPAIR not in flags


def walk_is_loop_free(sim):
    now = sim.kernel.now
    for a in sim.agents:
        for rt in a.rtable:
            if not rt.is_up or rt.expire <= now:
                continue
            seen = {a.addr}
            node = rt.nexthop
            while node != rt.dst:
                if node in seen:
                    return False
                seen.add(node)
                nxt = sim.agents[node].rtable.lookup(rt.dst)
                if nxt is None or not nxt.is_up or nxt.expire <= now:
                    break
                node = nxt.nexthop
    return True


@st.composite
def graphs(draw):
    n = draw(st.integers(3, 6))
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    cut = draw(st.sets(st.sampled_from(pairs), max_size=len(pairs)))
    flows = draw(st.lists(st.tuples(st.integers(0, n - 1), st.integers(0, n - 1))
                          .filter(lambda f: f[0] != f[1]), min_size=1, max_size=3))
    breaks = draw(st.lists(st.tuples(st.floats(1.0, 8.0), st.sampled_from(pairs)), max_size=3))
    return n, cut, flows, breaks


@settings(max_examples=25, deadline=None)
@given(graphs(), st.integers(0, 1000))
def test_loop_freedom_random_graphs(g, seed):
    n, cut, flows, breaks = g
    sim = make_sim([(500.0, 500.0)] * n, seed=seed, stop=10.0,
                   flows=[(s, d, 5.0, 64, 0.5, 9.0) for s, d in flows])
    sim.medium.cut |= {frozenset(p) for p in cut}
    for t, p in breaks:
        sim.kernel.at(t, sim.medium.cut.add, frozenset(p))
    sim.start()
    t = 0.0
    while t < 10.0:
        t += 0.25
        sim.run(t)
        assert walk_is_loop_free(sim), f"loop at t={t}"
    for r in sim.records:
        format_record(r)
