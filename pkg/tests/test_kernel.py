import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from capsim.config import ConfigError, ScenarioConfig
from capsim.kernel import Simulation, SimulationError, run_scenario
from capsim.strategies import SetTimer, StrategyNode


def scenario(**overrides):
    base = {
        "nodes": 2,
        "latency": 1,
        "horizon": 20,
        "seed": 0,
        "partitions": [],
        "strategy": {"kind": "LocalFirst", "G": 4},
        "workload": [],
    }
    base.update(overrides)
    return ScenarioConfig.from_dict(base)


def responses(trace):
    return {r["op"]: r for r in trace.records if r["ev"] == "respond"}


def test_single_node_write_then_read():
    cfg = scenario(
        nodes=1,
        workload=[
            {"t": 3, "node": 0, "kind": "write", "key": "A", "val": 1},
            {"t": 4, "node": 0, "kind": "read", "key": "A", "val": None},
        ],
    )
    trace = run_scenario(cfg)
    got = responses(trace)
    assert got[0]["t"] == 3  # write answers on its own tick
    assert got[1] == {"t": 4, "seq": got[1]["seq"], "ev": "respond", "op": 1, "val": 1}


def test_two_nodes_read_sees_write_after_one_latency():
    cfg = scenario(
        workload=[
            {"t": 5, "node": 0, "kind": "write", "key": "A", "val": 7},
            {"t": 6, "node": 1, "kind": "read", "key": "A", "val": None},
        ],
    )
    got = responses(run_scenario(cfg))
    assert got[1]["val"] == 7
    assert got[1]["t"] == 6


def test_identical_config_gives_identical_bytes():
    cfg_dict = {
        "nodes": 3,
        "latency": 1,
        "horizon": 40,
        "seed": 7,
        "partitions": [{"a": 0, "b": 1, "start": 5, "end": 15}],
        "strategy": {"kind": "SyncAll", "R": 2},
        "workload_gen": {"ops": 12, "keys": ["A", "B"], "span": [0, 30]},
    }
    first = run_scenario(ScenarioConfig.from_dict(cfg_dict)).to_jsonl()
    second = run_scenario(ScenarioConfig.from_dict(cfg_dict)).to_jsonl()
    assert first == second


def test_relay_delivery_crosses_a_direct_cut():
    cfg = scenario(
        nodes=3,
        partitions=[{"a": 0, "b": 1, "start": 0, "end": 30}],
        workload=[
            {"t": 2, "node": 0, "kind": "write", "key": "A", "val": 3},
            {"t": 4, "node": 1, "kind": "read", "key": "A", "val": None},
        ],
    )
    trace = run_scenario(cfg)
    assert not [r for r in trace.records if r["ev"] == "drop"]
    assert responses(trace)[1]["val"] == 3


def test_unreachable_send_becomes_a_drop_record():
    cfg = scenario(
        partitions=[{"a": 0, "b": 1, "start": 0, "end": 30}],
        workload=[{"t": 2, "node": 0, "kind": "write", "key": "A", "val": 3}],
    )
    trace = run_scenario(cfg)
    drops = [r for r in trace.records if r["ev"] == "drop"]
    assert drops and drops[0]["src"] == 0 and drops[0]["dst"] == 1


def _transport_invariants(trace, latency, horizon):
    sends = {}
    settled = {}
    for rec in trace.records:
        if rec["ev"] == "send":
            assert rec["msg"] not in sends
            sends[rec["msg"]] = rec
        elif rec["ev"] in ("deliver", "drop"):
            assert rec["msg"] in sends, "transport record without a send"
            assert rec["msg"] not in settled, "message settled twice"
            settled[rec["msg"]] = rec
            sent = sends[rec["msg"]]
            if rec["ev"] == "deliver":
                assert rec["t"] == sent["t"] + latency
            else:
                # dropped at send time, or truncated in flight at the horizon
                assert rec["t"] in (sent["t"], horizon)
    assert set(sends) == set(settled), "every send settles exactly once"


def _totality_invariant(trace):
    invokes = sum(1 for r in trace.records if r["ev"] == "invoke")
    responds = sum(1 for r in trace.records if r["ev"] == "respond")
    unanswered = sum(1 for r in trace.records if r["ev"] == "unanswered")
    assert invokes == responds + unanswered


@given(
    seed=st.integers(min_value=0, max_value=10_000),
    nodes=st.integers(min_value=1, max_value=4),
    latency=st.integers(min_value=1, max_value=3),
    kind=st.sampled_from(["LocalFirst", "SyncAll", "HybridDeadline"]),
    cut=st.booleans(),
)
@settings(max_examples=40, deadline=None)
def test_randomized_runs_keep_kernel_invariants(seed, nodes, latency, kind, cut):
    strategy = {"kind": kind, "G": 3, "R": 2}
    if kind == "HybridDeadline":
        strategy["D"] = 4
    partitions = []
    if cut and nodes >= 2:
        partitions = [{"a": 0, "b": nodes - 1, "start": 8, "end": 20}]
    cfg = ScenarioConfig.from_dict(
        {
            "nodes": nodes,
            "latency": latency,
            "horizon": 36,
            "seed": seed,
            "partitions": partitions,
            "strategy": strategy,
            "workload_gen": {"ops": 10, "keys": ["A"], "span": [0, 30]},
        }
    )
    trace = run_scenario(cfg)
    _transport_invariants(trace, latency, 36)
    _totality_invariant(trace)
    assert trace.to_jsonl() == run_scenario(cfg).to_jsonl()


class _TwoTimers(StrategyNode):
    def on_init(self):
        return [SetTimer(5, "a"), SetTimer(5, "b")]

    def on_invoke(self, op, now):
        return []

    def on_message(self, payload, src, now):
        return []

    def on_timer(self, timer_id, now):
        return []


def test_timers_on_one_tick_fire_in_registration_order():
    cfg = scenario(nodes=1, horizon=10)
    sim = Simulation(cfg)
    sim.nodes[0] = _TwoTimers(cfg.strategy, 0, 1)
    trace = sim.run()
    fired = [r["timer"] for r in trace.records if r["ev"] == "timer"]
    assert fired == ["a", "b"]


class _ZeroTimer(StrategyNode):
    def on_init(self):
        return [SetTimer(0, "now")]

    def on_invoke(self, op, now):
        return []

    def on_message(self, payload, src, now):
        return []

    def on_timer(self, timer_id, now):
        return []


def test_zero_delay_timer_is_rejected():
    cfg = scenario(nodes=1, horizon=10)
    sim = Simulation(cfg)
    sim.nodes[0] = _ZeroTimer(cfg.strategy, 0, 1)
    with pytest.raises(SimulationError, match="delay"):
        sim.run()


class _Exploding(StrategyNode):
    def on_init(self):
        return []

    def on_invoke(self, op, now):
        raise RuntimeError("boom")

    def on_message(self, payload, src, now):
        return []

    def on_timer(self, timer_id, now):
        return []


def test_strategy_failure_names_the_event():
    cfg = scenario(
        nodes=1,
        workload=[{"t": 3, "node": 0, "kind": "write", "key": "A", "val": 1}],
    )
    sim = Simulation(cfg)
    sim.nodes[0] = _Exploding(cfg.strategy, 0, 1)
    with pytest.raises(SimulationError, match="op 0 at tick 3"):
        sim.run()


def test_unanswered_ops_are_marked_at_horizon():
    # a SyncAll write against a partition that never heals inside the horizon
    cfg = scenario(
        strategy={"kind": "SyncAll", "R": 2},
        horizon=15,
        partitions=[{"a": 0, "b": 1, "start": 0, "end": 40}],
        workload=[{"t": 2, "node": 0, "kind": "write", "key": "A", "val": 5}],
    )
    trace = run_scenario(cfg)
    markers = [r for r in trace.records if r["ev"] == "unanswered"]
    assert markers == [{"t": 15, "seq": markers[0]["seq"], "ev": "unanswered", "op": 0}]
    _totality_invariant(trace)


def test_trace_lines_are_clean_json():
    cfg = scenario(
        workload=[{"t": 1, "node": 0, "kind": "write", "key": "A", "val": 2}]
    )
    text = run_scenario(cfg).to_jsonl()
    for line in text.splitlines():
        assert line == json.dumps(json.loads(line))
        assert not line[-1].isspace()


class TestConfigValidation:
    def test_zero_nodes(self):
        with pytest.raises(ConfigError):
            scenario(nodes=0)

    def test_zero_latency(self):
        with pytest.raises(ConfigError):
            scenario(latency=0)

    def test_op_beyond_horizon(self):
        with pytest.raises(ConfigError):
            scenario(
                horizon=5,
                workload=[{"t": 5, "node": 0, "kind": "write", "key": "A", "val": 1}],
            )

    def test_unknown_node_in_workload(self):
        with pytest.raises(ConfigError):
            scenario(
                workload=[{"t": 1, "node": 9, "kind": "write", "key": "A", "val": 1}]
            )

    def test_unknown_strategy(self):
        with pytest.raises(ConfigError):
            scenario(strategy={"kind": "Quorum"})

    def test_write_without_value(self):
        with pytest.raises(ConfigError):
            scenario(
                workload=[{"t": 1, "node": 0, "kind": "write", "key": "A", "val": None}]
            )
