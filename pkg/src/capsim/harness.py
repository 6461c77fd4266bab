"""Executable experiments: contradiction replay and the deadline frontier.

Both experiments isolate one node pair behind a full bipartition for a
span of ``tp`` ticks and route data across the cut, because without
cross-cut flow the staleness/latency tradeoff is invisible.

``proof_replay`` stages the impossibility argument directly: claim a
staleness budget plus a latency budget that together undercut the
partition span, inject a write on one side and a read on the other
inside the dead window, and watch the checker find a violation. No
strategy escapes; that is the point.

``frontier_sweep`` maps the achievable side of the tradeoff. One row
per response deadline D, bracketed by the two extremes (LocalFirst as
the instant-answer corner, SyncAll as the always-fresh corner). Rows
anchor staleness at the invoke tick: a deadline strategy spends its D
ticks waiting for fresher data, and response-tick anchoring would bill
that same wait twice, once as latency and once as staleness, hiding
the tradeoff the sweep exists to measure. Response-tick anchoring
stays the default everywhere else.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .checker import (
    CheckReport,
    bound_holds,
    check,
    empirical_availability_bound,
    extract_history,
    min_consistency_bound,
)
from .config import ConfigError, ScenarioConfig, StrategyParams
from .kernel import run_scenario
from .partitions import LinkOutage


def bound_slack(params: StrategyParams, latency: int) -> int:
    """Discrete-model slack for the staleness+latency lower bound.

    One message latency on each side of a cut, plus one gossip period
    for strategies that heal via anti-entropy.
    """
    slack = 2 * latency
    if params.uses_anti_entropy():
        slack += params.anti_entropy_period
    return slack


@dataclass(frozen=True)
class ProofReplaySpec:
    """A claimed (staleness, latency) pair to refute under a partition.

    The claim must undercut the partition span by enough room to place
    the window [t, t + claimed_tc + claimed_ta] strictly inside the
    outage; otherwise the scenario proves nothing and is rejected.
    """

    strategy: StrategyParams
    tp: int
    claimed_tc: int
    claimed_ta: int
    t_start: int = 5
    n_a: int = 0
    n_b: int = 1
    node_count: int = 2
    latency: int = 1
    horizon: int | None = None

    def __post_init__(self) -> None:
        if self.tp < 1:
            raise ConfigError("partition span must be >= 1")
        if self.claimed_tc < 0 or self.claimed_ta < 0:
            raise ConfigError("claimed bounds must be non-negative")
        if self.claimed_tc + self.claimed_ta >= self.tp:
            raise ConfigError(
                "claimed_tc + claimed_ta must be smaller than the partition span"
            )
        if self.claimed_tc + self.claimed_ta > self.tp - 2:
            raise ConfigError(
                "claim window cannot sit strictly inside the partition; "
                "need claimed_tc + claimed_ta <= tp - 2"
            )
        if self.node_count < 2:
            raise ConfigError("need at least two nodes")
        if not (0 <= self.n_a < self.node_count and 0 <= self.n_b < self.node_count):
            raise ConfigError("n_a and n_b must be node ids")
        if self.n_a == self.n_b:
            raise ConfigError("n_a and n_b must differ")
        if self.latency < 1:
            raise ConfigError("latency must be >= 1")
        if self.t_start < self.latency + 2:
            raise ConfigError("t_start too early for the warmup write to replicate")
        if self.horizon is not None and self.horizon < self.t_start + self.tp:
            raise ConfigError("horizon must cover the partition")

    @classmethod
    def from_dict(cls, d: dict) -> "ProofReplaySpec":
        try:
            strategy = StrategyParams.from_dict(d["strategy"])
            kwargs = dict(
                strategy=strategy,
                tp=int(d["tp"]),
                claimed_tc=int(d["claimed_tc"]),
                claimed_ta=int(d["claimed_ta"]),
            )
        except KeyError as exc:
            raise ConfigError(f"proof spec missing field {exc.args[0]!r}") from exc
        for field_name, key in (
            ("t_start", "t_start"),
            ("n_a", "n_a"),
            ("n_b", "n_b"),
            ("node_count", "nodes"),
            ("latency", "latency"),
            ("horizon", "horizon"),
        ):
            if key in d:
                kwargs[field_name] = int(d[key])
        return cls(**kwargs)


def build_proof_config(spec: ProofReplaySpec) -> ScenarioConfig:
    """The minimal scenario realizing the contradiction window.

    The schedule isolates n_a completely (a bipartition, so relays
    cannot smuggle the write across), a warmup write replicates before
    the cut so the stale side has a concrete value to return, and the
    write/read pair lands inside the dead window.
    """
    end = spec.t_start + spec.tp
    outages = tuple(
        LinkOutage(spec.n_a, other, spec.t_start, end)
        for other in range(spec.node_count)
        if other != spec.n_a
    )
    t = spec.t_start + 1
    warmup_tick = spec.t_start - spec.latency - 1
    workload = [
        {"t": warmup_tick, "node": spec.n_a, "kind": "write", "key": "A", "val": 100},
        {"t": t, "node": spec.n_a, "kind": "write", "key": "A", "val": 200},
        {
            "t": t + spec.claimed_tc,
            "node": spec.n_b,
            "kind": "read",
            "key": "A",
            "val": None,
        },
    ]
    horizon = spec.horizon
    if horizon is None:
        params = spec.strategy
        horizon = (
            end
            + params.deadline
            + params.retransmit_period
            + params.anti_entropy_period
            + 6 * spec.latency
            + 4
        )
    return ScenarioConfig.from_dict(
        {
            "nodes": spec.node_count,
            "latency": spec.latency,
            "horizon": horizon,
            "seed": 0,
            "partitions": [
                {"a": o.a, "b": o.b, "start": o.start, "end": o.end} for o in outages
            ],
            "strategy": spec.strategy.to_dict(),
            "workload": workload,
        }
    )


def proof_replay(spec: ProofReplaySpec) -> CheckReport:
    """Run the contradiction scenario and check it against the claim.

    For any claim with claimed_tc + claimed_ta strictly under the
    partition span, the report comes back with at least one
    availability or consistency violation, whichever way the strategy
    leans.
    """
    config = build_proof_config(spec)
    trace = run_scenario(config)
    history = extract_history(trace)
    return check(history, spec.claimed_tc, spec.claimed_ta)


# -- frontier sweep ---------------------------------------------------

FRONTIER_T_START = 10
FRONTIER_LEAD = 8
FRONTIER_TAIL = 8
_FRONTIER_KEY = "A"
_WRITE_NODE = 0
_READ_NODE = 1


@dataclass(frozen=True)
class FrontierRow:
    """One strategy's empirical position against one partition span."""

    label: str  # "LocalFirst", "SyncAll", or the deadline as a string
    deadline: int | None
    empirical_tc_min: int
    empirical_ta: float
    tp: int
    bound_ok: bool

    def csv_cells(self) -> list[str]:
        ta = "inf" if math.isinf(self.empirical_ta) else str(int(self.empirical_ta))
        return [
            self.label,
            str(self.empirical_tc_min),
            ta,
            str(self.tp),
            "true" if self.bound_ok else "false",
        ]


def build_frontier_workload(tp: int, t_start: int = FRONTIER_T_START) -> list[dict]:
    """Periodic writes on one side of the cut, periodic reads on the other.

    Writes land on even offsets starting before the cut and running past
    the heal, with one write exactly at the cut's first tick; reads
    interleave on odd offsets. Values are distinct so the checker can
    attribute every read.
    """
    ops = []
    val = 10
    for t in range(t_start - FRONTIER_LEAD, t_start + tp + FRONTIER_TAIL + 1, 2):
        ops.append(
            {"t": t, "node": _WRITE_NODE, "kind": "write", "key": _FRONTIER_KEY, "val": val}
        )
        val += 1
    for t in range(t_start - FRONTIER_LEAD + 1, t_start + tp + FRONTIER_TAIL + 2, 2):
        ops.append(
            {"t": t, "node": _READ_NODE, "kind": "read", "key": _FRONTIER_KEY, "val": None}
        )
    return ops


def build_frontier_config(
    tp: int,
    strategy: StrategyParams,
    *,
    latency: int = 1,
    seed: int = 0,
    horizon: int | None = None,
    noise_reads: int = 0,
) -> ScenarioConfig:
    t_start = FRONTIER_T_START
    end = t_start + tp
    if horizon is None:
        horizon = end + FRONTIER_TAIL + strategy.deadline + 6 * latency + 4
    d: dict = {
        "nodes": 2,
        "latency": latency,
        "horizon": horizon,
        "seed": seed,
        "partitions": [{"a": _WRITE_NODE, "b": _READ_NODE, "start": t_start, "end": end}],
        "strategy": strategy.to_dict(),
        "workload": build_frontier_workload(tp, t_start),
    }
    if noise_reads:
        # read-only noise: extra writes on the read side would let stale
        # reads hide behind locally-fresh values and blunt the experiment
        d["workload_gen"] = {
            "ops": noise_reads,
            "keys": [_FRONTIER_KEY],
            "read_fraction": 1.0,
            "span": [0, horizon - 1],
        }
    return ScenarioConfig.from_dict(d)


def _frontier_row(
    label: str,
    deadline: int | None,
    tp: int,
    strategy: StrategyParams,
    latency: int,
    seed: int,
    horizon: int,
    noise_reads: int,
) -> FrontierRow:
    config = build_frontier_config(
        tp,
        strategy,
        latency=latency,
        seed=seed,
        horizon=horizon,
        noise_reads=noise_reads,
    )
    history = extract_history(run_scenario(config))
    tc = min_consistency_bound(history, time_ref="invoke")
    ta = empirical_availability_bound(history)
    report = CheckReport(ta, tc, [])
    ok = bound_holds(report, tp, bound_slack(strategy, latency))
    return FrontierRow(label, deadline, tc, ta, tp, ok)


def frontier_sweep(
    tp: int,
    deadlines: list[int],
    base: dict | None = None,
) -> list[FrontierRow]:
    """One row per deadline, bracketed by the two corner strategies.

    ``base`` may carry ``latency``, ``seed``, ``G`` (gossip period for
    the LocalFirst row) and ``noise_reads``. The retransmit period is
    pinned to one tick so a healed link carries backlogged rounds on
    the next tick; anything slower would owe its own slack term.
    """
    base = base or {}
    latency = int(base.get("latency", 1))
    seed = int(base.get("seed", 0))
    gossip = int(base.get("G", base.get("strategy", {}).get("G", 2)))
    noise_reads = int(base.get("noise_reads", 0))
    if tp < 1:
        raise ConfigError("partition span must be >= 1")
    deadline_cap = tp + 2 * latency
    cleaned = sorted(set(int(d) for d in deadlines))
    for d in cleaned:
        if d < 0 or d > deadline_cap:
            raise ConfigError(
                f"deadline {d} outside the meaningful range [0, {deadline_cap}]"
            )
    horizon = (
        FRONTIER_T_START
        + tp
        + FRONTIER_TAIL
        + (max(cleaned) if cleaned else 0)
        + 6 * latency
        + 4
    )
    rows = [
        _frontier_row(
            "LocalFirst",
            None,
            tp,
            StrategyParams("LocalFirst", anti_entropy_period=gossip),
            latency,
            seed,
            horizon,
            noise_reads,
        )
    ]
    for d in cleaned:
        rows.append(
            _frontier_row(
                str(d),
                d,
                tp,
                StrategyParams("HybridDeadline", retransmit_period=1, deadline=d),
                latency,
                seed,
                horizon,
                noise_reads,
            )
        )
    rows.append(
        _frontier_row(
            "SyncAll",
            None,
            tp,
            StrategyParams("SyncAll", retransmit_period=1),
            latency,
            seed,
            horizon,
            noise_reads,
        )
    )
    return rows


def frontier_csv(rows: list[FrontierRow]) -> str:
    lines = ["D,tc,ta,tp,bound_ok"]
    lines.extend(",".join(row.csv_cells()) for row in rows)
    return "\n".join(lines) + "\n"
