"""Deterministic virtual-time event loop.

Time is a non-negative integer tick count. The queue pops events in
nondecreasing (tick, seq) order, where seq is assigned at scheduling
time, so identical configurations replay identically byte for byte.

Scheduling rules the strategies rely on:

* a message sent at tick t while its destination is path-reachable is
  delivered at t + message_latency; otherwise it is dropped silently
  at send time and only a drop record remains (no sender feedback),
* the reachability test happens once, at send time,
* messages still in flight when the horizon closes settle as drops at
  the horizon, so every send has exactly one disposition in the trace,
* timers fire delay >= 1 ticks later, in registration order on ties,
* client requests scheduled for tick t dispatch after the deliveries
  and timer firings already in flight for t, which is what makes a
  one-tick-latency hand trace come out the obvious way.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass

from . import trace as tr
from .config import ClientOp, ScenarioConfig
from .strategies import Respond, Send, SetTimer, StrategyNode, build_node

_DELIVER, _TIMER, _INVOKE = 0, 1, 2


class SimulationError(RuntimeError):
    """A strategy misbehaved; the message names the triggering event."""


@dataclass(frozen=True)
class Message:
    """A payload in flight between two distinct nodes."""

    src: int
    dst: int
    send_time: int
    payload: dict
    seq: int  # message id, unique per run


class Simulation:
    """One single-threaded run of a scenario up to its horizon."""

    def __init__(self, config: ScenarioConfig):
        self.config = config
        self.schedule = config.partitions
        self.nodes: list[StrategyNode] = [
            build_node(config.strategy, n, config.node_count)
            for n in range(config.node_count)
        ]
        self._heap: list[tuple[int, int, int, object]] = []
        self._sched_seq = 0
        self._msg_seq = 0
        self._record_seq = 0
        self.trace = tr.Trace()
        self._answered: set[int] = set()
        self._now = 0
        self._ran = False

    # -- scheduling ---------------------------------------------------

    def _push(self, time: int, tag: int, payload: object) -> None:
        heapq.heappush(self._heap, (time, self._sched_seq, tag, payload))
        self._sched_seq += 1

    def _record(self, make, *args) -> None:
        self.trace.append(make(self._now, self._record_seq, *args))
        self._record_seq += 1

    # -- action execution ---------------------------------------------

    def _do_respond(self, node_id: int, action: Respond, context: str) -> None:
        if action.op_id in self._answered:
            raise SimulationError(
                f"duplicate response for op {action.op_id} while {context}"
            )
        self._answered.add(action.op_id)
        self._record(tr.respond_record, action.op_id, action.value)

    def _do_send(self, node_id: int, action: Send, context: str) -> None:
        if action.dst == node_id:
            raise SimulationError(f"node {node_id} sent to itself while {context}")
        if not 0 <= action.dst < self.config.node_count:
            raise SimulationError(f"unknown destination {action.dst} while {context}")
        msg = Message(node_id, action.dst, self._now, action.payload, self._msg_seq)
        self._msg_seq += 1
        self._record(tr.send_record, msg.src, msg.dst, msg.seq)
        if self.schedule.reachable(self._now, msg.src, msg.dst):
            self._push(self._now + self.config.message_latency, _DELIVER, msg)
        else:
            self._record(tr.drop_record, msg.src, msg.dst, msg.seq)

    def _do_set_timer(self, node_id: int, action: SetTimer, context: str) -> None:
        if action.delay < 1:
            raise SimulationError(
                f"timer delay must be >= 1 tick, got {action.delay} while {context}"
            )
        self._push(self._now + action.delay, _TIMER, (node_id, action.timer_id))

    def _run_actions(self, node_id: int, actions, context: str) -> None:
        for action in actions:
            if isinstance(action, Respond):
                self._do_respond(node_id, action, context)
            elif isinstance(action, Send):
                self._do_send(node_id, action, context)
            elif isinstance(action, SetTimer):
                self._do_set_timer(node_id, action, context)
            else:
                raise SimulationError(f"unknown action {action!r} while {context}")

    def _dispatch(self, node_id: int, context: str, call) -> None:
        try:
            actions = call()
        except SimulationError:
            raise
        except Exception as exc:
            raise SimulationError(f"strategy failed while {context}: {exc}") from exc
        self._run_actions(node_id, actions, context)

    # -- main loop ----------------------------------------------------

    def run(self) -> tr.Trace:
        if self._ran:
            raise SimulationError("a Simulation object runs once; build a new one")
        self._ran = True
        for node in self.nodes:
            context = f"initializing node {node.node_id}"
            self._dispatch(node.node_id, context, node.on_init)
        workload = self.config.workload
        wi = 0
        while True:
            # inject client requests lazily so that, at equal ticks, they
            # dispatch after already-scheduled deliveries and timers
            while wi < len(workload) and (
                not self._heap or workload[wi].t <= self._heap[0][0]
            ):
                self._push(workload[wi].t, _INVOKE, workload[wi])
                wi += 1
            if not self._heap or self._heap[0][0] >= self.config.horizon:
                break
            time, _, tag, payload = heapq.heappop(self._heap)
            self._now = time
            if tag == _INVOKE:
                op: ClientOp = payload
                context = f"handling invoke of op {op.op_id} at tick {time}"
                self._record(
                    tr.invoke_record, op.op_id, op.node, op.kind, op.key, op.val
                )
                node = self.nodes[op.node]
                self._dispatch(op.node, context, lambda: node.on_invoke(op, time))
            elif tag == _DELIVER:
                msg: Message = payload
                context = f"handling message {msg.seq} at tick {time}"
                self._record(tr.deliver_record, msg.src, msg.dst, msg.seq)
                node = self.nodes[msg.dst]
                self._dispatch(
                    msg.dst,
                    context,
                    lambda: node.on_message(msg.payload, msg.src, time),
                )
            else:
                node_id, timer_id = payload
                context = f"handling timer {timer_id!r} on node {node_id} at tick {time}"
                self._record(tr.timer_record, node_id, timer_id)
                node = self.nodes[node_id]
                self._dispatch(
                    node_id, context, lambda: node.on_timer(timer_id, time)
                )
        self._now = self.config.horizon
        # messages still in flight never arrive inside the observed window;
        # settle them as drops so every send has exactly one disposition
        while self._heap:
            _, _, tag, payload = heapq.heappop(self._heap)
            if tag == _DELIVER:
                self._record(tr.drop_record, payload.src, payload.dst, payload.seq)
        for op in self.config.workload:
            if op.op_id not in self._answered:
                self._record(tr.unanswered_record, op.op_id)
        return self.trace


def run_scenario(config: ScenarioConfig) -> tr.Trace:
    """Run one scenario and return its trace."""
    return Simulation(config).run()
