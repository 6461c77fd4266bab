"""Replication strategies for a keyed last-writer-wins register service.

Each node runs one strategy state machine. Handlers are pure in the
simulation sense: they take the current tick plus an input (client
request, message, timer) and return a list of actions for the kernel
to execute. Three strategies cover the staleness/latency spectrum:

* LocalFirst answers every request from local state immediately and
  propagates writes via broadcast plus periodic anti-entropy digests.
  Responses are instant; reads can be stale for as long as a partition
  plus one gossip period lasts.
* SyncAll runs a full round for every request and answers only after
  every peer acknowledged, retransmitting into dead links until they
  heal. Reads are fresh; responses can stall for an entire partition.
* HybridDeadline behaves like SyncAll but answers at ``now + D`` with
  whatever acknowledgements and versions have arrived if the round is
  still incomplete, trading bounded staleness for bounded latency.

Registers resolve conflicting writes last-writer-wins: versions are
ordered lexicographically by (write tick, writer id, per-writer seq)
and merges never move a key backwards.
"""

from __future__ import annotations

from dataclasses import dataclass

from .config import StrategyParams

# version triple: (write_tick, writer node id, per-writer sequence)
Version = tuple[int, int, int]


@dataclass(frozen=True)
class Respond:
    op_id: int
    value: int | None


@dataclass(frozen=True)
class Send:
    dst: int
    payload: dict


@dataclass(frozen=True)
class SetTimer:
    delay: int
    timer_id: str


Action = Respond | Send | SetTimer


class RegisterMap:
    """Per-key (value, version) store with monotone last-writer-wins merge."""

    def __init__(self) -> None:
        self._cells: dict[str, tuple[int, Version]] = {}

    def merge(self, key: str, value: int, version: Version) -> bool:
        """Adopt (value, version) when it outranks the current cell."""
        current = self._cells.get(key)
        if current is not None and current[1] >= version:
            return False
        self._cells[key] = (value, version)
        return True

    def get(self, key: str) -> tuple[int | None, Version | None]:
        cell = self._cells.get(key)
        if cell is None:
            return None, None
        return cell

    def value(self, key: str) -> int | None:
        return self.get(key)[0]

    def items(self) -> list[tuple[str, int, Version]]:
        return [(k, v, ver) for k, (v, ver) in sorted(self._cells.items())]

    def __eq__(self, other) -> bool:
        return isinstance(other, RegisterMap) and self._cells == other._cells


class StrategyNode:
    """Base class: owns the node's registers and its peer list."""

    def __init__(self, params: StrategyParams, node_id: int, node_count: int):
        self.params = params
        self.node_id = node_id
        self.peers = tuple(n for n in range(node_count) if n != node_id)
        self.registers = RegisterMap()
        self._write_seq = 0

    def next_version(self, now: int) -> Version:
        self._write_seq += 1
        return (now, self.node_id, self._write_seq)

    def on_init(self) -> list[Action]:
        return []

    def on_invoke(self, op, now: int) -> list[Action]:
        raise NotImplementedError

    def on_message(self, payload: dict, src: int, now: int) -> list[Action]:
        raise NotImplementedError

    def on_timer(self, timer_id: str, now: int) -> list[Action]:
        raise NotImplementedError


class LocalFirstNode(StrategyNode):
    """Answer instantly from local state; gossip writes to peers."""

    GOSSIP_TIMER = "anti-entropy"

    def on_init(self) -> list[Action]:
        if not self.peers:
            return []
        return [SetTimer(self.params.anti_entropy_period, self.GOSSIP_TIMER)]

    def on_invoke(self, op, now: int) -> list[Action]:
        if op.kind == "write":
            version = self.next_version(now)
            self.registers.merge(op.key, op.val, version)
            actions: list[Action] = [Respond(op.op_id, None)]
            update = {
                "type": "update",
                "key": op.key,
                "val": op.val,
                "ver": list(version),
            }
            actions.extend(Send(peer, update) for peer in self.peers)
            return actions
        return [Respond(op.op_id, self.registers.value(op.key))]

    def on_message(self, payload: dict, src: int, now: int) -> list[Action]:
        kind = payload.get("type")
        if kind == "update":
            self.registers.merge(payload["key"], payload["val"], tuple(payload["ver"]))
            return []
        if kind == "digest":
            for key, val, ver in payload["entries"]:
                self.registers.merge(key, val, tuple(ver))
            return []
        raise ValueError(f"unknown message type {kind!r}")

    def on_timer(self, timer_id: str, now: int) -> list[Action]:
        entries = [[k, v, list(ver)] for k, v, ver in self.registers.items()]
        digest = {"type": "digest", "entries": entries}
        actions: list[Action] = [Send(peer, digest) for peer in self.peers]
        actions.append(SetTimer(self.params.anti_entropy_period, self.GOSSIP_TIMER))
        return actions


@dataclass
class _Round:
    """An in-flight request round on its coordinating node."""

    op_id: int
    kind: str
    key: str
    value: int | None
    version: Version | None
    waiting: set[int]
    invoke_tick: int
    responded: bool = False
    best_val: int | None = None
    best_ver: Version | None = None

    def note_reply(self, val: int | None, ver: list | None) -> None:
        if ver is None:
            return
        version = tuple(ver)
        if self.best_ver is None or version > self.best_ver:
            self.best_val, self.best_ver = val, version

    def request_payload(self) -> dict:
        if self.kind == "write":
            return {
                "type": "wreq",
                "op": self.op_id,
                "key": self.key,
                "val": self.value,
                "ver": list(self.version),
            }
        return {"type": "rreq", "op": self.op_id, "key": self.key}


class SyncAllNode(StrategyNode):
    """Round per request: answer only once every peer has acknowledged.

    Writes apply locally at invoke time and at each peer on delivery;
    reads answer with the highest version seen across all replies and
    the local cell. Outstanding round messages retransmit every R
    ticks, so blocked rounds complete after a partition heals rather
    than timing out.
    """

    RETRANSMIT_TIMER = "retransmit"

    def __init__(self, params: StrategyParams, node_id: int, node_count: int):
        super().__init__(params, node_id, node_count)
        self.rounds: dict[int, _Round] = {}

    def on_init(self) -> list[Action]:
        if not self.peers:
            return []
        return [SetTimer(self.params.retransmit_period, self.RETRANSMIT_TIMER)]

    def _respond_value(self, rnd: _Round) -> int | None:
        if rnd.kind == "write":
            return None
        val, ver = self.registers.get(rnd.key)
        if rnd.best_ver is not None and (ver is None or rnd.best_ver > ver):
            return rnd.best_val
        return val

    def _finish(self, rnd: _Round) -> list[Action]:
        del self.rounds[rnd.op_id]
        if rnd.responded:
            return []
        rnd.responded = True
        return [Respond(rnd.op_id, self._respond_value(rnd))]

    def _start_round(self, op, now: int) -> tuple[_Round, list[Action]]:
        version = None
        if op.kind == "write":
            version = self.next_version(now)
            self.registers.merge(op.key, op.val, version)
        rnd = _Round(
            op_id=op.op_id,
            kind=op.kind,
            key=op.key,
            value=op.val,
            version=version,
            waiting=set(self.peers),
            invoke_tick=now,
        )
        self.rounds[op.op_id] = rnd
        actions: list[Action] = [
            Send(peer, rnd.request_payload()) for peer in sorted(rnd.waiting)
        ]
        if not rnd.waiting:
            actions.extend(self._finish(rnd))
        return rnd, actions

    def on_invoke(self, op, now: int) -> list[Action]:
        _, actions = self._start_round(op, now)
        return actions

    def on_message(self, payload: dict, src: int, now: int) -> list[Action]:
        kind = payload.get("type")
        if kind == "wreq":
            self.registers.merge(payload["key"], payload["val"], tuple(payload["ver"]))
            return [Send(src, {"type": "wack", "op": payload["op"]})]
        if kind == "rreq":
            val, ver = self.registers.get(payload["key"])
            reply = {
                "type": "rrep",
                "op": payload["op"],
                "key": payload["key"],
                "val": val,
                "ver": None if ver is None else list(ver),
            }
            return [Send(src, reply)]
        if kind in ("wack", "rrep"):
            rnd = self.rounds.get(payload["op"])
            if rnd is None:
                return []  # stale ack from a retransmission after completion
            if kind == "rrep":
                rnd.note_reply(payload["val"], payload["ver"])
            rnd.waiting.discard(src)
            if not rnd.waiting:
                return self._finish(rnd)
            return []
        raise ValueError(f"unknown message type {kind!r}")

    def on_timer(self, timer_id: str, now: int) -> list[Action]:
        actions: list[Action] = []
        for rnd in self.rounds.values():
            payload = rnd.request_payload()
            actions.extend(Send(peer, payload) for peer in sorted(rnd.waiting))
        actions.append(
            SetTimer(self.params.retransmit_period, self.RETRANSMIT_TIMER)
        )
        return actions


class HybridDeadlineNode(SyncAllNode):
    """SyncAll with a response deadline of D ticks.

    If the round is still incomplete at ``invoke + D`` the node answers
    with whatever arrived by then; the round itself keeps retransmitting
    until every peer has acknowledged, so replication still converges
    after the network heals.
    """

    DEADLINE_PREFIX = "deadline:"

    def on_invoke(self, op, now: int) -> list[Action]:
        rnd, actions = self._start_round(op, now)
        if rnd.op_id not in self.rounds:
            return actions  # completed synchronously (no peers)
        if self.params.deadline == 0:
            rnd.responded = True
            actions.append(Respond(rnd.op_id, self._respond_value(rnd)))
        else:
            actions.append(
                SetTimer(self.params.deadline, f"{self.DEADLINE_PREFIX}{op.op_id}")
            )
        return actions

    def on_timer(self, timer_id: str, now: int) -> list[Action]:
        if not timer_id.startswith(self.DEADLINE_PREFIX):
            return super().on_timer(timer_id, now)
        rnd = self.rounds.get(int(timer_id[len(self.DEADLINE_PREFIX):]))
        if rnd is None or rnd.responded:
            return []
        rnd.responded = True
        return [Respond(rnd.op_id, self._respond_value(rnd))]


STRATEGY_NODES = {
    "LocalFirst": LocalFirstNode,
    "SyncAll": SyncAllNode,
    "HybridDeadline": HybridDeadlineNode,
}


def build_node(params: StrategyParams, node_id: int, node_count: int) -> StrategyNode:
    try:
        cls = STRATEGY_NODES[params.kind]
    except KeyError:
        raise ValueError(f"no strategy registered for kind {params.kind!r}") from None
    return cls(params, node_id, node_count)
