"""Post-hoc trace verification.

From a trace we extract a history of client operations, then judge it
against a declared pair of bounds:

* availability: every request must answer within ``declared_ta`` ticks
  of its invoke, and answering at all is part of the deal;
* consistency: a read anchored at tick T with staleness budget ``tc``
  must return either the newest write invoked at or before ``T - tc``
  (the baseline, or the initial absent value when there is none) or
  any write invoked inside the window ``(T - tc, T]``. Newer writes
  are optional, older ones are forbidden.

The anchor T is the read's response tick by default. Anchoring at the
invoke tick instead is available for sensitivity analysis; it treats
everything the service learned while the client was waiting as
optional rather than as added staleness, which is the right lens when
a strategy deliberately delays responses (see ``harness``).

``min_consistency_bound`` inverts the consistency check: the smallest
budget each read needs, maximized over reads. It is computed in closed
form per read; the test suite pins it against an exhaustive scan.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

from .trace import Trace, TraceParseError

INFINITE = math.inf

TIME_REFS = ("response", "invoke")


class HistoryIntegrityError(ValueError):
    """The history contradicts itself; no verdict can be computed."""


@dataclass
class OperationRecord:
    """One client operation as observed in the trace."""

    op_id: int
    kind: str  # "read" | "write"
    key: str
    node: int
    invoke_tick: int
    response_tick: int | None = None
    written: int | None = None  # the value a write carried
    returned: int | None = None  # the value a read response carried
    answered: bool = False


@dataclass
class History:
    """Operation records plus the per-key total write order."""

    records: list[OperationRecord]
    _writes: dict[str, list[OperationRecord]] = field(init=False, repr=False)

    def __post_init__(self) -> None:
        seen = set()
        for rec in self.records:
            if rec.op_id in seen:
                raise HistoryIntegrityError(f"duplicate op id {rec.op_id}")
            seen.add(rec.op_id)
            if rec.answered and rec.response_tick < rec.invoke_tick:
                raise HistoryIntegrityError(
                    f"op {rec.op_id} responds before it is invoked"
                )
        self._writes = {}
        for rec in self.records:
            if rec.kind == "write":
                self._writes.setdefault(rec.key, []).append(rec)
        for key in self._writes:
            # writer id then op id break same-tick ties, matching the
            # registers' last-writer-wins version order
            self._writes[key].sort(key=lambda w: (w.invoke_tick, w.node, w.op_id))

    def writes(self, key: str) -> list[OperationRecord]:
        return self._writes.get(key, [])

    def reads(self) -> list[OperationRecord]:
        return [r for r in self.records if r.kind == "read"]

    def written_values(self, key: str) -> set[int]:
        return {w.written for w in self.writes(key)}


def extract_history(trace: Trace) -> History:
    """Build a History from trace records, validating as we go."""
    by_op: dict[int, OperationRecord] = {}
    order: list[int] = []
    for line_no, rec in enumerate(trace.records, start=1):
        ev = rec.get("ev")
        try:
            if ev == "invoke":
                op_id = int(rec["op"])
                if op_id in by_op:
                    raise HistoryIntegrityError(f"duplicate invoke for op {op_id}")
                kind = rec["kind"]
                if kind not in ("read", "write"):
                    raise TraceParseError(line_no, f"bad op kind {kind!r}")
                record = OperationRecord(
                    op_id=op_id,
                    kind=kind,
                    key=str(rec["key"]),
                    node=int(rec["node"]),
                    invoke_tick=int(rec["t"]),
                )
                if kind == "write":
                    if rec["val"] is None:
                        raise TraceParseError(line_no, "write invoke without a value")
                    record.written = int(rec["val"])
                by_op[op_id] = record
                order.append(op_id)
            elif ev == "respond":
                op_id = int(rec["op"])
                if op_id not in by_op:
                    raise HistoryIntegrityError(f"response for unknown op {op_id}")
                record = by_op[op_id]
                if record.answered:
                    raise HistoryIntegrityError(f"duplicate response for op {op_id}")
                record.response_tick = int(rec["t"])
                record.answered = True
                if record.kind == "read":
                    record.returned = None if rec["val"] is None else int(rec["val"])
            elif ev == "unanswered":
                op_id = int(rec["op"])
                if op_id not in by_op:
                    raise HistoryIntegrityError(
                        f"unanswered marker for unknown op {op_id}"
                    )
                if by_op[op_id].answered:
                    raise HistoryIntegrityError(
                        f"unanswered marker for answered op {op_id}"
                    )
            # send/deliver/drop/timer are transport records, not operations
        except KeyError as exc:
            raise TraceParseError(
                line_no, f"missing field {exc.args[0]!r} in {ev} record"
            ) from exc
    return History([by_op[op_id] for op_id in order])


def valid_read_values(
    history: History,
    key: str,
    response_tick: int,
    tc: int,
    *,
    optional_until: int | None = None,
) -> set:
    """The set of values a read anchored at ``response_tick`` may return.

    ``optional_until`` extends the optional window past the anchor; the
    invoke-anchored mode passes the actual response tick there so that
    values learned while waiting stay admissible. ``None`` in the result
    stands for the initial absent value.
    """
    if response_tick < 0 or tc < 0:
        raise ValueError("anchor tick and staleness budget must be non-negative")
    limit = response_tick if optional_until is None else optional_until
    cutoff = response_tick - tc  # plain int; may go below zero, excluding everything
    writes = history.writes(key)
    baseline = None
    for w in writes:
        if w.invoke_tick <= cutoff:
            baseline = w
        else:
            break
    values = {None if baseline is None else baseline.written}
    for w in writes:
        if cutoff < w.invoke_tick <= limit:
            values.add(w.written)
    return values


def _anchor(read: OperationRecord, time_ref: str) -> int:
    return read.response_tick if time_ref == "response" else read.invoke_tick


def _min_tc_for_read(
    history: History, read: OperationRecord, time_ref: str
) -> int | None:
    """Smallest staleness budget admitting this read, or None if none does."""
    anchor = _anchor(read, time_ref)
    limit = read.response_tick
    writes = history.writes(read.key)
    value = read.returned
    if value is None:
        if not writes or writes[0].invoke_tick > anchor:
            return 0
        # the initial value is only legal while no write is baseline
        return anchor - writes[0].invoke_tick + 1
    best = None
    for i, w in enumerate(writes):
        if w.written != value or w.invoke_tick > limit:
            continue
        if w.invoke_tick > anchor:
            candidate = 0  # newer than the anchor: optional at any budget
        else:
            candidate = anchor - w.invoke_tick + 1  # optional-window route
            nxt = writes[i + 1] if i + 1 < len(writes) else None
            lowest = (
                0
                if nxt is None or nxt.invoke_tick > anchor
                else anchor - nxt.invoke_tick + 1
            )
            if lowest <= anchor - w.invoke_tick:
                candidate = min(candidate, lowest)  # baseline route is feasible
        best = candidate if best is None else min(best, candidate)
    return best


def min_consistency_bound(history: History, *, time_ref: str = "response") -> int:
    """Least staleness budget under which every answered read is valid."""
    if time_ref not in TIME_REFS:
        raise ValueError(f"time_ref must be one of {TIME_REFS}")
    worst = 0
    for read in history.reads():
        if not read.answered:
            continue
        needed = _min_tc_for_read(history, read, time_ref)
        if needed is None:
            raise HistoryIntegrityError(
                f"read {read.op_id} returned {read.returned!r}, which no "
                f"staleness budget admits"
            )
        worst = max(worst, needed)
    return worst


@dataclass(frozen=True)
class Violation:
    op_id: int
    kind: str  # "availability" | "consistency" | "integrity"
    detail: str

    def to_dict(self) -> dict:
        return {"op": self.op_id, "kind": self.kind, "detail": self.detail}


@dataclass
class CheckReport:
    """Verdict for one history against one declared pair of bounds."""

    empirical_ta: float  # int-valued, or math.inf when something never answered
    empirical_tc_min: int
    violations: list[Violation]

    @property
    def clean(self) -> bool:
        return not self.violations

    def to_dict(self) -> dict:
        ta = "inf" if math.isinf(self.empirical_ta) else int(self.empirical_ta)
        return {
            "empirical_ta": ta,
            "empirical_tc_min": self.empirical_tc_min,
            "violations": [v.to_dict() for v in self.violations],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


def _format_values(values: set) -> str:
    ordered = sorted(values, key=lambda v: (v is not None, v))
    return "{" + ", ".join("initial" if v is None else str(v) for v in ordered) + "}"


def check(
    history: History,
    declared_tc: int,
    declared_ta: float,
    *,
    time_ref: str = "response",
) -> CheckReport:
    """Verify a history against declared staleness and latency bounds.

    Violations are data, not errors; the report also carries the
    empirical bounds the history actually achieved.
    """
    if time_ref not in TIME_REFS:
        raise ValueError(f"time_ref must be one of {TIME_REFS}")
    if declared_tc < 0 or declared_ta < 0:
        raise ValueError("declared bounds must be non-negative")
    violations: list[Violation] = []
    max_latency = 0
    any_unanswered = False
    worst_tc = 0
    for op in history.records:
        if not op.answered:
            any_unanswered = True
            violations.append(
                Violation(op.op_id, "availability", "unanswered at horizon")
            )
            continue
        latency = op.response_tick - op.invoke_tick
        max_latency = max(max_latency, latency)
        if latency > declared_ta:
            violations.append(
                Violation(
                    op.op_id,
                    "availability",
                    f"latency {latency} exceeds bound {declared_ta}",
                )
            )
        if op.kind != "read":
            continue
        value = op.returned
        if value is not None and value not in history.written_values(op.key):
            violations.append(
                Violation(
                    op.op_id,
                    "integrity",
                    f"returned {value}, never written to key {op.key!r}",
                )
            )
            continue
        allowed = valid_read_values(
            history,
            op.key,
            _anchor(op, time_ref),
            declared_tc,
            optional_until=op.response_tick,
        )
        if value not in allowed:
            shown = "initial" if value is None else value
            violations.append(
                Violation(
                    op.op_id,
                    "consistency",
                    f"returned {shown}, allowed {_format_values(allowed)}",
                )
            )
        needed = _min_tc_for_read(history, op, time_ref)
        if needed is not None:
            worst_tc = max(worst_tc, needed)
    empirical_ta = INFINITE if any_unanswered else max_latency
    return CheckReport(empirical_ta, worst_tc, violations)


def empirical_availability_bound(history: History) -> float:
    """Worst response latency in the history; infinite if anything hung."""
    worst = 0
    for op in history.records:
        if not op.answered:
            return INFINITE
        worst = max(worst, op.response_tick - op.invoke_tick)
    return worst


def bound_holds(report: CheckReport, partition_span: int, slack: int = 0) -> bool:
    """Does empirical staleness plus latency cover the partition span?

    An unavailable run (infinite empirical latency) satisfies the bound
    trivially. ``slack`` absorbs declared artifacts of the discrete
    model: message latency on each side of a cut, plus one gossip
    period for anti-entropy strategies.
    """
    if math.isinf(report.empirical_ta):
        return True
    return report.empirical_tc_min + report.empirical_ta >= partition_span - slack
