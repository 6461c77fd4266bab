"""Symmetric link-outage schedules and reachability queries.

A schedule is a set of half-open outage intervals [start, end) on
unordered node pairs. Two nodes can communicate at a tick when a path
of live links connects them; the longest stretch any pair spends with
no such path is the schedule's partition span.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field


@dataclass(frozen=True)
class LinkOutage:
    """One symmetric outage on the link {a, b} over [start, end)."""

    a: int
    b: int
    start: int
    end: int

    def __post_init__(self) -> None:
        if self.a == self.b:
            raise ValueError(f"outage endpoints must differ, got {self.a}")
        if self.a < 0 or self.b < 0:
            raise ValueError("node ids must be non-negative")
        if not self.start < self.end:
            raise ValueError(f"empty outage interval [{self.start}, {self.end})")
        if self.start < 0:
            raise ValueError("outage start must be non-negative")
        if self.a > self.b:
            # store the unordered pair canonically
            lo, hi = self.b, self.a
            object.__setattr__(self, "a", lo)
            object.__setattr__(self, "b", hi)

    def covers(self, t: int) -> bool:
        return self.start <= t < self.end


@dataclass(frozen=True)
class PartitionSchedule:
    """All outages for a scenario, plus the size of the node set."""

    node_count: int
    outages: tuple[LinkOutage, ...] = field(default_factory=tuple)

    def __post_init__(self) -> None:
        if self.node_count < 1:
            raise ValueError("node_count must be >= 1")
        object.__setattr__(self, "outages", tuple(self.outages))
        for o in self.outages:
            if o.b >= self.node_count:
                raise ValueError(f"outage {o} references node >= {self.node_count}")

    @classmethod
    def from_dicts(cls, node_count: int, items: list[dict]) -> "PartitionSchedule":
        outages = tuple(
            LinkOutage(int(d["a"]), int(d["b"]), int(d["start"]), int(d["end"]))
            for d in items
        )
        return cls(node_count, outages)

    def to_dicts(self) -> list[dict]:
        return [
            {"a": o.a, "b": o.b, "start": o.start, "end": o.end} for o in self.outages
        ]

    def link_up(self, t: int, a: int, b: int) -> bool:
        """True when the direct link {a, b} is live at tick t.

        Overlapping outages on the same pair union: the link is down
        whenever any interval covers t.
        """
        if a == b:
            raise ValueError("link_up requires two distinct nodes")
        lo, hi = (a, b) if a < b else (b, a)
        return not any(o.a == lo and o.b == hi and o.covers(t) for o in self.outages)

    def live_neighbors(self, t: int, node: int) -> list[int]:
        return [
            other
            for other in range(self.node_count)
            if other != node and self.link_up(t, node, other)
        ]

    def reachable(self, t: int, a: int, b: int, direct_only: bool = False) -> bool:
        """True when a path of live links joins a and b at tick t.

        ``direct_only`` restricts the question to the single link {a, b};
        path mode is the normative communication test and is what the
        simulator uses to gate message delivery.
        """
        if a == b:
            raise ValueError("reachable requires two distinct nodes")
        if direct_only:
            return self.link_up(t, a, b)
        seen = {a}
        frontier = deque([a])
        while frontier:
            here = frontier.popleft()
            for nxt in self.live_neighbors(t, here):
                if nxt == b:
                    return True
                if nxt not in seen:
                    seen.add(nxt)
                    frontier.append(nxt)
        return False

    def components(self, t: int) -> list[int]:
        """Connected-component label per node for the live graph at t."""
        label = [-1] * self.node_count
        comp = 0
        for start in range(self.node_count):
            if label[start] != -1:
                continue
            label[start] = comp
            frontier = deque([start])
            while frontier:
                here = frontier.popleft()
                for nxt in self.live_neighbors(t, here):
                    if label[nxt] == -1:
                        label[nxt] = comp
                        frontier.append(nxt)
            comp += 1
        return label

    def max_partition_span(self, horizon: int) -> int:
        """Longest run of consecutive ticks any pair spends unreachable.

        Measured per unordered pair over [0, horizon); runs of distinct
        pairs do not concatenate. Returns 0 when every pair stays
        connected throughout, including the no-outage schedule.
        """
        if self.node_count < 2 or horizon <= 0 or not self.outages:
            return 0
        cuts = {0, horizon}
        for o in self.outages:
            if o.start < horizon:
                cuts.add(o.start)
            cuts.add(min(o.end, horizon))
        marks = sorted(cuts)
        pairs = [
            (i, j)
            for i in range(self.node_count)
            for j in range(i + 1, self.node_count)
        ]
        run = {p: 0 for p in pairs}
        best = 0
        # the live graph is constant between consecutive boundaries, so one
        # component scan per segment suffices
        for seg_start, seg_end in zip(marks, marks[1:]):
            if seg_start >= seg_end:
                continue
            label = self.components(seg_start)
            length = seg_end - seg_start
            for p in pairs:
                if label[p[0]] != label[p[1]]:
                    run[p] += length
                    if run[p] > best:
                        best = run[p]
                else:
                    run[p] = 0
        return best
