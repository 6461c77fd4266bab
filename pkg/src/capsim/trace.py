"""Trace records and their JSONL wire format.

One event per line, field order fixed, integers unquoted, LF endings.
Kinds: invoke, respond, send, deliver, drop, timer, plus an
``unanswered`` marker emitted at the horizon for every client request
that never received a response.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field


class TraceParseError(ValueError):
    """A trace line could not be decoded; carries the 1-based line number."""

    def __init__(self, line_no: int, message: str):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


def invoke_record(t, seq, op, node, kind, key, val):
    return {
        "t": t, "seq": seq, "ev": "invoke",
        "op": op, "node": node, "kind": kind, "key": key, "val": val,
    }


def respond_record(t, seq, op, val):
    return {"t": t, "seq": seq, "ev": "respond", "op": op, "val": val}


def send_record(t, seq, src, dst, msg):
    return {"t": t, "seq": seq, "ev": "send", "src": src, "dst": dst, "msg": msg}


def deliver_record(t, seq, src, dst, msg):
    return {"t": t, "seq": seq, "ev": "deliver", "src": src, "dst": dst, "msg": msg}


def drop_record(t, seq, src, dst, msg):
    return {"t": t, "seq": seq, "ev": "drop", "src": src, "dst": dst, "msg": msg}


def timer_record(t, seq, node, timer):
    return {"t": t, "seq": seq, "ev": "timer", "node": node, "timer": timer}


def unanswered_record(t, seq, op):
    return {"t": t, "seq": seq, "ev": "unanswered", "op": op}


@dataclass
class Trace:
    """An ordered list of trace records with byte-stable serialization."""

    records: list[dict] = field(default_factory=list)

    def append(self, record: dict) -> None:
        self.records.append(record)

    def to_jsonl(self) -> str:
        return "".join(json.dumps(r) + "\n" for r in self.records)

    def write(self, path) -> None:
        with open(path, "w", newline="\n") as fh:
            fh.write(self.to_jsonl())

    @classmethod
    def from_jsonl(cls, text: str) -> "Trace":
        records = []
        for line_no, line in enumerate(text.splitlines(), start=1):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise TraceParseError(line_no, f"invalid JSON: {exc.msg}") from exc
            if not isinstance(record, dict):
                raise TraceParseError(line_no, "record is not an object")
            for required in ("t", "seq", "ev"):
                if required not in record:
                    raise TraceParseError(line_no, f"missing field {required!r}")
            records.append(record)
        return cls(records)

    @classmethod
    def read(cls, path) -> "Trace":
        with open(path) as fh:
            return cls.from_jsonl(fh.read())

    def __iter__(self):
        return iter(self.records)

    def __len__(self) -> int:
        return len(self.records)
