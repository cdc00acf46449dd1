"""Append-only event log shared by the ledgers of one simulation run."""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any


class Transcript:
    def __init__(self) -> None:
        self.events: list[dict[str, Any]] = []

    def emit(self, chain: str, event: str, **fields: Any) -> None:
        record = {"seq": len(self.events), "chain": chain, "event": event}
        for key, value in fields.items():
            record[key] = value.hex() if isinstance(value, bytes) else value
        self.events.append(record)

    def count(self, chain: str, event: str) -> int:
        return sum(1 for e in self.events if e["chain"] == chain and e["event"] == event)

    def to_jsonl(self) -> bytes:
        lines = (json.dumps(e, sort_keys=True, separators=(",", ":")) for e in self.events)
        return "".join(line + "\n" for line in lines).encode("utf-8")

    def write(self, path: str | Path) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_bytes(self.to_jsonl())
        return path
