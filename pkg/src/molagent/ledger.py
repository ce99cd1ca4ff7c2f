"""Run ledger: one JSON record per generated or seeded molecule."""

from __future__ import annotations

import json
import os
import threading
import time
from pathlib import Path
from typing import Iterable

LEDGER_FIELDS = (
    "id",
    "kind",
    "status",
    "smiles",
    "parents",
    "seed",
    "tool_trace",
    "dG",
    "qed",
    "sa",
    "phi",
    "charged",
    "accepted",
    "island",
    "generation",
    "timestamp",
)


class LedgerError(ValueError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


class Ledger:
    """Append-only record list with an optional JSONL sink.

    Rows are flushed one line at a time so a crash leaves a parseable prefix.
    """

    def __init__(self, path: str | os.PathLike | None = None, *, clock=time.time):
        self.rows: list[dict] = []
        self.path = Path(path) if path else None
        self._clock = clock
        self._lock = threading.Lock()
        if self.path:
            self.path.parent.mkdir(parents=True, exist_ok=True)
            self.path.write_text("")

    def __len__(self) -> int:
        return len(self.rows)

    def __iter__(self):
        return iter(self.rows)

    def append(self, **fields) -> dict:
        with self._lock:
            row = {name: None for name in LEDGER_FIELDS}
            row.update(fields)
            row["id"] = len(self.rows)
            row["timestamp"] = round(self._clock(), 6)
            self.rows.append(row)
            if self.path:
                with open(self.path, "a") as fh:
                    fh.write(json.dumps(row, sort_keys=True) + "\n")
                    fh.flush()
            return row


def score_fields(scores) -> dict:
    if scores is None:
        return {"dG": None, "qed": None, "sa": None, "phi": None}
    return {"dG": scores.dG, "qed": scores.qed, "sa": scores.sa, "phi": scores.phi}


def read_ledger(path: str | os.PathLike) -> list[dict]:
    rows = []
    with open(path) as fh:
        for n, line in enumerate(fh, 1):
            if not line.strip():
                continue
            try:
                row = json.loads(line)
            except ValueError as exc:
                raise LedgerError(f"malformed JSON ({exc.msg})", n) from None
            if not isinstance(row, dict) or "smiles" not in row:
                raise LedgerError("record must be an object with a 'smiles' field", n)
            rows.append(row)
    return rows


def strip_timestamps(rows: Iterable[dict]) -> list[dict]:
    return [{k: v for k, v in r.items() if k != "timestamp"} for r in rows]
