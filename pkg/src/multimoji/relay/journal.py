"""Append-only write-ahead journal, one JSON object per line.

Every state change the relay must survive a restart with (accepted sends,
replays, acknowledgements) is appended here before the change is confirmed
to any client. Recovery is a single forward scan. A partial final line, the
signature of a crash mid-write, is tolerated and dropped.
"""

from __future__ import annotations

import json
from pathlib import Path


class Journal:
    """JSON-lines journal; path=None keeps records in memory only."""

    def __init__(self, path=None):
        self._path = Path(path) if path is not None else None
        self._records: list[dict] = []
        self._file = None
        if self._path is not None:
            if self._path.exists():
                self._load()
            self._path.parent.mkdir(parents=True, exist_ok=True)
            self._file = open(self._path, "a", encoding="utf-8")

    def _load(self) -> None:
        with open(self._path, encoding="utf-8") as f:
            for line in f:
                if not line.endswith("\n"):
                    break
                line = line.strip()
                if not line:
                    continue
                try:
                    record = json.loads(line)
                except json.JSONDecodeError:
                    break
                if isinstance(record, dict):
                    self._records.append(record)

    def records(self) -> list[dict]:
        """Everything journaled so far, oldest first."""
        return list(self._records)

    def append(self, record: dict) -> None:
        self._records.append(record)
        if self._file is not None:
            self._file.write(json.dumps(record, separators=(",", ":")) + "\n")
            self._file.flush()

    def close(self) -> None:
        if self._file is not None:
            self._file.close()
            self._file = None
