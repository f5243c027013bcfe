"""Deterministic JSON reports for the command-line front end."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import List, Optional

from . import __version__

SCHEMA_VERSION = 1

# exit codes
OK = 0
REFUTED_EXIT = 1
INCONCLUSIVE_EXIT = 2
INPUT_ERROR = 3


@dataclass
class Report:
    command: List[str]
    results: List[dict] = field(default_factory=list)
    status: str = "verified"

    def add(self, name: str, payload: dict, status: Optional[str] = None):
        self.results.append({"name": name, "result": payload})
        if status is not None:
            self.merge_status(status)

    def merge_status(self, status: str):
        order = {"verified": 0, "ok": 0, "inconclusive": 1, "refuted": 2, "error": 3}
        cur = {0: "verified", 1: "inconclusive", 2: "refuted", 3: "error"}
        level = max(order.get(self.status, 0), order.get(status, 0))
        self.status = cur[level]

    def to_jsonable(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "tool_version": __version__,
            "command": self.command,
            "results": self.results,
            "status": self.status,
        }

    def dumps(self) -> str:
        return json.dumps(self.to_jsonable(), sort_keys=True, indent=2)

    def exit_code(self) -> int:
        return {"verified": OK, "ok": OK, "inconclusive": INCONCLUSIVE_EXIT,
                "refuted": REFUTED_EXIT, "error": INPUT_ERROR}[self.status]
