"""Machine-readable run reports for the command-line verifications."""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field
from fractions import Fraction

PASS = "pass"
FAIL = "fail"
ERRATUM = "erratum-candidate"


def _plain(value):
    if isinstance(value, Fraction):
        return str(value)
    if isinstance(value, dict):
        return {k: _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, (bool, int, str)) or value is None:
        return value
    return str(value)


@dataclass
class RunReport:
    command: str
    checks: list = field(default_factory=list)
    with_timings: bool = False
    _start: float = field(default_factory=time.monotonic)

    def add(self, name: str, status: str, **values):
        entry = {"name": name, "status": status}
        if values:
            entry["values"] = _plain(values)
        if self.with_timings:
            entry["elapsed_s"] = round(time.monotonic() - self._start, 3)
        self.checks.append(entry)

    def add_bool(self, name: str, ok: bool, **values):
        self.add(name, PASS if ok else FAIL, **values)

    @property
    def failed(self) -> bool:
        return any(c["status"] == FAIL for c in self.checks)

    def exit_code(self) -> int:
        return 1 if self.failed else 0

    def to_json(self) -> str:
        counts = {
            s: sum(1 for c in self.checks if c["status"] == s)
            for s in (PASS, FAIL, ERRATUM)
        }
        return json.dumps(
            {"command": self.command, "summary": counts, "checks": self.checks},
            sort_keys=True,
            indent=1,
        )
