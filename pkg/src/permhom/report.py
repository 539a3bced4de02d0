"""Verification reports: one JSON schema, rendered as text for humans."""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any

SCHEMA = "permhom.report/1"


@dataclass
class Item:
    id: str
    passed: bool
    detail: Any = None

    def to_dict(self) -> dict:
        out = {"id": self.id, "status": "pass" if self.passed else "fail"}
        if self.detail is not None:
            out["detail"] = self.detail
        return out


@dataclass
class Report:
    command: list[str]
    items: list[Item] = field(default_factory=list)
    data: dict = field(default_factory=dict)

    def add(self, id: str, passed: bool, detail: Any = None) -> Item:
        item = Item(id, bool(passed), detail)
        self.items.append(item)
        return item

    @property
    def passed(self) -> bool:
        return all(i.passed for i in self.items)

    def to_dict(self) -> dict:
        out = {"schema": SCHEMA, "command": self.command, "status": "pass" if self.passed else "fail",
               "items": [i.to_dict() for i in self.items]}
        if self.data:
            out["data"] = self.data
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    def to_text(self) -> str:
        lines = []
        for i in self.items:
            mark = "PASS" if i.passed else "FAIL"
            lines.append(f"[{mark}] {i.id}" + (f": {_brief(i.detail)}" if i.detail is not None else ""))
        for key, val in self.data.items():
            if isinstance(val, list) and all(isinstance(v, str) for v in val):
                lines += val
            elif not isinstance(val, (dict, list)):
                lines.append(f"{key}: {val}")
        lines.append(f"status: {'pass' if self.passed else 'fail'}")
        return "\n".join(lines)


def _brief(detail: Any) -> str:
    if isinstance(detail, str):
        return detail
    if isinstance(detail, dict):
        parts = [f"{k}={v}" for k, v in detail.items() if not isinstance(v, (dict, list)) or len(str(v)) < 60]
        return ", ".join(parts)
    return str(detail)


def write_json(path: str, obj: Any) -> None:
    with open(path, "w") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True)
        fh.write("\n")


def read_json(path: str) -> Any:
    with open(path) as fh:
        return json.load(fh)
