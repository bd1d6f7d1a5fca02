from dataclasses import dataclass, field
from json import dumps as json_dumps
from json import loads as json_loads
from pathlib import Path
from typing import Iterable


@dataclass
class BuildLedger:
    """Ordered record of a construction run: blocks added, trims, case splits."""

    entries: list = field(default_factory=list)

    @classmethod
    def from_jsonl(cls, file: str | Path):
        file = Path(file)
        entries = [
            json_loads(line) for line in file.read_text(encoding="utf-8").splitlines() if line
        ]
        return cls(entries=entries)

    def write_jsonl(self, file: str | Path):
        file = Path(file)
        file.parent.mkdir(parents=True, exist_ok=True)
        with file.open("w", encoding="utf-8") as f:
            for entry in self.entries:
                f.write(f"{json_dumps(entry, sort_keys=True)}\n")

    def append(self, event: dict):
        self.entries.append({"#": len(self.entries)} | event)

    def add_block(self, name: str, members: Iterable[int], role: str, **info):
        members = [int(v) for v in members]
        event = {
            "type": "block",
            "block": str(name),
            "role": str(role),
            "members": members,
            "size": len(members),
        }
        if info:
            event["info"] = info
        self.append(event)

    def note(self, kind: str, **info):
        self.append({"type": str(kind), "info": info})

    def blocks(self) -> list[dict]:
        return [entry for entry in self.entries if entry["type"] == "block"]

    def block_members(self) -> list[int]:
        return [v for entry in self.blocks() for v in entry["members"]]

    def to_json(self) -> list[dict]:
        return list(self.entries)
