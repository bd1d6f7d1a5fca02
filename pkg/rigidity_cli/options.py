from argparse import Namespace
from json import JSONDecodeError
from json import loads as json_loads
from pathlib import Path
from sys import stdin

from rigidity.oracles import OracleSpec
from rigidity.permgroup import PermutationGroup
from rigidity.structures import Structure, structure_from_json


class UsageError(Exception):
    def __init__(self, flag: str, message: str):
        super().__init__(f"{flag}: {message}")
        self.flag = flag


def parse_targets(text: str | None, flag: str = "--targets") -> tuple[int, ...]:
    if not text:
        raise UsageError(flag, "a comma-separated list of naturals is required")
    try:
        values = tuple(int(part) for part in text.split(",") if part.strip())
    except ValueError:
        raise UsageError(flag, f"{text!r} is not a comma-separated list of naturals") from None
    if any(v < 0 for v in values):
        raise UsageError(flag, f"negative vertex in {text!r}")
    if len(set(values)) != len(values):
        raise UsageError(flag, f"duplicate vertex in {text!r}")
    return values


def parse_oracle(args: Namespace) -> OracleSpec:
    if not args.oracle:
        raise UsageError("--oracle", "an oracle kind[:seed] is required")
    try:
        return OracleSpec.parse(args.oracle)
    except ValueError as error:
        raise UsageError("--oracle", str(error)) from None


def parse_groups(args: Namespace, count: int) -> list[PermutationGroup]:
    texts = args.group or []
    if len(texts) != count:
        raise UsageError("--group", f"expected {count} group(s), got {len(texts)}")
    try:
        groups = [PermutationGroup.parse(text, args.degree) for text in texts]
    except ValueError as error:
        raise UsageError("--group", str(error)) from None
    degree = max(g.degree for g in groups)
    # generators without the largest point still act on the common degree
    return [g if g.degree == degree else PermutationGroup.parse(t, degree) for g, t in zip(groups, texts)]


def read_payload(path: str) -> dict:
    try:
        text = stdin.read() if path == "-" else Path(path).read_text(encoding="utf-8")
    except OSError as error:
        raise UsageError("--in", str(error)) from None
    try:
        return json_loads(text)
    except JSONDecodeError as error:
        raise UsageError("--in", f"not JSON: {error}") from None


def read_structure(path: str) -> tuple[Structure, dict]:
    """The structure in a payload, which may be a bare structure, a report or a CLI result."""
    payload = read_payload(path)
    if "result" in payload and isinstance(payload["result"], dict):
        payload = payload["result"]
    data = payload.get("structure", payload)
    try:
        return structure_from_json(data), payload
    except (KeyError, TypeError) as error:
        raise UsageError("--in", f"no structure found: {error}") from None
