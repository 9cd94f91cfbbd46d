"""Line-oriented profile files.

    author a2            (author profiles only)
    support 2            (author profiles only)
    attr 20 set for_loop:3,while_loop:1
    attr 23 numeric 2.5

Blank lines and ``#`` comments are ignored. Entries keep their stored order.
"""

from __future__ import annotations

from pathlib import Path

from stylearmor.errors import ProfileFormatError
from stylearmor.style.attrs import CATALOG, NUMERIC, AttributeValue, StyleProfile


def format_number(x: float) -> str:
    return str(int(x)) if float(x).is_integer() else repr(float(x))


def dump_values(values: dict[int, AttributeValue]) -> list[str]:
    lines = []
    for attribute_id in sorted(values):
        value = values[attribute_id]
        if value.kind == NUMERIC:
            lines.append(f"attr {attribute_id} numeric {format_number(value.number or 0.0)}")
        else:
            body = ",".join(f"{token}:{freq}" for token, freq in value.entries)
            lines.append(f"attr {attribute_id} set {body}")
    return lines


def dump_profile(profile: StyleProfile) -> str:
    header = [f"# program {profile.program_ref}"] if profile.program_ref else []
    return "\n".join(header + dump_values(profile.values)) + "\n"


def parse_attr_line(line_no: int, line: str) -> tuple[int, AttributeValue]:
    parts = line.split(maxsplit=3)
    if len(parts) != 4 or parts[0] != "attr":
        raise ProfileFormatError(line_no, line)
    try:
        attribute_id = int(parts[1])
    except ValueError:
        raise ProfileFormatError(line_no, line) from None
    attribute = CATALOG.get(attribute_id)
    if attribute is None:
        raise ProfileFormatError(line_no, line)
    kind, body = parts[2], parts[3]
    if kind == "numeric":
        if attribute.kind != NUMERIC:
            raise ProfileFormatError(line_no, line)
        try:
            return attribute_id, AttributeValue.numeric(float(body))
        except ValueError:
            raise ProfileFormatError(line_no, line) from None
    if kind != "set" or attribute.kind == NUMERIC:
        raise ProfileFormatError(line_no, line)
    entries = []
    for chunk in body.split(","):
        token, sep, freq = chunk.rpartition(":")
        if not sep or not token or not freq.isdigit() or int(freq) <= 0:
            raise ProfileFormatError(line_no, line)
        entries.append((token, int(freq)))
    return attribute_id, AttributeValue(attribute.kind, entries=tuple(entries))


def iter_lines(text: str):
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if line and not line.startswith("#"):
            yield line_no, line


def load_profile(text: str, program_ref: str = "") -> StyleProfile:
    """Parse a per-program profile.

    Raises:
        ProfileFormatError: on a malformed line or an unknown attribute id.
    """
    values: dict[int, AttributeValue] = {}
    for line_no, line in iter_lines(text):
        attribute_id, value = parse_attr_line(line_no, line)
        if attribute_id in values:
            raise ProfileFormatError(line_no, line)
        values[attribute_id] = value
    for raw in text.splitlines():
        if raw.startswith("# program ") and not program_ref:
            program_ref = raw[len("# program ") :].strip()
    return StyleProfile(dict(sorted(values.items())), program_ref)


def read_profile(path: Path) -> StyleProfile:
    return load_profile(path.read_text(encoding="utf-8"), str(path))


def write_profile(path: Path, profile: StyleProfile) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(dump_profile(profile), encoding="utf-8")
