"""Line-oriented trace output shared by the quantum and classical runs.

Two formats: ``text`` (``key=value`` pairs, one record per line) and
``jsonl`` (one JSON object per line).  Field order is fixed so identical
runs give byte-identical output.  See ``docs/trace_schema.md``.
"""

from __future__ import annotations

import json
from typing import Iterable, Iterator, Mapping

FORMATS = ("text", "jsonl")


def _text_value(v) -> str:
    if v is None:
        return "-"
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return f"{v:.15g}"
    if isinstance(v, (list, tuple)):
        return "|".join(_text_value(x) for x in v)
    return str(v)


def _flatten(record: Mapping, prefix: str = "") -> Iterator[tuple]:
    for k, v in record.items():
        if isinstance(v, Mapping):
            yield from _flatten(v, f"{prefix}{k}.")
        else:
            yield f"{prefix}{k}", v


def format_record(record: Mapping, fmt: str) -> str:
    if fmt == "jsonl":
        return json.dumps(record, ensure_ascii=False, separators=(",", ":"))
    if fmt == "text":
        return " ".join(f"{k}={_text_value(v)}" for k, v in _flatten(record))
    raise ValueError(f"unknown trace format {fmt!r}")


def format_records(records: Iterable[Mapping], fmt: str) -> Iterator[str]:
    for rec in records:
        yield format_record(rec, fmt)


def stage_records(stages) -> Iterator[dict]:
    for stage in stages:
        rec = {"stage": stage.name, "state": stage.state.to_text()}
        factors = stage.factors
        if factors is not None:
            rec["factors"] = [f.to_text() for f in factors]
        yield rec


def stage_lines(stages, fmt: str) -> Iterator[str]:
    if fmt == "text":
        for stage in stages:
            yield stage.to_text()
    else:
        yield from format_records(stage_records(stages), fmt)
