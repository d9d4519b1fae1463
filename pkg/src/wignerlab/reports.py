"""Deterministic CSV / JSON Lines report emission with run manifests.

Every output file starts with a single manifest comment line; the body that
follows is a pure function of the manifest's resolved configuration, so
reruns with equal manifests produce byte-identical bodies.  Exact rationals
serialize as "num/den" in CSV and as {"num": ..., "den": ...} objects in
JSON.
"""

from __future__ import annotations

import csv
import io
import json
import sys
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Optional

from . import __version__


@dataclass
class RunManifest:
    subcommand: str
    config: dict
    seed: Optional[int] = None
    version: str = __version__
    started: str = ""
    finished: str = ""
    outputs: list = field(default_factory=list)

    def start(self) -> "RunManifest":
        self.started = time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime())
        return self

    def finish(self) -> "RunManifest":
        self.finished = time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime())
        return self

    def header_line(self) -> str:
        payload = {
            "subcommand": self.subcommand,
            "config": self.config,
            "seed": self.seed,
            "version": self.version,
            "started": self.started,
            "finished": self.finished,
        }
        return "# manifest: " + json.dumps(payload, sort_keys=True)


def _csv_cell(value) -> str:
    if isinstance(value, Fraction):
        return "%d/%d" % (value.numerator, value.denominator)
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _json_value(value):
    if isinstance(value, Fraction):
        return {"num": str(value.numerator), "den": str(value.denominator)}
    if isinstance(value, (bool, int, float, str)) or value is None:
        return value
    if isinstance(value, (list, tuple)):
        return [_json_value(v) for v in value]
    if isinstance(value, dict):
        return {str(k): _json_value(v) for k, v in value.items()}
    return str(value)


def emit_report(records: Iterable[dict], fmt: str, path: Optional[str],
                manifest: RunManifest) -> None:
    """Stream records to path (or stdout) as CSV or JSON Lines."""
    if fmt not in ("csv", "json"):
        raise ValueError("format must be csv or json")
    own = path is not None
    if own:
        try:
            stream = open(path, "w", newline="", encoding="utf-8")
        except OSError as exc:
            raise IOError("cannot write %r: %s" % (path, exc)) from exc
    else:
        stream = sys.stdout
    try:
        stream.write(manifest.header_line() + "\n")
        if fmt == "csv":
            writer = None
            for rec in records:
                if writer is None:
                    writer = csv.writer(stream, lineterminator="\n")
                    writer.writerow(list(rec.keys()))
                writer.writerow([_csv_cell(v) for v in rec.values()])
            if writer is None:
                pass  # header-only file: no records, nothing beyond manifest
        else:
            for rec in records:
                stream.write(json.dumps({k: _json_value(v)
                                         for k, v in rec.items()},
                                        sort_keys=True) + "\n")
        if own:
            manifest.outputs.append(path)
    finally:
        if own:
            stream.close()


def render_csv_body(records: Iterable[dict]) -> str:
    """CSV body without the manifest line, for determinism checks."""
    buf = io.StringIO()
    writer = None
    for rec in records:
        if writer is None:
            writer = csv.writer(buf, lineterminator="\n")
            writer.writerow(list(rec.keys()))
        writer.writerow([_csv_cell(v) for v in rec.values()])
    return buf.getvalue()
