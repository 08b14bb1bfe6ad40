"""Run reports: a named bundle of tables plus a manifest that records
everything needed to reproduce the run byte-for-byte (seed, scenario
hash, tool version).  Nothing time- or host-dependent goes in here."""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from pathlib import Path


def fmt_ms(value) -> str:
    return "" if value is None else f"{value:.6f}"


def fmt_num(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    return f"{value:.12g}"


@dataclass
class ReportBundle:
    """manifest + named tables (rows of cells; first row is the header)
    + JSON summaries."""

    manifest: dict
    tables: dict[str, list[list]] = field(default_factory=dict)
    summaries: dict = field(default_factory=dict)

    def add_table(self, name: str, header: list[str], rows: list[list]) -> None:
        self.tables[name] = [list(header)] + [list(r) for r in rows]

    def table_csv(self, name: str) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        for row in self.tables[name]:
            writer.writerow(["" if c is None else c for c in row])
        return buf.getvalue()

    def write(self, out_dir: str | Path, fmt: str = "csv") -> list[Path]:
        """Write manifest.json, summary.json and one file per table."""
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        written = []
        manifest = dict(self.manifest)
        manifest["tables"] = sorted(self.tables)
        for name, payload in (("manifest", manifest), ("summary", self.summaries)):
            path = out / f"{name}.json"
            path.write_text(json.dumps(payload, sort_keys=True, indent=2) + "\n")
            written.append(path)
        for name in sorted(self.tables):
            if fmt == "json":
                path = out / f"{name}.json"
                header, *rows = self.tables[name]
                payload = [dict(zip(header, row)) for row in rows]
                path.write_text(json.dumps(payload, sort_keys=True, indent=2) + "\n")
            else:
                path = out / f"{name}.csv"
                path.write_text(self.table_csv(name))
            written.append(path)
        return written
