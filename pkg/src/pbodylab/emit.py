"""Writing reports as CSV tables or JSON documents."""

from __future__ import annotations

import csv
import json
from pathlib import Path
from typing import Sequence

from .reports import REPORT_SCHEMA, ConvergenceReport

CSV_COLUMNS = ("e", "q", "value_num", "value_den", "limit", "target", "verdict")


def _rat(x) -> str:
    return "" if x is None else str(x)


def report_rows(rep: ConvergenceReport) -> list[dict]:
    common = {"limit": _rat(rep.extrapolated_limit), "target": _rat(rep.comparison_target), "verdict": rep.verdict}
    if not rep.sequence:
        return [dict(e="", q="", value_num="", value_den="", **common)]
    return [dict(e=e, q=q, value_num=v.numerator, value_den=v.denominator, **common) for e, q, v in rep.sequence]


def tag(rep: ConvergenceReport) -> str:
    return rep.label.rsplit(":", 1)[-1]


def emit_report(reports: Sequence[ConvergenceReport], fmt: str, out_dir, stem: str) -> list[Path]:
    """csv: one file per report (suffixed by its tag when there are several); json: one document."""
    if not reports:
        raise ValueError("no reports to write")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    if fmt == "json":
        path = out / f"{stem}.json"
        doc = {"schema": REPORT_SCHEMA["title"], "reports": [r.to_dict() for r in reports]}
        path.write_text(json.dumps(doc, indent=2) + "\n")
        return [path]
    if fmt != "csv":
        raise ValueError(f"unknown format {fmt!r}")
    paths = []
    for rep in reports:
        path = out / (f"{stem}.csv" if len(reports) == 1 else f"{stem}_{tag(rep)}.csv")
        with open(path, "w", newline="") as fh:
            w = csv.DictWriter(fh, fieldnames=CSV_COLUMNS)
            w.writeheader()
            w.writerows(report_rows(rep))
        paths.append(path)
    return paths


def load_json(path) -> list[ConvergenceReport]:
    doc = json.loads(Path(path).read_text())
    return [ConvergenceReport.from_dict(d) for d in doc["reports"]]
