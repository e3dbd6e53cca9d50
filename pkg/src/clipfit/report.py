"""Evaluation reports: fixed-layout text plus a full-precision JSON twin.

The text form prints metrics as percentages with two decimals, one
``key: value`` pair per line, so shell tools can grep a single number.
The JSON form keeps the raw fractions untouched for exact downstream
comparison.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path


@dataclass
class EvalReport:
    task: str
    prompt_mode: str
    metrics: dict[str, float]  # raw fractions in [0, 1]
    counts: dict[str, int] = field(default_factory=dict)

    def to_text(self) -> str:
        lines = [f"task: {self.task}", f"prompt_mode: {self.prompt_mode}"]
        for name, value in self.counts.items():
            lines.append(f"{name}: {value}")
        for name, value in self.metrics.items():
            lines.append(f"{name}: {value * 100.0:.2f}")
        return "\n".join(lines) + "\n"

    def to_json(self) -> str:
        payload = {
            "task": self.task,
            "prompt_mode": self.prompt_mode,
            "counts": dict(self.counts),
            "metrics": dict(self.metrics),
        }
        return json.dumps(payload, indent=2, sort_keys=False) + "\n"


def write_report(report: EvalReport, path) -> Path:
    """Write the text report and a ``.json`` sibling; returns the json path."""
    path = Path(path)
    path.write_text(report.to_text(), encoding="utf-8")
    json_path = path.with_suffix(".json")
    json_path.write_text(report.to_json(), encoding="utf-8")
    return json_path


def parse_report_text(text: str) -> dict[str, str]:
    """Inverse of ``to_text``: a flat key -> raw string mapping."""
    out: dict[str, str] = {}
    for line in text.splitlines():
        if not line.strip():
            continue
        key, _, value = line.partition(":")
        out[key.strip()] = value.strip()
    return out


def load_report_json(path) -> dict:
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)
