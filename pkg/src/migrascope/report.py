"""JSON and Markdown rendering of preservation reports and agreement matrices."""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Any

from . import jsonio
from .assessor import Availability, MismatchClass, PreservationReport, ReportEntry
from .chainsim.observe import AgreementMatrix

JSON = "json"
MARKDOWN = "markdown"
_FORMATS = {JSON: JSON, MARKDOWN: MARKDOWN, "md": MARKDOWN}

METHODOLOGY = (
    "Each required primitive (direct or inherited through builds-on edges) gets one verdict. "
    "AVAILABLE: the target has the same primitive, or a primitive on the same layer whose guarantees "
    "include all of the source primitive's guarantees. ALTERNATIVE: every guarantee is covered by a "
    "curated realization rule or offered directly by some target primitive. ABSENT: anything else. "
    "A feature takes its worst verdict: all AVAILABLE is natively preserved, any ALTERNATIVE without "
    "ABSENT is a partial mismatch, any ABSENT is a complete mismatch."
)

SIMULATOR_NOTES = (
    "Derived addresses use a simplified off-curve test (SHA-256 digest whose last byte is not 0xFF); "
    "the property exercised is that they are computed from seeds rather than backed by a key. "
    "Gas, rent and compute-unit figures are calibration constants from the simulation config. "
    "Parallel minting is checked as order independence of the mint transactions."
)


@dataclass(frozen=True)
class RenderOptions:
    format: str = JSON
    include_reasoning: bool = True
    include_methodology_footer: bool = True

    def __post_init__(self) -> None:
        if self.format not in _FORMATS:
            raise ValueError(f"unknown format {self.format!r}; choose json or markdown")
        object.__setattr__(self, "format", _FORMATS[self.format])


def _cell(text: str) -> str:
    return text.replace("|", "\\|").replace("\n", " ")


def _support(entry: ReportEntry, report: PreservationReport) -> str:
    parts: list[str] = []
    ordered = list(entry.direct) + [p for p in entry.availability if p not in entry.direct]
    for pid in ordered:
        verdict = entry.availability[pid]
        inherited = pid not in entry.direct
        if inherited and verdict.kind is Availability.AVAILABLE:
            continue
        if verdict.kind is Availability.AVAILABLE:
            text = report.target_roles.get(verdict.target_primitive, verdict.note)
        else:
            text = verdict.note
        text = f"{text} **[{verdict.kind.value}]**"
        if inherited:
            text += " (inherited)"
        if text not in parts:
            parts.append(text)
    return "; ".join(parts)


def _markdown(report: PreservationReport, opts: RenderOptions) -> str:
    lines = [
        f"# Preservation report: {report.source_platform} {report.source_version} → "
        f"{report.target_platform} {report.target_version}".replace("  ", " "),
        "",
        "| Feature | Key source primitives | Target support | Mismatch class |",
        "|---|---|---|---|",
    ]
    for e in report.entries:
        sources = "; ".join(report.source_roles.get(pid, pid) for pid in e.direct)
        lines.append(
            f"| {_cell(e.feature.title)} | {_cell(sources)} | {_cell(_support(e, report))} | {e.mismatch.title} |"
        )
    counts = {m: sum(1 for e in report.entries if e.mismatch is m) for m in MismatchClass}
    lines += ["", "Totals: " + ", ".join(f"{n} {m.title.lower()}" for m, n in counts.items()) + "."]

    lines += ["", "<details><summary>Primitive ids and evidence</summary>", ""]
    for e in report.entries:
        lines.append(f"**{e.feature.title}**")
        lines.append("")
        for pid, verdict in e.availability.items():
            origin = "direct" if pid in e.direct else "inherited"
            if verdict.kind is Availability.AVAILABLE:
                evidence = f"`{verdict.target_primitive}` ({verdict.match} match)"
            elif verdict.kind is Availability.ALTERNATIVE:
                cited = [f"rule `{r}`" for r in verdict.rules] + [f"`{p}`" for p in verdict.providers]
                evidence = ", ".join(cited)
            else:
                evidence = "missing " + ", ".join(f"`{t}`" for t in verdict.missing)
            lines.append(f"- `{pid}` ({origin}): {verdict.kind.value}, {evidence}")
        lines.append("")
    lines.append("</details>")

    if opts.include_reasoning:
        lines += ["", "## Reasoning", ""]
        lines += [f"- **{e.feature.title}**: {e.reasoning}" for e in report.entries]
    if opts.include_methodology_footer:
        lines += ["", "---", "", f"_Method:_ {METHODOLOGY}"]
    return "\n".join(lines) + "\n"


def _report_json(report: PreservationReport, opts: RenderOptions) -> dict[str, Any]:
    doc = report.to_json()
    if not opts.include_reasoning:
        for entry in doc["entries"]:
            entry["reasoning"] = ""
    return doc


def render(report: PreservationReport, opts: RenderOptions | None = None) -> bytes:
    opts = opts or RenderOptions()
    if opts.format == JSON:
        return jsonio.dump_bytes(_report_json(report, opts))
    return _markdown(report, opts).encode("utf-8")


def parse_report(data: bytes | str) -> PreservationReport:
    return PreservationReport.from_json(json.loads(data))


def _flags(flags) -> str:
    items = [f"{side}.{name}={str(v).lower()}" for side, vals in sorted(flags.items()) for name, v in sorted(vals.items())]
    return ", ".join(items) or "none"


def render_agreement(matrix: AgreementMatrix, opts: RenderOptions | None = None) -> bytes:
    opts = opts or RenderOptions()
    if opts.format == JSON:
        return jsonio.dump_bytes(matrix.to_json())
    lines = [
        "# Predicted versus observed behavior",
        "",
        "| Feature | Predicted class | Expected | Observed | Consistent |",
        "|---|---|---|---|---|",
    ]
    for row in matrix.rows:
        lines.append(
            f"| {row.feature.title} | {row.predicted.title} | {_cell(_flags(row.expected))} | "
            f"{_cell(_flags(row.observed))} | {'yes' if row.consistent else 'no'} |"
        )
    lines += ["", f"**{matrix.summary()}**"]
    if opts.include_reasoning:
        problems = [(r.feature.title, m) for r in matrix.rows for m in r.mismatches]
        if problems:
            lines += ["", "## Deviations", ""] + [f"- **{f}**: {m}" for f, m in problems]
    if opts.include_methodology_footer:
        lines += ["", "---", "", f"_Simulator:_ {SIMULATOR_NOTES}"]
    return ("\n".join(lines) + "\n").encode("utf-8")
