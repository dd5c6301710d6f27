"""Text rendering of reports and the batch summary table."""

from typing import List, Optional, Sequence, Tuple

from shared.models.reports import Report, WitnessReport


def format_percent(report: Report) -> str:
    percent = report.width_change_percent
    if percent is None:
        return "n/a"
    return f"{percent:+d}%" if percent else "0%"


def _witness_line(label: str, witness: WitnessReport) -> str:
    note = "" if witness.attains else "  (bound reached only by the meet)"
    return f"{label:<15}{witness.expression}  {witness.interval}{note}"


def format_report(report: Report, sampled: Optional[str] = None) -> str:
    """Human-readable report; every number comes from the JSON model."""
    domains = ", ".join(f"{name} in {bounds}" for name, bounds in report.domains.items())
    stats = report.stats
    lines = [
        f"{'Expression:':<15}{report.expression}",
        f"{'Domain:':<15}{domains or '(none)'}",
        f"{'Initial:':<15}{report.initial}",
        f"{'Improved:':<15}{report.improved}",
        f"{'Width change:':<15}{format_percent(report)}",
        _witness_line("Lower witness:", report.witness_lo),
        _witness_line("Upper witness:", report.witness_hi),
        f"{'Stop reason:':<15}{report.stop_reason.value}",
        f"{'Stats:':<15}{stats.iterations} iterations, {stats.classes} classes, "
        f"{stats.nodes} nodes, {stats.applications} applications, {stats.wall_time:.3f}s",
    ]
    if sampled is not None:
        lines.append(f"{'Sampled:':<15}{sampled}")
    return "\n".join(lines)


SUMMARY_HEADERS = ("Expression", "Initial", "Improved", "Width Change")


def summary_rows(results: Sequence[Tuple[str, Optional[Report], Optional[str]]]) -> List[Tuple[str, ...]]:
    rows: List[Tuple[str, ...]] = []
    for label, report, error in results:
        if report is None:
            rows.append((label, "error", error or "", ""))
        else:
            rows.append((label, str(report.initial), str(report.improved), format_percent(report)))
    return rows


def format_summary(results: Sequence[Tuple[str, Optional[Report], Optional[str]]]) -> str:
    """Table with Expression, Initial, Improved and Width Change columns."""
    rows = [SUMMARY_HEADERS, *summary_rows(results)]
    widths = [max(len(row[i]) for row in rows) for i in range(len(SUMMARY_HEADERS))]
    rendered = []
    for index, row in enumerate(rows):
        rendered.append("  ".join(cell.ljust(width) for cell, width in zip(row, widths)).rstrip())
        if index == 0:
            rendered.append("  ".join("-" * width for width in widths))
    return "\n".join(rendered)
