"""
Markdown renderings of result tables and feedback timelines using Jinja2 templates.
"""

from jinja2 import Environment, FileSystemLoader
from typing import Any, Dict, List, Optional, Sequence
import os


# Setup Jinja2 environment
template_dir = os.path.dirname(os.path.abspath(__file__))
jinja_env = Environment(
    loader=FileSystemLoader(template_dir),
    trim_blocks=True,
    lstrip_blocks=True,
    keep_trailing_newline=True,
)


def _fmt(value: Optional[float]) -> str:
    return "undefined" if value is None else f"{value:.3f}"


jinja_env.filters["scc"] = _fmt


def render_results_report(
    summaries: Sequence[Any],
    grs_rows: List[List[str]],
    osats_mean_rows: List[List[str]],
    kt_osats_rows: List[List[str]],
    generated_at: Optional[str] = None,
) -> str:
    """
    Render the cross-validation summaries and comparison tables.
    Rows are pre-formatted cells, the method name first.
    """
    template = jinja_env.get_template("results_report.md.jinja2")
    return template.render(
        summaries=summaries,
        grs_rows=grs_rows,
        osats_mean_rows=osats_mean_rows,
        kt_osats_rows=kt_osats_rows,
        generated_at=generated_at,
    )


def render_feedback_report(timeline: Any, perturbed: bool = False) -> str:
    """
    Render one trial's feedback timeline: headline band series, then per-category detail.
    """
    segments: Dict[int, Dict[str, Any]] = {}
    for entry in timeline.entries:
        row = segments.setdefault(entry.segment, {
            "segment": entry.segment,
            "start_frame": entry.start_frame,
            "end_frame": entry.end_frame,
            "entries": [],
        })
        row["entries"].append(entry)

    template = jinja_env.get_template("feedback_report.md.jinja2")
    return template.render(
        timeline=timeline,
        segments=[segments[k] for k in sorted(segments)],
        headline=timeline.entries_for(timeline.headline_category),
        perturbed=perturbed,
    )
