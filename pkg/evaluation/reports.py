"""Comparison tables: this run's correlations beside the published numbers."""

from pathlib import Path
from typing import Dict, List, Optional, Sequence
import json
import logging

import pandas as pd

from evaluation.baselines import (
    GRS_COLUMNS,
    GRS_TABLE,
    OSATS_MEAN_COLUMNS,
    OSATS_MEAN_TABLE,
    KT_OSATS_COLUMNS,
    KT_OSATS_TABLE,
    BaselineRow,
)
from evaluation.metrics import mean_defined
from models.dataset import CVScheme, OsatsCategory
from models.predictions import CVSummary
from templates.report_generator import render_results_report

logger = logging.getLogger(__name__)

OUR_METHOD = "R-Trans (this run)"
TASK_CODES = ["KT", "NP", "SU"]
TABLE_FILES = {
    "grs_table": "grs_table.csv",
    "osats_mean_table": "osats_mean_table.csv",
    "kt_osats_table": "kt_osats_table.csv",
}


def _lookup(summaries: Sequence[CVSummary], task: str, scheme: CVScheme) -> Optional[CVSummary]:
    for summary in summaries:
        if summary.task == task and summary.scheme == scheme:
            return summary
    return None


def _fill_across(values: Dict[str, Optional[float]], columns: Dict[str, List[str]], averaged: List[str]) -> None:
    """Fill an empty across-task column with the mean of its per-task columns."""
    for across, per_task in columns.items():
        if values.get(across) is None:
            cells = [values.get(c) for c in per_task]
            if all(c is not None for c in cells):
                values[across] = mean_defined(cells)
                averaged.append(across)


def our_grs_row(summaries: Sequence[CVSummary]) -> BaselineRow:
    values: Dict[str, Optional[float]] = {}
    for column in GRS_COLUMNS:
        task, scheme = column.split("_")
        summary = _lookup(summaries, task, CVScheme(scheme))
        values[column] = summary.mean_scc_grs if summary else None
    averaged: List[str] = []
    _fill_across(values, {
        f"across_{s.value}": [f"{t}_{s.value}" for t in TASK_CODES] for s in CVScheme
    }, averaged)
    return BaselineRow(method=OUR_METHOD, values=values, task_averaged=averaged)


def our_osats_mean_row(summaries: Sequence[CVSummary]) -> BaselineRow:
    values: Dict[str, Optional[float]] = {}
    for column in OSATS_MEAN_COLUMNS:
        summary = _lookup(summaries, column, CVScheme.LOSO)
        values[column] = summary.mean_scc_osats if summary else None
    averaged: List[str] = []
    _fill_across(values, {"across": TASK_CODES}, averaged)
    return BaselineRow(method=OUR_METHOD, values=values, task_averaged=averaged)


def our_kt_osats_row(summaries: Sequence[CVSummary]) -> BaselineRow:
    summary = _lookup(summaries, "KT", CVScheme.LOSO)
    per_osats = summary.mean_scc_per_osats if summary and summary.mean_scc_per_osats else [None] * len(OsatsCategory)
    values = {
        "RT": per_osats[OsatsCategory.RESPECT_FOR_TISSUE.index],
        "TM": per_osats[OsatsCategory.TIME_AND_MOTION.index],
        "OP": per_osats[OsatsCategory.OVERALL_PERFORMANCE.index],
    }
    values["mean"] = mean_defined(list(values.values()))
    return BaselineRow(method=OUR_METHOD, values=values)


def table_frame(rows: Sequence[BaselineRow], columns: List[str]) -> pd.DataFrame:
    records = [
        {
            "method": row.method,
            "modality": row.modality,
            **{c: row.values.get(c) for c in columns},
            "task_averaged": ";".join(row.task_averaged),
            "note": row.note or "",
        }
        for row in rows
    ]
    return pd.DataFrame(records, columns=["method", "modality", *columns, "task_averaged", "note"])


def build_tables(summaries: Sequence[CVSummary], include_baselines: bool = True) -> Dict[str, pd.DataFrame]:
    def rows(baselines: List[BaselineRow], ours: BaselineRow) -> List[BaselineRow]:
        return (list(baselines) if include_baselines else []) + [ours]

    return {
        "grs_table": table_frame(rows(GRS_TABLE, our_grs_row(summaries)), GRS_COLUMNS),
        "osats_mean_table": table_frame(rows(OSATS_MEAN_TABLE, our_osats_mean_row(summaries)), OSATS_MEAN_COLUMNS),
        "kt_osats_table": table_frame(rows(KT_OSATS_TABLE, our_kt_osats_row(summaries)), KT_OSATS_COLUMNS),
    }


def format_cell(value, averaged: bool = False) -> str:
    if value is None or pd.isna(value):
        return "-"
    return f"{value:.2f}{'*' if averaged else ''}"


def markdown_rows(frame: pd.DataFrame, columns: List[str]) -> List[List[str]]:
    out = []
    for record in frame.to_dict(orient="records"):
        averaged = set(filter(None, record["task_averaged"].split(";")))
        out.append([record["method"]] + [format_cell(record[c], c in averaged) for c in columns])
    return out


def _records(frame: pd.DataFrame) -> List[Dict]:
    return frame.astype(object).where(frame.notna(), None).to_dict(orient="records")


def report_tables(
    summaries: Sequence[CVSummary],
    out_dir: Path,
    include_baselines: bool = True,
) -> Dict[str, Path]:
    """Write the three comparison tables as CSV plus a JSON bundle and markdown.

    Returns:
        Mapping of artifact name to path
    """
    tables_dir = Path(out_dir) / "tables"
    tables_dir.mkdir(parents=True, exist_ok=True)
    tables = build_tables(summaries, include_baselines)

    paths: Dict[str, Path] = {}
    for name, frame in tables.items():
        path = tables_dir / TABLE_FILES[name]
        frame.to_csv(path, index=False, na_rep="-")
        paths[name] = path

    bundle = {
        "summaries": [s.model_dump(mode="json") for s in summaries],
        "tables": {name: _records(frame) for name, frame in tables.items()},
    }
    paths["json"] = tables_dir / "tables.json"
    paths["json"].write_text(json.dumps(bundle, indent=2, sort_keys=True) + "\n")

    paths["markdown"] = tables_dir / "tables.md"
    paths["markdown"].write_text(render_results_report(
        summaries=summaries,
        grs_rows=markdown_rows(tables["grs_table"], GRS_COLUMNS),
        osats_mean_rows=markdown_rows(tables["osats_mean_table"], OSATS_MEAN_COLUMNS),
        kt_osats_rows=markdown_rows(tables["kt_osats_table"], KT_OSATS_COLUMNS),
    ))
    logger.info(f"Wrote comparison tables to {tables_dir}")
    return paths


def write_results(summary: CVSummary, out_dir: Path) -> Path:
    """Per-fold detail as ``results/<task>_<scheme>.json``."""
    path = Path(out_dir) / "results" / f"{summary.task}_{summary.scheme.value}.json"
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(summary.model_dump(mode="json"), indent=2, sort_keys=True) + "\n")
    logger.info(f"Wrote results for {summary.task} {summary.scheme.value} to {path}")
    return path


def read_results(path: Path) -> CVSummary:
    return CVSummary.model_validate_json(Path(path).read_text())
