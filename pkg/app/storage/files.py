"""
File formats: frames CSV (one session per file), raw trace CSV, and the
report/curve CSVs written by evaluation commands. All writes are atomic.
"""

import io
import logging
import os
import tempfile
from pathlib import Path
from typing import List, Optional, Sequence

import pandas as pd
from pydantic import ValidationError

from ..schemas.core import ActivityLabel, SensorCatalog, Session
from ..schemas.reports import ComparisonRow, CurvePoint, MetricsReport, SweepRow
from ..utils.exceptions import EmptyTraceException, FileFormatException, InsufficientDataException

logger = logging.getLogger(__name__)

RAW_HEADER = ["timestamp_ms", "channel", "value"]
METRICS_HEADER = ["threshold", "recall", "fnr", "specificity", "fpr", "accuracy", "fscore", "std_precision"]
CURVE_HEADER = ["threshold", "fpr", "tpr"]
PR_HEADER = ["threshold", "recall", "precision"]
COMPARISON_HEADER = ["detector", "threshold"] + METRICS_HEADER[1:] + ["auprc"]
UNDEFINED = "undefined"


def atomic_write_text(path: Path, text: str) -> None:
    """Write to a temporary file beside path, then rename over it."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp_name = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as handle:
            handle.write(text)
        os.replace(tmp_name, path)
    except Exception:
        if os.path.exists(tmp_name):
            os.unlink(tmp_name)
        raise


def frames_header(catalog: SensorCatalog) -> List[str]:
    return ["second"] + catalog.columns


def write_frames_csv(
    session: Session, path: Path, catalog: SensorCatalog = SensorCatalog.default()
) -> None:
    """Metadata line, frozen header, one row per second."""
    if session.n_channels != catalog.size:
        raise FileFormatException(
            f"Session '{session.id}' has {session.n_channels} channels, catalog has {catalog.size}"
        )
    table = pd.DataFrame(session.bit_matrix(), columns=catalog.columns)
    table.insert(0, "second", range(len(session)))
    meta = f"# label={session.label.value} session_id={session.id}\n"
    atomic_write_text(path, meta + table.to_csv(index=False, lineterminator="\n"))


def _parse_meta(line: str, path: Path) -> dict:
    if not line.startswith("#"):
        raise FileFormatException(f"{path}: missing metadata line", {"path": str(path)})
    meta = {}
    for token in line[1:].split():
        key, sep, value = token.partition("=")
        if not sep:
            raise FileFormatException(f"{path}: malformed metadata token '{token}'", {"path": str(path)})
        meta[key] = value
    return meta


def read_frames_csv(path: Path, catalog: SensorCatalog = SensorCatalog.default()) -> Session:
    """
    Read one session.

    Raises:
        FileFormatException: If the metadata, header or rows are malformed
    """
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as e:
        raise FileFormatException(f"Cannot read {path}: {e}", {"path": str(path)})
    if not text.strip():
        raise FileFormatException(f"{path} is empty", {"path": str(path)})

    first, _, body = text.partition("\n")
    meta = _parse_meta(first.strip(), path)
    try:
        label = ActivityLabel(meta.get("label", ""))
    except ValueError:
        raise FileFormatException(f"{path}: unknown label '{meta.get('label')}'", {"path": str(path)})

    try:
        table = pd.read_csv(io.StringIO(body))
    except (pd.errors.ParserError, pd.errors.EmptyDataError) as e:
        raise FileFormatException(f"{path}: {e}", {"path": str(path)})

    expected = frames_header(catalog)
    if list(table.columns) != expected:
        raise FileFormatException(
            f"{path}: header {list(table.columns)} does not match {expected}", {"path": str(path)}
        )
    if table.empty:
        raise FileFormatException(f"{path}: no frames", {"path": str(path)})
    if not table["second"].astype(str).eq([str(i) for i in range(len(table))]).all():
        raise FileFormatException(f"{path}: seconds must run 0, 1, 2, ...", {"path": str(path)})
    bits = table[catalog.columns]
    if not bits.isin([0, 1]).all().all():
        raise FileFormatException(f"{path}: condition bits must be 0 or 1", {"path": str(path)})

    try:
        return Session.from_bits(meta.get("session_id") or path.stem, bits.to_numpy(), label)
    except ValidationError as e:
        raise FileFormatException(f"{path}: {e}", {"path": str(path)})


def read_frames_dir(directory: Path, catalog: SensorCatalog = SensorCatalog.default()) -> List[Session]:
    """
    Read every *.csv session in a directory, sorted by file name.

    Raises:
        FileFormatException: If the path is not a directory
        InsufficientDataException: If it holds no frames files
    """
    directory = Path(directory)
    if not directory.is_dir():
        raise FileFormatException(f"{directory} is not a directory", {"path": str(directory)})
    paths = sorted(directory.glob("*.csv"))
    if not paths:
        raise InsufficientDataException(f"No frames files in {directory}", {"path": str(directory)})
    sessions = [read_frames_csv(p, catalog) for p in paths]
    logger.info(f"Read {len(sessions)} sessions from {directory}")
    return sessions


def read_raw_trace(path: Path) -> pd.DataFrame:
    """
    Read a raw trace CSV with columns timestamp_ms,channel,value.

    Raises:
        EmptyTraceException: If the file holds no readings
        FileFormatException: If the header or values are malformed
    """
    path = Path(path)
    try:
        table = pd.read_csv(path, dtype={"channel": str})
    except pd.errors.EmptyDataError:
        raise EmptyTraceException(f"Raw trace {path} is empty", {"path": str(path)})
    except (OSError, pd.errors.ParserError) as e:
        raise FileFormatException(f"Cannot read raw trace {path}: {e}", {"path": str(path)})

    if list(table.columns) != RAW_HEADER:
        raise FileFormatException(
            f"{path}: header {list(table.columns)} does not match {RAW_HEADER}", {"path": str(path)}
        )
    if table.empty:
        raise EmptyTraceException(f"Raw trace {path} has no readings", {"path": str(path)})
    try:
        table["timestamp_ms"] = pd.to_numeric(table["timestamp_ms"]).astype("int64")
        table["value"] = pd.to_numeric(table["value"]).astype(float)
    except (ValueError, TypeError) as e:
        raise FileFormatException(f"{path}: non-numeric timestamp or value ({e})", {"path": str(path)})
    return table.sort_values("timestamp_ms", kind="stable").reset_index(drop=True)


def format_rate(value: Optional[float]) -> str:
    return UNDEFINED if value is None else f"{value:.6f}"


def _fmt_threshold(value) -> str:
    return f"{value:g}"


def _report_cells(report: MetricsReport) -> List[str]:
    return [
        format_rate(report.recall),
        format_rate(report.fnr),
        format_rate(report.specificity),
        format_rate(report.fpr),
        format_rate(report.accuracy),
        format_rate(report.f_score),
        format_rate(report.standard_precision),
    ]


def _write_table(path: Path, header: List[str], rows: List[List[str]]) -> None:
    table = pd.DataFrame(rows, columns=header, dtype=str)
    atomic_write_text(path, table.to_csv(index=False, lineterminator="\n"))
    logger.info(f"Wrote {len(rows)} rows to {path}")


def write_metrics_csv(rows: Sequence[SweepRow], path: Path) -> None:
    _write_table(
        path, METRICS_HEADER, [[_fmt_threshold(r.threshold)] + _report_cells(r.report) for r in rows]
    )


def write_curve_csv(
    points: Sequence[CurvePoint], path: Path, header: Sequence[str] = CURVE_HEADER
) -> None:
    """ROC points by default; PR points pass PR_HEADER (x is recall, y is precision)."""
    _write_table(
        path,
        list(header),
        [
            [UNDEFINED if p.threshold is None else _fmt_threshold(p.threshold), f"{p.x:.6f}", f"{p.y:.6f}"]
            for p in points
        ],
    )


def write_pr_csv(points: Sequence[CurvePoint], path: Path) -> None:
    write_curve_csv(points, path, PR_HEADER)


def write_comparison_csv(rows: Sequence[ComparisonRow], path: Path) -> None:
    _write_table(
        path,
        COMPARISON_HEADER,
        [
            [r.detector, _fmt_threshold(r.threshold)] + _report_cells(r.report) + [format_rate(r.auprc)]
            for r in rows
        ],
    )
