"""
CSV and metrics writers of the harness.
"""
import csv
from pathlib import Path

import prometheus_client
from loguru import logger

from spectral_bounds.apps.bounds.models import CSV_COLUMNS, BoundReport
from spectral_bounds.apps.bounds.serializers import BoundReportSerializer

ASYMPTOTICS_COLUMNS = ("k", "avg_k", "weyl_avg", "remainder")


def _write_csv(path: Path, fieldnames, rows) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8", newline="") as f:
        writer = csv.DictWriter(f, fieldnames=fieldnames, lineterminator="\n")
        writer.writeheader()
        writer.writerows(rows)


def write_bound_reports(path, reports: list[BoundReport]) -> None:
    path = Path(path)
    _write_csv(path, CSV_COLUMNS, BoundReportSerializer(reports, many=True).data)
    logger.info(f"Wrote {len(reports)} bound rows to {path}")


def write_asymptotics(path, ks, averages, weyl, remainders) -> None:
    path = Path(path)
    rows = (
        {"k": int(k), "avg_k": repr(float(a)), "weyl_avg": repr(float(w)), "remainder": repr(float(r))}
        for k, a, w, r in zip(ks, averages, weyl, remainders, strict=True)
    )
    _write_csv(path, ASYMPTOTICS_COLUMNS, rows)
    logger.info(f"Wrote asymptotics rows to {path}")


def write_metrics(path) -> None:
    """Dump the default prometheus registry in the text exposition format."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    prometheus_client.write_to_textfile(str(path), prometheus_client.REGISTRY)
    logger.info(f"Wrote metrics to {path}")
