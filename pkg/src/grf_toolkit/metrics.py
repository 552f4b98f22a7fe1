"""Segmentation metrics (IoU, DSC, FPE, FNE) and dataset reports."""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable

import numpy as np

from .errors import DataError, ShapeError

CSV_HEADER = ["image_id", "tp", "fp", "fn", "tn", "iou", "dsc", "fpe", "fne"]


@dataclass(frozen=True)
class ConfusionCounts:
    tp: int
    fp: int
    fn: int
    tn: int

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.fn + self.tn


@dataclass(frozen=True)
class EvalRecord:
    image_id: str
    counts: ConfusionCounts
    iou: float
    dsc: float
    fpe: float
    fne: float

    def row(self) -> list:
        c = self.counts
        return [self.image_id, c.tp, c.fp, c.fn, c.tn, self.iou, self.dsc, self.fpe, self.fne]


@dataclass(frozen=True)
class EvalReport:
    records: list[EvalRecord]
    mean_iou: float
    mean_dsc: float
    mean_fpe: float
    mean_fne: float
    count: int

    def summary(self) -> dict:
        return {
            "count": self.count,
            "mean_iou": self.mean_iou,
            "mean_dsc": self.mean_dsc,
            "mean_fpe": self.mean_fpe,
            "mean_fne": self.mean_fne,
        }


def confusion(pred, gt) -> ConfusionCounts:
    pred = np.asarray(pred, dtype=bool)
    gt = np.asarray(gt, dtype=bool)
    if pred.shape != gt.shape:
        raise ShapeError(f"prediction shape {pred.shape} does not match ground truth {gt.shape}")
    tp = int(np.count_nonzero(pred & gt))
    fp = int(np.count_nonzero(pred & ~gt))
    fn = int(np.count_nonzero(~pred & gt))
    return ConfusionCounts(tp, fp, fn, pred.size - tp - fp - fn)


def iou(c: ConfusionCounts) -> float:
    denom = c.tp + c.fp + c.fn
    return 1.0 if denom == 0 else c.tp / denom


def dsc(c: ConfusionCounts) -> float:
    denom = 2 * c.tp + c.fp + c.fn
    return 1.0 if denom == 0 else 2 * c.tp / denom


def fpe(c: ConfusionCounts) -> float:
    denom = c.fp + c.tn
    return 0.0 if denom == 0 else c.fp / denom


def fne(c: ConfusionCounts) -> float:
    denom = c.fn + c.tp
    return 0.0 if denom == 0 else c.fn / denom


def evaluate_pair(image_id: str, pred, gt) -> EvalRecord:
    c = confusion(pred, gt)
    return EvalRecord(image_id, c, iou(c), dsc(c), fpe(c), fne(c))


def summarize(records: Iterable[EvalRecord]) -> EvalReport:
    records = sorted(records, key=lambda r: r.image_id)
    if not records:
        raise DataError("no records to summarise")
    n = len(records)
    # fsum keeps the means independent of record order
    return EvalReport(
        records=records,
        mean_iou=math.fsum(r.iou for r in records) / n,
        mean_dsc=math.fsum(r.dsc for r in records) / n,
        mean_fpe=math.fsum(r.fpe for r in records) / n,
        mean_fne=math.fsum(r.fne for r in records) / n,
        count=n,
    )


def evaluate_dataset(pairs) -> EvalReport:
    """Per-image metrics and unweighted means for ``(image_id, pred, gt)`` triples."""
    return summarize(evaluate_pair(image_id, pred, gt) for image_id, pred, gt in pairs)


def report_to_json(report: EvalReport) -> str:
    doc = {
        "summary": report.summary(),
        "records": [
            {
                "image_id": r.image_id,
                "tp": r.counts.tp,
                "fp": r.counts.fp,
                "fn": r.counts.fn,
                "tn": r.counts.tn,
                "iou": r.iou,
                "dsc": r.dsc,
                "fpe": r.fpe,
                "fne": r.fne,
            }
            for r in report.records
        ],
    }
    return json.dumps(doc, indent=2) + "\n"


def report_to_csv(report: EvalReport) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for r in report.records:
        writer.writerow(r.row())
    writer.writerow(["__mean__", "", "", "", "", report.mean_iou, report.mean_dsc, report.mean_fpe, report.mean_fne])
    return buf.getvalue()


def write_report(report: EvalReport, fmt: str, path) -> None:
    if fmt == "json":
        text = report_to_json(report)
    elif fmt == "csv":
        text = report_to_csv(report)
    else:
        raise ValueError(f"unknown report format {fmt!r}")
    Path(path).write_text(text, encoding="utf-8")
