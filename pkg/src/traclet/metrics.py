"""Classification metrics over prediction files.

Accuracy, per-class precision/recall/F1 (zero denominators score 0.0),
unweighted macro averages, and the confusion matrix.  Every report
cross-checks accuracy against the confusion-trace ratio and refuses to
exist if they disagree.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

from .model import InternalError, ValidationError

PREDICTION_HEADER = ("path", "true", "pred")


@dataclass(frozen=True)
class MetricsReport:
    accuracy: float
    classes: tuple[str, ...]
    confusion: tuple[tuple[int, ...], ...]  # rows = true class, cols = predicted
    per_class: dict
    macro_precision: float
    macro_recall: float
    macro_f1: float

    def to_dict(self) -> dict:
        return {
            "accuracy": self.accuracy,
            "classes": list(self.classes),
            "confusion": [list(r) for r in self.confusion],
            "per_class": {k: dict(v) for k, v in self.per_class.items()},
            "macro_precision": self.macro_precision,
            "macro_recall": self.macro_recall,
            "macro_f1": self.macro_f1,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "MetricsReport":
        return cls(
            accuracy=d["accuracy"],
            classes=tuple(d["classes"]),
            confusion=tuple(tuple(r) for r in d["confusion"]),
            per_class={k: dict(v) for k, v in d["per_class"].items()},
            macro_precision=d["macro_precision"],
            macro_recall=d["macro_recall"],
            macro_f1=d["macro_f1"],
        )

    def render(self) -> str:
        """Human-readable table; the machine-readable form is to_dict()."""
        width = max([len("macro avg")] + [len(c) for c in self.classes]) + 2
        lines = [f"accuracy: {self.accuracy:.4f}", ""]
        lines.append(
            f"{'class':<{width}}{'precision':>10}{'recall':>10}{'f1':>10}{'support':>10}"
        )
        for c in self.classes:
            m = self.per_class[c]
            lines.append(
                f"{c:<{width}}{m['precision']:>10.4f}{m['recall']:>10.4f}"
                f"{m['f1']:>10.4f}{m['support']:>10d}"
            )
        lines.append(
            f"{'macro avg':<{width}}{self.macro_precision:>10.4f}"
            f"{self.macro_recall:>10.4f}{self.macro_f1:>10.4f}"
        )
        lines.append("")
        lines.append("confusion matrix (rows = true, cols = predicted):")
        lines.append(f"{'':<{width}}" + "".join(f"{c:>{width}}" for c in self.classes))
        for c, row in zip(self.classes, self.confusion):
            lines.append(f"{c:<{width}}" + "".join(f"{n:>{width}d}" for n in row))
        return "\n".join(lines)


def compute_metrics(y_true, y_pred) -> MetricsReport:
    """Build a MetricsReport from parallel true/predicted label lists."""
    y_true = list(y_true)
    y_pred = list(y_pred)
    if not y_true:
        raise ValidationError("no_predictions")
    if len(y_true) != len(y_pred):
        raise ValidationError(
            "length_mismatch", f"{len(y_true)} true vs {len(y_pred)} predicted"
        )
    classes = sorted(set(y_true) | set(y_pred))
    index = {c: i for i, c in enumerate(classes)}
    k = len(classes)
    confusion = [[0] * k for _ in range(k)]
    correct = 0
    for t, p in zip(y_true, y_pred):
        confusion[index[t]][index[p]] += 1
        if t == p:
            correct += 1

    per_class = {}
    precisions, recalls, f1s = [], [], []
    for i, c in enumerate(classes):
        tp = confusion[i][i]
        support = sum(confusion[i])
        predicted = sum(confusion[r][i] for r in range(k))
        precision = tp / predicted if predicted else 0.0
        recall = tp / support if support else 0.0
        f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
        per_class[c] = {
            "precision": precision,
            "recall": recall,
            "f1": f1,
            "support": support,
        }
        precisions.append(precision)
        recalls.append(recall)
        f1s.append(f1)

    total = len(y_true)
    trace = sum(confusion[i][i] for i in range(k))
    if trace != correct or sum(sum(r) for r in confusion) != total:
        raise InternalError("confusion matrix disagrees with direct accuracy count")
    return MetricsReport(
        accuracy=correct / total,
        classes=tuple(classes),
        confusion=tuple(tuple(r) for r in confusion),
        per_class=per_class,
        macro_precision=sum(precisions) / k,
        macro_recall=sum(recalls) / k,
        macro_f1=sum(f1s) / k,
    )


def read_predictions(path) -> list[tuple[str, str, str]]:
    """Read a prediction file: CSV with header ``path,true,pred``.

    Malformed rows are hard errors; callers own semantic validation of the
    paths and labels against their manifest.
    """
    path = Path(path)
    rows = []
    with open(path, newline="", encoding="utf-8") as f:
        reader = csv.reader(f)
        header = next(reader, None)
        if header is None or tuple(h.strip() for h in header) != PREDICTION_HEADER:
            raise ValidationError("bad_prediction_header", f"{path}: {header!r}")
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 3 or not all(row):
                raise ValidationError("bad_prediction_row", f"{path}:{lineno}: {row!r}")
            rows.append((row[0], row[1], row[2]))
    if not rows:
        raise ValidationError("no_predictions", str(path))
    return rows


def write_predictions(rows, path) -> None:
    path = Path(path)
    with open(path, "w", newline="", encoding="utf-8") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(PREDICTION_HEADER)
        for r in rows:
            w.writerow(list(r))
