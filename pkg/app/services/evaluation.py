"""
Evaluation harness: confusion counts, rates, threshold sweeps, ROC and
precision-recall curves, and deterministic stratified splits.

Benign is the positive class: TP counts benign sessions detected as benign,
TN counts malicious sessions detected as malicious. The "precision rate" used
by the F-score is the specificity TN / (TN + FP); standard precision
TP / (TP + FP) is reported separately and is what the PR curve uses.
"""

import logging
import math
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
from sklearn.metrics import auc, confusion_matrix

from app.config import settings

from ..schemas.core import ActivityLabel, Session
from ..schemas.reports import (
    ComparisonRow,
    ConfusionMatrix,
    CrossValidationResult,
    CurvePoint,
    MetricsReport,
    SweepRow,
)
from ..utils.exceptions import (
    MetricsException,
    ScoringException,
    SensorGuardException,
    SplitException,
)
from .bayes import train_bayes
from .detectors import Detector, Threshold, build_detector
from .markov import train_markov

logger = logging.getLogger(__name__)

GroundTruth = Union[ActivityLabel, bool]


def _is_malicious_label(label: GroundTruth) -> bool:
    if isinstance(label, bool):
        return label
    if label == ActivityLabel.UNKNOWN:
        raise MetricsException("Sessions labeled Unknown have no ground truth for evaluation")
    return label == ActivityLabel.MALICIOUS


def confusion(verdicts: Sequence[bool], labels: Sequence[GroundTruth]) -> ConfusionMatrix:
    """
    Count verdicts (True = malicious) against ground truth.

    Raises:
        MetricsException: If the sequences differ in length or a label is Unknown
    """
    if len(verdicts) != len(labels):
        raise MetricsException(
            f"Got {len(verdicts)} verdicts for {len(labels)} labels",
            {"verdicts": len(verdicts), "labels": len(labels)},
        )
    if not verdicts:
        return ConfusionMatrix()

    y_true = [int(_is_malicious_label(label)) for label in labels]
    y_pred = [int(bool(v)) for v in verdicts]
    matrix = confusion_matrix(y_true, y_pred, labels=[0, 1])
    return ConfusionMatrix(
        tp=int(matrix[0, 0]), fn=int(matrix[0, 1]), fp=int(matrix[1, 0]), tn=int(matrix[1, 1])
    )


def _ratio(numerator: int, denominator: int) -> Optional[float]:
    return numerator / denominator if denominator else None


def f_score(recall: Optional[float], specificity: Optional[float]) -> Optional[float]:
    """2 * recall * precision-rate / (recall + precision-rate), precision-rate = specificity."""
    if recall is None or specificity is None or recall + specificity == 0:
        return None
    return 2 * recall * specificity / (recall + specificity)


def metrics(cm: ConfusionMatrix) -> MetricsReport:
    """
    Rates from a confusion matrix; zero-denominator rates are None.

    Raises:
        MetricsException: If the matrix is empty
    """
    if cm.total == 0:
        raise MetricsException("Cannot compute metrics from an empty confusion matrix")

    recall = _ratio(cm.tp, cm.tp + cm.fn)
    specificity = _ratio(cm.tn, cm.tn + cm.fp)
    return MetricsReport(
        recall=recall,
        fnr=_ratio(cm.fn, cm.tp + cm.fn),
        specificity=specificity,
        fpr=_ratio(cm.fp, cm.tn + cm.fp),
        accuracy=(cm.tp + cm.tn) / cm.total,
        f_score=f_score(recall, specificity),
        standard_precision=_ratio(cm.tp, cm.tp + cm.fp),
        confusion=cm,
    )


def score_sessions(detector: Detector, sessions: Sequence[Session]) -> List[float]:
    """Score every session once; failures name the offending session."""
    scores = []
    for session in sessions:
        try:
            scores.append(detector.score(session))
        except SensorGuardException as e:
            raise ScoringException(
                f"Failed to score session '{session.id}': {e.message}",
                {"session_id": session.id, **e.details},
            )
    return scores


def threshold_sweep(
    detector: Detector, sessions: Sequence[Session], thresholds: Sequence[Threshold]
) -> List[SweepRow]:
    """
    One metrics row per threshold.

    Raises:
        MetricsException: If thresholds are empty or unsorted
        ScoringException: If a session cannot be scored
    """
    if not thresholds:
        raise MetricsException("Threshold list is empty")
    if list(thresholds) != sorted(thresholds):
        raise MetricsException("Thresholds must be sorted", {"thresholds": list(thresholds)})
    thresholds = [detector.validate_threshold(t) for t in thresholds]

    scores = score_sessions(detector, sessions)
    labels = [s.label for s in sessions]
    rows = []
    for threshold in thresholds:
        verdicts = [detector.decide(score, threshold) for score in scores]
        rows.append(SweepRow(threshold=threshold, report=metrics(confusion(verdicts, labels))))
    logger.info(f"Swept {len(thresholds)} {detector.kind} thresholds over {len(sessions)} sessions")
    return rows


def roc_points(sweep: Sequence[SweepRow]) -> List[CurvePoint]:
    """(fpr, tpr) per threshold sorted by fpr then tpr; duplicate points collapse to one."""
    points = [
        CurvePoint(threshold=row.threshold, x=row.report.fpr, y=row.report.recall)
        for row in sweep
        if row.report.fpr is not None and row.report.recall is not None
    ]
    skipped = len(sweep) - len(points)
    if skipped:
        logger.warning(f"Skipped {skipped} ROC point(s) with undefined rates")

    points.sort(key=lambda p: (p.x, p.y))
    collapsed: List[CurvePoint] = []
    for point in points:
        if collapsed and (collapsed[-1].x, collapsed[-1].y) == (point.x, point.y):
            continue
        collapsed.append(point)
    return collapsed


def _collapse_by_x(points: Sequence[CurvePoint]) -> List[CurvePoint]:
    best: Dict[float, CurvePoint] = {}
    for point in points:
        if point.x not in best or point.y > best[point.x].y:
            best[point.x] = point
    return [best[x] for x in sorted(best)]


def pr_points(sweep: Sequence[SweepRow]) -> List[CurvePoint]:
    """(recall, standard precision) per threshold, anchored at (0, 1)."""
    points = [CurvePoint(threshold=None, x=0.0, y=1.0)]
    points += [
        CurvePoint(threshold=row.threshold, x=row.report.recall, y=row.report.standard_precision)
        for row in sweep
        if row.report.recall is not None and row.report.standard_precision is not None
    ]
    return _collapse_by_x(points)


def auprc(points: Sequence[CurvePoint]) -> float:
    """
    Trapezoidal area under a recall/precision curve.

    Raises:
        MetricsException: If fewer than 2 distinct recall values are given
    """
    curve = _collapse_by_x(points)
    if len(curve) < 2:
        raise MetricsException(
            "Area under the PR curve needs at least 2 distinct recall values",
            {"points": len(curve)},
        )
    area = auc([p.x for p in curve], [p.y for p in curve])
    return float(min(1.0, max(0.0, area)))


def _label_groups(sessions: Sequence[Session]) -> List[List[Session]]:
    groups: Dict[ActivityLabel, List[Session]] = {}
    for session in sessions:
        groups.setdefault(session.label, []).append(session)
    return [groups[label] for label in ActivityLabel if label in groups]


def kfold_split(sessions: Sequence[Session], k: int, seed: int) -> List[List[Session]]:
    """
    Partition sessions into k label-stratified folds whose sizes differ by at most 1.

    Sessions of each label are shuffled and dealt round-robin, the dealing
    position carrying over from one label to the next.

    Raises:
        SplitException: If k < 2 or k exceeds the session count
    """
    if k < 2:
        raise SplitException(f"k must be at least 2, got {k}", {"k": k})
    if k > len(sessions):
        raise SplitException(
            f"Cannot split {len(sessions)} sessions into {k} folds", {"k": k, "sessions": len(sessions)}
        )

    rng = np.random.default_rng(seed)
    folds: List[List[Session]] = [[] for _ in range(k)]
    position = 0
    for group in _label_groups(sessions):
        for index in rng.permutation(len(group)):
            folds[position % k].append(group[int(index)])
            position += 1
    return folds


def holdout_split(
    sessions: Sequence[Session], train_fraction: float = settings.TRAIN_FRACTION, seed: int = settings.DEFAULT_SEED
) -> Tuple[List[Session], List[Session]]:
    """
    Stratified train/test split with |train| = round(train_fraction * N).

    Per-label train counts are floored, then the remainder goes to the labels
    with the largest fractional parts.

    Raises:
        SplitException: If the fraction is outside (0, 1) or a side ends up empty
    """
    if not 0 < train_fraction < 1:
        raise SplitException(f"train_fraction must lie in (0, 1), got {train_fraction}")

    groups = _label_groups(sessions)
    n_train = int(math.floor(train_fraction * len(sessions) + 0.5))
    ideal = [train_fraction * len(g) for g in groups]
    counts = [int(math.floor(x)) for x in ideal]
    remainder = n_train - sum(counts)
    by_fraction = sorted(range(len(groups)), key=lambda i: (-(ideal[i] - counts[i]), i))
    for i in by_fraction[:remainder]:
        counts[i] += 1

    rng = np.random.default_rng(seed)
    train: List[Session] = []
    test: List[Session] = []
    for group, count in zip(groups, counts):
        order = rng.permutation(len(group))
        train.extend(group[int(i)] for i in order[:count])
        test.extend(group[int(i)] for i in order[count:])

    if not train or not test:
        raise SplitException(
            f"Split of {len(sessions)} sessions at {train_fraction} leaves an empty side",
            {"train": len(train), "test": len(test)},
        )
    return train, test


def pooled_sweep(fold_rows: Sequence[Sequence[SweepRow]]) -> List[SweepRow]:
    """Sum confusion counts across folds threshold by threshold."""
    pooled = []
    for rows in zip(*fold_rows):
        total = ConfusionMatrix()
        for row in rows:
            total = total + row.report.confusion
        pooled.append(SweepRow(threshold=rows[0].threshold, report=metrics(total)))
    return pooled


def cross_validate(
    kind: str,
    sessions: Sequence[Session],
    k: int = settings.CV_FOLDS,
    seed: int = settings.DEFAULT_SEED,
    thresholds: Optional[Sequence[Threshold]] = None,
    alpha: float = settings.SMOOTHING_ALPHA,
    interval: Optional[int] = None,
) -> CrossValidationResult:
    """
    k-fold evaluation: each fold is tested against a model trained on the
    benign sessions of the remaining folds.
    """
    if kind not in ("markov", "bayes"):
        raise MetricsException(f"Unknown detector kind '{kind}'", {"kind": kind})
    if thresholds is None:
        thresholds = settings.MARKOV_SWEEP if kind == "markov" else settings.BAYES_SWEEP

    folds = kfold_split(sessions, k, seed)
    fold_rows = []
    for index, test in enumerate(folds):
        train = [s for j, fold in enumerate(folds) if j != index for s in fold if s.is_benign]
        model = train_markov(train) if kind == "markov" else train_bayes(train, alpha)
        detector = build_detector(model, interval)
        fold_rows.append(threshold_sweep(detector, test, thresholds))
        logger.info(f"Fold {index + 1}/{k}: trained on {len(train)}, tested on {len(test)}")

    return CrossValidationResult(fold_rows=fold_rows, pooled=pooled_sweep(fold_rows))


def compare(
    entries: Sequence[Tuple[Detector, Threshold, Sequence[Threshold]]],
    sessions: Sequence[Session],
) -> List[ComparisonRow]:
    """
    Each detector at its operating threshold, with auPRC over its threshold grid.

    auPRC is None when the grid yields fewer than 2 distinct recall values.
    """
    rows = []
    for detector, threshold, grid in entries:
        report = threshold_sweep(detector, sessions, [threshold])[0].report
        try:
            area: Optional[float] = auprc(pr_points(threshold_sweep(detector, sessions, sorted(grid))))
        except MetricsException as e:
            logger.warning(f"auPRC undefined for {detector.kind}: {e.message}")
            area = None
        rows.append(
            ComparisonRow(
                detector=detector.kind,
                threshold=detector.validate_threshold(threshold),
                report=report,
                auprc=area,
            )
        )
    return rows
