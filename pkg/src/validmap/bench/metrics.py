"""Binary classification scores for predicted valid sets.

Degenerate-case conventions, applied consistently everywhere:

- no positives in the ground truth and none predicted: precision, recall,
  and F1 are all 1 (the classifier made no mistake);
- predicted positives with zero true positives: precision is 0;
- nothing predicted while positives exist: precision is 0;
- no positives in the ground truth: recall is 1 (nothing to miss);
- F1 is the harmonic mean, 0 when precision + recall is 0.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..exceptions import ParameterError


@dataclass(frozen=True)
class ConfusionCounts:
    tp: int
    fp: int
    tn: int
    fn: int

    def __post_init__(self):
        if min(self.tp, self.fp, self.tn, self.fn) < 0:
            raise ParameterError("confusion counts must be nonnegative")

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.tn + self.fn

    @property
    def error_rate(self) -> float:
        """Fraction of misclassified points."""
        return (self.fp + self.fn) / self.total if self.total else 0.0


def confusion(predicted, actual) -> ConfusionCounts:
    """Count prediction outcomes; valid is the positive class."""
    predicted = np.asarray(predicted, dtype=bool)
    actual = np.asarray(actual, dtype=bool)
    if predicted.shape != actual.shape:
        raise ParameterError("prediction and ground truth lengths differ")
    return ConfusionCounts(
        tp=int(np.sum(predicted & actual)),
        fp=int(np.sum(predicted & ~actual)),
        tn=int(np.sum(~predicted & ~actual)),
        fn=int(np.sum(~predicted & actual)),
    )


def metrics(counts: ConfusionCounts):
    """(precision, recall, F1) under the module's degenerate conventions."""
    if counts.tp + counts.fp > 0:
        precision = counts.tp / (counts.tp + counts.fp)
    else:
        precision = 1.0 if counts.fn == 0 else 0.0
    recall = counts.tp / (counts.tp + counts.fn) if counts.tp + counts.fn else 1.0
    f1 = (
        2.0 * precision * recall / (precision + recall)
        if precision + recall > 0
        else 0.0
    )
    return precision, recall, f1
