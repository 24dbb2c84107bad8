"""External clustering-validity metrics over predicted vs ground-truth labels.

All entropy-based sums are taken over sorted term arrays: summation order
then depends only on term values, which makes every metric exactly
invariant under relabeling and makes a perfect prediction score exactly 1.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Dict, Sequence

import numpy as np
from scipy.optimize import linear_sum_assignment


@dataclass(frozen=True)
class ContingencyTable:
    """Class-by-cluster co-occurrence counts with marginals."""

    counts: np.ndarray
    row_totals: np.ndarray
    col_totals: np.ndarray
    n: int


def _codes(labels: Sequence) -> np.ndarray:
    _, inverse = np.unique(np.asarray(labels), return_inverse=True)
    return inverse.astype(np.int64)


def contingency(truth: Sequence, pred: Sequence) -> ContingencyTable:
    """counts[i][j] = points with truth class i and predicted cluster j,
    classes/clusters indexed in ascending label order."""
    if len(truth) != len(pred):
        raise ValueError(f"label length mismatch: {len(truth)} vs {len(pred)}")
    if len(truth) == 0:
        raise ValueError("empty labelings")
    t = _codes(truth)
    p = _codes(pred)
    counts = np.zeros((t.max() + 1, p.max() + 1), dtype=np.int64)
    np.add.at(counts, (t, p), 1)
    return ContingencyTable(
        counts=counts,
        row_totals=counts.sum(axis=1),
        col_totals=counts.sum(axis=0),
        n=int(len(truth)),
    )


def _sorted_sum(terms: np.ndarray) -> float:
    return float(np.sort(terms).sum())


def _entropy(totals: np.ndarray, n: int) -> float:
    """Natural-log entropy of a marginal; zero counts contribute nothing."""
    nz = totals[totals > 0]
    return _sorted_sum((nz / n) * np.log(n / nz))


def nmi(tab: ContingencyTable) -> float:
    """Mutual information normalized by the geometric mean of the marginal
    entropies; 0 when either marginal has a single class."""
    h_true = _entropy(tab.row_totals, tab.n)
    h_pred = _entropy(tab.col_totals, tab.n)
    if h_true <= 0.0 or h_pred <= 0.0:
        return 0.0
    rows, cols = np.nonzero(tab.counts)
    nij = tab.counts[rows, cols]
    # nij * n and marginal products stay exact in int64.
    terms = (nij / tab.n) * np.log(nij * tab.n / (tab.row_totals[rows] * tab.col_totals[cols]))
    mi = _sorted_sum(terms)
    return mi / float(np.sqrt(h_true * h_pred))


def _pair_count(v: np.ndarray) -> int:
    v = v.astype(np.int64)
    return int((v * (v - 1) // 2).sum())


def ari(tab: ContingencyTable) -> float:
    """Adjusted Rand index via the pair-counting closed form.

    Returns 0 when the adjustment denominator vanishes (e.g. a single
    cluster against a single class).
    """
    if tab.n < 2:
        raise ValueError("adjusted Rand index needs N >= 2 (no pairs otherwise)")
    together_both = _pair_count(tab.counts.ravel())
    together_true = _pair_count(tab.row_totals)
    together_pred = _pair_count(tab.col_totals)
    total_pairs = tab.n * (tab.n - 1) // 2
    expected = together_true * together_pred / total_pairs
    max_index = (together_true + together_pred) / 2.0
    if max_index == expected:
        return 0.0
    return (together_both - expected) / (max_index - expected)


def homogeneity(tab: ContingencyTable) -> float:
    """1 - H(class | cluster) / H(class); 1 when the classes carry no entropy."""
    h_true = _entropy(tab.row_totals, tab.n)
    if h_true <= 0.0:
        return 1.0
    rows, cols = np.nonzero(tab.counts)
    nij = tab.counts[rows, cols]
    cond = _sorted_sum((nij / tab.n) * np.log(tab.col_totals[cols] / nij))
    return 1.0 - cond / h_true


def acc(tab: ContingencyTable) -> float:
    """Best-matching accuracy: optimal one-to-one assignment between
    predicted clusters and classes on the square-padded table."""
    side = max(tab.counts.shape)
    padded = np.zeros((side, side), dtype=np.int64)
    padded[: tab.counts.shape[0], : tab.counts.shape[1]] = tab.counts
    rows, cols = linear_sum_assignment(padded, maximize=True)
    return float(padded[rows, cols].sum()) / tab.n


def evaluate(truth: Sequence, pred: Sequence) -> Dict[str, float]:
    """All four metrics for one labeling pair."""
    tab = contingency(truth, pred)
    return {
        "nmi": nmi(tab),
        "ari": ari(tab),
        "homogeneity": homogeneity(tab),
        "acc": acc(tab),
    }


@dataclass
class EvaluationReport:
    """Metric values plus wall-clock seconds per pipeline stage."""

    nmi: float
    ari: float
    homogeneity: float
    acc: float
    timings: Dict[str, float] = field(default_factory=dict)

    @classmethod
    def from_metrics(cls, metrics: Dict[str, float], timings: Dict[str, float]) -> "EvaluationReport":
        return cls(
            nmi=metrics["nmi"],
            ari=metrics["ari"],
            homogeneity=metrics["homogeneity"],
            acc=metrics["acc"],
            timings=dict(timings),
        )

    def to_dict(self) -> dict:
        return {
            "nmi": self.nmi,
            "ari": self.ari,
            "homogeneity": self.homogeneity,
            "acc": self.acc,
            "timings": self.timings,
        }

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), **kwargs)
