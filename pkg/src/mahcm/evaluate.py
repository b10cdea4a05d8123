"""Clustering quality against ground-truth labels.

Per cluster-class pair: precision n_kl/n_k, recall n_kl/n_l, and their
harmonic mean. The dataset score is the class-size-weighted best match,
sum_l (n_l / N) * max_k F(k, l), computed with a single final division so a
perfect clustering scores exactly 1.0.
"""

from dataclasses import dataclass

import numpy as np

from .ahc import Assignment
from .errors import DataError


@dataclass(frozen=True)
class ContingencyTable:
    """Co-occurrence counts between clusters (rows) and classes (columns)."""

    counts: np.ndarray        # (k, l) int64
    cluster_sizes: np.ndarray  # (k,)
    class_sizes: np.ndarray    # (l,)
    total: int
    classes: np.ndarray        # original class labels, column order

    @property
    def k(self) -> int:
        return self.counts.shape[0]

    @property
    def l(self) -> int:
        return self.counts.shape[1]


def contingency(assignment, labels) -> ContingencyTable:
    """Exact co-occurrence counts between an assignment and class labels."""
    if isinstance(assignment, Assignment):
        cluster_ids = assignment.labels
        k = assignment.k
    else:
        cluster_ids = np.asarray(assignment, dtype=np.int64)
        k = int(cluster_ids.max()) + 1 if cluster_ids.size else 0
    labels = list(labels)
    if any(lab is None for lab in labels):
        raise DataError("every object needs a class label")
    if len(labels) != cluster_ids.shape[0]:
        raise DataError(
            f"assignment covers {cluster_ids.shape[0]} objects, labels cover {len(labels)}"
        )
    classes, class_ids = np.unique(np.asarray(labels, dtype=object), return_inverse=True)
    l = classes.shape[0]
    counts = np.zeros((k, l), dtype=np.int64)
    np.add.at(counts, (cluster_ids, class_ids), 1)
    return ContingencyTable(
        counts=counts,
        cluster_sizes=counts.sum(axis=1),
        class_sizes=counts.sum(axis=0),
        total=int(counts.sum()),
        classes=classes,
    )


def precision(n_kl: int, n_k: int) -> float:
    """Fraction of cluster k consisting of class l."""
    if n_k <= 0:
        raise DataError("precision undefined for an empty cluster")
    if not (0 <= n_kl <= n_k):
        raise DataError(f"impossible counts n_kl={n_kl}, n_k={n_k}")
    return n_kl / n_k


def recall(n_kl: int, n_l: int) -> float:
    """Fraction of class l captured by cluster k."""
    if n_l <= 0:
        raise DataError("recall undefined for an empty class")
    if not (0 <= n_kl <= n_l):
        raise DataError(f"impossible counts n_kl={n_kl}, n_l={n_l}")
    return n_kl / n_l


def f_pair(k: int, l: int, table: ContingencyTable) -> float:
    """Harmonic mean of precision and recall for one cluster-class pair;
    zero when the pair never co-occurs."""
    n_kl = int(table.counts[k, l])
    if n_kl == 0:
        return 0.0
    pr = precision(n_kl, int(table.cluster_sizes[k]))
    re = recall(n_kl, int(table.class_sizes[l]))
    return 2.0 * re * pr / (re + pr)


def dataset_f_measure(table: ContingencyTable) -> float:
    """Class-size-weighted best-match score over the whole table."""
    counts = table.counts.astype(np.float64)
    with np.errstate(invalid="ignore", divide="ignore"):
        pr = counts / table.cluster_sizes[:, None]
        re = counts / table.class_sizes[None, :]
        f = np.where(counts > 0, 2.0 * re * pr / (re + pr), 0.0)
    best = f.max(axis=0)
    return float(np.dot(table.class_sizes.astype(np.float64), best) / table.total)


def score(assignment, labels) -> float:
    """Convenience wrapper: contingency + dataset score in one call."""
    return dataset_f_measure(contingency(assignment, labels))
