"""Ward-linkage agglomerative clustering over a condensed matrix.

The nearest-neighbor-chain kernel discovers reciprocal merges in arbitrary
order; the results are re-sorted here into canonical dendrogram order (by
height, ties by smallest participating node ids) so they coincide with a
greedy closest-pair agglomeration. Leaf ids are 0..n-1, internal ids n..2n-2
in canonical merge order.
"""

import csv
import heapq
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import DataError, InvariantError
from .lmethod import EvaluationCurve
from .simmatrix import CondensedMatrix

# tolerated relative height decrease between consecutive merges; Ward is
# reducible, so anything beyond float noise is a bug
_MONOTONE_SLACK = 1e-9


@dataclass(frozen=True)
class Dendrogram:
    """Ordered merge list. Arrays all have length n-1."""

    n: int
    left: np.ndarray
    right: np.ndarray
    height: np.ndarray
    size: np.ndarray

    def validate(self) -> None:
        n = self.n
        if self.left.shape != (n - 1,):
            raise InvariantError("dendrogram arrays must have length n-1")
        seen = np.zeros(2 * n - 1, dtype=bool)
        sizes = np.ones(2 * n - 1, dtype=np.int64)
        for t in range(n - 1):
            a, b = int(self.left[t]), int(self.right[t])
            if not (0 <= a < n + t and 0 <= b < n + t) or a == b:
                raise InvariantError(f"merge {t}: invalid children ({a}, {b})")
            if seen[a] or seen[b]:
                raise InvariantError(f"merge {t}: node merged twice")
            seen[a] = seen[b] = True
            sizes[n + t] = sizes[a] + sizes[b]
            if sizes[n + t] != self.size[t]:
                raise InvariantError(f"merge {t}: size {self.size[t]} != {sizes[n + t]}")
            if t > 0:
                floor = self.height[t - 1] - _MONOTONE_SLACK * max(1.0, abs(self.height[t - 1]))
                if self.height[t] < floor:
                    raise InvariantError(
                        f"merge heights decreased at {t}: "
                        f"{self.height[t]} < {self.height[t - 1]}"
                    )


@dataclass(frozen=True)
class Assignment:
    """Cluster id per object; ids are 0..k-1 and every id is non-empty."""

    labels: np.ndarray
    k: int

    def __post_init__(self):
        labels = np.asarray(self.labels, dtype=np.int64)
        if labels.ndim != 1 or labels.shape[0] == 0:
            raise DataError("assignment needs a non-empty 1-d label array")
        present = np.unique(labels)
        if present[0] < 0 or present[-1] >= self.k or present.shape[0] != self.k:
            raise DataError(
                f"assignment ids must cover 0..{self.k - 1} with no empty cluster"
            )
        object.__setattr__(self, "labels", labels)

    def __len__(self) -> int:
        return self.labels.shape[0]

    def members(self, cluster: int) -> np.ndarray:
        return np.flatnonzero(self.labels == cluster)


def _canonical_order(raw_a, raw_b, raw_h, n):
    # Rebuild the merge tree from slot-level records, then emit merges in
    # (height, min child id, max child id) order subject to children-first.
    node_of_slot = np.arange(n, dtype=np.int64)
    child_l = np.empty(n - 1, dtype=np.int64)
    child_r = np.empty(n - 1, dtype=np.int64)
    for t in range(n - 1):
        child_l[t] = node_of_slot[raw_a[t]]
        child_r[t] = node_of_slot[raw_b[t]]
        node_of_slot[raw_a[t]] = n + t

    parent = {}
    ready = np.zeros(n - 1, dtype=np.int64)
    heap = []
    for t in range(n - 1):
        for c in (int(child_l[t]), int(child_r[t])):
            if c >= n:
                parent[c] = t
            else:
                ready[t] += 1
        if ready[t] == 2:
            a, b = int(child_l[t]), int(child_r[t])
            heapq.heappush(heap, (raw_h[t], min(a, b), max(a, b), t))

    left = np.empty(n - 1, dtype=np.int64)
    right = np.empty(n - 1, dtype=np.int64)
    height = np.empty(n - 1, dtype=np.float64)
    size = np.empty(n - 1, dtype=np.int64)
    canon_of = {}
    node_size = np.ones(2 * n - 1, dtype=np.int64)
    for e in range(n - 1):
        h, ca, cb, t = heapq.heappop(heap)
        left[e], right[e], height[e] = ca, cb, h
        size[e] = node_size[ca] + node_size[cb]
        node_size[n + e] = size[e]
        canon_of[n + t] = n + e
        p = parent.get(n + t)
        if p is not None:
            ready[p] += 1
            if ready[p] == 2:
                x = child_l[p] if child_l[p] < n else canon_of[int(child_l[p])]
                y = child_r[p] if child_r[p] < n else canon_of[int(child_r[p])]
                heapq.heappush(heap, (raw_h[p], min(int(x), int(y)), max(int(x), int(y)), p))
    return left, right, height, size


def ward_ahc(matrix: CondensedMatrix, ward_on_squared: bool = True) -> Dendrogram:
    """Agglomerate under the Ward criterion via the nearest-neighbor chain.

    The stored distances feed the Lance-Williams update directly, treated as
    squared-distance analogues; pass ``ward_on_squared=False`` to square them
    first. Reported heights are the recurrence values at merge time either
    way. The matrix is consumed in place: copy beforehand if it is needed
    afterwards.
    """
    n = matrix.n
    if n < 2:
        raise DataError(f"clustering needs at least 2 objects, got {n}")
    vals = matrix.values
    if not ward_on_squared:
        np.square(vals, out=vals)
    raw_a, raw_b, raw_h = kernels.nn_chain(vals, n)
    left, right, height, size = _canonical_order(raw_a, raw_b, raw_h, n)
    dendro = Dendrogram(n=n, left=left, right=right, height=height, size=size)
    dendro.validate()
    return dendro


def cut(dendro: Dendrogram, k: int) -> Assignment:
    """Flat clustering with k groups: undo the last k-1 merges.

    Cluster ids are assigned by smallest member index.
    """
    n = dendro.n
    if not (1 <= k <= n):
        raise DataError(f"cut level {k} outside [1, {n}]")
    parent = np.arange(2 * n - 1, dtype=np.int64)
    for t in range(n - k):
        parent[dendro.left[t]] = n + t
        parent[dendro.right[t]] = n + t

    labels = np.empty(n, dtype=np.int64)
    root_id = {}
    for leaf in range(n):
        x = leaf
        while parent[x] != x:
            x = parent[x]
        if x not in root_id:
            root_id[x] = len(root_id)
        labels[leaf] = root_id[x]
    if len(root_id) != k:
        raise InvariantError(f"cut produced {len(root_id)} clusters, expected {k}")
    return Assignment(labels=labels, k=k)


def merge_height_curve(dendro: Dendrogram) -> EvaluationCurve:
    """Evaluation curve for knee selection: point c carries the height of the
    merge undone when moving from c-1 to c clusters, for c in [2, n]."""
    n = dendro.n
    x = np.arange(2, n + 1, dtype=np.int64)
    y = dendro.height[::-1].copy()
    return EvaluationCurve(x=x, y=y)


def dendrogram_to_csv(dendro: Dendrogram, path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["left", "right", "height", "size"])
        for t in range(dendro.n - 1):
            writer.writerow([
                int(dendro.left[t]), int(dendro.right[t]),
                repr(float(dendro.height[t])), int(dendro.size[t]),
            ])


def dendrogram_from_csv(path) -> Dendrogram:
    rows = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != ["left", "right", "height", "size"]:
            raise DataError(f"{path}: unexpected dendrogram header {header}")
        for row in reader:
            rows.append(row)
    n = len(rows) + 1
    left = np.array([int(r[0]) for r in rows], dtype=np.int64)
    right = np.array([int(r[1]) for r in rows], dtype=np.int64)
    height = np.array([float(r[2]) for r in rows], dtype=np.float64)
    size = np.array([int(r[3]) for r in rows], dtype=np.int64)
    dendro = Dendrogram(n=n, left=left, right=right, height=height, size=size)
    dendro.validate()
    return dendro
