"""Iterative multi-stage agglomerative clustering with an occupancy cap.

One iteration: cluster every subset independently (Ward over pairwise
alignment distances, cluster count per subset picked by knee detection),
extract one medoid per cluster, re-cluster the medoids, move every segment to
the subset of its cluster's medoid group (refine), then evenly subdivide any
subset that outgrew the cap (split). The loop stops when the subset count
settles or the iteration budget runs out; the final flat clustering cuts the
medoid dendrogram and lets each segment inherit its medoid's cluster.

Peak memory is one condensed matrix of the largest subset, which the split
step keeps at or below the cap from the first split onward.
"""

import logging
import math
import time
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from . import evaluate
from .ahc import Assignment, Dendrogram, cut, merge_height_curve, ward_ahc
from .data import Dataset, SubsetView, subset_view
from .errors import DataError, InvariantError
from .kernels import pairwise_condensed
from .lmethod import KneeResult, l_method
from .simmatrix import CondensedMatrix, dtw_matrix

log = logging.getLogger(__name__)


@dataclass
class MahcConfig:
    """Run parameters. ``beta`` is the hard per-subset occupancy cap."""

    p0: int
    beta: int
    max_iters: int = 10
    conv_window: int = 2
    seed: int = 0
    workers: int = 1
    final_k: Optional[int] = None
    manage_size: bool = True
    ward_on_squared: bool = True
    l_refine: bool = False
    dtw_normalize: bool = False

    def validate(self) -> None:
        if self.p0 < 1:
            raise DataError("p0 must be >= 1")
        if self.beta < 2:
            raise DataError("beta must be >= 2 (a pairwise matrix needs 2 objects)")
        if self.max_iters < 1:
            raise DataError("max_iters must be >= 1")
        if self.conv_window < 1:
            raise DataError("conv_window must be >= 1")
        if self.workers < 1:
            raise DataError("workers must be >= 1")
        if self.final_k is not None and self.final_k < 1:
            raise DataError("final_k must be >= 1 when given")


@dataclass(frozen=True)
class SubsetClustering:
    """Stage-one output for one subset."""

    dendrogram: Optional[Dendrogram]
    k: int
    labels: np.ndarray          # local cluster id per subset member
    lmethod_fallback: bool


@dataclass(frozen=True)
class IterationStats:
    iteration: int
    n_subsets: int
    max_occupancy: int
    min_occupancy: int
    n_medoids: int
    k_estimate: int
    fmeasure: Optional[float]
    seconds: float


@dataclass
class MahcState:
    """Loop internals at the final iteration, kept for introspection."""

    iteration: int
    subsets: List[np.ndarray]
    stage: List[SubsetClustering]
    medoids: np.ndarray
    medoid_members: List[np.ndarray]
    stats: List[IterationStats] = field(default_factory=list)


@dataclass(frozen=True)
class MahcResult:
    assignment: Assignment
    stats: List[IterationStats]
    final_k: int
    converged: bool
    state: MahcState


# ---------------------------------------------------------------------------
# partitioning


def partition_indices(n: int, p: int, rng) -> List[np.ndarray]:
    """Seeded even partition of [0, n) into p sorted blocks of size
    ceil(n/p) or floor(n/p)."""
    if not (1 <= p <= n):
        raise DataError(f"cannot divide {n} objects into {p} subsets")
    perm = rng.permutation(n)
    base, rem = divmod(n, p)
    blocks = []
    start = 0
    for i in range(p):
        size = base + (1 if i < rem else 0)
        blocks.append(np.sort(perm[start : start + size]))
        start += size
    return blocks


def initial_partition(dataset: Dataset, p0: int, seed) -> List[SubsetView]:
    """Even seeded split of the whole dataset into p0 subsets."""
    rng = np.random.default_rng(seed)
    return [subset_view(dataset, b) for b in partition_indices(dataset.n, p0, rng)]


def _split_blocks(blocks: List[np.ndarray], beta: int, rng) -> List[np.ndarray]:
    out = []
    for b in blocks:
        s = b.shape[0]
        if s <= beta:
            out.append(b)
            continue
        q = math.ceil(s / beta)
        perm = rng.permutation(s)
        base, rem = divmod(s, q)
        start = 0
        for part in range(q):
            size = base + (1 if part < rem else 0)
            out.append(np.sort(b[perm[start : start + size]]))
            start += size
    return out


def split(subsets: List[SubsetView], beta: int, seed):
    """Evenly subdivide every subset above the cap; others pass through.

    Returns (new subsets, new subset count)."""
    if beta < 2:
        raise DataError("beta must be >= 2")
    rng = np.random.default_rng(seed)
    dataset = subsets[0].dataset
    blocks = _split_blocks([v.indices for v in subsets], beta, rng)
    views = [subset_view(dataset, b) for b in blocks]
    return views, len(views)


def _check_partition(blocks: List[np.ndarray], n: int) -> None:
    total = np.concatenate(blocks) if blocks else np.empty(0, dtype=np.int64)
    if total.shape[0] != n or not np.array_equal(np.sort(total), np.arange(n)):
        raise InvariantError("subsets no longer partition the dataset")


# ---------------------------------------------------------------------------
# stage one and medoids


def _cluster_subset(dataset: Dataset, block: np.ndarray, config: MahcConfig,
                    size_cap=None):
    """Cluster one subset; returns (SubsetClustering, matrix or None).

    The returned matrix still holds the original distances (clustering works
    on a copy) so medoids can be read from it.
    """
    if block.shape[0] == 1:
        return SubsetClustering(None, 1, np.zeros(1, dtype=np.int64), False), None
    view = SubsetView(dataset=dataset, indices=block)
    matrix = dtw_matrix(view, workers=config.workers, size_cap=size_cap,
                        normalize=config.dtw_normalize)
    dendro = ward_ahc(matrix.copy(), ward_on_squared=config.ward_on_squared)
    knee = l_method(merge_height_curve(dendro), refine=config.l_refine)
    assign = cut(dendro, min(knee.k, block.shape[0]))
    return SubsetClustering(dendro, assign.k, assign.labels, knee.fallback), matrix


def stage_one(dataset: Dataset, subsets: List[SubsetView], config: MahcConfig,
              keep_matrices: bool = False):
    """Independently cluster every subset; results follow subset order.

    With ``keep_matrices`` the per-subset distance matrices are returned too
    (medoid extraction needs them); otherwise they are dropped as soon as each
    subset is done.
    """
    results = []
    matrices = []
    for view in subsets:
        sc, matrix = _cluster_subset(dataset, np.asarray(view.indices), config)
        results.append(sc)
        if keep_matrices:
            matrices.append(matrix)
    if keep_matrices:
        return results, matrices
    return results


def _medoid_of_cluster(values: np.ndarray, n: int, pos: np.ndarray) -> int:
    """Local position minimizing the summed within-cluster distance; ties go
    to the smallest position."""
    k = pos.shape[0]
    if k == 1:
        return int(pos[0])
    ii, jj = np.triu_indices(k, 1)
    gi = pos[ii]
    gj = pos[jj]
    flat = gi * n - gi * (gi + 1) // 2 + gj - gi - 1
    v = values[flat]
    sums = np.zeros(k, dtype=np.float64)
    np.add.at(sums, ii, v)
    np.add.at(sums, jj, v)
    return int(pos[int(np.argmin(sums))])


def _medoids_for_subset(block: np.ndarray, sc: SubsetClustering,
                        matrix: Optional[CondensedMatrix]):
    medoids = []
    members = []
    for c in range(sc.k):
        pos = np.flatnonzero(sc.labels == c)
        members.append(block[pos])
        if pos.shape[0] == 1:
            medoids.append(int(block[pos[0]]))
        elif matrix is None:
            raise InvariantError("multi-member cluster needs its distance matrix")
        else:
            medoids.append(int(block[_medoid_of_cluster(matrix.values, block.shape[0], pos)]))
    return medoids, members


def compute_medoids(subsets: List[SubsetView], stage: List[SubsetClustering],
                    matrices) -> np.ndarray:
    """Medoid segment position per stage-one cluster, ordered by
    (subset index, cluster id). Length equals the summed cluster counts."""
    out = []
    for view, sc, matrix in zip(subsets, stage, matrices):
        meds, _ = _medoids_for_subset(np.asarray(view.indices), sc, matrix)
        out.extend(meds)
    return np.asarray(out, dtype=np.int64)


# ---------------------------------------------------------------------------
# medoid regrouping, refine, finalize


def _medoid_matrix(dataset: Dataset, medoids: np.ndarray, config: MahcConfig):
    values = pairwise_condensed(
        dataset.flat, dataset.offsets, medoids, workers=config.workers,
        normalize=config.dtw_normalize,
    )
    return CondensedMatrix(n=medoids.shape[0], values=values)


def _medoid_dendrogram(dataset: Dataset, medoids: np.ndarray,
                       config: MahcConfig) -> Optional[Dendrogram]:
    if medoids.shape[0] < 2:
        return None
    matrix = _medoid_matrix(dataset, medoids, config)
    return ward_ahc(matrix, ward_on_squared=config.ward_on_squared)


def regroup_medoids(dataset: Dataset, medoids: np.ndarray, target_groups: int,
                    config: MahcConfig, dendrogram: Optional[Dendrogram] = None):
    """Group the medoids into ``target_groups`` clusters by Ward agglomeration.

    Returns (group id per medoid, warned). If there are fewer medoids than
    groups every medoid becomes its own group and the warning flag is set.
    """
    s = medoids.shape[0]
    if target_groups < 1:
        raise DataError("target_groups must be >= 1")
    if s < target_groups:
        log.warning("only %d medoids for %d groups; using singleton groups", s, target_groups)
        return np.arange(s, dtype=np.int64), True
    if target_groups == s:
        return np.arange(s, dtype=np.int64), False
    if target_groups == 1:
        return np.zeros(s, dtype=np.int64), False
    if dendrogram is None:
        dendrogram = _medoid_dendrogram(dataset, medoids, config)
    return cut(dendrogram, target_groups).labels, False


def refine(subsets: List[SubsetView], stage: List[SubsetClustering],
           medoid_groups: np.ndarray, n_groups: int) -> List[SubsetView]:
    """Move every segment to the subset numbered by its cluster's medoid group."""
    dataset = subsets[0].dataset
    members = []
    for view, sc in zip(subsets, stage):
        block = np.asarray(view.indices)
        for c in range(sc.k):
            members.append(block[np.flatnonzero(sc.labels == c)])
    blocks = _refine_blocks(members, np.asarray(medoid_groups), n_groups)
    return [subset_view(dataset, b) for b in blocks]


def _refine_blocks(medoid_members: List[np.ndarray], groups: np.ndarray,
                   n_groups: int) -> List[np.ndarray]:
    if len(medoid_members) != groups.shape[0]:
        raise InvariantError("one group id per stage-one cluster required")
    buckets = [[] for _ in range(n_groups)]
    for c, mem in enumerate(medoid_members):
        buckets[int(groups[c])].append(mem)
    blocks = []
    for lst in buckets:
        if not lst:
            raise InvariantError("refine produced an empty subset")
        blocks.append(np.sort(np.concatenate(lst)))
    return blocks


def _scatter_assignment(n: int, medoid_members: List[np.ndarray],
                        medoid_labels: np.ndarray, k: int) -> Assignment:
    labels = np.full(n, -1, dtype=np.int64)
    for c, mem in enumerate(medoid_members):
        labels[mem] = medoid_labels[c]
    if np.any(labels < 0):
        raise InvariantError("finalize left segments unassigned")
    # canonical ids by smallest member index
    remap = np.full(k, -1, dtype=np.int64)
    nxt = 0
    for v in labels:
        if remap[v] < 0:
            remap[v] = nxt
            nxt += 1
    return Assignment(labels=remap[labels], k=k)


def _cut_medoids(dendro: Optional[Dendrogram], k: int, s: int) -> np.ndarray:
    if k == s:
        return np.arange(s, dtype=np.int64)
    if k == 1:
        return np.zeros(s, dtype=np.int64)
    return cut(dendro, k).labels


def finalize(dataset: Dataset, medoids: np.ndarray,
             medoid_members: List[np.ndarray], k: int, config: MahcConfig,
             dendrogram: Optional[Dendrogram] = None) -> Assignment:
    """Flat clustering of the whole dataset: cluster the medoids, cut at k,
    and let every segment inherit its medoid's cluster.

    ``k`` above the medoid count is clamped (with a warning). A precomputed
    medoid dendrogram can be passed to avoid rebuilding the matrix.
    """
    s = medoids.shape[0]
    if k < 1:
        raise DataError("final cluster count must be >= 1")
    if k > s:
        log.warning("requested %d clusters but only %d medoids; clamping", k, s)
        k = s
    if k != s and k != 1 and dendrogram is None:
        dendrogram = _medoid_dendrogram(dataset, medoids, config)
    medoid_labels = _cut_medoids(dendrogram, k, s)
    return _scatter_assignment(dataset.n, medoid_members, medoid_labels, k)


# ---------------------------------------------------------------------------
# the full loop


def run(dataset: Dataset, config: MahcConfig) -> MahcResult:
    """Execute the iterative procedure end to end.

    Per-iteration rows record the subsets processed in that iteration, so
    from the first split onward the reported max occupancy stays at or below
    the cap whenever size management is on. Identical dataset and config
    (seed included) give identical results for any worker count.
    """
    config.validate()
    n = dataset.n
    if config.p0 > n:
        raise DataError(f"p0={config.p0} exceeds dataset size {n}")
    rng = np.random.default_rng(config.seed)
    labels = dataset.labels

    blocks = partition_indices(n, config.p0, rng)
    _check_partition(blocks, n)

    stats: List[IterationStats] = []
    history_p: List[int] = []
    state = None
    final_assignment = None
    final_k = None
    converged = False

    for it in range(config.max_iters):
        t0 = time.perf_counter()
        p_i = len(blocks)
        history_p.append(p_i)
        occupancies = [b.shape[0] for b in blocks]

        # stage one, fused with medoid extraction so only one matrix lives
        # at a time
        stage: List[SubsetClustering] = []
        medoids: List[int] = []
        medoid_members: List[np.ndarray] = []
        cap = config.beta if (config.manage_size and it >= 1) else None
        for block in blocks:
            sc, matrix = _cluster_subset(dataset, block, config, size_cap=cap)
            stage.append(sc)
            meds, members = _medoids_for_subset(block, sc, matrix)
            medoids.extend(meds)
            medoid_members.extend(members)
            del matrix
        medoid_arr = np.asarray(medoids, dtype=np.int64)
        s = medoid_arr.shape[0]
        if s != sum(sc.k for sc in stage):
            raise InvariantError("medoid bookkeeping out of sync with cluster counts")
        for c, mem in enumerate(medoid_members):
            if medoid_arr[c] not in mem:
                raise InvariantError("medoid fell outside its cluster")

        k_est = s if config.final_k is None else min(config.final_k, s)
        mdendro = _medoid_dendrogram(dataset, medoid_arr, config)

        stop = it == config.max_iters - 1
        if not stop and it > 2 and len(history_p) >= config.conv_window:
            window = history_p[-config.conv_window :]
            if all(p == window[0] for p in window):
                stop = True
                converged = True

        fm = None
        if stop:
            final_assignment = _scatter_assignment(
                n, medoid_members, _cut_medoids(mdendro, k_est, s), k_est
            )
            final_k = k_est
            if labels is not None:
                fm = evaluate.score(final_assignment, labels)
        else:
            if labels is not None:
                trace = _scatter_assignment(
                    n, medoid_members, _cut_medoids(mdendro, k_est, s), k_est
                )
                fm = evaluate.score(trace, labels)
            groups = _cut_medoids(mdendro, p_i, s)
            blocks = _refine_blocks(medoid_members, groups, p_i)
            _check_partition(blocks, n)
            if config.manage_size:
                blocks = _split_blocks(blocks, config.beta, rng)
                _check_partition(blocks, n)
                if max(b.shape[0] for b in blocks) > config.beta:
                    raise InvariantError("split left a subset above the cap")

        seconds = time.perf_counter() - t0
        stats.append(IterationStats(
            iteration=it, n_subsets=p_i,
            max_occupancy=max(occupancies), min_occupancy=min(occupancies),
            n_medoids=s, k_estimate=k_est, fmeasure=fm, seconds=seconds,
        ))
        if stop:
            state = MahcState(iteration=it, subsets=list(blocks), stage=stage,
                              medoids=medoid_arr, medoid_members=medoid_members,
                              stats=stats)
            break

    return MahcResult(assignment=final_assignment, stats=stats,
                      final_k=final_k, converged=converged, state=state)


def full_ahc(dataset: Dataset, k: Optional[int] = None,
             config: Optional[MahcConfig] = None):
    """Plain single-stage agglomeration of the whole dataset, for comparison.

    Returns (assignment, cluster count used, knee result or None). When ``k``
    is omitted the count comes from knee detection on the merge curve.
    """
    if config is None:
        config = MahcConfig(p0=1, beta=max(2, dataset.n))
    n = dataset.n
    if n == 1:
        return Assignment(labels=np.zeros(1, dtype=np.int64), k=1), 1, None
    view = subset_view(dataset, np.arange(n))
    matrix = dtw_matrix(view, workers=config.workers, normalize=config.dtw_normalize)
    dendro = ward_ahc(matrix, ward_on_squared=config.ward_on_squared)
    knee = None
    if k is None:
        knee = l_method(merge_height_curve(dendro), refine=config.l_refine)
        k = knee.k
    if not (1 <= k <= n):
        raise DataError(f"cluster count {k} outside [1, {n}]")
    return cut(dendro, k), k, knee
