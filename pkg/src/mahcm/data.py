"""Dataset of variable-length frame sequences and index-based subset views.

Frames are packed into one contiguous (total_frames, dim) float64 array at
construction; every cluster structure downstream refers to segments by
position, never by copying frame data.
"""

from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

import numpy as np

from .errors import DataError

Label = Union[str, int]


@dataclass(frozen=True)
class Segment:
    """One sequence of fixed-dimension feature vectors.

    ``frames`` has shape (n, d) with n >= 1. ``label`` is an opaque
    ground-truth class identifier used only by the evaluator.
    """

    id: int
    frames: np.ndarray
    label: Optional[Label] = None

    def __post_init__(self):
        frames = np.asarray(self.frames, dtype=np.float64)
        if frames.ndim == 1:
            frames = frames.reshape(1, -1)
        if frames.ndim != 2 or frames.shape[0] < 1 or frames.shape[1] < 1:
            raise DataError(f"segment {self.id}: frames must be a non-empty (n, d) array")
        if self.id < 0 or int(self.id) != self.id:
            raise DataError(f"segment id must be a non-negative integer, got {self.id!r}")
        object.__setattr__(self, "frames", frames)

    def __len__(self) -> int:
        return self.frames.shape[0]


@dataclass(frozen=True)
class Dataset:
    """Immutable ordered collection of segments sharing one dimension."""

    segments: tuple
    dim: int
    flat: np.ndarray = field(repr=False)       # (total_frames, dim) pack
    offsets: np.ndarray = field(repr=False)    # (N+1,) int64 frame offsets

    @property
    def n(self) -> int:
        return len(self.segments)

    @property
    def labeled(self) -> bool:
        return self.segments[0].label is not None

    @property
    def labels(self):
        """Per-segment labels in dataset order, or None when unlabeled."""
        if not self.labeled:
            return None
        return [s.label for s in self.segments]

    def frames_of(self, position: int) -> np.ndarray:
        return self.flat[self.offsets[position] : self.offsets[position + 1]]

    def __len__(self) -> int:
        return self.n


def make_dataset(segments: Sequence[Segment]) -> Dataset:
    """Validate segments and pack them into a Dataset.

    The dimension is inferred from the first segment. Raises DataError for an
    empty list, dimension mismatches, duplicate ids, or partial labelling.
    """
    if not segments:
        raise DataError("cannot build a dataset from an empty segment list")
    dim = segments[0].frames.shape[1]
    seen = set()
    n_labeled = 0
    for s in segments:
        if s.frames.shape[1] != dim:
            raise DataError(
                f"dimension mismatch: segment {s.id} has dim {s.frames.shape[1]}, expected {dim}"
            )
        if s.id in seen:
            raise DataError(f"duplicate segment id {s.id}")
        seen.add(s.id)
        if s.label is not None:
            n_labeled += 1
    if n_labeled not in (0, len(segments)):
        raise DataError(
            f"partial labelling: {n_labeled} of {len(segments)} segments carry labels"
        )

    offsets = np.zeros(len(segments) + 1, dtype=np.int64)
    for i, s in enumerate(segments):
        offsets[i + 1] = offsets[i] + s.frames.shape[0]
    flat = np.empty((offsets[-1], dim), dtype=np.float64)
    for i, s in enumerate(segments):
        flat[offsets[i] : offsets[i + 1]] = s.frames

    # re-expose frames as views into the pack so data is stored once
    packed = tuple(
        Segment(id=s.id, frames=flat[offsets[i] : offsets[i + 1]], label=s.label)
        for i, s in enumerate(segments)
    )
    return Dataset(segments=packed, dim=dim, flat=flat, offsets=offsets)


@dataclass(frozen=True)
class SubsetView:
    """A strictly increasing list of positions into a dataset. No frame copies."""

    dataset: Dataset
    indices: np.ndarray

    def __len__(self) -> int:
        return self.indices.shape[0]

    def segment(self, k: int) -> Segment:
        return self.dataset.segments[self.indices[k]]


def subset_view(dataset: Dataset, indices) -> SubsetView:
    """Build a SubsetView; indices are deduplicate-checked and stored sorted."""
    idx = np.asarray(indices, dtype=np.int64)
    if idx.ndim != 1 or idx.shape[0] == 0:
        raise DataError("subset indices must be a non-empty 1-d sequence")
    if idx.min() < 0 or idx.max() >= dataset.n:
        raise DataError(
            f"subset index out of range [0, {dataset.n}): {int(idx.min())}..{int(idx.max())}"
        )
    idx = np.sort(idx)
    if np.any(idx[1:] == idx[:-1]):
        dup = int(idx[np.nonzero(idx[1:] == idx[:-1])[0][0]])
        raise DataError(f"duplicate index {dup} in subset")
    idx.setflags(write=False)
    return SubsetView(dataset=dataset, indices=idx)
