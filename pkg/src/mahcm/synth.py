"""Synthetic labeled datasets: class templates plus jitter and time warping.

Stands in for real feature-vector corpora at desk scale. Each class is a
random-walk template sequence; members copy the template, optionally
duplicate/drop frames (monotone warping) and add per-frame Gaussian jitter.
Labels carry the class index, so generated data plugs straight into the
evaluator.
"""

from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from .data import Dataset, Segment, make_dataset
from .errors import DataError


@dataclass(frozen=True)
class SyntheticSpec:
    """Recipe for one synthetic dataset.

    ``class_sizes`` is either one int (every class equal) or a per-class
    sequence. ``warp`` is the per-frame probability of a duplication or a
    deletion; ``jitter`` the per-coordinate noise scale.
    """

    n_classes: int
    class_sizes: Union[int, Sequence[int]]
    dim: int = 3
    min_len: int = 8
    max_len: int = 16
    jitter: float = 0.0
    warp: float = 0.0
    seed: int = 0

    def sizes(self) -> np.ndarray:
        if isinstance(self.class_sizes, (int, np.integer)):
            out = np.full(self.n_classes, int(self.class_sizes), dtype=np.int64)
        else:
            out = np.asarray(self.class_sizes, dtype=np.int64)
        if out.shape[0] != self.n_classes or np.any(out < 1):
            raise DataError("class_sizes must give a positive size for each class")
        return out

    def validate(self) -> None:
        if self.n_classes < 2:
            raise DataError("need at least 2 classes")
        if not (1 <= self.min_len <= self.max_len):
            raise DataError("need 1 <= min_len <= max_len")
        if self.dim < 1:
            raise DataError("dim must be >= 1")
        if self.jitter < 0:
            raise DataError("jitter must be >= 0")
        if not (0 <= self.warp < 1):
            raise DataError("warp must lie in [0, 1)")
        self.sizes()


def skewed_class_sizes(n_classes: int, total: int, ratio: float) -> np.ndarray:
    """Linear size profile from small to large classes, largest/smallest ~ratio,
    adjusted so the sizes sum to ``total`` exactly."""
    if n_classes < 1 or total < n_classes or ratio < 1:
        raise DataError("need n_classes >= 1, total >= n_classes, ratio >= 1")
    lo = 2.0 * total / (n_classes * (1.0 + ratio))
    profile = np.linspace(lo, lo * ratio, n_classes)
    sizes = np.maximum(1, np.rint(profile).astype(np.int64))
    sizes[-1] += total - sizes.sum()
    if sizes[-1] < 1:
        raise DataError("profile infeasible: adjustment emptied the largest class")
    return sizes


def generate_synthetic(spec: SyntheticSpec) -> Dataset:
    """Deterministic labeled dataset for the given spec and seed."""
    spec.validate()
    rng = np.random.default_rng(spec.seed)
    sizes = spec.sizes()

    templates = []
    for _ in range(spec.n_classes):
        length = int(rng.integers(spec.min_len, spec.max_len + 1))
        steps = rng.normal(0.0, 1.0, size=(length, spec.dim))
        templates.append(np.cumsum(steps, axis=0))

    segments = []
    seg_id = 0
    for cls in range(spec.n_classes):
        template = templates[cls]
        for _ in range(int(sizes[cls])):
            frames = _warp_template(template, spec.warp, rng)
            if spec.jitter > 0:
                frames = frames + rng.normal(0.0, spec.jitter, size=frames.shape)
            segments.append(Segment(id=seg_id, frames=frames, label=f"c{cls}"))
            seg_id += 1
    return make_dataset(segments)


def _warp_template(template: np.ndarray, warp: float, rng) -> np.ndarray:
    if warp == 0:
        return template.copy()
    rows = []
    for i in range(template.shape[0]):
        r = rng.random()
        if r < warp / 2:
            continue  # drop this frame
        rows.append(i)
        if r < warp:
            rows.append(i)  # duplicate it
    if not rows:
        rows = [0]
    return template[np.asarray(rows, dtype=np.int64)]
