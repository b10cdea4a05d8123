"""Dataset builders shared by the acceptance suite."""

import numpy as np

from mahcm.data import Segment, make_dataset

# 20 class sizes, largest/smallest = 10, grouped into five geometric families
# whose member masses are balanced (~400 each out of 2000)
FAMILY_SIZES = [
    [250, 84, 41, 25],
    [222, 107, 46, 28],
    [197, 121, 52, 32],
    [174, 137, 58, 36],
    [154, 95, 75, 66],
]


def skewed_family_dataset(seed, dim=3, jitter=0.25, warp=0.05):
    """N=2000, L=20, class sizes skewed 10:1 with two-level geometry.

    Classes inside a family share a coarse trajectory, families are far
    apart: the natural structure of a class taxonomy. Family masses sit
    around 400 members, so an even 4-way division overflows a cap of 500
    while the settled per-family grouping does not.
    """
    rng = np.random.default_rng(seed)
    segments = []
    seg_id = 0
    class_id = 0
    for family in FAMILY_SIZES:
        anchor = np.cumsum(rng.normal(0.0, 3.0, size=(14, dim)), axis=0)
        for size in family:
            length = int(rng.integers(8, 13))
            template = anchor[:length] + np.cumsum(
                rng.normal(0.0, 1.0, size=(length, dim)), axis=0
            )
            for _ in range(size):
                frames = _warp(template, warp, rng)
                if jitter > 0:
                    frames = frames + rng.normal(0.0, jitter, size=frames.shape)
                segments.append(Segment(id=seg_id, frames=frames, label=f"c{class_id}"))
                seg_id += 1
            class_id += 1
    return make_dataset(segments)


def _warp(template, warp, rng):
    if warp == 0:
        return template.copy()
    rows = []
    for i in range(template.shape[0]):
        r = rng.random()
        if r < warp / 2:
            continue
        rows.append(i)
        if r < warp:
            rows.append(i)
    if not rows:
        rows = [0]
    return template[np.asarray(rows)]
