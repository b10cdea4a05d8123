"""On-disk formats: line-delimited JSON segments, CSV outputs, JSON manifest.

One segment per line: {"id": int, "label": optional string, "frames":
[[float, ...], ...]}. Floats round-trip bit-exactly through the JSON
shortest-repr encoding. Assignment rows are ``segment_id,cluster_id``; stats
rows are ``iter,P,max_occ,min_occ,S,K_est,fmeasure,seconds`` with fmeasure
left empty for unlabeled runs.
"""

import csv
import json
from typing import List, Optional

from .data import Dataset, Segment, make_dataset
from .errors import DataError
from .mahc import IterationStats

STATS_HEADER = ["iter", "P", "max_occ", "min_occ", "S", "K_est", "fmeasure", "seconds"]


def save_segments(dataset: Dataset, path) -> None:
    with open(path, "w") as fh:
        for seg in dataset.segments:
            rec = {"id": int(seg.id), "frames": [[float(v) for v in row] for row in seg.frames]}
            if seg.label is not None:
                rec["label"] = str(seg.label)
            fh.write(json.dumps(rec, separators=(",", ":")) + "\n")


def load_segments(path) -> Dataset:
    """Parse a segment file; malformed records name the offending line."""
    segments = []
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                rec = json.loads(line)
            except json.JSONDecodeError as exc:
                raise DataError(f"{path}: line {lineno}: invalid JSON ({exc.msg})") from exc
            try:
                seg_id = rec["id"]
                frames = rec["frames"]
            except (KeyError, TypeError) as exc:
                raise DataError(f"{path}: line {lineno}: missing id/frames") from exc
            if not isinstance(frames, list) or not frames:
                raise DataError(f"{path}: line {lineno}: frames must be a non-empty list")
            width = len(frames[0]) if isinstance(frames[0], list) else -1
            for row in frames:
                if not isinstance(row, list) or len(row) != width or width < 1:
                    raise DataError(f"{path}: line {lineno}: ragged or empty frame")
            try:
                segments.append(Segment(id=seg_id, frames=frames, label=rec.get("label")))
            except (DataError, TypeError) as exc:
                raise DataError(f"{path}: line {lineno}: {exc}") from exc
    if not segments:
        raise DataError(f"{path}: no segments found")
    try:
        return make_dataset(segments)
    except DataError as exc:
        raise DataError(f"{path}: {exc}") from exc


def write_assignment(path, dataset: Dataset, assignment) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["segment_id", "cluster_id"])
        for seg, cluster in zip(dataset.segments, assignment.labels):
            writer.writerow([int(seg.id), int(cluster)])


def read_assignment(path) -> dict:
    """segment id -> cluster id."""
    out = {}
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != ["segment_id", "cluster_id"]:
            raise DataError(f"{path}: unexpected assignment header {header}")
        for lineno, row in enumerate(reader, start=2):
            try:
                seg_id, cluster = int(row[0]), int(row[1])
            except (ValueError, IndexError) as exc:
                raise DataError(f"{path}: line {lineno}: bad assignment row") from exc
            if seg_id in out:
                raise DataError(f"{path}: line {lineno}: duplicate segment id {seg_id}")
            out[seg_id] = cluster
    if not out:
        raise DataError(f"{path}: empty assignment")
    return out


def write_stats(path, stats: List[IterationStats]) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(STATS_HEADER)
        for row in stats:
            writer.writerow([
                row.iteration, row.n_subsets, row.max_occupancy, row.min_occupancy,
                row.n_medoids, row.k_estimate,
                "" if row.fmeasure is None else repr(float(row.fmeasure)),
                repr(float(row.seconds)),
            ])


def read_stats(path) -> List[IterationStats]:
    out = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != STATS_HEADER:
            raise DataError(f"{path}: unexpected stats header {header}")
        for row in reader:
            out.append(IterationStats(
                iteration=int(row[0]), n_subsets=int(row[1]),
                max_occupancy=int(row[2]), min_occupancy=int(row[3]),
                n_medoids=int(row[4]), k_estimate=int(row[5]),
                fmeasure=None if row[6] == "" else float(row[6]),
                seconds=float(row[7]),
            ))
    return out


def write_manifest(path, manifest: dict) -> None:
    with open(path, "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_manifest(path) -> dict:
    try:
        with open(path) as fh:
            manifest = json.load(fh)
    except json.JSONDecodeError as exc:
        raise DataError(f"{path}: invalid manifest JSON ({exc.msg})") from exc
    if not isinstance(manifest, dict):
        raise DataError(f"{path}: manifest must be a JSON object")
    return manifest
