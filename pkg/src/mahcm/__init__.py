"""mahcm: memory-bounded multi-stage agglomerative clustering of
variable-length feature-vector sequences.

Pipeline pieces: pairwise alignment distances (dtw), condensed distance
matrices (simmatrix), Ward agglomeration (ahc), knee-based cluster-count
selection (lmethod), the capped iterative multi-stage loop (mahc), and a
precision/recall/F evaluator (evaluate). The cli module wires them to files.
"""

from ._backend import using_numba
from .ahc import Assignment, Dendrogram, cut, merge_height_curve, ward_ahc
from .data import Dataset, Segment, SubsetView, make_dataset, subset_view
from .dtw import dtw_distance, frame_cost
from .errors import DataError, InvariantError
from .evaluate import (ContingencyTable, contingency, dataset_f_measure,
                       f_pair, precision, recall, score)
from .lmethod import EvaluationCurve, KneeResult, fit_line, l_method
from .mahc import (IterationStats, MahcConfig, MahcResult, MahcState,
                   SubsetClustering, compute_medoids, finalize, full_ahc,
                   initial_partition, partition_indices, refine,
                   regroup_medoids, run, split, stage_one)
from .simmatrix import (CondensedMatrix, build_matrix, condensed_index,
                        condensed_size, dtw_matrix, dump_matrix, load_matrix)
from .synth import SyntheticSpec, generate_synthetic, skewed_class_sizes

__version__ = "0.1.0"

__all__ = [
    "Assignment", "ContingencyTable", "CondensedMatrix", "DataError",
    "Dataset", "Dendrogram", "EvaluationCurve", "InvariantError",
    "IterationStats", "KneeResult", "MahcConfig", "MahcResult", "MahcState",
    "Segment", "SubsetClustering", "SubsetView", "SyntheticSpec",
    "build_matrix", "compute_medoids", "condensed_index", "condensed_size",
    "contingency", "cut", "dataset_f_measure", "dtw_distance", "dtw_matrix",
    "dump_matrix", "f_pair", "finalize", "fit_line", "frame_cost", "full_ahc",
    "generate_synthetic", "initial_partition", "l_method", "load_matrix",
    "make_dataset", "merge_height_curve", "partition_indices", "precision",
    "recall", "refine", "regroup_medoids", "run", "score",
    "skewed_class_sizes", "split", "stage_one", "subset_view", "using_numba",
    "ward_ahc",
]
