"""Sequence-based filtering and evaluation for visual place recognition.

Single-frame place matching retrieves, per query image, the most similar
reference image by descriptor comparison. This package layers aligned
sequence-window matching on top (mean of k consecutive frame-pair
scores), evaluates both with precision-recall metrics, and relates the
performance gain to the extra encoding compute.
"""

from .dataset import (
    GroundTruth,
    ImageSet,
    aligned_ground_truth,
    generate_synthetic,
    load_ground_truth,
    load_image_set,
)
from .descriptor import (
    Descriptor,
    DescriptorSet,
    HogParams,
    encode_hog,
    encode_set,
    export_descriptors,
    import_descriptors,
)
from .kernels import backend as kernel_backend
from .matcher import (
    SequenceMatchSet,
    SimilarityMatrix,
    build_similarity_matrix,
    cosine_similarity,
    load_similarity,
    match_sequences,
    save_similarity,
    single_frame_matches,
    window_scores,
)
from .metrics import (
    MetricsReport,
    PcuInputs,
    PrCurve,
    boost_pct,
    label_matches,
    p_at_r100,
    pcu,
    pr_curve,
    precision_recall,
    sequence_cost_model,
)
from .harness import (
    ExperimentConfig,
    ExperimentResult,
    emit_reports,
    load_config,
    run_experiment,
)

__version__ = "0.1.0"

__all__ = [
    "Descriptor",
    "DescriptorSet",
    "ExperimentConfig",
    "ExperimentResult",
    "GroundTruth",
    "HogParams",
    "ImageSet",
    "MetricsReport",
    "PcuInputs",
    "PrCurve",
    "SequenceMatchSet",
    "SimilarityMatrix",
    "aligned_ground_truth",
    "boost_pct",
    "build_similarity_matrix",
    "cosine_similarity",
    "emit_reports",
    "encode_hog",
    "encode_set",
    "export_descriptors",
    "generate_synthetic",
    "import_descriptors",
    "kernel_backend",
    "label_matches",
    "load_config",
    "load_ground_truth",
    "load_image_set",
    "load_similarity",
    "match_sequences",
    "p_at_r100",
    "pcu",
    "pr_curve",
    "precision_recall",
    "run_experiment",
    "save_similarity",
    "sequence_cost_model",
    "single_frame_matches",
    "window_scores",
    "__version__",
]
