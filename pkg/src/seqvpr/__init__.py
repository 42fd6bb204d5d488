"""Sequence-based visual place recognition under JPEG compression.

Measures how JPEG compression of query and map images degrades place
matching, how much sequence length K restores it, and what that costs in
transferred data and time.
"""

from .analysis import (
    ExperimentReport,
    SweepCache,
    SweepPoint,
    TimingProfile,
    data_transferred,
    descriptor_image_ratio,
    encoding_time_seq,
    make_sweep_point,
    minimal_k,
    run_sweep,
    seq_compression_time,
    total_time,
    vpr_time,
)
from .dataset import (
    GroundTruth,
    ImageRecord,
    ImageSet,
    is_correct,
    load_image_set,
    make_image_set,
    resize_set,
    to_gray,
)
from .descriptor import DescriptorSet, HogConfig, compute_hog, cosine, hog_descriptor_set
from .jpeg import (
    EncodedImage,
    SizeCurve,
    compress,
    decompress,
    measure_compression_time,
    size_curve,
)
from .matching import (
    SequenceMatchResult,
    accuracy,
    best_match_sequence,
    best_match_single,
    sequence_score,
    similarity_matrix,
)
from .vprd import load_descriptor_set, store_descriptor_set

__version__ = "0.1.0"
