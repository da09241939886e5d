"""Fast circulant Johnson-Lindenstrauss embeddings with Monte-Carlo bound checks."""

from .circulant import PartialCirculant, SignDiagonal, apply_fft, apply_naive, apply_signs
from .embedder import (
    CirculantEmbedder,
    DistortionReport,
    EmbeddingSpec,
    build_embedder,
    choose_k,
    distortion_report,
    embed_point,
)
from .errors import InvalidArgument, OutOfDomain, PointSetParseError, RegimeViolation
from .prng import DistributionTag, Kind, SeedSpec, sample_vector

__all__ = [
    "CirculantEmbedder",
    "DistortionReport",
    "DistributionTag",
    "EmbeddingSpec",
    "InvalidArgument",
    "Kind",
    "OutOfDomain",
    "PartialCirculant",
    "PointSetParseError",
    "RegimeViolation",
    "SeedSpec",
    "SignDiagonal",
    "apply_fft",
    "apply_naive",
    "apply_signs",
    "build_embedder",
    "choose_k",
    "distortion_report",
    "embed_point",
    "sample_vector",
]
